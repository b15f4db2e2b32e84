//! Oriented triangle meshes with boundary and their intrinsic edge-length metrics.
//!
//! Connectivity lives in [`Mesh`] and never changes after construction. A metric is
//! a separate [`MetricLengths`] value indexed by edge id, so one mesh can carry many
//! metrics.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};

/// Slack allowed on the law-of-cosines argument before it is treated as degenerate.
pub const COS_TOLERANCE: f64 = 1e-9;

/// A connected, oriented triangulated surface, possibly with boundary.
///
/// Faces are stored with consistent winding; the surface lies to the left of every
/// directed boundary edge. Edge `k` of face `[v0, v1, v2]` joins `v_k` and `v_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    num_vertices: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_index: HashMap<(usize, usize), usize>,
    face_edges: Vec<[usize; 3]>,
    edge_faces: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
    on_boundary: Vec<bool>,
    boundary_loops: Vec<Vec<usize>>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn has_directed(face: &[usize; 3], a: usize, b: usize) -> bool {
    (0..3).any(|k| face[k] == a && face[(k + 1) % 3] == b)
}

impl Mesh {
    /// Builds a mesh from a face list, making the orientation consistent.
    ///
    /// The winding of the first face is kept; every other face is flipped as needed
    /// to agree with it. Vertex ids must be `0..num_vertices` and each must be used.
    pub fn from_faces(num_vertices: usize, faces: &[[usize; 3]]) -> Result<Mesh> {
        if faces.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let mut seen = HashSet::new();
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&v) = f.iter().find(|&&v| v >= num_vertices) {
                return Err(Error::InvalidFace {
                    face: fi,
                    reason: format!("vertex {v} out of range (V = {num_vertices})"),
                });
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidFace {
                    face: fi,
                    reason: "repeated vertex".into(),
                });
            }
            let mut sorted = *f;
            sorted.sort_unstable();
            if !seen.insert(sorted) {
                return Err(Error::InvalidFace {
                    face: fi,
                    reason: "duplicate face".into(),
                });
            }
        }

        let mut edges = Vec::new();
        let mut edge_index = HashMap::new();
        let mut edge_faces: Vec<Vec<usize>> = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            let mut fe = [0; 3];
            for k in 0..3 {
                let (a, b) = key(f[k], f[(k + 1) % 3]);
                let id = *edge_index.entry((a, b)).or_insert_with(|| {
                    edges.push([a, b]);
                    edge_faces.push(Vec::new());
                    edges.len() - 1
                });
                edge_faces[id].push(fi);
                if edge_faces[id].len() > 2 {
                    return Err(Error::NonManifoldEdge(a, b));
                }
                fe[k] = id;
            }
            face_edges.push(fe);
        }

        let mut vertex_faces = vec![Vec::new(); num_vertices];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                vertex_faces[v].push(fi);
            }
        }
        if let Some(v) = vertex_faces.iter().position(Vec::is_empty) {
            return Err(Error::Disconnected(v));
        }

        for (v, incident) in vertex_faces.iter().enumerate() {
            check_vertex_link(v, incident, faces)?;
        }
        let faces = orient(faces, &face_edges, &edge_faces)?;
        let face_edges: Vec<[usize; 3]> = faces
            .iter()
            .map(|f| [0, 1, 2].map(|k| edge_index[&key(f[k], f[(k + 1) % 3])]))
            .collect();

        let mut on_boundary = vec![false; num_vertices];
        let mut next = HashMap::new();
        for (id, ef) in edge_faces.iter().enumerate() {
            if ef.len() == 1 {
                let [a, b] = edges[id];
                on_boundary[a] = true;
                on_boundary[b] = true;
                let (from, to) = if has_directed(&faces[ef[0]], a, b) {
                    (a, b)
                } else {
                    (b, a)
                };
                if next.insert(from, to).is_some() {
                    return Err(Error::NonManifoldVertex(from));
                }
            }
        }
        let boundary_loops = trace_loops(num_vertices, &next)?;

        Ok(Mesh {
            num_vertices,
            faces,
            edges,
            edge_index,
            face_edges,
            edge_faces,
            vertex_faces,
            on_boundary,
            boundary_loops,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    /// Edge endpoints, smaller id first.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    /// Edge ids of a face; entry `k` joins corners `k` and `k + 1`.
    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    /// Faces incident to an edge (one for boundary edges, two otherwise).
    pub fn edge_faces(&self, e: usize) -> &[usize] {
        &self.edge_faces[e]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&key(a, b)).copied()
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_faces[e].len() == 1
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices).filter(|&v| !self.on_boundary[v])
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices).filter(|&v| self.on_boundary[v])
    }

    /// χ = V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Boundary loops as cyclic vertex sequences, each with the surface on its left.
    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    /// Position of `v` among the corners of face `f`.
    pub fn corner_index(&self, f: usize, v: usize) -> Result<usize> {
        self.faces[f]
            .iter()
            .position(|&w| w == v)
            .ok_or(Error::NotACorner { face: f, vertex: v })
    }
}

fn orient(
    faces: &[[usize; 3]],
    face_edges: &[[usize; 3]],
    edge_faces: &[Vec<usize>],
) -> Result<Vec<[usize; 3]>> {
    let mut out = faces.to_vec();
    let mut visited = vec![false; faces.len()];
    let mut queue = VecDeque::from([0]);
    visited[0] = true;
    while let Some(f) = queue.pop_front() {
        for &e in &face_edges[f] {
            for &g in &edge_faces[e] {
                if g == f {
                    continue;
                }
                let shared: Vec<usize> = out[f]
                    .iter()
                    .copied()
                    .filter(|v| out[g].contains(v))
                    .collect();
                let (mut a, mut b) = (shared[0], shared[1]);
                if !has_directed(&out[f], a, b) {
                    std::mem::swap(&mut a, &mut b);
                }
                let agrees = has_directed(&out[g], b, a);
                if visited[g] {
                    if !agrees {
                        return Err(Error::NonOrientable);
                    }
                } else {
                    if !agrees {
                        out[g].swap(1, 2);
                    }
                    visited[g] = true;
                    queue.push_back(g);
                }
            }
        }
    }
    if let Some(f) = visited.iter().position(|&seen| !seen) {
        return Err(Error::Disconnected(faces[f][0]));
    }
    Ok(out)
}

// The link of a manifold vertex is a single cycle (interior) or a single path
// (boundary).
fn check_vertex_link(v: usize, incident: &[usize], faces: &[[usize; 3]]) -> Result<()> {
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for &f in incident {
        let others: Vec<usize> = faces[f].iter().copied().filter(|&w| w != v).collect();
        adjacency.entry(others[0]).or_default().push(others[1]);
        adjacency.entry(others[1]).or_default().push(others[0]);
    }
    let ends = adjacency.values().filter(|n| n.len() == 1).count();
    if ends != 0 && ends != 2 {
        return Err(Error::NonManifoldVertex(v));
    }
    let start = *adjacency.keys().min().expect("vertex has incident faces");
    let mut reached = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(w) = stack.pop() {
        for &n in &adjacency[&w] {
            if reached.insert(n) {
                stack.push(n);
            }
        }
    }
    if reached.len() != adjacency.len() {
        return Err(Error::NonManifoldVertex(v));
    }
    Ok(())
}

fn trace_loops(num_vertices: usize, next: &HashMap<usize, usize>) -> Result<Vec<Vec<usize>>> {
    let mut loops = Vec::new();
    let mut used = vec![false; num_vertices];
    for start in 0..num_vertices {
        if used[start] || !next.contains_key(&start) {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        loop {
            if used[v] {
                return Err(Error::NonManifoldVertex(v));
            }
            used[v] = true;
            cycle.push(v);
            v = *next.get(&v).ok_or(Error::NonManifoldVertex(v))?;
            if v == start {
                break;
            }
        }
        loops.push(cycle);
    }
    Ok(loops)
}

/// Positive length per edge, indexed by edge id.
///
/// Values built with [`MetricLengths::from_raw`] are not validated; use
/// [`MetricLengths::validate`] before trusting them.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLengths(Vec<f64>);

impl MetricLengths {
    /// Validated lengths for `mesh`.
    pub fn new(mesh: &Mesh, lengths: Vec<f64>) -> Result<Self> {
        let metric = MetricLengths(lengths);
        metric.validate(mesh)?;
        Ok(metric)
    }

    pub fn from_raw(lengths: Vec<f64>) -> Self {
        MetricLengths(lengths)
    }

    /// Euclidean edge lengths of an embedding.
    pub fn from_coordinates(mesh: &Mesh, coords: &[[f64; 3]]) -> Result<Self> {
        if coords.len() != mesh.num_vertices() {
            return Err(Error::IndexMismatch {
                what: "vertex coordinates",
                expected: mesh.num_vertices(),
                got: coords.len(),
            });
        }
        let lengths = mesh
            .edges()
            .iter()
            .map(|&[a, b]| {
                let (p, q) = (coords[a], coords[b]);
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
            })
            .collect();
        Self::new(mesh, lengths)
    }

    /// Lengths from `(i, j, L)` triples; every mesh edge must appear exactly once.
    pub fn from_edge_list(mesh: &Mesh, list: &[(usize, usize, f64)]) -> Result<Self> {
        let mut lengths = vec![None; mesh.num_edges()];
        for &(i, j, l) in list {
            let e = mesh.edge_id(i, j).ok_or(Error::UnknownEdge(i, j))?;
            lengths[e] = Some(l);
        }
        let lengths = lengths
            .into_iter()
            .enumerate()
            .map(|(e, l)| {
                let [a, b] = mesh.edge(e);
                l.ok_or(Error::MissingLength(a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mesh, lengths)
    }

    /// Checks positivity and the strict triangle inequalities on every face.
    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if self.0.len() != mesh.num_edges() {
            return Err(Error::IndexMismatch {
                what: "edge lengths",
                expected: mesh.num_edges(),
                got: self.0.len(),
            });
        }
        for (e, &l) in self.0.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::NonPositiveLength { edge: e, length: l });
            }
        }
        for f in 0..mesh.num_faces() {
            let [a, b, c] = self.face_lengths(mesh, f);
            if !strict_triangle(a, b, c) {
                return Err(Error::DegenerateTriangle { face: f });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: usize) -> f64 {
        self.0[e]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Lengths of the edges of face `f`, in [`Mesh::face_edges`] order.
    pub fn face_lengths(&self, mesh: &Mesh, f: usize) -> [f64; 3] {
        mesh.face_edges(f).map(|e| self.0[e])
    }

    /// `(i, j, L)` triples with `i < j`, in edge-id order.
    pub fn to_edge_list(&self, mesh: &Mesh) -> Vec<(usize, usize, f64)> {
        mesh.edges()
            .iter()
            .zip(&self.0)
            .map(|(&[a, b], &l)| (a, b, l))
            .collect()
    }

    /// Corner angles of face `f`; entry `k` is the angle at corner `k`.
    pub fn face_angles(&self, mesh: &Mesh, f: usize) -> Result<[f64; 3]> {
        let [l01, l12, l20] = self.face_lengths(mesh, f);
        let wrap = |r: Result<f64>| r.map_err(|_| Error::DegenerateTriangle { face: f });
        Ok([
            wrap(angle_from_lengths(l01, l20, l12))?,
            wrap(angle_from_lengths(l12, l01, l20))?,
            wrap(angle_from_lengths(l20, l12, l01))?,
        ])
    }
}

pub(crate) fn strict_triangle(a: f64, b: f64, c: f64) -> bool {
    a > 0.0 && b > 0.0 && c > 0.0 && a + b > c && b + c > a && c + a > b
}

/// Angle between sides `a` and `b` of a triangle whose third side is `c`.
///
/// The triangle must be strictly non-degenerate. A law-of-cosines argument within
/// [`COS_TOLERANCE`] of ±1 is clamped; anything further out is an error.
pub fn angle_from_lengths(a: f64, b: f64, c: f64) -> Result<f64> {
    if !strict_triangle(a, b, c) {
        return Err(Error::DegenerateTriangle { face: usize::MAX });
    }
    let cos = (a * a + b * b - c * c) / (2.0 * a * b);
    if !(-1.0 - COS_TOLERANCE..=1.0 + COS_TOLERANCE).contains(&cos) {
        return Err(Error::DegenerateTriangle { face: usize::MAX });
    }
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// Interior angle of face `face` at `vertex`.
pub fn corner_angle(
    mesh: &Mesh,
    lengths: &MetricLengths,
    face: usize,
    vertex: usize,
) -> Result<f64> {
    let k = mesh.corner_index(face, vertex)?;
    Ok(lengths.face_angles(mesh, face)?[k])
}

/// How edge lengths are supplied to [`load_mesh`].
#[derive(Debug, Clone, Copy)]
pub enum LengthSource<'a> {
    Coordinates(&'a [[f64; 3]]),
    EdgeList(&'a [(usize, usize, f64)]),
}

/// Validated mesh plus metric.
pub fn load_mesh(
    num_vertices: usize,
    faces: &[[usize; 3]],
    lengths: LengthSource<'_>,
) -> Result<(Mesh, MetricLengths)> {
    let mesh = Mesh::from_faces(num_vertices, faces)?;
    let metric = match lengths {
        LengthSource::Coordinates(coords) => MetricLengths::from_coordinates(&mesh, coords)?,
        LengthSource::EdgeList(list) => MetricLengths::from_edge_list(&mesh, list)?,
    };
    Ok((mesh, metric))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::PI;

    #[test]
    fn tetrahedron_counts() {
        let (m, _) = fixtures::tetrahedron();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces()), (4, 6, 4));
        assert!(m.boundary_loops().is_empty());
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn single_triangle_counts() {
        let (m, _) = fixtures::single_triangle();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces()), (3, 3, 1));
        assert_eq!(m.boundary_loops().len(), 1);
        assert_eq!(m.boundary_loops()[0].len(), 3);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn annulus_has_two_loops() {
        let (m, _) = fixtures::annulus();
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.boundary_loops().len(), 2);
    }

    #[test]
    fn edge_in_three_faces_is_rejected() {
        let faces = [[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        assert_eq!(
            Mesh::from_faces(5, &faces),
            Err(Error::NonManifoldEdge(0, 1))
        );
    }

    #[test]
    fn inconsistent_winding_is_repaired() {
        // Tetrahedron with two faces flipped.
        let faces = [[0, 1, 2], [0, 1, 3], [1, 2, 3], [0, 2, 3]];
        let m = Mesh::from_faces(4, &faces).unwrap();
        for e in 0..m.num_edges() {
            let [a, b] = m.edge(e);
            let [f, g] = [m.edge_faces(e)[0], m.edge_faces(e)[1]];
            assert_ne!(
                has_directed(&m.face(f), a, b),
                has_directed(&m.face(g), a, b)
            );
        }
    }

    #[test]
    fn mobius_strip_is_non_orientable() {
        // Five-vertex Möbius band.
        let faces = [[0, 1, 2], [1, 2, 3], [2, 3, 4], [3, 4, 0], [4, 0, 1]];
        assert_eq!(Mesh::from_faces(5, &faces), Err(Error::NonOrientable));
    }

    #[test]
    fn disconnected_and_isolated() {
        let faces = [[0, 1, 2], [3, 4, 5]];
        assert!(matches!(
            Mesh::from_faces(6, &faces),
            Err(Error::Disconnected(_))
        ));
        assert_eq!(
            Mesh::from_faces(4, &[[0, 1, 2]]),
            Err(Error::Disconnected(3))
        );
    }

    #[test]
    fn bowtie_vertex_is_rejected() {
        let faces = [[0, 1, 2], [0, 3, 4]];
        assert_eq!(
            Mesh::from_faces(5, &faces),
            Err(Error::NonManifoldVertex(0))
        );
    }

    #[test]
    fn bad_faces() {
        assert_eq!(Mesh::from_faces(3, &[]), Err(Error::EmptyMesh));
        assert!(matches!(
            Mesh::from_faces(3, &[[0, 0, 1]]),
            Err(Error::InvalidFace { .. })
        ));
        assert!(matches!(
            Mesh::from_faces(3, &[[0, 1, 3]]),
            Err(Error::InvalidFace { .. })
        ));
    }

    #[test]
    fn corner_angles() {
        assert!((angle_from_lengths(1.0, 1.0, 1.0).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((angle_from_lengths(3.0, 4.0, 5.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(angle_from_lengths(1.0, 1.0, 2.0).is_err());

        let (m, l) = fixtures::single_triangle();
        for v in 0..3 {
            assert!((corner_angle(&m, &l, 0, v).unwrap() - PI / 3.0).abs() < 1e-15);
        }
        assert_eq!(
            corner_angle(&m, &l, 0, 7),
            Err(Error::NotACorner { face: 0, vertex: 7 })
        );
    }

    #[test]
    fn degenerate_lengths_rejected() {
        let m = Mesh::from_faces(3, &[[0, 1, 2]]).unwrap();
        assert!(matches!(
            MetricLengths::new(&m, vec![1.0, 1.0, 2.0]),
            Err(Error::DegenerateTriangle { face: 0 })
        ));
        assert!(matches!(
            MetricLengths::new(&m, vec![1.0, -1.0, 1.0]),
            Err(Error::NonPositiveLength { .. })
        ));
    }

    #[test]
    fn edge_list_must_cover_mesh() {
        let m = Mesh::from_faces(3, &[[0, 1, 2]]).unwrap();
        assert_eq!(
            MetricLengths::from_edge_list(&m, &[(0, 1, 1.0), (1, 2, 1.0)]),
            Err(Error::MissingLength(0, 2))
        );
        assert_eq!(
            MetricLengths::from_edge_list(&m, &[(0, 3, 1.0)]),
            Err(Error::UnknownEdge(0, 3))
        );
    }

    #[test]
    fn boundary_loop_keeps_surface_on_left() {
        let (m, _) = fixtures::hex_fan();
        let lp = &m.boundary_loops()[0];
        for i in 0..lp.len() {
            let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
            let e = m.edge_id(a, b).unwrap();
            let f = m.edge_faces(e)[0];
            assert!(has_directed(&m.face(f), a, b));
        }
    }
}
