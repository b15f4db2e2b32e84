//! Closing a bounded mesh by gluing a triangulated disk onto every boundary loop.
//!
//! Each cap is a two-ring fan. For a loop `b_0 .. b_{n-1}` the cap adds an inner ring
//! `r_0 .. r_{n-1}` (with `r_i` under `b_i`) and one apex. The collar is the band of
//! `2n` triangles between the loop and the inner ring; the interior is the fan of `n`
//! triangles from the inner ring to the apex. Extensions copy data onto the collar
//! and only ever rescale the interior.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FaceForm, VertexField};
use crate::mesh::{Mesh, MetricLengths};

/// One disk glued onto one boundary loop. All ids refer to the capped mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub boundary: Vec<usize>,
    pub inner_ring: Vec<usize>,
    pub apex: usize,
    pub collar_faces: Vec<usize>,
    pub interior_faces: Vec<usize>,
    /// Radial and spoke edge length (longest edge of the loop).
    pub radius: f64,
}

/// Provenance of a capped mesh: where the original simplices went and which
/// faces make up each cap's collar and interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapAtlas {
    pub original_counts: [usize; 3],
    pub capped_counts: [usize; 3],
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub face_map: Vec<usize>,
    pub caps: Vec<Cap>,
}

impl CapAtlas {
    pub fn collar_faces(&self) -> impl Iterator<Item = usize> + '_ {
        self.caps
            .iter()
            .flat_map(|c| c.collar_faces.iter().copied())
    }

    pub fn interior_faces(&self) -> impl Iterator<Item = usize> + '_ {
        self.caps
            .iter()
            .flat_map(|c| c.interior_faces.iter().copied())
    }

    /// Capped-mesh vertices created by capping (inner rings and apexes).
    pub fn cap_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.caps
            .iter()
            .flat_map(|c| c.inner_ring.iter().copied().chain(std::iter::once(c.apex)))
    }

    pub fn num_loops(&self) -> usize {
        self.caps.len()
    }

    /// Whether `mesh` has the vertex/edge/face counts of the original mesh.
    pub fn matches_original(&self, mesh: &Mesh) -> bool {
        counts(mesh) == self.original_counts
    }

    pub fn matches_capped(&self, mesh: &Mesh) -> bool {
        counts(mesh) == self.capped_counts
    }
}

fn counts(mesh: &Mesh) -> [usize; 3] {
    [mesh.num_vertices(), mesh.num_edges(), mesh.num_faces()]
}

/// Glues a disk cap onto every boundary loop of `mesh`.
///
/// Original vertices, faces and edge lengths are kept; new vertices and faces are
/// appended after them.
pub fn cap_all(mesh: &Mesh, lengths: &MetricLengths) -> Result<(Mesh, MetricLengths, CapAtlas)> {
    if mesh.is_closed() {
        return Err(Error::NoBoundary);
    }
    lengths.validate(mesh)?;

    let mut faces = mesh.faces().to_vec();
    let mut next_vertex = mesh.num_vertices();
    let mut cap_lengths: HashMap<(usize, usize), f64> = HashMap::new();
    let mut set = |a: usize, b: usize, l: f64| {
        cap_lengths.insert((a.min(b), a.max(b)), l);
    };
    let mut caps = Vec::new();

    for lp in mesh.boundary_loops() {
        let n = lp.len();
        let side = |i: usize| {
            let e = mesh.edge_id(lp[i], lp[(i + 1) % n]).expect("loop edge");
            lengths.get(e)
        };
        let radius = (0..n).map(side).fold(0.0, f64::max);
        let ring: Vec<usize> = (next_vertex..next_vertex + n).collect();
        let apex = next_vertex + n;
        next_vertex += n + 1;

        let mut collar_faces = Vec::with_capacity(2 * n);
        let mut interior_faces = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            let (b_i, b_j, r_i, r_j) = (lp[i], lp[j], ring[i], ring[j]);
            // The loop runs b_i -> b_j with the surface on its left, so the cap
            // traverses each shared edge the other way.
            collar_faces.push(faces.len());
            faces.push([b_j, b_i, r_j]);
            collar_faces.push(faces.len());
            faces.push([r_j, b_i, r_i]);
            interior_faces.push(faces.len());
            faces.push([r_j, r_i, apex]);

            let b = side(i);
            set(b_i, r_i, radius);
            set(r_i, r_j, b);
            set(b_i, r_j, (radius * radius + b * b).sqrt());
            set(r_i, apex, radius);
        }
        caps.push(Cap {
            boundary: lp.clone(),
            inner_ring: ring,
            apex,
            collar_faces,
            interior_faces,
            radius,
        });
    }

    let capped = Mesh::from_faces(next_vertex, &faces)?;
    let mut edge_map = Vec::with_capacity(mesh.num_edges());
    for &[a, b] in mesh.edges() {
        edge_map.push(
            capped
                .edge_id(a, b)
                .expect("original edge survives capping"),
        );
    }
    let mut values = vec![0.0; capped.num_edges()];
    for (e, &ce) in edge_map.iter().enumerate() {
        values[ce] = lengths.get(e);
    }
    for (e, &[a, b]) in capped.edges().iter().enumerate() {
        if let Some(&l) = cap_lengths.get(&(a, b)) {
            values[e] = l;
        }
    }
    let capped_lengths = MetricLengths::new(&capped, values)?;

    let atlas = CapAtlas {
        original_counts: counts(mesh),
        capped_counts: counts(&capped),
        vertex_map: (0..mesh.num_vertices()).collect(),
        edge_map,
        face_map: (0..mesh.num_faces()).collect(),
        caps,
    };
    Ok((capped, capped_lengths, atlas))
}

/// Data living on simplices of the capped mesh that can be pulled back to the
/// original mesh.
pub trait Restrict: Sized {
    fn restrict(&self, atlas: &CapAtlas) -> Result<Self>;
}

fn pull_back(
    values: &[f64],
    map: &[usize],
    expected: usize,
    what: &'static str,
) -> Result<Vec<f64>> {
    if values.len() != expected {
        return Err(Error::IndexMismatch {
            what,
            expected,
            got: values.len(),
        });
    }
    Ok(map.iter().map(|&i| values[i]).collect())
}

impl Restrict for MetricLengths {
    fn restrict(&self, atlas: &CapAtlas) -> Result<Self> {
        let values = pull_back(
            self.as_slice(),
            &atlas.edge_map,
            atlas.capped_counts[1],
            "edge lengths",
        )?;
        Ok(MetricLengths::from_raw(values))
    }
}

impl Restrict for VertexField {
    fn restrict(&self, atlas: &CapAtlas) -> Result<Self> {
        let values = pull_back(
            self.as_slice(),
            &atlas.vertex_map,
            atlas.capped_counts[0],
            "vertex field",
        )?;
        Ok(VertexField::new(values))
    }
}

impl Restrict for FaceForm {
    fn restrict(&self, atlas: &CapAtlas) -> Result<Self> {
        let values = pull_back(
            self.as_slice(),
            &atlas.face_map,
            atlas.capped_counts[2],
            "face form",
        )?;
        Ok(FaceForm::new(values))
    }
}

/// Pulls capped-mesh data back to the original mesh.
pub fn restrict<T: Restrict>(data: &T, atlas: &CapAtlas) -> Result<T> {
    data.restrict(atlas)
}

/// Display coordinates for a capped mesh. Viewing only: these do not realize the
/// cap metric.
///
/// Each apex sits above its loop centroid along the loop's Newell normal at distance
/// `radius`; inner-ring vertices sit halfway between their boundary vertex and the apex.
pub fn cap_coordinates(coords: &[[f64; 3]], atlas: &CapAtlas) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]; atlas.capped_counts[0]];
    for (v, &cv) in atlas.vertex_map.iter().enumerate() {
        out[cv] = coords[v];
    }
    for cap in &atlas.caps {
        let pts: Vec<[f64; 3]> = cap.boundary.iter().map(|&v| out[v]).collect();
        let n = pts.len() as f64;
        let mut centroid = [0.0; 3];
        let mut normal = [0.0; 3];
        for (i, p) in pts.iter().enumerate() {
            let q = pts[(i + 1) % pts.len()];
            for k in 0..3 {
                centroid[k] += p[k] / n;
            }
            normal[0] += (p[1] - q[1]) * (p[2] + q[2]);
            normal[1] += (p[2] - q[2]) * (p[0] + q[0]);
            normal[2] += (p[0] - q[0]) * (p[1] + q[1]);
        }
        let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        let normal = if norm > 0.0 {
            normal.map(|x| x / norm)
        } else {
            [0.0, 0.0, 1.0]
        };
        // The loop winds with the surface on its left, so the Newell normal points
        // to the side the surface is seen from; put the cap on the other side.
        let apex: [f64; 3] = std::array::from_fn(|k| centroid[k] - cap.radius * normal[k]);
        out[cap.apex] = apex;
        for (&b, &r) in cap.boundary.iter().zip(&cap.inner_ring) {
            out[r] = std::array::from_fn(|k| 0.5 * (out[b][k] + apex[k]));
        }
    }
    out
}
