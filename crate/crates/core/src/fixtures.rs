//! The bundled test surfaces.
//!
//! Each fixture carries display coordinates plus an intrinsic metric. Where the metric
//! is not the Euclidean one of the coordinates (unit tetrahedron and icosahedron,
//! the equilateral tori) the lengths are given explicitly.

use std::f64::consts::PI;

use crate::io::{to_json, write_off, LengthSidecar};
use crate::mesh::{load_mesh, LengthSource, Mesh, MetricLengths};

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub coords: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Explicit `(i, j, L)` lengths; `None` means Euclidean lengths of `coords`.
    pub lengths: Option<Vec<(usize, usize, f64)>>,
}

impl Fixture {
    pub fn load(&self) -> (Mesh, MetricLengths) {
        let source = match &self.lengths {
            Some(list) => LengthSource::EdgeList(list),
            None => LengthSource::Coordinates(&self.coords),
        };
        load_mesh(self.coords.len(), &self.faces, source)
            .unwrap_or_else(|e| panic!("fixture {} is invalid: {e}", self.name))
    }

    /// The fixture as ASCII OFF text.
    pub fn off_text(&self) -> String {
        write_off(&self.coords, &self.faces)
    }

    /// The explicit metric as a length sidecar, if the fixture has one.
    pub fn sidecar_text(&self) -> Option<String> {
        self.lengths.as_ref().map(|lengths| {
            to_json(&LengthSidecar {
                lengths: lengths.clone(),
            })
        })
    }
}

pub const NAMES: [&str; 6] = [
    "tetrahedron",
    "icosahedron",
    "triangle",
    "hex_fan",
    "annulus",
    "genus2_hole",
];

pub fn by_name(name: &str) -> Option<Fixture> {
    Some(match name {
        "tetrahedron" => tetrahedron_data(),
        "icosahedron" => icosahedron_data(),
        "triangle" => triangle_data(),
        "hex_fan" => hex_fan_data(),
        "annulus" => annulus_data(),
        "genus2_hole" => genus2_hole_data(),
        "torus_hole" => torus_hole_data(),
        _ => return None,
    })
}

pub fn all() -> Vec<Fixture> {
    NAMES.iter().filter_map(|n| by_name(n)).collect()
}

fn unit_lengths(faces: &[[usize; 3]]) -> Vec<(usize, usize, f64)> {
    let mut list: Vec<(usize, usize, f64)> = faces
        .iter()
        .flat_map(|f| {
            (0..3).map(move |k| (f[k].min(f[(k + 1) % 3]), f[k].max(f[(k + 1) % 3]), 1.0))
        })
        .collect();
    list.sort_by_key(|&(a, b, _)| (a, b));
    list.dedup_by_key(|&mut (a, b, _)| (a, b));
    list
}

pub fn tetrahedron_data() -> Fixture {
    let h = (2.0f64 / 3.0).sqrt();
    let s = 3f64.sqrt();
    let faces = vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]];
    Fixture {
        name: "tetrahedron",
        coords: vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.5, s / 2.0, 0.0],
            [0.5, s / 6.0, h],
        ],
        lengths: Some(unit_lengths(&faces)),
        faces,
    }
}

pub fn icosahedron_data() -> Fixture {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut coords = Vec::new();
    for &a in &[-1.0, 1.0] {
        for &b in &[-phi, phi] {
            coords.push([0.0, a / 2.0, b / 2.0]);
            coords.push([a / 2.0, b / 2.0, 0.0]);
            coords.push([b / 2.0, 0.0, a / 2.0]);
        }
    }
    let dist = |p: [f64; 3], q: [f64; 3]| {
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
    };
    let adjacent = |i: usize, j: usize| (dist(coords[i], coords[j]) - 1.0).abs() < 1e-9;
    let mut faces = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if adjacent(i, j) && adjacent(j, k) && adjacent(i, k) {
                    faces.push([i, j, k]);
                }
            }
        }
    }
    Fixture {
        name: "icosahedron",
        lengths: Some(unit_lengths(&faces)),
        coords,
        faces,
    }
}

pub fn triangle_data() -> Fixture {
    let faces = vec![[0, 1, 2]];
    Fixture {
        name: "triangle",
        coords: vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.5, 3f64.sqrt() / 2.0, 0.0],
        ],
        lengths: Some(unit_lengths(&faces)),
        faces,
    }
}

/// Six unit equilateral triangles around vertex 0.
pub fn hex_fan_data() -> Fixture {
    let mut coords = vec![[0.0, 0.0, 0.0]];
    for k in 0..6 {
        let t = PI / 3.0 * k as f64;
        coords.push([t.cos(), t.sin(), 0.0]);
    }
    let faces: Vec<[usize; 3]> = (0..6).map(|k| [0, k + 1, (k + 1) % 6 + 1]).collect();
    Fixture {
        name: "hex_fan",
        lengths: Some(unit_lengths(&faces)),
        coords,
        faces,
    }
}

/// Planar annulus with six vertices on each of radius 1 and radius 2.
pub fn annulus_data() -> Fixture {
    let n = 6;
    let mut coords = Vec::new();
    for radius in [1.0, 2.0] {
        for k in 0..n {
            let t = 2.0 * PI * k as f64 / n as f64;
            coords.push([radius * t.cos(), radius * t.sin(), 0.0]);
        }
    }
    let mut faces = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push([i, j, n + i]);
        faces.push([j, n + j, n + i]);
    }
    Fixture {
        name: "annulus",
        coords,
        faces,
        lengths: None,
    }
}

fn torus_grid(offset: usize) -> Vec<[usize; 3]> {
    let id = |i: usize, j: usize| offset + (i % 3) * 3 + (j % 3);
    let mut faces = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    faces
}

fn torus_coords(center_x: f64, mirror: bool) -> Vec<[f64; 3]> {
    let (big, small) = (2.0, 0.8);
    let mut coords = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let t = 2.0 * PI * i as f64 / 3.0;
            let p = 2.0 * PI * j as f64 / 3.0 + PI / 3.0;
            let x = (big + small * p.cos()) * t.cos();
            let sign = if mirror { -1.0 } else { 1.0 };
            coords.push([
                center_x + sign * x,
                (big + small * p.cos()) * t.sin(),
                small * p.sin(),
            ]);
        }
    }
    coords
}

/// 3×3 grid torus with one face removed (χ = −1). Equilateral unit metric.
pub fn torus_hole_data() -> Fixture {
    let mut faces = torus_grid(0);
    faces.remove(9);
    Fixture {
        name: "torus_hole",
        coords: torus_coords(0.0, false),
        lengths: Some(unit_lengths(&faces)),
        faces,
    }
}

/// Two grid tori joined along a removed triangle, with one further face removed
/// (genus 2, one boundary loop, χ = −3). Equilateral unit metric.
pub fn genus2_hole_data() -> Fixture {
    let mut first = torus_grid(0);
    let mut second = torus_grid(9);
    let glue_a = first.remove(0);
    let glue_b = second.remove(0);
    // Identify the removed triangles with opposite winding; drop the duplicated
    // vertices of the second torus and renumber.
    let identify = [
        (glue_b[0], glue_a[0]),
        (glue_b[1], glue_a[2]),
        (glue_b[2], glue_a[1]),
    ];
    let mut renumber: Vec<usize> = (0..18).collect();
    for &(from, to) in &identify {
        renumber[from] = to;
    }
    let mut next = 9;
    for (v, slot) in renumber.iter_mut().enumerate().skip(9) {
        if identify.iter().all(|&(from, _)| from != v) {
            *slot = next;
            next += 1;
        }
    }
    let mut coords = torus_coords(0.0, false);
    let second_coords = torus_coords(4.2, true);
    for v in 9..18 {
        if renumber[v] >= 9 {
            coords.push(second_coords[v - 9]);
        }
    }
    let mut faces = first;
    faces.remove(8);
    faces.extend(second.iter().map(|f| f.map(|v| renumber[v])));
    Fixture {
        name: "genus2_hole",
        lengths: Some(unit_lengths(&faces)),
        coords,
        faces,
    }
}

pub fn tetrahedron() -> (Mesh, MetricLengths) {
    tetrahedron_data().load()
}

pub fn icosahedron() -> (Mesh, MetricLengths) {
    icosahedron_data().load()
}

pub fn single_triangle() -> (Mesh, MetricLengths) {
    triangle_data().load()
}

pub fn hex_fan() -> (Mesh, MetricLengths) {
    hex_fan_data().load()
}

pub fn annulus() -> (Mesh, MetricLengths) {
    annulus_data().load()
}

pub fn genus2_hole() -> (Mesh, MetricLengths) {
    genus2_hole_data().load()
}

pub fn torus_hole() -> (Mesh, MetricLengths) {
    torus_hole_data().load()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_characteristics() {
        let expect = [
            ("tetrahedron", 4, 2, 0),
            ("icosahedron", 12, 2, 0),
            ("triangle", 3, 1, 1),
            ("hex_fan", 7, 1, 1),
            ("annulus", 12, 0, 2),
            ("genus2_hole", 15, -3, 1),
            ("torus_hole", 9, -1, 1),
        ];
        for (name, v, chi, loops) in expect {
            let (m, _) = by_name(name).unwrap().load();
            assert_eq!(m.num_vertices(), v, "{name}");
            assert_eq!(m.euler_characteristic(), chi, "{name}");
            assert_eq!(m.boundary_loops().len(), loops, "{name}");
        }
    }

    #[test]
    fn icosahedron_has_twenty_faces() {
        assert_eq!(icosahedron_data().faces.len(), 20);
    }
}
