//! Browser demo operations.
//!
//! Each operation is a plain Rust function returning a JSON string, so the logic is
//! testable natively; the `#[wasm_bindgen]` wrappers only convert errors.

use std::f64::consts::PI;

use capcurv::capping::{cap_all, cap_coordinates};
use capcurv::fields::{extend_form_prescribed_integral, FaceForm, VertexField};
use capcurv::io::to_json;
use capcurv::pipeline::prescribe_function;
use capcurv::solver::SolveOptions;
use capcurv::{corner_angle, fixtures, gauss_bonnet_check, Mesh, MetricLengths};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Point = [f64; 2];

#[derive(Serialize)]
struct FanLayout {
    target: f64,
    achieved: f64,
    max_error: f64,
    iterations: usize,
    /// Fan triangles unfolded into the plane around the center vertex.
    triangles: Vec<[Point; 3]>,
    /// Angle left open after unfolding; equals the achieved defect.
    gap: f64,
}

/// Prescribes `target` at the center of the hexagonal fan and unfolds the result.
pub fn fan_layout(target: f64) -> Result<String, String> {
    let (mesh, lengths) = fixtures::hex_fan();
    let mut field = VertexField::zeros(mesh.num_vertices());
    field.set(0, target);
    let result = prescribe_function(&mesh, &lengths, &field, &SolveOptions::default())
        .map_err(|e| e.to_string())?;
    let triangles = unfold_star(&mesh, &result.metric_on_m, 0)?;
    let gap = 2.0 * PI - triangles_angle(&triangles);
    let layout = FanLayout {
        target,
        achieved: result.achieved.get(0),
        max_error: result.max_error,
        iterations: result.solve_trace.iterations(),
        triangles,
        gap,
    };
    Ok(to_json(&layout))
}

fn triangles_angle(triangles: &[[Point; 3]]) -> f64 {
    triangles
        .iter()
        .map(|[_, a, b]| {
            let cross = a[0] * b[1] - a[1] * b[0];
            let dot = a[0] * b[0] + a[1] * b[1];
            cross.atan2(dot)
        })
        .sum()
}

/// Lays the faces around `center` side by side in the plane. Each triangle is `[center, previous spoke, next spoke]`.
fn unfold_star(
    mesh: &Mesh,
    lengths: &MetricLengths,
    center: usize,
) -> Result<Vec<[Point; 3]>, String> {
    let spoke = |v: usize| -> Result<f64, String> {
        let e = mesh.edge_id(center, v).ok_or("missing spoke")?;
        Ok(lengths.get(e))
    };
    let third = |f: usize, v: usize| mesh.face(f).into_iter().find(|&w| w != center && w != v);
    let faces = mesh.vertex_faces(center);
    let on_star = |w: usize| faces.iter().filter(|&&f| mesh.face(f).contains(&w)).count();
    let spokes = faces
        .iter()
        .flat_map(|&f| mesh.face(f))
        .filter(|&w| w != center);
    // An open star must start at a spoke on one face; a closed one can start anywhere.
    let mut current = spokes
        .clone()
        .find(|&w| on_star(w) == 1)
        .or_else(|| spokes.min())
        .ok_or("vertex has no faces")?;
    let mut visited = Vec::new();
    let mut angle = 0.0_f64;
    let mut triangles = Vec::new();
    while let Some(f) = faces
        .iter()
        .copied()
        .find(|&f| !visited.contains(&f) && mesh.face(f).contains(&current))
    {
        visited.push(f);
        let next = third(f, current).ok_or("bad face")?;
        let theta = corner_angle(mesh, lengths, f, center).map_err(|e| e.to_string())?;
        let (r0, r1) = (spoke(current)?, spoke(next)?);
        triangles.push([
            [0.0, 0.0],
            [r0 * angle.cos(), r0 * angle.sin()],
            [r1 * (angle + theta).cos(), r1 * (angle + theta).sin()],
        ]);
        angle += theta;
        current = next;
    }
    Ok(triangles)
}

#[derive(Serialize)]
struct GaussBonnetDemo {
    name: String,
    chi: i64,
    /// `(vertex, defect)` for interior vertices.
    interior: Vec<(usize, f64)>,
    /// `(vertex, turning)` for boundary vertices.
    boundary: Vec<(usize, f64)>,
    total: f64,
    target: f64,
    residual: f64,
}

/// Scales every edge of fixture `name` by `exp(uniform(-jitter, jitter))`, redrawing
/// until the triangle inequalities hold, and evaluates the Gauss-Bonnet identity.
pub fn gauss_bonnet_demo(name: &str, jitter: f64, seed: u64) -> Result<String, String> {
    let fixture = fixtures::by_name(name).ok_or_else(|| format!("unknown fixture {name:?}"))?;
    let (mesh, base) = fixture.load();
    let jitter = jitter.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths = (0..1000)
        .find_map(|_| {
            let raw = base
                .as_slice()
                .iter()
                .map(|&l| l * rng.gen_range(-jitter..=jitter).exp())
                .collect();
            MetricLengths::new(&mesh, raw).ok()
        })
        .unwrap_or(base);
    let report = gauss_bonnet_check(&mesh, &lengths).map_err(|e| e.to_string())?;
    let demo = GaussBonnetDemo {
        name: name.to_string(),
        chi: mesh.euler_characteristic(),
        interior: mesh
            .interior_vertices()
            .map(|v| (v, report.interior_defects.get(v)))
            .collect(),
        boundary: report.boundary_turning.clone(),
        total: report.total,
        target: report.gb_target,
        residual: report.gb_residual,
    };
    Ok(to_json(&demo))
}

#[derive(Serialize)]
struct CapFace {
    kind: &'static str,
    points: [Point; 3],
    value: f64,
}

#[derive(Serialize)]
struct ExtensionDemo {
    faces: Vec<CapFace>,
    total: f64,
    scale: f64,
}

/// Caps the single triangle, puts `value` on it and extends with seed `seed` so the
/// total is `total`. Faces come back projected to the plane of the triangle.
pub fn extension_demo(value: f64, total: f64, seed: f64) -> Result<String, String> {
    let fixture = fixtures::triangle_data();
    let (mesh, lengths) = fixture.load();
    let (capped, _, atlas) = cap_all(&mesh, &lengths).map_err(|e| e.to_string())?;
    let coords = cap_coordinates(&fixture.coords, &atlas);
    let form = FaceForm::constant(&mesh, value);
    let (extended, report) =
        extend_form_prescribed_integral(&form, &atlas, total, seed).map_err(|e| e.to_string())?;
    let collar: Vec<usize> = atlas.collar_faces().collect();
    let faces = (0..capped.num_faces())
        .map(|f| {
            let kind = if f < mesh.num_faces() {
                "original"
            } else if collar.contains(&f) {
                "collar"
            } else {
                "interior"
            };
            CapFace {
                kind,
                points: capped.face(f).map(|v| [coords[v][0], coords[v][1]]),
                value: extended.get(f),
            }
        })
        .collect();
    Ok(to_json(&ExtensionDemo {
        faces,
        total: report.achieved_total,
        scale: report.scale,
    }))
}

#[wasm_bindgen(js_name = fanLayout)]
pub fn fan_layout_js(target: f64) -> Result<String, JsError> {
    fan_layout(target).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gaussBonnetDemo)]
pub fn gauss_bonnet_demo_js(name: &str, jitter: f64, seed: u32) -> Result<String, JsError> {
    gauss_bonnet_demo(name, jitter, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = extensionDemo)]
pub fn extension_demo_js(value: f64, total: f64, seed: f64) -> Result<String, JsError> {
    extension_demo(value, total, seed).map_err(|e| JsError::new(&e))
}
