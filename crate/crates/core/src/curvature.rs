//! Angle defects, boundary turning angles and the discrete Gauss–Bonnet identity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::VertexField;
use crate::mesh::{Mesh, MetricLengths};

/// Sum of the corner angles at every vertex.
pub fn angle_sums(mesh: &Mesh, lengths: &MetricLengths) -> Result<Vec<f64>> {
    let mut sums = vec![0.0; mesh.num_vertices()];
    for f in 0..mesh.num_faces() {
        let angles = lengths.face_angles(mesh, f)?;
        for (k, &v) in mesh.face(f).iter().enumerate() {
            sums[v] += angles[k];
        }
    }
    Ok(sums)
}

fn angle_sum_at(mesh: &Mesh, lengths: &MetricLengths, v: usize) -> Result<f64> {
    mesh.vertex_faces(v)
        .iter()
        .map(|&f| {
            let k = mesh.corner_index(f, v)?;
            Ok(lengths.face_angles(mesh, f)?[k])
        })
        .sum()
}

/// `2π − Σ θ` at an interior vertex.
pub fn angle_defect(mesh: &Mesh, lengths: &MetricLengths, v: usize) -> Result<f64> {
    if mesh.is_boundary_vertex(v) {
        return Err(Error::BoundaryVertex(v));
    }
    Ok(2.0 * PI - angle_sum_at(mesh, lengths, v)?)
}

/// `π − Σ θ` at a boundary vertex.
pub fn turning_angle(mesh: &Mesh, lengths: &MetricLengths, v: usize) -> Result<f64> {
    if !mesh.is_boundary_vertex(v) {
        return Err(Error::InteriorVertex(v));
    }
    Ok(PI - angle_sum_at(mesh, lengths, v)?)
}

/// Angle defect at interior vertices and turning angle at boundary vertices.
pub fn vertex_curvatures(mesh: &Mesh, lengths: &MetricLengths) -> Result<Vec<f64>> {
    let sums = angle_sums(mesh, lengths)?;
    Ok(sums
        .iter()
        .enumerate()
        .map(|(v, s)| {
            if mesh.is_boundary_vertex(v) {
                PI - s
            } else {
                2.0 * PI - s
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    /// Angle defect per vertex; zero at boundary vertices.
    pub interior_defects: VertexField,
    /// `(vertex, turning angle)` for every boundary vertex, ascending by vertex.
    pub boundary_turning: Vec<(usize, f64)>,
    /// Total turning along each boundary loop.
    pub loop_turning: Vec<f64>,
    pub total: f64,
    pub gb_target: f64,
    pub gb_residual: f64,
}

/// Evaluates `Σ defects + Σ turning − 2πχ`, which vanishes up to rounding for every
/// valid metric.
pub fn gauss_bonnet_check(mesh: &Mesh, lengths: &MetricLengths) -> Result<CurvatureReport> {
    lengths.validate(mesh)?;
    let curv = vertex_curvatures(mesh, lengths)?;
    let mut defects = vec![0.0; mesh.num_vertices()];
    let mut boundary_turning = Vec::new();
    for (v, &k) in curv.iter().enumerate() {
        if mesh.is_boundary_vertex(v) {
            boundary_turning.push((v, k));
        } else {
            defects[v] = k;
        }
    }
    let loop_turning = mesh
        .boundary_loops()
        .iter()
        .map(|lp| lp.iter().map(|&v| curv[v]).sum())
        .collect();
    let total = defects.iter().sum::<f64>() + boundary_turning.iter().map(|t| t.1).sum::<f64>();
    let gb_target = 2.0 * PI * mesh.euler_characteristic() as f64;
    Ok(CurvatureReport {
        interior_defects: VertexField::new(defects),
        boundary_turning,
        loop_turning,
        total,
        gb_target,
        gb_residual: total - gb_target,
    })
}
