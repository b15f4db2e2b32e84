//! End-to-end prescription on a surface with boundary: cap, extend, solve on the
//! closed surface, restrict the metric back.
//!
//! An interior vertex of the original mesh has all of its faces inside that mesh, so
//! its angle defect under the restricted metric is the defect the closed-surface
//! solve produced. The caps absorb whatever the Gauss–Bonnet constraint demands.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::capping::{cap_all, restrict, CapAtlas};
use crate::curvature::{angle_defect, gauss_bonnet_check};
use crate::error::{Error, Result};
use crate::fields::{
    capped_chi, default_seed, extend_form_gauss_bonnet, satisfies_sign_condition, ExtensionReport,
    FaceForm, VertexField,
};
use crate::mesh::{Mesh, MetricLengths};
use crate::solver::{solve_prescribed_curvature, ConformalFactors, SolveOptions, SolveTrace};

/// How the Gauss–Bonnet deficit was spread over cap-owned vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeficitWeighting {
    Equal,
    /// Weight 2 on the original boundary ring, 1 on inner rings and apexes.
    RingWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    /// `2πχ(capped) − Σ target` over interior vertices of the original mesh.
    pub deficit: f64,
    pub weighting: DeficitWeighting,
    pub cap_vertex_count: usize,
    pub max_cap_target: f64,
    /// Whether the full closed-surface target meets the sign condition.
    pub sign_condition_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtensionSummary {
    Deficit(DeficitReport),
    Form(ExtensionReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrescriptionResult {
    pub metric_on_m: MetricLengths,
    /// Conformal factors of the closed-surface solve, on the capped mesh.
    pub capped_factors: ConformalFactors,
    pub atlas: CapAtlas,
    /// Angle defects at interior vertices; zero at boundary vertices.
    pub achieved: VertexField,
    /// Targets at interior vertices; zero at boundary vertices.
    pub target_on_m: VertexField,
    pub interior_vertices: Vec<usize>,
    pub max_error: f64,
    pub extension: ExtensionSummary,
    pub solve_trace: SolveTrace,
}

/// Serialized form of a [`PrescriptionResult`]: the restricted metric in sidecar
/// layout, vertex arrays for targets and achieved defects, flat diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrescriptionOutput {
    pub lengths: Vec<(usize, usize, f64)>,
    pub achieved: Vec<f64>,
    pub target: Vec<f64>,
    pub interior_vertices: Vec<usize>,
    pub max_error: f64,
    pub iterations: usize,
    pub final_residual: f64,
    pub extension: ExtensionSummary,
}

impl PrescriptionResult {
    pub fn output(&self, mesh: &Mesh) -> PrescriptionOutput {
        PrescriptionOutput {
            lengths: self.metric_on_m.to_edge_list(mesh),
            achieved: self.achieved.as_slice().to_vec(),
            target: self.target_on_m.as_slice().to_vec(),
            interior_vertices: self.interior_vertices.clone(),
            max_error: self.max_error,
            iterations: self.solve_trace.iterations(),
            final_residual: self.solve_trace.final_residual(),
            extension: self.extension.clone(),
        }
    }
}

fn check_bounded(mesh: &Mesh) -> Result<()> {
    if mesh.is_closed() {
        return Err(Error::NoBoundary);
    }
    Ok(())
}

/// Spreads `deficit` over the boundary ring and the inner cap vertices so every
/// share stays below 2π. Falls back to giving ring vertices twice the inner share.
fn distribute_deficit(
    deficit: f64,
    boundary_ring: &[usize],
    inner: &[usize],
) -> Result<(Vec<(usize, f64)>, DeficitWeighting)> {
    let count = (boundary_ring.len() + inner.len()) as f64;
    let share = deficit / count;
    let all = boundary_ring.iter().chain(inner);
    if share < 2.0 * PI {
        return Ok((all.map(|&v| (v, share)).collect(), DeficitWeighting::Equal));
    }
    let total_weight = 2.0 * boundary_ring.len() as f64 + inner.len() as f64;
    let shares: Vec<(usize, f64)> = boundary_ring
        .iter()
        .map(|&v| (v, 2.0 * deficit / total_weight))
        .chain(inner.iter().map(|&v| (v, deficit / total_weight)))
        .collect();
    if let Some(&(vertex, value)) = shares.iter().find(|s| !(s.1 < 2.0 * PI)) {
        return Err(Error::ConeAngleViolation { vertex, value });
    }
    Ok((shares, DeficitWeighting::RingWeighted))
}

/// Prescribes the angle defect at every interior vertex of `mesh`.
///
/// `target` holds one value per vertex of `mesh`; boundary entries are ignored.
pub fn prescribe_function(
    mesh: &Mesh,
    lengths: &MetricLengths,
    target: &VertexField,
    opts: &SolveOptions,
) -> Result<PrescriptionResult> {
    target.check(mesh)?;
    check_bounded(mesh)?;
    let interior: Vec<usize> = mesh.interior_vertices().collect();
    if interior.is_empty() {
        return Err(Error::NoInteriorVertex);
    }
    if let Some(&v) = interior.iter().find(|&&v| !(target.get(v) < 2.0 * PI)) {
        return Err(Error::ConeAngleViolation {
            vertex: v,
            value: target.get(v),
        });
    }

    let (capped, capped_lengths, atlas) = cap_all(mesh, lengths)?;
    let chi = capped_chi(&atlas);
    let mut closed_target = vec![0.0; capped.num_vertices()];
    let mut prescribed = 0.0;
    for &v in &interior {
        closed_target[atlas.vertex_map[v]] = target.get(v);
        prescribed += target.get(v);
    }
    let boundary_ring: Vec<usize> = mesh
        .boundary_vertices()
        .map(|v| atlas.vertex_map[v])
        .collect();
    let inner: Vec<usize> = atlas.cap_vertices().collect();
    let deficit = 2.0 * PI * chi as f64 - prescribed;
    let (shares, weighting) = distribute_deficit(deficit, &boundary_ring, &inner)?;
    let max_cap_target = shares.iter().map(|s| s.1).fold(f64::MIN, f64::max);
    for (v, value) in shares {
        closed_target[v] = value;
    }
    let report = DeficitReport {
        deficit,
        weighting,
        cap_vertex_count: boundary_ring.len() + inner.len(),
        max_cap_target,
        sign_condition_holds: satisfies_sign_condition(&closed_target, chi),
    };

    let mut target_on_m = vec![0.0; mesh.num_vertices()];
    for &v in &interior {
        target_on_m[v] = target.get(v);
    }
    finish(
        mesh,
        &capped,
        &capped_lengths,
        atlas,
        VertexField::new(closed_target),
        VertexField::new(target_on_m),
        ExtensionSummary::Deficit(report),
        opts,
    )
}

/// Splits each face value equally among the face's three vertices.
pub fn split_form_to_vertices(mesh: &Mesh, form: &FaceForm) -> Result<VertexField> {
    form.check(mesh)?;
    let mut values = vec![0.0; mesh.num_vertices()];
    for (f, face) in mesh.faces().iter().enumerate() {
        for &v in face {
            values[v] += form.get(f) / 3.0;
        }
    }
    Ok(VertexField::new(values))
}

/// Prescribes a curvature 2-form, given as integrated values per face of `mesh`.
///
/// The form is extended over the caps to total `2πχ(capped)` (seeded by
/// [`default_seed`]) and converted to vertex targets by equal splitting.
pub fn prescribe_form(
    mesh: &Mesh,
    lengths: &MetricLengths,
    form: &FaceForm,
    opts: &SolveOptions,
) -> Result<PrescriptionResult> {
    form.check(mesh)?;
    check_bounded(mesh)?;
    let (capped, capped_lengths, atlas) = cap_all(mesh, lengths)?;
    let (extended, report) = extend_form_gauss_bonnet(form, &atlas, default_seed(mesh, form))?;
    let closed_target = split_form_to_vertices(&capped, &extended)?;
    if let Some(v) = (0..capped.num_vertices()).find(|&v| !(closed_target.get(v) < 2.0 * PI)) {
        return Err(Error::ConeAngleViolation {
            vertex: v,
            value: closed_target.get(v),
        });
    }
    let split_on_m = restrict(&closed_target, &atlas)?;
    let target_on_m = VertexField::new(
        (0..mesh.num_vertices())
            .map(|v| {
                if mesh.is_boundary_vertex(v) {
                    0.0
                } else {
                    split_on_m.get(v)
                }
            })
            .collect(),
    );
    finish(
        mesh,
        &capped,
        &capped_lengths,
        atlas,
        closed_target,
        target_on_m,
        ExtensionSummary::Form(report),
        opts,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    mesh: &Mesh,
    capped: &Mesh,
    capped_lengths: &MetricLengths,
    atlas: CapAtlas,
    closed_target: VertexField,
    target_on_m: VertexField,
    extension: ExtensionSummary,
    opts: &SolveOptions,
) -> Result<PrescriptionResult> {
    let solution = solve_prescribed_curvature(capped, capped_lengths, &closed_target, opts)?;
    let metric_on_m = restrict(&solution.lengths, &atlas)?;
    metric_on_m.validate(mesh)?;
    let interior_vertices: Vec<usize> = mesh.interior_vertices().collect();
    let mut achieved = vec![0.0; mesh.num_vertices()];
    for &v in &interior_vertices {
        achieved[v] = angle_defect(mesh, &metric_on_m, v)?;
    }
    let max_error = interior_vertices
        .iter()
        .map(|&v| (achieved[v] - target_on_m.get(v)).abs())
        .fold(0.0, f64::max);
    Ok(PrescriptionResult {
        metric_on_m,
        capped_factors: solution.factors,
        atlas,
        achieved: VertexField::new(achieved),
        target_on_m,
        interior_vertices,
        max_error,
        extension,
        solve_trace: solution.trace,
    })
}

/// Outcome of [`verify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub gb_residual: Option<f64>,
    pub max_error: Option<f64>,
    pub notes: Vec<String>,
}

/// Re-checks a result against `mesh` from scratch: metric validity, Gauss–Bonnet
/// residual below 1e−9, and interior defects within `tol` of the targets.
pub fn verify(result: &PrescriptionResult, mesh: &Mesh, tol: f64) -> Verification {
    let mut notes = Vec::new();
    let mut gb_residual = None;
    let mut max_error = None;
    match result.metric_on_m.validate(mesh) {
        Err(e) => notes.push(format!("metric invalid: {e}")),
        Ok(()) => {
            match gauss_bonnet_check(mesh, &result.metric_on_m) {
                Ok(report) => {
                    if !(report.gb_residual.abs() < 1e-9) {
                        notes.push(format!("Gauss-Bonnet residual {:e}", report.gb_residual));
                    }
                    gb_residual = Some(report.gb_residual);
                }
                Err(e) => notes.push(format!("Gauss-Bonnet check failed: {e}")),
            }
            if let Err(e) = result.target_on_m.check(mesh) {
                notes.push(e.to_string());
            } else {
                let errors: Result<Vec<f64>> = mesh
                    .interior_vertices()
                    .map(|v| {
                        angle_defect(mesh, &result.metric_on_m, v)
                            .map(|k| (k - result.target_on_m.get(v)).abs())
                    })
                    .collect();
                match errors {
                    Ok(errors) => {
                        let worst = errors.into_iter().fold(0.0, f64::max);
                        if !(worst <= tol) {
                            notes.push(format!("max error {worst:e} exceeds {tol:e}"));
                        }
                        max_error = Some(worst);
                    }
                    Err(e) => notes.push(e.to_string()),
                }
            }
        }
    }
    Verification {
        passed: notes.is_empty(),
        gb_residual,
        max_error,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn flat_fan_target_zero() {
        let (m, l) = fixtures::hex_fan();
        let r =
            prescribe_function(&m, &l, &VertexField::zeros(7), &SolveOptions::default()).unwrap();
        assert!(r.max_error < 1e-10);
        assert!(verify(&r, &m, 1e-8).passed);
    }

    #[test]
    fn fan_center_defect() {
        let (m, l) = fixtures::hex_fan();
        let mut t = VertexField::zeros(7);
        t.set(0, 0.3);
        let r = prescribe_function(&m, &l, &t, &SolveOptions::default()).unwrap();
        // Independent recomputation from the restricted lengths.
        let k = angle_defect(&m, &r.metric_on_m, 0).unwrap();
        assert!((k - 0.3).abs() < 1e-8);
        match r.extension {
            ExtensionSummary::Deficit(ref d) => {
                assert_eq!(d.weighting, DeficitWeighting::Equal);
                assert_eq!(d.cap_vertex_count, 13);
                assert!(d.sign_condition_holds);
            }
            _ => panic!("expected a deficit report"),
        }
    }

    #[test]
    fn oversized_targets() {
        let (m, l) = fixtures::hex_fan();
        let mut t = VertexField::zeros(7);
        t.set(0, 7.0);
        assert!(matches!(
            prescribe_function(&m, &l, &t, &SolveOptions::default()),
            Err(Error::ConeAngleViolation { vertex: 0, .. })
        ));
        let mut form = FaceForm::zeros(6);
        form.set(0, 50.0);
        assert!(matches!(
            prescribe_form(&m, &l, &form, &SolveOptions::default()),
            Err(Error::ConeAngleViolation { .. })
        ));
    }

    #[test]
    fn deficit_fallback_cannot_rescue_a_large_mean() {
        // The 2:1:1 fallback averages to the same mean, so it only ever reports
        // the violation at a boundary-ring vertex.
        let err = distribute_deficit(100.0, &[0, 1], &[2, 3, 4]).unwrap_err();
        assert!(matches!(err, Error::ConeAngleViolation { vertex: 0, .. }));
        let (shares, w) = distribute_deficit(5.0, &[0], &[1]).unwrap();
        assert_eq!(w, DeficitWeighting::Equal);
        assert_eq!(shares, vec![(0, 2.5), (1, 2.5)]);
    }

    #[test]
    fn needs_interior_and_boundary() {
        let (m, l) = fixtures::single_triangle();
        assert_eq!(
            prescribe_function(&m, &l, &VertexField::zeros(3), &SolveOptions::default())
                .unwrap_err(),
            Error::NoInteriorVertex
        );
        let (m, l) = fixtures::tetrahedron();
        assert_eq!(
            prescribe_function(&m, &l, &VertexField::zeros(4), &SolveOptions::default())
                .unwrap_err(),
            Error::NoBoundary
        );
    }

    #[test]
    fn zero_form_on_fan() {
        let (m, l) = fixtures::hex_fan();
        let r = prescribe_form(&m, &l, &FaceForm::zeros(6), &SolveOptions::default()).unwrap();
        assert!(r.achieved.get(0).abs() < 1e-8);
        match r.extension {
            ExtensionSummary::Form(ref rep) => {
                assert!((rep.achieved_total - 4.0 * PI).abs() < 1e-10 * 4.0 * PI)
            }
            _ => panic!("expected a form report"),
        }
    }

    #[test]
    fn form_split_rule() {
        // 0.1 per face: the centre touches all six faces, so its target is 6 · 0.1 / 3.
        let (m, l) = fixtures::hex_fan();
        let form = FaceForm::constant(&m, 0.1);
        let split = split_form_to_vertices(&m, &form).unwrap();
        assert!((split.get(0) - 0.2).abs() < 1e-15);
        let r = prescribe_form(&m, &l, &form, &SolveOptions::default()).unwrap();
        assert!((r.target_on_m.get(0) - 0.2).abs() < 1e-15);
        assert!((r.achieved.get(0) - 0.2).abs() < 1e-8);
    }

    #[test]
    fn verify_failures() {
        let (m, l) = fixtures::hex_fan();
        let r =
            prescribe_function(&m, &l, &VertexField::zeros(7), &SolveOptions::default()).unwrap();
        let mut broken = r.clone();
        let mut values = broken.metric_on_m.clone().into_vec();
        values[0] = -1.0;
        broken.metric_on_m = MetricLengths::from_raw(values);
        assert!(!verify(&broken, &m, 1e-8).passed);

        let (other, _) = fixtures::annulus();
        let v = verify(&r, &other, 1e-8);
        assert!(!v.passed);
        assert!(v.notes[0].contains("expected"));
    }
}
