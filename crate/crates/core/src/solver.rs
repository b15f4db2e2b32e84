//! Prescribed vertex curvature on a closed mesh by discrete conformal change of metric.
//!
//! Lengths transform as `L'_ij = exp((u_i + u_j) / 2) L_ij`. The map from conformal
//! factors `u` to angle defects `K(u)` is the gradient of a convex energy (up to the
//! linear target term), and its Jacobian is the cotangent Laplacian of the current
//! metric. Newton's method with backtracking finds `u` with `K(u) = target`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::curvature::angle_sums;
use crate::error::{Error, Result};
use crate::fields::VertexField;
use crate::linalg::{remove_mean, solve_mean_zero, CsrMatrix};
use crate::mesh::{strict_triangle, Mesh, MetricLengths};

/// Tolerance on `Σ target − 2πχ` accepted by [`solve_prescribed_curvature`].
pub const TARGET_SUM_TOLERANCE: f64 = 1e-8;

/// Per-vertex log scale factors, normalized to zero sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalFactors(Vec<f64>);

impl ConformalFactors {
    pub fn zeros(n: usize) -> Self {
        ConformalFactors(vec![0.0; n])
    }

    /// Factors shifted to zero sum.
    pub fn new(mut u: Vec<f64>) -> Self {
        if !u.is_empty() {
            remove_mean(&mut u);
        }
        ConformalFactors(u)
    }

    /// Factors taken as given, without gauge normalization.
    pub fn from_raw(u: Vec<f64>) -> Self {
        ConformalFactors(u)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Target for the ∞-norm of `K(u) − target`, in radians.
    pub tol: f64,
    pub max_iter: usize,
    pub line_search_shrink: f64,
    pub min_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 50,
            line_search_shrink: 0.5,
            min_step: 1e-12,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidOptions(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidOptions("max_iter must be at least 1".into()));
        }
        if !(self.line_search_shrink > 0.0 && self.line_search_shrink < 1.0) {
            return Err(Error::InvalidOptions(format!(
                "line_search_shrink must lie in (0, 1), got {}",
                self.line_search_shrink
            )));
        }
        if !(self.min_step > 0.0) {
            return Err(Error::InvalidOptions("min_step must be positive".into()));
        }
        Ok(())
    }
}

/// State after one accepted step; iteration 0 is the initial metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub residual: f64,
    pub step: f64,
    pub energy: f64,
    pub cg_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
}

impl SolveTrace {
    /// Number of Newton steps taken.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.residual)
    }

    /// One JSON object per record, newline separated.
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub factors: ConformalFactors,
    pub lengths: MetricLengths,
    pub trace: SolveTrace,
}

/// Applies `L'_ij = exp((u_i + u_j) / 2) L_ij`. The result is not validated.
pub fn conformal_lengths(
    mesh: &Mesh,
    lengths: &MetricLengths,
    u: &ConformalFactors,
) -> MetricLengths {
    let u = u.as_slice();
    MetricLengths::from_raw(
        mesh.edges()
            .iter()
            .zip(lengths.as_slice())
            .map(|(&[a, b], &l)| (0.5 * (u[a] + u[b])).exp() * l)
            .collect(),
    )
}

fn check_factors(mesh: &Mesh, u: &ConformalFactors) -> Result<()> {
    if u.len() != mesh.num_vertices() {
        return Err(Error::IndexMismatch {
            what: "conformal factors",
            expected: mesh.num_vertices(),
            got: u.len(),
        });
    }
    Ok(())
}

/// Angle defect `2π − Σθ` at every vertex of a closed mesh under the metric scaled by `u`.
pub fn curvature_map(
    mesh: &Mesh,
    lengths: &MetricLengths,
    u: &ConformalFactors,
) -> Result<VertexField> {
    if !mesh.is_closed() {
        return Err(Error::NotClosed);
    }
    check_factors(mesh, u)?;
    let scaled = conformal_lengths(mesh, lengths, u);
    scaled.validate(mesh)?;
    defects(mesh, &scaled).map(VertexField::new)
}

fn defects(mesh: &Mesh, lengths: &MetricLengths) -> Result<Vec<f64>> {
    Ok(angle_sums(mesh, lengths)?
        .into_iter()
        .map(|s| 2.0 * PI - s)
        .collect())
}

/// Cotangent of the angle opposite `c` in a triangle with sides `a`, `b`, `c`.
fn cot_opposite(a: f64, b: f64, c: f64) -> f64 {
    // Kahan's stable Heron formula for four times the area.
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [x, y, z] = s;
    let area4 = ((x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z))).sqrt();
    (a * a + b * b - c * c) / area4
}

/// Cotangent Laplacian with edge weights `½(cot α + cot β)`, the Jacobian `∂K/∂u`.
///
/// It is symmetric positive semidefinite for every valid metric, with the constants
/// as its null space on a connected mesh.
pub fn cotan_laplacian(mesh: &Mesh, lengths: &MetricLengths) -> CsrMatrix {
    let mut triplets = Vec::with_capacity(12 * mesh.num_faces());
    for f in 0..mesh.num_faces() {
        let v = mesh.face(f);
        let l = lengths.face_lengths(mesh, f);
        for k in 0..3 {
            // Edge k joins v_k and v_{k+1}; the opposite corner is v_{k+2}.
            let (i, j) = (v[k], v[(k + 1) % 3]);
            let w = 0.5 * cot_opposite(l[(k + 1) % 3], l[(k + 2) % 3], l[k]);
            triplets.push((i, j, -w));
            triplets.push((j, i, -w));
            triplets.push((i, i, w));
            triplets.push((j, j, w));
        }
    }
    CsrMatrix::from_triplets(mesh.num_vertices(), triplets)
}

fn zeta_even() -> &'static [f64] {
    static ZETA: OnceLock<Vec<f64>> = OnceLock::new();
    ZETA.get_or_init(|| {
        // ζ(2k) for k = 1..=40; closed forms for the slowly converging first three.
        let mut z = vec![PI.powi(2) / 6.0, PI.powi(4) / 90.0, PI.powi(6) / 945.0];
        for k in 4..=40 {
            let s = 2 * k;
            let n = 20.0f64;
            let head: f64 = (1..20).map(|m| (m as f64).powi(-s)).sum();
            // Euler–Maclaurin tail from n = 20 onwards.
            let tail = n.powi(1 - s) / (s as f64 - 1.0)
                + 0.5 * n.powi(-s)
                + s as f64 / 12.0 * n.powi(-s - 1);
            z.push(head + tail);
        }
        z
    })
}

/// Clausen function `Cl₂(θ) = −∫₀^θ ln|2 sin(t/2)| dt`.
pub fn clausen(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta.rem_euclid(two_pi);
    if t > PI {
        t -= two_pi;
    }
    if t == 0.0 {
        return 0.0;
    }
    let x2 = (t / two_pi).powi(2);
    let mut power = 1.0;
    let mut series = 0.0;
    for (k, z) in zeta_even().iter().enumerate() {
        let k = (k + 1) as f64;
        power *= x2;
        series += z * power / (k * (2.0 * k + 1.0));
    }
    t - t * t.abs().ln() + t * series
}

/// Milnor's Lobachevsky function `Л(x) = −∫₀^x ln|2 sin t| dt = ½ Cl₂(2x)`.
pub fn lobachevsky(x: f64) -> f64 {
    0.5 * clausen(2.0 * x)
}

/// Convex energy whose gradient in `u` is `K(u) − target`.
///
/// Per face the term is `Σ α_k λ_k + 2 Σ Л(α_k)` with `λ_k = 2 ln L'_k` and `α_k` the
/// angle opposite edge `k`; a linear term in `u` completes the gradient. Defined up
/// to an additive constant.
pub fn conformal_energy(
    mesh: &Mesh,
    lengths: &MetricLengths,
    target: &VertexField,
    u: &ConformalFactors,
) -> Result<f64> {
    check_factors(mesh, u)?;
    target.check(mesh)?;
    let scaled = conformal_lengths(mesh, lengths, u);
    scaled.validate(mesh)?;
    let mut energy = 0.0;
    for f in 0..mesh.num_faces() {
        let angles = scaled.face_angles(mesh, f)?;
        let l = scaled.face_lengths(mesh, f);
        for k in 0..3 {
            let opposite = angles[(k + 2) % 3];
            energy += opposite * 2.0 * l[k].ln() + 2.0 * lobachevsky(opposite);
        }
    }
    for v in 0..mesh.num_vertices() {
        let faces = mesh.vertex_faces(v).len() as f64;
        energy += (2.0 * PI - target.get(v) - PI * faces) * u.as_slice()[v];
    }
    Ok(energy)
}

fn inf_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Finds conformal factors on a closed mesh realizing `target` angle defects.
///
/// `target` must sum to `2πχ` within [`TARGET_SUM_TOLERANCE`]; any remaining
/// mismatch is spread evenly over the vertices before solving. Every target value
/// must be below `2π`.
pub fn solve_prescribed_curvature(
    mesh: &Mesh,
    lengths: &MetricLengths,
    target: &VertexField,
    opts: &SolveOptions,
) -> Result<Solution> {
    opts.validate()?;
    if !mesh.is_closed() {
        return Err(Error::NotClosed);
    }
    lengths.validate(mesh)?;
    target.check(mesh)?;
    let n = mesh.num_vertices();
    if let Some(v) = (0..n).find(|&v| !(target.get(v) < 2.0 * PI)) {
        return Err(Error::ConeAngleViolation {
            vertex: v,
            value: target.get(v),
        });
    }
    let expected = 2.0 * PI * mesh.euler_characteristic() as f64;
    let sum: f64 = target.as_slice().iter().sum();
    if !((sum - expected).abs() <= TARGET_SUM_TOLERANCE) {
        return Err(Error::TargetSumMismatch { sum, expected });
    }
    let shift = (sum - expected) / n as f64;
    let target = VertexField::new(target.as_slice().iter().map(|t| t - shift).collect());

    let mut u = vec![0.0; n];
    let mut current = lengths.clone();
    let mut curvature = defects(mesh, &current)?;
    let mut residual = inf_norm_diff(&curvature, target.as_slice());
    let mut energy = conformal_energy(
        mesh,
        lengths,
        &target,
        &ConformalFactors::from_raw(u.clone()),
    )?;
    let mut records = vec![IterationRecord {
        iteration: 0,
        residual,
        step: 0.0,
        energy,
        cg_iterations: 0,
    }];

    let mut iteration = 0;
    while residual > opts.tol {
        if iteration == opts.max_iter {
            return Err(Error::MaxIterExceeded {
                iterations: iteration,
                residual,
            });
        }
        iteration += 1;
        let hessian = cotan_laplacian(mesh, &current);
        let rhs: Vec<f64> = curvature
            .iter()
            .zip(target.as_slice())
            .map(|(k, t)| t - k)
            .collect();
        let newton = solve_mean_zero(&hessian, &rhs, 1e-12, 20 * n);

        let mut step = 1.0;
        loop {
            if step < opts.min_step {
                return Err(Error::LineSearchStall {
                    iteration,
                    residual,
                });
            }
            let trial: Vec<f64> = u.iter().zip(&newton.x).map(|(a, d)| a + step * d).collect();
            let trial_u = ConformalFactors::from_raw(trial);
            let scaled = conformal_lengths(mesh, lengths, &trial_u);
            if admissible(mesh, &scaled) {
                let trial_curv = defects(mesh, &scaled)?;
                let trial_res = inf_norm_diff(&trial_curv, target.as_slice());
                let trial_energy = conformal_energy(mesh, lengths, &target, &trial_u)?;
                // Near the solution the energy change drops below rounding; only an
                // increase beyond that counts against the step.
                let slack = 1e-13 * (1.0 + energy.abs());
                if trial_res < residual && trial_energy <= energy + slack {
                    u = trial_u.0;
                    current = scaled;
                    curvature = trial_curv;
                    residual = trial_res;
                    energy = trial_energy;
                    records.push(IterationRecord {
                        iteration,
                        residual,
                        step,
                        energy,
                        cg_iterations: newton.iterations,
                    });
                    break;
                }
            }
            step *= opts.line_search_shrink;
        }
    }

    let factors = ConformalFactors::new(u);
    // Rebuild from the normalized factors; the shift only rescales globally.
    let lengths = conformal_lengths(mesh, lengths, &factors);
    lengths.validate(mesh)?;
    Ok(Solution {
        factors,
        lengths,
        trace: SolveTrace {
            records,
            termination: Termination::Converged,
        },
    })
}

fn admissible(mesh: &Mesh, lengths: &MetricLengths) -> bool {
    lengths.as_slice().iter().all(|l| l.is_finite() && *l > 0.0)
        && (0..mesh.num_faces()).all(|f| {
            let [a, b, c] = lengths.face_lengths(mesh, f);
            strict_triangle(a, b, c)
        })
}
