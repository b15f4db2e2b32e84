#![allow(dead_code)]

use std::f64::consts::PI;

use capcurv::fixtures;
use capcurv::solver::ConformalFactors;
use capcurv::{Mesh, MetricLengths};
use rand::Rng;

/// Multiplies every length by a factor in `[1 − spread, 1 + spread]`, retrying until
/// all triangle inequalities hold.
pub fn jitter_metric(
    mesh: &Mesh,
    base: &MetricLengths,
    spread: f64,
    rng: &mut impl Rng,
) -> MetricLengths {
    loop {
        let values = base
            .as_slice()
            .iter()
            .map(|l| l * rng.gen_range(1.0 - spread..=1.0 + spread))
            .collect();
        if let Ok(m) = MetricLengths::new(mesh, values) {
            return m;
        }
    }
}

/// Law-of-cosines corner angles, written out independently of the library.
pub fn angles_of(a: f64, b: f64, c: f64) -> [f64; 3] {
    // a = |v0 v1|, b = |v1 v2|, c = |v2 v0|
    let at = |x: f64, y: f64, opp: f64| ((x * x + y * y - opp * opp) / (2.0 * x * y)).acos();
    [at(a, c, b), at(a, b, c), at(b, c, a)]
}

/// `2π − Σθ` at every vertex for lengths `exp((u_i + u_j)/2) L_ij`.
pub fn raw_defects(mesh: &Mesh, base: &MetricLengths, u: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; mesh.num_vertices()];
    for f in 0..mesh.num_faces() {
        let v = mesh.face(f);
        let e = mesh.face_edges(f);
        let len = |k: usize| {
            let [a, b] = mesh.edge(e[k]);
            (0.5 * (u[a] + u[b])).exp() * base.get(e[k])
        };
        let th = angles_of(len(0), len(1), len(2));
        for k in 0..3 {
            sums[v[k]] += th[k];
        }
    }
    sums.iter().map(|s| 2.0 * PI - s).collect()
}

pub fn small_fixtures() -> Vec<(String, Mesh, MetricLengths)> {
    fixtures::all()
        .into_iter()
        .map(|fx| {
            let (m, l) = fx.load();
            (fx.name.to_string(), m, l)
        })
        .filter(|(_, m, _)| m.num_vertices() <= 12)
        .collect()
}

pub fn random_u(n: usize, scale: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// Random factors whose scaled metric stays clear of degenerate triangles.
pub fn admissible_u(m: &Mesh, l: &MetricLengths, scale: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let u = random_u(m.num_vertices(), scale, rng);
        if well_shaped(m, l, &u) {
            return u;
        }
    }
}

pub fn well_shaped(m: &Mesh, l: &MetricLengths, u: &[f64]) -> bool {
    let scaled = capcurv::solver::conformal_lengths(m, l, &ConformalFactors::from_raw(u.to_vec()));
    (0..m.num_faces()).all(|f| {
        let [a, b, c] = scaled.face_lengths(m, f);
        // Keep away from degenerate triangles so difference quotients stay accurate.
        a + b > 1.05 * c && b + c > 1.05 * a && c + a > 1.05 * b
    })
}

/// Nodes and weights of n-point Gauss–Legendre quadrature on [0, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            (0.5 * (x + 1.0), 0.5 * w)
        })
        .collect()
}

/// Energy as the line integral of `K − target` from 0 to `u`, using only the
/// test-local angle code.
pub fn path_energy(
    m: &Mesh,
    l: &MetricLengths,
    target: &[f64],
    u: &[f64],
    rule: &[(f64, f64)],
) -> f64 {
    rule.iter()
        .map(|&(t, w)| {
            let tu: Vec<f64> = u.iter().map(|x| t * x).collect();
            let k = raw_defects(m, l, &tu);
            w * (0..u.len()).map(|i| (k[i] - target[i]) * u[i]).sum::<f64>()
        })
        .sum()
}

/// Minimizes the path-integral energy by finite-difference gradient descent and
/// returns the mean-zero minimizer. Slow; meant for meshes with a handful of vertices.
pub fn dense_descent_oracle(m: &Mesh, l: &MetricLengths, target: &[f64]) -> Vec<f64> {
    let n = m.num_vertices();
    let rule = gauss_legendre(24);
    let mut u = vec![0.0; n];
    let h = 1e-6;
    for _ in 0..2000 {
        let grad: Vec<f64> = (0..n)
            .map(|i| {
                let mut up = u.clone();
                let mut down = u.clone();
                up[i] += h;
                down[i] -= h;
                (path_energy(m, l, target, &up, &rule) - path_energy(m, l, target, &down, &rule))
                    / (2.0 * h)
            })
            .collect();
        let norm = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        if norm < 1e-10 {
            break;
        }
        for i in 0..n {
            u[i] -= 0.3 * grad[i];
        }
    }
    let mean = u.iter().sum::<f64>() / n as f64;
    u.iter().map(|x| x - mean).collect()
}
