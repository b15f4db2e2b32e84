//! Finite-difference and dense-minimizer checks of the conformal solver.

mod common;

use std::f64::consts::PI;

use capcurv::fields::VertexField;
use capcurv::fixtures;
use capcurv::gauss_bonnet_check;
use capcurv::solver::{
    conformal_energy, cotan_laplacian, curvature_map, solve_prescribed_curvature, ConformalFactors,
    SolveOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn energy_gradient_matches_curvature_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, m, l) in common::small_fixtures() {
        let n = m.num_vertices();
        let target = VertexField::new(common::random_u(n, 1.0, &mut rng));
        for _ in 0..20 {
            let u = common::admissible_u(&m, &l, 0.2, &mut rng);
            let d = common::random_u(n, 1.0, &mut rng);
            let h = 1e-6;
            let at = |s: f64| {
                let shifted: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + s * b).collect();
                conformal_energy(&m, &l, &target, &ConformalFactors::from_raw(shifted)).unwrap()
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let k = common::raw_defects(&m, &l, &u);
            let exact: f64 = (0..n).map(|i| (k[i] - target.get(i)) * d[i]).sum();
            assert!(
                (fd - exact).abs() <= 1e-5 * exact.abs().max(1.0),
                "{name}: fd {fd} vs {exact}"
            );
        }
    }
}

#[test]
fn curvature_jacobian_is_the_symmetric_cotan_laplacian() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (name, m, l) in common::small_fixtures() {
        let n = m.num_vertices();
        for _ in 0..5 {
            let u = common::admissible_u(&m, &l, 0.2, &mut rng);
            let scaled =
                capcurv::solver::conformal_lengths(&m, &l, &ConformalFactors::from_raw(u.clone()));
            let lap = cotan_laplacian(&m, &scaled).to_dense();
            let h = 1e-6;
            let mut jac = vec![vec![0.0; n]; n];
            for j in 0..n {
                let mut up = u.clone();
                let mut down = u.clone();
                up[j] += h;
                down[j] -= h;
                let (kp, km) = (
                    common::raw_defects(&m, &l, &up),
                    common::raw_defects(&m, &l, &down),
                );
                for i in 0..n {
                    jac[i][j] = (kp[i] - km[i]) / (2.0 * h);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    assert!(
                        (jac[i][j] - jac[j][i]).abs() < 1e-8,
                        "{name}: asymmetric at {i},{j}"
                    );
                    let scale = lap[i][j].abs().max(1.0);
                    assert!(
                        (jac[i][j] - lap[i][j]).abs() <= 1e-5 * scale,
                        "{name}: dK{i}/du{j} = {} vs {}",
                        jac[i][j],
                        lap[i][j]
                    );
                }
            }
        }
    }
}

#[test]
fn total_curvature_is_conserved_and_gauge_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (m, l) in [fixtures::tetrahedron(), fixtures::icosahedron()] {
        let n = m.num_vertices();
        let chi = m.euler_characteristic() as f64;
        for _ in 0..100 {
            let u = common::random_u(n, 0.3, &mut rng);
            let Ok(k) = curvature_map(&m, &l, &ConformalFactors::from_raw(u.clone())) else {
                continue;
            };
            let total: f64 = k.as_slice().iter().sum();
            assert!((total - 2.0 * PI * chi).abs() < 1e-10);
            let c = rng.gen_range(-2.0..2.0);
            let shifted: Vec<f64> = u.iter().map(|x| x + c).collect();
            let k2 = curvature_map(&m, &l, &ConformalFactors::from_raw(shifted)).unwrap();
            for (a, b) in k.as_slice().iter().zip(k2.as_slice()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn tetrahedron_matches_dense_descent_oracle() {
    let (m, l) = fixtures::tetrahedron();
    let target = [PI + 0.1, PI - 0.1, PI, PI];
    let oracle = common::dense_descent_oracle(&m, &l, &target);

    let sol = solve_prescribed_curvature(
        &m,
        &l,
        &VertexField::new(target.to_vec()),
        &SolveOptions::default(),
    )
    .unwrap();
    for (a, b) in sol.factors.as_slice().iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-6, "newton {a} vs oracle {b}");
    }
    assert!(sol.factors.as_slice().iter().sum::<f64>().abs() < 1e-12);
}

#[test]
fn solver_output_is_reproducible_and_gauss_bonnet_clean() {
    let (m, l) = fixtures::icosahedron();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut target: Vec<f64> = (0..12)
        .map(|_| PI / 3.0 + rng.gen_range(-0.2..0.2))
        .collect();
    let mean_shift = (target.iter().sum::<f64>() - 4.0 * PI) / 12.0;
    target.iter_mut().for_each(|t| *t -= mean_shift);
    let target = VertexField::new(target);
    let a = solve_prescribed_curvature(&m, &l, &target, &SolveOptions::default()).unwrap();
    let b = solve_prescribed_curvature(&m, &l, &target, &SolveOptions::default()).unwrap();
    assert_eq!(a, b);
    let bits = |s: &[f64]| s.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(a.lengths.as_slice()), bits(b.lengths.as_slice()));
    assert!(
        gauss_bonnet_check(&m, &a.lengths)
            .unwrap()
            .gb_residual
            .abs()
            < 1e-9
    );
    let k = curvature_map(&m, &a.lengths, &ConformalFactors::zeros(12)).unwrap();
    for v in 0..12 {
        assert!((k.get(v) - target.get(v)).abs() <= 1e-10);
    }
}

#[test]
fn own_defects_on_a_closed_mesh_need_no_steps() {
    let (m, l) = fixtures::genus2_hole();
    let (c, cl, _) = capcurv::cap_all(&m, &l).unwrap();
    let own = curvature_map(&c, &cl, &ConformalFactors::zeros(c.num_vertices())).unwrap();
    let sol = solve_prescribed_curvature(&c, &cl, &own, &SolveOptions::default()).unwrap();
    assert_eq!(sol.trace.iterations(), 0);
}

#[test]
fn unreachable_targets_fail_cleanly() {
    let (m, l) = fixtures::tetrahedron();
    // Vertex 3 would need an angle sum above 3π from three triangles.
    let target = VertexField::new(vec![6.0, 6.0, 6.0, 4.0 * PI - 18.0]);
    let opts = SolveOptions {
        max_iter: 3,
        ..SolveOptions::default()
    };
    let err = solve_prescribed_curvature(&m, &l, &target, &opts).unwrap_err();
    assert!(err.is_solver_failure(), "{err}");
}
