mod common;

use common::{grid, max_abs_diff, sup};
use nslab::data::{solenoidal_bump, taylor_green};
use nslab::duhamel::{picard_ladder, splitting_residual};
use nslab::lab::fit_rate;
use nslab::solver::{energy_decay_samples, evolve, evolve_mild, mild_residual, self_convergence};
use nslab::spectral::{leray_project, nonlinear_divergence, VectorField};
use nslab::LabError;

fn bump(n: usize, amplitude: f64) -> VectorField {
    let g = grid(n);
    solenoidal_bump(g.center(), g.box_length() / 4.0, amplitude, g).unwrap()
}

#[test]
fn taylor_green_nonlinearity_is_a_gradient() {
    let u0 = taylor_green(1.0, grid(32)).unwrap();
    let nl = nonlinear_divergence(&u0, &u0).unwrap();
    assert!(nl.max_mode() > 0.1);
    assert!(leray_project(&nl).unwrap().max_mode() <= 1e-14);
}

#[test]
fn taylor_green_decays_exactly() {
    let u0 = taylor_green(1.0, grid(32)).unwrap();
    let (horizon, m) = (0.5, 256);
    for u in [evolve(&u0, horizon, m).unwrap(), evolve_mild(&u0, horizon, m).unwrap()] {
        for j in 0..=m {
            let want = u0.scaled((-2.0 * u.time(j)).exp());
            assert!(max_abs_diff(u.snapshot(j), &want) <= 1e-8);
        }
    }
}

#[test]
fn zero_and_invalid_input() {
    let g = grid(8);
    let u = evolve(&VectorField::zeros_spectral(g), 1.0, 8).unwrap();
    assert!(u.snapshots().iter().all(|s| s.max_mode() == 0.0));
    let rough = VectorField::from_fn(g, |x| [x[0].sin(), 0.0, 0.0]).unwrap();
    assert!(matches!(evolve(&rough, 1.0, 8), Err(LabError::Precondition(_))));
    assert!(evolve(&VectorField::zeros_spectral(g), 1.0, 6).is_err());
}

#[test]
fn overflow_is_a_stability_error() {
    let u0 = taylor_green(1e200, grid(16)).unwrap();
    match evolve(&u0, 0.5, 16) {
        Err(LabError::Stability { time, .. }) => assert!(time > 0.0 && time <= 0.5),
        other => panic!("expected a stability error, got {other:?}"),
    }
    assert!(matches!(evolve_mild(&u0, 0.5, 16), Err(LabError::Stability { .. })));
}

#[test]
fn invariants_along_the_flow() {
    let u0 = bump(16, 0.5);
    let u = evolve(&u0, 0.5, 64).unwrap();
    let e0 = u0.l2_norm();
    for s in u.snapshots() {
        assert!(s.divergence_error() <= 1e-12);
        assert!(s.mean().iter().all(|m| m.abs() <= 1e-15));
        assert!(s.l2_norm() <= e0 * (1.0 + 1e-6));
    }
    // bit-identical reruns
    assert_eq!(evolve(&u0, 0.5, 64).unwrap(), u);
}

#[test]
fn rk4_self_convergence_order() {
    let u0 = bump(16, 1.0);
    let horizon = 0.5;
    let finals: Vec<VectorField> =
        [8usize, 16, 32, 64].iter().map(|&m| evolve(&u0, horizon, m).unwrap().snapshot(m).clone()).collect();
    let d: Vec<f64> = finals.windows(2).map(|w| max_abs_diff(&w[0], &w[1])).collect();
    for w in d.windows(2) {
        assert!((w[0] / w[1]).log2() >= 3.0, "{d:?}");
    }
}

#[test]
fn mild_and_splitting_residuals_within_quadrature_error() {
    let u0 = bump(16, 0.05);
    let (horizon, m) = (0.25, 512);
    let sc = self_convergence(&u0, horizon, m).unwrap();
    let u = &sc.coarse;
    let r = mild_residual(u).unwrap();
    assert!(r <= 10.0 * sc.combined(), "residual {r:e}, estimate {:e}", sc.combined());

    let ladder = picard_ladder(&u0, 2, horizon, m).unwrap();
    for k in 0..=1 {
        for j in [m / 4, m / 2, m] {
            let s = splitting_residual(u, &ladder, k, j).unwrap();
            assert!(s <= 10.0 * sc.combined(), "k = {k}, node {j}: {s:e} vs {:e}", sc.combined());
        }
    }
    // P_0 in place of u is caught
    let p0 = &ladder[0];
    assert!(mild_residual(p0).unwrap() > 100.0 * sc.combined());
}

#[test]
fn discrete_mild_solution_satisfies_the_discrete_formula() {
    let u0 = bump(16, 0.2);
    let u = evolve_mild(&u0, 0.25, 64).unwrap();
    let scale = u0.l2_norm();
    assert!(mild_residual(&u).unwrap() <= 1e-13 * scale);
    let rk = evolve(&u0, 0.25, 64).unwrap();
    assert!(max_abs_diff(rk.snapshot(64), u.snapshot(64)) <= 1e-5 * sup(&u0));
}

#[test]
fn energy_of_the_first_separation() {
    let u0 = bump(16, 0.1);
    let (horizon, m) = (0.02, 1024);
    let u = evolve_mild(&u0, horizon, m).unwrap();
    let ladder = picard_ladder(&u0, 1, horizon, m).unwrap();
    let times: Vec<f64> = (2..=10).rev().map(|j| horizon / 2f64.powi(j)).collect();
    let samples = energy_decay_samples(&u, &ladder, 0, &times).unwrap();
    assert!(samples.windows(2).all(|w| w[1].sup_l2 >= w[0].sup_l2));
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.sup_l2)).collect();
    let slope = fit_rate(&pts).unwrap().slope;
    assert!(slope >= 0.25, "slope {slope}");
    assert!(energy_decay_samples(&u, &ladder, 2, &times).is_err());

    let zero = VectorField::zeros_spectral(grid(8));
    let u = evolve(&zero, 1.0, 8).unwrap();
    let ladder = picard_ladder(&zero, 0, 1.0, 8).unwrap();
    let s = energy_decay_samples(&u, &ladder, 0, &[0.5, 1.0]).unwrap();
    assert!(s.iter().all(|e| e.sup_l2 == 0.0 && e.dissipation == 0.0));
}
