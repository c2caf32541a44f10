mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::{grid, random_field, spectral_rel_diff};
use nslab::norms::lebesgue_norm;
use nslab::spectral::{
    divergence, gradient, heat_semigroup, leray_project, load_snapshot, oseen_kernel, oseen_kernel_ratio,
    save_snapshot, Grid3, Region, VectorField,
};

fn rel_phys(a: &VectorField, b: &VectorField) -> f64 {
    common::max_abs_diff(a, b) / common::sup(b)
}

#[test]
fn identities_on_32_cubed() {
    let g = grid(32);
    let f = random_field(g, 7);
    let s = f.to_spectral();

    // round trip
    assert!(rel_phys(&s.to_physical(), &f) <= 1e-12);

    // Parseval against an independent spectral sum
    let phys = lebesgue_norm(&f, 2.0, &Region::Whole).unwrap();
    let sp = s.spectral().unwrap();
    let sum: f64 = sp.iter().flat_map(|c| c.iter().map(|v| v.norm_sqr())).sum();
    let spec = (g.box_length().powi(3) * sum).sqrt();
    assert!((phys - spec).abs() <= 1e-12 * phys);

    // Leray idempotent, divergence-free
    let p = leray_project(&s).unwrap();
    let pp = leray_project(&p).unwrap();
    assert!(spectral_rel_diff(&pp, &p) <= 1e-12);
    assert!(p.divergence_error() <= 1e-12);

    // gradients annihilated
    let phi: Vec<Complex64> = divergence(&s).unwrap();
    let grad = gradient(g, &phi).unwrap();
    assert!(leray_project(&grad).unwrap().max_mode() <= 1e-12 * grad.max_mode());

    // heat: exact per-mode factor and semigroup law
    let h = heat_semigroup(&s, 0.3).unwrap();
    let ksq = g.wavenumber_sq();
    let hs = h.spectral().unwrap();
    for idx in (0..g.len()).step_by(97) {
        let want = sp[1][idx] * (-ksq[idx] * 0.3).exp();
        assert!((hs[1][idx] - want).norm() <= 1e-12 * s.max_mode());
    }
    let two = heat_semigroup(&heat_semigroup(&s, 0.1).unwrap(), 0.2).unwrap();
    assert!(spectral_rel_diff(&two, &h) <= 1e-12);
    assert!(spectral_rel_diff(&heat_semigroup(&s, 0.0).unwrap(), &s) == 0.0);
    assert!(heat_semigroup(&p, 0.05).unwrap().divergence_error() <= 1e-12);
}

#[test]
fn heat_factor_of_unit_mode() {
    let g = grid(16);
    let mut c = [vec![Complex64::default(); g.len()], vec![Complex64::default(); g.len()], vec![Complex64::default(); g.len()]];
    let i = g.flat(1, 0, 0);
    let j = g.conjugate_index(i);
    c[1][i] = Complex64::new(0.5, 0.0);
    c[1][j] = Complex64::new(0.5, 0.0);
    let f = VectorField::from_spectral(g, c).unwrap();
    let h = heat_semigroup(&f, 0.5).unwrap();
    let factor = h.spectral().unwrap()[1][i].re / 0.5;
    assert!((factor - 0.6065306597126334).abs() < 1e-15);
}

#[test]
fn hermitian_symmetry_is_kept() {
    let g = grid(16);
    let s = random_field(g, 3).to_spectral();
    assert!(s.hermitian_error() <= 1e-15);
    for out in [leray_project(&s).unwrap(), heat_semigroup(&s, 0.1).unwrap()] {
        assert!(out.hermitian_error() <= 1e-15);
    }
}

#[test]
fn snapshot_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid3::new(8, 3.0).unwrap();
    let f = random_field(g, 11).to_spectral();
    let path = dir.path().join("f.pslf");
    save_snapshot(&path, &f, 0.125).unwrap();
    let back = load_snapshot(&path).unwrap();
    assert_eq!(back.time, 0.125);
    assert_eq!(back.field, f);
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 4 + 4 + 12 + 8 + 1 + 8 + 3 * 512 * 16);
}

#[test]
fn oseen_centre_scaling_and_bounded_ratio() {
    let g = grid(64);
    let times: Vec<f64> = (0..5).map(|i| 0.02 * 2f64.powi(i)).collect();
    let pts: Vec<(f64, f64)> = times.iter().map(|&t| (t, oseen_kernel(t, g).unwrap().at_origin())).collect();
    let slope = nslab::lab::fit_rate(&pts).unwrap().slope;
    assert!((slope + 1.5).abs() <= 0.05, "slope {slope}");
    for t in [0.01, 0.1, 1.0] {
        let r = oseen_kernel_ratio(t, g).unwrap();
        assert!(r.is_finite() && r < 100.0, "t = {t}: {r}");
    }
    let a = oseen_kernel_ratio(0.02, g).unwrap();
    let b = oseen_kernel_ratio(0.08, g).unwrap();
    assert!((a / b - 1.0).abs() <= 0.1, "{a} vs {b}");
}

fn small_field() -> impl Strategy<Value = VectorField> {
    prop::collection::vec(-1.0f64..1.0, 3 * 512).prop_map(|v| {
        let g = grid(8);
        VectorField::from_physical(g, std::array::from_fn(|c| v[c * 512..(c + 1) * 512].to_vec())).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_and_parseval(f in small_field()) {
        let s = f.to_spectral();
        let scale = common::sup(&f).max(1e-300);
        prop_assert!(common::max_abs_diff(&s.to_physical(), &f) <= 1e-12 * scale);
        prop_assert!((s.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm().max(1e-300));
    }

    #[test]
    fn leray_idempotent_and_solenoidal(f in small_field()) {
        let p = leray_project(&f.to_spectral()).unwrap();
        prop_assert!(spectral_rel_diff(&leray_project(&p).unwrap(), &p) <= 1e-12);
        prop_assert!(p.divergence_error() <= 1e-12);
        prop_assert!(p.l2_norm() <= f.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn heat_semigroup_law(f in small_field(), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let s = f.to_spectral();
        let a = heat_semigroup(&heat_semigroup(&s, t1).unwrap(), t2).unwrap();
        let b = heat_semigroup(&s, t1 + t2).unwrap();
        prop_assert!(spectral_rel_diff(&a, &b) <= 1e-12);
        prop_assert!(b.l2_norm() <= s.l2_norm() * (1.0 + 1e-12));
    }
}
