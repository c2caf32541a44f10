#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use nslab::spectral::{leray_project, Grid3, VectorField};

pub fn grid(n: usize) -> Grid3 {
    Grid3::periodic_2pi(n).unwrap()
}

/// White-noise physical field, uniform in [-1, 1].
pub fn random_field(grid: Grid3, seed: u64) -> VectorField {
    let mut rng = StdRng::seed_from_u64(seed);
    let comps = std::array::from_fn(|_| (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect());
    VectorField::from_physical(grid, comps).unwrap()
}

/// Random solenoidal, mean-zero field with modes `|s| ≤ smax` per axis and
/// a Gaussian-ish spectral decay, so that products stay resolved.
pub fn smooth_solenoidal(grid: Grid3, smax: i64, amplitude: f64, seed: u64) -> VectorField {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut comps: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::default(); grid.len()]);
    for idx in 0..grid.len() {
        let s = grid.unflat(idx).map(|m| grid.signed_index(m));
        if s == [0, 0, 0] || s.iter().any(|&v| v.abs() > smax) {
            continue;
        }
        let j = grid.conjugate_index(idx);
        if j < idx {
            continue;
        }
        let damp = (-(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) as f64 / (smax * smax) as f64).exp();
        for c in comps.iter_mut() {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * damp;
            if j == idx {
                c[idx] = Complex64::new(v.re, 0.0);
            } else {
                c[idx] = v;
                c[j] = v.conj();
            }
        }
    }
    let f = leray_project(&VectorField::from_spectral(grid, comps).unwrap()).unwrap();
    let sup = f.magnitudes().into_iter().fold(0.0, f64::max);
    f.scaled(amplitude / sup)
}

pub fn max_abs_diff(a: &VectorField, b: &VectorField) -> f64 {
    let a = a.to_physical();
    let b = b.to_physical();
    let (pa, pb) = (a.physical().unwrap(), b.physical().unwrap());
    (0..3)
        .flat_map(|c| pa[c].iter().zip(&pb[c]).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

pub fn sup(f: &VectorField) -> f64 {
    f.magnitudes().into_iter().fold(0.0, f64::max)
}

/// Max over modes and components of `|a - b|`, relative to the largest mode of `b`.
pub fn spectral_rel_diff(a: &VectorField, b: &VectorField) -> f64 {
    let a = a.to_spectral();
    let b = b.to_spectral();
    let (sa, sb) = (a.spectral().unwrap(), b.spectral().unwrap());
    let scale = b.max_mode().max(1e-300);
    (0..3)
        .flat_map(|c| sa[c].iter().zip(&sb[c]).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
        / scale
}

pub type Q = Ratio<i64>;

/// Schedule from the recursion in exact arithmetic. `p = None` is `p = ∞`.
pub fn schedule_oracle(gamma: Q, p: Option<i64>, sigma: Q) -> (Vec<Q>, usize) {
    let half = Q::new(1, 2);
    let step = match p {
        Some(p) => half - Q::new(3, 2 * p),
        None => half,
    };
    let a0 = (gamma * half).min(step);
    let mut k0 = 0;
    while Q::from(k0 as i64) * step + a0 < sigma {
        k0 += 1;
    }
    let mut a = vec![a0.min(sigma)];
    while *a.last().unwrap() < sigma {
        let next = (*a.last().unwrap() + step).min(sigma);
        a.push(next);
    }
    (a, k0)
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// 50 `(γ, p, σ)` triples covering finite and infinite `p` and `σ` below, at
/// and above the first scheduled exponent.
pub fn schedule_triples() -> Vec<(Q, Option<i64>, Q)> {
    let gammas = [Q::new(1, 10), Q::new(1, 2), Q::new(7, 10), Q::new(9, 10), Q::new(4, 5)];
    let ps = [Some(4), Some(6), Some(9), Some(30), None];
    let sigmas = [Q::new(1, 5), Q::new(7, 10), Q::new(1, 1), Q::new(7, 5), Q::new(29, 20)];
    let mut out = Vec::new();
    for (i, &gamma) in gammas.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            out.push((gamma, p, sigmas[(i + j) % 5]));
            out.push((gamma, p, sigmas[(i + 2 * j + 3) % 5]));
        }
    }
    out
}

/// Compares the library schedule with the exact one; `Err` names the first mismatch.
pub fn check_schedule(gamma: Q, p: Option<i64>, sigma: Q) -> Result<(), String> {
    let (want, k0) = schedule_oracle(gamma, p, sigma);
    let got = nslab::lab::exponent_schedule(to_f64(gamma), p.map_or(f64::INFINITY, |p| p as f64), to_f64(sigma))
        .map_err(|e| e.to_string())?;
    let tag = format!("γ={gamma} p={p:?} σ={sigma}");
    if got.k0 != k0 || got.a.len() != want.len() {
        return Err(format!("{tag}: k0 {} vs {k0}, {:?} vs {want:?}", got.k0, got.a));
    }
    if let Some((g, w)) = got.a.iter().zip(&want).find(|(g, w)| (*g - to_f64(**w)).abs() > 4.0 * f64::EPSILON) {
        return Err(format!("{tag}: {g} vs {w}"));
    }
    if *got.a.last().unwrap() != to_f64(sigma) || !got.a.windows(2).all(|w| w[0] < w[1]) {
        return Err(format!("{tag}: not strictly increasing to σ: {:?}", got.a));
    }
    Ok(())
}
