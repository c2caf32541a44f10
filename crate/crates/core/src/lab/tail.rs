//! Far-field heat-kernel tail: the `L^{3/2,1}_y` norm of
//! `e^{-|x-y|²/(4t)}(1 - χ_{B_R}(y))`, maximised over `|x| ≤ r`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Default number of Simpson intervals per radial integral.
pub const DEFAULT_RESOLUTION: usize = 2000;
/// Offsets `|x|` sampled in `[0, r]`.
const OFFSETS: usize = 8;
/// Upper end of the stretched radial variable.
const X_MAX: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSample {
    pub t: f64,
    /// `N(t)`.
    pub n: f64,
    /// `e^{-(R-r)²/(4t)}`.
    pub bound: f64,
    /// `N(t) / bound(t)`, computed without forming either factor.
    pub ratio: f64,
}

/// Volume of the intersection of balls of radii `a`, `b` at distance `d`.
pub fn lens_volume(a: f64, b: f64, d: f64) -> f64 {
    if d >= a + b {
        return 0.0;
    }
    if d <= (a - b).abs() {
        return 4.0 / 3.0 * PI * a.min(b).powi(3);
    }
    PI * (a + b - d).powi(2) * (d * d + 2.0 * d * (a + b) - 3.0 * (a - b).powi(2)) / (12.0 * d)
}

/// `|B_ρ(x) \ B_R(0)|` for `|x| = d`.
pub fn outer_volume(rho: f64, big_r: f64, d: f64) -> f64 {
    (4.0 / 3.0 * PI * rho.powi(3) - lens_volume(rho, big_r, d)).max(0.0)
}

/// `N/bound` at offset `d`: `(3/2)∫ V(d,ρ)^{2/3} (ρ/2t) e^{-(ρ² - (R-r)²)/(4t)} dρ`
/// over `ρ ≥ R - d`, by composite Simpson in a stretched variable.
fn ratio_at_offset(big_r: f64, r: f64, d: f64, t: f64, resolution: usize) -> f64 {
    let rho0 = big_r - d;
    let sq = t.sqrt();
    let tau = rho0 / sq;
    let c = 2.0 * sq / (1.0 + tau);
    let pre = -(rho0 * rho0 - (big_r - r).powi(2)) / (4.0 * t);
    let f = |x: f64| -> f64 {
        let rho = rho0 + c * x;
        let v = outer_volume(rho, big_r, d);
        if v <= 0.0 {
            return 0.0;
        }
        let expo = pre - tau * x / (1.0 + tau) - (x / (1.0 + tau)).powi(2);
        1.5 * v.powf(2.0 / 3.0) * rho / (2.0 * t) * expo.exp() * c
    };
    let m = resolution + resolution % 2;
    let h = X_MAX / m as f64;
    let mut sum = f(0.0) + f(X_MAX);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0
}

pub fn heat_tail_check(big_r: f64, r: f64, times: &[f64]) -> Result<Vec<TailSample>> {
    heat_tail_check_with(big_r, r, times, DEFAULT_RESOLUTION)
}

pub fn heat_tail_check_with(big_r: f64, r: f64, times: &[f64], resolution: usize) -> Result<Vec<TailSample>> {
    if !(r > 0.0 && r < big_r && big_r.is_finite()) {
        return Err(domain(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    if resolution < 2 {
        return Err(domain("quadrature resolution must be at least 2"));
    }
    times
        .iter()
        .map(|&t| {
            if !(t > 0.0 && t.is_finite()) {
                return Err(domain(format!("times must be positive, got {t}")));
            }
            let ratio = (0..=OFFSETS)
                .map(|i| ratio_at_offset(big_r, r, r * i as f64 / OFFSETS as f64, t, resolution))
                .fold(0.0, f64::max);
            let bound = (-(big_r - r).powi(2) / (4.0 * t)).exp();
            Ok(TailSample { t, n: ratio * bound, bound, ratio })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens_limits() {
        assert_eq!(lens_volume(1.0, 1.0, 2.5), 0.0);
        assert!((lens_volume(1.0, 3.0, 0.5) - 4.0 / 3.0 * PI).abs() < 1e-14);
        // touching from inside is continuous
        let inside = lens_volume(1.0, 3.0, 2.0);
        let just = lens_volume(1.0, 3.0, 2.0 + 1e-9);
        assert!((inside - just).abs() < 1e-6);
    }

    #[test]
    fn lens_matches_cell_count() {
        let (a, b, d) = (1.0, 1.3, 0.9);
        let n = 160;
        let lo = [-1.3, -1.3, -1.3];
        let h = 2.6 / n as f64;
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = [lo[0] + (i as f64 + 0.5) * h, lo[1] + (j as f64 + 0.5) * h, lo[2] + (k as f64 + 0.5) * h];
                    let in_b = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= b * b;
                    let in_a = (p[0] - d).powi(2) + p[1] * p[1] + p[2] * p[2] <= a * a;
                    if in_a && in_b {
                        count += 1;
                    }
                }
            }
        }
        let approx = count as f64 * h * h * h;
        assert!((approx - lens_volume(a, b, d)).abs() < 5e-3 * approx);
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(heat_tail_check(1.0, 1.0, &[0.1]).is_err());
        assert!(heat_tail_check(1.0, 0.0, &[0.1]).is_err());
        assert!(heat_tail_check(2.0, 0.5, &[0.0]).is_err());
    }
}
