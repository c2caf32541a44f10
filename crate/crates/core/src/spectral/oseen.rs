//! Numerical synthesis of the Oseen kernel `e^{tΔ}P` on the periodic grid.

use num_complex::Complex64;

use super::field::inverse_pair;
use super::grid::Grid3;
use crate::error::{domain, Result};

/// Frobenius magnitude of the kernel tensor sampled on a grid, with the
/// origin at grid point 0.
#[derive(Debug, Clone)]
pub struct OseenKernel {
    pub grid: Grid3,
    pub t: f64,
    pub magnitude: Vec<f64>,
}

/// Synthesises `K(x, t) = L^{-3} Σ_{κ≠0} e^{iκ·x} e^{-|κ|²t} (I - κκᵀ/|κ|²)`.
/// The mean mode is dropped so that `K` approximates the whole-space kernel;
/// Nyquist planes are zeroed as everywhere else.
pub fn oseen_kernel(t: f64, grid: Grid3) -> Result<OseenKernel> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("Oseen kernel needs t > 0, got {t}")));
    }
    let n3 = grid.len();
    let norm = 1.0 / grid.box_length().powi(3);
    let ksq = grid.wavenumber_sq();
    let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    let mut hats: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); n3]; 6];
    for idx in 1..n3 {
        if grid.unflat(idx).iter().any(|&m| grid.is_nyquist(m)) {
            continue;
        }
        let k = grid.wavevector(idx);
        let heat = (-ksq[idx] * t).exp() * norm;
        for (slot, &(a, b)) in pairs.iter().enumerate() {
            let delta = if a == b { 1.0 } else { 0.0 };
            hats[slot][idx] = Complex64::new(heat * (delta - k[a] * k[b] / ksq[idx]), 0.0);
        }
    }
    let mut comps: Vec<Vec<f64>> = Vec::with_capacity(6);
    for chunk in hats.chunks(2) {
        let (a, b) = inverse_pair(&grid, &chunk[0], Some(&chunk[1]));
        comps.push(a);
        comps.push(b.unwrap());
    }
    let magnitude = (0..n3)
        .map(|x| {
            let diag = comps[0][x].powi(2) + comps[1][x].powi(2) + comps[2][x].powi(2);
            let off = comps[3][x].powi(2) + comps[4][x].powi(2) + comps[5][x].powi(2);
            (diag + 2.0 * off).sqrt()
        })
        .collect();
    Ok(OseenKernel { grid, t, magnitude })
}

impl OseenKernel {
    /// Periodic (minimum-image) distance of grid point `idx` from the origin.
    pub fn radius(&self, idx: usize) -> f64 {
        let h = self.grid.spacing();
        let r2: f64 = self
            .grid
            .unflat(idx)
            .iter()
            .map(|&m| {
                let s = self.grid.signed_index(m) as f64 * h;
                s * s
            })
            .sum();
        r2.sqrt()
    }

    /// `|K(x,t)| (|x| + √t)³` at grid point `idx`.
    pub fn weighted(&self, idx: usize) -> f64 {
        self.magnitude[idx] * (self.radius(idx) + self.t.sqrt()).powi(3)
    }

    pub fn at_origin(&self) -> f64 {
        self.magnitude[0]
    }

    /// Maximum of the weighted kernel over `|x| ≤ L/4`.
    pub fn max_weighted(&self) -> f64 {
        let rmax = self.grid.box_length() / 4.0;
        (0..self.grid.len())
            .filter(|&i| self.radius(i) <= rmax)
            .map(|i| self.weighted(i))
            .fold(0.0, f64::max)
    }
}

/// `max_{|x| ≤ L/4} |K(x,t)| (|x| + √t)³`.
pub fn oseen_kernel_ratio(t: f64, grid: Grid3) -> Result<f64> {
    Ok(oseen_kernel(t, grid)?.max_weighted())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_time() {
        let g = Grid3::periodic_2pi(8).unwrap();
        assert!(oseen_kernel_ratio(0.0, g).is_err());
        assert!(oseen_kernel_ratio(-1.0, g).is_err());
    }

    #[test]
    fn origin_value_matches_whole_space_kernel() {
        // K(0,t) = (2/3)(4πt)^{-3/2} I, Frobenius norm √3 · that.
        let g = Grid3::periodic_2pi(32).unwrap();
        let t = 0.05;
        let k = oseen_kernel(t, g).unwrap();
        let exact = 3f64.sqrt() * (2.0 / 3.0) * (4.0 * std::f64::consts::PI * t).powf(-1.5);
        let mean_correction = 3f64.sqrt() * (2.0 / 3.0) / g.box_length().powi(3);
        assert!((k.at_origin() - (exact - mean_correction)).abs() < 1e-3 * exact);
    }
}
