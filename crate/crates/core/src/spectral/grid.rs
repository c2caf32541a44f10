use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Periodic cube `[0, L)^3` sampled at `n` points per axis.
///
/// Grid point `(i, j, k)` sits at `(i h, j h, k h)` with `h = L / n` and is
/// stored at flat index `(i n + j) n + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    n: usize,
    box_length: f64,
}

impl Grid3 {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(domain(format!("mode count {n} must be a power of two >= 4")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(domain(format!("box length {box_length} must be positive")));
        }
        Ok(Self { n, box_length })
    }

    /// `n^3` grid on the `2π` box.
    pub fn periodic_2pi(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Signed mode index in `[-n/2, n/2)` for storage index `m`.
    #[inline]
    pub fn signed_index(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m >= n / 2 {
            m - n
        } else {
            m
        }
    }

    /// Storage index of the signed mode index `s` (taken modulo `n`).
    #[inline]
    pub fn storage_index(&self, s: i64) -> usize {
        s.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn is_nyquist(&self, m: usize) -> bool {
        m == self.n / 2
    }

    /// Physical wavenumber `2π s / L` for storage index `m`.
    #[inline]
    pub fn wavenumber(&self, m: usize) -> f64 {
        2.0 * PI * self.signed_index(m) as f64 / self.box_length
    }

    /// Wavevector of flat mode index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unflat(idx);
        [self.wavenumber(a), self.wavenumber(b), self.wavenumber(c)]
    }

    /// `|κ|²` for every flat mode index.
    pub fn wavenumber_sq(&self) -> Vec<f64> {
        let n = self.n;
        let k1: Vec<f64> = (0..n).map(|m| self.wavenumber(m)).collect();
        let mut out = Vec::with_capacity(self.len());
        for a in &k1 {
            for b in &k1 {
                for c in &k1 {
                    out.push(a * a + b * b + c * c);
                }
            }
        }
        out
    }

    /// Flat index of the mode `-κ` (conjugate partner).
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let [a, b, c] = self.unflat(idx);
        self.flat((n - a) % n, (n - b) % n, (n - c) % n)
    }

    /// Largest retained |signed index| under the 2/3 rule: `3K < n`.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n as i64 - 1) / 3
    }

    /// Physical coordinates of grid point `idx`.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let [i, j, k] = self.unflat(idx);
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }

    /// Geometric centre of the box, which is also a grid point.
    pub fn center(&self) -> [f64; 3] {
        let c = self.box_length / 2.0;
        [c, c, c]
    }
}

/// Closed ball used as a measurement or cutoff region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 3],
    pub radius: f64,
}

impl Ball {
    pub fn new(center: [f64; 3], radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(domain(format!("ball radius {radius} must be positive")));
        }
        Ok(Self { center, radius })
    }

    /// Ball checked against the fundamental domain of `grid`.
    pub fn in_grid(center: [f64; 3], radius: f64, grid: &Grid3) -> Result<Self> {
        let ball = Self::new(center, radius)?;
        if !ball.fits_in(grid, 0.0) {
            return Err(domain(format!(
                "ball (centre {center:?}, radius {radius}) does not fit in the box of side {}",
                grid.box_length()
            )));
        }
        Ok(ball)
    }

    /// Whether the ball, enlarged by `margin`, lies inside `[0, L]^3`.
    pub fn fits_in(&self, grid: &Grid3, margin: f64) -> bool {
        let l = grid.box_length();
        let r = self.radius + margin;
        r <= l / 2.0 && self.center.iter().all(|&c| c - r >= 0.0 && c + r <= l)
    }

    #[inline]
    pub fn distance(&self, p: [f64; 3]) -> f64 {
        let d0 = p[0] - self.center[0];
        let d1 = p[1] - self.center[1];
        let d2 = p[2] - self.center[2];
        (d0 * d0 + d1 * d1 + d2 * d2).sqrt()
    }

    #[inline]
    pub fn contains(&self, p: [f64; 3]) -> bool {
        self.distance(p) <= self.radius
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.center, radius)
    }
}

/// Spatial region over which a norm is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Whole,
    Ball(Ball),
}

impl Region {
    /// Cell-centre membership mask over `grid`.
    pub fn mask(&self, grid: &Grid3) -> Vec<bool> {
        match self {
            Region::Whole => vec![true; grid.len()],
            Region::Ball(b) => (0..grid.len()).map(|i| b.contains(grid.point(i))).collect(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Region::Whole => "whole".to_string(),
            Region::Ball(b) => format!("ball(r={})", b.radius),
        }
    }
}
