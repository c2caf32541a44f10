//! Initial-data generators and the approximate localization operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, LabError, Result};
use crate::spectral::{curl, leray_project, Ball, Grid3, VectorField};

/// `R / w` for the Gaussian potential of [`solenoidal_bump`].
const BUMP_SHARPNESS: f64 = 7.0;

/// `A(sin x cos y, -cos x sin y, 0)` in units where the box is `2π`.
pub fn taylor_green(amplitude: f64, grid: Grid3) -> Result<VectorField> {
    let s = 2.0 * PI / grid.box_length();
    VectorField::from_fn(grid, |[x, y, _]| {
        let (x, y) = (s * x, s * y);
        [amplitude * x.sin() * y.cos(), -amplitude * x.cos() * y.sin(), 0.0]
    })
    .map(|f| f.to_spectral())
}

/// Curl of the potential `Φ(ρ) (e_z + (x - c)_x / w · e_y)` with
/// `Φ(ρ) = exp(-ρ²/(2w²))`, `w = R/7`, scaled so that `max |u| = amplitude`.
/// The field is exactly solenoidal; outside `1.1R` it is below `1e-10`
/// of its peak once `w` spans a couple of grid cells.
pub fn solenoidal_bump(center: [f64; 3], radius: f64, amplitude: f64, grid: Grid3) -> Result<VectorField> {
    let ball = Ball::new(center, radius)?;
    if !ball.fits_in(&grid, radius) {
        return Err(domain(format!(
            "bump of radius {radius} at {center:?} needs a margin of {radius} inside the box of side {}",
            grid.box_length()
        )));
    }
    let w = radius / BUMP_SHARPNESS;
    let psi = VectorField::from_fn(grid, |p| {
        let d = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let phi = (-r2 / (2.0 * w * w)).exp();
        [0.0, phi * d[0] / w, phi]
    })?;
    let u = curl(&psi)?;
    let peak = u.to_physical().magnitudes().into_iter().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(LabError::Resolution(format!("bump of radius {radius} is not resolved on {}³", grid.n())));
    }
    Ok(zero_mean(u.scaled(amplitude / peak)))
}

fn zero_mean(f: VectorField) -> VectorField {
    let grid = *f.grid();
    let mut parts = f.to_spectral().into_spectral_parts().expect("spectral");
    for c in parts.iter_mut() {
        c[0] = Complex64::default();
    }
    VectorField::from_spectral(grid, parts).expect("finite")
}

/// `C^∞` step: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
pub fn smooth_step(x: f64) -> f64 {
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        f(x) / (f(x) + f(1.0 - x))
    }
}

/// Cutoff equal to 1 on `r ≤ inner`, 0 on `r ≥ outer`.
pub fn radial_cutoff(r: f64, inner: f64, outer: f64) -> f64 {
    smooth_step((outer - r) / (outer - inner))
}

/// Swirl `a χ(r)/max(r, ε) · (-y, x, 0)/sqrt(ρ² + ε²)` about the box centre
/// (`ρ` the distance to the vertical axis), so `|u| ≈ a/|x|` away from the
/// axis and inside `L/4`; `χ` falls from 1 at `L/4` to 0 at `3L/8`.
pub fn weak_l3_profile(epsilon: f64, amplitude: f64, grid: Grid3) -> Result<VectorField> {
    let h = grid.spacing();
    if !(epsilon >= 2.0 * h) {
        return Err(LabError::Resolution(format!("epsilon {epsilon} is below 2h = {}", 2.0 * h)));
    }
    let l = grid.box_length();
    if epsilon >= l / 4.0 {
        return Err(domain(format!("epsilon {epsilon} must be below L/4 = {}", l / 4.0)));
    }
    let c = grid.center();
    let f = VectorField::from_fn(grid, |p| {
        let (x, y, z) = (p[0] - c[0], p[1] - c[1], p[2] - c[2]);
        let rho2 = x * x + y * y;
        let r = (rho2 + z * z).sqrt();
        let g = amplitude * radial_cutoff(r, l / 4.0, 3.0 * l / 8.0) / r.max(epsilon);
        let s = g / (rho2 + epsilon * epsilon).sqrt();
        [-y * s, x * s, 0.0]
    })?;
    Ok(zero_mean(leray_project(&f.to_spectral())?))
}

/// Result of [`localize_with_report`].
#[derive(Debug, Clone)]
pub struct Localization {
    pub field: VectorField,
    /// `‖P(χu₀) - χu₀‖_{L²}`.
    pub correction_l2: f64,
    /// `‖χu₀ - u₀‖_{L²}`.
    pub cutoff_l2: f64,
}

/// Smooth cutoff (1 on `3R/4`, 0 beyond `R`) followed by Leray projection.
pub fn localize(u0: &VectorField, ball: &Ball) -> Result<VectorField> {
    localize_with_report(u0, ball).map(|l| l.field)
}

pub fn localize_with_report(u0: &VectorField, ball: &Ball) -> Result<Localization> {
    let grid = *u0.grid();
    if !ball.fits_in(&grid, 0.0) {
        return Err(domain("localization ball does not fit in the box"));
    }
    let phys = u0.to_physical();
    let comps = phys.physical()?;
    let chi: Vec<f64> = (0..grid.len())
        .map(|i| radial_cutoff(ball.distance(grid.point(i)), 0.75 * ball.radius, ball.radius))
        .collect();
    let cut = VectorField::from_physical(grid, std::array::from_fn(|c| comps[c].iter().zip(&chi).map(|(v, x)| v * x).collect()))?;
    let projected = zero_mean(leray_project(&cut.to_spectral())?);
    let correction_l2 = projected.sub(&cut.to_spectral())?.l2_norm();
    let cutoff_l2 = cut.sub(&phys)?.l2_norm();
    Ok(Localization { field: projected, correction_l2, cutoff_l2 })
}

/// Generator selection as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSpec {
    Zero,
    TaylorGreen {
        amplitude: f64,
    },
    SolenoidalBump {
        #[serde(default)]
        center: Option<[f64; 3]>,
        radius: f64,
        amplitude: f64,
    },
    WeakL3Profile {
        epsilon: f64,
        amplitude: f64,
    },
}

impl DataSpec {
    pub fn generate(&self, grid: Grid3) -> Result<VectorField> {
        match *self {
            DataSpec::Zero => Ok(VectorField::zeros_spectral(grid)),
            DataSpec::TaylorGreen { amplitude } => taylor_green(amplitude, grid),
            DataSpec::SolenoidalBump { center, radius, amplitude } => {
                solenoidal_bump(center.unwrap_or(grid.center()), radius, amplitude, grid)
            }
            DataSpec::WeakL3Profile { epsilon, amplitude } => weak_l3_profile(epsilon, amplitude, grid),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DataSpec::Zero => "zero",
            DataSpec::TaylorGreen { .. } => "taylor_green",
            DataSpec::SolenoidalBump { .. } => "solenoidal_bump",
            DataSpec::WeakL3Profile { .. } => "weak_l3_profile",
        }
    }
}
