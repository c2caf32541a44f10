use serde::{Deserialize, Serialize};

use crate::error::{domain, LabError, Result};

/// Fewest positive samples accepted by [`fit_rate`].
pub const MIN_FIT_SAMPLES: usize = 4;

/// Least-squares line through `(log t, log value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_samples: usize,
    /// Samples dropped because their value was zero.
    pub n_dropped: usize,
}

pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit> {
    if let Some(&(t, _)) = samples.iter().find(|(t, _)| !(*t > 0.0 && t.is_finite())) {
        return Err(domain(format!("fit times must be positive, got {t}")));
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|&(t, v)| (t.ln(), v.ln()))
        .collect();
    let n_dropped = samples.len() - pts.len();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(LabError::Degenerate(format!(
            "{} positive samples, need at least {MIN_FIT_SAMPLES}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(LabError::Degenerate("all sample times coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit { slope, intercept, r2, n_samples: pts.len(), n_dropped })
}
