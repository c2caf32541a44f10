use serde::{Deserialize, Serialize};

use crate::duhamel::Trajectory;
use crate::error::{domain, Result};
use crate::norms::lebesgue_norm;
use crate::spectral::{heat_semigroup, Ball, Region, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalBoundRow {
    pub k: usize,
    pub q: f64,
    pub horizon: f64,
    /// `sup_{0 < t_j ≤ T} ‖P_k(t_j)‖_{L^q(B')}`.
    pub sup_local_lq: f64,
    /// `‖P_k(0)‖_{L^q}` over the whole box.
    pub initial_lq: f64,
    /// `sup_{0 < t_j ≤ T} t_j^{3/(2q)} ‖P_0(t_j)‖_{L^∞(B')}`; only for `k = 0`.
    pub heat_weighted_sup: Option<f64>,
}

pub fn picard_local_bounds(picards: &[Trajectory], ball: &Ball, q: f64, horizon: f64) -> Result<Vec<LocalBoundRow>> {
    if !(q > 3.0) {
        return Err(domain(format!("local bounds need q > 3, got {q}")));
    }
    let region = Region::Ball(*ball);
    picards
        .iter()
        .enumerate()
        .map(|(k, traj)| {
            let last = traj.node_index(horizon)?;
            if last == 0 {
                return Err(domain("horizon must be a positive node time"));
            }
            let mut sup = 0.0f64;
            let mut weighted = 0.0f64;
            for j in 1..=last {
                let f = traj.snapshot(j).to_physical();
                sup = sup.max(lebesgue_norm(&f, q, &region)?);
                if k == 0 {
                    let t = traj.time(j);
                    weighted = weighted.max(t.powf(1.5 / q) * lebesgue_norm(&f, f64::INFINITY, &region)?);
                }
            }
            Ok(LocalBoundRow {
                k,
                q,
                horizon,
                sup_local_lq: sup,
                initial_lq: lebesgue_norm(traj.snapshot(0), q, &Region::Whole)?,
                heat_weighted_sup: (k == 0).then_some(weighted),
            })
        })
        .collect()
}

/// `t^{3/(2q)} ‖e^{tΔ}u₀‖_{L^∞(B')}` at each requested time.
pub fn heat_weighted_profile(u0: &VectorField, ball: &Ball, q: f64, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(q > 3.0) {
        return Err(domain(format!("local bounds need q > 3, got {q}")));
    }
    let region = Region::Ball(*ball);
    let u0 = u0.to_spectral();
    times
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(domain(format!("times must be positive, got {t}")));
            }
            let p0 = heat_semigroup(&u0, t)?;
            Ok((t, t.powf(1.5 / q) * lebesgue_norm(&p0, f64::INFINITY, &region)?))
        })
        .collect()
}
