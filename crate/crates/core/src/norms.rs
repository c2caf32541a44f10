//! Lebesgue, Lorentz, Kato and mixed space-time norms of sampled fields, and
//! the Gagliardo–Nirenberg ratio.
//!
//! All spatial norms use cell-centred quadrature: every grid point carries
//! the measure `h³` and belongs to a ball iff its centre does. Vector
//! magnitudes are Euclidean.

use serde::{Deserialize, Serialize};

use crate::duhamel::Trajectory;
use crate::error::{domain, LabError, Result};
use crate::spectral::{Region, VectorField};

/// Exponents of the Lorentz space `L^{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzSpec {
    pub p: f64,
    pub q: f64,
}

impl LorentzSpec {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if p.is_nan() || q.is_nan() || p < 1.0 || q < 1.0 {
            return Err(domain(format!("Lorentz exponents need p, q >= 1 (got p={p}, q={q})")));
        }
        if p.is_infinite() && q.is_finite() {
            return Err(domain("L^{∞,q} is only defined for q = ∞"));
        }
        Ok(Self { p, q })
    }

    /// Weak Lebesgue space `L^{p,∞}`.
    pub fn weak(p: f64) -> Result<Self> {
        Self::new(p, f64::INFINITY)
    }
}

/// `L^r(0,T; L^q)` exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub r: f64,
    pub q: f64,
    pub horizon: f64,
}

impl MixedNormSpec {
    pub fn new(r: f64, q: f64, horizon: f64) -> Result<Self> {
        if r.is_nan() || q.is_nan() || r < 1.0 || q < 1.0 {
            return Err(domain(format!("mixed-norm exponents need r, q >= 1 (got r={r}, q={q})")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(domain(format!("horizon {horizon} must be positive")));
        }
        Ok(Self { r, q, horizon })
    }

    /// The dimensionless pairing `r = 2q/(2q-3)` for `q ∈ (3/2, 3)`.
    pub fn critical_pair(q: f64, horizon: f64) -> Result<Self> {
        if !(q > 1.5 && q < 3.0) {
            return Err(domain(format!("critical pairing needs q in (3/2, 3), got {q}")));
        }
        Self::new(2.0 * q / (2.0 * q - 3.0), q, horizon)
    }
}

/// Kato class `𝒦_q` weight `t^{1/2 - 3/(2q)}` over `(0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KatoSpec {
    pub q: f64,
    pub horizon: f64,
}

impl KatoSpec {
    pub fn new(q: f64, horizon: f64) -> Result<Self> {
        if !(q > 3.0) {
            return Err(domain(format!("Kato class needs q > 3, got {q}")));
        }
        if !(horizon > 0.0) {
            return Err(domain(format!("horizon {horizon} must be positive")));
        }
        Ok(Self { q, horizon })
    }

    pub fn weight_exponent(&self) -> f64 {
        0.5 - 1.5 / self.q
    }
}

fn region_values(f: &VectorField, region: &Region) -> Result<Vec<f64>> {
    let mags = f.magnitudes();
    let vals: Vec<f64> = match region {
        Region::Whole => mags,
        Region::Ball(_) => {
            let mask = region.mask(f.grid());
            mags.into_iter().zip(mask).filter_map(|(v, keep)| keep.then_some(v)).collect()
        }
    };
    if vals.is_empty() {
        return Err(domain(format!("region {} contains no grid cells", region.label())));
    }
    Ok(vals)
}

/// `(Σ |v|^p μ)^{1/p}` over cells of measure `μ`; `p = ∞` gives the max.
pub fn lebesgue_of_values(values: &[f64], cell_measure: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(domain(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    if values.is_empty() {
        return Err(domain("no samples"));
    }
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    let sum: f64 = values.iter().map(|v| (v.abs() / max).powf(p)).sum();
    Ok(max * (sum * cell_measure).powf(1.0 / p))
}

/// `‖f‖_{L^p(region)}` by cell quadrature.
pub fn lebesgue_norm(f: &VectorField, p: f64, region: &Region) -> Result<f64> {
    let vals = region_values(f, region)?;
    lebesgue_of_values(&vals, f.grid().cell_volume(), p)
}

/// Lorentz quasi-norm of a step function: value `v_i` on a cell of measure
/// `μ`. The decreasing rearrangement is exact for step data, so
/// `q = ∞` gives `max_i ((i+1)μ)^{1/p} v_(i)` and `q < ∞` integrates
/// `(t^{1/p} f*(t))^q dt/t` in closed form per step.
pub fn lorentz_of_values(values: &[f64], cell_measure: f64, spec: LorentzSpec) -> Result<f64> {
    let spec = LorentzSpec::new(spec.p, spec.q)?;
    if values.is_empty() {
        return Err(domain("no samples"));
    }
    let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let max = sorted[0];
    if max == 0.0 {
        return Ok(0.0);
    }
    if spec.p.is_infinite() {
        return Ok(max);
    }
    let inv_p = 1.0 / spec.p;
    if spec.q.is_infinite() {
        let best = sorted
            .iter()
            .enumerate()
            .map(|(i, v)| ((i + 1) as f64 * cell_measure).powf(inv_p) * v)
            .fold(0.0, f64::max);
        return Ok(best);
    }
    let (p, q) = (spec.p, spec.q);
    let e = q / p;
    let mut sum = 0.0;
    let mut prev = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        let next = ((i + 1) as f64 * cell_measure).powf(e);
        sum += (v / max).powf(q) * (next - prev);
        prev = next;
    }
    Ok(max * (sum * p / q).powf(1.0 / q))
}

/// `‖f‖_{L^{p,q}(region)}` from the cell-wise decreasing rearrangement.
pub fn lorentz_norm(f: &VectorField, spec: LorentzSpec, region: &Region) -> Result<f64> {
    let vals = region_values(f, region)?;
    lorentz_of_values(&vals, f.grid().cell_volume(), spec)
}

/// `(∫_0^T g(t)^r dt)^{1/r}` by composite trapezoid on uniform samples
/// `(t_j, g_j)` starting at `t_0 = 0`; `r = ∞` gives the max. `T` must be a
/// sample time.
pub fn mixed_norm_of_samples(times: &[f64], values: &[f64], r: f64, horizon: f64) -> Result<f64> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(domain("mixed norm needs at least two matching samples"));
    }
    let dt = times[1] - times[0];
    let last = times[times.len() - 1];
    if horizon > last * (1.0 + 1e-12) {
        return Err(domain(format!("horizon {horizon} exceeds the sampled range [0, {last}]")));
    }
    let m = ((horizon - times[0]) / dt).round() as usize;
    if ((times[0] + m as f64 * dt) - horizon).abs() > 1e-9 * dt.max(horizon) {
        return Err(domain(format!("horizon {horizon} is not a sample time")));
    }
    let vals = &values[..=m];
    if r.is_infinite() {
        return Ok(vals.iter().fold(0.0, |a, v| a.max(v.abs())));
    }
    let max = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max == 0.0 {
        return Ok(0.0);
    }
    let pow: Vec<f64> = vals.iter().map(|v| (v.abs() / max).powf(r)).collect();
    let inner: f64 = pow[1..m].iter().sum::<f64>() + 0.5 * (pow[0] + pow[m]);
    Ok(max * (inner * dt).powf(1.0 / r))
}

/// `‖f‖_{L^r(0,T; L^q(region))}`.
pub fn mixed_norm(traj: &Trajectory, spec: MixedNormSpec, region: &Region) -> Result<f64> {
    let m = traj.node_index(spec.horizon).map_err(|_| {
        domain(format!(
            "horizon {} is not a node of the trajectory on [0, {}]",
            spec.horizon,
            traj.horizon()
        ))
    })?;
    let times: Vec<f64> = (0..=m).map(|j| traj.time(j)).collect();
    let values = (0..=m)
        .map(|j| lebesgue_norm(traj.snapshot(j), spec.q, region))
        .collect::<Result<Vec<_>>>()?;
    mixed_norm_of_samples(&times, &values, spec.r, spec.horizon)
}

/// `max_{0 < t_j ≤ T} t_j^{1/2 - 3/(2q)} g_j`; samples at `t = 0` are skipped.
pub fn kato_of_samples(times: &[f64], values: &[f64], spec: KatoSpec) -> Result<f64> {
    let spec = KatoSpec::new(spec.q, spec.horizon)?;
    let w = spec.weight_exponent();
    let mut best = 0.0f64;
    for (&t, &v) in times.iter().zip(values) {
        if t <= 0.0 || t > spec.horizon * (1.0 + 1e-12) {
            continue;
        }
        best = best.max(t.powf(w) * v.abs());
    }
    Ok(best)
}

/// `‖f‖_{𝒦_q}` over the trajectory nodes in `(0, T]`.
pub fn kato_norm(traj: &Trajectory, spec: KatoSpec) -> Result<f64> {
    let spec = KatoSpec::new(spec.q, spec.horizon)?;
    if spec.horizon > traj.horizon() * (1.0 + 1e-12) {
        return Err(domain("Kato horizon exceeds the trajectory"));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for j in 1..=traj.steps() {
        let t = traj.time(j);
        if t > spec.horizon * (1.0 + 1e-12) {
            break;
        }
        times.push(t);
        values.push(lebesgue_norm(traj.snapshot(j), spec.q, &Region::Whole)?);
    }
    kato_of_samples(&times, &values, spec)
}

/// `‖f‖_{L^{2q,2}} / (‖f‖_{L²}^θ ‖∇f‖_{L²}^{1-θ})` with `θ = 3/(2q) - 1/2`.
pub fn gn_ratio(f: &VectorField, q: f64) -> Result<f64> {
    if !(q > 1.5 && q < 3.0) {
        return Err(domain(format!("GN ratio needs q in (3/2, 3), got {q}")));
    }
    let theta = 1.5 / q - 0.5;
    let num = lorentz_norm(f, LorentzSpec::new(2.0 * q, 2.0)?, &Region::Whole)?;
    let l2 = f.l2_norm();
    let grad = f.gradient_l2_norm();
    let den = l2.powf(theta) * grad.powf(1.0 - theta);
    if !(den > 0.0) || !den.is_finite() {
        return Err(LabError::Degenerate("GN denominator vanishes".into()));
    }
    Ok(num / den)
}
