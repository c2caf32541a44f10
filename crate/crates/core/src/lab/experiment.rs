use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fit::{fit_rate, RateFit};
use super::schedule::{exponent_schedule, ExponentSchedule};
use crate::duhamel::{run_ladder, LadderRun};
use crate::error::{LabError, Result};
use crate::norms::{lebesgue_of_values, mixed_norm_of_samples, MixedNormSpec};
use crate::solver::{EnergyAccumulator, EnergySample};
use crate::spectral::Region;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSample {
    pub t: f64,
    pub sup_norm: f64,
    pub l2_norm: f64,
    /// `‖u - P_k‖_{L^r(0,t; L^q(region))}`.
    pub mixed_norm: f64,
}

/// Samples and fit of `‖u - P_k‖_{L^∞(region)}` at the dyadic times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSeries {
    pub k: usize,
    pub region: String,
    pub samples: Vec<RateSample>,
    pub fit: Option<RateFit>,
    pub fit_error: Option<String>,
    pub scheduled_a_k: f64,
    /// `slope ≥ a_k - tolerance`; `None` when the fit is degenerate.
    pub meets_floor: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySeries {
    pub k: usize,
    pub samples: Vec<EnergySample>,
    /// Fit of `sup_{s ≤ t} ‖u - P_k‖_{L²}`.
    pub fit: Option<RateFit>,
    pub fit_error: Option<String>,
}

/// `Q(T) = ‖u - P_k‖_{L^r(0,T; L^q)}` over the box at `T, T/2, T/4, T/8`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedScaling {
    pub k: usize,
    pub q: f64,
    pub r: f64,
    pub horizons: Vec<f64>,
    pub values: Vec<f64>,
    /// `Q(T)/T^{1/2}`.
    pub normalized: Vec<f64>,
    /// `max/min` of `normalized`; infinite if any entry vanishes.
    pub variation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    /// Every ball fit meets its floor.
    pub slopes_meet_floor: bool,
    /// Ball slopes do not decrease with `k`.
    pub slopes_non_decreasing: bool,
    /// The `k = 0` energy slope is at least `1/4 - tolerance/2`.
    pub energy_floor: bool,
    /// Some fit had too few positive samples.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub config: ExperimentConfig,
    pub schedule: ExponentSchedule,
    pub run: LadderRun,
    /// `sup_j t_j^{1/2} ‖u(t_j)‖_{L^∞}`.
    pub kato_sup: f64,
    pub initial_sup: f64,
    pub series: Vec<RateSeries>,
    pub energy: Vec<EnergySeries>,
    pub mixed_scaling: Vec<MixedScaling>,
    pub checks: Checks,
}

/// Node indices of `T·2^{-j}`, `j_min ≤ j ≤ j_max`, snapped and deduplicated,
/// in increasing time order.
pub fn dyadic_nodes(steps: usize, j_min: u32, j_max: u32) -> Vec<usize> {
    let mut nodes: Vec<usize> = (j_min..=j_max)
        .map(|j| ((steps as f64) * 2f64.powi(-(j as i32))).round() as usize)
        .filter(|&i| i >= 1)
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

const REGIONS: [&str; 2] = ["ball", "whole"];

pub fn run_separation_experiment(cfg: &ExperimentConfig) -> Result<RateReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let ball = cfg.ball()?;
    let s = &cfg.schedule;
    let schedule = exponent_schedule(s.gamma, s.p, s.sigma)?;
    let steps = cfg.time.steps;
    let horizon = cfg.time.horizon;
    let k_max = cfg.ladder.k_max;
    let nodes = dyadic_nodes(steps, cfg.measure.dyadic.j_min, cfg.measure.dyadic.j_max);
    if nodes.len() < super::fit::MIN_FIT_SAMPLES {
        return Err(LabError::Config(format!(
            "only {} distinct dyadic nodes for M = {steps}; need at least {}",
            nodes.len(),
            super::fit::MIN_FIT_SAMPLES
        )));
    }
    let mixed = MixedNormSpec::critical_pair(cfg.measure.mixed_q, horizon)?;
    let u0 = cfg.data.generate(grid)?;
    let masks = [Region::Ball(ball).mask(&grid), Region::Whole.mask(&grid)];
    let cell = grid.cell_volume();

    // q-norms at every node, per k and region, for the mixed norms
    let mut q_norms = vec![[Vec::with_capacity(steps + 1), Vec::with_capacity(steps + 1)]; k_max + 1];
    let mut dyadic: Vec<[Vec<(f64, f64, f64)>; 2]> = vec![[Vec::new(), Vec::new()]; k_max + 1];
    let mut energy_acc = vec![EnergyAccumulator::new(); k_max + 1];
    let mut energy: Vec<Vec<EnergySample>> = vec![Vec::new(); k_max + 1];
    let mut times = Vec::with_capacity(steps + 1);
    let mut kato_sup = 0.0f64;
    let mut initial_sup = 0.0f64;

    let run = run_ladder(&u0, k_max, horizon, steps, cfg.solution.scheme, |node| {
        let j = node.index();
        let t = node.time();
        times.push(t);
        let sup_u = node.solution()?.to_physical().magnitudes().into_iter().fold(0.0, f64::max);
        if j == 0 {
            initial_sup = sup_u;
        }
        kato_sup = kato_sup.max(t.sqrt() * sup_u);
        let at_dyadic = nodes.binary_search(&j).is_ok();
        for k in 0..=k_max {
            let w = node.separation(k)?;
            let e = energy_acc[k].push(t, &w);
            if at_dyadic {
                energy[k].push(e);
            }
            let mags = w.to_physical().magnitudes();
            for (ri, mask) in masks.iter().enumerate() {
                let vals: Vec<f64> = mags.iter().zip(mask).filter_map(|(v, m)| m.then_some(*v)).collect();
                q_norms[k][ri].push(lebesgue_of_values(&vals, cell, mixed.q)?);
                if at_dyadic {
                    let sup = lebesgue_of_values(&vals, cell, f64::INFINITY)?;
                    let l2 = lebesgue_of_values(&vals, cell, 2.0)?;
                    dyadic[k][ri].push((t, sup, l2));
                }
            }
        }
        Ok(())
    })?;

    let tol = cfg.measure.slope_tolerance;
    let mut series = Vec::new();
    for k in 0..=k_max {
        for (ri, name) in REGIONS.iter().enumerate() {
            let samples = dyadic[k][ri]
                .iter()
                .map(|&(t, sup, l2)| {
                    let m = nodes_index(&times, t);
                    Ok(RateSample {
                        t,
                        sup_norm: sup,
                        l2_norm: l2,
                        mixed_norm: mixed_norm_of_samples(&times[..=m], &q_norms[k][ri][..=m], mixed.r, t)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.sup_norm)).collect();
            let (fit, fit_error) = split_fit(fit_rate(&pts))?;
            let a_k = schedule.a_k(k);
            series.push(RateSeries {
                k,
                region: name.to_string(),
                samples,
                meets_floor: fit.map(|f| f.slope >= a_k - tol),
                fit,
                fit_error,
                scheduled_a_k: a_k,
            });
        }
    }

    let mut energy_series = Vec::new();
    for (k, samples) in energy.into_iter().enumerate() {
        let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.sup_l2)).collect();
        let (fit, fit_error) = split_fit(fit_rate(&pts))?;
        energy_series.push(EnergySeries { k, samples, fit, fit_error });
    }

    let mut mixed_scaling = Vec::new();
    for (k, per_region) in q_norms.iter().enumerate() {
        let whole = &per_region[1];
        let horizons: Vec<f64> = (0..4).map(|i| horizon / 2f64.powi(i)).collect();
        let mut values = Vec::new();
        for &h in &horizons {
            let m = nodes_index(&times, h);
            values.push(mixed_norm_of_samples(&times[..=m], &whole[..=m], mixed.r, h)?);
        }
        let normalized: Vec<f64> = values.iter().zip(&horizons).map(|(v, h)| v / h.sqrt()).collect();
        let max = normalized.iter().cloned().fold(0.0, f64::max);
        let min = normalized.iter().cloned().fold(f64::INFINITY, f64::min);
        let variation = if min > 0.0 { max / min } else { f64::INFINITY };
        mixed_scaling.push(MixedScaling { k, q: mixed.q, r: mixed.r, horizons, values, normalized, variation });
    }

    let ball_series: Vec<&RateSeries> = series.iter().filter(|s| s.region == "ball").collect();
    let degenerate = series.iter().any(|s| s.fit.is_none()) || energy_series.iter().any(|e| e.fit.is_none());
    let slopes: Vec<f64> = ball_series.iter().filter_map(|s| s.fit.map(|f| f.slope)).collect();
    let checks = Checks {
        slopes_meet_floor: ball_series.iter().all(|s| s.meets_floor == Some(true)),
        slopes_non_decreasing: slopes.len() == ball_series.len() && slopes.windows(2).all(|w| w[1] >= w[0]),
        energy_floor: energy_series
            .first()
            .and_then(|e| e.fit)
            .is_some_and(|f| f.slope >= 0.25 - tol / 2.0),
        degenerate,
    };

    Ok(RateReport {
        config: cfg.clone(),
        schedule,
        run,
        kato_sup,
        initial_sup,
        series,
        energy: energy_series,
        mixed_scaling,
        checks,
    })
}

fn nodes_index(times: &[f64], t: f64) -> usize {
    let dt = times[1] - times[0];
    (t / dt).round() as usize
}

fn split_fit(r: Result<RateFit>) -> Result<(Option<RateFit>, Option<String>)> {
    match r {
        Ok(f) => Ok((Some(f), None)),
        Err(LabError::Degenerate(msg)) => Ok((None, Some(msg))),
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct SampleRow<'a> {
    k: usize,
    region: &'a str,
    t: f64,
    sup_norm: f64,
    l2_norm: f64,
    mixed_norm: f64,
}

#[derive(Serialize)]
struct FitRow<'a> {
    k: usize,
    region: &'a str,
    slope: Option<f64>,
    intercept: Option<f64>,
    r2: Option<f64>,
    scheduled_a_k: f64,
}

/// Writes `report.json`, `samples.csv` and `fits.csv` into `dir`.
pub fn write_report(report: &RateReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;

    let mut w = csv::Writer::from_path(dir.join("samples.csv"))?;
    for s in &report.series {
        for p in &s.samples {
            w.serialize(SampleRow {
                k: s.k,
                region: &s.region,
                t: p.t,
                sup_norm: p.sup_norm,
                l2_norm: p.l2_norm,
                mixed_norm: p.mixed_norm,
            })?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("fits.csv"))?;
    for s in &report.series {
        w.serialize(FitRow {
            k: s.k,
            region: &s.region,
            slope: s.fit.map(|f| f.slope),
            intercept: s.fit.map(|f| f.intercept),
            r2: s.fit.map(|f| f.r2),
            scheduled_a_k: s.scheduled_a_k,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// One norm evaluation as emitted by the `norms` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub norm_kind: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub region: String,
    pub value: f64,
}

pub fn write_norm_rows<W: std::io::Write>(rows: &[NormRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_snapping() {
        assert_eq!(dyadic_nodes(1024, 2, 10), vec![1, 2, 4, 8, 16, 32, 64, 128, 256]);
        assert_eq!(dyadic_nodes(16, 2, 10), vec![1, 2, 4]);
    }
}
