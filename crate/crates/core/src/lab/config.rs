use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::schedule::exponent_schedule;
use crate::data::DataSpec;
use crate::duhamel::SolutionMode;
use crate::error::{LabError, Result};
use crate::spectral::{Ball, Grid3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L", default = "two_pi")]
    pub box_length: f64,
}

fn two_pi() -> f64 {
    2.0 * PI
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "M")]
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub k_max: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self { k_max: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallConfig {
    /// Defaults to the box centre.
    #[serde(default)]
    pub center: Option<[f64; 3]>,
    pub radius: f64,
}

/// Measurement times `t_j = T·2^{-j}` for `j_min ≤ j ≤ j_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicConfig {
    pub j_min: u32,
    pub j_max: u32,
}

impl Default for DyadicConfig {
    fn default() -> Self {
        Self { j_min: 2, j_max: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub ball: BallConfig,
    #[serde(default)]
    pub dyadic: DyadicConfig,
    /// Spatial exponent of the mixed norm; the temporal one is `2q/(2q-3)`.
    #[serde(default = "default_mixed_q")]
    pub mixed_q: f64,
    /// Allowed shortfall of a fitted slope below the scheduled exponent.
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
}

fn default_mixed_q() -> f64 {
    2.0
}

fn default_slope_tolerance() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub gamma: f64,
    #[serde(with = "super::exponent")]
    pub p: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionConfig {
    pub scheme: SolutionMode,
}

impl Default for SolutionConfig {
    fn default() -> Self {
        Self { scheme: SolutionMode::DiscreteMild }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub data: DataSpec,
    pub time: TimeConfig,
    #[serde(default)]
    pub ladder: LadderConfig,
    pub measure: MeasureConfig,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub solution: SolutionConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn config_err(e: impl std::fmt::Display) -> LabError {
    LabError::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> Result<Grid3> {
        Grid3::new(self.grid.n, self.grid.box_length).map_err(config_err)
    }

    pub fn ball(&self) -> Result<Ball> {
        let grid = self.grid()?;
        Ball::in_grid(self.measure.ball.center.unwrap_or(grid.center()), self.measure.ball.radius, &grid)
            .map_err(config_err)
    }

    /// Checks every field that can be checked without running anything.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.ball()?;
        let t = &self.time;
        if !(t.horizon > 0.0 && t.horizon.is_finite()) {
            return Err(config_err(format!("time.T = {} must be positive", t.horizon)));
        }
        if t.steps == 0 || !t.steps.is_power_of_two() {
            return Err(config_err(format!("time.M = {} must be a power of two", t.steps)));
        }
        let d = &self.measure.dyadic;
        if d.j_min > d.j_max {
            return Err(config_err("measure.dyadic.j_min exceeds j_max"));
        }
        let q = self.measure.mixed_q;
        if !(q > 1.5 && q < 3.0) {
            return Err(config_err(format!("measure.mixed_q = {q} must lie in (3/2, 3)")));
        }
        if !(self.measure.slope_tolerance >= 0.0) {
            return Err(config_err("measure.slope_tolerance must be non-negative"));
        }
        let s = &self.schedule;
        exponent_schedule(s.gamma, s.p, s.sigma).map_err(config_err)?;
        if self.solution.scheme == SolutionMode::Absent {
            return Err(config_err("solution.scheme must be discrete-mild or rk4"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "grid": {"n": 16},
        "data": {"kind": "taylor_green", "amplitude": 0.1},
        "time": {"T": 0.25, "M": 64},
        "measure": {"ball": {"radius": 0.5}},
        "schedule": {"gamma": 0.9, "p": "inf", "sigma": 1.45}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.grid.box_length, 2.0 * PI);
        assert_eq!(c.ladder.k_max, 2);
        assert_eq!(c.measure.dyadic, DyadicConfig { j_min: 2, j_max: 10 });
        assert_eq!(c.schedule.p, f64::INFINITY);
        assert_eq!(c.solution.scheme, SolutionMode::DiscreteMild);
        let again = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn invalid_configs_are_config_errors() {
        for (from, to) in [
            (r#""n": 16"#, r#""n": 12"#),
            (r#""M": 64"#, r#""M": 60"#),
            (r#""T": 0.25"#, r#""T": -1"#),
            (r#""radius": 0.5"#, r#""radius": 9.0"#),
            (r#""sigma": 1.45"#, r#""sigma": 2.0"#),
            (r#""p": "inf""#, r#""p": "big""#),
            (r#""grid""#, r#""grdi""#),
        ] {
            let text = MINIMAL.replace(from, to);
            assert!(matches!(ExperimentConfig::from_json(&text), Err(LabError::Config(_))), "{to}");
        }
    }
}
