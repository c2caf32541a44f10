//! Experiment layer: exponent schedules, rate fits, the heat-tail and
//! local-boundedness diagnostics, and the separation-rate experiment.

mod config;
mod experiment;
mod fit;
mod local;
mod schedule;
mod tail;

pub use config::{
    BallConfig, DyadicConfig, ExperimentConfig, GridConfig, LadderConfig, MeasureConfig, OutputConfig,
    ScheduleConfig, SolutionConfig, TimeConfig,
};
pub use experiment::{
    dyadic_nodes, run_separation_experiment, write_norm_rows, write_report, Checks, EnergySeries, MixedScaling,
    NormRow, RateReport, RateSample, RateSeries,
};
pub use fit::{fit_rate, RateFit, MIN_FIT_SAMPLES};
pub use local::{heat_weighted_profile, picard_local_bounds, LocalBoundRow};
pub use schedule::{exponent_schedule, ExponentSchedule};
pub use tail::{heat_tail_check, heat_tail_check_with, lens_volume, outer_volume, TailSample, DEFAULT_RESOLUTION};

/// Serde adapter for exponents in `[1, ∞]`: infinity is written as `"inf"`
/// and read from `"inf"`, `"infinity"` or a number.
pub mod exponent {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
                other => other.parse().map_err(|_| de::Error::custom(format!("not an exponent: {t}"))),
            },
        }
    }

    pub fn parse(text: &str) -> Option<f64> {
        match text.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Some(f64::INFINITY),
            other => other.parse().ok(),
        }
    }
}
