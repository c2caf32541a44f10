use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Slack used when comparing `k·step + a₀` with `σ`.
const REACH_TOL: f64 = 1e-12;

/// Decay exponents `a₀ < a₁ < … < a_{k₀} = σ` for `‖u - P_k‖` near `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSchedule {
    pub gamma: f64,
    /// Local integrability exponent, possibly infinite.
    #[serde(with = "super::exponent")]
    pub p_exp: f64,
    pub sigma: f64,
    /// `1/2 - 3/(2p)`.
    pub step: f64,
    /// `a₀ … a_{k₀}` from `a_{k+1} = min{σ, a_k + step}`.
    pub a: Vec<f64>,
    pub k0: usize,
    /// `a₁ … a_{k₀}` from the alternative form `a_{k+1} = min{σ, k·step + a₀}`,
    /// kept for comparison.
    pub statement_form: Vec<f64>,
}

impl ExponentSchedule {
    /// `a_k`, or `σ` past the end of the ladder.
    pub fn a_k(&self, k: usize) -> f64 {
        self.a.get(k).copied().unwrap_or(self.sigma)
    }

    /// `a_{-1} = -3/(2p)`, the exponent of `‖P₀‖_{L^∞}` itself.
    pub fn a_minus_one(&self) -> f64 {
        if self.p_exp.is_infinite() {
            0.0
        } else {
            -1.5 / self.p_exp
        }
    }
}

pub fn exponent_schedule(gamma: f64, p_exp: f64, sigma: f64) -> Result<ExponentSchedule> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(domain(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    if !(p_exp > 3.0) {
        return Err(domain(format!("p must exceed 3, got {p_exp}")));
    }
    if !(sigma > 0.0 && sigma < 1.5) {
        return Err(domain(format!("sigma must lie in (0, 3/2), got {sigma}")));
    }
    let step = 0.5 - 1.5 / p_exp;
    let a0 = (gamma / 2.0).min(step);
    let mut a = Vec::new();
    let mut k = 0usize;
    loop {
        let v = k as f64 * step + a0;
        if v >= sigma - REACH_TOL {
            a.push(sigma);
            break;
        }
        a.push(v);
        k += 1;
    }
    let k0 = a.len() - 1;
    let statement_form = (0..k0).map(|k| (k as f64 * step + a0).min(sigma)).collect();
    Ok(ExponentSchedule { gamma, p_exp, sigma, step, a, k0, statement_form })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let s = exponent_schedule(0.5, f64::INFINITY, 1.4).unwrap();
        assert_eq!(s.a, vec![0.25, 0.75, 1.25, 1.4]);
        assert_eq!(s.k0, 3);
        let s = exponent_schedule(0.8, 6.0, 1.0).unwrap();
        assert_eq!(s.step, 0.25);
        assert_eq!(s.a, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(s.k0, 3);
        let s = exponent_schedule(0.9, f64::INFINITY, 0.2).unwrap();
        assert_eq!(s.a, vec![0.2]);
        assert_eq!(s.k0, 0);
        assert!(s.statement_form.is_empty());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(exponent_schedule(0.0, 6.0, 1.0).is_err());
        assert!(exponent_schedule(1.0, 6.0, 1.0).is_err());
        assert!(exponent_schedule(0.5, 3.0, 1.0).is_err());
        assert!(exponent_schedule(0.5, 6.0, 1.5).is_err());
        assert!(exponent_schedule(0.5, 6.0, 0.0).is_err());
        assert!(exponent_schedule(0.5, f64::NAN, 1.0).is_err());
    }
}
