//! Time integration of the mild Navier–Stokes solution and the residual
//! checks that certify it.

use serde::{Deserialize, Serialize};

use crate::duhamel::{bilinear_b, check_initial_data, run_ladder, SolutionMode, Trajectory};
use crate::error::{domain, LabError, Result};
use crate::spectral::{heat_semigroup, ModeTables, Spectrum, VectorField};

/// Growth of `‖u‖_∞` over its initial value that trips the stability guard.
pub const GROWTH_LIMIT: f64 = 10.0;

/// Integrating-factor RK4 (Lawson) for `u_t = Δu - P∇·(u⊗u)`.
#[derive(Debug, Clone)]
pub struct Rk4Stepper {
    tables: ModeTables,
    dt: f64,
    half: Vec<f64>,
    full: Vec<f64>,
    sup0: f64,
}

fn scale_modes(s: &Spectrum, factor: &[f64]) -> Spectrum {
    std::array::from_fn(|c| s[c].iter().zip(factor).map(|(v, f)| v * f).collect())
}

fn axpy(a: &Spectrum, alpha: f64, b: &Spectrum) -> Spectrum {
    std::array::from_fn(|c| a[c].iter().zip(&b[c]).map(|(x, y)| x + y * alpha).collect())
}

impl Rk4Stepper {
    pub fn new(tables: ModeTables, dt: f64, u0: &VectorField) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(domain(format!("time step {dt} must be positive")));
        }
        let half = tables.ksq().iter().map(|k| (-k * dt / 2.0).exp()).collect();
        let full = tables.ksq().iter().map(|k| (-k * dt).exp()).collect();
        let sup0 = sup_norm(u0);
        Ok(Self { tables, dt, half, full, sup0 })
    }

    fn rhs(&self, u: &Spectrum) -> Spectrum {
        let f = self.tables.projected_forcing(u, None);
        f.map(|c| c.into_iter().map(|v| -v).collect())
    }

    /// Advances `u` from time `t` by one step, checking the growth guard.
    pub(crate) fn step(&self, u: &Spectrum, t: f64) -> Result<Spectrum> {
        let h = self.dt;
        let k1 = self.rhs(u);
        let k2 = self.rhs(&scale_modes(&axpy(u, h / 2.0, &k1), &self.half));
        let eu_half = scale_modes(u, &self.half);
        let k3 = self.rhs(&axpy(&eu_half, h / 2.0, &k2));
        let eu_full = scale_modes(u, &self.full);
        let k4 = self.rhs(&axpy(&eu_full, h, &scale_modes(&k3, &self.half)));
        let mid: Spectrum = std::array::from_fn(|c| k2[c].iter().zip(&k3[c]).map(|(a, b)| a + b).collect());
        let mut next = axpy(&eu_full, h / 6.0, &scale_modes(&k1, &self.full));
        next = axpy(&next, h / 3.0, &scale_modes(&mid, &self.half));
        next = axpy(&next, h / 6.0, &k4);

        let t_new = t + h;
        if !next.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(LabError::Stability { time: t_new, reason: "non-finite values".into() });
        }
        let field = VectorField::from_spectral(*self.tables.grid(), next)?;
        let sup = sup_norm(&field);
        if sup > GROWTH_LIMIT * self.sup0 && sup > 0.0 {
            return Err(LabError::Stability {
                time: t_new,
                reason: format!("sup norm {sup:.3e} exceeds {GROWTH_LIMIT}x its initial value {:.3e}", self.sup0),
            });
        }
        field.into_spectral_parts()
    }
}

fn sup_norm(f: &VectorField) -> f64 {
    f.to_physical().magnitudes().into_iter().fold(0.0, f64::max)
}

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 || !steps.is_power_of_two() {
        return Err(domain(format!("M = {steps} must be a power of two")));
    }
    Ok(())
}

/// Integrating-factor RK4 solution on `t_j = jT/M`.
pub fn evolve(u0: &VectorField, horizon: f64, steps: usize) -> Result<Trajectory> {
    check_steps(steps)?;
    collect_solution(u0, horizon, steps, SolutionMode::Rk4)
}

/// Discrete mild solution: at every node `u = P_0 - B_h(u,u)` holds to
/// rounding, with `B_h` the exponential-trapezoid rule used for the ladder.
pub fn evolve_mild(u0: &VectorField, horizon: f64, steps: usize) -> Result<Trajectory> {
    check_steps(steps)?;
    collect_solution(u0, horizon, steps, SolutionMode::DiscreteMild)
}

fn collect_solution(u0: &VectorField, horizon: f64, steps: usize, mode: SolutionMode) -> Result<Trajectory> {
    check_initial_data(u0)?;
    let mut snaps = Vec::with_capacity(steps + 1);
    run_ladder(u0, 0, horizon, steps, mode, |node| {
        snaps.push(node.solution()?);
        Ok(())
    })?;
    Trajectory::new(*u0.grid(), horizon, snaps, "u")
}

/// `max_j ‖u(t_j) - P_0(t_j) + B(u,u)(t_j)‖_{L²}` with `P_0` built from `u(0)`.
pub fn mild_residual(u: &Trajectory) -> Result<f64> {
    let b = bilinear_b(u, u, u.steps())?;
    let u0 = u.snapshot(0);
    let mut worst = 0.0f64;
    for j in 0..=u.steps() {
        let p0 = heat_semigroup(u0, u.time(j))?;
        let r = u.snapshot(j).sub(&p0)?.add(b.snapshot(j))?;
        worst = worst.max(r.l2_norm());
    }
    Ok(worst)
}

/// Error estimates from a run at `M` steps against one at `2M`.
#[derive(Debug, Clone)]
pub struct SelfConvergence {
    /// The `M`-step solution.
    pub coarse: Trajectory,
    /// `max ‖u_M - u_{2M}‖_{L²}` over common nodes.
    pub stepper: f64,
    /// `max ‖B_M(u,u) - B_{2M}(u,u)‖_{L²}` over common nodes, both built
    /// from the `2M` solution.
    pub quadrature: f64,
}

impl SelfConvergence {
    pub fn combined(&self) -> f64 {
        self.stepper + self.quadrature
    }
}

pub fn self_convergence(u0: &VectorField, horizon: f64, steps: usize) -> Result<SelfConvergence> {
    let coarse = evolve(u0, horizon, steps)?;
    let fine = evolve(u0, horizon, 2 * steps)?;
    let sub = Trajectory::new(
        *u0.grid(),
        horizon,
        (0..=steps).map(|j| fine.snapshot(2 * j).clone()).collect(),
        "u_2M",
    )?;
    let b_coarse = bilinear_b(&sub, &sub, steps)?;
    let b_fine = bilinear_b(&fine, &fine, 2 * steps)?;
    let mut stepper = 0.0f64;
    let mut quadrature = 0.0f64;
    for j in 0..=steps {
        stepper = stepper.max(coarse.snapshot(j).sub(sub.snapshot(j))?.l2_norm());
        quadrature = quadrature.max(b_coarse.snapshot(j).sub(b_fine.snapshot(2 * j))?.l2_norm());
    }
    Ok(SelfConvergence { coarse, stepper, quadrature })
}

/// `E(t) = sup_{s ≤ t} ‖w‖_{L²}(s)` and `D(t) = (∫_0^t ‖∇w‖²_{L²})^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub sup_l2: f64,
    pub dissipation: f64,
}

/// Running accumulator for [`EnergySample`] over uniformly spaced nodes.
#[derive(Debug, Clone, Default)]
pub struct EnergyAccumulator {
    running_max: f64,
    integral: f64,
    last: Option<(f64, f64)>,
}

impl EnergyAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the node at time `t` and returns the sample there.
    pub fn push(&mut self, t: f64, w: &VectorField) -> EnergySample {
        let l2 = w.l2_norm();
        let g = w.gradient_l2_norm();
        self.running_max = self.running_max.max(l2);
        if let Some((t_prev, g_prev)) = self.last {
            self.integral += 0.5 * (t - t_prev) * (g_prev * g_prev + g * g);
        }
        self.last = Some((t, g));
        EnergySample { t, sup_l2: self.running_max, dissipation: self.integral.sqrt() }
    }
}

/// Energy samples of `u - P_k` at the requested node times.
pub fn energy_decay_samples(u: &Trajectory, picards: &[Trajectory], k: usize, times: &[f64]) -> Result<Vec<EnergySample>> {
    let pk = picards
        .get(k)
        .ok_or_else(|| domain(format!("k = {k} exceeds the ladder depth {}", picards.len().saturating_sub(1))))?;
    u.check_compatible(pk)?;
    let wanted = times.iter().map(|&t| u.node_index(t)).collect::<Result<Vec<_>>>()?;
    let last = wanted.iter().copied().max().unwrap_or(0);
    let mut acc = EnergyAccumulator::new();
    let mut at_node = Vec::with_capacity(last + 1);
    for j in 0..=last {
        let w = u.snapshot(j).sub(pk.snapshot(j))?;
        at_node.push(acc.push(u.time(j), &w));
    }
    Ok(wanted.into_iter().map(|j| at_node[j]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid3;

    #[test]
    fn step_count_must_be_power_of_two() {
        let g = Grid3::periodic_2pi(8).unwrap();
        let z = VectorField::zeros_spectral(g);
        assert!(evolve(&z, 1.0, 12).is_err());
        assert!(evolve(&z, 1.0, 0).is_err());
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = Grid3::periodic_2pi(8).unwrap();
        let z = VectorField::zeros_spectral(g);
        let u = evolve(&z, 0.5, 8).unwrap();
        assert!(u.snapshots().iter().all(|s| s.max_mode() == 0.0));
        assert_eq!(mild_residual(&u).unwrap(), 0.0);
    }

    #[test]
    fn running_sup_is_monotone() {
        let g = Grid3::periodic_2pi(8).unwrap();
        let mut acc = EnergyAccumulator::new();
        let mut prev = 0.0;
        for (j, a) in [0.0, 2.0, 1.0, 3.0, 0.5].iter().enumerate() {
            let f = VectorField::from_fn(g, |[_, y, _]| [a * y.sin(), 0.0, 0.0]).unwrap();
            let s = acc.push(j as f64 * 0.1, &f);
            assert!(s.sup_l2 >= prev);
            prev = s.sup_l2;
        }
    }
}
