//! The bilinear Duhamel operator `B(f,g)(t) = ∫_0^t e^{(t-s)Δ} P∇·(f⊗g) ds`
//! and the Picard ladder `P_k = P_0 - B(P_{k-1}, P_{k-1})`.

mod manifest;
mod stepper;
mod stream;
mod trajectory;

pub use manifest::{load_trajectory, save_trajectory, TrajectoryManifest};
pub use stepper::{phi_weights, DuhamelStepper};
pub use stream::{run_ladder, LadderNode, LadderRun, SolutionMode};
pub use trajectory::Trajectory;

pub(crate) use stepper::zero_spectrum;

use crate::error::{domain, LabError, Result};
use crate::spectral::{ModeTables, Spectrum, VectorField};

/// Relative per-mode divergence tolerated in data handed to the ladder.
pub const SOLENOIDAL_TOL: f64 = 1e-10;

pub(crate) fn check_initial_data(u0: &VectorField) -> Result<()> {
    if !u0.is_finite() {
        return Err(LabError::Precondition("initial data contains non-finite values".into()));
    }
    let div = u0.divergence_error();
    if div > SOLENOIDAL_TOL {
        return Err(LabError::Precondition(format!(
            "initial data is not divergence-free (relative error {div:.3e})"
        )));
    }
    let mean = u0.mean();
    let scale = u0.max_mode().max(f64::MIN_POSITIVE);
    if mean.iter().any(|m| m.abs() > 1e-12 * scale.max(1.0)) {
        return Err(LabError::Precondition(format!("initial data has nonzero mean {mean:?}")));
    }
    Ok(())
}

/// `B(f, g)` on the nodes `0..=upto` of the shared time grid.
pub fn bilinear_b(f: &Trajectory, g: &Trajectory, upto: usize) -> Result<Trajectory> {
    f.check_compatible(g)?;
    if upto == 0 || upto > f.steps() {
        return Err(domain(format!("upto = {upto} must lie in 1..={}", f.steps())));
    }
    let same = std::ptr::eq(f, g);
    let grid = *f.grid();
    let tables = ModeTables::new(grid);
    let forcing = |j: usize| -> Result<Spectrum> {
        let fs = f.snapshot(j).spectral()?;
        let gs = if same { None } else { Some(g.snapshot(j).spectral()?) };
        Ok(tables.projected_forcing(fs, gs))
    };
    let b = integrate(&tables, f.dt(), upto, forcing)?;
    let snaps = b
        .into_iter()
        .map(|s| VectorField::from_spectral(grid, s))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(grid, f.time(upto), snaps, format!("B({}, {})", f.label(), g.label()))
}

/// Runs the recurrence for a forcing given node by node.
pub(crate) fn integrate(
    tables: &ModeTables,
    dt: f64,
    upto: usize,
    mut forcing: impl FnMut(usize) -> Result<Spectrum>,
) -> Result<Vec<Spectrum>> {
    let stepper = DuhamelStepper::new(tables, dt);
    let len = tables.grid().len();
    let mut out = Vec::with_capacity(upto + 1);
    out.push(zero_spectrum(len));
    let mut f_old = forcing(0)?;
    for j in 0..upto {
        let f_new = forcing(j + 1)?;
        let next = stepper.step(&out[j], &f_old, &f_new);
        out.push(next);
        f_old = f_new;
    }
    Ok(out)
}

/// `[P_0, …, P_{k_max}]` on `t_j = jT/M`.
pub fn picard_ladder(u0: &VectorField, k_max: usize, horizon: f64, steps: usize) -> Result<Vec<Trajectory>> {
    let grid = *u0.grid();
    let mut snaps: Vec<Vec<VectorField>> = vec![Vec::with_capacity(steps + 1); k_max + 1];
    run_ladder(u0, k_max, horizon, steps, SolutionMode::Absent, |node| {
        for (k, s) in snaps.iter_mut().enumerate() {
            s.push(node.picard(k)?);
        }
        Ok(())
    })?;
    snaps
        .into_iter()
        .enumerate()
        .map(|(k, s)| Trajectory::new(grid, horizon, s, format!("P{k}")))
        .collect()
}

/// `‖(u - P_{k+1}) + [B(w,w) + B(w,P_k) + B(P_k,w)]‖_{L²}` at node
/// `t_index`, where `w = u - P_k`. With `B` carrying `+P∇·(f⊗g)` a mild
/// solution `u = P_0 - B(u,u)` makes the bracket equal `P_{k+1} - u`.
pub fn splitting_residual(u: &Trajectory, picards: &[Trajectory], k: usize, t_index: usize) -> Result<f64> {
    if k + 1 >= picards.len() {
        return Err(domain(format!("k = {k} needs P_{} but the ladder has depth {}", k + 1, picards.len() - 1)));
    }
    if t_index > u.steps() {
        return Err(domain(format!("node {t_index} out of range 0..={}", u.steps())));
    }
    let pk = &picards[k];
    u.check_compatible(pk)?;
    u.check_compatible(&picards[k + 1])?;
    let lhs = u.snapshot(t_index).sub(picards[k + 1].snapshot(t_index))?;
    if t_index == 0 {
        return Ok(lhs.l2_norm());
    }
    let grid = *u.grid();
    let tables = ModeTables::new(grid);
    let forcing = |j: usize| -> Result<Spectrum> {
        let w = u.snapshot(j).sub(pk.snapshot(j))?;
        let ws = w.spectral()?;
        let ps = pk.snapshot(j).spectral()?;
        let a = tables.projected_forcing(ws, None);
        let b = tables.projected_forcing(ws, Some(ps));
        let c = tables.projected_forcing(ps, Some(ws));
        Ok(std::array::from_fn(|i| {
            a[i].iter().zip(&b[i]).zip(&c[i]).map(|((x, y), z)| x + y + z).collect()
        }))
    };
    let b = integrate(&tables, u.dt(), t_index, forcing)?;
    let sum = VectorField::from_spectral(grid, b.into_iter().last().expect("nonempty"))?;
    Ok(lhs.add(&sum)?.l2_norm())
}
