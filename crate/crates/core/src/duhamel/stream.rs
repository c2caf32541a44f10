//! Node-by-node evaluation of the Picard ladder together with a solution
//! branch, so that long runs never hold whole trajectories in memory.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stepper::{zero_spectrum, DuhamelStepper};
use super::check_initial_data;
use crate::error::{domain, LabError, Result};
use crate::solver::Rk4Stepper;
use crate::spectral::{Grid3, ModeTables, Spectrum, VectorField};

const MAX_IMPLICIT_ITERS: usize = 40;

/// How the solution `u` is carried alongside the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionMode {
    /// Ladder only.
    Absent,
    /// Node-wise fixed point of `u = P_0 - B_h(u,u)` with the same
    /// exponential-trapezoid rule that produces the ladder.
    DiscreteMild,
    /// Integrating-factor RK4.
    Rk4,
}

enum SolutionState {
    Absent,
    /// `B_h(u,u)`; `u = P_0 - bu`.
    Mild { bu: Spectrum, f_old: Spectrum, f_older: Option<Spectrum> },
    Direct { u: Spectrum, stepper: Box<Rk4Stepper> },
}

/// State at one node, handed to the observer.
pub struct LadderNode<'a> {
    grid: Grid3,
    index: usize,
    time: f64,
    p0: &'a Spectrum,
    parts: &'a [Spectrum],
    solution: &'a SolutionState,
}

impl LadderNode<'_> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    pub fn has_solution(&self) -> bool {
        !matches!(self.solution, SolutionState::Absent)
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.depth() {
            return Err(domain(format!("Picard index {k} exceeds ladder depth {}", self.depth())));
        }
        Ok(())
    }

    fn field(&self, s: Spectrum) -> Result<VectorField> {
        VectorField::from_spectral(self.grid, s)
    }

    /// `P_k` at this node.
    pub fn picard(&self, k: usize) -> Result<VectorField> {
        self.check_k(k)?;
        if k == 0 {
            return self.field(self.p0.clone());
        }
        self.field(combine(self.p0, 1.0, &self.parts[k - 1], -1.0))
    }

    /// `B(P_{k-1}, P_{k-1}) = P_0 - P_k` for `k ≥ 1`.
    pub fn duhamel_part(&self, k: usize) -> Result<VectorField> {
        self.check_k(k)?;
        if k == 0 {
            return Err(domain("the Duhamel part is defined for k >= 1"));
        }
        self.field(self.parts[k - 1].clone())
    }

    pub fn solution(&self) -> Result<VectorField> {
        match self.solution {
            SolutionState::Absent => Err(domain("no solution branch in this run")),
            SolutionState::Mild { bu, .. } => self.field(combine(self.p0, 1.0, bu, -1.0)),
            SolutionState::Direct { u, .. } => self.field(u.clone()),
        }
    }

    /// `u - P_k`, formed from the Duhamel parts where possible so that the
    /// leading terms cancel exactly.
    pub fn separation(&self, k: usize) -> Result<VectorField> {
        self.check_k(k)?;
        match self.solution {
            SolutionState::Absent => Err(domain("no solution branch in this run")),
            SolutionState::Mild { bu, .. } => {
                if k == 0 {
                    self.field(bu.clone().map(|c| c.into_iter().map(|v| -v).collect()))
                } else {
                    self.field(combine(&self.parts[k - 1], 1.0, bu, -1.0))
                }
            }
            SolutionState::Direct { u, .. } => {
                let d = combine(u, 1.0, self.p0, -1.0);
                if k == 0 {
                    self.field(d)
                } else {
                    self.field(combine(&d, 1.0, &self.parts[k - 1], 1.0))
                }
            }
        }
    }
}

fn combine(a: &Spectrum, alpha: f64, b: &Spectrum, beta: f64) -> Spectrum {
    std::array::from_fn(|c| a[c].iter().zip(&b[c]).map(|(x, y)| x * alpha + y * beta).collect())
}

fn max_abs(s: &Spectrum) -> f64 {
    s.iter().flatten().fold(0.0, |m, v: &Complex64| m.max(v.norm()))
}

/// Summary of a streamed run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LadderRun {
    pub steps: usize,
    pub horizon: f64,
    pub depth: usize,
    /// Nonlinear evaluations spent on the solution branch.
    pub solution_evaluations: usize,
    /// Largest fixed-point update at acceptance, relative to `max|B(u,u)|`.
    pub max_fixed_point_update: f64,
}

/// Advances `P_0, …, P_{k_max}` (and optionally `u`) over `t_j = jT/M`,
/// calling `observe` at every node including `t = 0`.
pub fn run_ladder(
    u0: &VectorField,
    k_max: usize,
    horizon: f64,
    steps: usize,
    mode: SolutionMode,
    mut observe: impl FnMut(&LadderNode<'_>) -> Result<()>,
) -> Result<LadderRun> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain(format!("horizon {horizon} must be positive")));
    }
    if steps == 0 {
        return Err(domain("need at least one time step"));
    }
    check_initial_data(u0)?;
    let grid = *u0.grid();
    let u0s = u0.to_spectral();
    let u0s = u0s.spectral()?;
    let tables = ModeTables::new(grid);
    let dt = horizon / steps as f64;
    let stepper = DuhamelStepper::new(&tables, dt);
    let len = grid.len();

    let heat = |t: f64| -> Spectrum {
        let mut s = u0s.clone();
        tables.heat_in_place(&mut s, t);
        s
    };

    let mut p0 = heat(0.0);
    let mut parts: Vec<Spectrum> = vec![zero_spectrum(len); k_max];
    // forcing P∇·(P_{k-1}⊗P_{k-1}) at the current node, per level
    let mut f_old: Vec<Spectrum> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let pk1 = if k == 1 { p0.clone() } else { combine(&p0, 1.0, &parts[k - 2], -1.0) };
        f_old.push(tables.projected_forcing(&pk1, None));
    }
    let mut run = LadderRun { steps, horizon, depth: k_max, ..Default::default() };

    let mut solution = match mode {
        SolutionMode::Absent => SolutionState::Absent,
        SolutionMode::DiscreteMild => {
            run.solution_evaluations += 1;
            SolutionState::Mild {
                bu: zero_spectrum(len),
                f_old: tables.projected_forcing(&p0, None),
                f_older: None,
            }
        }
        SolutionMode::Rk4 => SolutionState::Direct {
            u: p0.clone(),
            stepper: Box::new(Rk4Stepper::new(tables.clone(), dt, u0)?),
        },
    };

    observe(&LadderNode { grid, index: 0, time: 0.0, p0: &p0, parts: &parts, solution: &solution })?;

    for j in 0..steps {
        let t_new = (j + 1) as f64 * dt;
        let p0_new = heat(t_new);

        for k in 1..=k_max {
            let pk1 = if k == 1 { p0_new.clone() } else { combine(&p0_new, 1.0, &parts[k - 2], -1.0) };
            let f_new = tables.projected_forcing(&pk1, None);
            parts[k - 1] = stepper.step(&parts[k - 1], &f_old[k - 1], &f_new);
            f_old[k - 1] = f_new;
        }

        match &mut solution {
            SolutionState::Absent => {}
            SolutionState::Mild { bu, f_old: fu_old, f_older } => {
                let explicit = stepper.explicit_part(bu, fu_old);
                let mut guess = match f_older {
                    Some(older) => combine(fu_old, 2.0, older, -1.0),
                    None => fu_old.clone(),
                };
                let mut accepted = None;
                let mut last_update = f64::INFINITY;
                for _ in 0..MAX_IMPLICIT_ITERS {
                    let b_new = stepper.complete(&explicit, &guess);
                    let u_new = combine(&p0_new, 1.0, &b_new, -1.0);
                    let f_new = tables.projected_forcing(&u_new, None);
                    run.solution_evaluations += 1;
                    if !f_new.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite()) {
                        return Err(LabError::Stability { time: t_new, reason: "non-finite nonlinear term".into() });
                    }
                    let b_next = stepper.complete(&explicit, &f_new);
                    let update = max_abs(&combine(&b_next, 1.0, &b_new, -1.0));
                    let scale = max_abs(&b_next).max(f64::MIN_POSITIVE);
                    let rel = update / scale;
                    // below 1% of an ulp of u nothing further is resolvable, even when
                    // B itself is pure rounding (exact solutions such as Taylor-Green)
                    let floor = 0.01 * f64::EPSILON * max_abs(&p0_new);
                    guess = f_new;
                    if rel <= 1e-15 || update <= floor || (rel <= 1e-12 && update >= 0.5 * last_update) {
                        run.max_fixed_point_update = run.max_fixed_point_update.max(rel);
                        accepted = Some(b_next);
                        break;
                    }
                    last_update = update;
                }
                let Some(b_next) = accepted else {
                    return Err(LabError::Stability {
                        time: t_new,
                        reason: "implicit Duhamel iteration did not converge".into(),
                    });
                };
                *bu = b_next;
                *f_older = Some(std::mem::replace(fu_old, guess));
            }
            SolutionState::Direct { u, stepper: rk } => {
                *u = rk.step(u, t_new - dt)?;
                run.solution_evaluations += 4;
            }
        }
        p0 = p0_new;
        observe(&LadderNode { grid, index: j + 1, time: t_new, p0: &p0, parts: &parts, solution: &solution })?;
    }
    Ok(run)
}
