use crate::error::{domain, shape, Result};
use crate::spectral::{Grid3, Representation, VectorField};

/// Spectral snapshots on the uniform time grid `t_j = j T / M`, `j = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Grid3,
    horizon: f64,
    snapshots: Vec<VectorField>,
    label: String,
}

impl Trajectory {
    /// Builds a trajectory from `M + 1` spectral snapshots covering `[0, T]`.
    pub fn new(grid: Grid3, horizon: f64, snapshots: Vec<VectorField>, label: impl Into<String>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(domain(format!("horizon {horizon} must be positive")));
        }
        if snapshots.len() < 2 {
            return Err(shape("a trajectory needs at least two nodes"));
        }
        for s in &snapshots {
            if *s.grid() != grid {
                return Err(shape("snapshot grid differs from trajectory grid"));
            }
            if s.representation() != Representation::Spectral {
                return Err(shape("trajectory snapshots must be spectral"));
            }
        }
        Ok(Self { grid, horizon, snapshots, label: label.into() })
    }

    /// Builds a trajectory by evaluating `f` at every node time.
    pub fn from_fn(
        grid: Grid3,
        horizon: f64,
        steps: usize,
        label: impl Into<String>,
        mut f: impl FnMut(f64) -> Result<VectorField>,
    ) -> Result<Self> {
        if steps == 0 {
            return Err(domain("need at least one time step"));
        }
        let dt = horizon / steps as f64;
        let snaps = (0..=steps)
            .map(|j| f(j as f64 * dt).map(|v| v.to_spectral()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, horizon, snaps, label)
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of steps `M`.
    pub fn steps(&self) -> usize {
        self.snapshots.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps() as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.snapshots.len()).map(|j| self.time(j)).collect()
    }

    pub fn snapshot(&self, j: usize) -> &VectorField {
        &self.snapshots[j]
    }

    pub fn snapshots(&self) -> &[VectorField] {
        &self.snapshots
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Node index of time `t`, which must coincide with a node to 1e-9 of a step.
    pub fn node_index(&self, t: f64) -> Result<usize> {
        let x = t / self.dt();
        let j = x.round();
        if (x - j).abs() > 1e-9 || j < 0.0 || j as usize > self.steps() {
            return Err(domain(format!("time {t} is not a node of [0, {}] with M = {}", self.horizon, self.steps())));
        }
        Ok(j as usize)
    }

    pub fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        if self.grid != other.grid {
            return Err(shape("trajectories live on different grids"));
        }
        if self.steps() != other.steps() || (self.horizon - other.horizon).abs() > 1e-12 * self.horizon {
            return Err(shape(format!(
                "time grids differ: (T={}, M={}) vs (T={}, M={})",
                self.horizon,
                self.steps(),
                other.horizon,
                other.steps()
            )));
        }
        Ok(())
    }

    /// Node-wise `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Trajectory) -> Result<Trajectory> {
        self.check_compatible(other)?;
        let snaps = self
            .snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(a, b)| a.axpy(alpha, b))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.grid, self.horizon, snaps, self.label.clone())
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Trajectory> {
        self.axpy(-1.0, other)
    }

    pub fn scaled(&self, alpha: f64) -> Trajectory {
        Trajectory {
            grid: self.grid,
            horizon: self.horizon,
            snapshots: self.snapshots.iter().map(|s| s.scaled(alpha)).collect(),
            label: self.label.clone(),
        }
    }

    /// Largest per-mode divergence error over all nodes.
    pub fn divergence_error(&self) -> f64 {
        self.snapshots.iter().map(|s| s.divergence_error()).fold(0.0, f64::max)
    }

    /// Trajectory truncated to the first `steps` steps.
    pub fn prefix(&self, steps: usize) -> Result<Trajectory> {
        if steps == 0 || steps > self.steps() {
            return Err(domain(format!("prefix of {steps} steps out of range")));
        }
        Trajectory::new(
            self.grid,
            self.time(steps),
            self.snapshots[..=steps].to_vec(),
            self.label.clone(),
        )
    }
}
