//! Trajectory manifests: a JSON document naming one PSLF snapshot per node.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{LabError, Result};
use crate::spectral::{load_snapshot, save_snapshot, Grid3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestGrid {
    pub n: usize,
    #[serde(rename = "L")]
    pub box_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub label: String,
    pub grid: ManifestGrid,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "M")]
    pub steps: usize,
    /// Snapshot paths in time order, relative to the manifest's directory.
    pub snapshots: Vec<String>,
}

/// Writes `<dir>/<stem>_NNNNN.pslf` for every node plus `<dir>/<stem>.json`,
/// returning the manifest path.
pub fn save_trajectory(traj: &Trajectory, dir: impl AsRef<Path>, stem: &str) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let width = traj.steps().to_string().len().max(5);
    let mut names = Vec::with_capacity(traj.steps() + 1);
    for (j, snap) in traj.snapshots().iter().enumerate() {
        let name = format!("{stem}_{j:0width$}.pslf");
        save_snapshot(dir.join(&name), snap, traj.time(j))?;
        names.push(name);
    }
    let manifest = TrajectoryManifest {
        label: traj.label().to_string(),
        grid: ManifestGrid { n: traj.grid().n(), box_length: traj.grid().box_length() },
        horizon: traj.horizon(),
        steps: traj.steps(),
        snapshots: names,
    };
    let path = dir.join(format!("{stem}.json"));
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

/// Reads a manifest and its snapshots; snapshot grids and time tags must
/// match the manifest.
pub fn load_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    let path = path.as_ref();
    let manifest: TrajectoryManifest = serde_json::from_str(&fs::read_to_string(path)?)?;
    if manifest.snapshots.len() != manifest.steps + 1 {
        return Err(LabError::Format(format!(
            "manifest lists {} snapshots for M = {}",
            manifest.snapshots.len(),
            manifest.steps
        )));
    }
    let grid = Grid3::new(manifest.grid.n, manifest.grid.box_length)
        .map_err(|e| LabError::Format(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let dt = manifest.horizon / manifest.steps as f64;
    let mut snaps = Vec::with_capacity(manifest.snapshots.len());
    for (j, name) in manifest.snapshots.iter().enumerate() {
        let s = load_snapshot(base.join(name))?;
        if *s.field.grid() != grid {
            return Err(LabError::Format(format!("snapshot {name} is on a different grid")));
        }
        if (s.time - j as f64 * dt).abs() > 1e-12 * manifest.horizon.max(1.0) {
            return Err(LabError::Format(format!("snapshot {name} has time {} instead of {}", s.time, j as f64 * dt)));
        }
        snaps.push(s.field.to_spectral());
    }
    Trajectory::new(grid, manifest.horizon, snaps, manifest.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::VectorField;

    #[test]
    fn round_trip_through_disk() {
        let g = Grid3::periodic_2pi(4).unwrap();
        let traj = Trajectory::from_fn(g, 0.5, 3, "heat", |t| {
            VectorField::from_fn(g, |[x, y, _]| [0.0, 0.0, (-t).exp() * (x + y).sin()])
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = save_trajectory(&traj, dir.path(), "u").unwrap();
        let back = load_trajectory(&path).unwrap();
        assert_eq!(back, traj);

        let mut m: TrajectoryManifest = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        m.snapshots.swap(0, 1);
        fs::write(&path, serde_json::to_string(&m).unwrap()).unwrap();
        assert!(matches!(load_trajectory(&path), Err(LabError::Format(_))));
    }
}
