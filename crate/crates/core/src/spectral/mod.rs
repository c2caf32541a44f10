//! Periodic-grid vector fields and the exact mode-wise operators acting on
//! them.

pub mod fft;
mod field;
mod grid;
mod ops;
mod oseen;
pub mod snapshot;

pub use field::{Representation, VectorField};
pub use grid::{Ball, Grid3, Region};
pub use ops::{curl, divergence, gradient, heat_semigroup, leray_project, nonlinear_divergence, ModeTables};
pub(crate) use ops::Spectrum;
pub use oseen::{oseen_kernel, oseen_kernel_ratio, OseenKernel};
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot, Snapshot};
