//! Pseudo-spectral Navier–Stokes laboratory: mild solutions, Picard iterates,
//! Lorentz/Kato/mixed norms and short-time rate measurement on a periodic box.

pub mod data;
pub mod duhamel;
pub mod error;
pub mod lab;
pub mod norms;
pub mod solver;
pub mod spectral;

pub use error::{LabError, Result};
