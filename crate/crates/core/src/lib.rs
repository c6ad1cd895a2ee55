//! Pseudo-spectral solver for the dissipative surface quasi-geostrophic
//! equation `θ_t + κ(−Δ)^α θ + J(θ)·∇θ = 0` on the periodic square, with a
//! Littlewood-Paley toolkit and numerical checks of the a priori estimates
//! satisfied by its solutions.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod evolution;
mod fft;
pub mod io;
pub mod littlewood_paley;
pub mod spectral;
pub mod verify;

pub use diagnostics::{compute_exponents, ExponentSet, InequalityReport, NormSeries, Regime};
pub use error::{Result, SqgError};
pub use evolution::{run, step, DtPolicy, SimConfig, Snapshot};
pub use littlewood_paley::{DyadicFilterBank, Paraproduct, ShellDecomposition};
pub use spectral::{geostrophic_velocity, Axis, GridSpec, PhysicalField, SpectralField, VelocityField};
