//! Exponent algebra, norm time series and numerical checks of the a priori
//! estimates.

pub mod checks;
pub mod exponents;
pub mod lemma;
pub mod report;
pub mod scaling;
pub mod series;

pub use checks::{
    besov_functional_j, constant_stability, energy_ledger, max_principle_check, shell_inequality_check,
};
pub use exponents::{check_uniqueness_exponents, compute_exponents, ExponentSet, Regime, UniquenessCheck};
pub use lemma::{lemma1_constant, lemma1_ensemble};
pub use report::{InequalityReport, Sample, Status};
pub use scaling::scaling_symmetry_check;
pub use series::{NormRecord, NormSeries, NormSampler};
