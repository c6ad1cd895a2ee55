//! Initial data generators.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::exponents::compute_exponents;
use crate::error::{Result, SqgError};
use crate::littlewood_paley::DyadicFilterBank;
use crate::spectral::{GridSpec, PhysicalField, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetNorm {
    /// Keep the raw amplitudes `|ξ|^{-β}`.
    Unscaled,
    /// Rescale so that `sup_k 2^{k s₀} ‖θ_k‖_{L²}` equals the value.
    Besov(f64),
    /// Rescale so that `‖θ‖_{L^{p_crit}}` equals the value.
    Lebesgue(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpectrum {
    /// Amplitude decay `|θ̂(ξ)| ∝ |ξ|^{-β}`; `None` picks `β = s₀ + 1`.
    pub slope: Option<f64>,
    /// Radial band `band_lo ≤ |ξ| ≤ band_hi`.
    pub band_lo: f64,
    pub band_hi: f64,
    pub target: TargetNorm,
}

impl Default for RandomSpectrum {
    fn default() -> Self {
        RandomSpectrum {
            slope: None,
            band_lo: 1.0,
            band_hi: 8.0,
            target: TargetNorm::Besov(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialDataSpec {
    /// `sin(x₁)`
    SingleMode,
    /// `sin(x₁) + ½ cos(3x₁) + ¼ sin(5x₁)`
    OneDimensional,
    /// `sin(x₁) + cos(x₂)`
    TwoMode,
    RandomSpectrum(RandomSpectrum),
    Snapshot(PathBuf),
}

impl InitialDataSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            InitialDataSpec::SingleMode => "single_mode",
            InitialDataSpec::OneDimensional => "one_dimensional",
            InitialDataSpec::TwoMode => "two_mode",
            InitialDataSpec::RandomSpectrum(_) => "random_spectrum",
            InitialDataSpec::Snapshot(_) => "snapshot",
        }
    }
}

pub fn generate_initial_data(spec: &InitialDataSpec, grid: GridSpec, alpha: f64, seed: u64) -> Result<SpectralField> {
    match spec {
        InitialDataSpec::SingleMode => Ok(named(grid, &[((1, 0), Complex64::new(0.0, -0.5))])),
        InitialDataSpec::OneDimensional => Ok(named(
            grid,
            &[
                ((1, 0), Complex64::new(0.0, -0.5)),
                ((3, 0), Complex64::new(0.25, 0.0)),
                ((5, 0), Complex64::new(0.0, -0.125)),
            ],
        )),
        InitialDataSpec::TwoMode => Ok(named(
            grid,
            &[((1, 0), Complex64::new(0.0, -0.5)), ((0, 1), Complex64::new(0.5, 0.0))],
        )),
        InitialDataSpec::RandomSpectrum(r) => random_spectrum(r, grid, alpha, seed),
        InitialDataSpec::Snapshot(path) => {
            let snap = crate::io::snapshot::load_snapshot(path)?;
            if snap.theta.grid().n() != grid.n() {
                return Err(SqgError::config(format!(
                    "snapshot {} has n = {}, config has n = {}",
                    path.display(),
                    snap.theta.grid().n(),
                    grid.n()
                )));
            }
            SpectralField::from_coeffs(grid, snap.theta.into_coeffs())
        }
    }
}

fn named(grid: GridSpec, modes: &[((i64, i64), Complex64)]) -> SpectralField {
    SpectralField::from_modes(grid, modes).expect("low modes fit every admissible grid")
}

/// Random phases on the band with amplitudes `|ξ|^{-β}`, made real by
/// conjugate symmetry and rescaled to the target norm.
///
/// Frequencies are visited in an order that does not depend on the grid,
/// so the same seed yields the same field at every resolution that holds
/// the band.
fn random_spectrum(spec: &RandomSpectrum, grid: GridSpec, alpha: f64, seed: u64) -> Result<SpectralField> {
    let exps = compute_exponents(alpha);
    let slope = spec.slope.unwrap_or(exps.s0 + 1.0);
    if !(spec.band_lo > 0.0 && spec.band_lo <= spec.band_hi) {
        return Err(SqgError::config(format!(
            "empty band [{}, {}]",
            spec.band_lo, spec.band_hi
        )));
    }
    let reach = spec.band_hi.floor() as i64;
    if reach > grid.dealias_cutoff() {
        return Err(SqgError::config(format!(
            "band edge {} exceeds the dealiased range {} of n = {}",
            spec.band_hi,
            grid.dealias_cutoff(),
            grid.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    // upper half plane: ξ₂ > 0, or ξ₂ = 0 and ξ₁ > 0
    for xi2 in 0..=reach {
        for xi1 in -reach..=reach {
            if xi2 == 0 && xi1 <= 0 {
                continue;
            }
            let r = ((xi1 * xi1 + xi2 * xi2) as f64).sqrt();
            if r < spec.band_lo || r > spec.band_hi {
                continue;
            }
            let phase: f64 = rng.gen_range(0.0..2.0 * PI);
            modes.push(((xi1, xi2), Complex64::from_polar(r.powf(-slope), phase)));
        }
    }
    if modes.is_empty() {
        return Err(SqgError::config(format!(
            "band [{}, {}] contains no lattice frequency",
            spec.band_lo, spec.band_hi
        )));
    }
    let field = SpectralField::from_modes(grid, &modes)?;
    let current = match spec.target {
        TargetNorm::Unscaled => return Ok(field),
        TargetNorm::Besov(_) => DyadicFilterBank::new(grid).besov_norm_2inf(&field, exps.s0)?,
        TargetNorm::Lebesgue(_) => {
            let p = exps.p_crit.ok_or_else(|| {
                SqgError::config(format!("no critical Lebesgue exponent for alpha = {alpha}"))
            })?;
            field.to_physical().lp_norm(p)?
        }
    };
    let wanted = match spec.target {
        TargetNorm::Besov(v) | TargetNorm::Lebesgue(v) => v,
        TargetNorm::Unscaled => unreachable!(),
    };
    if !(wanted > 0.0) {
        return Err(SqgError::config(format!("target norm must be positive, got {wanted}")));
    }
    Ok(field.scaled(wanted / current))
}

/// Physical-space form of a named profile; used by tests and examples.
pub fn named_profile(spec: &InitialDataSpec, grid: GridSpec) -> Option<PhysicalField> {
    let f: fn(f64, f64) -> f64 = match spec {
        InitialDataSpec::SingleMode => |x1, _| x1.sin(),
        InitialDataSpec::OneDimensional => |x1, _| x1.sin() + 0.5 * (3.0 * x1).cos() + 0.25 * (5.0 * x1).sin(),
        InitialDataSpec::TwoMode => |x1, x2| x1.sin() + x2.cos(),
        _ => return None,
    };
    Some(PhysicalField::from_fn(grid, f))
}
