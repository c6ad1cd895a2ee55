//! Check of the scaling symmetry `θ^λ(t, x) = λ^{2α−1} θ(λ^{2α} t, λx)`.

use crate::diagnostics::report::{InequalityReport, Sample};
use crate::error::{Result, SqgError};
use crate::evolution::{cfl_dt, run_from, DtPolicy, RunOptions, SimConfig};
use crate::spectral::SpectralField;

pub const SCALING_TOL: f64 = 1e-6;

/// Largest `max(|ξ₁|, |ξ₂|)` whose coefficient exceeds `rel · max|c|`.
fn effective_bandwidth(f: &SpectralField, rel: f64) -> i64 {
    let thresh = rel * f.max_abs_coeff();
    f.grid()
        .frequencies()
        .filter(|&(i, _, _)| f.coeffs()[i].norm() > thresh)
        .map(|(_, a, b)| a.abs().max(b.abs()))
        .max()
        .unwrap_or(0)
}

/// `θ ↦ λ^{2α−1} θ(λ·)`: the coefficient at `λξ` becomes `λ^{2α−1} θ̂(ξ)`.
/// Round-off coefficients below `1e-14 · max|θ̂|` are dropped.
pub fn rescale_field(theta: &SpectralField, lam: usize, alpha: f64) -> Result<SpectralField> {
    if lam == 1 {
        return Ok(theta.clone());
    }
    let grid = *theta.grid();
    let amp = (lam as f64).powf(2.0 * alpha - 1.0);
    let l = lam as i64;
    let thresh = 1e-14 * theta.max_abs_coeff();
    let mut out = SpectralField::zeros(grid);
    for (i, a, b) in grid.frequencies() {
        let c = theta.coeffs()[i];
        if c.norm() <= thresh {
            continue;
        }
        let j = grid.flat_index(l * a, l * b).ok_or_else(|| {
            SqgError::config(format!("mode ({a}, {b}) scaled by {lam} leaves the n = {} grid", grid.n()))
        })?;
        out.coeffs_mut()[j] = c * amp;
    }
    Ok(out)
}

/// Runs `θ` from `θ₀` to `T = cfg.t_end` and `θ̃` from `λ^{2α−1}θ₀(λ·)` to
/// `T/λ^{2α}` with steps shrunk by `λ^{2α}`, then measures
/// `max_ξ |θ̃̂(T/λ^{2α}, λξ) − λ^{2α−1} θ̂(T, ξ)| / max_ξ |λ^{2α−1} θ̂(T, ξ)|`
/// together with the largest coefficient of `θ̃` off the lattice `λℤ²`.
///
/// Errors when `λ` times the bandwidth of `θ₀` leaves the dealiased range.
pub fn scaling_symmetry_check(theta0: &SpectralField, lam: usize, cfg: &SimConfig) -> Result<InequalityReport> {
    if lam == 0 {
        return Err(SqgError::config("scaling factor must be a positive integer"));
    }
    cfg.validate()?;
    let alpha = cfg.alpha;
    let band = effective_bandwidth(theta0, 1e-14);
    if band * lam as i64 > cfg.grid.dealias_cutoff() {
        return Err(SqgError::config(format!(
            "rescaled data reaches |xi| = {} beyond the dealiased range {} of n = {}: under-resolved",
            band * lam as i64,
            cfg.grid.dealias_cutoff(),
            cfg.grid.n()
        )));
    }
    let time_factor = (lam as f64).powf(2.0 * alpha);
    let dt = match cfg.dt_policy {
        DtPolicy::Fixed(dt) => dt,
        DtPolicy::Cfl => 0.5 * cfl_dt(theta0, cfg),
    };
    let base = SimConfig {
        dt_policy: DtPolicy::Fixed(dt),
        ..cfg.clone()
    };
    let scaled_cfg = SimConfig {
        t_end: cfg.t_end / time_factor,
        dt_policy: DtPolicy::Fixed(dt / time_factor),
        ..cfg.clone()
    };
    let opts = RunOptions::default();
    let theta_scaled0 = rescale_field(theta0, lam, alpha)?;
    let (a, b) = rayon::join(
        || run_from(&base, theta0.clone(), &opts),
        || run_from(&scaled_cfg, theta_scaled0, &opts),
    );
    let (theta_t, scaled_t) = (a?.final_state.theta, b?.final_state.theta);

    let amp = (lam as f64).powf(2.0 * alpha - 1.0);
    let grid = cfg.grid;
    let l = lam as i64;
    let reference = theta_t.max_abs_coeff() * amp;
    let mut worst = 0.0f64;
    let mut compared = vec![false; grid.len()];
    for (i, a, b) in grid.frequencies() {
        if let Some(j) = grid.flat_index(l * a, l * b) {
            if (l * a, l * b) == (a, b) || !compared[j] {
                compared[j] = true;
                worst = worst.max((scaled_t.coeffs()[j] - theta_t.coeffs()[i] * amp).norm());
            }
        }
    }
    let off_lattice = grid
        .frequencies()
        .filter(|&(i, _, _)| !compared[i])
        .map(|(i, _, _)| scaled_t.coeffs()[i].norm())
        .fold(0.0, f64::max);
    let residual = if reference > 0.0 { worst.max(off_lattice) / reference } else { worst.max(off_lattice) };

    let mut rep = InequalityReport::new(format!("scaling_symmetry_lambda{lam}"))
        .param("alpha", alpha)
        .param("kappa", cfg.kappa)
        .param("lambda", lam)
        .param("n", grid.n())
        .param("t_end", cfg.t_end)
        .param("dt", dt)
        .param("tol", SCALING_TOL);
    rep.samples.push(Sample::new(cfg.t_end, None, worst.max(off_lattice), reference));
    rep.note(format!("off-lattice magnitude {off_lattice:.3e}"));
    rep.measured_constant = residual;
    rep.set_outcome(residual <= SCALING_TOL);
    Ok(rep)
}
