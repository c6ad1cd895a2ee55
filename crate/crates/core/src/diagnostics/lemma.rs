//! Measured constant of the shell nonlinearity estimate
//! `|∫ P_kψ_k [J(ψ)·∇ψ] dx| ≤ C_s 2^{k(1−s)} ‖ψ_k‖_{L^p} (Σ_{l≥k−3} 2^{−s(l−k)} ‖Λ^s ψ_l‖_{L²}) ‖ψ‖_{L^q}`.

use rayon::prelude::*;

use crate::diagnostics::exponents::compute_exponents;
use crate::diagnostics::report::{InequalityReport, Sample};
use crate::error::{Result, SqgError};
use crate::io::initial::{generate_initial_data, InitialDataSpec, RandomSpectrum};
use crate::littlewood_paley::{check_lemma_exponents, DyadicFilterBank};
use crate::spectral::{geostrophic_velocity, Axis, GridSpec, SpectralField};

/// Fields with `‖ψ‖³_{L²}` below this (times the bound side) are not samples.
pub const LEMMA_FLOOR: f64 = 1e-10;

/// `|∫ P_k P_k ψ · J(ψ)·∇ψ dx|`, with the product formed on a grid of
/// twice the resolution so no frequency folds back.
pub fn lemma1_lhs(psi: &SpectralField, k: i32, bank: &DyadicFilterBank) -> Result<f64> {
    let fine = psi.grid().refined(2)?;
    let p = psi.resample(fine);
    let u = geostrophic_velocity(&p);
    let (u1, u2) = SpectralField::to_physical_pair(&u.u1, &u.u2)?;
    let (g1, g2) = SpectralField::to_physical_pair(&p.derivative(Axis::X1), &p.derivative(Axis::X2))?;
    let mut prod = u1.mul(&g1)?;
    prod.add_assign_product(&u2, &g2);
    let shell = bank.project_shell(&bank.project_shell(psi, k)?, k)?.resample(fine);
    Ok(shell.inner(&prod.to_spectral())?.abs())
}

/// Ratio of the two sides for one field and shell; `Ok(None)` when the
/// bound side is below `LEMMA_FLOOR · ‖ψ‖³_{L²}`.
pub fn lemma1_constant(
    psi: &SpectralField,
    k: i32,
    s: f64,
    p: f64,
    q: f64,
    bank: &DyadicFilterBank,
) -> Result<Option<f64>> {
    Ok(lemma1_sample(psi, k, s, p, q, bank)?.and_then(|smp| smp.ratio))
}

fn lemma1_sample(
    psi: &SpectralField,
    k: i32,
    s: f64,
    p: f64,
    q: f64,
    bank: &DyadicFilterBank,
) -> Result<Option<Sample>> {
    check_lemma_exponents(s, p, q)?;
    let rhs = bank.nonlinear_shell_bound_rhs(psi, k, s, p, q)?;
    let scale = psi.l2_norm().powi(3);
    if !(rhs > LEMMA_FLOOR * scale) {
        return Ok(None);
    }
    let lhs = lemma1_lhs(psi, k, bank)?;
    Ok(Some(Sample::new(0.0, Some(k), lhs, rhs)))
}

/// Lemma-constant measurement over `count` random fields on an `n` grid,
/// using `(s, p, q) = (s₀, lemma_p, lemma_q)` of `alpha`. The fields are
/// band-limited to `1 ≤ |ξ| ≤ band_fraction · n` and drawn from seeds
/// `seed, seed + 1, …`; every shell of every field is a candidate sample.
pub fn lemma1_ensemble(alpha: f64, n: usize, count: usize, seed: u64, band_fraction: f64) -> Result<InequalityReport> {
    let ex = compute_exponents(alpha);
    let (Some(p), Some(q)) = (ex.lemma_p, ex.lemma_q) else {
        return Err(SqgError::config(format!("no shell-estimate exponents for alpha = {alpha}")));
    };
    let grid = GridSpec::new(n)?;
    let bank = DyadicFilterBank::new(grid);
    let spec = InitialDataSpec::RandomSpectrum(RandomSpectrum {
        band_hi: band_fraction * n as f64,
        ..RandomSpectrum::default()
    });
    let per_field: Vec<(Vec<Sample>, usize)> = (0..count as u64)
        .into_par_iter()
        .map(|i| -> Result<(Vec<Sample>, usize)> {
            let psi = generate_initial_data(&spec, grid, alpha, seed + i)?;
            let mut out = Vec::new();
            let mut skipped = 0;
            for k in bank.shell_indices() {
                match lemma1_sample(&psi, k, ex.s0, p, q, &bank)? {
                    Some(mut smp) => {
                        smp.t = i as f64;
                        out.push(smp);
                    }
                    None => skipped += 1,
                }
            }
            Ok((out, skipped))
        })
        .collect::<Result<_>>()?;
    let mut rep = InequalityReport::new(format!("lemma1_constant_n{n}"))
        .param("alpha", alpha)
        .param("n", n)
        .param("s", ex.s0)
        .param("p", p)
        .param("q", q)
        .param("count", count)
        .param("band_hi", band_fraction * n as f64);
    rep.note("sample t holds the ensemble member index");
    for (samples, skipped) in per_field {
        rep.samples.extend(samples);
        rep.skipped += skipped;
    }
    match rep.max_ratio() {
        Some(c) => {
            rep.measured_constant = c;
            rep.set_outcome(c.is_finite());
        }
        None => rep.mark_incomplete("no shell passed the floor"),
    }
    Ok(rep)
}
