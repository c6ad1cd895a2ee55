//! Dyadic frequency shells on the periodic grid.
//!
//! `χ` is a smooth radial cutoff equal to one on `|ξ| ≤ 1` and vanishing on
//! `|ξ| ≥ 2`; the shell bump is `φ(ξ) = χ(ξ) − χ(2ξ)` and the shell
//! projection is `P_k = φ(2^{-k}·)`. On the integer lattice every nonzero
//! frequency has `|ξ| ≥ 1`, so shells with `k < 0` are identically zero and
//! the bank starts at `k = 0`.

use crate::error::{Result, SqgError};
use crate::spectral::{GridSpec, PhysicalField, SpectralField};

#[inline]
fn smooth_step(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Radial cutoff profile: 1 on `[0, 1]`, 0 on `[2, ∞)`, `C^∞` in between.
pub fn chi(r: f64) -> f64 {
    let r = r.abs();
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let a = smooth_step(2.0 - r);
    a / (a + smooth_step(r - 1.0))
}

/// Shell bump `φ(r) = χ(r) − χ(2r)`, supported in `1/2 < r < 2`.
pub fn phi(r: f64) -> f64 {
    chi(r) - chi(2.0 * r)
}

#[inline]
fn dyadic(k: i32) -> f64 {
    2f64.powi(k)
}

/// Precomputed shell multipliers `φ(2^{-k}ξ)` on every grid frequency.
#[derive(Debug, Clone)]
pub struct DyadicFilterBank {
    grid: GridSpec,
    k_min: i32,
    k_max: i32,
    magnitudes: Vec<f64>,
    shells: Vec<Vec<f64>>,
}

impl DyadicFilterBank {
    /// Shells `0..=log₂ n`. The top shell reaches `|ξ| = n`, which covers the
    /// grid corners at `|ξ| = n/√2`, so the shells partition every nonzero
    /// grid frequency.
    pub fn new(grid: GridSpec) -> Self {
        let k_min = 0;
        let k_max = grid.n().trailing_zeros() as i32;
        let magnitudes: Vec<f64> = grid
            .frequencies()
            .map(|(_, a, b)| ((a * a + b * b) as f64).sqrt())
            .collect();
        let shells = (k_min..=k_max)
            .map(|k| {
                let scale = dyadic(-k);
                magnitudes
                    .iter()
                    .map(|&r| if r == 0.0 { 0.0 } else { phi(scale * r) })
                    .collect()
            })
            .collect();
        DyadicFilterBank {
            grid,
            k_min,
            k_max,
            magnitudes,
            shells,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn k_min(&self) -> i32 {
        self.k_min
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    pub fn shell_indices(&self) -> std::ops::RangeInclusive<i32> {
        self.k_min..=self.k_max
    }

    pub fn num_shells(&self) -> usize {
        self.shells.len()
    }

    pub fn contains(&self, k: i32) -> bool {
        (self.k_min..=self.k_max).contains(&k)
    }

    /// Multiplier table of shell `k`, or `None` outside the bank.
    pub fn shell_multiplier(&self, k: i32) -> Option<&[f64]> {
        if self.contains(k) {
            Some(&self.shells[(k - self.k_min) as usize])
        } else {
            None
        }
    }

    /// `max_ξ |Σ_k φ(2^{-k}ξ) − 1|` over nonzero frequencies with `|ξ| ≤ 2^{k_max}`.
    pub fn partition_residual(&self) -> f64 {
        let top = dyadic(self.k_max);
        (0..self.grid.len())
            .filter(|&i| self.magnitudes[i] > 0.0 && self.magnitudes[i] <= top)
            .map(|i| (self.shells.iter().map(|s| s[i]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn check_grid(&self, f: &SpectralField) -> Result<()> {
        if f.grid().n() != self.grid.n() {
            return Err(SqgError::GridMismatch {
                left: f.grid().n(),
                right: self.grid.n(),
            });
        }
        Ok(())
    }

    fn shell_unchecked(&self, f: &SpectralField, k: i32) -> SpectralField {
        match self.shell_multiplier(k) {
            Some(m) => {
                let mut out = f.clone();
                for (c, w) in out.coeffs_mut().iter_mut().zip(m) {
                    *c *= *w;
                }
                out
            }
            None => SpectralField::zeros(*f.grid()),
        }
    }

    /// `P_k f`. Outside the bank range the projection is identically zero on
    /// the lattice; a warning is logged and the zero field returned.
    pub fn project_shell(&self, f: &SpectralField, k: i32) -> Result<SpectralField> {
        self.check_grid(f)?;
        if !self.contains(k) {
            log::warn!(
                "shell {k} outside bank range [{}, {}]; projection is empty",
                self.k_min,
                self.k_max
            );
        }
        Ok(self.shell_unchecked(f, k))
    }

    /// `P_{<k}`, the multiplier `χ(2^{-k}ξ)`; keeps the mean mode.
    pub fn project_below(&self, f: &SpectralField, k: i32) -> Result<SpectralField> {
        self.check_grid(f)?;
        Ok(self.below_unchecked(f, k))
    }

    fn below_unchecked(&self, f: &SpectralField, k: i32) -> SpectralField {
        let scale = dyadic(-k);
        let mut out = f.clone();
        for (c, &r) in out.coeffs_mut().iter_mut().zip(&self.magnitudes) {
            *c *= chi(scale * r);
        }
        out
    }

    pub fn decompose(&self, f: &SpectralField) -> Result<ShellDecomposition> {
        self.check_grid(f)?;
        Ok(ShellDecomposition {
            shells: self
                .shell_indices()
                .map(|k| (k, self.shell_unchecked(f, k)))
                .collect(),
            residual_mean: f.mean(),
        })
    }

    /// `‖P_k f‖_{L²}` for every shell in the bank, by Parseval.
    pub fn shell_l2_norms(&self, f: &SpectralField) -> Result<Vec<f64>> {
        self.check_grid(f)?;
        Ok(self
            .shells
            .iter()
            .map(|m| {
                let s: f64 = f
                    .coeffs()
                    .iter()
                    .zip(m)
                    .map(|(c, w)| w * w * c.norm_sqr())
                    .sum();
                (crate::spectral::PARSEVAL_CONSTANT * s).sqrt()
            })
            .collect())
    }

    /// `sup_k 2^{ks} ‖P_k f‖_{L²}`; the mean mode does not contribute.
    pub fn besov_norm_2inf(&self, f: &SpectralField, s: f64) -> Result<f64> {
        let norms = self.shell_l2_norms(f)?;
        Ok(self
            .shell_indices()
            .zip(norms)
            .map(|(k, m)| dyadic(k).powf(s) * m)
            .fold(0.0, f64::max))
    }

    /// Littlewood-Paley Sobolev norm. Homogeneous: `(Σ_k 2^{2ks}‖P_k f‖²)^{1/2}`;
    /// inhomogeneous adds `‖f‖²_{L²}` and keeps only `k ≥ 0`.
    pub fn sobolev_norm(&self, f: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
        let norms = self.shell_l2_norms(f)?;
        let mut sum: f64 = self
            .shell_indices()
            .zip(norms)
            .filter(|&(k, _)| homogeneous || k >= 0)
            .map(|(k, m)| dyadic(k).powf(2.0 * s) * m * m)
            .sum();
        if !homogeneous {
            sum += f.l2_norm_sq();
        }
        Ok(sum.sqrt())
    }

    /// Bound side of the shell nonlinearity estimate, without its constant:
    /// `2^{k(1−s)} ‖ψ_k‖_{L^p} (Σ_{l≥k−3} 2^{−s(l−k)} ‖Λ^s ψ_l‖_{L²}) ‖ψ‖_{L^q}`.
    pub fn nonlinear_shell_bound_rhs(&self, psi: &SpectralField, k: i32, s: f64, p: f64, q: f64) -> Result<f64> {
        check_lemma_exponents(s, p, q)?;
        self.check_grid(psi)?;
        let psi_k = self.shell_unchecked(psi, k).to_physical().lp_norm(p)?;
        let psi_q = psi.to_physical().lp_norm(q)?;
        let tail: f64 = self
            .shell_indices()
            .filter(|&l| l >= k - 3)
            .map(|l| dyadic(-(l - k)).powf(s) * self.shell_unchecked(psi, l).lambda_power(s).l2_norm())
            .sum();
        Ok(dyadic(k).powf(1.0 - s) * psi_k * tail * psi_q)
    }

    /// Three-term paraproduct split of `P_k(fg)`; see [`paraproduct_split`].
    pub fn paraproduct_split(&self, f: &SpectralField, g: &SpectralField, k: i32) -> Result<Paraproduct> {
        paraproduct_split_windowed(self, f, g, k, HIGH_HIGH_LOWER_OFFSET)
    }
}

/// `0 < s ≤ 1`, `2 < p, q < ∞`, `1/p + 1/q = 1/2`.
pub fn check_lemma_exponents(s: f64, p: f64, q: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(SqgError::config(format!("smoothness s must lie in (0, 1], got {s}")));
    }
    if !(p > 2.0 && p.is_finite() && q > 2.0 && q.is_finite()) {
        return Err(SqgError::config(format!("need 2 < p, q < inf, got p = {p}, q = {q}")));
    }
    if (1.0 / p + 1.0 / q - 0.5).abs() > 1e-12 {
        return Err(SqgError::config(format!("need 1/p + 1/q = 1/2, got p = {p}, q = {q}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ShellDecomposition {
    pub shells: Vec<(i32, SpectralField)>,
    pub residual_mean: f64,
}

impl ShellDecomposition {
    /// `Σ_k P_k f + mean`.
    pub fn reconstruct(&self) -> SpectralField {
        let grid = *self.shells[0].1.grid();
        let mut out = SpectralField::zeros(grid);
        for (_, s) in &self.shells {
            out += s;
        }
        out.coeffs_mut()[0].re += self.residual_mean;
        out
    }

    pub fn l2_sum_sq(&self) -> f64 {
        self.shells.iter().map(|(_, s)| s.l2_norm_sq()).sum()
    }
}

/// `P_k(fg) = hh + hl + lh` on the product grid.
#[derive(Debug, Clone)]
pub struct Paraproduct {
    /// Near-diagonal pairs `|l₁ − l₂| ≤ 3`.
    pub high_high: SpectralField,
    /// `f` in shells `k−3..=k+3` against strictly lower shells of `g` (and its mean).
    pub high_low: SpectralField,
    /// Same with the roles of `f` and `g` swapped.
    pub low_high: SpectralField,
}

impl Paraproduct {
    pub fn sum(&self) -> SpectralField {
        let mut s = &self.high_high + &self.high_low;
        s += &self.low_high;
        s
    }
}

/// Lowest `f`-shell kept in the high-high sum, relative to `k`. A pair of
/// shells `(l₁, l₂)` with `|l₁ − l₂| ≤ 3` produces frequencies below
/// `2^{l₁+1} + 2^{l₂+1}`, which misses shell `k` only once `l₁ ≤ k − 6`.
pub const HIGH_HIGH_LOWER_OFFSET: i32 = 5;

/// Band separation between the high factor's shell and the low factor in the
/// high-low terms: the low factor collects shells `< l − 3`.
const PARAPRODUCT_GAP: i32 = 3;

/// Paraproduct split of `P_k(fg)`.
///
/// `bank` must live on a product grid fine enough to hold `fg` without
/// aliasing; `f` and `g` are embedded into it. Pairs of shells are split
/// into near-diagonal interactions (`|l₁ − l₂| ≤ 3`) and the two high-low
/// families (`l₁ − l₂ ≥ 4` and `l₂ − l₁ ≥ 4`), so the three terms sum to
/// `P_k(fg)` exactly.
pub fn paraproduct_split(
    bank: &DyadicFilterBank,
    f: &SpectralField,
    g: &SpectralField,
    k: i32,
) -> Result<Paraproduct> {
    paraproduct_split_windowed(bank, f, g, k, HIGH_HIGH_LOWER_OFFSET)
}

/// Filter bank on a grid twice as fine as `grid`, enough for any product of
/// two fields living on `grid`.
pub fn product_bank(grid: &GridSpec) -> Result<DyadicFilterBank> {
    Ok(DyadicFilterBank::new(grid.refined(2)?))
}

pub(crate) fn paraproduct_split_windowed(
    bank: &DyadicFilterBank,
    f: &SpectralField,
    g: &SpectralField,
    k: i32,
    hh_offset: i32,
) -> Result<Paraproduct> {
    let pgrid = *bank.grid();
    if f.grid().n() != g.grid().n() {
        return Err(SqgError::GridMismatch {
            left: f.grid().n(),
            right: g.grid().n(),
        });
    }
    let fe = f.resample(pgrid);
    let ge = g.resample(pgrid);
    if f.grid().n() > pgrid.n() {
        return Err(SqgError::Aliasing {
            n: pgrid.n(),
            bandwidth: f.bandwidth() + g.bandwidth(),
        });
    }
    // A product reaching exactly |ξ_j| = N/2 folds onto the Nyquist line,
    // which every radial multiplier treats alike, so equality is allowed.
    let bandwidth = fe.bandwidth() + ge.bandwidth();
    if bandwidth > pgrid.n() / 2 {
        return Err(SqgError::Aliasing { n: pgrid.n(), bandwidth });
    }

    let shells: Vec<i32> = bank.shell_indices().collect();
    let shell_phys = |x: &SpectralField| -> Vec<PhysicalField> {
        shells.iter().map(|&l| bank.shell_unchecked(x, l).to_physical()).collect()
    };
    let fs = shell_phys(&fe);
    let gs = shell_phys(&ge);
    let at = |v: &[PhysicalField], l: i32| -> Option<usize> {
        if bank.contains(l) {
            let i = (l - bank.k_min()) as usize;
            Some(i).filter(|&i| i < v.len())
        } else {
            None
        }
    };

    // high-high: Σ_{l ≥ k−offset} f_l · Σ_{|m−l|≤3} g_m
    let mut hh = PhysicalField::zeros(pgrid);
    for l in (k - hh_offset).max(bank.k_min())..=bank.k_max() {
        let Some(il) = at(&fs, l) else { continue };
        let mut window = PhysicalField::zeros(pgrid);
        for m in (l - PARAPRODUCT_GAP)..=(l + PARAPRODUCT_GAP) {
            if let Some(im) = at(&gs, m) {
                window.add_assign_field(&gs[im]);
            }
        }
        hh.add_assign_product(&fs[il], &window);
    }

    // high-low: Σ_{j=−3}^{3} x_{k+j} · y_{< k+j−3}, lower factor strictly below
    let high_low = |xs: &[PhysicalField], y: &SpectralField| -> PhysicalField {
        let mut acc = PhysicalField::zeros(pgrid);
        for j in -PARAPRODUCT_GAP..=PARAPRODUCT_GAP {
            let Some(ix) = at(xs, k + j) else { continue };
            // Σ_{l < k+j−3} P_l y plus the mean is χ(2^{-(k+j−4)}ξ)
            let low = bank.below_unchecked(y, k + j - PARAPRODUCT_GAP - 1).to_physical();
            acc.add_assign_product(&xs[ix], &low);
        }
        acc
    };
    let hl = high_low(&fs, &ge);
    let lh = high_low(&gs, &fe);

    let finish = |p: PhysicalField| bank.shell_unchecked(&p.to_spectral(), k);
    Ok(Paraproduct {
        high_high: finish(hh),
        high_low: finish(hl),
        low_high: finish(lh),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    fn sine(g: GridSpec) -> SpectralField {
        PhysicalField::from_fn(g, |x1, _| x1.sin()).to_spectral()
    }

    fn random_field(g: GridSpec, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PhysicalField::from_values(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .unwrap()
            .to_spectral()
    }

    #[test]
    fn chi_profile_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(chi(5.0), 0.0);
        assert_eq!(chi(-1.5), chi(1.5));
        let mut prev = 1.0;
        for i in 0..=200 {
            let r = 1.0 + i as f64 / 200.0;
            let c = chi(r);
            assert!((0.0..=1.0).contains(&c));
            assert!(c <= prev + 1e-15);
            prev = c;
        }
        assert_relative_eq!(chi(1.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn bank_range_and_examples() {
        let bank = DyadicFilterBank::new(grid(64));
        assert_eq!((bank.k_min(), bank.k_max()), (0, 6));
        let g = bank.grid();
        let idx = |a, b| g.flat_index(a, b).unwrap();
        // |ξ| = 1 lies wholly in shell 0
        for k in bank.shell_indices() {
            let w = bank.shell_multiplier(k).unwrap()[idx(1, 0)];
            assert_eq!(w, if k == 0 { 1.0 } else { 0.0 });
        }
        // |ξ| = 3 splits between shells 1 and 2
        let w: Vec<f64> = bank.shell_indices().map(|k| bank.shell_multiplier(k).unwrap()[idx(3, 0)]).collect();
        assert!(w[1] > 0.0 && w[2] > 0.0);
        assert_relative_eq!(w[1] + w[2], 1.0, epsilon = 1e-15);
        assert!(w.iter().enumerate().all(|(k, &x)| k == 1 || k == 2 || x == 0.0));
        // mean mode in no shell
        assert!(bank.shell_indices().all(|k| bank.shell_multiplier(k).unwrap()[0] == 0.0));
    }

    #[test]
    fn bank_invariants() {
        for n in [16, 32, 64, 128] {
            let bank = DyadicFilterBank::new(grid(n));
            assert!(bank.partition_residual() <= 1e-12);
            for (i, _, _) in bank.grid().frequencies() {
                let vals: Vec<f64> = bank.shells.iter().map(|s| s[i]).collect();
                assert!(vals.iter().all(|&v| (0.0..=1.0).contains(&v)));
                assert!(vals.iter().filter(|&&v| v > 0.0).count() <= 2);
                let r = bank.magnitudes[i];
                for (k, &v) in bank.shell_indices().zip(&vals) {
                    if v > 0.0 {
                        assert!(r >= dyadic(k - 1) && r <= dyadic(k + 1));
                    }
                }
            }
        }
    }

    #[test]
    fn project_shell_examples() {
        let g = grid(32);
        let bank = DyadicFilterBank::new(g);
        let s = sine(g);
        assert!(bank.project_shell(&s, 0).unwrap().relative_l2_distance(&s).unwrap() < 1e-15);
        for k in 1..=bank.k_max() {
            assert!(bank.project_shell(&s, k).unwrap().l2_norm() < 1e-14);
        }
        let f = random_field(g, 1);
        for k in bank.shell_indices() {
            for j in bank.shell_indices() {
                if (k - j).abs() >= 2 {
                    let pp = bank.project_shell(&bank.project_shell(&f, j).unwrap(), k).unwrap();
                    assert_eq!(pp.l2_norm(), 0.0);
                }
            }
            assert!(bank.project_shell(&f, k).unwrap().l2_norm() <= f.l2_norm());
        }
        assert_eq!(bank.project_shell(&SpectralField::zeros(g), 2).unwrap().l2_norm(), 0.0);
        assert_eq!(bank.project_shell(&f, 99).unwrap().l2_norm(), 0.0);
        assert!(bank.project_shell(&random_field(grid(16), 2), 0).is_err());
    }

    #[test]
    fn project_below_examples() {
        let g = grid(32);
        let bank = DyadicFilterBank::new(g);
        let f = random_field(g, 4);
        assert_eq!(bank.project_below(&f, 20).unwrap(), f);
        let low = bank.project_below(&f, -1).unwrap();
        assert_eq!(low.without_mean().l2_norm(), 0.0);
        assert_eq!(low.mean(), f.mean());
        let s = sine(g);
        assert!(bank.project_below(&s, 2).unwrap().relative_l2_distance(&s).unwrap() < 1e-15);
        // telescoping: P_{<k} = mean + Σ_{l≤k} P_l
        let k = 3;
        let mut sum = SpectralField::zeros(g);
        sum.coeffs_mut()[0] = f.coeffs()[0];
        for l in 0..=k {
            sum += &bank.project_shell(&f, l).unwrap();
        }
        assert!(sum.relative_l2_distance(&bank.project_below(&f, k).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn decomposition_reconstructs() {
        for n in [32, 64, 128] {
            let g = grid(n);
            let bank = DyadicFilterBank::new(g);
            let f = random_field(g, n as u64);
            let d = bank.decompose(&f).unwrap();
            assert!(d.reconstruct().relative_l2_distance(&f).unwrap() <= 1e-12);
            let e = f.without_mean().l2_norm_sq();
            assert!(d.l2_sum_sq() <= e * (1.0 + 1e-12));
            assert!(d.l2_sum_sq() >= 0.5 * e);
        }
    }

    #[test]
    fn besov_examples() {
        let g = grid(128);
        let bank = DyadicFilterBank::new(g);
        let s = sine(g);
        assert_relative_eq!(bank.besov_norm_2inf(&s, 0.5).unwrap(), 2f64.sqrt() * PI, max_relative = 1e-13);
        assert_eq!(bank.besov_norm_2inf(&SpectralField::zeros(g), 1.0).unwrap(), 0.0);
        // |ξ| = 2^k sits in shell k alone
        let two = SpectralField::from_modes(
            g,
            &[((8, 0), Complex64::new(0.5, 0.0)), ((32, 0), Complex64::new(0.0, 0.5))],
        )
        .unwrap();
        let m = 2f64.sqrt() * PI;
        assert_relative_eq!(bank.besov_norm_2inf(&two, 1.0).unwrap(), 32.0 * m, max_relative = 1e-13);
    }

    #[test]
    fn sobolev_examples() {
        let g = grid(64);
        let bank = DyadicFilterBank::new(g);
        let single = SpectralField::from_modes(g, &[((0, 4), Complex64::new(0.3, 0.1))]).unwrap();
        let m = single.l2_norm();
        assert_relative_eq!(bank.sobolev_norm(&single, 0.7, true).unwrap(), 4f64.powf(0.7) * m, max_relative = 1e-13);
        let inhom = bank.sobolev_norm(&single, 0.7, false).unwrap();
        assert_relative_eq!(inhom, (m * m + 4f64.powf(1.4) * m * m).sqrt(), max_relative = 1e-13);
        let f = random_field(g, 9).without_mean();
        let h0 = bank.sobolev_norm(&f, 0.0, true).unwrap();
        assert!(h0 <= f.l2_norm() * (1.0 + 1e-12) && h0 >= f.l2_norm() / 2f64.sqrt());
        assert_eq!(bank.sobolev_norm(&SpectralField::zeros(g), 1.0, true).unwrap(), 0.0);
    }

    #[test]
    fn bernstein_comparability() {
        let g = grid(128);
        let bank = DyadicFilterBank::new(g);
        let f = random_field(g, 21);
        for k in bank.shell_indices() {
            let fk = bank.project_shell(&f, k).unwrap();
            for s in [0.25, 0.5, 0.8, 1.0] {
                let ratio = fk.lambda_power(s).l2_norm() / (dyadic(k).powf(s) * fk.l2_norm());
                assert!(ratio >= 2f64.powf(-s) && ratio <= 2f64.powf(s), "k={k} s={s} ratio={ratio}");
            }
        }
    }

    fn direct_product_shell(bank: &DyadicFilterBank, f: &SpectralField, g: &SpectralField, k: i32) -> SpectralField {
        let pg = *bank.grid();
        let prod = f.resample(pg).to_physical().mul(&g.resample(pg).to_physical()).unwrap();
        bank.project_shell(&prod.to_spectral(), k).unwrap()
    }

    #[test]
    fn paraproduct_sine_squared() {
        let g = grid(32);
        let bank = product_bank(&g).unwrap();
        let s = sine(g);
        for k in bank.shell_indices() {
            let split = bank.paraproduct_split(&s, &s, k).unwrap();
            let direct = direct_product_shell(&bank, &s, &s, k);
            let err = (&split.sum() - &direct).l2_norm();
            assert!(err <= 1e-14, "k={k} err={err}");
        }
        // fg = (1 − cos 2x₁)/2 only has |ξ| = 2, shared by shells 0..2
        let k1 = direct_product_shell(&bank, &s, &s, 1);
        assert_relative_eq!(k1.l2_norm(), PI / 2f64.sqrt(), max_relative = 1e-13);
        let z = SpectralField::zeros(g);
        let split = bank.paraproduct_split(&z, &s, 1).unwrap();
        assert_eq!(split.sum().l2_norm(), 0.0);
    }

    #[test]
    fn paraproduct_random_exact() {
        let g = grid(64);
        let bank = product_bank(&g).unwrap();
        let f = random_field(g, 31);
        let h = random_field(g, 32);
        for k in bank.shell_indices() {
            let split = bank.paraproduct_split(&f, &h, k).unwrap();
            let direct = direct_product_shell(&bank, &f, &h, k);
            let err = (&split.sum() - &direct).l2_norm();
            assert!(err <= 1e-12 * direct.l2_norm(), "k={k} err={err}");
        }
    }

    #[test]
    fn narrow_high_high_window_misses_interactions() {
        // With the high-high sum starting at l = k − 3, pairs such as
        // (k−4, k−1) are lost although their product reaches shell k.
        let g = grid(64);
        let bank = product_bank(&g).unwrap();
        let k = 5;
        let f = SpectralField::from_modes(g, &[((2, 0), Complex64::new(0.5, 0.0))]).unwrap();
        let h = SpectralField::from_modes(g, &[((20, 0), Complex64::new(0.5, 0.0))]).unwrap();
        let direct = direct_product_shell(&bank, &f, &h, k);
        assert!(direct.l2_norm() > 0.1);
        let narrow = paraproduct_split_windowed(&bank, &f, &h, k, 3).unwrap();
        assert!((&narrow.sum() - &direct).l2_norm() > 0.1 * direct.l2_norm());
        let wide = bank.paraproduct_split(&f, &h, k).unwrap();
        assert!((&wide.sum() - &direct).l2_norm() <= 1e-14);
    }

    #[test]
    fn paraproduct_rejects_small_product_grid() {
        let g = grid(32);
        let bank = DyadicFilterBank::new(g);
        let f = random_field(g, 1);
        assert!(matches!(
            bank.paraproduct_split(&f, &f, 2),
            Err(SqgError::Aliasing { .. })
        ));
    }

    #[test]
    fn shell_bound_rhs_examples() {
        let g = grid(64);
        let bank = DyadicFilterBank::new(g);
        let z = SpectralField::zeros(g);
        assert_eq!(bank.nonlinear_shell_bound_rhs(&z, 0, 0.5, 4.0, 4.0).unwrap(), 0.0);
        let s = sine(g);
        let l4 = s.to_physical().lp_norm(4.0).unwrap();
        let expected = l4 * s.lambda_power(0.5).l2_norm() * l4;
        let got = bank.nonlinear_shell_bound_rhs(&s, 0, 0.5, 4.0, 4.0).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        let f = random_field(g, 5);
        let r1 = bank.nonlinear_shell_bound_rhs(&f, 3, 0.5, 4.0, 4.0).unwrap();
        let r2 = bank.nonlinear_shell_bound_rhs(&f.scaled(2.0), 3, 0.5, 4.0, 4.0).unwrap();
        assert_relative_eq!(r2, 8.0 * r1, max_relative = 1e-12);
        assert!(bank.nonlinear_shell_bound_rhs(&f, 3, 0.5, 4.0, 5.0).is_err());
        assert!(bank.nonlinear_shell_bound_rhs(&f, 3, 1.5, 4.0, 4.0).is_err());
        assert!(bank.nonlinear_shell_bound_rhs(&f, 3, 0.5, 2.0, f64::INFINITY).is_err());
    }
}
