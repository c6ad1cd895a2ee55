//! Spectral representation of real scalar fields on the periodic square
//! `[0, 2π)²` and the Fourier multipliers acting on them.
//!
//! Coefficients are Fourier-series amplitudes: a physical field `g` is
//! `g(x) = Σ_ξ c(ξ) e^{i ξ·x}`, so `c(ξ) = n⁻² Σ_nodes g e^{-i ξ·x}`.
//! With this normalization Parseval reads
//! `‖g‖²_{L²} = PARSEVAL_CONSTANT · Σ_ξ |c(ξ)|²` with `PARSEVAL_CONSTANT = 4π²`.
//!
//! Storage is row-major with the `ξ₁` axis fastest; index `j` along an axis
//! stands for frequency `j` when `j < n/2` and `j − n` otherwise, so every
//! axis covers `[−n/2, n/2)`.
//!
//! Odd multipliers (Riesz transforms, derivatives) annihilate the two Nyquist
//! lines `ξ₁ = −n/2` and `ξ₂ = −n/2`, which have no conjugate partner on the
//! grid; this keeps outputs real and the velocity exactly divergence-free.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Result, SqgError};
use crate::fft;

pub const DOMAIN_LENGTH: f64 = 2.0 * PI;
pub const DOMAIN_AREA: f64 = DOMAIN_LENGTH * DOMAIN_LENGTH;
/// `‖f‖²_{L²} = PARSEVAL_CONSTANT · Σ |c(ξ)|²`.
pub const PARSEVAL_CONSTANT: f64 = DOMAIN_AREA;
pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    dealias_fraction: f64,
}

impl GridSpec {
    pub const MIN_N: usize = 16;

    pub fn new(n: usize) -> Result<Self> {
        Self::with_dealias(n, DEFAULT_DEALIAS_FRACTION)
    }

    pub fn with_dealias(n: usize, dealias_fraction: f64) -> Result<Self> {
        if n < Self::MIN_N || !n.is_power_of_two() {
            return Err(SqgError::config(format!(
                "grid size must be a power of two >= {}, got {n}",
                Self::MIN_N
            )));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(SqgError::config(format!(
                "dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(GridSpec {
            n,
            dealias_fraction,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        DOMAIN_LENGTH / self.n as f64
    }

    /// Largest retained `max(|ξ₁|, |ξ₂|)` under the dealiasing rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.dealias_fraction * (self.n / 2) as f64 + 1e-9).floor() as i64
    }

    /// Same dealias fraction on a grid `factor` times finer.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::with_dealias(self.n * factor, self.dealias_fraction)
    }

    #[inline]
    pub fn freq(&self, index: usize) -> i64 {
        if index < self.n / 2 {
            index as i64
        } else {
            index as i64 - self.n as i64
        }
    }

    /// Storage index along one axis, if the frequency is representable.
    #[inline]
    pub fn index_of(&self, freq: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if freq < -half || freq >= half {
            None
        } else if freq >= 0 {
            Some(freq as usize)
        } else {
            Some((freq + self.n as i64) as usize)
        }
    }

    #[inline]
    pub fn flat_index(&self, xi1: i64, xi2: i64) -> Option<usize> {
        Some(self.index_of(xi2)? * self.n + self.index_of(xi1)?)
    }

    #[inline]
    pub fn nyquist(&self) -> i64 {
        -((self.n / 2) as i64)
    }

    /// `(flat index, ξ₁, ξ₂)` for every grid frequency, in storage order.
    pub fn frequencies(&self) -> impl Iterator<Item = (usize, i64, i64)> + '_ {
        (0..self.n).flat_map(move |i2| {
            let xi2 = self.freq(i2);
            (0..self.n).map(move |i1| (i2 * self.n + i1, self.freq(i1), xi2))
        })
    }

    pub fn node(&self, flat: usize) -> (f64, f64) {
        let dx = self.dx();
        ((flat % self.n) as f64 * dx, (flat / self.n) as f64 * dx)
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.n != other.n {
            return Err(SqgError::GridMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

#[inline]
fn magnitude(xi1: i64, xi2: i64) -> f64 {
    ((xi1 * xi1 + xi2 * xi2) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub fn from_index(j: u32) -> Result<Self> {
        match j {
            1 => Ok(Axis::X1),
            2 => Ok(Axis::X2),
            _ => Err(SqgError::config(format!("axis index must be 1 or 2, got {j}"))),
        }
    }

    #[inline]
    fn pick(self, xi1: i64, xi2: i64) -> i64 {
        match self {
            Axis::X1 => xi1,
            Axis::X2 => xi2,
        }
    }
}

/// Fourier coefficients of a real field on the periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(SqgError::DimensionMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Field with the given amplitudes at `(ξ₁, ξ₂)`; each entry is written
    /// together with its conjugate partner so the result is real.
    pub fn from_modes(grid: GridSpec, modes: &[((i64, i64), Complex64)]) -> Result<Self> {
        let mut f = SpectralField::zeros(grid);
        for &((xi1, xi2), c) in modes {
            let idx = grid.flat_index(xi1, xi2).ok_or_else(|| {
                SqgError::config(format!("mode ({xi1}, {xi2}) not representable on n = {}", grid.n))
            })?;
            f.coeffs[idx] += c;
            if (xi1, xi2) != (0, 0) {
                if let Some(j) = grid.flat_index(-xi1, -xi2) {
                    f.coeffs[j] += c.conj();
                }
            }
        }
        Ok(f)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, xi1: i64, xi2: i64) -> Complex64 {
        self.grid
            .flat_index(xi1, xi2)
            .map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn without_mean(&self) -> Self {
        let mut f = self.clone();
        f.coeffs[0] = ZERO;
        f
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn coeff_sum_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `‖f‖²_{L²}` by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        PARSEVAL_CONSTANT * self.coeff_sum_sq()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `∫ f g dx` for real fields, by Parseval.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        Ok(PARSEVAL_CONSTANT * s)
    }

    /// Largest `max(|ξ₁|, |ξ₂|)` carrying a nonzero coefficient.
    pub fn bandwidth(&self) -> usize {
        self.grid
            .frequencies()
            .filter(|&(i, _, _)| self.coeffs[i] != ZERO)
            .map(|(_, a, b)| a.unsigned_abs().max(b.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Largest violation of `c(−ξ) = conj(c(ξ))`, Nyquist lines excluded.
    pub fn symmetry_defect(&self) -> f64 {
        let nyq = self.grid.nyquist();
        self.grid
            .frequencies()
            .filter(|&(_, a, b)| a != nyq && b != nyq)
            .map(|(i, a, b)| {
                let j = self.grid.flat_index(-a, -b).expect("interior frequency");
                (self.coeffs[i] - self.coeffs[j].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn map_multiplier(&self, m: impl Fn(i64, i64) -> f64) -> Self {
        let mut out = self.clone();
        for (i, a, b) in self.grid.frequencies() {
            out.coeffs[i] *= m(a, b);
        }
        out
    }

    fn map_complex_multiplier(&self, m: impl Fn(i64, i64) -> Complex64) -> Self {
        let mut out = self.clone();
        for (i, a, b) in self.grid.frequencies() {
            out.coeffs[i] *= m(a, b);
        }
        out
    }

    pub fn to_physical(&self) -> PhysicalField {
        let mut data = self.coeffs.clone();
        fft::plan(self.grid.n).inverse(&mut data);
        PhysicalField {
            grid: self.grid,
            values: data.into_iter().map(|c| c.re).collect(),
        }
    }

    /// Two real fields through one complex inverse transform.
    pub fn to_physical_pair(a: &SpectralField, b: &SpectralField) -> Result<(PhysicalField, PhysicalField)> {
        a.grid.check_same(&b.grid)?;
        let i = Complex64::new(0.0, 1.0);
        let mut data: Vec<Complex64> = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + i * y).collect();
        fft::plan(a.grid.n).inverse(&mut data);
        let (va, vb) = data.into_iter().map(|c| (c.re, c.im)).unzip();
        Ok((
            PhysicalField { grid: a.grid, values: va },
            PhysicalField { grid: a.grid, values: vb },
        ))
    }

    /// Largest imaginary part of the physical-space image, relative to the
    /// largest magnitude; zero for an exactly real field.
    pub fn imag_residue(&self) -> f64 {
        let mut data = self.coeffs.clone();
        fft::plan(self.grid.n).inverse(&mut data);
        let scale = data.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        data.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / scale
    }

    /// Multiplier `|ξ|^s`; the mean mode is annihilated unless `s = 0`.
    pub fn lambda_power(&self, s: f64) -> Self {
        if s == 0.0 {
            return self.clone();
        }
        self.map_multiplier(|a, b| {
            if a == 0 && b == 0 {
                0.0
            } else {
                magnitude(a, b).powf(s)
            }
        })
    }

    /// `(−Δ)^α`, multiplier `|ξ|^{2α}` with `|0|^{2α} := 0`.
    pub fn fractional_laplacian(&self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(SqgError::config(format!(
                "fractional order alpha must lie in [0, 1], got {alpha}"
            )));
        }
        let mut out = self.map_multiplier(|a, b| magnitude(a, b).powf(2.0 * alpha));
        out.coeffs[0] = ZERO;
        Ok(out)
    }

    /// Riesz transform `R_j`, multiplier `−i ξ_j / |ξ|`.
    pub fn riesz_transform(&self, axis: Axis) -> Self {
        let nyq = self.grid.nyquist();
        self.map_complex_multiplier(|a, b| {
            if (a == 0 && b == 0) || a == nyq || b == nyq {
                ZERO
            } else {
                Complex64::new(0.0, -(axis.pick(a, b) as f64) / magnitude(a, b))
            }
        })
    }

    /// Partial derivative `∂_j`, multiplier `i ξ_j`.
    pub fn derivative(&self, axis: Axis) -> Self {
        let nyq = self.grid.nyquist();
        self.map_complex_multiplier(|a, b| {
            if a == nyq || b == nyq {
                ZERO
            } else {
                Complex64::new(0.0, axis.pick(a, b) as f64)
            }
        })
    }

    /// 2/3-type truncation: zero every mode with `max(|ξ₁|,|ξ₂|)` above
    /// the grid's dealias cutoff.
    pub fn dealias(&self) -> Self {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub fn dealias_in_place(&mut self) {
        let cut = self.grid.dealias_cutoff();
        for (i, a, b) in self.grid.frequencies() {
            if a.abs().max(b.abs()) > cut {
                self.coeffs[i] = ZERO;
            }
        }
    }

    /// Copy onto another grid. Frequencies not representable on the target
    /// are dropped; when refining, the source Nyquist lines are split evenly
    /// between `±n/2` so the embedded field stays real and agrees with the
    /// source at the source nodes.
    pub fn resample(&self, target: GridSpec) -> Self {
        let mut out = SpectralField::zeros(target);
        let nyq = self.grid.nyquist();
        for (i, a, b) in self.grid.frequencies() {
            let c = self.coeffs[i];
            if c == ZERO {
                continue;
            }
            let xs: &[i64] = if a == nyq && target.n > self.grid.n { &[nyq, -nyq] } else { &[a] };
            let ys: &[i64] = if b == nyq && target.n > self.grid.n { &[nyq, -nyq] } else { &[b] };
            let w = 1.0 / (xs.len() * ys.len()) as f64;
            for &x in xs {
                for &y in ys {
                    if target.n < self.grid.n && (x == target.nyquist() || y == target.nyquist()) {
                        continue;
                    }
                    if let Some(j) = target.flat_index(x, y) {
                        out.coeffs[j] += c * w;
                    }
                }
            }
        }
        out
    }

    /// Sum of squared differences relative to `self`, in L².
    pub fn relative_l2_distance(&self, other: &SpectralField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let diff: f64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum();
        let base = self.coeff_sum_sq();
        Ok(if base == 0.0 { diff.sqrt() } else { (diff / base).sqrt() })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn axpy(&mut self, a: f64, x: &SpectralField) {
        for (y, xv) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += xv * a;
        }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.grid.n, rhs.grid.n, "grid mismatch in field addition");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        SpectralField { grid: self.grid, coeffs }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.grid.n, rhs.grid.n, "grid mismatch in field subtraction");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        SpectralField { grid: self.grid, coeffs }
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        assert_eq!(self.grid.n, rhs.grid.n, "grid mismatch in field addition");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

/// Samples of a real field at the grid nodes `x = 2π (i₁, i₂) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SqgError::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SqgError::config("physical field contains non-finite values"));
        }
        Ok(PhysicalField { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (x1, x2) = grid.node(i);
                f(x1, x2)
            })
            .collect();
        PhysicalField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn to_spectral(&self) -> SpectralField {
        let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::plan(self.grid.n).forward(&mut data);
        let norm = 1.0 / self.grid.len() as f64;
        for c in &mut data {
            *c *= norm;
        }
        SpectralField {
            grid: self.grid,
            coeffs: data,
        }
    }

    /// Node-quadrature `L^p` norm over the torus; `p = ∞` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(SqgError::config(format!("L^p norm needs p >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.max_abs());
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return Ok(0.0);
        }
        // factor out the max to keep |g|^p in range for large p
        let mean = self.values.iter().map(|v| (v.abs() / scale).powf(p)).sum::<f64>() / self.values.len() as f64;
        Ok(scale * (mean * DOMAIN_AREA).powf(1.0 / p))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &PhysicalField) -> Result<PhysicalField> {
        self.grid.check_same(&other.grid)?;
        Ok(PhysicalField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn add_assign_product(&mut self, a: &PhysicalField, b: &PhysicalField) {
        for ((o, x), y) in self.values.iter_mut().zip(&a.values).zip(&b.values) {
            *o += x * y;
        }
    }

    pub fn add_assign_field(&mut self, other: &PhysicalField) {
        for (o, x) in self.values.iter_mut().zip(&other.values) {
            *o += x;
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        PhysicalField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }
}

/// The two components of `J(θ) = (−R₂θ, R₁θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub u1: SpectralField,
    pub u2: SpectralField,
}

impl VelocityField {
    /// `‖ξ₁û₁ + ξ₂û₂‖ / ‖u‖` over coefficients; zero for a zero velocity.
    pub fn divergence_residual(&self) -> f64 {
        let grid = self.u1.grid;
        let mut div = 0.0;
        for (i, a, b) in grid.frequencies() {
            div += (self.u1.coeffs[i] * a as f64 + self.u2.coeffs[i] * b as f64).norm_sqr();
        }
        let norm = self.u1.coeff_sum_sq() + self.u2.coeff_sum_sq();
        if norm == 0.0 {
            div.sqrt()
        } else {
            (div / norm).sqrt()
        }
    }

    /// `max_x |u(x)|`.
    pub fn max_speed(&self) -> f64 {
        let (p1, p2) = SpectralField::to_physical_pair(&self.u1, &self.u2).expect("velocity components share a grid");
        p1.values
            .iter()
            .zip(&p2.values)
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
    }
}

/// `J(θ) = (−R₂θ, R₁θ)`.
pub fn geostrophic_velocity(theta: &SpectralField) -> VelocityField {
    VelocityField {
        u1: -&theta.riesz_transform(Axis::X2),
        u2: theta.riesz_transform(Axis::X1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    fn random_physical(g: GridSpec, seed: u64) -> PhysicalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PhysicalField::from_values(g, values).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(8).is_err());
        assert!(GridSpec::new(48).is_err());
        assert!(GridSpec::with_dealias(32, 0.0).is_err());
        assert!(GridSpec::with_dealias(32, 1.2).is_err());
        let g = grid(64);
        assert_eq!(g.dealias_cutoff(), 21);
        assert_eq!(g.freq(31), 31);
        assert_eq!(g.freq(32), -32);
        assert_eq!(g.index_of(32), None);
        assert_eq!(g.index_of(-1), Some(63));
    }

    #[test]
    fn zero_field_round_trip() {
        let g = grid(16);
        let z = SpectralField::zeros(g);
        assert!(z.to_physical().values().iter().all(|&v| v == 0.0));
        assert!(PhysicalField::zeros(g).to_spectral().coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn cosine_has_two_coefficients() {
        let g = grid(32);
        let f = PhysicalField::from_fn(g, |x1, _| x1.cos()).to_spectral();
        for (i, a, b) in g.frequencies() {
            let c = f.coeffs()[i];
            if (a, b) == (1, 0) || (a, b) == (-1, 0) {
                assert_relative_eq!(c.re, 0.5, epsilon = 1e-14);
                assert!(c.im.abs() < 1e-14);
            } else {
                assert!(c.norm() < 1e-14, "unexpected mode ({a},{b}): {c}");
            }
        }
    }

    #[test]
    fn random_round_trip() {
        let g = grid(64);
        let p = random_physical(g, 7);
        let back = p.to_spectral().to_physical();
        let err = p.values().iter().zip(back.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12 * p.max_abs());
        let s = p.to_spectral();
        let s2 = s.to_physical().to_spectral();
        assert!(s.relative_l2_distance(&s2).unwrap() < 1e-12);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = grid(32);
        let p = random_physical(g, 3);
        let q = p.lp_norm(2.0).unwrap();
        assert_relative_eq!(p.to_spectral().l2_norm(), q, max_relative = 1e-10);
    }

    #[test]
    fn lambda_power_examples() {
        let g = grid(32);
        let s = PhysicalField::from_fn(g, |x1, _| x1.sin()).to_spectral();
        assert!(s.lambda_power(1.5).relative_l2_distance(&s).unwrap() < 1e-14);
        let m = SpectralField::from_modes(g, &[((3, 4), Complex64::new(0.7, -0.2))]).unwrap();
        let out = m.lambda_power(1.0);
        assert_relative_eq!(out.coeff(3, 4).re, 3.5, epsilon = 1e-14);
        assert_relative_eq!(out.coeff(3, 4).im, -1.0, epsilon = 1e-14);
        let c = SpectralField::from_modes(g, &[((0, 0), Complex64::new(2.0, 0.0))]).unwrap();
        assert_eq!(c.lambda_power(0.0), c);
        assert_eq!(c.lambda_power(-0.5).l2_norm(), 0.0);
    }

    #[test]
    fn fractional_laplacian_examples() {
        let g = grid(32);
        let s = PhysicalField::from_fn(g, |x1, _| x1.sin()).to_spectral();
        assert!(s.fractional_laplacian(0.75).unwrap().relative_l2_distance(&s).unwrap() < 1e-14);
        let m = SpectralField::from_modes(g, &[((0, 2), Complex64::new(1.0, 0.0))]).unwrap();
        assert_relative_eq!(m.fractional_laplacian(0.5).unwrap().coeff(0, 2).re, 2.0, epsilon = 1e-14);
        let c = PhysicalField::from_fn(g, |_, _| 3.0).to_spectral();
        assert_eq!(c.fractional_laplacian(0.3).unwrap().l2_norm(), 0.0);
        assert!(s.fractional_laplacian(1.5).is_err());
        assert!(s.fractional_laplacian(-0.1).is_err());
    }

    #[test]
    fn riesz_examples() {
        let g = grid(32);
        let s = PhysicalField::from_fn(g, |x1, _| x1.sin()).to_spectral();
        let expected = PhysicalField::from_fn(g, |x1, _| -x1.cos()).to_spectral();
        assert!(s.riesz_transform(Axis::X1).relative_l2_distance(&expected).unwrap() < 1e-14);
        assert!(s.riesz_transform(Axis::X2).l2_norm() < 1e-14);
        let c = PhysicalField::from_fn(g, |_, _| 1.0).to_spectral();
        assert_eq!(c.riesz_transform(Axis::X1).l2_norm(), 0.0);
        assert!(Axis::from_index(3).is_err());
    }

    #[test]
    fn velocity_of_sine() {
        let g = grid(32);
        let s = PhysicalField::from_fn(g, |x1, _| x1.sin()).to_spectral();
        let u = geostrophic_velocity(&s);
        assert!(u.u1.l2_norm() < 1e-14);
        let expected = PhysicalField::from_fn(g, |x1, _| -x1.cos()).to_spectral();
        assert!(u.u2.relative_l2_distance(&expected).unwrap() < 1e-14);
        let z = geostrophic_velocity(&SpectralField::zeros(g));
        assert_eq!(z.u1.l2_norm() + z.u2.l2_norm(), 0.0);
    }

    #[test]
    fn lp_norm_examples() {
        let g = grid(32);
        let one = PhysicalField::from_fn(g, |_, _| 1.0);
        assert_relative_eq!(one.lp_norm(2.0).unwrap(), 2.0 * PI, max_relative = 1e-14);
        let s = PhysicalField::from_fn(g, |x1, _| x1.sin());
        assert_relative_eq!(s.lp_norm(2.0).unwrap(), 2f64.sqrt() * PI, max_relative = 1e-13);
        assert_relative_eq!(s.lp_norm(f64::INFINITY).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(PhysicalField::zeros(g).lp_norm(3.0).unwrap(), 0.0);
        assert!(s.lp_norm(0.5).is_err());
    }

    #[test]
    fn dealias_examples() {
        let g = grid(64);
        let p = random_physical(g, 11).to_spectral();
        let d = p.dealias();
        for (i, a, b) in g.frequencies() {
            if a.abs().max(b.abs()) > 21 {
                assert_eq!(d.coeffs()[i], ZERO);
            } else {
                assert_eq!(d.coeffs()[i], p.coeffs()[i]);
            }
        }
        let inside = SpectralField::from_modes(g, &[((21, -21), Complex64::new(1.0, 1.0))]).unwrap();
        assert_eq!(inside.dealias(), inside);
        let edge = SpectralField::from_modes(g, &[((22, 3), Complex64::new(1.0, 0.0))]).unwrap();
        assert_eq!(edge.dealias().l2_norm(), 0.0);
    }

    #[test]
    fn resample_preserves_nodes() {
        let g = grid(16);
        let p = random_physical(g, 5);
        let s = p.to_spectral();
        let fine = s.resample(g.refined(2).unwrap());
        assert!(fine.imag_residue() < 1e-14);
        let back = fine.to_physical();
        for i in 0..g.len() {
            let (r, c) = (i / 16, i % 16);
            assert_relative_eq!(back.values()[2 * r * 32 + 2 * c], p.values()[i], epsilon = 1e-12);
        }
        let coarse = fine.resample(g);
        // the Nyquist lines are dropped on the way down
        let nyq_free = s.map_multiplier(|a, b| if a == -8 || b == -8 { 0.0 } else { 1.0 });
        assert!(coarse.relative_l2_distance(&nyq_free).unwrap() < 1e-14);
    }
}
