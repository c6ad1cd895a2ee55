//! Time integration of `θ_t + κ(−Δ)^α θ + J(θ)·∇θ = 0`.
//!
//! The dissipation is diagonal in Fourier space and is integrated exactly
//! through the integrating factor `exp(−κ|ξ|^{2α} t)`; the transport term is
//! advanced with classical fourth-order Runge-Kutta, each stage evaluated
//! pseudo-spectrally and dealiased. The stepper also integrates the energy
//! dissipation `2κ‖Λ^α θ‖²` with the same Runge-Kutta weights, which is what
//! the energy ledger balances against `‖θ‖²`.

use std::path::PathBuf;

use num_complex::Complex64;

use crate::diagnostics::exponents::{in_hypothesis, Regime};
use crate::diagnostics::series::{NormSampler, NormSeries};
use crate::error::{Result, SqgError};
use crate::io::initial::{generate_initial_data, InitialDataSpec, RandomSpectrum};
use crate::spectral::{geostrophic_velocity, Axis, GridSpec, SpectralField};

/// Floor on the velocity scale in the CFL formula.
pub const CFL_SPEED_FLOOR: f64 = 1e-12;
/// Growth of `‖θ‖_{L²}` within a single step treated as blow-up.
pub const BLOWUP_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    /// Uniform steps; the step is shrunk slightly so an integer number of
    /// them lands on `t_end`.
    Fixed(f64),
    /// `dt = cfl · Δx / max‖u‖_∞`, capped by `dt_max`.
    Cfl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub alpha: f64,
    pub kappa: f64,
    pub t_end: f64,
    pub dt_policy: DtPolicy,
    pub cfl_number: f64,
    pub dt_max: f64,
    pub diagnostic_stride: usize,
    pub initial_data: InitialDataSpec,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            grid: GridSpec::new(128).expect("128 is a valid grid"),
            alpha: 0.75,
            kappa: 1.0,
            t_end: 5.0,
            dt_policy: DtPolicy::Cfl,
            cfl_number: 0.5,
            dt_max: 2e-3,
            diagnostic_stride: 1,
            initial_data: InitialDataSpec::RandomSpectrum(RandomSpectrum::default()),
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(SqgError::config(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(SqgError::config(format!("kappa must be non-negative, got {}", self.kappa)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SqgError::config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if let DtPolicy::Fixed(dt) = self.dt_policy {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(SqgError::config(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.cfl_number > 0.0 && self.cfl_number.is_finite()) {
            return Err(SqgError::config(format!("cfl must be positive, got {}", self.cfl_number)));
        }
        if !(self.dt_max > 0.0) {
            return Err(SqgError::config(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        if self.diagnostic_stride == 0 {
            return Err(SqgError::config("diagnostic_stride must be at least 1"));
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        Regime::of(self.alpha)
    }

    /// True when `α` lies outside `(1/2, 1)` or `κ = 0`; such runs are
    /// observations, not verification targets.
    pub fn out_of_hypothesis(&self) -> bool {
        !in_hypothesis(self.alpha) || self.kappa == 0.0
    }

    pub fn initial_theta(&self) -> Result<SpectralField> {
        generate_initial_data(&self.initial_data, self.grid, self.alpha, self.seed)
    }

    /// Stable identifier of the configuration: FNV-1a over its canonical
    /// text form.
    pub fn config_hash(&self) -> u64 {
        let text = crate::io::config::render_config(self);
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub theta: SpectralField,
    /// `None` when read back from a file.
    pub config_hash: Option<u64>,
}

/// Dealiased spectral form of the transport term `J(θ)·∇θ`.
///
/// The input is dealiased first, so every product lands without aliasing
/// on the retained modes and the mean of the output vanishes to round-off.
pub fn nonlinear_term(theta: &SpectralField, time: f64) -> Result<SpectralField> {
    Ok(transport(theta, time)?.0)
}

/// Transport term and the maximal speed `max|J(θ)|`.
fn transport(theta: &SpectralField, time: f64) -> Result<(SpectralField, f64)> {
    let th = theta.dealias();
    let u = geostrophic_velocity(&th);
    let (u1, u2) = SpectralField::to_physical_pair(&u.u1, &u.u2)?;
    let (g1, g2) = SpectralField::to_physical_pair(&th.derivative(Axis::X1), &th.derivative(Axis::X2))?;
    let mut prod = u1.mul(&g1)?;
    prod.add_assign_product(&u2, &g2);
    if !prod.is_finite() {
        return Err(SqgError::Blowup {
            time,
            reason: "non-finite value in the transport product".into(),
        });
    }
    let speed = u1
        .values()
        .iter()
        .zip(u2.values())
        .map(|(a, b)| a.hypot(*b))
        .fold(0.0, f64::max);
    let mut out = prod.to_spectral();
    out.dealias_in_place();
    Ok((out, speed))
}

/// `cfl · Δx / max(‖u‖_∞, ε)`, capped at `dt_max`.
pub fn cfl_dt(theta: &SpectralField, cfg: &SimConfig) -> f64 {
    let speed = geostrophic_velocity(&theta.dealias()).max_speed();
    cfl_limit(speed, cfg).min(cfg.dt_max)
}

fn cfl_limit(speed: f64, cfg: &SimConfig) -> f64 {
    cfg.cfl_number * cfg.grid.dx() / speed.max(CFL_SPEED_FLOOR)
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub snapshot: Snapshot,
    /// `∫ 2κ‖Λ^α θ‖² dt` over the step.
    pub dissipated: f64,
}

/// Integrating-factor RK4 stepper for one configuration.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: GridSpec,
    kappa: f64,
    /// `κ|ξ|^{2α}` with `|0|^{2α} := 0`.
    rates: Vec<f64>,
    /// `2κ|ξ|^{2α} · 4π²`, so `Σ w |c|² = 2κ‖Λ^α θ‖²`.
    dissipation_weights: Vec<f64>,
}

impl Stepper {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let rates: Vec<f64> = cfg
            .grid
            .frequencies()
            .map(|(_, a, b)| {
                if a == 0 && b == 0 {
                    0.0
                } else {
                    cfg.kappa * ((a * a + b * b) as f64).powf(cfg.alpha)
                }
            })
            .collect();
        let dissipation_weights = rates
            .iter()
            .map(|r| 2.0 * r * crate::spectral::PARSEVAL_CONSTANT)
            .collect();
        Ok(Stepper {
            grid: cfg.grid,
            kappa: cfg.kappa,
            rates,
            dissipation_weights,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `2κ‖Λ^α θ‖²_{L²}`.
    pub fn dissipation_rate(&self, theta: &SpectralField) -> f64 {
        theta
            .coeffs()
            .iter()
            .zip(&self.dissipation_weights)
            .map(|(c, w)| w * c.norm_sqr())
            .sum()
    }

    /// One step of size `dt`; refuses steps above the CFL limit
    /// `cfl · Δx / max|u|` of the current state.
    pub fn step(&self, state: &Snapshot, dt: f64, cfg: &SimConfig) -> Result<StepOutcome> {
        if state.theta.grid().n() != self.grid.n() {
            return Err(SqgError::GridMismatch {
                left: state.theta.grid().n(),
                right: self.grid.n(),
            });
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SqgError::config(format!("time step must be positive, got {dt}")));
        }
        let t = state.time;
        let theta = &state.theta;
        let (n1, speed) = transport(theta, t)?;
        let limit = cfl_limit(speed, cfg);
        if dt > limit * (1.0 + 1e-12) {
            return Err(SqgError::CflViolation { dt, required: limit });
        }

        let half: Vec<f64> = self.rates.iter().map(|r| (-r * dt * 0.5).exp()).collect();
        let full: Vec<f64> = half.iter().map(|h| h * h).collect();
        let len = self.grid.len();
        let build = |f: &dyn Fn(usize) -> Complex64| -> SpectralField {
            SpectralField::from_coeffs(self.grid, (0..len).map(f).collect()).expect("grid-sized buffer")
        };
        let th = theta.coeffs();
        // stage derivatives are −J(θ)·∇θ
        let k1 = n1.coeffs();
        let s2 = build(&|i| half[i] * (th[i] - k1[i] * (0.5 * dt)));
        let n2 = transport(&s2, t + 0.5 * dt)?.0;
        let k2 = n2.coeffs();
        let s3 = build(&|i| half[i] * th[i] - k2[i] * (0.5 * dt));
        let n3 = transport(&s3, t + 0.5 * dt)?.0;
        let k3 = n3.coeffs();
        let s4 = build(&|i| full[i] * th[i] - half[i] * k3[i] * dt);
        let n4 = transport(&s4, t + dt)?.0;
        let k4 = n4.coeffs();
        let next = build(&|i| {
            full[i] * th[i] - (full[i] * k1[i] + (k2[i] + k3[i]) * (2.0 * half[i]) + k4[i]) * (dt / 6.0)
        });

        let dissipated = dt / 6.0
            * (self.dissipation_rate(theta)
                + 2.0 * self.dissipation_rate(&s2)
                + 2.0 * self.dissipation_rate(&s3)
                + self.dissipation_rate(&s4));

        let t_next = t + dt;
        if !next.is_finite() {
            return Err(SqgError::Blowup {
                time: t_next,
                reason: "non-finite coefficient".into(),
            });
        }
        let (before, after) = (theta.l2_norm(), next.l2_norm());
        if after > BLOWUP_GROWTH * before && before > 0.0 {
            return Err(SqgError::Blowup {
                time: t_next,
                reason: format!("L2 norm grew from {before:e} to {after:e} in one step"),
            });
        }
        Ok(StepOutcome {
            snapshot: Snapshot {
                time: t_next,
                theta: next,
                config_hash: state.config_hash,
            },
            dissipated,
        })
    }
}

/// One integrating-factor RK4 step.
pub fn step(state: &Snapshot, dt: f64, cfg: &SimConfig) -> Result<Snapshot> {
    Ok(Stepper::new(cfg)?.step(state, dt, cfg)?.snapshot)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Keep every `k`-th state in memory.
    pub keep_snapshots_every: Option<usize>,
    /// Write kept snapshots to this directory as `snap_<step>.sqgs`.
    pub snapshot_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_state: Snapshot,
    pub series: NormSeries,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
}

pub fn run(cfg: &SimConfig) -> Result<RunOutput> {
    let theta0 = cfg.initial_theta()?;
    run_from(cfg, theta0, &RunOptions::default())
}

/// Integrates from `θ(0) = theta0` to `cfg.t_end`, sampling norms every
/// `diagnostic_stride` steps and at the final time.
pub fn run_from(cfg: &SimConfig, theta0: SpectralField, opts: &RunOptions) -> Result<RunOutput> {
    cfg.validate()?;
    if theta0.grid().n() != cfg.grid.n() {
        return Err(SqgError::GridMismatch {
            left: theta0.grid().n(),
            right: cfg.grid.n(),
        });
    }
    if cfg.out_of_hypothesis() {
        log::info!(
            "alpha = {} ({}), kappa = {}: outside the hypotheses of the global bounds",
            cfg.alpha,
            cfg.regime(),
            cfg.kappa
        );
    }
    let stepper = Stepper::new(cfg)?;
    let sampler = NormSampler::new(cfg.grid, cfg.alpha, cfg.kappa);
    let mut series = sampler.empty_series();
    let hash = cfg.config_hash();
    let mut state = Snapshot {
        time: 0.0,
        theta: theta0,
        config_hash: Some(hash),
    };
    let mut dissipated = 0.0;
    let mut j = 0.0;
    let first = sampler.sample(0.0, &state.theta, 0.0, j)?;
    j = first.j;
    series.push(first)?;

    let mut snapshots = Vec::new();
    let keep = |steps: usize, snapshots: &mut Vec<Snapshot>, s: &Snapshot| -> Result<()> {
        if let Some(every) = opts.keep_snapshots_every {
            if every > 0 && steps % every == 0 {
                if let Some(dir) = &opts.snapshot_dir {
                    let path = dir.join(format!("snap_{steps:06}.sqgs"));
                    crate::io::snapshot::save_snapshot(&path, s, cfg.alpha, cfg.kappa)?;
                }
                snapshots.push(s.clone());
            }
        }
        Ok(())
    };
    keep(0, &mut snapshots, &state)?;

    let fixed = match cfg.dt_policy {
        DtPolicy::Fixed(dt) if cfg.t_end > 0.0 => {
            let count = ((cfg.t_end / dt) - 1e-9).ceil().max(1.0) as usize;
            Some((count, cfg.t_end / count as f64))
        }
        _ => None,
    };
    let mut steps = 0usize;
    loop {
        let remaining = cfg.t_end - state.time;
        let dt = match fixed {
            Some((count, _)) if steps >= count => break,
            Some((_, dt)) => dt,
            None => {
                if remaining <= 1e-12 * cfg.t_end.max(1.0) {
                    break;
                }
                cfl_dt(&state.theta, cfg).min(remaining)
            }
        };
        let out = stepper.step(&state, dt, cfg)?;
        steps += 1;
        dissipated += out.dissipated;
        state = out.snapshot;
        let at_end = match fixed {
            Some((count, _)) => steps == count,
            None => cfg.t_end - state.time <= 1e-12 * cfg.t_end.max(1.0),
        };
        if at_end {
            state.time = cfg.t_end;
        }
        if steps % cfg.diagnostic_stride == 0 || at_end {
            let rec = sampler.sample(state.time, &state.theta, dissipated, j)?;
            j = rec.j;
            series.push(rec)?;
        }
        keep(steps, &mut snapshots, &state)?;
    }
    Ok(RunOutput {
        final_state: state,
        series,
        snapshots,
        steps,
    })
}

/// Step-halving study: runs with `dt`, `dt/2`, `dt/4` from the same data and
/// returns the observed order `log₂(‖θ_dt − θ_{dt/2}‖ / ‖θ_{dt/2} − θ_{dt/4}‖)`
/// together with the two differences.
pub fn temporal_self_convergence(cfg: &SimConfig, theta0: &SpectralField, dt: f64) -> Result<(f64, f64, f64)> {
    let solve = |h: f64| -> Result<SpectralField> {
        let c = SimConfig {
            dt_policy: DtPolicy::Fixed(h),
            ..cfg.clone()
        };
        Ok(run_from(&c, theta0.clone(), &RunOptions::default())?.final_state.theta)
    };
    let a = solve(dt)?;
    let b = solve(dt / 2.0)?;
    let c = solve(dt / 4.0)?;
    let e1 = (&a - &b).l2_norm();
    let e2 = (&b - &c).l2_norm();
    Ok(((e1 / e2).log2(), e1, e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::initial::TargetNorm;
    use crate::spectral::PhysicalField;
    use approx::assert_relative_eq;

    fn cfg(n: usize, alpha: f64, kappa: f64, t_end: f64, data: InitialDataSpec) -> SimConfig {
        SimConfig {
            grid: GridSpec::new(n).unwrap(),
            alpha,
            kappa,
            t_end,
            initial_data: data,
            dt_max: 1e-2,
            ..SimConfig::default()
        }
    }

    fn sine(g: GridSpec) -> SpectralField {
        PhysicalField::from_fn(g, |x1, _| x1.sin()).to_spectral()
    }

    #[test]
    fn transport_examples() {
        let g = GridSpec::new(32).unwrap();
        assert!(nonlinear_term(&sine(g), 0.0).unwrap().l2_norm() < 1e-14);
        let c = PhysicalField::from_fn(g, |_, _| 2.0).to_spectral();
        assert_eq!(nonlinear_term(&c, 0.0).unwrap().l2_norm(), 0.0);
        // every mode on |ξ| = 1 makes J(θ) = ∇⊥θ, a steady state
        let two = PhysicalField::from_fn(g, |x1, x2| x1.sin() + x2.cos()).to_spectral();
        assert!(nonlinear_term(&two, 0.0).unwrap().l2_norm() < 1e-13);
        let mixed = PhysicalField::from_fn(g, |x1, x2| x1.sin() + (2.0 * x2).cos()).to_spectral();
        let nl = nonlinear_term(&mixed, 0.0).unwrap();
        assert!(nl.l2_norm() > 0.1);
        assert!(nl.mean().abs() <= 1e-12);
        assert!(nl.coeffs()[0].norm() <= 1e-12);
    }

    #[test]
    fn single_mode_step_is_exact() {
        // the transport term vanishes, so the CFL bound can be lifted
        let c = SimConfig {
            cfl_number: 100.0,
            ..cfg(32, 0.75, 1.0, 1.0, InitialDataSpec::SingleMode)
        };
        let s = Snapshot {
            time: 0.0,
            theta: sine(c.grid),
            config_hash: None,
        };
        for dt in [1e-3, 0.05, 0.3, 2.0] {
            let next = step(&s, dt, &c).unwrap();
            let expected = sine(c.grid).scaled((-dt).exp());
            assert!((&next.theta - &expected).l2_norm() <= 1e-10 * expected.l2_norm());
        }
    }

    #[test]
    fn cfl_examples() {
        let c = cfg(64, 0.75, 1.0, 1.0, InitialDataSpec::SingleMode);
        let zero = SpectralField::zeros(c.grid);
        assert_eq!(cfl_dt(&zero, &c), c.dt_max);
        let uncapped = SimConfig { dt_max: 1.0, ..c.clone() };
        // |u| = |cos x₁| has max 1
        assert_relative_eq!(cfl_dt(&sine(c.grid), &uncapped), 0.5 * (2.0 * std::f64::consts::PI / 64.0), max_relative = 1e-12);
        let fine = SimConfig {
            grid: GridSpec::new(128).unwrap(),
            ..uncapped.clone()
        };
        assert_relative_eq!(cfl_dt(&sine(fine.grid), &fine) * 2.0, cfl_dt(&sine(c.grid), &uncapped), max_relative = 1e-12);
    }

    #[test]
    fn cfl_violation_is_refused() {
        let c = cfg(64, 0.75, 1.0, 1.0, InitialDataSpec::SingleMode);
        let s = Snapshot {
            time: 0.0,
            theta: sine(c.grid),
            config_hash: None,
        };
        match step(&s, 1.0, &c) {
            Err(SqgError::CflViolation { required, .. }) => {
                assert_relative_eq!(required, 0.5 * c.grid.dx(), max_relative = 1e-12)
            }
            other => panic!("expected CFL violation, got {other:?}"),
        }
    }

    #[test]
    fn run_single_mode_and_zero_time() {
        let c = cfg(32, 0.75, 1.0, 1.0, InitialDataSpec::SingleMode);
        let out = run(&c).unwrap();
        let l0 = out.series.first().unwrap().l2;
        assert_relative_eq!(out.final_state.theta.l2_norm(), (-1.0f64).exp() * l0, max_relative = 1e-8);
        assert_eq!(out.final_state.time, 1.0);
        let z = SimConfig { t_end: 0.0, ..c };
        let out = run(&z).unwrap();
        assert_eq!(out.steps, 0);
        assert!((&out.final_state.theta - &sine(z.grid)).l2_norm() < 1e-14);
    }

    #[test]
    fn inviscid_sine_is_unchanged() {
        let c = SimConfig {
            kappa: 0.0,
            ..cfg(32, 0.75, 1.0, 1.0, InitialDataSpec::SingleMode)
        };
        assert!(c.out_of_hypothesis());
        let s = Snapshot {
            time: 0.0,
            theta: sine(c.grid),
            config_hash: None,
        };
        let next = step(&s, 0.01, &c).unwrap();
        assert!((&next.theta - &s.theta).l2_norm() < 1e-15);
    }

    #[test]
    fn one_dimensional_modes_decay_exactly() {
        let alpha = 0.6;
        let c = cfg(32, alpha, 0.7, 1.0, InitialDataSpec::OneDimensional);
        let out = run(&c).unwrap();
        let t = out.final_state.time;
        let decay = |m: f64| (-0.7 * m.powf(2.0 * alpha) * t).exp();
        let expected = PhysicalField::from_fn(c.grid, |x1, _| {
            decay(1.0) * x1.sin() + 0.5 * decay(3.0) * (3.0 * x1).cos() + 0.25 * decay(5.0) * (5.0 * x1).sin()
        })
        .to_spectral();
        assert!((&out.final_state.theta - &expected).l2_norm() < 1e-8);
    }

    #[test]
    fn random_run_conserves_mean_and_stays_real() {
        let data = InitialDataSpec::RandomSpectrum(RandomSpectrum {
            band_hi: 6.0,
            target: TargetNorm::Besov(1.0),
            ..RandomSpectrum::default()
        });
        let mut c = cfg(32, 0.75, 1.0, 0.2, data);
        c.seed = 3;
        let mut theta0 = c.initial_theta().unwrap();
        theta0.coeffs_mut()[0] = Complex64::new(0.3, 0.0);
        let out = run_from(&c, theta0, &RunOptions::default()).unwrap();
        assert!((out.final_state.theta.coeffs()[0].re - 0.3).abs() < 1e-12);
        assert!(out.final_state.theta.imag_residue() <= 1e-12 * out.final_state.theta.l2_norm());
        assert!(out.series.len() >= 2);
        let times = out.series.times();
        assert!(times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*times.last().unwrap(), 0.2);
    }

    #[test]
    fn fixed_policy_lands_on_t_end() {
        let c = SimConfig {
            dt_policy: DtPolicy::Fixed(0.03),
            diagnostic_stride: 4,
            ..cfg(32, 0.75, 1.0, 0.1, InitialDataSpec::TwoMode)
        };
        let out = run(&c).unwrap();
        assert_eq!(out.steps, 4);
        assert_eq!(out.final_state.time, 0.1);
        assert_eq!(out.series.len(), 2);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = cfg(32, 0.75, 1.0, 1.0, InitialDataSpec::SingleMode);
        for bad in [
            SimConfig { alpha: 1.5, ..base.clone() },
            SimConfig { kappa: -1.0, ..base.clone() },
            SimConfig { t_end: f64::NAN, ..base.clone() },
            SimConfig { dt_policy: DtPolicy::Fixed(0.0), ..base.clone() },
            SimConfig { diagnostic_stride: 0, ..base.clone() },
        ] {
            assert!(matches!(run(&bad), Err(SqgError::Config(_))));
        }
    }
}
