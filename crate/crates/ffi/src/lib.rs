//! C ABI over `sqg-core`.
//!
//! Simulations are opaque handles created by one of the `sqg_simulation_*`
//! constructors and released with [`sqg_simulation_free`]. Every fallible
//! call returns an [`SqgStatus`]; on failure the message of the last error
//! on the calling thread is available through [`sqg_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use sqg_core::diagnostics::exponents::{compute_exponents, Regime};
use sqg_core::diagnostics::series::NormSampler;
use sqg_core::evolution::{cfl_dt, SimConfig, Snapshot, Stepper};
use sqg_core::io::config::parse_config;
use sqg_core::io::snapshot::{load_snapshot, save_snapshot};
use sqg_core::{GridSpec, SqgError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    CflViolation = 4,
    Blowup = 5,
    Io = 6,
    Format = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqgRegime {
    Supercritical = 0,
    Critical = 1,
    SubcriticalLow = 2,
    SubcriticalHigh = 3,
}

/// Exponent table; entries that do not apply are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SqgExponents {
    pub alpha: f64,
    pub regime: SqgRegime,
    pub s0: f64,
    pub p_crit: f64,
    pub lemma_p: f64,
    pub lemma_q: f64,
    pub gamma: f64,
    pub a: f64,
    pub m: f64,
}

/// Norms of the current state.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SqgNorms {
    pub time: f64,
    pub l2: f64,
    /// `L^{p_crit}` norm, NaN when `α ≤ 1/2`.
    pub lp_crit: f64,
    pub h_alpha: f64,
    pub besov_s0: f64,
    /// `∫ 2κ‖Λ^α θ‖² dt` since the handle was created.
    pub dissipated: f64,
}

/// Opaque simulation handle.
pub struct SqgSimulation {
    cfg: SimConfig,
    stepper: Stepper,
    state: Snapshot,
    dissipated: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &SqgError) -> SqgStatus {
    match err {
        SqgError::Config(_) | SqgError::ConfigKey { .. } => SqgStatus::Config,
        SqgError::DimensionMismatch { .. } | SqgError::GridMismatch { .. } | SqgError::Aliasing { .. } => {
            SqgStatus::InvalidArgument
        }
        SqgError::CflViolation { .. } => SqgStatus::CflViolation,
        SqgError::Blowup { .. } => SqgStatus::Blowup,
        SqgError::Io { .. } => SqgStatus::Io,
        SqgError::Format(_) => SqgStatus::Format,
        _ => SqgStatus::Internal,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), (SqgStatus, String)>) -> SqgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SqgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SqgStatus::Internal
        }
    }
}

fn core_err(e: SqgError) -> (SqgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SqgStatus, String) {
    (SqgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SqgStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SqgStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn build(cfg: SimConfig, theta: Option<Snapshot>) -> Result<Box<SqgSimulation>, SqgError> {
    let stepper = Stepper::new(&cfg)?;
    let state = match theta {
        Some(s) => s,
        None => Snapshot {
            time: 0.0,
            theta: cfg.initial_theta()?,
            config_hash: Some(cfg.config_hash()),
        },
    };
    Ok(Box::new(SqgSimulation {
        cfg,
        stepper,
        state,
        dissipated: 0.0,
    }))
}

unsafe fn publish(out: *mut *mut SqgSimulation, sim: Box<SqgSimulation>) {
    *out = Box::into_raw(sim);
}

/// New simulation with default random-spectrum data on an `n × n` grid.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_new(
    n: u32,
    alpha: f64,
    kappa: f64,
    seed: u64,
    out: *mut *mut SqgSimulation,
) -> SqgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = SimConfig {
            grid: GridSpec::new(n as usize).map_err(core_err)?,
            alpha,
            kappa,
            seed,
            ..SimConfig::default()
        };
        cfg.validate().map_err(core_err)?;
        publish(out, build(cfg, None).map_err(core_err)?);
        Ok(())
    })
}

/// New simulation from `key = value` configuration text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` as in [`sqg_simulation_new`].
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_from_config(text: *const c_char, out: *mut *mut SqgSimulation) -> SqgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = parse_config(c_str(text, "text")?).map_err(core_err)?;
        publish(out, build(cfg, None).map_err(core_err)?);
        Ok(())
    })
}

/// Resumes from a snapshot file, with the `α` and `κ` stored in it.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as in [`sqg_simulation_new`].
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_load(path: *const c_char, out: *mut *mut SqgSimulation) -> SqgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = PathBuf::from(c_str(path, "path")?);
        let file = load_snapshot(&path).map_err(core_err)?;
        let cfg = SimConfig {
            grid: *file.theta.grid(),
            alpha: file.alpha,
            kappa: file.kappa,
            ..SimConfig::default()
        };
        cfg.validate().map_err(core_err)?;
        let snap = file.into_snapshot();
        publish(out, build(cfg, Some(snap)).map_err(core_err)?);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sim` must come from a constructor of this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_free(sim: *mut SqgSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

unsafe fn handle<'a>(sim: *mut SqgSimulation) -> Result<&'a mut SqgSimulation, (SqgStatus, String)> {
    sim.as_mut().ok_or_else(|| null("simulation"))
}

/// One integrating-factor RK4 step of size `dt`.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_step(sim: *mut SqgSimulation, dt: f64) -> SqgStatus {
    guard(|| {
        let s = handle(sim)?;
        let out = s.stepper.step(&s.state, dt, &s.cfg).map_err(core_err)?;
        s.state = out.snapshot;
        s.dissipated += out.dissipated;
        Ok(())
    })
}

/// Advances to time `t` with CFL-limited steps; returns the number of steps
/// taken through `steps` when it is non-null.
///
/// # Safety
/// `sim` must be a live handle; `steps` null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_advance(sim: *mut SqgSimulation, t: f64, steps: *mut u64) -> SqgStatus {
    guard(|| {
        let s = handle(sim)?;
        if !t.is_finite() || t < s.state.time {
            return Err((
                SqgStatus::InvalidArgument,
                format!("target time {t} precedes current time {}", s.state.time),
            ));
        }
        let mut count = 0u64;
        while t - s.state.time > 1e-12 * t.max(1.0) {
            let dt = cfl_dt(&s.state.theta, &s.cfg).min(t - s.state.time);
            let out = s.stepper.step(&s.state, dt, &s.cfg).map_err(core_err)?;
            s.state = out.snapshot;
            s.dissipated += out.dissipated;
            count += 1;
        }
        s.state.time = s.state.time.max(t);
        if !steps.is_null() {
            *steps = count;
        }
        Ok(())
    })
}

/// Grid points per axis.
///
/// # Safety
/// `sim` must be a live handle or null (then 0 is returned).
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_grid_size(sim: *const SqgSimulation) -> u32 {
    sim.as_ref().map_or(0, |s| s.cfg.grid.n() as u32)
}

/// Current time, NaN for a null handle.
///
/// # Safety
/// `sim` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_time(sim: *const SqgSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.state.time)
}

/// # Safety
/// `sim` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_norms(sim: *const SqgSimulation, out: *mut SqgNorms) -> SqgStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("simulation"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sampler = NormSampler::new(s.cfg.grid, s.cfg.alpha, s.cfg.kappa);
        let rec = sampler
            .sample(s.state.time, &s.state.theta, s.dissipated, 0.0)
            .map_err(core_err)?;
        let lp_crit = match sampler.exponents().p_crit {
            Some(p) => s.state.theta.to_physical().lp_norm(p).map_err(core_err)?,
            None => f64::NAN,
        };
        *out = SqgNorms {
            time: rec.t,
            l2: rec.l2,
            lp_crit,
            h_alpha: rec.h_alpha,
            besov_s0: rec.besov_s0,
            dissipated: s.dissipated,
        };
        Ok(())
    })
}

/// Copies the grid values of `θ`, row-major with `x₁` fastest, into `buf`;
/// `len` must equal `n²`.
///
/// # Safety
/// `sim` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_physical(sim: *const SqgSimulation, buf: *mut f64, len: usize) -> SqgStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("simulation"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let phys = s.state.theta.to_physical();
        let values = phys.values();
        if len != values.len() {
            return Err((
                SqgStatus::InvalidArgument,
                format!("buffer holds {len} values, grid has {}", values.len()),
            ));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, len);
        Ok(())
    })
}

/// Writes the current state as a snapshot file.
///
/// # Safety
/// `sim` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sqg_simulation_save(sim: *const SqgSimulation, path: *const c_char) -> SqgStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("simulation"))?;
        let path = PathBuf::from(c_str(path, "path")?);
        save_snapshot(&path, &s.state, s.cfg.alpha, s.cfg.kappa).map_err(core_err)
    })
}

/// Exponent table for `alpha`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqg_exponents(alpha: f64, out: *mut SqgExponents) -> SqgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let e = compute_exponents(alpha);
        let v = |x: Option<f64>| x.unwrap_or(f64::NAN);
        *out = SqgExponents {
            alpha: e.alpha,
            regime: match e.regime {
                Regime::Supercritical => SqgRegime::Supercritical,
                Regime::Critical => SqgRegime::Critical,
                Regime::SubcriticalLow => SqgRegime::SubcriticalLow,
                Regime::SubcriticalHigh => SqgRegime::SubcriticalHigh,
            },
            s0: e.s0,
            p_crit: v(e.p_crit),
            lemma_p: v(e.lemma_p),
            lemma_q: v(e.lemma_q),
            gamma: v(e.gamma),
            a: v(e.a),
            m: v(e.m),
        };
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length
/// plus one for the terminator.
///
/// # Safety
/// `buf` must be null or hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sqg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sqg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
