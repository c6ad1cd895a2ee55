use std::ffi::{CStr, CString};
use std::ptr;

use sqg_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe { sqg_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn new_sim(n: u32, alpha: f64) -> *mut SqgSimulation {
    let mut sim = ptr::null_mut();
    let status = unsafe { sqg_simulation_new(n, alpha, 1.0, 3, &mut sim) };
    assert_eq!(status, SqgStatus::Ok, "{}", last_error());
    assert!(!sim.is_null());
    sim
}

fn norms(sim: *const SqgSimulation) -> SqgNorms {
    let mut out = SqgNorms {
        time: 0.0,
        l2: 0.0,
        lp_crit: 0.0,
        h_alpha: 0.0,
        besov_s0: 0.0,
        dissipated: 0.0,
    };
    assert_eq!(unsafe { sqg_simulation_norms(sim, &mut out) }, SqgStatus::Ok);
    out
}

#[test]
fn advance_decays_energy_and_tracks_dissipation() {
    let sim = new_sim(32, 0.75);
    let before = norms(sim);
    let mut steps = 0u64;
    let status = unsafe { sqg_simulation_advance(sim, 0.05, &mut steps) };
    assert_eq!(status, SqgStatus::Ok, "{}", last_error());
    assert!(steps > 0);
    let after = norms(sim);
    assert!((unsafe { sqg_simulation_time(sim) } - 0.05).abs() < 1e-12);
    assert!(after.l2 < before.l2);
    assert!(after.lp_crit <= before.lp_crit * (1.0 + 1e-4));
    let ledger = before.l2.powi(2) - after.l2.powi(2) - after.dissipated;
    assert!(ledger.abs() <= 1e-5 * before.l2.powi(2));
    unsafe { sqg_simulation_free(sim) };
}

#[test]
fn physical_copy_checks_length() {
    let sim = new_sim(32, 0.6);
    assert_eq!(unsafe { sqg_simulation_grid_size(sim) }, 32);
    let mut buf = vec![0.0; 1024];
    assert_eq!(unsafe { sqg_simulation_physical(sim, buf.as_mut_ptr(), buf.len()) }, SqgStatus::Ok);
    let mean: f64 = buf.iter().sum::<f64>() / 1024.0;
    assert!(mean.abs() < 1e-12);
    assert!(buf.iter().any(|v| v.abs() > 0.0));
    assert_eq!(
        unsafe { sqg_simulation_physical(sim, buf.as_mut_ptr(), 10) },
        SqgStatus::InvalidArgument
    );
    unsafe { sqg_simulation_free(sim) };
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("s.sqgs").to_str().unwrap()).unwrap();
    let sim = new_sim(32, 0.75);
    assert_eq!(unsafe { sqg_simulation_step(sim, 1e-3) }, SqgStatus::Ok);
    assert_eq!(unsafe { sqg_simulation_save(sim, path.as_ptr()) }, SqgStatus::Ok);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { sqg_simulation_load(path.as_ptr(), &mut loaded) }, SqgStatus::Ok);
    let (a, b) = (norms(sim), norms(loaded));
    assert_eq!(a.time, b.time);
    assert_eq!(a.l2, b.l2);
    assert_eq!(a.besov_s0, b.besov_s0);
    unsafe {
        sqg_simulation_free(sim);
        sqg_simulation_free(loaded);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { sqg_simulation_new(32, 1.5, 1.0, 0, &mut sim) }, SqgStatus::Config);
    assert!(sim.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { sqg_simulation_new(32, 0.75, 1.0, 0, ptr::null_mut()) }, SqgStatus::NullPointer);
    assert_eq!(unsafe { sqg_simulation_step(ptr::null_mut(), 0.1) }, SqgStatus::NullPointer);

    let text = CString::new("alpha = 0.75\nbogus = 1\n").unwrap();
    assert_eq!(unsafe { sqg_simulation_from_config(text.as_ptr(), &mut sim) }, SqgStatus::Config);
    assert!(last_error().contains("bogus"));

    let missing = CString::new("/nonexistent/dir/x.sqgs").unwrap();
    assert_eq!(unsafe { sqg_simulation_load(missing.as_ptr(), &mut sim) }, SqgStatus::Io);

    let live = new_sim(32, 0.75);
    assert_eq!(unsafe { sqg_simulation_step(live, 10.0) }, SqgStatus::CflViolation);
    assert_eq!(unsafe { sqg_simulation_advance(live, -1.0, ptr::null_mut()) }, SqgStatus::InvalidArgument);
    unsafe { sqg_simulation_free(live) };
    unsafe { sqg_simulation_free(ptr::null_mut()) };
}

#[test]
fn config_text_constructor() {
    let text = CString::new("alpha = 0.6\nkappa = 0.5\nn = 16\nseed = 9\nband_lo = 2\nband_hi = 4\n").unwrap();
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { sqg_simulation_from_config(text.as_ptr(), &mut sim) }, SqgStatus::Ok);
    assert_eq!(unsafe { sqg_simulation_grid_size(sim) }, 16);
    unsafe { sqg_simulation_free(sim) };
}

#[test]
fn exponent_table() {
    let mut e = SqgExponents {
        alpha: 0.0,
        regime: SqgRegime::Critical,
        s0: 0.0,
        p_crit: 0.0,
        lemma_p: 0.0,
        lemma_q: 0.0,
        gamma: 0.0,
        a: 0.0,
        m: 0.0,
    };
    assert_eq!(unsafe { sqg_exponents(0.6, &mut e) }, SqgStatus::Ok);
    assert_eq!(e.regime, SqgRegime::SubcriticalLow);
    assert!((e.p_crit - 10.0).abs() < 1e-12);
    assert!((e.gamma - 0.75).abs() < 1e-12);
    assert!((e.m - 5.0).abs() < 1e-12);

    assert_eq!(unsafe { sqg_exponents(0.4, &mut e) }, SqgStatus::Ok);
    assert_eq!(e.regime, SqgRegime::Supercritical);
    assert!(e.p_crit.is_nan());
}

#[test]
fn version_and_error_buffer() {
    let v = unsafe { CStr::from_ptr(sqg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let mut sim = ptr::null_mut();
    unsafe { sqg_simulation_new(32, 2.0, 1.0, 0, &mut sim) };
    let needed = unsafe { sqg_last_error_message(ptr::null_mut(), 0) };
    assert!(needed > 1);
    let mut small = [1 as std::ffi::c_char; 4];
    unsafe { sqg_last_error_message(small.as_mut_ptr(), small.len()) };
    assert_eq!(small[3], 0);
}
