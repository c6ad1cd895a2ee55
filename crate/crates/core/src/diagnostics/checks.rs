//! Checks of the a priori estimates against a recorded [`NormSeries`].

use crate::diagnostics::report::{InequalityReport, Sample, Status};
use crate::diagnostics::series::NormSeries;

pub const MAX_PRINCIPLE_TOL: f64 = 1e-4;
pub const ENERGY_LEDGER_TOL: f64 = 1e-5;
/// Allowed growth of `J` over the final third of a run.
pub const J_FINAL_THIRD_GROWTH: f64 = 0.01;
/// Allowed factor between measured constants of two resolutions.
pub const CONSTANT_STABILITY_FACTOR: f64 = 2.0;
/// Bound-side floor relative to the largest bound side in the check.
pub const RHS_FLOOR: f64 = 1e-10;

/// `‖θ(t)‖_{L^p} ≤ ‖θ⁰‖_{L^p}` and monotone decay, both up to a relative `tol`.
pub fn max_principle_check(series: &NormSeries, p: f64, tol: f64) -> InequalityReport {
    let mut rep = InequalityReport::new(format!("max_principle_L{}", fmt_exp(p)))
        .param("p", p)
        .param("tol", tol)
        .param("alpha", series.alpha)
        .param("kappa", series.kappa);
    let Some(col) = series.lp_column(p) else {
        rep.mark_incomplete(format!("series has no L^{p} samples"));
        return rep;
    };
    if col.is_empty() {
        rep.mark_incomplete("empty series");
        return rep;
    }
    let initial = col[0];
    let mut ok = true;
    let mut worst_step = 0.0f64;
    for (i, (r, &v)) in series.records.iter().zip(&col).enumerate() {
        rep.samples.push(Sample::new(r.t, None, v, initial));
        ok &= v <= initial * (1.0 + tol);
        if i > 0 {
            let prev = col[i - 1];
            let growth = if prev > 0.0 { (v - prev) / prev } else { v - prev };
            worst_step = worst_step.max(growth);
        }
    }
    ok &= worst_step <= tol;
    rep.measured_constant = rep.max_ratio().unwrap_or(0.0);
    rep.note(format!("largest relative increase between samples {worst_step:.3e}"));
    rep.set_outcome(ok);
    rep
}

/// `|‖θ(T)‖² + 2κ∫₀^T ‖Λ^α θ‖² dt − ‖θ⁰‖²| / ‖θ⁰‖²`.
///
/// The dissipation integral is the one accumulated by the time stepper with
/// its own Runge-Kutta weights.
pub fn energy_ledger(series: &NormSeries, tol: f64) -> InequalityReport {
    let mut rep = InequalityReport::new("energy_ledger")
        .param("tol", tol)
        .param("alpha", series.alpha)
        .param("kappa", series.kappa);
    rep.note("balance uses d/dt |theta|^2 + 2 kappa |Lambda^alpha theta|^2 = 0");
    let (Some(first), Some(last)) = (series.first(), series.last()) else {
        rep.mark_incomplete("empty series");
        return rep;
    };
    let e0 = first.l2 * first.l2;
    for r in &series.records {
        let balance = r.l2 * r.l2 + (r.dissipated - first.dissipated);
        rep.samples.push(Sample::new(r.t, None, balance, e0));
    }
    if e0 == 0.0 {
        rep.measured_constant = last.l2 * last.l2 + last.dissipated - first.dissipated;
        rep.set_outcome(rep.measured_constant == 0.0);
        return rep;
    }
    rep.measured_constant = ((last.l2 * last.l2 + last.dissipated - first.dissipated) - e0).abs() / e0;
    rep.set_outcome(rep.measured_constant <= tol);
    rep
}

/// Shell energy inequality
/// `∂_t‖θ_k‖² + cκ 2^{2kα}‖θ_k‖² ≤ C 2^{k(1−s₀)} ‖θ⁰‖_{L^p} ‖θ_k‖_{L^q} sup_l ‖Λ^{s₀}θ_l‖`
/// with `c = 1`; measures `C* = max LHS/RHS` over all shells and samples.
///
/// The time derivative is the exact rate stored with each record.
pub fn shell_inequality_check(series: &NormSeries) -> InequalityReport {
    let ex = series.exponents;
    let mut rep = InequalityReport::new("shell_inequality")
        .param("alpha", series.alpha)
        .param("kappa", series.kappa)
        .param("s0", ex.s0)
        .param("c", 1.0);
    let (Some(p), Some(q)) = (ex.lemma_p, ex.lemma_q) else {
        rep.mark_incomplete("no shell-estimate exponents for this alpha");
        return rep;
    };
    rep = rep.param("p", p).param("q", q);
    let Some(lp0) = series.lp_column(p).and_then(|c| c.first().copied()) else {
        rep.mark_incomplete(format!("series has no L^{p} samples"));
        return rep;
    };
    let mut raw = Vec::new();
    let mut negative_rhs = 0usize;
    for r in &series.records {
        let sup_l = r.shell_lambda_s0.iter().copied().fold(0.0, f64::max);
        for (i, ((&e, &rate), &lq)) in r
            .shell_l2
            .iter()
            .zip(&r.shell_energy_rate)
            .zip(&r.shell_lq)
            .enumerate()
        {
            let k = series.k_min + i as i32;
            let kf = k as f64;
            let lhs = rate + series.kappa * (2.0 * kf * series.alpha).exp2() * e * e;
            let rhs = (kf * (1.0 - ex.s0)).exp2() * lp0 * lq * sup_l;
            if rhs < 0.0 {
                negative_rhs += 1;
            }
            raw.push((r.t, k, lhs, rhs));
        }
    }
    if raw.is_empty() {
        rep.mark_incomplete("series carries no shell data");
        return rep;
    }
    let floor = RHS_FLOOR * raw.iter().map(|s| s.3).fold(0.0, f64::max);
    for (t, k, lhs, rhs) in raw {
        if rhs > floor {
            rep.samples.push(Sample::new(t, Some(k), lhs, rhs));
        } else {
            rep.skipped += 1;
            rep.samples.push(Sample { t, k: Some(k), lhs, rhs, ratio: None });
        }
    }
    rep = rep.param("rhs_floor", floor);
    match rep.max_ratio() {
        None => {
            rep.measured_constant = 0.0;
            rep.pass = true;
            rep.status = Status::Vacuous;
            rep.note("every sample fell below the floor");
        }
        Some(c) => {
            rep.measured_constant = c;
            if c <= 0.0 {
                rep.note("left side never positive; holds with any C >= 0");
            }
            rep.set_outcome(c.is_finite() && negative_rhs == 0);
        }
    }
    if negative_rhs > 0 {
        rep.note(format!("{negative_rhs} samples with negative bound side"));
    }
    rep
}

/// Running supremum `J(t) = sup_{z≤t} sup_k 2^{k s₀} ‖θ_k(z)‖` and the
/// boundedness verdict: growth over the final third of the run at most
/// [`J_FINAL_THIRD_GROWTH`]. Measures
/// `C_κ* = max_t (J(t) − 2J(0)) / ‖θ⁰‖_{L^{p_crit}}^M`, clipped at 0.
pub fn besov_functional_j(series: &NormSeries) -> (Vec<f64>, InequalityReport) {
    let mut rep = InequalityReport::new("besov_functional_J")
        .param("alpha", series.alpha)
        .param("kappa", series.kappa)
        .param("s0", series.exponents.s0);
    let mut j = Vec::with_capacity(series.len());
    let mut sup = 0.0f64;
    for r in &series.records {
        sup = sup.max(r.besov_s0);
        j.push(sup);
    }
    let (Some(first), Some(last)) = (series.records.first(), series.records.last()) else {
        rep.mark_incomplete("empty series");
        return (j, rep);
    };
    let (j0, j_end) = (j[0], *j.last().expect("nonempty"));
    let t_third = first.t + (last.t - first.t) * 2.0 / 3.0;
    let idx = series.records.iter().position(|r| r.t >= t_third).unwrap_or(0);
    let j_third = j[idx];
    let growth = if j_third > 0.0 { j_end / j_third - 1.0 } else { 0.0 };
    let denom = match (series.exponents.p_crit, series.exponents.m) {
        (Some(p), Some(m)) => series.lp_column(p).and_then(|c| c.first().copied()).map(|v| (v.powf(m), m)),
        _ => None,
    };
    for (r, &jv) in series.records.iter().zip(&j) {
        let rhs = denom.map_or(0.0, |(d, _)| d);
        rep.samples.push(Sample::new(r.t, None, (jv - 2.0 * j0).max(0.0), rhs));
    }
    rep = rep.param("J0", j0).param("J_final", j_end).param("final_third_growth", growth);
    match denom {
        Some((d, m)) => {
            rep = rep.param("M", m);
            rep.measured_constant = if d > 0.0 { (j_end - 2.0 * j0).max(0.0) / d } else { 0.0 };
        }
        None => rep.note("no Lebesgue exponent for this alpha; C_kappa not measured"),
    }
    rep.set_outcome(growth <= J_FINAL_THIRD_GROWTH);
    (j, rep)
}

/// Stability of a measured constant between two runs (for example `n` and
/// `2n`): ratio within [`CONSTANT_STABILITY_FACTOR`] either way.
pub fn constant_stability(name: &str, coarse: &InequalityReport, fine: &InequalityReport) -> InequalityReport {
    let (a, b) = (coarse.measured_constant, fine.measured_constant);
    let mut rep = InequalityReport::new(name)
        .param("reference", coarse.name.clone())
        .param("constant_coarse", a)
        .param("constant_fine", b)
        .param("factor", CONSTANT_STABILITY_FACTOR);
    if !(coarse.pass && fine.pass) {
        rep.note("an underlying check did not pass");
    }
    let ok = if a <= 0.0 && b <= 0.0 {
        rep.note("both constants nonpositive; the bound holds with C = 0 on both");
        rep.measured_constant = 1.0;
        true
    } else if a > 0.0 && b > 0.0 {
        let r = b / a;
        rep.measured_constant = r;
        (1.0 / CONSTANT_STABILITY_FACTOR..=CONSTANT_STABILITY_FACTOR).contains(&r)
    } else {
        rep.measured_constant = f64::INFINITY;
        false
    };
    rep.set_outcome(ok && coarse.pass && fine.pass && a.is_finite() && b.is_finite());
    rep
}

fn fmt_exp(p: f64) -> String {
    if p.fract() == 0.0 {
        format!("{}", p as i64)
    } else {
        format!("{p}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{run, run_from, RunOptions, SimConfig};
    use crate::io::initial::InitialDataSpec;
    use crate::spectral::{GridSpec, SpectralField};

    fn single_mode(alpha: f64, kappa: f64, t_end: f64) -> NormSeries {
        let cfg = SimConfig {
            grid: GridSpec::new(32).unwrap(),
            alpha,
            kappa,
            t_end,
            dt_max: 1e-2,
            initial_data: InitialDataSpec::SingleMode,
            ..SimConfig::default()
        };
        run(&cfg).unwrap().series
    }

    #[test]
    fn max_principle_single_mode() {
        let s = single_mode(0.75, 1.0, 1.0);
        for p in [2.0, 4.0] {
            let rep = max_principle_check(&s, p, MAX_PRINCIPLE_TOL);
            assert!(rep.pass, "{rep:?}");
            let col = s.lp_column(p).unwrap();
            assert!(col.windows(2).all(|w| w[1] < w[0]));
        }
        let short = NormSeries { records: s.records[..1].to_vec(), ..s.clone() };
        assert!(max_principle_check(&short, 2.0, MAX_PRINCIPLE_TOL).pass);
        assert_eq!(max_principle_check(&s, 7.0, 1e-4).status, Status::Incomplete);
    }

    #[test]
    fn inviscid_l2_is_conserved() {
        let cfg = SimConfig {
            grid: GridSpec::new(32).unwrap(),
            kappa: 0.0,
            t_end: 0.2,
            dt_max: 1e-2,
            initial_data: InitialDataSpec::TwoMode,
            ..SimConfig::default()
        };
        let mut theta = cfg.initial_theta().unwrap();
        theta = &theta + &SpectralField::from_modes(cfg.grid, &[((2, 1), num_complex::Complex64::new(0.3, 0.1))]).unwrap();
        let out = run_from(&cfg, theta, &RunOptions::default()).unwrap();
        let l2 = out.series.lp_column(2.0).unwrap();
        assert!((l2.last().unwrap() / l2[0] - 1.0).abs() < 1e-8);
        assert!(max_principle_check(&out.series, 2.0, MAX_PRINCIPLE_TOL).pass);
    }

    #[test]
    fn ledger_examples() {
        let s = single_mode(0.75, 1.0, 1.0);
        let rep = energy_ledger(&s, ENERGY_LEDGER_TOL);
        assert!(rep.measured_constant < 1e-8, "{}", rep.measured_constant);
        assert!(rep.pass);
        let z = single_mode(0.75, 1.0, 0.0);
        assert_eq!(energy_ledger(&z, ENERGY_LEDGER_TOL).measured_constant, 0.0);
    }

    #[test]
    fn shell_check_single_mode_and_zero() {
        let s = single_mode(0.75, 1.0, 1.0);
        let rep = shell_inequality_check(&s);
        assert!(rep.pass);
        assert!(rep.measured_constant <= 0.0);
        let cfg = SimConfig {
            grid: GridSpec::new(32).unwrap(),
            t_end: 0.1,
            initial_data: InitialDataSpec::SingleMode,
            ..SimConfig::default()
        };
        let zero = run_from(&cfg, SpectralField::zeros(cfg.grid), &RunOptions::default()).unwrap();
        let rep = shell_inequality_check(&zero.series);
        assert_eq!(rep.status, Status::Vacuous);
        assert!(rep.pass);
        assert_eq!(rep.skipped, rep.samples.len());
    }

    #[test]
    fn j_examples() {
        let s = single_mode(0.75, 1.0, 1.0);
        let (j, rep) = besov_functional_j(&s);
        assert!(j.iter().all(|&v| v == j[0]));
        assert!(rep.pass);
        assert_eq!(rep.measured_constant, 0.0);
        let cfg = SimConfig {
            grid: GridSpec::new(32).unwrap(),
            t_end: 0.1,
            ..SimConfig::default()
        };
        let zero = run_from(&cfg, SpectralField::zeros(cfg.grid), &RunOptions::default()).unwrap();
        let (j, rep) = besov_functional_j(&zero.series);
        assert!(j.iter().all(|&v| v == 0.0));
        assert!(rep.pass);
    }

    #[test]
    fn stability_comparison() {
        let mut a = InequalityReport::new("a");
        a.set_outcome(true);
        let mut b = a.clone();
        a.measured_constant = 1.0;
        b.measured_constant = 1.9;
        assert!(constant_stability("s", &a, &b).pass);
        b.measured_constant = 2.1;
        assert!(!constant_stability("s", &a, &b).pass);
        b.measured_constant = -1.0;
        assert!(!constant_stability("s", &a, &b).pass);
        a.measured_constant = 0.0;
        assert!(constant_stability("s", &a, &b).pass);
    }
}
