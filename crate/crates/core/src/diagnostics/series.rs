//! Time series of norms sampled along a simulation.

use std::io::Write;

use serde::Serialize;

use crate::diagnostics::exponents::{compute_exponents, ExponentSet};
use crate::error::{Result, SqgError};
use crate::littlewood_paley::DyadicFilterBank;
use crate::evolution::nonlinear_term;
use crate::spectral::{GridSpec, SpectralField, PARSEVAL_CONSTANT};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRecord {
    pub t: f64,
    pub l2: f64,
    /// Node-quadrature `L^p` norms, aligned with [`NormSeries::lp_exponents`].
    pub lp: Vec<f64>,
    /// `‖Λ^α θ‖_{L²}`.
    pub h_alpha: f64,
    /// `sup_k 2^{k s₀} ‖θ_k‖_{L²}`.
    pub besov_s0: f64,
    /// Running supremum of `besov_s0` up to this sample.
    pub j: f64,
    /// `2^{k s₀} ‖θ_k‖_{L²}` per shell.
    pub shell_weighted: Vec<f64>,
    pub shell_l2: Vec<f64>,
    /// `‖θ_k‖_{L^q}` with the shell-estimate exponent `q`; empty when undefined.
    pub shell_lq: Vec<f64>,
    /// `‖Λ^{s₀} θ_k‖_{L²}` per shell.
    pub shell_lambda_s0: Vec<f64>,
    /// `d/dt ‖θ_k‖²_{L²}` per shell, evaluated from the equation at this state.
    pub shell_energy_rate: Vec<f64>,
    /// `∫₀^t 2κ ‖Λ^α θ‖² dt`, accumulated by the time stepper.
    pub dissipated: f64,
}

impl NormRecord {
    fn all_finite(&self) -> bool {
        let scalars = [self.t, self.l2, self.h_alpha, self.besov_s0, self.j, self.dissipated];
        scalars
            .iter()
            .chain(&self.lp)
            .chain(&self.shell_weighted)
            .chain(&self.shell_l2)
            .chain(&self.shell_lq)
            .chain(&self.shell_lambda_s0)
            .chain(&self.shell_energy_rate)
            .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormSeries {
    pub alpha: f64,
    pub kappa: f64,
    pub exponents: ExponentSet,
    pub lp_exponents: Vec<f64>,
    pub k_min: i32,
    pub records: Vec<NormRecord>,
}

impl NormSeries {
    pub fn new(alpha: f64, kappa: f64, lp_exponents: Vec<f64>, k_min: i32) -> Self {
        NormSeries {
            alpha,
            kappa,
            exponents: compute_exponents(alpha),
            lp_exponents,
            k_min,
            records: Vec::new(),
        }
    }

    /// Appends a record; times must increase strictly and entries be finite.
    pub fn push(&mut self, record: NormRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.t <= last.t {
                return Err(SqgError::config(format!(
                    "series times must increase strictly: {} after {}",
                    record.t, last.t
                )));
            }
        }
        if !record.all_finite() {
            return Err(SqgError::Blowup {
                time: record.t,
                reason: "non-finite diagnostic".into(),
            });
        }
        self.records.push(record);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn first(&self) -> Option<&NormRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&NormRecord> {
        self.records.last()
    }

    /// Column of `L^p` samples, if `p` was recorded.
    pub fn lp_column(&self, p: f64) -> Option<Vec<f64>> {
        let idx = self
            .lp_exponents
            .iter()
            .position(|&e| (e - p).abs() <= 1e-12 * p.abs().max(1.0))?;
        Some(self.records.iter().map(|r| r.lp[idx]).collect())
    }

    pub fn num_shells(&self) -> usize {
        self.records.first().map_or(0, |r| r.shell_weighted.len())
    }

    /// Header of the CSV form: `t, l2, lp_crit, h_alpha, besov_s0, J`, then
    /// one `shell_k` column per shell.
    pub fn csv_header(&self) -> Vec<String> {
        let mut cols: Vec<String> = ["t", "l2", "lp_crit", "h_alpha", "besov_s0", "J"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        cols.extend((0..self.num_shells()).map(|i| format!("shell_{}", self.k_min + i as i32)));
        cols
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let ser = |e: csv::Error| SqgError::Serialize(e.to_string());
        w.write_record(self.csv_header()).map_err(ser)?;
        let pcrit = self.exponents.p_crit.and_then(|p| {
            self.lp_exponents
                .iter()
                .position(|&e| (e - p).abs() <= 1e-12 * p)
        });
        for r in &self.records {
            let mut row = vec![
                fmt_f64(r.t),
                fmt_f64(r.l2),
                pcrit.map_or_else(String::new, |i| fmt_f64(r.lp[i])),
                fmt_f64(r.h_alpha),
                fmt_f64(r.besov_s0),
                fmt_f64(r.j),
            ];
            row.extend(r.shell_weighted.iter().map(|&v| fmt_f64(v)));
            w.write_record(&row).map_err(ser)?;
        }
        w.flush().map_err(|e| SqgError::Serialize(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| SqgError::Serialize(e.to_string()))
    }
}

/// Shortest round-trip representation.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Computes a [`NormRecord`] from a spectral state.
#[derive(Debug, Clone)]
pub struct NormSampler {
    bank: DyadicFilterBank,
    alpha: f64,
    kappa: f64,
    exponents: ExponentSet,
    lp_exponents: Vec<f64>,
}

impl NormSampler {
    pub fn new(grid: GridSpec, alpha: f64, kappa: f64) -> Self {
        let exponents = compute_exponents(alpha);
        let mut lp_exponents = vec![2.0];
        for p in exponents.p_crit.into_iter().chain([4.0]) {
            if !lp_exponents.iter().any(|&e| (e - p).abs() <= 1e-12 * p) {
                lp_exponents.push(p);
            }
        }
        NormSampler {
            bank: DyadicFilterBank::new(grid),
            alpha,
            kappa,
            exponents,
            lp_exponents,
        }
    }

    pub fn bank(&self) -> &DyadicFilterBank {
        &self.bank
    }

    pub fn exponents(&self) -> &ExponentSet {
        &self.exponents
    }

    pub fn empty_series(&self) -> NormSeries {
        NormSeries::new(self.alpha, self.kappa, self.lp_exponents.clone(), self.bank.k_min())
    }

    pub fn sample(&self, t: f64, theta: &SpectralField, dissipated: f64, previous_j: f64) -> Result<NormRecord> {
        let phys = theta.to_physical();
        let lp = self
            .lp_exponents
            .iter()
            .map(|&p| phys.lp_norm(p))
            .collect::<Result<Vec<_>>>()?;
        let s0 = self.exponents.s0;
        let shell_l2 = self.bank.shell_l2_norms(theta)?;
        let shell_weighted: Vec<f64> = self
            .bank
            .shell_indices()
            .zip(&shell_l2)
            .map(|(k, m)| 2f64.powf(k as f64 * s0) * m)
            .collect();
        let besov_s0 = shell_weighted.iter().copied().fold(0.0, f64::max);
        let shells = self.bank.decompose(theta)?.shells;
        let shell_lambda_s0 = shells.iter().map(|(_, f)| f.lambda_power(s0).l2_norm()).collect();
        let shell_lq = match self.exponents.lemma_q {
            Some(q) => {
                let mut out = Vec::with_capacity(shells.len());
                for pair in shells.chunks(2) {
                    if let [(_, a), (_, b)] = pair {
                        let (pa, pb) = SpectralField::to_physical_pair(a, b)?;
                        out.push(pa.lp_norm(q)?);
                        out.push(pb.lp_norm(q)?);
                    } else {
                        out.push(pair[0].1.to_physical().lp_norm(q)?);
                    }
                }
                out
            }
            None => Vec::new(),
        };
        let shell_energy_rate = self.shell_energy_rates(t, theta)?;
        Ok(NormRecord {
            t,
            l2: theta.l2_norm(),
            lp,
            h_alpha: theta.lambda_power(self.alpha).l2_norm(),
            besov_s0,
            j: previous_j.max(besov_s0),
            shell_weighted,
            shell_l2,
            shell_lq,
            shell_lambda_s0,
            shell_energy_rate,
            dissipated,
        })
    }

    /// `d/dt ‖P_k θ‖² = 2 Re⟨P_k θ, P_k θ_t⟩` with
    /// `θ_t = −κΛ^{2α}θ − J(θ)·∇θ` as advanced by the time stepper.
    fn shell_energy_rates(&self, t: f64, theta: &SpectralField) -> Result<Vec<f64>> {
        let transport = nonlinear_term(theta, t)?;
        let grid = theta.grid();
        let pointwise: Vec<f64> = grid
            .frequencies()
            .map(|(i, a, b)| {
                let c = theta.coeffs()[i];
                let r2 = (a * a + b * b) as f64;
                let damping = if r2 == 0.0 { 0.0 } else { self.kappa * r2.powf(self.alpha) };
                let dc = -c * damping - transport.coeffs()[i];
                2.0 * PARSEVAL_CONSTANT * (c.conj() * dc).re
            })
            .collect();
        Ok(self
            .bank
            .shell_indices()
            .map(|k| {
                let m = self.bank.shell_multiplier(k).expect("k in range");
                m.iter().zip(&pointwise).map(|(w, v)| w * w * v).sum()
            })
            .collect())
    }
}
