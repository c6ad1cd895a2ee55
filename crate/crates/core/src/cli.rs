//! The `sqg` command-line tool.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::diagnostics::exponents::{check_uniqueness_exponents, compute_exponents};
use crate::diagnostics::report::InequalityReport;
use crate::diagnostics::series::{NormRecord, NormSampler, NormSeries};
use crate::error::{Result, SqgError};
use crate::evolution::{run_from, RunOptions, SimConfig};
use crate::io::config::{parse_config, render_config};
use crate::io::snapshot::{load_snapshot, save_snapshot};
use crate::spectral::GridSpec;
use crate::verify::{run_battery, VerifyOptions};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SQG_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sqg", version, about = "Dissipative SQG solver and estimate checker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one configuration and write its norm series and final state.
    Run(RunArgs),
    /// Norms of a stored snapshot.
    Analyze(AnalyzeArgs),
    /// Run the verification battery.
    Verify(VerifyArgs),
    /// Print the exponent table for one alpha.
    Exponents(ExponentArgs),
    /// Repeat `run` over a grid of alpha values, one subdirectory each.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Output format; repeat for several.
    #[arg(long = "format", value_enum)]
    pub formats: Vec<Format>,
}

impl CommonArgs {
    fn formats(&self) -> Vec<Format> {
        if self.formats.is_empty() {
            vec![Format::Csv]
        } else {
            let mut f = self.formats.clone();
            f.dedup();
            f
        }
    }

    /// Configuration file (or defaults) with command-line overrides applied.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| SqgError::io(path, e))?;
                parse_config(&text)?
            }
            None => SimConfig::default(),
        };
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(k) = self.kappa {
            cfg.kappa = k;
        }
        if let Some(n) = self.n {
            cfg.grid = GridSpec::with_dealias(n, cfg.grid.dealias_fraction())?;
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also store every k-th state as a snapshot file.
    #[arg(long = "snapshot-every")]
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Snapshot file to read.
    pub snapshot: PathBuf,
    /// Write the analysis here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "format", value_enum)]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reports are written to `<out>/reports`.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long = "format", value_enum)]
    pub formats: Vec<Format>,
    /// Small grids and short runs.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ExponentArgs {
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alphas: Vec<f64>,
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::debug!("thread pool already configured: {e}");
                }
            }
            _ => log::warn!("ignoring {THREADS_ENV}={v}: not a positive integer"),
        }
    }
}

pub fn execute(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Run(a) => cmd_run(a).map(|_| EXIT_OK),
        Command::Analyze(a) => cmd_analyze(a).map(|_| EXIT_OK),
        Command::Verify(a) => cmd_verify(a),
        Command::Exponents(a) => {
            print!("{}", exponent_table(a.alpha));
            Ok(EXIT_OK)
        }
        Command::Sweep(a) => cmd_sweep(a).map(|_| EXIT_OK),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| SqgError::io(dir, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| SqgError::io(path, e))
}

fn write_series(dir: &Path, series: &NormSeries, formats: &[Format]) -> Result<()> {
    for f in formats {
        match f {
            Format::Csv => write_file(&dir.join("series.csv"), series.to_csv_string()?)?,
            Format::Json => {
                let json = serde_json::to_string_pretty(series).map_err(|e| SqgError::Serialize(e.to_string()))?;
                write_file(&dir.join("series.json"), json)?
            }
        }
    }
    Ok(())
}

fn run_into(cfg: &SimConfig, dir: &Path, formats: &[Format], snapshot_every: Option<usize>) -> Result<()> {
    create_dir(dir)?;
    write_file(&dir.join("config.txt"), render_config(cfg))?;
    let snap_dir = dir.join("snapshots");
    if snapshot_every.is_some() {
        create_dir(&snap_dir)?;
    }
    let opts = RunOptions {
        keep_snapshots_every: snapshot_every,
        snapshot_dir: snapshot_every.map(|_| snap_dir),
    };
    let out = run_from(cfg, cfg.initial_theta()?, &opts)?;
    write_series(dir, &out.series, formats)?;
    save_snapshot(&dir.join("final.sqgs"), &out.final_state, cfg.alpha, cfg.kappa)?;
    log::info!("{}: {} steps to t = {}", dir.display(), out.steps, out.final_state.time);
    Ok(())
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = args.common.sim_config()?;
    if cfg.out_of_hypothesis() {
        eprintln!(
            "note: alpha = {} ({}), kappa = {} is outside the hypotheses; results are observations",
            cfg.alpha,
            cfg.regime(),
            cfg.kappa
        );
    }
    run_into(&cfg, &args.common.out, &args.common.formats(), args.snapshot_every)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let base = args.common.sim_config()?;
    let formats = args.common.formats();
    create_dir(&args.common.out)?;
    args.alphas
        .par_iter()
        .map(|&alpha| {
            let cfg = SimConfig { alpha, ..base.clone() };
            cfg.validate()?;
            run_into(&cfg, &args.common.out.join(format!("alpha_{alpha}")), &formats, None)
        })
        .collect::<Result<Vec<()>>>()?;
    Ok(())
}

/// Norms of one state as `name, value` rows.
fn analysis_rows(rec: &NormRecord, lp_exponents: &[f64], k_min: i32) -> Vec<(String, f64)> {
    let mut rows = vec![("t".to_string(), rec.t), ("l2".into(), rec.l2)];
    for (p, v) in lp_exponents.iter().zip(&rec.lp) {
        rows.push((format!("lp_{p}"), *v));
    }
    rows.push(("h_alpha".into(), rec.h_alpha));
    rows.push(("besov_s0".into(), rec.besov_s0));
    for (i, v) in rec.shell_weighted.iter().enumerate() {
        rows.push((format!("shell_{}", k_min + i as i32), *v));
    }
    rows
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let file = load_snapshot(&args.snapshot)?;
    let grid = *file.theta.grid();
    let sampler = NormSampler::new(grid, file.alpha, file.kappa);
    let rec = sampler.sample(file.time, &file.theta, 0.0, 0.0)?;
    let series = sampler.empty_series();
    let rows = analysis_rows(&rec, &series.lp_exponents, series.k_min);
    let json = || -> Result<String> {
        let map: serde_json::Map<String, serde_json::Value> = [
            ("n".to_string(), serde_json::json!(grid.n())),
            ("alpha".to_string(), serde_json::json!(file.alpha)),
            ("kappa".to_string(), serde_json::json!(file.kappa)),
        ]
        .into_iter()
        .chain(rows.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))))
        .collect();
        serde_json::to_string_pretty(&map).map_err(|e| SqgError::Serialize(e.to_string()))
    };
    let csv = || rows.iter().map(|(k, v)| format!("{k},{v:?}\n")).collect::<String>();
    match &args.out {
        None => {
            if args.formats.contains(&Format::Json) {
                println!("{}", json()?);
            } else {
                println!("n = {}, alpha = {}, kappa = {}", grid.n(), file.alpha, file.kappa);
                for (k, v) in &rows {
                    println!("{k:<12} {v:.12e}");
                }
            }
        }
        Some(dir) => {
            create_dir(dir)?;
            let formats = if args.formats.is_empty() { vec![Format::Csv] } else { args.formats.clone() };
            for f in formats {
                match f {
                    Format::Csv => write_file(&dir.join("analysis.csv"), format!("name,value\n{}", csv()))?,
                    Format::Json => write_file(&dir.join("analysis.json"), json()?)?,
                }
            }
        }
    }
    Ok(())
}

fn write_reports(dir: &Path, reports: &[&InequalityReport], formats: &[Format]) -> Result<()> {
    create_dir(dir)?;
    for r in reports {
        for f in formats {
            match f {
                Format::Csv => write_file(&dir.join(format!("{}.csv", r.name)), r.to_csv_string()?)?,
                Format::Json => write_file(&dir.join(format!("{}.json", r.name)), r.to_json()?)?,
            }
        }
    }
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let mut opts = if args.quick { VerifyOptions::quick() } else { VerifyOptions::default() };
    if let Some(n) = args.n {
        opts.n = n;
    }
    if let Some(k) = args.kappa {
        opts.kappa = k;
    }
    if let Some(t) = args.t_end {
        opts.t_end = t;
    }
    if let Some(s) = args.seed {
        opts.seed = s;
    }
    let outcome = run_battery(&opts)?;
    let formats = if args.formats.is_empty() {
        vec![Format::Json, Format::Csv]
    } else {
        args.formats.clone()
    };
    let reports: Vec<&InequalityReport> = outcome.reports().collect();
    write_reports(&args.out.join("reports"), &reports, &formats)?;
    for c in &outcome.criteria {
        println!("{}", c.summary_line());
    }
    println!("{}", outcome.summary());
    Ok(if outcome.pass() { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// Twelve decimals with trailing zeros removed.
fn short(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// The exponent table as printed by `sqg exponents`.
pub fn exponent_table(alpha: f64) -> String {
    let e = compute_exponents(alpha);
    let show = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), short);
    let mut out = String::new();
    out.push_str(&format!("alpha    {}\n", short(alpha)));
    out.push_str(&format!("regime   {}\n", e.regime));
    out.push_str(&format!("s0       {}\n", short(e.s0)));
    out.push_str(&format!("p_crit   {}\n", show(e.p_crit)));
    out.push_str(&format!("p        {}\n", show(e.lemma_p)));
    out.push_str(&format!("q        {}\n", show(e.lemma_q)));
    out.push_str(&format!("gamma    {}\n", show(e.gamma)));
    out.push_str(&format!("a        {}\n", show(e.a)));
    out.push_str(&format!("M        {}\n", show(e.m)));
    let u = check_uniqueness_exponents(alpha, e.p_crit.unwrap_or(f64::NAN), f64::INFINITY);
    out.push_str(&format!(
        "uniqueness q=inf, p={}: {}\n",
        show(u.distinguished_p),
        if u.holds { "holds" } else { "n/a" }
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_table_for_point_six() {
        let t = exponent_table(0.6);
        for line in ["s0       0.8", "p        10", "q        2.5", "gamma    0.75", "a        2.4", "M        5"] {
            assert!(t.lines().any(|l| l == line), "{line} missing in\n{t}");
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(main_with(["sqg", "bogus"]), EXIT_USAGE);
        assert_eq!(main_with(["sqg", "exponents"]), EXIT_USAGE);
        assert_eq!(main_with(["sqg", "run", "--format", "xml"]), EXIT_USAGE);
    }
}
