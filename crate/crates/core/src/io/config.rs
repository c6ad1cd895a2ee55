//! Flat `key = value` configuration files.
//!
//! Blank lines and text after `#` are ignored. Recognised keys:
//!
//! | key | value |
//! |-----|-------|
//! | `alpha` | dissipation order in `[0, 1]` |
//! | `kappa` | dissipation coefficient, `≥ 0` |
//! | `n` | grid points per axis, power of two `≥ 16` |
//! | `t_end` | final time, `≥ 0` |
//! | `dt` | `cfl` or a fixed step |
//! | `cfl` | CFL number |
//! | `dt_max` | cap on CFL steps |
//! | `diagnostic_stride` | steps between norm samples |
//! | `dealias_fraction` | retained fraction of `n/2` |
//! | `seed` | random seed |
//! | `initial_data` | `single_mode`, `one_dimensional`, `two_mode`, `random_spectrum` or `snapshot` |
//! | `slope` | spectral slope `β`, or `auto` for `s₀ + 1` |
//! | `band_lo`, `band_hi` | radial band of the random spectrum |
//! | `target` | `besov`, `lebesgue` or `none` |
//! | `target_value` | value of the target norm |
//! | `snapshot` | path of a snapshot file to start from |

use std::collections::HashMap;
use std::path::PathBuf;

use crate::error::{Result, SqgError};
use crate::evolution::{DtPolicy, SimConfig};
use crate::io::initial::{InitialDataSpec, RandomSpectrum, TargetNorm};
use crate::spectral::GridSpec;

const KEYS: &[&str] = &[
    "alpha",
    "kappa",
    "n",
    "t_end",
    "dt",
    "cfl",
    "dt_max",
    "diagnostic_stride",
    "dealias_fraction",
    "seed",
    "initial_data",
    "slope",
    "band_lo",
    "band_hi",
    "target",
    "target_value",
    "snapshot",
];

struct Entry {
    line: usize,
    value: String,
}

fn key_error(line: usize, key: &str, reason: impl Into<String>) -> SqgError {
    SqgError::ConfigKey {
        line,
        key: key.to_string(),
        reason: reason.into(),
    }
}

pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| SqgError::config(format!("line {line}: expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let known = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| key_error(line, key, "unknown key"))?;
        if let Some(prev) = entries.get(known) {
            return Err(key_error(line, key, format!("already set on line {}", prev.line)));
        }
        entries.insert(
            known,
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    build(&entries)
}

fn num<T: std::str::FromStr>(entries: &HashMap<&str, Entry>, key: &str) -> Result<Option<(T, usize)>> {
    match entries.get(key) {
        None => Ok(None),
        Some(e) => e
            .value
            .parse::<T>()
            .map(|v| Some((v, e.line)))
            .map_err(|_| key_error(e.line, key, format!("cannot parse `{}`", e.value))),
    }
}

fn checked_f64(
    entries: &HashMap<&str, Entry>,
    key: &str,
    default: f64,
    ok: impl Fn(f64) -> bool,
    what: &str,
) -> Result<f64> {
    match num::<f64>(entries, key)? {
        None => Ok(default),
        Some((v, _)) if ok(v) && v.is_finite() => Ok(v),
        Some((v, line)) => Err(key_error(line, key, format!("{v} is out of range: {what}"))),
    }
}

fn build(entries: &HashMap<&str, Entry>) -> Result<SimConfig> {
    let d = SimConfig::default();
    let alpha = checked_f64(entries, "alpha", d.alpha, |v| (0.0..=1.0).contains(&v), "must lie in [0, 1]")?;
    let kappa = checked_f64(entries, "kappa", d.kappa, |v| v >= 0.0, "must be non-negative")?;
    let t_end = checked_f64(entries, "t_end", d.t_end, |v| v >= 0.0, "must be non-negative")?;
    let cfl_number = checked_f64(entries, "cfl", d.cfl_number, |v| v > 0.0, "must be positive")?;
    let dt_max = checked_f64(entries, "dt_max", d.dt_max, |v| v > 0.0, "must be positive")?;
    let fraction = checked_f64(
        entries,
        "dealias_fraction",
        d.grid.dealias_fraction(),
        |v| v > 0.0 && v <= 1.0,
        "must lie in (0, 1]",
    )?;

    let n = match num::<usize>(entries, "n")? {
        None => d.grid.n(),
        Some((v, _)) => v,
    };
    let grid = GridSpec::with_dealias(n, fraction).map_err(|e| {
        let line = entries.get("n").or(entries.get("dealias_fraction")).map_or(0, |e| e.line);
        key_error(line, "n", e.to_string())
    })?;

    let dt_policy = match entries.get("dt") {
        None => d.dt_policy,
        Some(e) if e.value.eq_ignore_ascii_case("cfl") => DtPolicy::Cfl,
        Some(e) => match e.value.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => DtPolicy::Fixed(v),
            _ => return Err(key_error(e.line, "dt", format!("expected `cfl` or a positive step, got `{}`", e.value))),
        },
    };
    let diagnostic_stride = match num::<usize>(entries, "diagnostic_stride")? {
        None => d.diagnostic_stride,
        Some((0, line)) => return Err(key_error(line, "diagnostic_stride", "must be at least 1")),
        Some((v, _)) => v,
    };
    let seed = num::<u64>(entries, "seed")?.map_or(d.seed, |(v, _)| v);

    let initial_data = initial_data(entries)?;
    let cfg = SimConfig {
        grid,
        alpha,
        kappa,
        t_end,
        dt_policy,
        cfl_number,
        dt_max,
        diagnostic_stride,
        initial_data,
        seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn initial_data(entries: &HashMap<&str, Entry>) -> Result<InitialDataSpec> {
    let random_keys = ["slope", "band_lo", "band_hi", "target", "target_value"];
    let kind = entries.get("initial_data");
    let kind_name = kind.map_or("random_spectrum", |e| e.value.as_str());
    let kind_line = kind.map_or(0, |e| e.line);
    if kind_name != "random_spectrum" {
        if let Some(k) = random_keys.iter().find(|k| entries.contains_key(*k)) {
            return Err(key_error(entries[k].line, k, "only valid with initial_data = random_spectrum"));
        }
    }
    if kind_name != "snapshot" {
        if let Some(e) = entries.get("snapshot") {
            return Err(key_error(e.line, "snapshot", "only valid with initial_data = snapshot"));
        }
    }
    match kind_name {
        "single_mode" => Ok(InitialDataSpec::SingleMode),
        "one_dimensional" => Ok(InitialDataSpec::OneDimensional),
        "two_mode" => Ok(InitialDataSpec::TwoMode),
        "snapshot" => match entries.get("snapshot") {
            Some(e) => Ok(InitialDataSpec::Snapshot(PathBuf::from(&e.value))),
            None => Err(key_error(kind_line, "initial_data", "snapshot data needs a `snapshot` path")),
        },
        "random_spectrum" => {
            let d = RandomSpectrum::default();
            let slope = match entries.get("slope") {
                None => d.slope,
                Some(e) if e.value == "auto" => None,
                Some(e) => match e.value.parse::<f64>() {
                    Ok(v) if v.is_finite() => Some(v),
                    _ => return Err(key_error(e.line, "slope", format!("cannot parse `{}`", e.value))),
                },
            };
            let band_lo = checked_f64(entries, "band_lo", d.band_lo, |v| v > 0.0, "must be positive")?;
            let band_hi = checked_f64(entries, "band_hi", d.band_hi, |v| v > 0.0, "must be positive")?;
            if band_lo > band_hi {
                let line = entries.get("band_lo").or(entries.get("band_hi")).map_or(0, |e| e.line);
                return Err(key_error(line, "band_lo", format!("empty band [{band_lo}, {band_hi}]")));
            }
            let value = checked_f64(entries, "target_value", 1.0, |v| v > 0.0, "must be positive")?;
            let target = match entries.get("target").map(|e| (e.value.as_str(), e.line)) {
                None | Some(("besov", _)) => TargetNorm::Besov(value),
                Some(("lebesgue", _)) => TargetNorm::Lebesgue(value),
                Some(("none", _)) => TargetNorm::Unscaled,
                Some((other, line)) => {
                    return Err(key_error(line, "target", format!("expected besov, lebesgue or none, got `{other}`")))
                }
            };
            Ok(InitialDataSpec::RandomSpectrum(RandomSpectrum {
                slope,
                band_lo,
                band_hi,
                target,
            }))
        }
        other => Err(key_error(kind_line, "initial_data", format!("unknown kind `{other}`"))),
    }
}

/// Canonical text form; parsing it gives back the same configuration.
pub fn render_config(cfg: &SimConfig) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    put("alpha", format!("{:?}", cfg.alpha));
    put("kappa", format!("{:?}", cfg.kappa));
    put("n", cfg.grid.n().to_string());
    put("dealias_fraction", format!("{:?}", cfg.grid.dealias_fraction()));
    put("t_end", format!("{:?}", cfg.t_end));
    put(
        "dt",
        match cfg.dt_policy {
            DtPolicy::Cfl => "cfl".into(),
            DtPolicy::Fixed(dt) => format!("{dt:?}"),
        },
    );
    put("cfl", format!("{:?}", cfg.cfl_number));
    put("dt_max", format!("{:?}", cfg.dt_max));
    put("diagnostic_stride", cfg.diagnostic_stride.to_string());
    put("seed", cfg.seed.to_string());
    put("initial_data", cfg.initial_data.kind_name().into());
    match &cfg.initial_data {
        InitialDataSpec::RandomSpectrum(r) => {
            put("slope", r.slope.map_or("auto".into(), |s| format!("{s:?}")));
            put("band_lo", format!("{:?}", r.band_lo));
            put("band_hi", format!("{:?}", r.band_hi));
            match r.target {
                TargetNorm::Unscaled => put("target", "none".into()),
                TargetNorm::Besov(v) => {
                    put("target", "besov".into());
                    put("target_value", format!("{v:?}"));
                }
                TargetNorm::Lebesgue(v) => {
                    put("target", "lebesgue".into());
                    put("target_value", format!("{v:?}"));
                }
            }
        }
        InitialDataSpec::Snapshot(p) => put("snapshot", p.display().to_string()),
        _ => {}
    }
    out
}
