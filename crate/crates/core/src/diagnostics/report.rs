//! Outcome of one numerical inequality check.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Result, SqgError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Not enough data to decide.
    Incomplete,
    /// Every sample was skipped; the inequality holds trivially.
    Vacuous,
    /// Run outside the hypotheses; recorded, never a failure.
    Observation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub k: Option<i32>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, absent when the bound side sits below the floor.
    pub ratio: Option<f64>,
}

impl Sample {
    pub fn new(t: f64, k: Option<i32>, lhs: f64, rhs: f64) -> Self {
        let ratio = (rhs > 0.0).then(|| lhs / rhs);
        Sample { t, k, lhs, rhs, ratio }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Param {
    Num(f64),
    Text(String),
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Num(v)
    }
}

impl From<usize> for Param {
    fn from(v: usize) -> Self {
        Param::Num(v as f64)
    }
}

impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Param::Text(v.to_string())
    }
}

impl From<String> for Param {
    fn from(v: String) -> Self {
        Param::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub parameters: BTreeMap<String, Param>,
    pub samples: Vec<Sample>,
    /// Largest sample ratio, or the checked residual for identity checks.
    pub measured_constant: f64,
    pub pass: bool,
    pub status: Status,
    /// Samples dropped because the bound side was below the floor.
    pub skipped: usize,
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>) -> Self {
        InequalityReport {
            name: name.into(),
            parameters: BTreeMap::new(),
            samples: Vec::new(),
            measured_constant: 0.0,
            pass: false,
            status: Status::Incomplete,
            skipped: 0,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Param>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn set_outcome(&mut self, pass: bool) {
        self.pass = pass;
        self.status = if pass { Status::Pass } else { Status::Fail };
    }

    pub fn mark_incomplete(&mut self, why: impl Into<String>) {
        self.pass = false;
        self.status = Status::Incomplete;
        self.note(why);
    }

    /// Downgrades a failure to an observation; used out of hypothesis.
    pub fn as_observation(mut self) -> Self {
        if self.status != Status::Pass && self.status != Status::Vacuous {
            self.status = Status::Observation;
        }
        self.pass = true;
        self
    }

    /// Largest ratio over the samples, `None` if no sample has one.
    pub fn max_ratio(&self) -> Option<f64> {
        self.samples.iter().filter_map(|s| s.ratio).reduce(f64::max)
    }

    pub fn summary_line(&self) -> String {
        let verdict = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Incomplete => "INCOMPLETE",
            Status::Vacuous => "PASS (vacuous)",
            Status::Observation => "OBSERVED",
        };
        format!("{verdict:<14} {:<32} measured {:.6e}", self.name, self.measured_constant)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| SqgError::Serialize(e.to_string()))
    }

    /// One row per sample: `t, k, lhs, rhs, ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let ser = |e: csv::Error| SqgError::Serialize(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "k", "lhs", "rhs", "ratio"]).map_err(ser)?;
        for s in &self.samples {
            w.write_record([
                format!("{:?}", s.t),
                s.k.map_or_else(String::new, |k| k.to_string()),
                format!("{:?}", s.lhs),
                format!("{:?}", s.rhs),
                s.ratio.map_or_else(String::new, |r| format!("{r:?}")),
            ])
            .map_err(ser)?;
        }
        w.flush().map_err(|e| SqgError::Serialize(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| SqgError::Serialize(e.to_string()))
    }
}
