//! Exponents derived from the dissipation order `α`.

use serde::Serialize;

/// Dissipation strength relative to the transport nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Supercritical,
    Critical,
    /// `1/2 < α < 3/4`
    SubcriticalLow,
    /// `α ≥ 3/4`
    SubcriticalHigh,
}

impl Regime {
    pub fn of(alpha: f64) -> Regime {
        if alpha < 0.5 {
            Regime::Supercritical
        } else if alpha == 0.5 {
            Regime::Critical
        } else if alpha < 0.75 {
            Regime::SubcriticalLow
        } else {
            Regime::SubcriticalHigh
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Supercritical => "supercritical",
            Regime::Critical => "critical",
            Regime::SubcriticalLow => "subcritical-low",
            Regime::SubcriticalHigh => "subcritical-high",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether `α` lies in the range `(1/2, 1)` covered by the global
/// well-posedness estimates.
pub fn in_hypothesis(alpha: f64) -> bool {
    alpha > 0.5 && alpha < 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentSet {
    pub alpha: f64,
    pub regime: Regime,
    /// Critical Besov smoothness `2 − 2α`.
    pub s0: f64,
    /// Critical Lebesgue exponent `2/(2α − 1)`.
    pub p_crit: Option<f64>,
    /// Shell-estimate pair, `1/p = α − 1/2`, `1/q = 1 − α`.
    pub lemma_p: Option<f64>,
    pub lemma_q: Option<f64>,
    /// Interpolation weight `(3 − 4α)/(2 − 2α)`, only for `α < 3/4`.
    pub gamma: Option<f64>,
    /// `(2 − 2α)(3 − 4α)/(2α − 1)`, only for `α < 3/4`.
    pub a: Option<f64>,
    /// Power of the Lebesgue norm in the a priori bound, `max(2, 1/(2α − 1))`.
    pub m: Option<f64>,
}

impl ExponentSet {
    pub fn is_complete(&self) -> bool {
        self.p_crit.is_some() && self.m.is_some()
    }
}

/// All exponents for `α`. Outside `(1/2, 1)` only `α`, `s₀` and the regime
/// tag are populated; `α = 1` keeps the limiting values `p_crit = 2`, `M = 2`.
pub fn compute_exponents(alpha: f64) -> ExponentSet {
    let regime = Regime::of(alpha);
    let s0 = 2.0 - 2.0 * alpha;
    let mut set = ExponentSet {
        alpha,
        regime,
        s0,
        p_crit: None,
        lemma_p: None,
        lemma_q: None,
        gamma: None,
        a: None,
        m: None,
    };
    if alpha <= 0.5 || alpha > 1.0 || alpha.is_nan() {
        return set;
    }
    let excess = 2.0 * alpha - 1.0;
    set.p_crit = Some(2.0 / excess);
    set.m = Some(f64::max(2.0, 1.0 / excess));
    if alpha < 1.0 {
        set.lemma_p = Some(1.0 / (alpha - 0.5));
        set.lemma_q = Some(1.0 / (1.0 - alpha));
    }
    if alpha < 0.75 {
        set.gamma = Some((3.0 - 4.0 * alpha) / (2.0 - 2.0 * alpha));
        set.a = Some((2.0 - 2.0 * alpha) * (3.0 - 4.0 * alpha) / excess);
    }
    set
}

/// Result of the uniqueness-class exponent test `1/p + α/q = α − 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniquenessCheck {
    pub holds: bool,
    pub residual: f64,
    /// `p` paired with `q = ∞`, i.e. `1/p = α − 1/2`, when `α > 1/2`.
    pub distinguished_p: Option<f64>,
}

/// `p ≥ 1`, `q > 1` and `1/p + α/q = α − 1/2` to 1e-12; `q` may be infinite.
pub fn check_uniqueness_exponents(alpha: f64, p: f64, q: f64) -> UniquenessCheck {
    let residual = (1.0 / p + alpha / q - (alpha - 0.5)).abs();
    UniquenessCheck {
        holds: p >= 1.0 && q > 1.0 && residual <= 1e-12,
        residual,
        distinguished_p: (alpha > 0.5).then(|| 1.0 / (alpha - 0.5)),
    }
}
