use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Runs,
    Binomial,
    Kendall,
    SiegelTukey,
    SiegelTukeyVegelius,
}

/// Alternative hypothesis of a test.
///
/// `AutoDirectional` only appears on a Kendall result whose tau is exactly
/// zero; otherwise the auto mode records the side it picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    TwoSided,
    Greater,
    Less,
    AutoDirectional,
}

impl std::fmt::Display for Alternative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::TwoSided => "two_sided",
            Self::Greater => "greater",
            Self::Less => "less",
            Self::AutoDirectional => "auto_directional",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DetailValue {
    Flag(bool),
    Int(i64),
    Real(f64),
}

impl DetailValue {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Self::Int(v) => Some(v as f64),
            Self::Real(v) => Some(v),
            Self::Flag(_) => None,
        }
    }
}

impl From<bool> for DetailValue {
    fn from(v: bool) -> Self {
        Self::Flag(v)
    }
}

impl From<i64> for DetailValue {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<usize> for DetailValue {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<u64> for DetailValue {
    fn from(v: u64) -> Self {
        Self::Int(v as i64)
    }
}

impl From<f64> for DetailValue {
    fn from(v: f64) -> Self {
        Self::Real(v)
    }
}

/// Outcome of a single hypothesis test.
///
/// Detail keys per method:
/// - `runs`: `R`, `n1`, `n2`, `expected_R`, `var_R`
/// - `binomial`: `trials`, `successes`, `p0`
/// - `kendall`: `tau`, `concordant`, `discordant`, `tie_correction_used`
/// - `siegel_tukey`, `siegel_tukey_vegelius`: `rank_sum_a`, `rank_sum_b`,
///   `exact_used`, `tie_groups`
///
/// `degenerate` marks a result whose statistic has no spread (fully tied
/// rank-sum pool, constant Kendall values); its p-value is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisResult {
    pub method: TestMethod,
    pub statistic: f64,
    pub p_value: f64,
    pub alternative: Alternative,
    pub detail: BTreeMap<String, DetailValue>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl HypothesisResult {
    pub(crate) fn new(method: TestMethod, statistic: f64, p_value: f64, alternative: Alternative) -> Self {
        Self {
            method,
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            alternative,
            detail: BTreeMap::new(),
            degenerate: false,
        }
    }

    pub(crate) fn with(mut self, key: &str, value: impl Into<DetailValue>) -> Self {
        self.detail.insert(key.to_owned(), value.into());
        self
    }

    pub fn detail_f64(&self, key: &str) -> Option<f64> {
        self.detail.get(key).and_then(DetailValue::as_f64)
    }

    pub fn is_significant(&self, level: SignificanceLevel) -> bool {
        self.p_value < level.get()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SignificanceLevel(f64);

impl SignificanceLevel {
    pub fn new(level: f64) -> Result<Self> {
        if level > 0.0 && level < 1.0 {
            Ok(Self(level))
        } else {
            Err(Error::InvalidSignificance(level))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for SignificanceLevel {
    fn default() -> Self {
        Self(0.05)
    }
}

impl TryFrom<f64> for SignificanceLevel {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SignificanceLevel> for f64 {
    fn from(s: SignificanceLevel) -> f64 {
        s.0
    }
}
