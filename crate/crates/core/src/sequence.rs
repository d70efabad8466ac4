use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered sequence of 0/1 outcomes, one per game.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct BinarySequence(Vec<u8>);

impl BinarySequence {
    pub fn new(outcomes: Vec<u8>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((index, &value)) = outcomes.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(Error::NonBinaryElement { index, value: value.into() });
        }
        Ok(Self(outcomes))
    }

    /// Builds a sequence from booleans (`true` is 1).
    pub fn from_bools(outcomes: impl IntoIterator<Item = bool>) -> Result<Self> {
        Self::new(outcomes.into_iter().map(u8::from).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false: a valid sequence has at least one outcome.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn outcomes(&self) -> &[u8] {
        &self.0
    }

    pub fn count(&self, symbol: u8) -> usize {
        self.0.iter().filter(|&&v| v == symbol).count()
    }

    /// 1-based positions at which `symbol` occurs.
    pub fn positions(&self, symbol: u8) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == symbol)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|v| 1 - v).collect())
    }
}

impl TryFrom<Vec<u8>> for BinarySequence {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BinarySequence> for Vec<u8> {
    fn from(s: BinarySequence) -> Self {
        s.0
    }
}

impl std::fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.iter().try_for_each(|v| write!(f, "{v}"))
    }
}

pub fn validate_sequence(raw: &[i64]) -> Result<BinarySequence> {
    if raw.is_empty() {
        return Err(Error::EmptySequence);
    }
    let outcomes = raw
        .iter()
        .enumerate()
        .map(|(index, &value)| match value {
            0 | 1 => Ok(value as u8),
            _ => Err(Error::NonBinaryElement { index, value }),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinarySequence(outcomes))
}

/// Positions of the majority symbol and the gaps between them.
///
/// `positions` are 1-based game numbers. `alpha` is the mean gap rounded up
/// and `x` counts the gaps that do not exceed it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSeries {
    pub majority: u8,
    pub k: usize,
    pub positions: Vec<usize>,
    pub gaps: Vec<usize>,
    pub alpha: usize,
    pub x: usize,
}

impl GapSeries {
    /// Builds the series from strictly increasing 1-based positions.
    ///
    /// Needs at least three positions (two gaps).
    pub fn from_positions(majority: u8, positions: Vec<usize>) -> Result<Self> {
        let k = positions.len();
        if k <= 2 {
            return Err(Error::InsufficientData(k));
        }
        if positions[0] == 0 || positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("positions must be strictly increasing and 1-based".into()));
        }
        let gaps: Vec<usize> = positions.windows(2).map(|w| w[1] - w[0]).collect();
        // ceil of (y_k - y_1) / (k - 1), the mean gap
        let alpha = (positions[k - 1] - positions[0]).div_ceil(k - 1);
        let x = gaps.iter().filter(|&&g| g <= alpha).count();
        Ok(Self { majority, k, positions, gaps, alpha, x })
    }

    pub fn gaps_f64(&self) -> Vec<f64> {
        self.gaps.iter().map(|&g| g as f64).collect()
    }
}
