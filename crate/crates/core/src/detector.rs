//! The gap-based pattern detector.
//!
//! 1. Take the more frequent symbol and its 1-based positions.
//! 2. Form the gaps between consecutive positions and round their mean up
//!    to an integer threshold; count the gaps at or below it.
//! 3. Exact binomial test of that count against proportion 1/2. A
//!    significant result means a pattern is present.
//! 4. Kendall tau between the gaps and time `(1, ..., k-1)`, one-sided in
//!    the direction of tau's sign. Shrinking gaps (tau < 0) mean the symbol
//!    occurs more and more often: an increasing direction.
//! 5. Only if step 4 is not significant: Siegel-Tukey test of the gaps
//!    against a constant sample equal to their median. A non-significant
//!    result is read as a constant direction. That reading treats failure to
//!    reject as evidence, so it is a label and not an inference.

use serde::{Deserialize, Serialize};

use crate::classic_tests::{binomial_exact_test, kendall_tau_test, KendallMode};
use crate::error::{Error, Result};
use crate::numeric::median;
use crate::result::{Alternative, HypothesisResult, SignificanceLevel, TestMethod};
use crate::scale_tests::{rank_sum_test, RankScheme};
use crate::sequence::{BinarySequence, GapSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MajorityTieBreak {
    #[default]
    PreferOnes,
    PreferZeros,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinomialAlternative {
    #[default]
    Greater,
    TwoSided,
}

impl From<BinomialAlternative> for Alternative {
    fn from(a: BinomialAlternative) -> Self {
        match a {
            BinomialAlternative::Greater => Alternative::Greater,
            BinomialAlternative::TwoSided => Alternative::TwoSided,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub alpha_level: SignificanceLevel,
    pub tie_scheme: RankScheme,
    pub binomial_alternative: BinomialAlternative,
    pub majority_tie_break: MajorityTieBreak,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            alpha_level: SignificanceLevel::default(),
            tie_scheme: RankScheme::Vegelius,
            binomial_alternative: BinomialAlternative::Greater,
            majority_tie_break: MajorityTieBreak::PreferOnes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
    None,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Increasing => "increasing",
            Self::Decreasing => "decreasing",
            Self::Constant => "constant",
            Self::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternVerdict {
    pub pattern_detected: bool,
    pub direction: Direction,
    #[serde(rename = "stages")]
    pub stage_results: Vec<HypothesisResult>,
    #[serde(rename = "gaps")]
    pub gap_series: Option<GapSeries>,
    pub insufficient_data: bool,
}

impl PatternVerdict {
    fn insufficient() -> Self {
        Self {
            pattern_detected: false,
            direction: Direction::None,
            stage_results: Vec::new(),
            gap_series: None,
            insufficient_data: true,
        }
    }

    /// True when the Kendall stage found a significant direction.
    pub fn direction_detected(&self) -> bool {
        matches!(self.direction, Direction::Increasing | Direction::Decreasing)
    }

    pub fn stage(&self, method: TestMethod) -> Option<&HypothesisResult> {
        self.stage_results.iter().find(|r| r.method == method)
    }
}

pub fn extract_gaps(seq: &BinarySequence, tie_break: MajorityTieBreak) -> Result<GapSeries> {
    let ones = seq.count(1);
    let zeros = seq.len() - ones;
    let majority = match ones.cmp(&zeros) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => match tie_break {
            MajorityTieBreak::PreferOnes => 1,
            MajorityTieBreak::PreferZeros => 0,
        },
    };
    GapSeries::from_positions(majority, seq.positions(majority))
}

fn constant_kendall_stage() -> HypothesisResult {
    let mut r = HypothesisResult::new(TestMethod::Kendall, 0.0, 1.0, Alternative::AutoDirectional)
        .with("tau", 0.0)
        .with("concordant", 0usize)
        .with("discordant", 0usize)
        .with("tie_correction_used", true);
    r.degenerate = true;
    r
}

/// Runs every stage of the detector on `seq`.
///
/// Too few majority symbols (fewer than two gaps) give a verdict with
/// `insufficient_data` set instead of an error.
pub fn run_detector(seq: &BinarySequence, config: &DetectorConfig) -> Result<PatternVerdict> {
    let gaps = match extract_gaps(seq, config.majority_tie_break) {
        Ok(g) => g,
        Err(Error::InsufficientData(_)) => return Ok(PatternVerdict::insufficient()),
        Err(e) => return Err(e),
    };
    let level = config.alpha_level;
    let trials = (gaps.k - 1) as u64;

    let binomial = binomial_exact_test(trials, gaps.x as u64, 0.5, config.binomial_alternative.into())?;
    let pattern_detected = binomial.is_significant(level);

    let y = gaps.gaps_f64();
    let times: Vec<f64> = (1..=y.len()).map(|t| t as f64).collect();
    let kendall = match kendall_tau_test(&y, &times, KendallMode::AutoDirectional) {
        Ok(r) => r,
        Err(Error::ConstantValues) => constant_kendall_stage(),
        Err(e) => return Err(e),
    };
    let kendall_significant = !kendall.degenerate && kendall.is_significant(level);
    let tau = kendall.statistic;

    let mut stage_results = vec![binomial, kendall];
    let direction = if kendall_significant {
        if tau < 0.0 {
            Direction::Increasing
        } else {
            Direction::Decreasing
        }
    } else {
        let centre = median(&y).expect("at least two gaps");
        let constant = vec![centre; y.len()];
        let scale = rank_sum_test(&y, &constant, config.tie_scheme, Alternative::TwoSided)?;
        let significant = scale.is_significant(level);
        stage_results.push(scale);
        if significant {
            Direction::None
        } else {
            Direction::Constant
        }
    };

    Ok(PatternVerdict {
        pattern_detected,
        direction,
        stage_results,
        gap_series: Some(gaps),
        insufficient_data: false,
    })
}
