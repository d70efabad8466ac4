//! Pattern detection in ordered binary (win/loss) sequences.
//!
//! The detector works on the gaps between consecutive occurrences of the
//! majority symbol: an exact binomial test on how many gaps fall at or below
//! the rounded-up mean gap, a Kendall tau test of the gaps against time for
//! direction, and a Siegel-Tukey scale test (classical or Vegelius
//! tie-adjusted ranking) against a constant median sample.
//!
//! Every test is implemented here directly. The [`power`] module runs seeded
//! Monte Carlo power studies against the Wald-Wolfowitz runs test; with the
//! `parallel` feature (on by default) trials are spread over a rayon pool,
//! and results are identical to the serial path.

pub mod cli;
pub mod detector;
pub mod error;
pub mod numeric;
pub mod power;
pub mod result;
pub mod scale_tests;
pub mod sequence;
pub mod trend_sim;

pub use classic_tests::{binomial_exact_test, kendall_tau_test, runs_test, KendallMode, RunsDecomposition};
pub use detector::{extract_gaps, run_detector, DetectorConfig, Direction, MajorityTieBreak, PatternVerdict};
pub use error::{Error, Result};
pub use power::{compare_methods, estimate_power, Execution, Method, PowerCurve, PowerStudySpec, RejectionRule};
pub use result::{Alternative, DetailValue, HypothesisResult, SignificanceLevel, TestMethod};
pub use scale_tests::{rank_sum_test, siegel_tukey_ranks, vegelius_ranks, RankAssignment, RankScheme};
pub use sequence::{validate_sequence, BinarySequence, GapSeries};
pub use trend_sim::{simulate_sequence, stage_probability, SeedSpec, TrendModel};
