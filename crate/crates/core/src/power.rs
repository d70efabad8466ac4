//! Monte Carlo size and power estimation.
//!
//! Every (n, b) cell simulates `trials` sequences from the trend model.
//! Trial `t` always uses stream `(base_seed, t)`, whatever the method, n or
//! b, so all methods are compared on the same sequences. Trials that a
//! method cannot evaluate (a single-symbol sequence for the runs test, fewer
//! than two gaps for the detector) count as non-rejections and are tallied
//! in `skipped`.
//!
//! Aggregation is a count of booleans, so serial and parallel execution
//! produce identical results.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::classic_tests::runs_test;
use crate::detector::{run_detector, DetectorConfig, MajorityTieBreak};
use crate::error::{Error, Result};
use crate::result::{Alternative, SignificanceLevel};
use crate::scale_tests::RankScheme;
use crate::sequence::BinarySequence;
use crate::trend_sim::{simulate_sequence, SeedSpec, TrendModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Runs,
    Proposed,
    ProposedVegelius,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Runs, Method::Proposed, Method::ProposedVegelius];

    pub fn name(self) -> &'static str {
        match self {
            Self::Runs => "runs",
            Self::Proposed => "proposed",
            Self::ProposedVegelius => "proposed_vegelius",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What counts as "randomness rejected" for the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionRule {
    /// Binomial stage significant, or Kendall stage significant.
    #[default]
    BinomialOrKendall,
    BinomialOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Uses the current rayon pool; same as `Serial` without the `parallel` feature.
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerStudySpec {
    pub n_values: Vec<usize>,
    pub b_values: Vec<f64>,
    pub a: f64,
    pub c: f64,
    pub trials: u64,
    pub alpha_level: SignificanceLevel,
    pub base_seed: u64,
    pub methods: Vec<Method>,
    pub rejection_rule: RejectionRule,
    pub runs_alternative: Alternative,
}

impl Default for PowerStudySpec {
    fn default() -> Self {
        Self {
            n_values: vec![20],
            b_values: (1..=10).map(|i| i as f64 / 100.0).collect(),
            a: 0.5,
            c: 0.0,
            trials: 1000,
            alpha_level: SignificanceLevel::default(),
            base_seed: 0,
            methods: Method::ALL.to_vec(),
            rejection_rule: RejectionRule::default(),
            runs_alternative: Alternative::TwoSided,
        }
    }
}

impl PowerStudySpec {
    /// Checks the spec and returns sorted, de-duplicated (methods, n, b) grids.
    fn grids(&self) -> Result<(Vec<Method>, Vec<usize>, Vec<f64>)> {
        if self.trials == 0 {
            return Err(Error::InvalidStudy("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() || self.b_values.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidStudy("n grid, b grid and method list must be nonempty".into()));
        }
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        let mut ns = self.n_values.clone();
        ns.sort();
        ns.dedup();
        let mut bs = self.b_values.clone();
        if bs.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidStudy("b values must be finite".into()));
        }
        bs.sort_by(f64::total_cmp);
        bs.dedup();
        for &n in &ns {
            for &b in &bs {
                TrendModel::new(self.a, b, self.c, n)?;
            }
        }
        Ok((methods, ns, bs))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub b: f64,
    pub trials: u64,
    pub rejections: u64,
    pub rejection_rate: f64,
    pub standard_error: f64,
    pub skipped: u64,
    /// Per-trial rejections, used for paired comparisons.
    #[serde(skip)]
    pub outcomes: Vec<bool>,
}

impl PowerRow {
    fn from_outcomes(b: f64, outcomes: Vec<bool>, skipped: u64) -> Self {
        let trials = outcomes.len() as u64;
        let rejections = outcomes.iter().filter(|&&r| r).count() as u64;
        let rate = rejections as f64 / trials as f64;
        Self {
            b,
            trials,
            rejections,
            rejection_rate: rate,
            standard_error: (rate * (1.0 - rate) / trials as f64).sqrt(),
            skipped,
            outcomes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub method: Method,
    pub n: usize,
    pub rows: Vec<PowerRow>,
}

const REJECT: u8 = 1;
const SKIP: u8 = 2;

struct Evaluator {
    level: SignificanceLevel,
    rule: RejectionRule,
    runs_alternative: Alternative,
}

impl Evaluator {
    fn evaluate(&self, method: Method, seq: &BinarySequence) -> u8 {
        let outcome = match method {
            Method::Runs => runs_test(seq, self.runs_alternative).map(|r| r.is_significant(self.level)),
            Method::Proposed | Method::ProposedVegelius => {
                let config = DetectorConfig {
                    alpha_level: self.level,
                    tie_scheme: if method == Method::Proposed { RankScheme::SiegelTukey } else { RankScheme::Vegelius },
                    binomial_alternative: Default::default(),
                    majority_tie_break: MajorityTieBreak::PreferOnes,
                };
                match run_detector(seq, &config) {
                    Ok(v) if v.insufficient_data => return SKIP,
                    Ok(v) => Ok(match self.rule {
                        RejectionRule::BinomialOrKendall => v.pattern_detected || v.direction_detected(),
                        RejectionRule::BinomialOnly => v.pattern_detected,
                    }),
                    Err(e) => Err(e),
                }
            }
        };
        match outcome {
            Ok(true) => REJECT,
            Ok(false) => 0,
            Err(_) => SKIP,
        }
    }

    /// One flag byte per method for trial `t`.
    fn trial(&self, model: &TrendModel, base_seed: u64, t: u64, methods: &[Method]) -> Vec<u8> {
        let seq = simulate_sequence(model, SeedSpec::new(base_seed, t));
        methods.iter().map(|&m| self.evaluate(m, &seq)).collect()
    }
}

fn run_trials<F>(trials: u64, execution: Execution, f: F) -> Vec<Vec<u8>>
where
    F: Fn(u64) -> Vec<u8> + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..trials).into_par_iter().map(f).collect()
        }
        _ => (0..trials).map(f).collect(),
    }
}

pub fn estimate_power(spec: &PowerStudySpec) -> Result<Vec<PowerCurve>> {
    estimate_power_with(spec, Execution::default())
}

/// Estimates rejection rates for every (method, n, b) cell.
///
/// Curves come out ordered by method, then n; rows by ascending b.
pub fn estimate_power_with(spec: &PowerStudySpec, execution: Execution) -> Result<Vec<PowerCurve>> {
    let (methods, ns, bs) = spec.grids()?;
    let evaluator = Evaluator {
        level: spec.alpha_level,
        rule: spec.rejection_rule,
        runs_alternative: spec.runs_alternative,
    };
    let mut cells: BTreeMap<(Method, usize), Vec<PowerRow>> = BTreeMap::new();
    for &n in &ns {
        for &b in &bs {
            let model = TrendModel::new(spec.a, b, spec.c, n)?;
            let flags = run_trials(spec.trials, execution, |t| evaluator.trial(&model, spec.base_seed, t, &methods));
            for (mi, &method) in methods.iter().enumerate() {
                let outcomes: Vec<bool> = flags.iter().map(|f| f[mi] & REJECT != 0).collect();
                let skipped = flags.iter().filter(|f| f[mi] & SKIP != 0).count() as u64;
                cells.entry((method, n)).or_default().push(PowerRow::from_outcomes(b, outcomes, skipped));
            }
        }
    }
    Ok(cells.into_iter().map(|((method, n), rows)| PowerCurve { method, n, rows }).collect())
}

pub const CSV_HEADER: &str = "method,n,b,trials,rejections,power,se,skipped";

pub fn write_csv<W: Write>(curves: &[PowerCurve], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for curve in curves {
        for row in &curve.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{}",
                curve.method, curve.n, row.b, row.trials, row.rejections, row.rejection_rate, row.standard_error, row.skipped
            )?;
        }
    }
    Ok(())
}

pub fn to_csv(curves: &[PowerCurve]) -> String {
    let mut buf = Vec::new();
    write_csv(curves, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDifference {
    pub first: Method,
    pub second: Method,
    pub difference: f64,
    pub standard_error: f64,
    /// Whether the standard error uses per-trial pairing.
    pub paired: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub b: f64,
    pub power: Vec<f64>,
    pub differences: Vec<MethodDifference>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub methods: Vec<Method>,
    pub rows: Vec<ComparisonRow>,
}

fn difference(first: (Method, &PowerRow), second: (Method, &PowerRow)) -> MethodDifference {
    let (r1, r2) = (first.1, second.1);
    let diff = r1.rejection_rate - r2.rejection_rate;
    let paired = !r1.outcomes.is_empty() && r1.outcomes.len() == r2.outcomes.len();
    let standard_error = if paired {
        let t = r1.outcomes.len() as f64;
        let d: Vec<f64> = r1
            .outcomes
            .iter()
            .zip(&r2.outcomes)
            .map(|(&x, &y)| f64::from(u8::from(x)) - f64::from(u8::from(y)))
            .collect();
        let mean = d.iter().sum::<f64>() / t;
        let var = d.iter().map(|v| v * v).sum::<f64>() / t - mean * mean;
        (var.max(0.0) / t).sqrt()
    } else {
        (r1.standard_error.powi(2) + r2.standard_error.powi(2)).sqrt()
    };
    MethodDifference { first: first.0, second: second.0, difference: diff, standard_error, paired }
}

/// Lines up curves of different methods on their shared (n, b) grid.
///
/// Differences are taken for every ordered pair of methods (first listed
/// minus later listed). The standard error is paired when both cells carry
/// per-trial outcomes of the same length.
pub fn compare_methods(curves: &[PowerCurve]) -> Result<ComparisonTable> {
    let mut by_method: BTreeMap<Method, BTreeMap<usize, &PowerCurve>> = BTreeMap::new();
    let mut methods = Vec::new();
    for c in curves {
        if !methods.contains(&c.method) {
            methods.push(c.method);
        }
        if by_method.entry(c.method).or_default().insert(c.n, c).is_some() {
            return Err(Error::InvalidInput(format!("duplicate curve for {} at n = {}", c.method, c.n)));
        }
    }
    let Some(reference) = by_method.get(&methods.first().copied().ok_or(Error::GridMismatch)?) else {
        return Err(Error::GridMismatch);
    };
    let grid: Vec<(usize, Vec<f64>)> =
        reference.iter().map(|(&n, c)| (n, c.rows.iter().map(|r| r.b).collect())).collect();
    for m in &methods {
        let curves = &by_method[m];
        let this: Vec<(usize, Vec<f64>)> =
            curves.iter().map(|(&n, c)| (n, c.rows.iter().map(|r| r.b).collect())).collect();
        if this != grid {
            return Err(Error::GridMismatch);
        }
    }

    let mut rows = Vec::new();
    for (n, bs) in &grid {
        for (bi, &b) in bs.iter().enumerate() {
            let cells: Vec<(Method, &PowerRow)> = methods.iter().map(|m| (*m, &by_method[m][n].rows[bi])).collect();
            let mut differences = Vec::new();
            for i in 0..cells.len() {
                for j in i + 1..cells.len() {
                    differences.push(difference(cells[i], cells[j]));
                }
            }
            rows.push(ComparisonRow {
                n: *n,
                b,
                power: cells.iter().map(|(_, r)| r.rejection_rate).collect(),
                differences,
            });
        }
    }
    Ok(ComparisonTable { methods, rows })
}

impl std::fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:>4} {:>8}", "n", "b")?;
        for m in &self.methods {
            write!(f, " {:>18}", m.name())?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(f, "{:>4} {:>8}", row.n, row.b)?;
            for p in &row.power {
                write!(f, " {p:>18.3}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
