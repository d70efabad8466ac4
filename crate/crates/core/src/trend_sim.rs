//! Binary sequences under a linear win-rate trend.
//!
//! Stage `i` (1-based) is won with probability `a + b(i - c)`, clamped to
//! `[0, 1]`; `b = 0` gives the i.i.d. null model.
//!
//! # Random streams
//!
//! Trial streams are ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by
//! `seed_from_u64(base_seed)` with the stream number set to `trial_index`.
//! Each stage consumes one `next_u64()` word `w`, mapped to the uniform
//! `u = (w >> 11) * 2^-53` in `[0, 1)`; the stage is a win iff `u < p_i`.
//! A stream therefore depends only on `(base_seed, trial_index)`, and the
//! first `n` draws of a trial are shared by every model evaluated on it.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::BinarySequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendModel {
    a: f64,
    b: f64,
    c: f64,
    n: usize,
}

impl TrendModel {
    /// Checks `0 < a < 1`, `0 <= b < 1`, `n >= 1`, and `0 <= c < a/b + n`
    /// when `b > 0`.
    pub fn new(a: f64, b: f64, c: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidModel(format!("intercept a = {a} must lie in (0, 1)")));
        }
        if !(0.0..1.0).contains(&b) {
            return Err(Error::InvalidModel(format!("scale b = {b} must lie in [0, 1)")));
        }
        if n == 0 {
            return Err(Error::InvalidModel("length n must be positive".into()));
        }
        if !c.is_finite() {
            return Err(Error::InvalidModel(format!("offset c = {c} must be finite")));
        }
        if b > 0.0 && !(c >= 0.0 && c < a / b + n as f64) {
            return Err(Error::InvalidModel(format!(
                "offset c = {c} must lie in [0, a/b + n) = [0, {})",
                a / b + n as f64
            )));
        }
        Ok(Self { a, b, c, n })
    }

    /// The i.i.d. model with win probability `a`.
    pub fn null(a: f64, n: usize) -> Result<Self> {
        Self::new(a, 0.0, 0.0, n)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn raw_probability(&self, stage: usize) -> f64 {
        self.a + self.b * (stage as f64 - self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub base_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(base_seed: u64, trial_index: u64) -> Self {
        Self { base_seed, trial_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

/// Win probability at `stage` and whether it had to be clamped into `[0, 1]`.
pub fn stage_probability(model: &TrendModel, stage: usize) -> Result<(f64, bool)> {
    if stage == 0 || stage > model.n {
        return Err(Error::StageOutOfRange { stage, n: model.n });
    }
    let p = model.raw_probability(stage);
    let clamped = p.clamp(0.0, 1.0);
    Ok((clamped, clamped != p))
}

#[inline]
pub(crate) fn unit_uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn simulate_sequence(model: &TrendModel, seed: SeedSpec) -> BinarySequence {
    let mut rng = seed.rng();
    let outcomes = (1..=model.n).map(|i| {
        let p = model.raw_probability(i).clamp(0.0, 1.0);
        unit_uniform(&mut rng) < p
    });
    BinarySequence::from_bools(outcomes).expect("n >= 1 and outcomes are boolean")
}
