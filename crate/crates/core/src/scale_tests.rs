//! Siegel-Tukey scale test with classical or Vegelius ranking.
//!
//! Both schemes rank the pooled sample from the outside in, so extreme
//! values get low ranks. The classical scheme alternates in blocks of two
//! (1 low, 2 high, 2 low, ...) and mid-ranks ties afterwards. The Vegelius
//! scheme absorbs a whole tie group whenever a side's block ends inside one,
//! so tied values always share a run of consecutive ranks. Without ties the
//! two schemes agree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{lcm, std_normal_cdf};
use crate::result::{Alternative, HypothesisResult, TestMethod};

/// Pooled samples of at most this size get an exact p-value.
pub const EXACT_MAX_POOLED: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankScheme {
    SiegelTukey,
    Vegelius,
}

impl RankScheme {
    pub fn method(self) -> TestMethod {
        match self {
            Self::SiegelTukey => TestMethod::SiegelTukey,
            Self::Vegelius => TestMethod::SiegelTukeyVegelius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
}

/// Ranks of a pooled sample, in input order.
///
/// `pre_tie_ranks` are the integer alternation ranks before tied values are
/// averaged. `group_labels` is empty when the values were ranked on their own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankAssignment {
    pub scheme: RankScheme,
    pub values: Vec<f64>,
    pub group_labels: Vec<Group>,
    pub pre_tie_ranks: Vec<usize>,
    pub ranks: Vec<f64>,
}

impl RankAssignment {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Tied groups as (sum of pre-tie ranks, group size), ascending by value.
    fn tie_groups(&self) -> Vec<(usize, usize)> {
        let order = sorted_order(&self.values);
        order
            .chunk_by(|&i, &j| self.values[i] == self.values[j])
            .map(|g| (g.iter().map(|&i| self.pre_tie_ranks[i]).sum(), g.len()))
            .collect()
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::TooFewValues(values.len()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("values to rank must be finite".into()));
    }
    Ok(())
}

/// Indices of `values` in ascending value order; ties keep input order.
fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    order
}

/// Replaces each tie group's pre-tie ranks by their mean.
fn mid_ranks(values: &[f64], order: &[usize], pre: &[usize]) -> Vec<f64> {
    let mut ranks = vec![0.0; values.len()];
    for group in order.chunk_by(|&i, &j| values[i] == values[j]) {
        let sum: usize = group.iter().map(|&i| pre[i]).sum();
        let mean = sum as f64 / group.len() as f64;
        for &i in group {
            ranks[i] = mean;
        }
    }
    ranks
}

fn finish(scheme: RankScheme, values: &[f64], order: &[usize], pre_sorted: Vec<usize>) -> RankAssignment {
    let mut pre = vec![0; values.len()];
    for (slot, &i) in order.iter().enumerate() {
        pre[i] = pre_sorted[slot];
    }
    let ranks = mid_ranks(values, order, &pre);
    RankAssignment {
        scheme,
        values: values.to_vec(),
        group_labels: Vec::new(),
        pre_tie_ranks: pre,
        ranks,
    }
}

/// Classical Siegel-Tukey ranks: 1 to the smallest, 2 and 3 to the two
/// largest, 4 and 5 to the next two smallest, and so on inward. With odd N
/// the middle value gets rank N. Ties are then mid-ranked.
pub fn siegel_tukey_ranks(values: &[f64]) -> Result<RankAssignment> {
    check_values(values)?;
    let n = values.len();
    let order = sorted_order(values);
    let mut pre_sorted = vec![0usize; n];
    let (mut lo, mut hi) = (0usize, n - 1);
    let mut rank = 1;
    pre_sorted[lo] = rank;
    lo += 1;
    let mut high_side = true;
    while lo <= hi {
        for _ in 0..2 {
            if lo > hi {
                break;
            }
            rank += 1;
            if high_side {
                pre_sorted[hi] = rank;
                hi -= 1;
            } else {
                pre_sorted[lo] = rank;
                lo += 1;
            }
        }
        high_side = !high_side;
    }
    Ok(finish(RankScheme::SiegelTukey, values, &order, pre_sorted))
}

/// Vegelius tie-adjusted ranks.
///
/// Starts on the low side with the smallest value and every value tied to
/// it. Sides then alternate; each turn ranks elements from its end until
/// that side has served one more element than the other side, then keeps
/// going through the rest of the tie group it stopped in. Ranks are handed
/// out consecutively, and tied values receive their mean.
pub fn vegelius_ranks(values: &[f64]) -> Result<RankAssignment> {
    check_values(values)?;
    let n = values.len();
    let order = sorted_order(values);
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut pre_sorted = vec![0usize; n];
    // unranked slots are lo..hi (exclusive)
    let (mut lo, mut hi) = (0usize, n);
    let mut served = [0usize; 2];
    let mut rank = 0;
    let mut side = 0; // 0 = low, 1 = high
    while lo < hi {
        let target = served[1 - side] + 1;
        let mut last = None;
        while lo < hi && (served[side] < target || last == Some(if side == 0 { sorted[lo] } else { sorted[hi - 1] })) {
            let slot = if side == 0 {
                lo += 1;
                lo - 1
            } else {
                hi -= 1;
                hi
            };
            rank += 1;
            pre_sorted[slot] = rank;
            served[side] += 1;
            last = Some(sorted[slot]);
        }
        side = 1 - side;
    }
    Ok(finish(RankScheme::Vegelius, values, &order, pre_sorted))
}

pub fn rank(values: &[f64], scheme: RankScheme) -> Result<RankAssignment> {
    match scheme {
        RankScheme::SiegelTukey => siegel_tukey_ranks(values),
        RankScheme::Vegelius => vegelius_ranks(values),
    }
}

/// Ranks as integers over a common denominator.
///
/// Every mid-rank is (sum of pre-tie ranks) / t for a tie group of size t,
/// so scaling by the lcm of the group sizes makes them all integral.
pub(crate) fn scaled_ranks(assignment: &RankAssignment) -> (Vec<u64>, u64) {
    let groups = assignment.tie_groups();
    let denom = groups.iter().fold(1u64, |acc, &(_, t)| lcm(acc, t as u64));
    let order = sorted_order(&assignment.values);
    let mut scaled = vec![0u64; assignment.len()];
    let mut at = 0;
    for (sum, t) in groups {
        let numerator = sum as u64 * (denom / t as u64);
        for &i in &order[at..at + t] {
            scaled[i] = numerator;
        }
        at += t;
    }
    (scaled, denom)
}

/// Number of `size`-subsets of `items` by their sum.
pub(crate) fn subset_sum_counts(items: &[u64], size: usize) -> Vec<u64> {
    let mut sorted = items.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let max_sum: u64 = sorted[..size].iter().sum();
    let width = max_sum as usize + 1;
    // counts[j * width + s]: subsets of size j with sum s
    let mut counts = vec![0u64; (size + 1) * width];
    counts[0] = 1;
    let mut reach = 0usize;
    for &item in items {
        let item = item as usize;
        reach = (reach + item).min(max_sum as usize);
        for j in (1..=size).rev() {
            let (before, after) = counts.split_at_mut(j * width);
            let prev = &before[(j - 1) * width..];
            let cur = &mut after[..width];
            for s in (item..=reach).rev() {
                cur[s] += prev[s - item];
            }
        }
    }
    counts.split_off(size * width)
}

fn exact_tails(scaled: &[u64], is_a: &[bool], w_scaled: u64) -> (f64, f64) {
    let n_a = is_a.iter().filter(|&&a| a).count();
    let n_b = scaled.len() - n_a;
    let total_sum: u64 = scaled.iter().sum();
    // enumerate the smaller group; W_A = total - W_B
    let (size, flip) = if n_a <= n_b { (n_a, false) } else { (n_b, true) };
    let counts = subset_sum_counts(scaled, size);
    let (mut ge, mut le, mut all) = (0u64, 0u64, 0u64);
    for (s, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let w_a = if flip { total_sum - s as u64 } else { s as u64 };
        all += c;
        if w_a >= w_scaled {
            ge += c;
        }
        if w_a <= w_scaled {
            le += c;
        }
    }
    (ge as f64 / all as f64, le as f64 / all as f64)
}

/// Normal approximation for the rank sum `w_a` of group A, with mean
/// `n_a(N+1)/2`, variance `n_a n_b / 12 * [(N+1) - Σ(t³-t) / (N(N-1))]` over
/// the tie group sizes `t`, and a continuity correction of 1/2.
pub fn rank_sum_normal_p(w_a: f64, n_a: usize, n_b: usize, tie_sizes: &[usize], alternative: Alternative) -> f64 {
    let (na, nb) = (n_a as f64, n_b as f64);
    let nf = na + nb;
    let tie_sum: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = na * nb / 12.0 * ((nf + 1.0) - tie_sum / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let sd = var.sqrt();
    let d = w_a - na * (nf + 1.0) / 2.0;
    match alternative {
        Alternative::Greater => std_normal_cdf(-(d - 0.5) / sd),
        Alternative::Less => std_normal_cdf((d + 0.5) / sd),
        _ => (2.0 * std_normal_cdf(-(d.abs() - 0.5).max(0.0) / sd)).min(1.0),
    }
}

/// Siegel-Tukey rank-sum test of `sample_a` against `sample_b`.
///
/// The statistic is the rank sum W of sample A. Low ranks sit at the
/// extremes, so `greater` means A is less dispersed than B and `less` means
/// it is more dispersed. For pooled sizes up to [`EXACT_MAX_POOLED`] the
/// p-value is exact under the permutation null conditional on the observed
/// ranks; beyond that a normal approximation with tie-corrected variance and
/// a continuity correction of 1/2 is used. Two-sided p-values double the
/// smaller tail. A fully tied pool returns p = 1 marked `degenerate`.
pub fn rank_sum_test(
    sample_a: &[f64],
    sample_b: &[f64],
    scheme: RankScheme,
    alternative: Alternative,
) -> Result<HypothesisResult> {
    if sample_a.is_empty() {
        return Err(Error::EmptySample('A'));
    }
    if sample_b.is_empty() {
        return Err(Error::EmptySample('B'));
    }
    let pooled: Vec<f64> = sample_a.iter().chain(sample_b).copied().collect();
    let mut assignment = rank(&pooled, scheme)?;
    assignment.group_labels = (0..pooled.len())
        .map(|i| if i < sample_a.len() { Group::A } else { Group::B })
        .collect();

    let n = pooled.len();
    let w_a: f64 = assignment.ranks[..sample_a.len()].iter().sum();
    let w_b: f64 = assignment.ranks[sample_a.len()..].iter().sum();
    let groups = assignment.tie_groups();
    let tied_groups = groups.iter().filter(|&&(_, t)| t > 1).count();
    let exact = n <= EXACT_MAX_POOLED;
    let alternative = match alternative {
        Alternative::AutoDirectional => Alternative::TwoSided,
        a => a,
    };

    let fully_tied = groups.len() == 1;
    let p_value = if fully_tied {
        1.0
    } else if exact {
        let (scaled, _) = scaled_ranks(&assignment);
        let is_a: Vec<bool> = (0..n).map(|i| i < sample_a.len()).collect();
        let w_scaled: u64 = scaled[..sample_a.len()].iter().sum();
        let (upper, lower) = exact_tails(&scaled, &is_a, w_scaled);
        match alternative {
            Alternative::Greater => upper,
            Alternative::Less => lower,
            _ => (2.0 * upper.min(lower)).min(1.0),
        }
    } else {
        let sizes: Vec<usize> = groups.iter().map(|&(_, t)| t).collect();
        rank_sum_normal_p(w_a, sample_a.len(), sample_b.len(), &sizes, alternative)
        };

    let mut result = HypothesisResult::new(scheme.method(), w_a, p_value, alternative)
        .with("rank_sum_a", w_a)
        .with("rank_sum_b", w_b)
        .with("exact_used", exact)
        .with("tie_groups", tied_groups);
    result.degenerate = fully_tied;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIED: [f64; 16] = [-3., -3., -1., -1., -1., 0., 0., 0., 1., 2., 2., 2., 3., 3., 3., 4.];
    const UNTIED: [f64; 16] = [-3., -2.5, -2., -1.5, 0., 0.2, 0.7, 0.8, 1., 1.3, 1.5, 2., 3., 3.5, 4.3, 5.];
    const ALTERNATION: [usize; 16] = [1, 4, 5, 8, 9, 12, 13, 16, 15, 14, 11, 10, 7, 6, 3, 2];

    #[test]
    fn classical_ranks_tied_table() {
        let r = siegel_tukey_ranks(&TIED).unwrap();
        assert_eq!(r.pre_tie_ranks, ALTERNATION);
        let third = 1.0 / 3.0;
        let expected = [
            2.5, 2.5, 22. * third, 22. * third, 22. * third, 41. * third, 41. * third, 41. * third, 15.,
            35. * third, 35. * third, 35. * third, 16. * third, 16. * third, 16. * third, 2.,
        ];
        for (got, want) in r.ranks.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn vegelius_ranks_tied_table() {
        let r = vegelius_ranks(&TIED).unwrap();
        assert_eq!(r.pre_tie_ranks, [1, 2, 7, 8, 9, 13, 14, 15, 16, 12, 11, 10, 6, 5, 4, 3]);
        assert_eq!(r.ranks, [1.5, 1.5, 8., 8., 8., 14., 14., 14., 16., 11., 11., 11., 5., 5., 5., 3.]);
    }

    #[test]
    fn schemes_agree_without_ties() {
        let st = siegel_tukey_ranks(&UNTIED).unwrap();
        let vg = vegelius_ranks(&UNTIED).unwrap();
        assert_eq!(st.pre_tie_ranks, ALTERNATION);
        assert_eq!(vg.pre_tie_ranks, ALTERNATION);
        assert_eq!(st.ranks, vg.ranks);
    }

    #[test]
    fn small_inputs() {
        assert_eq!(siegel_tukey_ranks(&[5.0, 1.0]).unwrap().ranks, [2.0, 1.0]);
        assert_eq!(vegelius_ranks(&[1.0, 5.0]).unwrap().ranks, [1.0, 2.0]);
        assert_eq!(vegelius_ranks(&[7.0, 7.0]).unwrap().ranks, [1.5, 1.5]);
        assert_eq!(siegel_tukey_ranks(&[7.0, 7.0]).unwrap().ranks, [1.5, 1.5]);
        // odd N: middle value ranked last
        assert_eq!(siegel_tukey_ranks(&[1.0, 2.0, 3.0]).unwrap().pre_tie_ranks, [1, 3, 2]);
        assert_eq!(siegel_tukey_ranks(&[1.0]), Err(Error::TooFewValues(1)));
        assert_eq!(vegelius_ranks(&[]), Err(Error::TooFewValues(0)));
        assert!(vegelius_ranks(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn vegelius_tie_group_straddling_the_middle() {
        // low takes 1, high takes 9 and needs a second, which is the 5-group
        let r = vegelius_ranks(&[1.0, 5.0, 5.0, 5.0, 9.0]).unwrap();
        assert_eq!(r.pre_tie_ranks, [1, 5, 4, 3, 2]);
        assert_eq!(r.ranks, [1.0, 4.0, 4.0, 4.0, 2.0]);
    }

    #[test]
    fn scaled_ranks_are_exact() {
        let r = siegel_tukey_ranks(&TIED).unwrap();
        let (scaled, denom) = scaled_ranks(&r);
        assert_eq!(denom, 6);
        for (s, x) in scaled.iter().zip(&r.ranks) {
            assert!((*s as f64 / denom as f64 - x).abs() < 1e-12);
        }
    }

    #[test]
    fn subset_sums_small() {
        // 2-subsets of {1,2,3,4}: 3,4,5,5,6,7
        assert_eq!(subset_sum_counts(&[1, 2, 3, 4], 2), [0, 0, 0, 1, 1, 2, 1, 1]);
    }

    #[test]
    fn rank_sum_small_exact() {
        let r = rank_sum_test(&[1.0, 10.0], &[5.0, 6.0], RankScheme::SiegelTukey, Alternative::TwoSided).unwrap();
        assert_eq!(r.statistic, 3.0);
        assert!((r.p_value - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(r.detail_f64("rank_sum_b"), Some(7.0));
        assert_eq!(r.detail["exact_used"], crate::DetailValue::Flag(true));
        let g = rank_sum_test(&[1.0, 10.0], &[5.0, 6.0], RankScheme::SiegelTukey, Alternative::Greater).unwrap();
        assert_eq!(g.p_value, 1.0);
    }

    #[test]
    fn rank_sum_fully_tied() {
        let r = rank_sum_test(&[4.0, 4.0], &[4.0, 4.0], RankScheme::Vegelius, Alternative::TwoSided).unwrap();
        assert_eq!(r.statistic, 5.0);
        assert_eq!(r.p_value, 1.0);
        assert!(r.degenerate);
        let big = vec![1.0; 30];
        let r = rank_sum_test(&big, &big, RankScheme::SiegelTukey, Alternative::TwoSided).unwrap();
        assert!(r.degenerate && r.p_value == 1.0);
    }

    #[test]
    fn rank_sum_vegelius_table_split() {
        let r = rank_sum_test(&TIED[..8], &TIED[8..], RankScheme::Vegelius, Alternative::TwoSided).unwrap();
        assert_eq!(r.statistic, 69.0);
        assert_eq!(r.detail_f64("rank_sum_b"), Some(67.0));
        assert_eq!(r.detail_f64("tie_groups"), Some(5.0));
        assert_eq!(r.method, TestMethod::SiegelTukeyVegelius);
    }

    #[test]
    fn rank_sum_empty_samples() {
        assert_eq!(rank_sum_test(&[], &[1.0], RankScheme::Vegelius, Alternative::TwoSided), Err(Error::EmptySample('A')));
        assert_eq!(rank_sum_test(&[1.0], &[], RankScheme::Vegelius, Alternative::TwoSided), Err(Error::EmptySample('B')));
    }

    #[test]
    fn rank_sum_large_uses_normal() {
        let a: Vec<f64> = (0..15).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..15).map(|i| i as f64 * 3.0 - 10.0).collect();
        let r = rank_sum_test(&a, &b, RankScheme::SiegelTukey, Alternative::TwoSided).unwrap();
        assert_eq!(r.detail["exact_used"], crate::DetailValue::Flag(false));
        assert!(r.p_value > 0.0 && r.p_value < 1.0);
    }
}
