//! Turning a learned ordering into scores, and carrying it to new data.
//!
//! Training samples of the adjusted group are given new scores that slot
//! them between the anchor-group samples they were placed between. The
//! resulting (original → adjusted) pairs form a monotone piecewise-linear
//! map that is then applied to unseen scores of the same group.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{GroupRoles, ScoredSample};
use crate::ordering::{CrossGroupOrdering, RankedGroup, Step};

/// Name recorded in output metadata for the interpolation used here.
pub const PROPORTIONAL: &str = "proportional";

/// Synthetic spacing used above the first and below the last anchor score.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BoundaryMargin {
    /// Median of the non-zero gaps between consecutive anchor scores, or 0.1
    /// when there are none.
    #[default]
    MedianGap,
    Fixed(f64),
}

impl BoundaryMargin {
    pub const FALLBACK: f64 = 0.1;

    fn resolve(&self, anchor_scores: &[f64]) -> f64 {
        match *self {
            BoundaryMargin::Fixed(d) => d,
            BoundaryMargin::MedianGap => {
                let mut gaps: Vec<f64> = anchor_scores
                    .windows(2)
                    .map(|w| w[0] - w[1])
                    .filter(|&g| g > 0.0)
                    .collect();
                if gaps.is_empty() {
                    return Self::FALLBACK;
                }
                gaps.sort_by(f64::total_cmp);
                let mid = gaps.len() / 2;
                if gaps.len() % 2 == 1 {
                    gaps[mid]
                } else {
                    (gaps[mid - 1] + gaps[mid]) / 2.0
                }
            }
        }
    }
}

/// Non-fatal conditions met while building or applying a mapping.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransferWarning {
    /// A run of adjusted samples sits between two equal anchor scores.
    DegenerateAnchor { score: f64, run: usize },
    /// Several training samples share one original score but received
    /// different adjusted scores; their midpoint is used.
    DegenerateSegment { original: f64, low: f64, high: f64 },
}

impl fmt::Display for TransferWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransferWarning::DegenerateAnchor { score, run } => write!(
                f,
                "{run} adjusted samples fall between tied anchor scores {score}; spaced just below it"
            ),
            TransferWarning::DegenerateSegment { original, low, high } => write!(
                f,
                "original score {original} maps to adjusted scores in [{low}, {high}]; using the midpoint"
            ),
        }
    }
}

/// Adjusted training scores for group `b`, indexed by rank within `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearranged {
    pub adjusted_b: Vec<f64>,
    pub warnings: Vec<TransferWarning>,
}

/// Assigns group-`b` training scores that realize `ordering` against the
/// untouched group-`a` scores.
///
/// A run of `m` b-samples placed between anchor scores `hi > lo` gets
/// `hi − t·(hi − lo)/(m + 1)` for `t = 1..=m`.
pub fn rearrange_training_scores(
    ordering: &CrossGroupOrdering,
    a: &RankedGroup,
    b: &RankedGroup,
    margin: BoundaryMargin,
) -> Result<Rearranged> {
    ordering.check_sizes(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::EmptyGroup(a.group().to_string()));
    }
    let anchors = a.scores();
    let delta = margin.resolve(anchors);
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Config(format!("boundary margin must be positive, got {delta}")));
    }
    let span = anchors
        .iter()
        .chain(b.scores())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let range = span.1 - span.0;
    let eps = if range > 0.0 { range } else { 1.0 } * 2f64.powi(-32);

    let mut adjusted_b = Vec::with_capacity(b.len());
    let mut warnings = Vec::new();
    let steps = ordering.steps();
    let mut placed_a = 0;
    let mut t = 0;
    while t < steps.len() {
        if steps[t] == Step::TakeA {
            placed_a += 1;
            t += 1;
            continue;
        }
        let run = steps[t..].iter().take_while(|&&s| s == Step::TakeB).count();
        let hi = if placed_a == 0 { anchors[0] + delta } else { anchors[placed_a - 1] };
        let lo = if placed_a == a.len() { anchors[a.len() - 1] - delta } else { anchors[placed_a] };
        if hi > lo {
            let step = (hi - lo) / (run as f64 + 1.0);
            adjusted_b.extend((1..=run).map(|r| hi - r as f64 * step));
        } else {
            let w = TransferWarning::DegenerateAnchor { score: hi, run };
            log::warn!("{w}");
            warnings.push(w);
            adjusted_b.extend((1..=run).map(|r| hi - r as f64 * eps));
        }
        t += run;
    }
    Ok(Rearranged { adjusted_b, warnings })
}

/// Monotone map from original to adjusted scores of the adjusted group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreMapping {
    /// Group whose scores are never modified.
    pub anchor: String,
    pub adjusted: String,
    pub scheme: &'static str,
    /// Original training scores, non-increasing.
    #[serde(skip)]
    pub train_orig_b: Vec<f64>,
    /// Adjusted training scores aligned with `train_orig_b`.
    #[serde(skip)]
    pub train_adj_b: Vec<f64>,
    #[serde(skip)]
    knots: Vec<(f64, f64)>,
    pub warnings: Vec<TransferWarning>,
}

impl ScoreMapping {
    pub fn new(roles: &GroupRoles, train_orig_b: Vec<f64>, train_adj_b: Vec<f64>) -> Result<Self> {
        if train_orig_b.is_empty() {
            return Err(Error::EmptyMapping);
        }
        if train_orig_b.len() != train_adj_b.len() {
            return Err(Error::Config(format!(
                "mapping has {} original but {} adjusted scores",
                train_orig_b.len(),
                train_adj_b.len()
            )));
        }
        for (name, seq) in [("original", &train_orig_b), ("adjusted", &train_adj_b)] {
            if seq.windows(2).any(|w| w[1] > w[0]) || seq.iter().any(|s| !s.is_finite()) {
                return Err(Error::Config(format!("{name} mapping scores must be finite and non-increasing")));
            }
        }

        let mut knots = Vec::new();
        let mut warnings = Vec::new();
        let mut end = train_orig_b.len();
        // walk from the lowest score up so knots come out ascending
        while end > 0 {
            let x = train_orig_b[end - 1];
            let start = train_orig_b[..end].partition_point(|&s| s > x);
            let (low, high) = (train_adj_b[end - 1], train_adj_b[start]);
            if low != high {
                let w = TransferWarning::DegenerateSegment { original: x, low, high };
                log::warn!("{w}");
                warnings.push(w);
                knots.push((x, low + (high - low) / 2.0));
            } else {
                knots.push((x, low));
            }
            end = start;
        }
        Ok(ScoreMapping {
            anchor: roles.anchor.clone(),
            adjusted: roles.adjusted.clone(),
            scheme: PROPORTIONAL,
            train_orig_b,
            train_adj_b,
            knots,
            warnings,
        })
    }

    /// Builds the mapping from a group and its rearranged training scores.
    pub fn from_training(roles: &GroupRoles, b: &RankedGroup, rearranged: &Rearranged) -> Result<Self> {
        Self::new(roles, b.scores().to_vec(), rearranged.adjusted_b.clone())
    }

    /// Distinct original scores and their adjusted values, ascending.
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Adjusted value of one original score.
    pub fn map(&self, s: f64) -> f64 {
        let k = &self.knots;
        let n = k.len();
        if n == 1 {
            return k[0].1 + (s - k[0].0);
        }
        let slope = |lo: usize| ((k[lo + 1].1 - k[lo].1) / (k[lo + 1].0 - k[lo].0)).max(0.0);
        if s < k[0].0 {
            return k[0].1 + slope(0) * (s - k[0].0);
        }
        if s > k[n - 1].0 {
            return k[n - 1].1 + slope(n - 2) * (s - k[n - 1].0);
        }
        let hi = k.partition_point(|&(x, _)| x < s);
        if k[hi].0 == s {
            return k[hi].1;
        }
        let ((x_lo, y_lo), (x_hi, y_hi)) = (k[hi - 1], k[hi]);
        (y_lo + (s - x_lo) * (y_hi - y_lo) / (x_hi - x_lo)).clamp(y_lo, y_hi)
    }

    /// New scores for every sample: adjusted-group scores are mapped, all
    /// others are returned unchanged.
    pub fn apply(&self, samples: &[ScoredSample]) -> Vec<f64> {
        samples
            .iter()
            .map(|s| if s.group == self.adjusted { self.map(s.score) } else { s.score })
            .collect()
    }
}

/// Maps test scores of the adjusted group through `mapping`.
pub fn transfer_test_scores(mapping: &ScoreMapping, test_b: &[f64]) -> Result<Vec<f64>> {
    if mapping.knots.is_empty() {
        return Err(Error::EmptyMapping);
    }
    Ok(test_b.iter().map(|&s| mapping.map(s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{xorder_dp, DisparityMetric, ObjectiveConfig};
    use crate::ordering::{ordering_from_scores, rank_within_group};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn roles() -> GroupRoles {
        GroupRoles::new("a", "b")
    }

    fn ranked(group: &str, scores: &[f64]) -> RankedGroup {
        let samples: Vec<ScoredSample> = scores
            .iter()
            .enumerate()
            .map(|(t, &s)| ScoredSample::new(format!("{group}{t}"), group, t % 2 == 0, s).unwrap())
            .collect();
        rank_within_group(&samples, group).unwrap()
    }

    #[test]
    fn two_samples_between_anchors() {
        let a = ranked("a", &[0.8, 0.5]);
        let b = ranked("b", &[0.3, 0.2]);
        let o = CrossGroupOrdering::new(vec![Step::TakeA, Step::TakeB, Step::TakeB, Step::TakeA]);
        let r = rearrange_training_scores(&o, &a, &b, BoundaryMargin::MedianGap).unwrap();
        assert!((r.adjusted_b[0] - 0.7).abs() < 1e-12);
        assert!((r.adjusted_b[1] - 0.6).abs() < 1e-12);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn trailing_run_goes_below_last_anchor() {
        let a = ranked("a", &[0.9, 0.5]);
        let b = ranked("b", &[0.95, 0.7, 0.1]);
        let o = CrossGroupOrdering::new(vec![Step::TakeA, Step::TakeA, Step::TakeB, Step::TakeB, Step::TakeB]);
        let r = rearrange_training_scores(&o, &a, &b, BoundaryMargin::Fixed(0.1)).unwrap();
        let want = [0.475, 0.45, 0.425];
        for (got, want) in r.adjusted_b.iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn leading_run_uses_median_gap() {
        let a = ranked("a", &[0.9, 0.8, 0.5, 0.4]);
        let b = ranked("b", &[0.3]);
        let o = CrossGroupOrdering::new(vec![Step::TakeB, Step::TakeA, Step::TakeA, Step::TakeA, Step::TakeA]);
        let r = rearrange_training_scores(&o, &a, &b, BoundaryMargin::MedianGap).unwrap();
        // gaps 0.1, 0.3, 0.1 have median 0.1
        assert!((r.adjusted_b[0] - 0.95).abs() < 1e-12);
    }

    #[test]
    fn tied_anchors_warn() {
        let a = ranked("a", &[0.6, 0.6]);
        let b = ranked("b", &[0.9, 0.1]);
        let o = CrossGroupOrdering::new(vec![Step::TakeA, Step::TakeB, Step::TakeB, Step::TakeA]);
        let r = rearrange_training_scores(&o, &a, &b, BoundaryMargin::MedianGap).unwrap();
        assert_eq!(r.warnings, vec![TransferWarning::DegenerateAnchor { score: 0.6, run: 2 }]);
        assert!(r.adjusted_b[0] < 0.6 && r.adjusted_b[1] < r.adjusted_b[0]);
        assert!(0.6 - r.adjusted_b[1] < 1e-8);
    }

    #[test]
    fn proportional_test_mapping() {
        let m = ScoreMapping::new(&roles(), vec![0.8, 0.5], vec![0.7, 0.4]).unwrap();
        let got = transfer_test_scores(&m, &[0.65, 0.8, 0.5, 0.9, 0.4]).unwrap();
        assert!((got[0] - 0.55).abs() < 1e-12);
        assert_eq!(got[1], 0.7);
        assert_eq!(got[2], 0.4);
        assert!((got[3] - 0.8).abs() < 1e-12);
        assert!((got[4] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn repeated_original_scores_collapse() {
        let m = ScoreMapping::new(&roles(), vec![0.9, 0.5, 0.5, 0.2], vec![0.8, 0.6, 0.4, 0.1]).unwrap();
        assert_eq!(m.knots(), &[(0.2, 0.1), (0.5, 0.5), (0.9, 0.8)]);
        assert_eq!(m.warnings.len(), 1);
        assert_eq!(m.map(0.5), 0.5);
    }

    #[test]
    fn single_knot_shifts() {
        let m = ScoreMapping::new(&roles(), vec![0.4], vec![0.6]).unwrap();
        assert!((m.map(0.5) - 0.7).abs() < 1e-12);
        assert!(matches!(ScoreMapping::new(&roles(), vec![], vec![]), Err(Error::EmptyMapping)));
    }

    #[test]
    fn anchor_scores_pass_through() {
        let m = ScoreMapping::new(&roles(), vec![0.8, 0.5], vec![0.7, 0.4]).unwrap();
        let samples = vec![
            ScoredSample::new("x", "a", true, 0.123_456_789_012_345_67).unwrap(),
            ScoredSample::new("y", "b", false, 0.65).unwrap(),
        ];
        let out = m.apply(&samples);
        assert_eq!(out[0].to_bits(), samples[0].score.to_bits());
        assert!((out[1] - 0.55).abs() < 1e-12);
    }

    #[test]
    fn rescoring_realizes_learned_ordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut samples = Vec::new();
            for (g, n) in [("a", 40), ("b", 30)] {
                for t in 0..n {
                    let label = rng.random_bool(0.5);
                    let s = rng.random::<f64>() * 0.5 + if label { 0.3 } else { 0.0 };
                    samples.push(ScoredSample::new(format!("{g}{t}"), g, label, s).unwrap());
                }
            }
            let a = rank_within_group(&samples, "a").unwrap();
            let b = rank_within_group(&samples, "b").unwrap();
            let o = xorder_dp(&a, &b, &ObjectiveConfig::weighted(3.0, DisparityMetric::Xauc)).unwrap();
            let r = rearrange_training_scores(&o, &a, &b, BoundaryMargin::MedianGap).unwrap();
            let mut rescored = samples.clone();
            for (rank, &idx) in b.order().iter().enumerate() {
                rescored[idx].score = r.adjusted_b[rank];
            }
            let b2 = rank_within_group(&rescored, "b").unwrap();
            assert_eq!(b2.order(), b.order());
            assert_eq!(ordering_from_scores(&a, &b2), o);
        }
    }

    proptest! {
        #[test]
        fn map_is_monotone(
            mut orig in prop::collection::vec(0.0f64..1.0, 1..20),
            mut adj_gaps in prop::collection::vec(0.0f64..0.2, 20),
            tests in prop::collection::vec(-0.5f64..1.5, 1..40),
        ) {
            orig.sort_by(|x, y| y.total_cmp(x));
            adj_gaps.truncate(orig.len());
            let mut adj = Vec::new();
            let mut y = 1.0;
            for g in adj_gaps {
                y -= g;
                adj.push(y);
            }
            let m = ScoreMapping::new(&roles(), orig, adj).unwrap();
            let mut tests = tests;
            tests.sort_by(f64::total_cmp);
            let out = transfer_test_scores(&m, &tests).unwrap();
            prop_assert!(out.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
