//! Within-group rankings and cross-group merge paths.
//!
//! A [`CrossGroupOrdering`] interleaves two [`RankedGroup`]s without changing
//! either group's internal order. Utility and every disparity metric depend
//! only on that interleaving, so metrics can be evaluated on an ordering
//! directly instead of on scores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{FairnessReport, GroupRoles, PairCounts, ScoredSample};

/// One group's samples sorted by descending score, ties broken by ascending
/// original index, with the prefix/suffix label counts the optimizer needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedGroup {
    group: String,
    order: Vec<usize>,
    labels: Vec<bool>,
    scores: Vec<f64>,
    prefix_pos: Vec<u64>,
    suffix_pos: Vec<u64>,
    suffix_neg: Vec<u64>,
    within_wins: u64,
}

impl RankedGroup {
    fn build(group: String, order: Vec<usize>, labels: Vec<bool>, scores: Vec<f64>) -> Self {
        let n = labels.len();
        let mut prefix_pos = vec![0u64; n + 1];
        for (i, &l) in labels.iter().enumerate() {
            prefix_pos[i + 1] = prefix_pos[i] + l as u64;
        }
        let mut suffix_pos = vec![0u64; n + 1];
        let mut suffix_neg = vec![0u64; n + 1];
        for i in (0..n).rev() {
            suffix_pos[i] = suffix_pos[i + 1] + labels[i] as u64;
            suffix_neg[i] = suffix_neg[i + 1] + !labels[i] as u64;
        }

        // positives strictly above each negative; scores are non-increasing
        let mut within_wins = 0;
        let mut start = 0;
        while start < n {
            let end = start + scores[start..].partition_point(|&s| s == scores[start]);
            let negs = (start..end).filter(|&i| !labels[i]).count() as u64;
            within_wins += negs * prefix_pos[start];
            start = end;
        }

        RankedGroup {
            group,
            order,
            labels,
            scores,
            prefix_pos,
            suffix_pos,
            suffix_neg,
            within_wins,
        }
    }

    /// A group given directly by its labels in rank order. Scores are
    /// synthesized as distinct, evenly spaced, descending values in (0, 1).
    pub fn from_labels(group: impl Into<String>, labels: &[bool]) -> Self {
        let n = labels.len();
        let scores = (0..n).map(|i| (n - i) as f64 / (n + 1) as f64).collect();
        Self::build(group.into(), (0..n).collect(), labels.to_vec(), scores)
    }

    pub fn group(&self) -> &str {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Indices into the sample slice the group was ranked from.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// `prefix_pos()[i]` is the number of positives among the first `i` ranks.
    pub fn prefix_pos(&self) -> &[u64] {
        &self.prefix_pos
    }

    /// `suffix_pos()[i]` is the number of positives at rank `i` and below.
    pub fn suffix_pos(&self) -> &[u64] {
        &self.suffix_pos
    }

    /// `suffix_neg()[i]` is the number of negatives at rank `i` and below,
    /// i.e. those not yet placed once the first `i` ranks are.
    pub fn suffix_neg(&self) -> &[u64] {
        &self.suffix_neg
    }

    pub fn n_pos(&self) -> u64 {
        self.prefix_pos[self.len()]
    }

    pub fn n_neg(&self) -> u64 {
        self.suffix_neg[0]
    }

    /// Within-group AUC numerator, computed on the original scores.
    pub fn within_wins(&self) -> u64 {
        self.within_wins
    }
}

/// Ranks the samples of `group` by descending score.
pub fn rank_within_group(samples: &[ScoredSample], group: &str) -> Result<RankedGroup> {
    let mut order: Vec<usize> = (0..samples.len())
        .filter(|&i| samples[i].group == group)
        .collect();
    if order.is_empty() {
        return Err(Error::EmptyGroup(group.to_string()));
    }
    order.sort_by(|&x, &y| {
        samples[y]
            .score
            .total_cmp(&samples[x].score)
            .then(x.cmp(&y))
    });
    let labels = order.iter().map(|&i| samples[i].label).collect();
    let scores = order.iter().map(|&i| samples[i].score).collect();
    Ok(RankedGroup::build(group.to_string(), order, labels, scores))
}

/// Ranks both groups named in `roles`.
pub fn rank_groups(samples: &[ScoredSample], roles: &GroupRoles) -> Result<(RankedGroup, RankedGroup)> {
    for s in samples {
        roles.side_of(&s.group)?;
    }
    Ok((
        rank_within_group(samples, &roles.anchor)?,
        rank_within_group(samples, &roles.adjusted)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Step {
    TakeA,
    TakeB,
}

/// A merge of two ranked groups that keeps each group's internal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrossGroupOrdering {
    steps: Vec<Step>,
    n_a: usize,
    n_b: usize,
}

impl CrossGroupOrdering {
    pub fn new(steps: Vec<Step>) -> Self {
        let n_a = steps.iter().filter(|&&s| s == Step::TakeA).count();
        let n_b = steps.len() - n_a;
        CrossGroupOrdering { steps, n_a, n_b }
    }

    /// Builds an ordering and checks it covers groups of the given sizes.
    pub fn for_sizes(steps: Vec<Step>, n_a: usize, n_b: usize) -> Result<Self> {
        let o = Self::new(steps);
        o.check_sizes(n_a, n_b)?;
        Ok(o)
    }

    pub(crate) fn check_sizes(&self, n_a: usize, n_b: usize) -> Result<()> {
        if self.n_a != n_a || self.n_b != n_b {
            return Err(Error::InvalidOrdering(format!(
                "ordering takes {} from a and {} from b, groups have {} and {}",
                self.n_a, self.n_b, n_a, n_b
            )));
        }
        Ok(())
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// `(step, rank within its group)` for every position, top to bottom.
    pub fn positions(&self) -> impl Iterator<Item = (Step, usize)> + '_ {
        let (mut i, mut j) = (0, 0);
        self.steps.iter().map(move |&s| match s {
            Step::TakeA => {
                i += 1;
                (s, i - 1)
            }
            Step::TakeB => {
                j += 1;
                (s, j - 1)
            }
        })
    }

    /// Sample indices in merged order.
    pub fn merged(&self, a: &RankedGroup, b: &RankedGroup) -> Vec<usize> {
        self.positions()
            .map(|(s, r)| match s {
                Step::TakeA => a.order[r],
                Step::TakeB => b.order[r],
            })
            .collect()
    }
}

/// The unadjusted merge: descending score, cross-group ties go to `a`.
pub fn ordering_from_scores(a: &RankedGroup, b: &RankedGroup) -> CrossGroupOrdering {
    let mut steps = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a.scores[i] >= b.scores[j]);
        if take_a {
            steps.push(Step::TakeA);
            i += 1;
        } else {
            steps.push(Step::TakeB);
            j += 1;
        }
    }
    CrossGroupOrdering::new(steps)
}

/// Cross-group numerators `(xauc_ab, xauc_ba)` induced by an ordering.
pub(crate) fn cross_wins(ordering: &CrossGroupOrdering, a: &RankedGroup, b: &RankedGroup) -> (u64, u64) {
    let (mut c_ab, mut c_ba) = (0, 0);
    let (mut i, mut j) = (0, 0);
    for &s in &ordering.steps {
        match s {
            Step::TakeA => {
                if a.labels[i] {
                    c_ab += b.suffix_neg[j];
                }
                i += 1;
            }
            Step::TakeB => {
                if b.labels[j] {
                    c_ba += a.suffix_neg[i];
                }
                j += 1;
            }
        }
    }
    (c_ab, c_ba)
}

/// Pair counts with merged position as rank. Within-group numerators are
/// the score-based ones, which no cross-group ordering can change.
pub fn pair_counts_from_ordering(
    ordering: &CrossGroupOrdering,
    a: &RankedGroup,
    b: &RankedGroup,
) -> Result<PairCounts> {
    ordering.check_sizes(a.len(), b.len())?;
    let (xauc_ab, xauc_ba) = cross_wins(ordering, a, b);
    Ok(PairCounts {
        n1_a: a.n_pos(),
        n0_a: a.n_neg(),
        n1_b: b.n_pos(),
        n0_b: b.n_neg(),
        iauc_a: a.within_wins,
        iauc_b: b.within_wins,
        xauc_ab,
        xauc_ba,
    })
}

pub fn metrics_from_ordering(
    ordering: &CrossGroupOrdering,
    a: &RankedGroup,
    b: &RankedGroup,
) -> Result<FairnessReport> {
    let counts = pair_counts_from_ordering(ordering, a, b)?;
    let roles = GroupRoles::new(a.group.clone(), b.group.clone());
    Ok(FairnessReport::from_counts(&roles, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::fairness_report;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use Step::*;

    fn group_of(scores: &[f64], labels: &[bool], tag: &str) -> Vec<ScoredSample> {
        scores
            .iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (&s, &l))| ScoredSample::new(format!("{tag}{i}"), tag, l, s).unwrap())
            .collect()
    }

    #[test]
    fn sorts_descending() {
        let s = group_of(&[0.2, 0.9, 0.5], &[true, false, true], "a");
        assert_eq!(rank_within_group(&s, "a").unwrap().order(), &[1, 2, 0]);
    }

    #[test]
    fn ties_keep_index_order() {
        let s = group_of(&[0.5, 0.5], &[false, true], "a");
        let g = rank_within_group(&s, "a").unwrap();
        assert_eq!(g.order(), &[0, 1]);
        assert_eq!(g.within_wins(), 0);
    }

    #[test]
    fn empty_group_is_an_error() {
        let s = group_of(&[0.5], &[true], "a");
        assert!(matches!(rank_within_group(&s, "b"), Err(Error::EmptyGroup(_))));
    }

    #[test]
    fn count_arrays_match_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let scores: Vec<f64> = (0..40).map(|_| rng.random_range(0..10) as f64 / 10.0).collect();
        let labels: Vec<bool> = (0..40).map(|_| rng.random_bool(0.4)).collect();
        let g = rank_within_group(&group_of(&scores, &labels, "a"), "a").unwrap();
        assert!(g.scores().windows(2).all(|w| w[0] >= w[1]));
        let mut seen = g.order().to_vec();
        seen.sort();
        assert_eq!(seen, (0..40).collect::<Vec<_>>());
        for i in 0..=40 {
            let pos_before = g.labels()[..i].iter().filter(|&&l| l).count() as u64;
            let neg_after = g.labels()[i..].iter().filter(|&&l| !l).count() as u64;
            let pos_after = g.labels()[i..].iter().filter(|&&l| l).count() as u64;
            assert_eq!(g.prefix_pos()[i], pos_before);
            assert_eq!(g.suffix_neg()[i], neg_after);
            assert_eq!(g.suffix_pos()[i], pos_after);
        }
        assert_eq!(g.prefix_pos()[40], labels.iter().filter(|&&l| l).count() as u64);
        assert_eq!(g.suffix_neg()[0], labels.iter().filter(|&&l| !l).count() as u64);
        let mut brute = 0;
        for p in 0..40 {
            for q in 0..40 {
                if labels[p] && !labels[q] && scores[p] > scores[q] {
                    brute += 1;
                }
            }
        }
        assert_eq!(g.within_wins(), brute);
    }

    #[test]
    fn score_merge_examples() {
        let mut s = group_of(&[0.9], &[true], "a");
        s.extend(group_of(&[0.8], &[false], "b"));
        let (a, b) = rank_groups(&s, &GroupRoles::new("a", "b")).unwrap();
        assert_eq!(ordering_from_scores(&a, &b).steps(), &[TakeA, TakeB]);

        let mut s = group_of(&[0.5], &[true], "a");
        s.extend(group_of(&[0.5], &[false], "b"));
        let (a, b) = rank_groups(&s, &GroupRoles::new("a", "b")).unwrap();
        assert_eq!(ordering_from_scores(&a, &b).steps(), &[TakeA, TakeB]);
    }

    #[test]
    fn merged_restricts_to_group_order() {
        let mut s = group_of(&[0.3, 0.8, 0.6], &[true, false, true], "a");
        s.extend(group_of(&[0.7, 0.1], &[true, false], "b"));
        let (a, b) = rank_groups(&s, &GroupRoles::new("a", "b")).unwrap();
        let o = CrossGroupOrdering::for_sizes(vec![TakeB, TakeA, TakeA, TakeB, TakeA], 3, 2).unwrap();
        let merged = o.merged(&a, &b);
        let only_a: Vec<_> = merged.iter().copied().filter(|&i| s[i].group == "a").collect();
        let only_b: Vec<_> = merged.iter().copied().filter(|&i| s[i].group == "b").collect();
        assert_eq!(only_a, a.order());
        assert_eq!(only_b, b.order());
    }

    #[test]
    fn wrong_size_ordering_rejected() {
        let a = RankedGroup::from_labels("a", &[true]);
        let b = RankedGroup::from_labels("b", &[false]);
        let o = CrossGroupOrdering::new(vec![TakeA, TakeA]);
        assert!(matches!(metrics_from_ordering(&o, &a, &b), Err(Error::InvalidOrdering(_))));
    }

    #[test]
    fn positives_first_is_perfect() {
        let a = RankedGroup::from_labels("a", &[true, false]);
        let b = RankedGroup::from_labels("b", &[true, false]);
        let o = CrossGroupOrdering::new(vec![TakeA, TakeB, TakeA, TakeB]);
        assert_eq!(metrics_from_ordering(&o, &a, &b).unwrap().auc, Some(1.0));
    }

    #[test]
    fn unadjusted_ordering_reproduces_score_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let roles = GroupRoles::new("a", "b");
        for _ in 0..50 {
            let n = rng.random_range(2..40);
            let mut scores: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
            // distinct scores, random assignment
            for i in (1..n).rev() {
                scores.swap(i, rng.random_range(0..=i));
            }
            let s: Vec<_> = scores
                .iter()
                .enumerate()
                .map(|(i, &sc)| {
                    let g = if rng.random_bool(0.5) { "a" } else { "b" };
                    ScoredSample::new(i.to_string(), g, rng.random_bool(0.5), sc).unwrap()
                })
                .collect();
            let Ok((a, b)) = rank_groups(&s, &roles) else { continue };
            let o = ordering_from_scores(&a, &b);
            assert_eq!(
                metrics_from_ordering(&o, &a, &b).unwrap(),
                fairness_report(&s, &roles).unwrap()
            );
        }
    }

    #[test]
    fn ordering_metrics_match_position_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let la: Vec<bool> = (0..5).map(|_| rng.random_bool(0.5)).collect();
        let lb: Vec<bool> = (0..4).map(|_| rng.random_bool(0.5)).collect();
        let a = RankedGroup::from_labels("a", &la);
        let b = RankedGroup::from_labels("b", &lb);
        let mut steps = vec![TakeA; 5];
        steps.extend(vec![TakeB; 4]);
        for i in (1..9).rev() {
            steps.swap(i, rng.random_range(0..=i));
        }
        let o = CrossGroupOrdering::new(steps);
        let placed: Vec<(bool, bool)> = o
            .positions()
            .map(|(s, r)| match s {
                TakeA => (true, la[r]),
                TakeB => (false, lb[r]),
            })
            .collect();
        let (mut ab, mut ba, mut all) = (0, 0, 0);
        for p in 0..9 {
            for q in p + 1..9 {
                let (pa, pl) = placed[p];
                let (qa, ql) = placed[q];
                if pl && !ql {
                    all += 1;
                    if pa && !qa {
                        ab += 1;
                    }
                    if !pa && qa {
                        ba += 1;
                    }
                }
            }
        }
        let c = pair_counts_from_ordering(&o, &a, &b).unwrap();
        assert_eq!(c.xauc_ab, ab);
        assert_eq!(c.xauc_ba, ba);
        assert_eq!(c.auc_wins(), all);
    }
}
