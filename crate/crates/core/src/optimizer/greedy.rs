//! Single forward pass that always extends with whichever group keeps the
//! disparity smaller, preferring `a` when the two are equal.

use super::objective::{DisparityMetric, Objective, ObjectiveConfig, Score, Scorer};
use crate::error::{Error, Result};
use crate::ordering::{CrossGroupOrdering, RankedGroup, Step};

pub fn greedy_forward(a: &RankedGroup, b: &RankedGroup, metric: DisparityMetric) -> Result<CrossGroupOrdering> {
    for g in [a, b] {
        if g.is_empty() {
            return Err(Error::EmptyGroup(g.group().to_string()));
        }
    }
    let objective = Objective::new(a, b, ObjectiveConfig::disparity_only(metric))?;
    let Scorer::Exact(score) = objective.scorer() else {
        unreachable!("disparity-only objectives score exactly")
    };
    let (n_a, n_b) = (a.len(), b.len());
    let mut steps = Vec::with_capacity(n_a + n_b);
    let (mut i, mut j, mut c_ab, mut c_ba) = (0, 0, 0u64, 0u64);
    while i < n_a || j < n_b {
        let via_a = (c_ab + if i < n_a && a.labels()[i] { b.suffix_neg()[j] } else { 0 }, c_ba);
        let via_b = (c_ab, c_ba + if j < n_b && b.labels()[j] { a.suffix_neg()[i] } else { 0 });
        let take_a = j == n_b || (i < n_a && score.value(via_a.0, via_a.1) >= score.value(via_b.0, via_b.1));
        if take_a {
            (c_ab, c_ba) = via_a;
            i += 1;
            steps.push(Step::TakeA);
        } else {
            (c_ab, c_ba) = via_b;
            j += 1;
            steps.push(Step::TakeB);
        }
    }
    Ok(CrossGroupOrdering::new(steps))
}
