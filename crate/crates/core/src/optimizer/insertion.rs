//! Constructive baseline that keeps each group contiguous around a single
//! insertion point.
//!
//! Placing the whole of `b` directly below the `i` highest-ranked samples of
//! `a` gives closed-form win counts, so every insertion point is scored
//! exactly in O(1). The same is done with the roles swapped, and the better
//! of the two directions is returned.

use super::objective::{DisparityMetric, Objective, ObjectiveConfig};
use crate::error::{Error, Result};
use crate::ordering::{CrossGroupOrdering, RankedGroup, Step};

pub fn insertion_baseline(
    a: &RankedGroup,
    b: &RankedGroup,
    metric: DisparityMetric,
) -> Result<CrossGroupOrdering> {
    for g in [a, b] {
        if g.is_empty() {
            return Err(Error::EmptyGroup(g.group().to_string()));
        }
    }
    let objective = Objective::new(a, b, ObjectiveConfig::disparity_only(metric))?;
    let (n1_a, n1_b) = (a.n_pos(), b.n_pos());
    let (n0_a, n0_b) = (a.n_neg(), b.n_neg());

    // b block directly below a(i)
    let (i_best, h_a) = (0..=a.len())
        .map(|i| {
            let c_ab = a.prefix_pos()[i] * n0_b;
            let c_ba = n1_b * a.suffix_neg()[i];
            (i, objective.disparity_numerator(c_ab, c_ba).unsigned_abs())
        })
        .min_by_key(|&(_, h)| h)
        .expect("at least one insertion point");
    // a block directly below b(j)
    let (j_best, h_b) = (0..=b.len())
        .map(|j| {
            let c_ba = b.prefix_pos()[j] * n0_a;
            let c_ab = n1_a * b.suffix_neg()[j];
            (j, objective.disparity_numerator(c_ab, c_ba).unsigned_abs())
        })
        .min_by_key(|&(_, h)| h)
        .expect("at least one insertion point");

    let steps = if h_a <= h_b {
        block(Step::TakeA, i_best, a.len(), Step::TakeB, b.len())
    } else {
        block(Step::TakeB, j_best, b.len(), Step::TakeA, a.len())
    };
    Ok(CrossGroupOrdering::new(steps))
}

fn block(host: Step, at: usize, host_len: usize, guest: Step, guest_len: usize) -> Vec<Step> {
    let mut steps = vec![host; at];
    steps.extend(std::iter::repeat_n(guest, guest_len));
    steps.extend(std::iter::repeat_n(host, host_len - at));
    steps
}
