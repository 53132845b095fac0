//! Exhaustive search over interleavings, for checking the heuristics on
//! small instances.

use super::objective::{Objective, ObjectiveConfig};
use crate::error::{Error, Result};
use crate::ordering::{CrossGroupOrdering, RankedGroup, Step};

/// Largest number of interleavings [`brute_force_optimal`] will enumerate.
pub const BRUTE_FORCE_BUDGET: u128 = 1_000_000;

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Value {
    Exact(i128),
    Approx(f64),
}

struct Search<'a> {
    a: &'a RankedGroup,
    b: &'a RankedGroup,
    objective: Objective,
    path: Vec<Step>,
    best: Option<(Value, Vec<Step>)>,
}

impl Search<'_> {
    fn value(&self, c_ab: u64, c_ba: u64) -> Value {
        match self.objective.exact_ghat(c_ab, c_ba) {
            Some(v) => Value::Exact(v),
            None => Value::Approx(self.objective.ghat(c_ab, c_ba)),
        }
    }

    // TakeA is explored first, so the first maximizer found is the
    // lexicographically smallest one and is only displaced by a strict gain.
    fn visit(&mut self, i: usize, j: usize, c_ab: u64, c_ba: u64) {
        let (a, b) = (self.a, self.b);
        if i == a.len() && j == b.len() {
            let v = self.value(c_ab, c_ba);
            if self.best.as_ref().is_none_or(|(best, _)| v > *best) {
                self.best = Some((v, self.path.clone()));
            }
            return;
        }
        if i < a.len() {
            self.path.push(Step::TakeA);
            let gain = if a.labels()[i] { b.suffix_neg()[j] } else { 0 };
            self.visit(i + 1, j, c_ab + gain, c_ba);
            self.path.pop();
        }
        if j < b.len() {
            self.path.push(Step::TakeB);
            let gain = if b.labels()[j] { a.suffix_neg()[i] } else { 0 };
            self.visit(i, j + 1, c_ab, c_ba + gain);
            self.path.pop();
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for t in 0..k {
        acc = acc * (n - t) / (t + 1);
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

/// The interleaving maximizing `AUC − λ·disparity` (or minimizing disparity
/// alone), with ties resolved towards the earliest step sequence.
pub fn brute_force_optimal(
    a: &RankedGroup,
    b: &RankedGroup,
    config: &ObjectiveConfig,
) -> Result<CrossGroupOrdering> {
    let paths = binomial((a.len() + b.len()) as u128, a.len() as u128);
    if paths > BRUTE_FORCE_BUDGET {
        return Err(Error::CapacityExceeded {
            what: "interleavings to enumerate",
            needed: paths,
            budget: BRUTE_FORCE_BUDGET,
        });
    }
    let mut search = Search {
        a,
        b,
        objective: Objective::new(a, b, *config)?,
        path: Vec::with_capacity(a.len() + b.len()),
        best: None,
    };
    search.visit(0, 0, 0, 0);
    let (_, steps) = search.best.expect("at least one interleaving");
    Ok(CrossGroupOrdering::new(steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{xorder_dp, DisparityMetric};
    use crate::ordering::metrics_from_ordering;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_paths_for_single_samples() {
        assert_eq!(binomial(2, 1), 2);
        let a = RankedGroup::from_labels("a", &[false]);
        let b = RankedGroup::from_labels("b", &[true]);
        let o = brute_force_optimal(&a, &b, &ObjectiveConfig::utility()).unwrap();
        assert_eq!(o.steps(), &[Step::TakeB, Step::TakeA]);
    }

    #[test]
    fn refuses_large_enumerations() {
        let a = RankedGroup::from_labels("a", &[true; 12]);
        let b = RankedGroup::from_labels("b", &[false; 12]);
        assert!(matches!(
            brute_force_optimal(&a, &b, &ObjectiveConfig::utility()),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn never_worse_than_dynamic_program() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let config = ObjectiveConfig::weighted(1.0, DisparityMetric::Xauc);
        let mut checked = 0;
        while checked < 20 {
            let la: Vec<bool> = (0..5).map(|_| rng.random_bool(0.5)).collect();
            let lb: Vec<bool> = (0..5).map(|_| rng.random_bool(0.5)).collect();
            let a = RankedGroup::from_labels("a", &la);
            let b = RankedGroup::from_labels("b", &lb);
            let Ok(obj) = Objective::new(&a, &b, config) else { continue };
            let best = obj.evaluate(&brute_force_optimal(&a, &b, &config).unwrap(), &a, &b).unwrap();
            let dp = obj.evaluate(&xorder_dp(&a, &b, &config).unwrap(), &a, &b).unwrap();
            assert!(best >= dp);
            checked += 1;
        }
    }

    #[test]
    fn utility_optimum_sorts_by_label() {
        let a = RankedGroup::from_labels("a", &[true, false, false]);
        let b = RankedGroup::from_labels("b", &[true, true, false]);
        let o = brute_force_optimal(&a, &b, &ObjectiveConfig::utility()).unwrap();
        assert_eq!(metrics_from_ordering(&o, &a, &b).unwrap().auc, Some(1.0));
    }
}
