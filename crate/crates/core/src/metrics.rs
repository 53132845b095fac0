//! Exact pair-counting utility and fairness metrics.
//!
//! Every metric here is a fraction of (positive, negative) pairs in which the
//! positive has the strictly greater score. Tied pairs count as losses, so a
//! dataset where every score is equal has AUC 0 rather than the conventional
//! 0.5. Numerators are exact `u64` counts; rates are derived from them.
//!
//! Two groups take part in the group metrics. The *anchor* group (`a`) keeps
//! its scores during post-processing, the *adjusted* group (`b`) is the one
//! whose scores get rearranged.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::ser_opt_f64;

/// One scored individual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub id: String,
    pub group: String,
    pub label: bool,
    pub score: f64,
}

impl ScoredSample {
    pub fn new(
        id: impl Into<String>,
        group: impl Into<String>,
        label: bool,
        score: f64,
    ) -> Result<Self> {
        if !score.is_finite() {
            return Err(Error::Config(format!("score {score} is not finite")));
        }
        Ok(ScoredSample {
            id: id.into(),
            group: group.into(),
            label,
            score,
        })
    }
}

/// Which tag plays the anchor (`a`) role and which the adjusted (`b`) role.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupRoles {
    pub anchor: String,
    pub adjusted: String,
}

impl GroupRoles {
    pub fn new(anchor: impl Into<String>, adjusted: impl Into<String>) -> Self {
        GroupRoles {
            anchor: anchor.into(),
            adjusted: adjusted.into(),
        }
    }

    pub(crate) fn side_of(&self, group: &str) -> Result<Side> {
        if group == self.anchor {
            Ok(Side::A)
        } else if group == self.adjusted {
            Ok(Side::B)
        } else {
            Err(Error::UnknownGroup {
                found: group.to_string(),
                anchor: self.anchor.clone(),
                adjusted: self.adjusted.clone(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    A,
    B,
}

/// Won pairs out of all eligible pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairRate {
    pub wins: u64,
    pub pairs: u64,
}

impl PairRate {
    pub fn value(&self) -> f64 {
        self.wins as f64 / self.pairs as f64
    }

    pub fn exact(&self) -> Ratio<u64> {
        Ratio::new(self.wins, self.pairs)
    }
}

/// Positive/negative counts per group and the pair-count constants built from them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroupCounts {
    pub n1_a: u64,
    pub n0_a: u64,
    pub n1_b: u64,
    pub n0_b: u64,
}

impl GroupCounts {
    pub fn n1(&self) -> u64 {
        self.n1_a + self.n1_b
    }
    pub fn n0(&self) -> u64 {
        self.n0_a + self.n0_b
    }
    /// All (positive, negative) pairs.
    pub fn k(&self) -> u64 {
        self.n1() * self.n0()
    }
    pub fn k_a(&self) -> u64 {
        self.n1_a * self.n0_a
    }
    pub fn k_b(&self) -> u64 {
        self.n1_b * self.n0_b
    }
    /// Pairs of (positive in a, negative in b).
    pub fn k_ab(&self) -> u64 {
        self.n1_a * self.n0_b
    }
    /// Pairs of (positive in b, negative in a).
    pub fn k_ba(&self) -> u64 {
        self.n1_b * self.n0_a
    }
}

/// Integer numerators behind every rate in a [`FairnessReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PairCounts {
    pub n1_a: u64,
    pub n0_a: u64,
    pub n1_b: u64,
    pub n0_b: u64,
    /// Positive a above negative a.
    pub iauc_a: u64,
    /// Positive b above negative b.
    pub iauc_b: u64,
    /// Positive a above negative b.
    pub xauc_ab: u64,
    /// Positive b above negative a.
    pub xauc_ba: u64,
}

impl PairCounts {
    pub fn group_counts(&self) -> GroupCounts {
        GroupCounts {
            n1_a: self.n1_a,
            n0_a: self.n0_a,
            n1_b: self.n1_b,
            n0_b: self.n0_b,
        }
    }

    pub fn auc_wins(&self) -> u64 {
        self.iauc_a + self.iauc_b + self.xauc_ab + self.xauc_ba
    }

    pub fn prf_a_wins(&self) -> u64 {
        self.iauc_a + self.xauc_ab
    }

    pub fn prf_b_wins(&self) -> u64 {
        self.iauc_b + self.xauc_ba
    }

    /// |xAUC(a,b) − xAUC(b,a)| as an exact fraction.
    pub fn delta_xauc_exact(&self) -> Option<Ratio<u128>> {
        let g = self.group_counts();
        let (k_ab, k_ba) = (g.k_ab() as u128, g.k_ba() as u128);
        if k_ab == 0 || k_ba == 0 {
            return None;
        }
        let lhs = self.xauc_ab as u128 * k_ba;
        let rhs = self.xauc_ba as u128 * k_ab;
        Some(Ratio::new(lhs.abs_diff(rhs), k_ab * k_ba))
    }

    /// |PRF(a) − PRF(b)| as an exact fraction.
    pub fn delta_prf_exact(&self) -> Option<Ratio<u128>> {
        let g = self.group_counts();
        let (n1_a, n1_b, n0) = (g.n1_a as u128, g.n1_b as u128, g.n0() as u128);
        if n1_a == 0 || n1_b == 0 || n0 == 0 {
            return None;
        }
        let lhs = self.prf_a_wins() as u128 * n1_b;
        let rhs = self.prf_b_wins() as u128 * n1_a;
        Some(Ratio::new(lhs.abs_diff(rhs), n1_a * n1_b * n0))
    }
}

/// Every utility and disparity metric for a two-group dataset.
///
/// Rates whose denominator is zero are `None` (serialized as `null`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairnessReport {
    pub anchor_group: String,
    pub adjusted_group: String,
    #[serde(serialize_with = "ser_opt_f64")]
    pub auc: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub iauc_a: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub iauc_b: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub xauc_ab: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub xauc_ba: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub delta_xauc: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub prf_a: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub prf_b: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub delta_prf: Option<f64>,
    pub pair_counts: PairCounts,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn ratio_f64(r: Option<Ratio<u128>>) -> Option<f64> {
    r.map(|r| *r.numer() as f64 / *r.denom() as f64)
}

impl FairnessReport {
    pub fn from_counts(roles: &GroupRoles, counts: PairCounts) -> Self {
        let g = counts.group_counts();
        FairnessReport {
            anchor_group: roles.anchor.clone(),
            adjusted_group: roles.adjusted.clone(),
            auc: ratio(counts.auc_wins(), g.k()),
            iauc_a: ratio(counts.iauc_a, g.k_a()),
            iauc_b: ratio(counts.iauc_b, g.k_b()),
            xauc_ab: ratio(counts.xauc_ab, g.k_ab()),
            xauc_ba: ratio(counts.xauc_ba, g.k_ba()),
            delta_xauc: ratio_f64(counts.delta_xauc_exact()),
            prf_a: ratio(counts.prf_a_wins(), g.n1_a * g.n0()),
            prf_b: ratio(counts.prf_b_wins(), g.n1_b * g.n0()),
            delta_prf: ratio_f64(counts.delta_prf_exact()),
            pair_counts: counts,
        }
    }

    /// Names of metrics that could not be computed.
    pub fn missing(&self) -> Vec<&'static str> {
        [
            ("auc", self.auc),
            ("iauc_a", self.iauc_a),
            ("iauc_b", self.iauc_b),
            ("xauc_ab", self.xauc_ab),
            ("xauc_ba", self.xauc_ba),
            ("delta_xauc", self.delta_xauc),
            ("prf_a", self.prf_a),
            ("prf_b", self.prf_b),
            ("delta_prf", self.delta_prf),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.is_none().then_some(name))
        .collect()
    }

    /// Fails with an aggregated [`Error::EmptyClass`] if any metric is absent.
    pub fn ensure_complete(&self) -> Result<()> {
        let missing = self.missing();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::EmptyClass {
                missing: missing.into_iter().map(String::from).collect(),
            })
        }
    }
}

/// Counts (positive, negative) pairs won by the positive, over the samples
/// selected by `is_pos` and `is_neg`. Sort-and-scan, O(n log n).
fn count_wins<P, N>(samples: &[ScoredSample], is_pos: P, is_neg: N) -> PairRate
where
    P: Fn(&ScoredSample) -> bool,
    N: Fn(&ScoredSample) -> bool,
{
    let mut idx: Vec<usize> = (0..samples.len())
        .filter(|&i| is_pos(&samples[i]) || is_neg(&samples[i]))
        .collect();
    idx.sort_by(|&x, &y| samples[x].score.total_cmp(&samples[y].score));

    let (mut wins, mut n_pos, mut n_neg) = (0u64, 0u64, 0u64);
    let mut start = 0;
    while start < idx.len() {
        let s = samples[idx[start]].score;
        let end = start + idx[start..].partition_point(|&i| samples[i].score == s);
        let block = &idx[start..end];
        for &i in block {
            if is_pos(&samples[i]) {
                wins += n_neg;
                n_pos += 1;
            }
        }
        n_neg += block.iter().filter(|&&i| is_neg(&samples[i])).count() as u64;
        start = end;
    }
    PairRate {
        wins,
        pairs: n_pos * n_neg,
    }
}

fn nonempty(rate: PairRate, what: impl FnOnce() -> String) -> Result<PairRate> {
    if rate.pairs == 0 {
        Err(Error::empty_class(what()))
    } else {
        Ok(rate)
    }
}

/// Fraction of (positive, negative) pairs where the positive scores strictly higher.
pub fn compute_auc(samples: &[ScoredSample]) -> Result<PairRate> {
    let rate = count_wins(samples, |s| s.label, |s| !s.label);
    nonempty(rate, || "auc needs at least one positive and one negative".into())
}

/// xAUC of `from_group` over `to_group`: positives of the former against
/// negatives of the latter.
pub fn compute_xauc(samples: &[ScoredSample], from_group: &str, to_group: &str) -> Result<PairRate> {
    let rate = count_wins(
        samples,
        |s| s.label && s.group == from_group,
        |s| !s.label && s.group == to_group,
    );
    nonempty(rate, || {
        format!("xauc({from_group},{to_group}) needs a positive in `{from_group}` and a negative in `{to_group}`")
    })
}

/// Within-group AUC.
pub fn compute_iauc(samples: &[ScoredSample], group: &str) -> Result<PairRate> {
    compute_xauc(samples, group, group).map_err(|_| {
        Error::empty_class(format!("iauc({group}) needs a positive and a negative in `{group}`"))
    })
}

/// Pairwise ranking fairness: positives of `group` against negatives of any group.
pub fn compute_prf(samples: &[ScoredSample], group: &str) -> Result<PairRate> {
    let rate = count_wins(samples, |s| s.label && s.group == group, |s| !s.label);
    nonempty(rate, || {
        format!("prf({group}) needs a positive in `{group}` and at least one negative")
    })
}

/// Counts all four pair classes in a single sorted pass.
pub fn pair_counts(samples: &[ScoredSample], roles: &GroupRoles) -> Result<PairCounts> {
    let mut keyed = Vec::with_capacity(samples.len());
    for s in samples {
        keyed.push((s.score, s.label, roles.side_of(&s.group)?));
    }
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut c = PairCounts::default();
    let (mut below_a, mut below_b) = (0u64, 0u64);
    let mut start = 0;
    while start < keyed.len() {
        let s = keyed[start].0;
        let end = start + keyed[start..].partition_point(|k| k.0 == s);
        for &(_, label, side) in &keyed[start..end] {
            match (label, side) {
                (true, Side::A) => {
                    c.n1_a += 1;
                    c.iauc_a += below_a;
                    c.xauc_ab += below_b;
                }
                (true, Side::B) => {
                    c.n1_b += 1;
                    c.xauc_ba += below_a;
                    c.iauc_b += below_b;
                }
                (false, Side::A) => c.n0_a += 1,
                (false, Side::B) => c.n0_b += 1,
            }
        }
        below_a = c.n0_a;
        below_b = c.n0_b;
        start = end;
    }
    Ok(c)
}

/// All metrics from one sorted pass. Metrics whose denominators vanish are
/// reported as absent rather than failing the whole report.
pub fn fairness_report(samples: &[ScoredSample], roles: &GroupRoles) -> Result<FairnessReport> {
    if samples.iter().any(|s| !(0.0..=1.0).contains(&s.score)) {
        log::warn!("scores outside [0, 1]; metrics only depend on their ordering");
    }
    let counts = pair_counts(samples, roles)?;
    Ok(FairnessReport::from_counts(roles, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample(group: &str, label: bool, score: f64) -> ScoredSample {
        ScoredSample::new("", group, label, score).unwrap()
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Vec<ScoredSample> {
        (0..n)
            .map(|i| {
                let group = if rng.random_bool(0.5) { "a" } else { "b" };
                // coarse grid so ties actually occur
                let score = rng.random_range(0..8) as f64 / 8.0;
                ScoredSample::new(i.to_string(), group, rng.random_bool(0.5), score).unwrap()
            })
            .collect()
    }

    /// Brute-force O(n²) oracle.
    fn brute(samples: &[ScoredSample], pos: impl Fn(&ScoredSample) -> bool, neg: impl Fn(&ScoredSample) -> bool) -> (u64, u64) {
        let (mut wins, mut pairs) = (0, 0);
        for p in samples.iter().filter(|s| pos(s)) {
            for q in samples.iter().filter(|s| neg(s)) {
                pairs += 1;
                if p.score > q.score {
                    wins += 1;
                }
            }
        }
        (wins, pairs)
    }

    #[test]
    fn separated_auc_is_one() {
        let mut s: Vec<_> = [0.9, 0.8, 0.7].iter().map(|&x| sample("a", true, x)).collect();
        s.extend([0.3, 0.2, 0.1].iter().map(|&x| sample("a", false, x)));
        assert_eq!(compute_auc(&s).unwrap().value(), 1.0);
    }

    #[test]
    fn tie_counts_as_loss() {
        let s = vec![sample("a", true, 0.5), sample("b", false, 0.5)];
        assert_eq!(compute_auc(&s).unwrap().value(), 0.0);
        let s = vec![sample("a", true, 0.5), sample("a", false, 0.5)];
        assert_eq!(compute_iauc(&s, "a").unwrap().value(), 0.0);
    }

    #[test]
    fn xauc_extremes() {
        let hi = vec![sample("a", true, 1.0), sample("a", true, 1.0), sample("b", false, 0.0)];
        assert_eq!(compute_xauc(&hi, "a", "b").unwrap().value(), 1.0);
        let lo = vec![sample("a", true, 0.0), sample("b", false, 1.0)];
        assert_eq!(compute_xauc(&lo, "a", "b").unwrap().value(), 0.0);
    }

    #[test]
    fn prf_extremes() {
        let s = vec![
            sample("a", true, 0.9),
            sample("a", false, 0.2),
            sample("b", false, 0.1),
            sample("b", true, 0.05),
        ];
        assert_eq!(compute_prf(&s, "a").unwrap().value(), 1.0);
        assert_eq!(compute_prf(&s, "b").unwrap().value(), 0.0);
    }

    #[test]
    fn empty_class_errors() {
        let s = vec![sample("a", true, 0.9), sample("b", true, 0.1)];
        assert!(matches!(compute_auc(&s), Err(Error::EmptyClass { .. })));
        assert!(matches!(compute_xauc(&s, "a", "b"), Err(Error::EmptyClass { .. })));
        assert!(matches!(compute_iauc(&s, "a"), Err(Error::EmptyClass { .. })));
        assert!(matches!(compute_prf(&s, "a"), Err(Error::EmptyClass { .. })));
    }

    #[test]
    fn unknown_group_rejected() {
        let s = vec![sample("a", true, 0.9), sample("c", false, 0.1)];
        let err = fairness_report(&s, &GroupRoles::new("a", "b")).unwrap_err();
        assert!(matches!(err, Error::UnknownGroup { .. }));
    }

    #[test]
    fn partial_report_marks_absent_metrics() {
        let s = vec![sample("a", true, 0.9), sample("a", false, 0.3), sample("b", false, 0.1)];
        let r = fairness_report(&s, &GroupRoles::new("a", "b")).unwrap();
        assert_eq!(r.auc, Some(1.0));
        assert_eq!(r.iauc_b, None);
        assert_eq!(r.xauc_ba, None);
        assert!(r.missing().contains(&"delta_xauc"));
        assert!(matches!(r.ensure_complete(), Err(Error::EmptyClass { missing }) if missing.len() == 5));
    }

    #[test]
    fn identical_groups_have_no_disparity() {
        let mut s = Vec::new();
        for (i, &(label, score)) in [(true, 0.9), (false, 0.6), (true, 0.4), (false, 0.2)].iter().enumerate() {
            s.push(sample("a", label, score + i as f64 * 1e-3));
            s.push(sample("b", label, score + i as f64 * 1e-3));
        }
        let r = fairness_report(&s, &GroupRoles::new("a", "b")).unwrap();
        assert_eq!(r.delta_xauc, Some(0.0));
        assert_eq!(r.delta_prf, Some(0.0));
    }

    #[test]
    fn seeded_small_instances_match_brute_force() {
        let roles = GroupRoles::new("a", "b");
        for (seed, n) in [(8u64, 8usize), (10, 10), (12, 12)] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = loop {
                let s = random_instance(&mut rng, n);
                let r = fairness_report(&s, &roles).unwrap();
                if r.missing().is_empty() {
                    break s;
                }
            };
            let r = fairness_report(&s, &roles).unwrap();
            let c = r.pair_counts;
            let is = |g: &'static str, l: bool| move |x: &ScoredSample| x.group == g && x.label == l;
            assert_eq!(brute(&s, |x| x.label, |x| !x.label).0, c.auc_wins());
            assert_eq!(brute(&s, is("a", true), is("a", false)).0, c.iauc_a);
            assert_eq!(brute(&s, is("b", true), is("b", false)).0, c.iauc_b);
            assert_eq!(brute(&s, is("a", true), is("b", false)).0, c.xauc_ab);
            assert_eq!(brute(&s, is("b", true), is("a", false)).0, c.xauc_ba);
            assert_eq!(compute_auc(&s).unwrap().wins, c.auc_wins());
            assert_eq!(compute_xauc(&s, "a", "b").unwrap().wins, c.xauc_ab);
            assert_eq!(compute_xauc(&s, "b", "a").unwrap().wins, c.xauc_ba);
            assert_eq!(compute_iauc(&s, "b").unwrap().wins, c.iauc_b);
            let prf = compute_prf(&s, "a").unwrap();
            let g = c.group_counts();
            assert_eq!(prf.pairs, g.n1_a * g.n0());
            assert_eq!(prf.wins, c.xauc_ab + c.iauc_a);
            assert_eq!(
                Ratio::new(prf.wins as u128, prf.pairs as u128),
                Ratio::new(g.n0_b as u128, g.n0() as u128) * Ratio::new(c.xauc_ab as u128, g.k_ab() as u128)
                    + Ratio::new(g.n0_a as u128, g.n0() as u128) * Ratio::new(c.iauc_a as u128, g.k_a() as u128)
            );
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn instance() -> impl Strategy<Value = Vec<ScoredSample>> {
            prop::collection::vec((any::<bool>(), any::<bool>(), 0u8..12), 1..50).prop_map(|v| {
                v.into_iter()
                    .enumerate()
                    .map(|(i, (g, l, s))| {
                        ScoredSample::new(i.to_string(), if g { "a" } else { "b" }, l, s as f64 / 11.0)
                            .unwrap()
                    })
                    .collect()
            })
        }

        proptest! {
            #[test]
            fn numerators_match_double_loop(s in instance()) {
                let c = pair_counts(&s, &GroupRoles::new("a", "b")).unwrap();
                let is = |g: &'static str, l: bool| move |x: &ScoredSample| x.group == g && x.label == l;
                prop_assert_eq!(brute(&s, |x| x.label, |x| !x.label).0, c.auc_wins());
                prop_assert_eq!(brute(&s, is("a", true), is("b", false)).0, c.xauc_ab);
                prop_assert_eq!(brute(&s, is("b", true), is("a", false)).0, c.xauc_ba);
                prop_assert_eq!(brute(&s, is("a", true), is("a", false)).0, c.iauc_a);
                prop_assert_eq!(brute(&s, is("b", true), is("b", false)).0, c.iauc_b);
            }

            #[test]
            fn rates_are_bounded(s in instance()) {
                let r = fairness_report(&s, &GroupRoles::new("a", "b")).unwrap();
                for v in [r.auc, r.iauc_a, r.iauc_b, r.xauc_ab, r.xauc_ba, r.delta_xauc, r.prf_a, r.prf_b, r.delta_prf]
                    .into_iter()
                    .flatten()
                {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }

            #[test]
            fn strictly_increasing_transform_is_invisible(s in instance(), shift in -3.0f64..3.0, scale in 0.1f64..10.0) {
                let roles = GroupRoles::new("a", "b");
                let warped: Vec<_> = s
                    .iter()
                    .map(|x| ScoredSample { score: (scale * x.score + shift).exp(), ..x.clone() })
                    .collect();
                prop_assert_eq!(pair_counts(&s, &roles).unwrap(), pair_counts(&warped, &roles).unwrap());
            }
        }
    }
}
