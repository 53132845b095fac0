use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::GroupCounts;
use crate::ordering::{cross_wins, CrossGroupOrdering, RankedGroup};

/// Which group-level disparity the objective penalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisparityMetric {
    Xauc,
    Prf,
}

impl std::str::FromStr for DisparityMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xauc" => Ok(DisparityMetric::Xauc),
            "prf" => Ok(DisparityMetric::Prf),
            other => Err(Error::Config(format!("unknown metric `{other}` (expected xauc or prf)"))),
        }
    }
}

impl std::fmt::Display for DisparityMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DisparityMetric::Xauc => "xauc",
            DisparityMetric::Prf => "prf",
        })
    }
}

/// Trade-off between utility and disparity: maximize `AUC − λ·disparity`.
///
/// With `disparity_only` set the utility term is dropped entirely (the
/// `λ → ∞` limit) and `lambda` is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub lambda: f64,
    pub metric: DisparityMetric,
    pub disparity_only: bool,
}

impl ObjectiveConfig {
    pub fn weighted(lambda: f64, metric: DisparityMetric) -> Self {
        ObjectiveConfig {
            lambda,
            metric,
            disparity_only: false,
        }
    }

    pub fn utility() -> Self {
        Self::weighted(0.0, DisparityMetric::Xauc)
    }

    pub fn disparity_only(metric: DisparityMetric) -> Self {
        ObjectiveConfig {
            lambda: f64::INFINITY,
            metric,
            disparity_only: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.disparity_only && !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be a finite non-negative number, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    pub(crate) fn is_utility_only(&self) -> bool {
        !self.disparity_only && self.lambda == 0.0
    }
}

/// Ĝ for a (possibly partial) path, given its cross-group win counts.
///
/// `c_ab` counts (positive a, negative b) pairs won by placed a-positives
/// when every unplaced b-sample is appended below them; `c_ba` is the mirror
/// image. At the end of the lattice the two are the xAUC numerators.
#[derive(Debug, Clone)]
pub struct Objective {
    config: ObjectiveConfig,
    counts: GroupCounts,
    within_a: u64,
    within_b: u64,
}

impl Objective {
    pub fn new(a: &RankedGroup, b: &RankedGroup, config: ObjectiveConfig) -> Result<Self> {
        config.validate()?;
        let counts = GroupCounts {
            n1_a: a.n_pos(),
            n0_a: a.n_neg(),
            n1_b: b.n_pos(),
            n0_b: b.n_neg(),
        };
        if !config.is_utility_only() {
            let mut missing = Vec::new();
            match config.metric {
                DisparityMetric::Xauc => {
                    if counts.k_ab() == 0 {
                        missing.push("xauc(a,b) needs a positive in a and a negative in b".to_string());
                    }
                    if counts.k_ba() == 0 {
                        missing.push("xauc(b,a) needs a positive in b and a negative in a".to_string());
                    }
                }
                DisparityMetric::Prf => {
                    if counts.n1_a == 0 || counts.n1_b == 0 || counts.n0() == 0 {
                        missing.push("prf needs a positive in each group and a negative".to_string());
                    }
                }
            }
            if !missing.is_empty() {
                return Err(Error::EmptyClass { missing });
            }
        }
        Ok(Objective {
            config,
            counts,
            within_a: a.within_wins(),
            within_b: b.within_wins(),
        })
    }

    pub fn config(&self) -> &ObjectiveConfig {
        &self.config
    }

    pub fn counts(&self) -> &GroupCounts {
        &self.counts
    }

    /// Signed disparity scaled to an integer: `c_ab·k_ba − c_ba·k_ab` for
    /// xAUC, `(c_ab + iauc_a)·n1_b − (c_ba + iauc_b)·n1_a` for PRF.
    pub fn disparity_numerator(&self, c_ab: u64, c_ba: u64) -> i128 {
        let g = &self.counts;
        match self.config.metric {
            DisparityMetric::Xauc => c_ab as i128 * g.k_ba() as i128 - c_ba as i128 * g.k_ab() as i128,
            DisparityMetric::Prf => {
                (c_ab + self.within_a) as i128 * g.n1_b as i128
                    - (c_ba + self.within_b) as i128 * g.n1_a as i128
            }
        }
    }

    /// Denominator turning [`Self::disparity_numerator`] into a rate.
    pub fn disparity_denominator(&self) -> i128 {
        let g = &self.counts;
        match self.config.metric {
            DisparityMetric::Xauc => g.k_ab() as i128 * g.k_ba() as i128,
            DisparityMetric::Prf => g.n1_a as i128 * g.n1_b as i128 * g.n0() as i128,
        }
    }

    pub fn disparity(&self, c_ab: u64, c_ba: u64) -> f64 {
        self.disparity_numerator(c_ab, c_ba).unsigned_abs() as f64 / self.disparity_denominator() as f64
    }

    /// Ĝ in pair units for weighted objectives, `−disparity` in disparity-only mode.
    pub fn ghat(&self, c_ab: u64, c_ba: u64) -> f64 {
        if self.config.disparity_only {
            -self.disparity(c_ab, c_ba)
        } else if self.config.lambda == 0.0 {
            (c_ab + c_ba) as f64
        } else {
            (c_ab + c_ba) as f64 - self.config.lambda * self.counts.k() as f64 * self.disparity(c_ab, c_ba)
        }
    }

    /// Exact Ĝ where one exists: `c_ab + c_ba` at λ = 0 and
    /// `−|disparity numerator|` in disparity-only mode.
    pub fn exact_ghat(&self, c_ab: u64, c_ba: u64) -> Option<i128> {
        if self.config.disparity_only {
            Some(-(self.disparity_numerator(c_ab, c_ba).abs()))
        } else if self.config.lambda == 0.0 {
            Some((c_ab + c_ba) as i128)
        } else {
            None
        }
    }

    /// Final Ĝ of a complete ordering, equal to the global objective G.
    pub fn evaluate(&self, ordering: &CrossGroupOrdering, a: &RankedGroup, b: &RankedGroup) -> Result<f64> {
        ordering.check_sizes(a.len(), b.len())?;
        let (c_ab, c_ba) = cross_wins(ordering, a, b);
        Ok(self.ghat(c_ab, c_ba))
    }

    pub fn evaluate_exact(
        &self,
        ordering: &CrossGroupOrdering,
        a: &RankedGroup,
        b: &RankedGroup,
    ) -> Result<Option<i128>> {
        ordering.check_sizes(a.len(), b.len())?;
        let (c_ab, c_ba) = cross_wins(ordering, a, b);
        Ok(self.exact_ghat(c_ab, c_ba))
    }

    pub(crate) fn scorer(&self) -> Scorer {
        let g = &self.counts;
        if self.config.disparity_only {
            Scorer::Exact(ExactDisparity {
                metric: self.config.metric,
                k_ab: g.k_ab() as i128,
                k_ba: g.k_ba() as i128,
                n1_a: g.n1_a as i128,
                n1_b: g.n1_b as i128,
                within_a: self.within_a as i128,
                within_b: self.within_b as i128,
            })
        } else if self.config.lambda == 0.0 {
            Scorer::Utility(Utility)
        } else {
            let scale = self.config.lambda * g.k() as f64;
            Scorer::Weighted(match self.config.metric {
                DisparityMetric::Xauc => Weighted {
                    scale,
                    den_a: g.k_ab() as f64,
                    den_b: g.k_ba() as f64,
                    offset_a: 0.0,
                    offset_b: 0.0,
                },
                DisparityMetric::Prf => Weighted {
                    scale,
                    den_a: (g.n1_a * g.n0()) as f64,
                    den_b: (g.n1_b * g.n0()) as f64,
                    offset_a: self.within_a as f64,
                    offset_b: self.within_b as f64,
                },
            })
        }
    }
}

/// Monomorphic Ĝ evaluators for the inner loops.
pub(crate) trait Score {
    type Value: PartialOrd + Copy;
    fn value(&self, c_ab: u64, c_ba: u64) -> Self::Value;
}

pub(crate) enum Scorer {
    Utility(Utility),
    Weighted(Weighted),
    Exact(ExactDisparity),
}

pub(crate) struct Utility;

impl Score for Utility {
    type Value = u64;
    #[inline]
    fn value(&self, c_ab: u64, c_ba: u64) -> u64 {
        c_ab + c_ba
    }
}

pub(crate) struct Weighted {
    scale: f64,
    den_a: f64,
    den_b: f64,
    offset_a: f64,
    offset_b: f64,
}

impl Score for Weighted {
    type Value = f64;
    #[inline]
    fn value(&self, c_ab: u64, c_ba: u64) -> f64 {
        let ra = (c_ab as f64 + self.offset_a) / self.den_a;
        let rb = (c_ba as f64 + self.offset_b) / self.den_b;
        (c_ab + c_ba) as f64 - self.scale * (ra - rb).abs()
    }
}

pub(crate) struct ExactDisparity {
    metric: DisparityMetric,
    k_ab: i128,
    k_ba: i128,
    n1_a: i128,
    n1_b: i128,
    within_a: i128,
    within_b: i128,
}

impl Score for ExactDisparity {
    type Value = i128;
    #[inline]
    fn value(&self, c_ab: u64, c_ba: u64) -> i128 {
        let h = match self.metric {
            DisparityMetric::Xauc => c_ab as i128 * self.k_ba - c_ba as i128 * self.k_ab,
            DisparityMetric::Prf => {
                (c_ab as i128 + self.within_a) * self.n1_b - (c_ba as i128 + self.within_b) * self.n1_a
            }
        };
        -h.abs()
    }
}
