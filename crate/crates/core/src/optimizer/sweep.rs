//! Tracing the utility/disparity trade-off across penalty weights.

use rayon::prelude::*;
use serde::Serialize;

use super::dp::xorder_dp;
use super::objective::{DisparityMetric, ObjectiveConfig};
use crate::error::{Error, Result};
use crate::metrics::FairnessReport;
use crate::numfmt::g17;
use crate::ordering::{metrics_from_ordering, ordering_from_scores, CrossGroupOrdering, RankedGroup};

/// Which ordering a curve point describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSetting {
    /// The ordering implied by the original scores.
    Unadjusted,
    Finite(f64),
    DisparityOnly,
}

impl LambdaSetting {
    /// Label used in curve files: `unadjusted`, the λ value, or `inf`.
    pub fn label(&self) -> String {
        match self {
            LambdaSetting::Unadjusted => "unadjusted".to_string(),
            LambdaSetting::Finite(l) => g17(*l),
            LambdaSetting::DisparityOnly => "inf".to_string(),
        }
    }

    pub fn config(&self, metric: DisparityMetric) -> Option<ObjectiveConfig> {
        match *self {
            LambdaSetting::Unadjusted => None,
            LambdaSetting::Finite(l) => Some(ObjectiveConfig::weighted(l, metric)),
            LambdaSetting::DisparityOnly => Some(ObjectiveConfig::disparity_only(metric)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub setting: LambdaSetting,
    pub report: FairnessReport,
    pub ordering: CrossGroupOrdering,
}

impl CurvePoint {
    fn new(setting: LambdaSetting, ordering: CrossGroupOrdering, a: &RankedGroup, b: &RankedGroup) -> Result<Self> {
        let report = metrics_from_ordering(&ordering, a, b)?;
        Ok(CurvePoint {
            setting,
            report,
            ordering,
        })
    }

    pub fn disparity(&self, metric: DisparityMetric) -> Option<f64> {
        match metric {
            DisparityMetric::Xauc => self.report.delta_xauc,
            DisparityMetric::Prf => self.report.delta_prf,
        }
    }
}

/// Baseline plus one point per λ, ending with the disparity-only limit.
#[derive(Debug, Clone)]
pub struct TradeoffCurve {
    pub metric: DisparityMetric,
    pub baseline: CurvePoint,
    pub points: Vec<CurvePoint>,
}

impl TradeoffCurve {
    /// Indices into `points` where the penalized disparity went up relative
    /// to the previous, smaller λ. The optimizer is only locally optimal, so
    /// this can happen.
    pub fn non_monotone(&self) -> Vec<usize> {
        self.points
            .windows(2)
            .enumerate()
            .filter_map(|(t, w)| match (w[0].disparity(self.metric), w[1].disparity(self.metric)) {
                (Some(prev), Some(next)) if next > prev => Some(t + 1),
                _ => None,
            })
            .collect()
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("lambda grid is empty".into()));
    }
    for &l in grid {
        ObjectiveConfig::weighted(l, DisparityMetric::Xauc).validate()?;
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "lambda grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Runs the optimizer at every λ of `grid` in parallel, then once more in
/// disparity-only mode.
pub fn sweep_lambda(
    a: &RankedGroup,
    b: &RankedGroup,
    grid: &[f64],
    metric: DisparityMetric,
) -> Result<TradeoffCurve> {
    validate_grid(grid)?;
    let settings: Vec<LambdaSetting> = grid
        .iter()
        .map(|&l| LambdaSetting::Finite(l))
        .chain(std::iter::once(LambdaSetting::DisparityOnly))
        .collect();
    let points = settings
        .par_iter()
        .map(|s| {
            let config = s.config(metric).expect("adjusted setting");
            CurvePoint::new(*s, xorder_dp(a, b, &config)?, a, b)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TradeoffCurve {
        metric,
        baseline: CurvePoint::new(LambdaSetting::Unadjusted, ordering_from_scores(a, b), a, b)?,
        points,
    })
}

/// Geometric λ schedule for [`auto_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoGrid {
    pub start: f64,
    pub factor: f64,
    pub max_steps: usize,
    /// Stop once the disparity drops below this.
    pub tolerance: f64,
}

impl Default for AutoGrid {
    fn default() -> Self {
        AutoGrid {
            start: 0.01,
            factor: 2.0,
            max_steps: 40,
            tolerance: 1e-4,
        }
    }
}

/// Raises λ geometrically until the disparity is below the tolerance or has
/// failed to decrease twice in a row.
pub fn auto_sweep(a: &RankedGroup, b: &RankedGroup, metric: DisparityMetric, schedule: &AutoGrid) -> Result<TradeoffCurve> {
    if !(schedule.start > 0.0 && schedule.start.is_finite() && schedule.factor > 1.0 && schedule.factor.is_finite()) {
        return Err(Error::Config("auto grid needs start > 0 and factor > 1".into()));
    }
    let mut points: Vec<CurvePoint> = Vec::new();
    let mut stalled = 0;
    let mut lambda = schedule.start;
    for _ in 0..schedule.max_steps {
        let setting = LambdaSetting::Finite(lambda);
        let ordering = xorder_dp(a, b, &setting.config(metric).expect("finite"))?;
        let point = CurvePoint::new(setting, ordering, a, b)?;
        let d = point.disparity(metric).unwrap_or(0.0);
        let improved = points
            .last()
            .and_then(|p| p.disparity(metric))
            .is_none_or(|prev| d < prev);
        points.push(point);
        if d < schedule.tolerance {
            break;
        }
        stalled = if improved { 0 } else { stalled + 1 };
        if stalled == 2 {
            break;
        }
        lambda *= schedule.factor;
    }
    let limit = xorder_dp(a, b, &ObjectiveConfig::disparity_only(metric))?;
    points.push(CurvePoint::new(LambdaSetting::DisparityOnly, limit, a, b)?);
    Ok(TradeoffCurve {
        metric,
        baseline: CurvePoint::new(LambdaSetting::Unadjusted, ordering_from_scores(a, b), a, b)?,
        points,
    })
}
