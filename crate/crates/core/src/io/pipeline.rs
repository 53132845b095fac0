//! End-to-end runs: optimize on training data, rescore, transfer to test
//! data, and write the resulting artifacts.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{fairness_report, FairnessReport, GroupRoles, ScoredSample};
use crate::numfmt::g17;
use crate::optimizer::{
    auto_sweep, sweep_lambda, AutoGrid, DisparityMetric, LambdaSetting, ObjectiveConfig, TradeoffCurve, XOrder,
    DEFAULT_CELL_BUDGET,
};
use crate::ordering::{rank_groups, CrossGroupOrdering, RankedGroup};
use crate::transfer::{rearrange_training_scores, BoundaryMargin, ScoreMapping, TransferWarning};

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustConfig {
    pub objective: ObjectiveConfig,
    pub margin: BoundaryMargin,
    pub cell_budget: u64,
}

impl AdjustConfig {
    pub fn new(objective: ObjectiveConfig) -> Self {
        AdjustConfig {
            objective,
            margin: BoundaryMargin::default(),
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }
}

/// λ values to sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Fixed(Vec<f64>),
    Auto(AutoGrid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub metric: DisparityMetric,
    pub grid: GridSpec,
    pub margin: BoundaryMargin,
}

/// Metrics of one split before and after adjustment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub source: String,
    pub before: FairnessReport,
    pub after: FairnessReport,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub anchor_group: String,
    pub adjusted_group: String,
    pub metric: DisparityMetric,
    /// `inf` in disparity-only mode.
    pub lambda: String,
    pub scheme: &'static str,
    pub train: SplitReport,
    pub test: Option<SplitReport>,
    pub warnings: Vec<TransferWarning>,
}

#[derive(Debug, Clone)]
pub struct AdjustOutcome {
    pub summary: RunSummary,
    pub ordering: CrossGroupOrdering,
    pub mapping: ScoreMapping,
    /// New score of every training sample, in dataset order.
    pub adjusted_train: Vec<f64>,
    pub adjusted_test: Option<Vec<f64>>,
}

fn rescored(samples: &[ScoredSample], scores: &[f64]) -> Vec<ScoredSample> {
    samples
        .iter()
        .zip(scores)
        .map(|(s, &score)| ScoredSample { score, ..s.clone() })
        .collect()
}

fn lambda_label(config: &ObjectiveConfig) -> String {
    if config.disparity_only {
        LambdaSetting::DisparityOnly.label()
    } else {
        LambdaSetting::Finite(config.lambda).label()
    }
}

/// Test data must use the training tags; its roles follow the training run.
fn align_test(train: &Dataset, test: Option<&Dataset>) -> Result<Option<Dataset>> {
    test.map(|t| {
        if t.groups() != train.groups() {
            return Err(Error::Config(format!(
                "test groups {:?} differ from training groups {:?}",
                t.groups(),
                train.groups()
            )));
        }
        t.clone().with_roles(train.roles.clone())
    })
    .transpose()
}

/// Training scores realizing `ordering`, in dataset order, and the mapping
/// they define.
fn realize(
    train: &Dataset,
    ordering: &CrossGroupOrdering,
    a: &RankedGroup,
    b: &RankedGroup,
    margin: BoundaryMargin,
) -> Result<(Vec<f64>, ScoreMapping)> {
    let rearranged = rearrange_training_scores(ordering, a, b, margin)?;
    let mut scores: Vec<f64> = train.samples.iter().map(|s| s.score).collect();
    for (rank, &idx) in b.order().iter().enumerate() {
        scores[idx] = rearranged.adjusted_b[rank];
    }
    let mut mapping = ScoreMapping::from_training(&train.roles, b, &rearranged)?;
    mapping.warnings.splice(0..0, rearranged.warnings);
    Ok((scores, mapping))
}

fn split_report(data: &Dataset, scores: &[f64], roles: &GroupRoles) -> Result<SplitReport> {
    Ok(SplitReport {
        source: data.provenance.source.clone(),
        before: fairness_report(&data.samples, roles)?,
        after: fairness_report(&rescored(&data.samples, scores), roles)?,
    })
}

/// Optimizes the cross-group ordering on `train`, rescales the adjusted
/// group's training scores to realize it, and maps `test` through the same
/// adjustment. Metrics after adjustment are computed from the new scores.
pub fn run_adjust(train: &Dataset, test: Option<&Dataset>, config: &AdjustConfig) -> Result<AdjustOutcome> {
    let test = align_test(train, test)?;
    let roles = &train.roles;
    let (a, b) = rank_groups(&train.samples, roles)?;
    let ordering = XOrder::new(config.objective)
        .with_cell_budget(config.cell_budget)
        .solve(&a, &b)?;
    let (adjusted_train, mapping) = realize(train, &ordering, &a, &b, config.margin)?;
    let adjusted_test = test.as_ref().map(|t| mapping.apply(&t.samples));

    let summary = RunSummary {
        anchor_group: roles.anchor.clone(),
        adjusted_group: roles.adjusted.clone(),
        metric: config.objective.metric,
        lambda: lambda_label(&config.objective),
        scheme: mapping.scheme,
        train: split_report(train, &adjusted_train, roles)?,
        test: match (&test, &adjusted_test) {
            (Some(t), Some(s)) => Some(split_report(t, s, roles)?),
            _ => None,
        },
        warnings: mapping.warnings.clone(),
    };
    Ok(AdjustOutcome {
        summary,
        ordering,
        mapping,
        adjusted_train,
        adjusted_test,
    })
}

/// Writes `report.json`, `adjusted_train.csv` and, with test data,
/// `adjusted_test.csv` into `out_dir`.
pub fn write_adjust_outputs(
    out_dir: &Path,
    train: &Dataset,
    test: Option<&Dataset>,
    outcome: &AdjustOutcome,
) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_json(&out_dir.join("report.json"), &outcome.summary)?;
    train.write_csv_file(&out_dir.join("adjusted_train.csv"), Some(&outcome.adjusted_train))?;
    if let (Some(t), Some(s)) = (test, &outcome.adjusted_test) {
        t.write_csv_file(&out_dir.join("adjusted_test.csv"), Some(s))?;
    }
    Ok(())
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One line of `curve.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub lambda: String,
    pub split: &'static str,
    pub auc: Option<f64>,
    pub delta_xauc: Option<f64>,
    pub delta_prf: Option<f64>,
}

impl CurveRow {
    fn new(lambda: String, split: &'static str, r: &FairnessReport) -> Self {
        CurveRow {
            lambda,
            split,
            auc: r.auc,
            delta_xauc: r.delta_xauc,
            delta_prf: r.delta_prf,
        }
    }
}

/// A swept setting with the scores it produces on each split.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub setting: LambdaSetting,
    pub adjusted_train: Vec<f64>,
    pub adjusted_test: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub curve: TradeoffCurve,
    pub rows: Vec<CurveRow>,
    pub entries: Vec<SweepEntry>,
}

/// Sweeps λ on `train`, realizes every point as scores, transfers each to
/// `test`, and tabulates score-based metrics for both splits. The first rows
/// describe the unadjusted scores.
pub fn run_sweep(train: &Dataset, test: Option<&Dataset>, config: &SweepConfig) -> Result<SweepOutcome> {
    let test = align_test(train, test)?;
    let roles = &train.roles;
    let (a, b) = rank_groups(&train.samples, roles)?;
    let curve = match &config.grid {
        GridSpec::Fixed(grid) => sweep_lambda(&a, &b, grid, config.metric)?,
        GridSpec::Auto(schedule) => auto_sweep(&a, &b, config.metric, schedule)?,
    };

    let mut rows = vec![CurveRow::new(
        LambdaSetting::Unadjusted.label(),
        "train",
        &fairness_report(&train.samples, roles)?,
    )];
    if let Some(t) = &test {
        rows.push(CurveRow::new(
            LambdaSetting::Unadjusted.label(),
            "test",
            &fairness_report(&t.samples, roles)?,
        ));
    }
    let mut entries = Vec::with_capacity(curve.points.len());
    for point in &curve.points {
        let label = point.setting.label();
        let (adjusted_train, mapping) = realize(train, &point.ordering, &a, &b, config.margin)?;
        rows.push(CurveRow::new(
            label.clone(),
            "train",
            &fairness_report(&rescored(&train.samples, &adjusted_train), roles)?,
        ));
        let adjusted_test = match &test {
            Some(t) => {
                let s = mapping.apply(&t.samples);
                rows.push(CurveRow::new(label, "test", &fairness_report(&rescored(&t.samples, &s), roles)?));
                Some(s)
            }
            None => None,
        };
        entries.push(SweepEntry {
            setting: point.setting,
            adjusted_train,
            adjusted_test,
        });
    }
    Ok(SweepOutcome { curve, rows, entries })
}

fn opt(x: Option<f64>) -> String {
    x.map(g17).unwrap_or_default()
}

pub fn write_curve_csv<W: Write>(out: W, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "split", "auc", "delta_xauc", "delta_prf"])?;
    for r in rows {
        w.write_record([r.lambda.clone(), r.split.to_string(), opt(r.auc), opt(r.delta_xauc), opt(r.delta_prf)])?;
    }
    w.flush().map_err(|e| Error::io("curve.csv", e))?;
    Ok(())
}

/// Writes `curve.csv` plus, under `points/`, the adjusted CSVs behind every
/// row so each can be re-checked independently.
pub fn write_sweep_outputs(
    out_dir: &Path,
    train: &Dataset,
    test: Option<&Dataset>,
    outcome: &SweepOutcome,
) -> Result<()> {
    let points = out_dir.join("points");
    fs::create_dir_all(&points).map_err(|e| Error::io(&points, e))?;
    let curve = out_dir.join("curve.csv");
    let file = fs::File::create(&curve).map_err(|e| Error::io(&curve, e))?;
    write_curve_csv(std::io::BufWriter::new(file), &outcome.rows)?;
    for (t, entry) in outcome.entries.iter().enumerate() {
        let stem = format!("{t:02}_lambda_{}", entry.setting.label());
        train.write_csv_file(&points.join(format!("{stem}_train.csv")), Some(&entry.adjusted_train))?;
        if let (Some(d), Some(s)) = (test, &entry.adjusted_test) {
            d.write_csv_file(&points.join(format!("{stem}_test.csv")), Some(s))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::synth::{generate_synthetic, SyntheticSpec};

    fn pair() -> (Dataset, Dataset) {
        let spec = SyntheticSpec {
            offset_b: -0.8,
            ..SyntheticSpec::default()
        }
        .with_sizes(120, 100);
        (generate_synthetic(&spec, 1).unwrap(), generate_synthetic(&spec, 2).unwrap())
    }

    #[test]
    fn utility_run_does_not_lose_auc() {
        let (train, _) = pair();
        let out = run_adjust(&train, None, &AdjustConfig::new(ObjectiveConfig::utility())).unwrap();
        assert!(out.summary.train.after.auc >= out.summary.train.before.auc);
        assert!(out.summary.test.is_none());
    }

    #[test]
    fn disparity_only_meets_bound_on_train() {
        let (train, test) = pair();
        let config = AdjustConfig::new(ObjectiveConfig::disparity_only(DisparityMetric::Xauc));
        let out = run_adjust(&train, Some(&test), &config).unwrap();
        let c = &out.summary.train.after.pair_counts;
        let bound = 1.0 / c.n1_a.min(c.n1_b) as f64;
        assert!(out.summary.train.after.delta_xauc.unwrap() <= bound);
        assert_eq!(out.summary.lambda, "inf");
        let t = out.summary.test.unwrap();
        assert!(t.after.delta_xauc < t.before.delta_xauc);
    }

    #[test]
    fn anchor_scores_untouched() {
        let (train, test) = pair();
        let out = run_adjust(&train, Some(&test), &AdjustConfig::new(ObjectiveConfig::weighted(1.0, DisparityMetric::Prf)))
            .unwrap();
        for (s, adj) in test.samples.iter().zip(out.adjusted_test.unwrap()) {
            if s.group == "a" {
                assert_eq!(s.score.to_bits(), adj.to_bits());
            }
        }
    }

    #[test]
    fn sweep_rows_cover_both_splits() {
        let (train, test) = pair();
        let config = SweepConfig {
            metric: DisparityMetric::Xauc,
            grid: GridSpec::Fixed(vec![0.0]),
            margin: BoundaryMargin::default(),
        };
        let out = run_sweep(&train, Some(&test), &config).unwrap();
        let labels: Vec<(String, &str)> = out.rows.iter().map(|r| (r.lambda.clone(), r.split)).collect();
        let want = [("unadjusted", "train"), ("unadjusted", "test"), ("0", "train"), ("0", "test"), ("inf", "train"), ("inf", "test")];
        assert_eq!(labels, want.map(|(l, s)| (l.to_string(), s)));
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &out.rows).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("lambda,split,auc,delta_xauc,delta_prf\nunadjusted,train,"));
    }

    #[test]
    fn mismatched_test_groups_rejected() {
        let (train, _) = pair();
        let other = Dataset::from_samples(
            vec![
                ScoredSample::new("1", "a", true, 0.5).unwrap(),
                ScoredSample::new("2", "c", false, 0.4).unwrap(),
            ],
            &crate::io::AnchorChoice::Auto,
            "x",
        )
        .unwrap();
        assert!(run_adjust(&train, Some(&other), &AdjustConfig::new(ObjectiveConfig::utility())).is_err());
    }
}
