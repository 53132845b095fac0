//! Turning an optimized ordering into concrete scores and carrying the
//! adjustment over to unseen data with a monotone piecewise-linear map.
//!
//! Run with `cargo run --example score_transfer`.

use xorder::io::{generate_synthetic, SyntheticSpec};
use xorder::{
    fairness_report, rank_groups, rearrange_training_scores, transfer_test_scores, xorder_dp, BoundaryMargin,
    DisparityMetric, ObjectiveConfig, ScoreMapping, ScoredSample,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec {
        offset_b: -1.0,
        ..SyntheticSpec::default()
    };
    let train = generate_synthetic(&spec.with_sizes(800, 800), 1)?;
    let test = generate_synthetic(&spec.with_sizes(500, 500), 2)?;
    let (a, b) = rank_groups(&train.samples, &train.roles)?;

    let ordering = xorder_dp(&a, &b, &ObjectiveConfig::disparity_only(DisparityMetric::Xauc))?;
    let rearranged = rearrange_training_scores(&ordering, &a, &b, BoundaryMargin::default())?;
    let mapping = ScoreMapping::from_training(&train.roles, &b, &rearranged)?;
    println!("mapping has {} knots; first three: {:?}", mapping.knots().len(), &mapping.knots()[..3]);
    for w in &mapping.warnings {
        println!("warning: {w}");
    }

    let test_b: Vec<f64> = test.samples.iter().filter(|s| s.group == "b").map(|s| s.score).collect();
    let mapped = transfer_test_scores(&mapping, &test_b)?;
    println!("first test b score {:.4} -> {:.4}", test_b[0], mapped[0]);

    let adjusted: Vec<ScoredSample> = test
        .samples
        .iter()
        .zip(mapping.apply(&test.samples))
        .map(|(s, score)| ScoredSample { score, ..s.clone() })
        .collect();
    let before = fairness_report(&test.samples, &test.roles)?;
    let after = fairness_report(&adjusted, &test.roles)?;
    println!(
        "test set: dxAUC {:.4} -> {:.4}, AUC {:.4} -> {:.4}",
        before.delta_xauc.unwrap(),
        after.delta_xauc.unwrap(),
        before.auc.unwrap(),
        after.auc.unwrap()
    );
    Ok(())
}
