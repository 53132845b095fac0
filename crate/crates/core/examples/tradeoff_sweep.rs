//! The AUC/disparity trade-off traced over a grid of penalty weights, and
//! the adaptive geometric schedule.
//!
//! Run with `cargo run --example tradeoff_sweep`.

use xorder::io::{generate_synthetic, SyntheticSpec};
use xorder::optimizer::{auto_sweep, AutoGrid, CurvePoint, TradeoffCurve};
use xorder::{rank_groups, sweep_lambda, DisparityMetric};

fn show(curve: &TradeoffCurve) {
    let line = |p: &CurvePoint| {
        println!(
            "  {:>12}  AUC {:.4}  disparity {:.4}",
            p.setting.label(),
            p.report.auc.unwrap(),
            p.disparity(curve.metric).unwrap()
        )
    };
    line(&curve.baseline);
    curve.points.iter().for_each(line);
    if !curve.non_monotone().is_empty() {
        println!("  disparity rose at points {:?}", curve.non_monotone());
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec {
        offset_b: -1.0,
        pos_rate_b: 0.3,
        ..SyntheticSpec::default()
    }
    .with_sizes(600, 400);
    let data = generate_synthetic(&spec, 21)?;
    let (a, b) = rank_groups(&data.samples, &data.roles)?;

    println!("fixed grid, xAUC:");
    show(&sweep_lambda(&a, &b, &[0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0], DisparityMetric::Xauc)?);
    println!("automatic grid, PRF:");
    show(&auto_sweep(&a, &b, DisparityMetric::Prf, &AutoGrid::default())?);
    Ok(())
}
