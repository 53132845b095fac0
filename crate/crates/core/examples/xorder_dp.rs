//! Solving for the best interleaving at several penalty weights, and
//! inspecting the objective along the chosen path.
//!
//! Run with `cargo run --example xorder_dp`.

use xorder::io::{generate_synthetic, SyntheticSpec};
use xorder::optimizer::XOrder;
use xorder::{metrics_from_ordering, rank_groups, DisparityMetric, ObjectiveConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec {
        offset_b: -1.0,
        ..SyntheticSpec::default()
    }
    .with_sizes(400, 300);
    let data = generate_synthetic(&spec, 11)?;
    let (a, b) = rank_groups(&data.samples, &data.roles)?;

    let configs = [
        ("utility only", ObjectiveConfig::utility()),
        ("lambda = 1", ObjectiveConfig::weighted(1.0, DisparityMetric::Xauc)),
        ("lambda = 10", ObjectiveConfig::weighted(10.0, DisparityMetric::Xauc)),
        ("disparity only", ObjectiveConfig::disparity_only(DisparityMetric::Xauc)),
        ("PRF, lambda = 10", ObjectiveConfig::weighted(10.0, DisparityMetric::Prf)),
    ];
    for (name, config) in configs {
        let (ordering, cells) = XOrder::new(config).solve_traced(&a, &b)?;
        let r = metrics_from_ordering(&ordering, &a, &b)?;
        println!(
            "{name:<17} AUC {:.4}  dxAUC {:.4}  dPRF {:.4}  final objective {:.4}",
            r.auc.unwrap(),
            r.delta_xauc.unwrap(),
            r.delta_prf.unwrap(),
            cells.last().unwrap().ghat
        );
    }

    let small = XOrder::new(ObjectiveConfig::utility()).with_cell_budget(1000);
    if let Err(e) = small.solve(&a, &b) {
        println!("with a 1000-cell budget: {e}");
    }
    Ok(())
}
