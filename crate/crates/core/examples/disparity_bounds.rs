//! Disparity reached by the dynamic program, greedy forward search and the
//! single-block insertion baseline, next to the `1/min(n1_a, n1_b)` bound.
//!
//! Run with `cargo run --example disparity_bounds`.

use xorder::io::{generate_synthetic, SyntheticSpec};
use xorder::{
    greedy_forward, insertion_baseline, metrics_from_ordering, ordering_from_scores, rank_groups, xorder_dp,
    CrossGroupOrdering, DisparityMetric, ObjectiveConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>5} {:>5} {:>9} {:>9} {:>9} {:>9} {:>9}", "n_a", "n_b", "bound", "input", "dp", "greedy", "insert");
    for (seed, (n_a, n_b)) in [(30, 20), (100, 100), (250, 40), (600, 500)].into_iter().enumerate() {
        let spec = SyntheticSpec {
            offset_b: -1.2,
            ..SyntheticSpec::default()
        }
        .with_sizes(n_a, n_b);
        let data = generate_synthetic(&spec, seed as u64)?;
        let (a, b) = rank_groups(&data.samples, &data.roles)?;
        let metric = DisparityMetric::Xauc;
        let dx = |o: CrossGroupOrdering| metrics_from_ordering(&o, &a, &b).map(|r| r.delta_xauc.unwrap());
        println!(
            "{n_a:>5} {n_b:>5} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            1.0 / a.n_pos().min(b.n_pos()) as f64,
            dx(ordering_from_scores(&a, &b))?,
            dx(xorder_dp(&a, &b, &ObjectiveConfig::disparity_only(metric))?)?,
            dx(greedy_forward(&a, &b, metric)?)?,
            dx(insertion_baseline(&a, &b, metric)?)?,
        );
    }
    Ok(())
}
