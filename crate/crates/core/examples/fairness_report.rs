//! Utility and cross-group fairness metrics of a small scored dataset.
//!
//! Run with `cargo run --example fairness_report`.

use xorder::{compute_auc, compute_prf, compute_xauc, fairness_report, GroupRoles, ScoredSample};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = [
        ("m1", "m", true, 0.95),
        ("m2", "m", false, 0.80),
        ("m3", "m", true, 0.70),
        ("m4", "m", false, 0.30),
        ("f1", "f", true, 0.60),
        ("f2", "f", false, 0.40),
        ("f3", "f", true, 0.35),
        ("f4", "f", false, 0.10),
    ];
    let samples = rows
        .iter()
        .map(|&(id, g, y, s)| ScoredSample::new(id, g, y, s))
        .collect::<Result<Vec<_>, _>>()?;

    println!("AUC                 {}", compute_auc(&samples)?.value());
    println!("xAUC(m positives over f negatives) {}", compute_xauc(&samples, "m", "f")?.value());
    println!("xAUC(f positives over m negatives) {}", compute_xauc(&samples, "f", "m")?.value());
    println!("PRF(m) {}   PRF(f) {}", compute_prf(&samples, "m")?.value(), compute_prf(&samples, "f")?.value());

    let report = fairness_report(&samples, &GroupRoles::new("m", "f"))?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
