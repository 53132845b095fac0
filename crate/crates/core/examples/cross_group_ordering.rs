//! How a merged ranking is represented: two within-group rankings plus an
//! interleaving path, and how pair counts follow from the path alone.
//!
//! Run with `cargo run --example cross_group_ordering`.

use xorder::{
    metrics_from_ordering, ordering_from_scores, pair_counts_from_ordering, rank_groups, CrossGroupOrdering,
    GroupRoles, ScoredSample, Step,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples = vec![
        ScoredSample::new("a1", "a", true, 0.9)?,
        ScoredSample::new("a2", "a", false, 0.5)?,
        ScoredSample::new("a3", "a", false, 0.2)?,
        ScoredSample::new("b1", "b", true, 0.4)?,
        ScoredSample::new("b2", "b", false, 0.1)?,
    ];
    let roles = GroupRoles::new("a", "b");
    let (a, b) = rank_groups(&samples, &roles)?;
    println!("a labels by rank: {:?}", a.labels());
    println!("b labels by rank: {:?}", b.labels());

    let from_scores = ordering_from_scores(&a, &b);
    let ids: Vec<&str> = from_scores.merged(&a, &b).iter().map(|&i| samples[i].id.as_str()).collect();
    println!("path implied by the scores: {}", render(&from_scores));
    println!("merged sample ids: {ids:?}");

    // move b1 to the top
    let alt = CrossGroupOrdering::for_sizes(vec![Step::TakeB, Step::TakeA, Step::TakeA, Step::TakeA, Step::TakeB], 3, 2)?;
    for (name, o) in [("scores", &from_scores), ("b1 first", &alt)] {
        let c = pair_counts_from_ordering(o, &a, &b)?;
        let r = metrics_from_ordering(o, &a, &b)?;
        println!(
            "{name:>9}: path {}  cross wins a>b {} b>a {}  AUC {:.3}  dxAUC {:.3}",
            render(o),
            c.xauc_ab,
            c.xauc_ba,
            r.auc.unwrap(),
            r.delta_xauc.unwrap()
        );
    }
    Ok(())
}

fn render(o: &CrossGroupOrdering) -> String {
    o.steps().iter().map(|s| if *s == Step::TakeA { 'a' } else { 'b' }).collect()
}
