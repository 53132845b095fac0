//! Fairness-aware post-processing for bipartite ranking scores.
//!
//! The crate measures cross-group ranking disparity (xAUC and PRF), searches
//! for an interleaving of two independently ranked groups that trades overall
//! AUC against that disparity, and turns the chosen interleaving into new
//! scores for the adjusted group that can be applied to unseen data.
//!
//! Group `a` is the anchor: its scores are never changed. Group `b` is the
//! adjusted group.

pub mod error;
pub mod io;
pub mod metrics;
pub mod numfmt;
pub mod optimizer;
pub mod ordering;
pub mod transfer;

pub use error::{Error, Result};
pub use metrics::{
    compute_auc, compute_iauc, compute_prf, compute_xauc, fairness_report, pair_counts, FairnessReport,
    GroupCounts, GroupRoles, PairCounts, PairRate, ScoredSample,
};
pub use optimizer::{
    brute_force_optimal, greedy_forward, insertion_baseline, sweep_lambda, xorder_dp, DisparityMetric,
    Objective, ObjectiveConfig, XOrder,
};
pub use ordering::{
    metrics_from_ordering, ordering_from_scores, pair_counts_from_ordering, rank_groups, rank_within_group,
    CrossGroupOrdering, RankedGroup, Step,
};
pub use transfer::{rearrange_training_scores, transfer_test_scores, BoundaryMargin, ScoreMapping};
