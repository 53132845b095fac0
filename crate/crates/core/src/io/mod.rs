//! Reading and writing datasets, generating synthetic ones, and running the
//! full train/test adjustment.

pub mod dataset;
pub mod pipeline;
pub mod synth;

pub use dataset::{ingest_csv, read_csv, AnchorChoice, ColumnMap, Dataset, Provenance};
pub use pipeline::{
    run_adjust, run_sweep, write_adjust_outputs, write_curve_csv, write_sweep_outputs, AdjustConfig, AdjustOutcome,
    CurveRow, GridSpec, RunSummary, SplitReport, SweepConfig, SweepOutcome,
};
pub use synth::{generate_synthetic, SyntheticSpec};
