//! Command-line front end over the `xorder` library.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use xorder::io::{
    generate_synthetic, ingest_csv, run_adjust, run_sweep, write_adjust_outputs, write_curve_csv,
    write_sweep_outputs, AdjustConfig, AnchorChoice, ColumnMap, Dataset, GridSpec, SweepConfig, SyntheticSpec,
};
use xorder::numfmt::g17;
use xorder::optimizer::AutoGrid;
use xorder::{
    brute_force_optimal, fairness_report, rank_groups, xorder_dp, DisparityMetric, Error, FairnessReport, Objective,
    ObjectiveConfig, Result,
};

#[derive(Parser)]
#[command(name = "xorder", version, about = "Cross-group ranking fairness post-processing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print utility and fairness metrics of a scored CSV.
    Report {
        csv: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Optimize on training data and write adjusted scores.
    Adjust {
        train: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        objective: ObjectiveArgs,
    },
    /// Trace AUC against disparity over a range of penalty weights.
    Sweep {
        train: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "xauc")]
        metric: DisparityMetric,
        /// Comma-separated, strictly increasing λ values.
        #[arg(long, value_delimiter = ',', required_unless_present = "auto_grid", conflicts_with = "auto_grid")]
        grid: Vec<f64>,
        /// Grow λ geometrically until the disparity stops improving.
        #[arg(long)]
        auto_grid: bool,
        #[arg(long, default_value_t = AutoGrid::default().start)]
        auto_start: f64,
        #[arg(long, default_value_t = AutoGrid::default().factor)]
        auto_factor: f64,
        #[arg(long, default_value_t = AutoGrid::default().max_steps)]
        auto_steps: usize,
    },
    /// Compare the dynamic program with exhaustive search on a small CSV.
    Oracle {
        csv: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        objective: ObjectiveArgs,
    },
    /// Write a seeded synthetic dataset.
    Synth {
        /// Comma-separated key=value overrides, e.g. `n_a=300,offset_b=-1`.
        #[arg(long, default_value = "")]
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Anchor group tag, or `auto` to adjust the group with the lower PRF.
    #[arg(long, default_value = "auto")]
    anchor_group: AnchorChoice,
    #[arg(long, default_value = "id")]
    id_col: String,
    #[arg(long, default_value = "group")]
    group_col: String,
    #[arg(long, default_value = "label")]
    label_col: String,
    #[arg(long, default_value = "score")]
    score_col: String,
}

impl DataArgs {
    fn columns(&self) -> ColumnMap {
        ColumnMap {
            id: self.id_col.clone(),
            group: self.group_col.clone(),
            label: self.label_col.clone(),
            score: self.score_col.clone(),
        }
    }

    fn load(&self, path: &Path) -> Result<Dataset> {
        ingest_csv(path, &self.columns(), &self.anchor_group)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    test: Option<PathBuf>,
    /// Split a single input into train/test with this training fraction.
    #[arg(long, conflicts_with = "test")]
    split: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

impl RunArgs {
    fn load(&self, train: &Path) -> Result<(Dataset, Option<Dataset>)> {
        let data = self.data.load(train)?;
        match (&self.test, self.split) {
            (Some(t), _) => Ok((data, Some(self.data.load(t)?))),
            (None, Some(frac)) => {
                let (tr, te) = data.split(frac, self.seed)?;
                Ok((tr, Some(te)))
            }
            (None, None) => Ok((data, None)),
        }
    }
}

#[derive(Args)]
struct ObjectiveArgs {
    #[arg(long, default_value = "xauc")]
    metric: DisparityMetric,
    #[arg(long, default_value_t = 0.0, conflicts_with = "disparity_only")]
    lambda: f64,
    /// Minimize disparity alone.
    #[arg(long)]
    disparity_only: bool,
}

impl ObjectiveArgs {
    fn config(&self) -> Result<ObjectiveConfig> {
        let c = if self.disparity_only {
            ObjectiveConfig::disparity_only(self.metric)
        } else {
            ObjectiveConfig::weighted(self.lambda, self.metric)
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(std::io::stdout().lock(), "{text}").map_err(|e| Error::Io {
        path: "<stdout>".into(),
        source: e,
    })
}

fn report_csv<W: Write>(out: W, rows: &[(&str, &FairnessReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "split", "anchor_group", "adjusted_group", "auc", "iauc_a", "iauc_b", "xauc_ab", "xauc_ba", "delta_xauc",
        "prf_a", "prf_b", "delta_prf",
    ])?;
    let opt = |x: Option<f64>| x.map(g17).unwrap_or_default();
    for (name, r) in rows {
        w.write_record([
            name.to_string(),
            r.anchor_group.clone(),
            r.adjusted_group.clone(),
            opt(r.auc),
            opt(r.iauc_a),
            opt(r.iauc_b),
            opt(r.xauc_ab),
            opt(r.xauc_ba),
            opt(r.delta_xauc),
            opt(r.prf_a),
            opt(r.prf_b),
            opt(r.delta_prf),
        ])?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<stdout>".into(),
        source: e,
    })?;
    Ok(())
}

#[derive(Serialize)]
struct OracleSide {
    ghat: String,
    steps: String,
    report: FairnessReport,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Report { csv, data, format } => {
            let d = data.load(&csv)?;
            let report = fairness_report(&d.samples, &d.roles)?;
            match format {
                Format::Json => print_json(&report),
                Format::Csv => report_csv(std::io::stdout().lock(), &[("data", &report)]),
            }
        }
        Command::Adjust { train, run, objective } => {
            let (tr, te) = run.load(&train)?;
            let outcome = run_adjust(&tr, te.as_ref(), &AdjustConfig::new(objective.config()?))?;
            write_adjust_outputs(&run.out, &tr, te.as_ref(), &outcome)?;
            let s = &outcome.summary;
            match run.format {
                Format::Json => print_json(s),
                Format::Csv => {
                    let mut rows = vec![("train_before", &s.train.before), ("train_after", &s.train.after)];
                    if let Some(t) = &s.test {
                        rows.extend([("test_before", &t.before), ("test_after", &t.after)]);
                    }
                    report_csv(std::io::stdout().lock(), &rows)
                }
            }
        }
        Command::Sweep {
            train,
            run,
            metric,
            grid,
            auto_grid,
            auto_start,
            auto_factor,
            auto_steps,
        } => {
            let (tr, te) = run.load(&train)?;
            let grid = if auto_grid {
                GridSpec::Auto(AutoGrid {
                    start: auto_start,
                    factor: auto_factor,
                    max_steps: auto_steps,
                    ..AutoGrid::default()
                })
            } else {
                GridSpec::Fixed(grid)
            };
            let config = SweepConfig {
                metric,
                grid,
                margin: Default::default(),
            };
            let outcome = run_sweep(&tr, te.as_ref(), &config)?;
            write_sweep_outputs(&run.out, &tr, te.as_ref(), &outcome)?;
            for t in outcome.curve.non_monotone() {
                log::warn!(
                    "disparity rose at lambda {} on the training ordering",
                    outcome.curve.points[t].setting.label()
                );
            }
            write_curve_csv(std::io::stdout().lock(), &outcome.rows)
        }
        Command::Oracle { csv, data, objective } => {
            let d = data.load(&csv)?;
            let config = objective.config()?;
            let (a, b) = rank_groups(&d.samples, &d.roles)?;
            let obj = Objective::new(&a, &b, config)?;
            let side = |o: xorder::CrossGroupOrdering| -> Result<OracleSide> {
                Ok(OracleSide {
                    ghat: g17(obj.evaluate(&o, &a, &b)?),
                    steps: o
                        .steps()
                        .iter()
                        .map(|s| if *s == xorder::Step::TakeA { 'a' } else { 'b' })
                        .collect(),
                    report: xorder::metrics_from_ordering(&o, &a, &b)?,
                })
            };
            let brute = side(brute_force_optimal(&a, &b, &config)?)?;
            let dp = side(xorder_dp(&a, &b, &config)?)?;
            print_json(&serde_json::json!({ "brute_force": brute, "dynamic_program": dp }))
        }
        Command::Synth { spec, seed, out } => {
            let spec: SyntheticSpec = spec.parse()?;
            let d = generate_synthetic(&spec, seed)?;
            match out {
                Some(path) => d.write_csv_file(&path, None),
                None => d.write_csv(std::io::stdout().lock(), None),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
