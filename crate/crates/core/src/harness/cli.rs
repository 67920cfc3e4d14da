//! Command-line interface: `fit`, `sweep`, `rst`, and `plot` subcommands.
//! Exit codes: 0 success, 2 configuration/usage error, 1 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::distribution::{sample_dataset, StaircaseParams};
use crate::error::{Error, Result};
use crate::estimators::{
    fit_augmented, fit_robust, fit_standard, EstimatorKind, FittedModel, SolverConfig,
};
use crate::harness::plot::{emit_plot, Quantity};
use crate::harness::{
    emit_csv, read_records_csv, result_from_records, run_sweep, ExperimentConfig,
};
use crate::hash::derive_seed;
use crate::rst::{fit_rst_pipeline, sample_unlabeled};
use crate::spline::{build_basis, build_penalty};

#[derive(Parser)]
#[command(
    name = "staircase",
    version,
    about = "Staircase regression: standard vs. adversarially trained spline estimators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one estimator on a freshly sampled dataset and print the model as JSON.
    Fit {
        /// standard | robust | augmented
        #[arg(long)]
        estimator: String,
        /// Number of training samples.
        #[arg(long)]
        n: usize,
        /// Regularization strength.
        #[arg(long)]
        lambda: f64,
        /// Sampling seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Staircase slope for the default parameter set.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// JSON file with full distribution parameters (overrides --m).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Write the model JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a full sweep from a JSON experiment config.
    Sweep {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for records.csv and tradeoff.svg.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Override the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Robust self-training on labeled plus unlabeled samples.
    Rst {
        /// Number of labeled samples.
        #[arg(long)]
        n: usize,
        /// Number of unlabeled samples.
        #[arg(long, default_value_t = 1000)]
        unlabeled: usize,
        /// Shared regularization strength for both stages.
        #[arg(long)]
        lambda: f64,
        /// Sampling seed (the unlabeled pool derives its own from it).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Staircase slope for the default parameter set.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// JSON file with full distribution parameters (overrides --m).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Dump the pseudo-labeled set as CSV (columns: x, y_pseudo).
        #[arg(long)]
        dump_pseudo: Option<PathBuf>,
        /// Write the model JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a quantity from a sweep records CSV as an SVG chart.
    Plot {
        /// records.csv produced by `sweep`.
        #[arg(long)]
        input: PathBuf,
        /// tradeoff | test_mse | gen_gap | norm | robust_train_mse | robust_test_mse
        #[arg(long, default_value = "tradeoff")]
        quantity: String,
        /// Output SVG path.
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
}

/// Run the CLI on the given argument vector and return the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // clap reports 2 for usage errors and 0 for --help/--version
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err @ (Error::Config(_) | Error::InvalidParams(_) | Error::Format { .. })) => {
            eprintln!("error: {err}");
            2
        }
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn load_params(path: &Path) -> Result<StaircaseParams> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn resolve_params(params_file: Option<&Path>, m: f64) -> Result<StaircaseParams> {
    match params_file {
        Some(path) => load_params(path),
        None => Ok(StaircaseParams::defaults(m)),
    }
}

fn write_model(model: &FittedModel, out: Option<&Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(model)
        .map_err(|e| Error::Config(format!("could not serialize model: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, json + "\n").map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit {
            estimator,
            n,
            lambda,
            seed,
            m,
            params,
            out,
        } => {
            let kind: EstimatorKind = estimator.parse()?;
            let params = resolve_params(params.as_deref(), m)?;
            let basis = build_basis(params.s, params.epsilon)?;
            let penalty = build_penalty(&basis);
            let data = sample_dataset(&params, n, seed);
            let model = match kind {
                EstimatorKind::Standard => fit_standard(&basis, &penalty, &data, lambda)?,
                EstimatorKind::Robust => fit_robust(
                    &basis,
                    &penalty,
                    &data,
                    &params,
                    lambda,
                    &SolverConfig::default(),
                )?,
                EstimatorKind::Augmented => fit_augmented(&basis, &penalty, &data, &params, lambda)?,
                EstimatorKind::Rst => {
                    return Err(Error::Config(
                        "use the `rst` subcommand for robust self-training".to_string(),
                    ))
                }
            };
            write_model(&model, out.as_deref())
        }
        Command::Sweep {
            config,
            out_dir,
            seed,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Error::Format {
                path: config.clone(),
                message: e.to_string(),
            })?;
            let mut experiment: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| Error::Format {
                    path: config.clone(),
                    message: e.to_string(),
                })?;
            if let Some(seed) = seed {
                experiment.base_seed = seed;
            }
            experiment.validate()?;

            std::fs::create_dir_all(&out_dir).map_err(|e| Error::Io {
                path: out_dir.clone(),
                source: e,
            })?;
            let result = run_sweep(&experiment)?;
            emit_csv(&result, &out_dir.join("records.csv"))?;
            for failure in &result.failures {
                eprintln!("warning: {failure}");
            }

            let need = [EstimatorKind::Standard, EstimatorKind::Robust];
            if need
                .iter()
                .all(|e| experiment.estimators.contains(e))
            {
                emit_plot(&result, Quantity::Tradeoff, &out_dir.join("tradeoff.svg"))?;
            } else {
                eprintln!(
                    "note: tradeoff.svg needs both standard and robust estimators; skipped"
                );
            }
            Ok(())
        }
        Command::Rst {
            n,
            unlabeled,
            lambda,
            seed,
            m,
            params,
            dump_pseudo,
            out,
        } => {
            let params = resolve_params(params.as_deref(), m)?;
            let basis = build_basis(params.s, params.epsilon)?;
            let penalty = build_penalty(&basis);
            let labeled = sample_dataset(&params, n, seed);
            let pool = sample_unlabeled(&params, unlabeled, derive_seed(seed, "cli-unlabeled", &[]));
            let pipeline = fit_rst_pipeline(
                &basis,
                &penalty,
                &labeled,
                &pool,
                &params,
                lambda,
                &SolverConfig::default(),
            )?;
            if let Some(path) = dump_pseudo {
                let mut file = std::fs::File::create(&path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                let mut text = String::from("x,y_pseudo\n");
                for (x, y) in pipeline.pseudo.xs.iter().zip(&pipeline.pseudo.ys) {
                    text.push_str(&format!("{x},{y}\n"));
                }
                file.write_all(text.as_bytes()).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
            }
            write_model(&pipeline.model, out.as_deref())
        }
        Command::Plot {
            input,
            quantity,
            out,
        } => {
            let quantity: Quantity = quantity.parse()?;
            let records = read_records_csv(&input)?;
            let result = result_from_records(records);
            emit_plot(&result, quantity, &out)
        }
    }
}
