//! `treexplain` — train tree models, explain them, discretize
//! importances into relevance bands, and compare rankings with the
//! Weighted Jaccard similarity.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use treexplain::concordance::{DiscretizePolicy, WeightMap};
use treexplain::explain::{LimeConfig, Method};
use treexplain::metrics::Averaging;
use treexplain::model::{ModelKind, ModelParams};
use treexplain::pipeline::{
    cmd_evaluate, cmd_explain, cmd_rank, cmd_report, cmd_similarity, cmd_train, EvaluateArgs,
    ExplainArgs, RankArgs, SimilarityArgs, TrainArgs,
};
use treexplain::Error;

#[derive(Parser)]
#[command(name = "treexplain", version, about)]
struct Cli {
    /// Suppress informational output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataFlags {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// JSON column schema (array of {name, kind, categories}).
    #[arg(long)]
    schema: PathBuf,
    /// Name of the binary target column.
    #[arg(long)]
    target: String,
}

#[derive(Args, Clone)]
struct ModelFlags {
    /// Model kind: dt, rf or gbt.
    #[arg(long, value_parser = parse_kind)]
    model: ModelKind,
    #[arg(long)]
    max_depth: usize,
    #[arg(long)]
    min_samples_leaf: Option<usize>,
    #[arg(long)]
    n_estimators: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2_lambda: Option<f64>,
    #[arg(long)]
    min_gain: Option<f64>,
    /// Per-split feature subset size (rf only; defaults to sqrt).
    #[arg(long)]
    max_features: Option<usize>,
    /// Disable bootstrap resampling (rf only).
    #[arg(long)]
    no_bootstrap: bool,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    match s {
        "dt" => Ok(ModelKind::Dt),
        "rf" => Ok(ModelKind::Rf),
        "gbt" => Ok(ModelKind::Gbt),
        other => Err(format!("unknown model kind {other:?} (expected dt/rf/gbt)")),
    }
}

fn parse_averaging(s: &str) -> Result<Averaging, String> {
    match s {
        "weighted" => Ok(Averaging::Weighted),
        "macro" => Ok(Averaging::Macro),
        "positive" => Ok(Averaging::PositiveClass),
        other => Err(format!(
            "unknown averaging {other:?} (expected weighted/macro/positive)"
        )),
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl ModelFlags {
    fn to_params(&self, seed: u64) -> Result<ModelParams, Error> {
        let mut p = match self.model {
            ModelKind::Dt => ModelParams::dt(self.max_depth, self.min_samples_leaf.unwrap_or(1), seed),
            ModelKind::Rf => ModelParams::rf(
                self.max_depth,
                self.min_samples_leaf.unwrap_or(1),
                self.n_estimators.unwrap_or(100),
                seed,
            ),
            ModelKind::Gbt => {
                ModelParams::gbt(self.max_depth, self.n_estimators.unwrap_or(100), seed)
            }
        };
        if let Some(lr) = self.learning_rate {
            p.learning_rate = lr;
        }
        if let Some(l2) = self.l2_lambda {
            p.l2_lambda = l2;
        }
        if let Some(g) = self.min_gain {
            p.min_gain = g;
        }
        if let Some(k) = self.max_features {
            p.max_features = treexplain::model::MaxFeatures::Count(k);
        }
        if self.no_bootstrap {
            p.bootstrap = false;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and evaluate it on a held-out split.
    Train {
        #[command(flatten)]
        data: DataFlags,
        #[command(flatten)]
        model: ModelFlags,
        /// Restrict training to the features listed in this file.
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        test_fraction: f64,
        /// Disable stratified splitting.
        #[arg(long)]
        no_stratify: bool,
        #[arg(long, value_parser = parse_averaging, default_value = "weighted")]
        averaging: Averaging,
        /// Output directory for model.json and metrics.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a saved model on a dataset.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataFlags,
        #[arg(long, value_parser = parse_averaging, default_value = "weighted")]
        averaging: Averaging,
        /// Optional output directory for metrics.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract a feature-importance vector from a saved model.
    Explain {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataFlags,
        /// mdi, mda, shap or lime.
        #[arg(long, value_parser = parse_method)]
        method: Method,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        mda_repeats: usize,
        #[arg(long, default_value_t = 1000)]
        lime_samples: usize,
        #[arg(long, default_value_t = 3)]
        lime_k: usize,
        #[arg(long)]
        kernel_width: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        ridge_lambda: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Discretize an importance JSON into a rank CSV.
    Rank {
        /// ImportanceVector JSON file.
        #[arg(long)]
        importance: PathBuf,
        #[arg(long, default_value_t = 2.0 / 3.0)]
        t1: f64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        t2: f64,
        #[arg(long, default_value_t = 0.05)]
        floor: f64,
        /// Use quantile thresholds (t1/t2 reinterpreted as quantiles).
        #[arg(long)]
        quantile: bool,
        /// Output rank CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Pairwise Weighted Jaccard matrix over two or more rank CSVs.
    Similarity {
        /// Rank CSV files (at least two).
        #[arg(required = true, num_args = 2..)]
        ranks: Vec<PathBuf>,
        /// Weights for ranks 1,2,3,unranked as "w1,w2,w3,w0".
        #[arg(long, value_parser = parse_weights, default_value = "3,2,1,0")]
        weights: WeightMap,
        /// Output directory for matrix.csv + matrix.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full config-driven grid and emit a digest manifest.
    Report {
        /// Pipeline TOML config.
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_weights(s: &str) -> Result<WeightMap, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("expected four comma-separated weights".into());
    }
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| e.to_string());
    let map = WeightMap {
        rank1: parse(parts[0])?,
        rank2: parse(parts[1])?,
        rank3: parse(parts[2])?,
        unranked: parse(parts[3])?,
    };
    map.validate().map_err(|e| e.to_string())?;
    Ok(map)
}

fn run(cli: Cli) -> Result<(), Error> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Train {
            data,
            model,
            features,
            seed,
            test_fraction,
            no_stratify,
            averaging,
            out,
        } => {
            let report = cmd_train(&TrainArgs {
                data: data.data,
                schema: data.schema,
                target: data.target,
                features,
                params: model.to_params(seed)?,
                test_fraction,
                stratify: !no_stratify,
                averaging,
                out,
            })?;
            if !quiet {
                print_report(&report);
            }
        }
        Command::Evaluate {
            model,
            data,
            averaging,
            out,
        } => {
            let report = cmd_evaluate(&EvaluateArgs {
                model,
                data: data.data,
                schema: data.schema,
                target: data.target,
                averaging,
                out,
            })?;
            if !quiet {
                print_report(&report);
            }
        }
        Command::Explain {
            model,
            data,
            method,
            seed,
            mda_repeats,
            lime_samples,
            lime_k,
            kernel_width,
            ridge_lambda,
            out,
        } => {
            let iv = cmd_explain(&ExplainArgs {
                model,
                data: data.data,
                schema: data.schema,
                target: data.target,
                method,
                seed,
                mda_repeats,
                lime: LimeConfig {
                    n_samples: lime_samples,
                    kernel_width,
                    k: lime_k,
                    ridge_lambda,
                    seed,
                },
                out,
            })?;
            if !quiet {
                for (feature, score) in &iv.scores {
                    println!("{feature}: {score:.6}");
                }
            }
        }
        Command::Rank {
            importance,
            t1,
            t2,
            floor,
            quantile,
            out,
        } => {
            let policy = if quantile {
                DiscretizePolicy::Quantile {
                    q1: t1,
                    q2: t2,
                    floor,
                }
            } else {
                DiscretizePolicy::Fixed { t1, t2, floor }
            };
            let ra = cmd_rank(&RankArgs {
                importance,
                policy,
                out,
            })?;
            if !quiet {
                for (feature, rank) in &ra.ranks {
                    println!("{feature}: {rank}");
                }
            }
        }
        Command::Similarity { ranks, weights, out } => {
            let matrix = cmd_similarity(&SimilarityArgs {
                ranks,
                weight_map: weights,
                out,
            })?;
            if !quiet {
                print!("{}", matrix.to_csv());
            }
        }
        Command::Report { config } => {
            let manifest = cmd_report(&config)?;
            if !quiet {
                println!("{} artifacts written", manifest.artifacts.len());
            }
        }
    }
    Ok(())
}

fn print_report(r: &treexplain::metrics::EvalReport) {
    println!("accuracy:  {:.4}", r.accuracy);
    println!("precision: {:.4}", r.precision);
    println!("recall:    {:.4}", r.recall);
    println!("f1:        {:.4}", r.f1);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
