//! File-level command implementations behind the CLI subcommands.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::concordance::{
    discretize, rank_csv, ranks_to_weights, similarity_matrix, DiscretizePolicy, Rank,
    RankAssignment, SimilarityMatrix, WeightMap, WeightVector,
};
use crate::data::{load_csv, load_feature_set, select_features, split, Dataset, FeatureSet};
use crate::error::{Error, Result};
use crate::explain::{
    lime_global, mda, mdi, model_id, shap_global, shap_values, ImportanceVector, LimeConfig,
    Method,
};
use crate::metrics::{confusion, evaluate, Averaging, EvalReport};
use crate::model::{
    load_model, save_model, train_decision_tree, train_gradient_boosting, train_random_forest,
    EnsembleModel, ModelKind, ModelParams,
};
use crate::pipeline::manifest::{sha256_hex, ArtifactWriter, RunManifest};
use crate::pipeline::{load_config, load_schema, read_text, write_text, PipelineConfig};

/// Train the model kind named in the parameters.
pub fn train_model(d: &Dataset, p: &ModelParams) -> Result<EnsembleModel> {
    match p.model_kind {
        ModelKind::Dt => train_decision_tree(d, p),
        ModelKind::Rf => train_random_forest(d, p),
        ModelKind::Gbt => train_gradient_boosting(d, p),
    }
}

fn load_dataset(data: &Path, schema: &Path, target: &str) -> Result<Dataset> {
    let columns = load_schema(schema)?;
    let (dataset, _summary) = load_csv(data, &columns, target)?;
    Ok(dataset)
}

/// Restrict a dataset to exactly the model's feature universe, in the
/// model's column order.
fn align_to_model(d: &Dataset, m: &EnsembleModel) -> Result<Dataset> {
    if d.feature_names() == m.feature_names {
        return Ok(d.clone());
    }
    let names: Vec<&str> = m.feature_names.iter().map(String::as_str).collect();
    let fs = FeatureSet::new("model-universe", &names)?;
    select_features(d, &fs)
}

#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub data: PathBuf,
    pub schema: PathBuf,
    pub target: String,
    pub features: Option<PathBuf>,
    pub params: ModelParams,
    pub test_fraction: f64,
    pub stratify: bool,
    pub averaging: Averaging,
    pub out: PathBuf,
}

/// Train one model, evaluate on a held-out split, and write
/// `model.json` + `metrics.json` under the output directory.
pub fn cmd_train(args: &TrainArgs) -> Result<EvalReport> {
    args.params.validate()?;
    let mut d = load_dataset(&args.data, &args.schema, &args.target)?;
    if let Some(path) = &args.features {
        d = select_features(&d, &load_feature_set(path)?)?;
    }
    let pair = split(&d, args.test_fraction, args.params.seed, args.stratify)?;
    let model = train_model(&pair.train, &args.params)?;
    let report = evaluate(
        &confusion(&model.predict_all(&pair.test.rows)?, &pair.test.target)?,
        args.averaging,
    )?;
    write_text(&args.out.join("model.json"), &save_model(&model)?)?;
    write_text(
        &args.out.join("metrics.json"),
        &serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct EvaluateArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    pub schema: PathBuf,
    pub target: String,
    pub averaging: Averaging,
    pub out: Option<PathBuf>,
}

/// Evaluate a saved model on a dataset; optionally write the report.
pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<EvalReport> {
    let model = load_model(&read_text(&args.model)?)?;
    let d = align_to_model(&load_dataset(&args.data, &args.schema, &args.target)?, &model)?;
    let report = evaluate(
        &confusion(&model.predict_all(&d.rows)?, &d.target)?,
        args.averaging,
    )?;
    if let Some(out) = &args.out {
        write_text(
            &out.join("metrics.json"),
            &serde_json::to_string_pretty(&report)?,
        )?;
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ExplainArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    pub schema: PathBuf,
    pub target: String,
    pub method: Method,
    pub seed: u64,
    pub mda_repeats: usize,
    pub lime: LimeConfig,
    pub out: PathBuf,
}

fn explain_one(
    model: &EnsembleModel,
    d: &Dataset,
    method: Method,
    seed: u64,
    mda_repeats: usize,
    lime: &LimeConfig,
) -> Result<(ImportanceVector, Option<String>)> {
    Ok(match method {
        Method::Mdi => (mdi(model), None),
        Method::Mda => (mda(model, d, mda_repeats, seed)?, None),
        Method::Shap => {
            let sm = shap_values(model, d)?;
            let csv = sm.to_csv();
            (shap_global(&sm), Some(csv))
        }
        Method::Lime => {
            let cfg = LimeConfig {
                seed,
                ..lime.clone()
            };
            (lime_global(model, d, &cfg)?, None)
        }
    })
}

/// Compute one importance vector for a saved model and write it as
/// JSON; SHAP additionally writes the per-instance attribution CSV.
pub fn cmd_explain(args: &ExplainArgs) -> Result<ImportanceVector> {
    let model = load_model(&read_text(&args.model)?)?;
    let d = align_to_model(&load_dataset(&args.data, &args.schema, &args.target)?, &model)?;
    let (iv, shap_csv) = explain_one(
        &model,
        &d,
        args.method,
        args.seed,
        args.mda_repeats,
        &args.lime,
    )?;
    write_text(
        &args
            .out
            .join(format!("importance-{}.json", args.method.as_str())),
        &serde_json::to_string_pretty(&iv)?,
    )?;
    if let Some(csv) = shap_csv {
        write_text(&args.out.join("shap.csv"), &csv)?;
    }
    Ok(iv)
}

#[derive(Debug, Clone)]
pub struct RankArgs {
    pub importance: PathBuf,
    pub policy: DiscretizePolicy,
    /// Output rank CSV file path.
    pub out: PathBuf,
}

/// Discretize a stored importance vector into a rank CSV. The policy
/// thresholds are echoed in an audit header comment.
pub fn cmd_rank(args: &RankArgs) -> Result<RankAssignment> {
    let iv: ImportanceVector = serde_json::from_str(&read_text(&args.importance)?)?;
    let ra = discretize(&iv.floored(), args.policy)?;
    let audit = match args.policy {
        DiscretizePolicy::Fixed { t1, t2, floor } => {
            format!("policy=fixed t1={t1} t2={t2} floor={floor}")
        }
        DiscretizePolicy::Quantile { q1, q2, floor } => {
            format!("policy=quantile q1={q1} q2={q2} floor={floor}")
        }
    };
    let comments = vec![
        format!("source={} method={}", iv.model_id, iv.method.as_str()),
        audit,
    ];
    write_text(&args.out, &rank_csv(&ra, &comments))?;
    Ok(ra)
}

/// Parse a rank CSV without a predeclared universe: (label, listed
/// feature -> rank).
fn parse_rank_csv(path: &Path) -> Result<(String, BTreeMap<String, Rank>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: path.to_path_buf(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => Error::Csv(e),
        })?;
    let mut ranks = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let name = record.get(0).unwrap_or("").trim().to_string();
        if name.is_empty() {
            continue;
        }
        let rank = Rank::parse(record.get(1).unwrap_or(""), i + 1)?;
        ranks.insert(name, rank);
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "ranks".into());
    Ok((label, ranks))
}

#[derive(Debug, Clone)]
pub struct SimilarityArgs {
    pub ranks: Vec<PathBuf>,
    pub weight_map: WeightMap,
    /// Output directory for matrix.csv + matrix.json.
    pub out: PathBuf,
}

/// Build the pairwise Weighted Jaccard matrix over a set of rank CSVs.
/// The universe is the union of listed features; a file that shares no
/// feature with the first file is rejected as a disjoint universe.
pub fn cmd_similarity(args: &SimilarityArgs) -> Result<SimilarityMatrix> {
    if args.ranks.len() < 2 {
        return Err(Error::InvalidParameter(
            "similarity needs at least 2 rank files".into(),
        ));
    }
    let parsed: Vec<(String, BTreeMap<String, Rank>)> = args
        .ranks
        .iter()
        .map(|p| parse_rank_csv(p))
        .collect::<Result<_>>()?;

    let first_features: BTreeSet<&String> = parsed[0].1.keys().collect();
    for ((_, ranks), path) in parsed.iter().zip(&args.ranks).skip(1) {
        if ranks.keys().all(|k| !first_features.contains(k)) {
            return Err(Error::UniverseMismatch(format!(
                "{} and {} share no features",
                args.ranks[0].display(),
                path.display()
            )));
        }
    }

    let universe: BTreeSet<String> = parsed
        .iter()
        .flat_map(|(_, ranks)| ranks.keys().cloned())
        .collect();
    // Repeated file stems get an index suffix so the same file can be
    // compared with itself.
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let parsed: Vec<(String, BTreeMap<String, Rank>)> = parsed
        .into_iter()
        .map(|(label, ranks)| {
            let n = seen.entry(label.clone()).or_insert(0);
            *n += 1;
            let label = if *n == 1 { label } else { format!("{label}-{n}") };
            (label, ranks)
        })
        .collect();
    let vectors: Vec<WeightVector> = parsed
        .iter()
        .map(|(label, ranks)| {
            let ra = RankAssignment {
                label: label.clone(),
                ranks: universe
                    .iter()
                    .map(|f| (f.clone(), *ranks.get(f).unwrap_or(&Rank::Unranked)))
                    .collect(),
            };
            ranks_to_weights(&ra, &args.weight_map)
        })
        .collect::<Result<_>>()?;
    let matrix = similarity_matrix(&vectors)?;
    write_text(&args.out.join("matrix.csv"), &matrix.to_csv())?;
    write_text(
        &args.out.join("matrix.json"),
        &serde_json::to_string_pretty(&matrix)?,
    )?;
    Ok(matrix)
}

fn params_summary(p: &ModelParams) -> String {
    match p.model_kind {
        ModelKind::Dt => format!("md={} msl={}", p.max_depth, p.min_samples_leaf),
        ModelKind::Rf => format!(
            "md={} msl={} ne={}",
            p.max_depth, p.min_samples_leaf, p.n_estimators
        ),
        ModelKind::Gbt => format!(
            "md={} ne={} lr={}",
            p.max_depth, p.n_estimators, p.learning_rate
        ),
    }
}

/// Restrict a parsed reference ranking to a cell's feature universe;
/// universe features the reference does not list are unranked.
fn reference_for_universe(
    label: &str,
    ranks: &BTreeMap<String, Rank>,
    universe: &[String],
) -> RankAssignment {
    RankAssignment {
        label: label.to_string(),
        ranks: universe
            .iter()
            .map(|f| (f.clone(), *ranks.get(f).unwrap_or(&Rank::Unranked)))
            .collect(),
    }
}

/// Run the full experimental grid described by a config file: for every
/// model x feature set, train, evaluate, explain with every configured
/// method, discretize, and emit one similarity matrix per cell that
/// also includes the reference rankings. Writes an accuracy table over
/// the whole grid and a digest manifest.
pub fn cmd_report(config_path: &Path) -> Result<RunManifest> {
    let cfg: PipelineConfig = load_config(config_path)?;
    let config_digest = sha256_hex(read_text(config_path)?.as_bytes());

    // Eager loading: any bad input fails before training starts.
    let full = load_dataset(&cfg.data, &cfg.schema, &cfg.target)?;
    let feature_sets: Vec<FeatureSet> = cfg
        .feature_sets
        .iter()
        .map(|fsr| {
            let mut fs = load_feature_set(&fsr.path)?;
            fs.name = fsr.name.clone();
            select_features(&full, &fs)?; // validate against the data now
            Ok(fs)
        })
        .collect::<Result<_>>()?;
    let references: Vec<(String, BTreeMap<String, Rank>, Option<BTreeMap<String, String>>)> = cfg
        .references
        .iter()
        .map(|r| {
            let (label, ranks) = parse_rank_csv(&r.path)?;
            let aliases = match &r.aliases {
                Some(p) => Some(serde_json::from_str::<BTreeMap<String, String>>(
                    &read_text(p)?,
                )?),
                None => None,
            };
            Ok((label, ranks, aliases))
        })
        .collect::<Result<_>>()?;

    let mut writer = ArtifactWriter::new(&cfg.out_dir);
    let mut accuracy_rows: Vec<String> = Vec::new();

    for spec in &cfg.models {
        let params = spec.to_params(cfg.seed)?;
        for fs in &feature_sets {
            let cell_data = select_features(&full, fs)?;
            let pair = split(&cell_data, cfg.test_fraction, cfg.seed, cfg.stratify)?;
            let model = train_model(&pair.train, &params)?;
            let id = model_id(&model);
            let cell = format!("{id}-{}", fs.name);

            writer.write(&format!("{cell}/model.json"), &save_model(&model)?)?;
            let report = evaluate(
                &confusion(&model.predict_all(&pair.test.rows)?, &pair.test.target)?,
                cfg.averaging,
            )?;
            writer.write(
                &format!("{cell}/metrics.json"),
                &serde_json::to_string_pretty(&report)?,
            )?;
            let kind = match params.model_kind {
                ModelKind::Dt => "dt",
                ModelKind::Rf => "rf",
                ModelKind::Gbt => "gbt",
            };
            accuracy_rows.push(format!(
                "{kind},{},{},{:.4},{:.4},{:.4},{:.4}",
                params_summary(&params),
                fs.name,
                report.accuracy,
                report.precision,
                report.recall,
                report.f1
            ));

            let universe = model.feature_names.clone();
            let mut vectors: Vec<WeightVector> = Vec::new();
            for (label, ranks, aliases) in &references {
                let resolved: BTreeMap<String, Rank> = match aliases {
                    Some(map) => ranks
                        .iter()
                        .map(|(k, v)| (map.get(k).cloned().unwrap_or_else(|| k.clone()), *v))
                        .collect(),
                    None => ranks.clone(),
                };
                let ra = reference_for_universe(label, &resolved, &universe);
                vectors.push(ranks_to_weights(&ra, &cfg.weight_map)?);
            }

            for &method in &cfg.methods {
                let explain_data = match method {
                    Method::Mda | Method::Shap => &pair.test,
                    _ => &pair.train,
                };
                let (iv, shap_csv) = explain_one(
                    &model,
                    explain_data,
                    method,
                    cfg.seed,
                    cfg.mda_repeats,
                    &cfg.lime.to_config(cfg.seed),
                )?;
                writer.write(
                    &format!("{cell}/importance-{}.json", method.as_str()),
                    &serde_json::to_string_pretty(&iv)?,
                )?;
                if let Some(csv) = shap_csv {
                    writer.write(&format!("{cell}/shap.csv"), &csv)?;
                }
                let ra = discretize(&iv.floored(), cfg.discretize)?;
                writer.write(
                    &format!("{cell}/ranks-{}.csv", method.as_str()),
                    &rank_csv(&ra, &[format!("cell={cell} method={}", method.as_str())]),
                )?;
                vectors.push(ranks_to_weights(&ra, &cfg.weight_map)?);
            }

            if vectors.len() >= 2 {
                let matrix = similarity_matrix(&vectors)?;
                writer.write(&format!("{cell}/matrix.csv"), &matrix.to_csv())?;
                writer.write(
                    &format!("{cell}/matrix.json"),
                    &serde_json::to_string_pretty(&matrix)?,
                )?;
            }
        }
    }

    let mut table = String::from("model,params,feature_set,accuracy,precision,recall,f1\n");
    for row in &accuracy_rows {
        table.push_str(row);
        table.push('\n');
    }
    writer.write("accuracy_table.csv", &table)?;
    writer.finish(&config_digest)
}
