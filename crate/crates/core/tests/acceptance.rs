//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line (visible with `cargo test -- --nocapture`).

mod common;

use std::collections::BTreeMap;
use std::panic::AssertUnwindSafe;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treexplain::concordance::{jaccard, weighted_jaccard, SimilarityMatrix, WeightMap, WeightVector};
use treexplain::data::{synthesize, xor_dataset, ColumnSpec, DecisionRule, GeneratorSpec};
use treexplain::explain::{lime_local, mda, mdi, shap_values, tree_shap, LimeConfig};
use treexplain::metrics::{evaluate, Averaging, ConfusionMatrix};
use treexplain::model::{
    train_decision_tree, train_gradient_boosting, train_random_forest, training_loss_trace,
    MaxFeatures, ModelParams,
};
use treexplain::pipeline::{cmd_report, cmd_similarity, SimilarityArgs};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

fn criterion<F: FnOnce()>(n: u32, desc: &str, f: F) {
    match std::panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(()) => println!("acceptance criterion {n}: PASS - {desc}"),
        Err(e) => {
            println!("acceptance criterion {n}: FAIL - {desc}");
            std::panic::resume_unwind(e);
        }
    }
}

fn run_similarity(files: &[&str], out: &Path) -> SimilarityMatrix {
    cmd_similarity(&SimilarityArgs {
        ranks: files.iter().map(|f| fixture(f)).collect(),
        weight_map: WeightMap::default(),
        out: out.to_path_buf(),
    })
    .unwrap()
}

fn assert_matrix(m: &SimilarityMatrix, expected: &[(&str, &str, f64)]) {
    for &(a, b, want) in expected {
        let got = m.get(a, b).unwrap();
        assert!(
            (got - want).abs() <= 0.005,
            "cell ({a}, {b}): got {got:.4}, published {want}"
        );
        assert_eq!(m.get(a, b), m.get(b, a));
    }
    for (i, label) in m.labels.iter().enumerate() {
        assert_eq!(m.get(label, label), Some(1.0), "diagonal at {label}");
        assert_eq!(m.values[i][i], 1.0);
    }
}

/// Criterion 1: the minimum-set similarity matrices are reproduced from
/// rank-table transcriptions within +-0.005 of the published values.
///
/// One deliberate deviation: the published MDI-XGB/LIME-XGB cell prints
/// 0.81, but the underlying fraction is 9/11 = 0.8182 — the same
/// fraction that prints as 0.82 in two other cells of the same table.
/// The fixture asserts 0.82 and treats the 0.81 as a rounding slip.
#[test]
fn criterion_1_minimum_set_matrices() {
    criterion(1, "minimum-set DT and XGB matrices match publication", || {
        let started = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        let dt = run_similarity(
            &[
                "minimum/mdi-dt.csv",
                "minimum/mda-dt.csv",
                "minimum/shap-dt.csv",
                "minimum/lime-dt.csv",
                "minimum/guidelines.csv",
                "minimum/experts.csv",
            ],
            &dir.path().join("dt"),
        );
        assert_matrix(
            &dt,
            &[
                ("mdi-dt", "mda-dt", 0.71),
                ("mdi-dt", "shap-dt", 0.75),
                ("mdi-dt", "lime-dt", 0.71),
                ("mdi-dt", "guidelines", 0.55),
                ("mdi-dt", "experts", 0.64),
                ("mda-dt", "shap-dt", 0.71),
                ("mda-dt", "lime-dt", 0.67),
                ("mda-dt", "guidelines", 0.36),
                ("mda-dt", "experts", 0.45),
                ("shap-dt", "lime-dt", 0.71),
                ("shap-dt", "guidelines", 0.42),
                ("shap-dt", "experts", 0.50),
                ("lime-dt", "guidelines", 0.50),
                ("lime-dt", "experts", 0.45),
                ("guidelines", "experts", 0.75),
            ],
        );

        let xgb = run_similarity(
            &[
                "minimum/mdi-xgb.csv",
                "minimum/mda-xgb.csv",
                "minimum/shap-xgb.csv",
                "minimum/lime-xgb.csv",
                "minimum/guidelines.csv",
                "minimum/experts.csv",
            ],
            &dir.path().join("xgb"),
        );
        assert_matrix(
            &xgb,
            &[
                ("mdi-xgb", "mda-xgb", 0.83),
                ("mdi-xgb", "shap-xgb", 0.83),
                // Published as 0.81; the exact fraction is 9/11 = 0.82.
                ("mdi-xgb", "lime-xgb", 0.82),
                ("mdi-xgb", "guidelines", 0.91),
                ("mdi-xgb", "experts", 0.83),
                ("mda-xgb", "shap-xgb", 0.83),
                ("mda-xgb", "lime-xgb", 0.67),
                ("mda-xgb", "guidelines", 0.75),
                ("mda-xgb", "experts", 0.83),
                ("shap-xgb", "lime-xgb", 0.82),
                ("shap-xgb", "guidelines", 0.75),
                ("shap-xgb", "experts", 0.69),
                ("lime-xgb", "guidelines", 0.73),
                ("lime-xgb", "experts", 0.67),
                ("guidelines", "experts", 0.75),
            ],
        );
        assert!(
            started.elapsed().as_secs_f64() < 1.0,
            "matrix reproduction took {:?}",
            started.elapsed()
        );
    });
}

/// Criterion 2: recommended- and maximum-set Guidelines/Experts cells.
#[test]
fn criterion_2_larger_set_reference_cells() {
    criterion(2, "recommended 0.82 (28/34) and maximum 0.63 (34/54)", || {
        let dir = tempfile::tempdir().unwrap();
        let rec = run_similarity(
            &["recommended/guidelines.csv", "recommended/experts.csv"],
            &dir.path().join("rec"),
        );
        let got = rec.get("guidelines", "experts").unwrap();
        assert!((got - 0.82).abs() <= 0.005, "recommended: {got:.4}");
        assert!((got - 28.0 / 34.0).abs() < 1e-12);

        let max = run_similarity(
            &["maximum/guidelines.csv", "maximum/experts.csv"],
            &dir.path().join("max"),
        );
        let got = max.get("guidelines", "experts").unwrap();
        assert!((got - 0.63).abs() <= 0.005, "maximum: {got:.4}");
        assert!((got - 34.0 / 54.0).abs() < 1e-12);
    });
}

fn wv(label: &str, values: &[f64]) -> WeightVector {
    WeightVector {
        label: label.into(),
        weights: values
            .iter()
            .enumerate()
            .map(|(i, &v)| (format!("f{i:02}"), v))
            .collect(),
    }
}

/// Criterion 3: Weighted Jaccard property suite over 1000 random pairs.
#[test]
fn criterion_3_weighted_jaccard_properties() {
    criterion(3, "1000-pair property suite for weighted_jaccard", || {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for trial in 0..1000 {
            let d = rng.gen_range(1..=12);
            let gen = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..d)
                    .map(|_| {
                        if rng.gen_bool(0.3) {
                            0.0
                        } else {
                            rng.gen_range(0.0..5.0)
                        }
                    })
                    .collect()
            };
            let xs = gen(&mut rng);
            let ys = gen(&mut rng);
            let x = wv("x", &xs);
            let y = wv("y", &ys);
            let j = weighted_jaccard(&x, &y).unwrap();

            // Bounds and symmetry.
            assert!((0.0..=1.0).contains(&j), "trial {trial}: J = {j}");
            assert_eq!(j, weighted_jaccard(&y, &x).unwrap());
            // Self-similarity.
            assert_eq!(weighted_jaccard(&x, &x).unwrap(), 1.0);
            // Positive-scale invariance, exact for power-of-two scales.
            for scale in [0.25, 0.5, 2.0, 8.0] {
                let xc = wv("x", &xs.iter().map(|v| v * scale).collect::<Vec<_>>());
                let yc = wv("y", &ys.iter().map(|v| v * scale).collect::<Vec<_>>());
                assert_eq!(j, weighted_jaccard(&xc, &yc).unwrap(), "scale {scale}");
            }
            // Binary reduction to plain Jaccard, exact.
            let xb: Vec<f64> = xs.iter().map(|&v| f64::from(v > 0.0)).collect();
            let yb: Vec<f64> = ys.iter().map(|&v| f64::from(v > 0.0)).collect();
            let jb = weighted_jaccard(&wv("x", &xb), &wv("y", &yb)).unwrap();
            let sx = xb
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(i, _)| format!("f{i:02}"))
                .collect();
            let sy = yb
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(i, _)| format!("f{i:02}"))
                .collect();
            assert_eq!(jb, jaccard(&sx, &sy));
        }
    });
}

fn suite_datasets() -> Vec<treexplain::data::Dataset> {
    let numeric = |names: &[&str]| -> Vec<ColumnSpec> {
        names.iter().map(|n| ColumnSpec::numeric(n)).collect()
    };
    vec![
        synthesize(&GeneratorSpec {
            n_rows: 200,
            columns: numeric(&["a", "b", "c"]),
            rule: DecisionRule::ThresholdGe("a".into(), 0.5),
            noise_rate: 0.05,
            seed: 41,
        })
        .unwrap(),
        synthesize(&GeneratorSpec {
            n_rows: 200,
            columns: numeric(&["a", "b", "c", "d"]),
            rule: DecisionRule::LinearGe(vec![("a".into(), 1.0), ("b".into(), 0.7)], 0.9),
            noise_rate: 0.1,
            seed: 42,
        })
        .unwrap(),
        synthesize(&GeneratorSpec {
            n_rows: 256,
            columns: vec![
                ColumnSpec::ordinal("x1", &["0", "1"]),
                ColumnSpec::ordinal("x2", &["0", "1"]),
                ColumnSpec::numeric("noise"),
            ],
            rule: DecisionRule::Xor("x1".into(), "x2".into()),
            noise_rate: 0.0,
            seed: 43,
        })
        .unwrap(),
    ]
}

/// Criterion 4: the path algorithm matches the 2^d enumeration oracle,
/// and local accuracy holds on every instance of every suite model.
#[test]
fn criterion_4_shap_correctness() {
    criterion(4, "tree SHAP matches enumeration oracle; local accuracy 1e-9", || {
        let started = Instant::now();
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = rng.gen_range(2..=8);
            let tree = common::random_tree(&mut rng, d, 3, 200);
            for _ in 0..3 {
                let row: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                let fast = tree_shap(&tree, &row, d);
                let oracle = common::shapley_enumeration(&tree, &row, d);
                for (f, o) in fast.iter().zip(&oracle) {
                    assert!((f - o).abs() < 1e-9, "seed {seed}: {f} vs {o}");
                }
            }
        }

        for data in suite_datasets() {
            let models = vec![
                train_decision_tree(&data, &ModelParams::dt(3, 2, 7)).unwrap(),
                train_random_forest(&data, &ModelParams::rf(3, 2, 20, 7)).unwrap(),
                train_gradient_boosting(&data, &ModelParams::gbt(3, 20, 7)).unwrap(),
            ];
            for m in models {
                let sm = shap_values(&m, &data).unwrap();
                for (row, phi) in data.rows.iter().zip(&sm.rows) {
                    let reconstructed = sm.base_value + phi.iter().sum::<f64>();
                    let raw = m.raw_output(row).unwrap();
                    assert!(
                        (reconstructed - raw).abs() < 1e-9,
                        "local accuracy: {reconstructed} vs {raw}"
                    );
                }
            }
        }
        assert!(started.elapsed().as_secs() < 30);
    });
}

/// Criterion 5: importance sanity across the three global methods.
#[test]
fn criterion_5_importance_sanity() {
    criterion(5, "MDI normalization, MDA null feature, LIME constant model", || {
        let d = synthesize(&GeneratorSpec {
            n_rows: 200,
            columns: vec![ColumnSpec::numeric("used"), ColumnSpec::numeric("unused")],
            rule: DecisionRule::ThresholdGe("used".into(), 0.5),
            noise_rate: 0.0,
            seed: 51,
        })
        .unwrap();
        let m = train_decision_tree(&d, &ModelParams::dt(3, 5, 51)).unwrap();

        let iv = mdi(&m);
        assert!(iv.normalized);
        let sum: f64 = iv.scores.values().sum();
        assert!((sum - 1.0).abs() <= 1e-12, "MDI sum {sum}");

        // The stump-free tree never splits on "unused" (it carries no
        // signal), so its permutation importance must be exactly 0.
        assert_eq!(iv.scores["unused"], 0.0);
        for seed in 0..10 {
            let iv = mda(&m, &d, 5, seed).unwrap();
            assert_eq!(iv.scores["unused"], 0.0, "seed {seed}");
        }

        let constant = treexplain::data::Dataset::new(
            d.columns.clone(),
            d.rows.clone(),
            vec![1; d.row_count()],
        )
        .unwrap();
        let cm = train_decision_tree(&constant, &ModelParams::dt(3, 1, 0)).unwrap();
        let e = lime_local(
            &cm,
            &d,
            &d.rows[0],
            0,
            &LimeConfig {
                k: 2,
                ..Default::default()
            },
        )
        .unwrap();
        for (name, coef) in &e.feature_weights {
            assert!(coef.abs() < 1e-6, "{name}: {coef}");
        }
    });
}

/// Criterion 6: model sanity at desk scale.
#[test]
fn criterion_6_model_sanity() {
    criterion(6, "XOR exact at depth 2; GBT loss monotone; degenerate RF == DT", || {
        let xor = xor_dataset();
        let dt = train_decision_tree(&xor, &ModelParams::dt(2, 1, 0)).unwrap();
        let correct = dt
            .predict_all(&xor.rows)
            .unwrap()
            .iter()
            .zip(&xor.target)
            .filter(|(p, t)| p == t)
            .count();
        assert_eq!(correct, 4, "XOR training accuracy below 1.0");

        for data in suite_datasets() {
            let trace = training_loss_trace(&data, &ModelParams::gbt(3, 50, 6)).unwrap();
            assert_eq!(trace.len(), 50);
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "loss rose: {} -> {}", w[0], w[1]);
            }
        }

        for data in suite_datasets() {
            let mut rf_params = ModelParams::rf(3, 2, 1, 9);
            rf_params.bootstrap = false;
            rf_params.max_features = MaxFeatures::All;
            let rf = train_random_forest(&data, &rf_params).unwrap();
            let dt = train_decision_tree(&data, &ModelParams::dt(3, 2, 9)).unwrap();
            assert_eq!(
                rf.predict_all(&data.rows).unwrap(),
                dt.predict_all(&data.rows).unwrap()
            );
        }
    });
}

/// Criterion 7: support-weighted recall equals accuracy, exactly.
#[test]
fn criterion_7_weighted_recall_identity() {
    criterion(7, "weighted recall == accuracy on 1000 random confusion matrices", || {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut checked = 0;
        while checked < 1000 {
            let cm = ConfusionMatrix {
                tp: rng.gen_range(0..500),
                fp: rng.gen_range(0..500),
                tn: rng.gen_range(0..500),
                fn_: rng.gen_range(0..500),
            };
            if cm.total() == 0 {
                continue;
            }
            let r = evaluate(&cm, Averaging::Weighted).unwrap();
            assert_eq!(r.recall, r.accuracy, "{cm:?}");
            checked += 1;
        }
    });
}

const TABLE5_GRID: &[(&str, &str)] = &[
    ("dt", "md=3 msl=5"),
    ("dt", "md=2 msl=30"),
    ("dt", "md=3 msl=20"),
    ("rf", "md=2 msl=5 ne=100"),
    ("rf", "md=3 msl=5 ne=100"),
    ("rf", "md=4 msl=5 ne=100"),
    ("gbt", "md=2 ne=50 lr=0.3"),
    ("gbt", "md=4 ne=40 lr=0.3"),
    ("gbt", "md=3 ne=40 lr=0.3"),
];

fn grid_config(dir: &Path, methods: &str, models: &str) -> PathBuf {
    let d = synthesize(&GeneratorSpec {
        n_rows: 500,
        columns: ["Age", "Stage", "T", "N", "M"]
            .iter()
            .map(|n| ColumnSpec::numeric(n))
            .collect(),
        rule: DecisionRule::LinearGe(vec![("Stage".into(), 1.2), ("N".into(), 0.8)], 1.0),
        noise_rate: 0.1,
        seed: 88,
    })
    .unwrap();
    common::write_dataset_csv(&d, &dir.join("data.csv"), "vital_status");
    common::write_schema_json(&d, &dir.join("schema.json"));
    std::fs::write(dir.join("all.txt"), "Age\nStage\nT\nN\nM\n").unwrap();

    let config = format!(
        r#"
data = "data.csv"
schema = "schema.json"
target = "vital_status"
out_dir = "out"
seed = 42
methods = [{methods}]

[[feature_set]]
name = "all"
path = "all.txt"

[[reference]]
path = "{guidelines}"

[[reference]]
path = "{experts}"

{models}
"#,
        guidelines = fixture("minimum/guidelines.csv").display(),
        experts = fixture("minimum/experts.csv").display(),
    );
    let path = dir.join("config.toml");
    std::fs::write(&path, config).unwrap();
    path
}

/// Criterion 8: the published accuracy figures themselves are not
/// reproducible here (split protocol, preprocessing and source extract
/// are unstated / not bundled) — substituted by criteria 3-7 for the
/// math. What is checked: `report` on a conforming extract emits an
/// accuracy table with the publication's row/column structure and its
/// hyperparameter grid verbatim; value agreement is non-gating.
#[test]
fn criterion_8_report_table_shape() {
    criterion(8, "report emits the Table-5-shaped grid (values non-gating)", || {
        let dir = tempfile::tempdir().unwrap();
        let models: String = TABLE5_GRID
            .iter()
            .map(|(kind, params)| {
                let mut section = format!("[[model]]\nkind = \"{kind}\"\n");
                for part in params.split(' ') {
                    let (k, v) = part.split_once('=').unwrap();
                    let key = match k {
                        "md" => "max_depth",
                        "msl" => "min_samples_leaf",
                        "ne" => "n_estimators",
                        "lr" => "learning_rate",
                        other => other,
                    };
                    section.push_str(&format!("{key} = {v}\n"));
                }
                section
            })
            .collect::<Vec<_>>()
            .join("\n");
        let config = grid_config(dir.path(), "\"mdi\"", &models);
        cmd_report(&config).unwrap();

        let table = std::fs::read_to_string(dir.path().join("out/accuracy_table.csv")).unwrap();
        let lines: Vec<&str> = table.trim().lines().collect();
        assert_eq!(
            lines[0], "model,params,feature_set,accuracy,precision,recall,f1",
            "header shape"
        );
        assert_eq!(lines.len(), 1 + TABLE5_GRID.len(), "one row per grid cell");
        for (line, (kind, params)) in lines[1..].iter().zip(TABLE5_GRID) {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells[0], *kind);
            assert_eq!(cells[1], *params, "hyperparameter grid verbatim");
            assert_eq!(cells[2], "all");
            for metric in &cells[3..7] {
                let v: f64 = metric.parse().unwrap();
                assert!((0.0..=1.0).contains(&v));
            }
            // The publication's signature identity: the recall column
            // equals the accuracy column in every row.
            assert_eq!(cells[5], cells[3]);
        }
    });
}

/// Criterion 9: rerunning `report` with an identical config reproduces
/// identical artifact digests.
#[test]
fn criterion_9_report_determinism() {
    criterion(9, "identical config -> identical manifest digests", || {
        let dir = tempfile::tempdir().unwrap();
        let models = "[[model]]\nkind = \"dt\"\nmax_depth = 3\nmin_samples_leaf = 5\n\n\
                      [[model]]\nkind = \"gbt\"\nmax_depth = 2\nn_estimators = 10\n";
        let config = grid_config(dir.path(), "\"mdi\", \"shap\", \"mda\"", models);
        let first = cmd_report(&config).unwrap();
        let second = cmd_report(&config).unwrap();
        assert!(!first.artifacts.is_empty());
        let digests = |m: &treexplain::pipeline::RunManifest| -> BTreeMap<String, String> {
            m.artifacts
                .iter()
                .map(|a| (a.path.clone(), a.sha256.clone()))
                .collect()
        };
        assert_eq!(digests(&first), digests(&second));
        assert_eq!(first.config_sha256, second.config_sha256);
    });
}
