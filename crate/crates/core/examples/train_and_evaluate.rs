//! Train the three model kinds on a synthetic clinical-style dataset
//! and compare their held-out metrics.
//!
//! Run with: `cargo run --example train_and_evaluate`

use treexplain::data::{split, synthesize, ColumnSpec, DecisionRule, GeneratorSpec};
use treexplain::metrics::{confusion, evaluate, Averaging};
use treexplain::model::{
    train_decision_tree, train_gradient_boosting, train_random_forest, ModelParams,
};

fn main() -> treexplain::Result<()> {
    // Five numeric features; the label depends on Stage and N with 10%
    // label noise, so ~0.9 is the best reachable accuracy.
    let data = synthesize(&GeneratorSpec {
        n_rows: 600,
        columns: ["Age", "Stage", "T", "N", "M"]
            .iter()
            .map(|n| ColumnSpec::numeric(n))
            .collect(),
        rule: DecisionRule::LinearGe(vec![("Stage".into(), 1.2), ("N".into(), 0.8)], 1.0),
        noise_rate: 0.1,
        seed: 7,
    })?;
    let pair = split(&data, 0.3, 42, true)?;
    println!(
        "{} training rows, {} test rows\n",
        pair.train.row_count(),
        pair.test.row_count()
    );

    let models = [
        ("decision tree ", train_decision_tree(&pair.train, &ModelParams::dt(3, 5, 42))?),
        ("random forest ", train_random_forest(&pair.train, &ModelParams::rf(3, 5, 100, 42))?),
        ("gradient boost", train_gradient_boosting(&pair.train, &ModelParams::gbt(3, 40, 42))?),
    ];
    println!("model           accuracy  precision  recall  f1");
    for (name, model) in &models {
        let cm = confusion(&model.predict_all(&pair.test.rows)?, &pair.test.target)?;
        let r = evaluate(&cm, Averaging::Weighted)?;
        println!(
            "{name}  {:>8.3}  {:>9.3}  {:>6.3}  {:>5.3}",
            r.accuracy, r.precision, r.recall, r.f1
        );
    }
    Ok(())
}
