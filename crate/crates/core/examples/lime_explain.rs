//! Local surrogate explanations with LIME: explain individual
//! predictions of a random forest, then aggregate into a global
//! selection-frequency importance vector.
//!
//! Run with: `cargo run --example lime_explain`

use treexplain::data::{split, synthesize, ColumnSpec, DecisionRule, GeneratorSpec};
use treexplain::explain::{lime_global, lime_local, LimeConfig};
use treexplain::model::{train_random_forest, ModelParams};

fn main() -> treexplain::Result<()> {
    let data = synthesize(&GeneratorSpec {
        n_rows: 400,
        columns: ["Age", "Stage", "T", "N", "M"]
            .iter()
            .map(|n| ColumnSpec::numeric(n))
            .collect(),
        rule: DecisionRule::LinearGe(vec![("Stage".into(), 1.5), ("N".into(), 1.0)], 1.2),
        noise_rate: 0.05,
        seed: 19,
    })?;
    let pair = split(&data, 0.3, 42, true)?;
    let model = train_random_forest(&pair.train, &ModelParams::rf(3, 5, 50, 42))?;
    let cfg = LimeConfig { seed: 42, ..LimeConfig::default() };

    for i in 0..3 {
        let instance = &pair.test.rows[i];
        let proba = model.predict_proba(instance)?;
        let exp = lime_local(&model, &pair.train, instance, i, &cfg)?;
        println!("instance {i}: P(class 1) = {proba:.3}");
        println!("  surrogate intercept {:.3}, kernel width {:.3}", exp.intercept, exp.kernel_width);
        for (name, coef) in &exp.feature_weights {
            println!("  {name:<8} {coef:>8.3}");
        }
        println!();
    }

    let global = lime_global(&model, &pair.train, &cfg)?;
    println!("global selection frequency over all training instances:");
    let mut entries: Vec<_> = global.scores.iter().collect();
    entries.sort_by(|a, b| b.1.total_cmp(a.1));
    for (name, freq) in entries {
        println!("  {name:<8} {freq:.3}");
    }
    Ok(())
}
