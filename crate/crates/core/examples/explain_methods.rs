//! Run all four feature-importance methods (MDI, MDA, TreeSHAP, LIME)
//! against one trained model and print the scores side by side.
//!
//! Run with: `cargo run --example explain_methods`

use treexplain::data::{split, synthesize, ColumnSpec, DecisionRule, GeneratorSpec};
use treexplain::explain::{lime_global, mda, mdi, shap_global, shap_values, LimeConfig};
use treexplain::model::{train_gradient_boosting, ModelParams};

fn main() -> treexplain::Result<()> {
    let data = synthesize(&GeneratorSpec {
        n_rows: 500,
        columns: ["Age", "Stage", "T", "N", "M"]
            .iter()
            .map(|n| ColumnSpec::numeric(n))
            .collect(),
        rule: DecisionRule::LinearGe(vec![("Stage".into(), 1.5), ("N".into(), 1.0)], 1.2),
        noise_rate: 0.05,
        seed: 11,
    })?;
    let pair = split(&data, 0.3, 42, true)?;
    let model = train_gradient_boosting(&pair.train, &ModelParams::gbt(3, 40, 42))?;

    // MDI comes from training-time impurity bookkeeping; MDA and SHAP
    // are evaluated on held-out rows; LIME samples around training rows.
    let vectors = [
        mdi(&model),
        mda(&model, &pair.test, 5, 42)?,
        shap_global(&shap_values(&model, &pair.test)?),
        lime_global(&model, &pair.train, &LimeConfig { seed: 42, ..LimeConfig::default() })?,
    ];

    print!("{:<10}", "feature");
    for v in &vectors {
        print!("{:>8}", v.method.as_str());
    }
    println!();
    for name in model.feature_names.iter() {
        print!("{name:<10}");
        for v in &vectors {
            print!("{:>8.3}", v.scores[name]);
        }
        println!();
    }
    println!("\nScales differ by method (MDI sums to 1, MDA is an accuracy");
    println!("drop, SHAP a mean |attribution|, LIME a selection frequency);");
    println!("rank discretization max-normalizes each column before banding.");
    Ok(())
}
