//! End-to-end concordance analysis: train two models, discretize their
//! importance scores into ordinal rank bands, add a hand-written expert
//! ranking, and print the Weighted Jaccard similarity matrix.
//!
//! Run with: `cargo run --example rank_and_similarity`

use std::collections::BTreeMap;

use treexplain::concordance::{
    discretize, ranks_to_weights, similarity_matrix, DiscretizePolicy, Rank, RankAssignment,
    WeightMap,
};
use treexplain::data::{split, synthesize, ColumnSpec, DecisionRule, GeneratorSpec};
use treexplain::explain::{mdi, shap_global, shap_values};
use treexplain::model::{train_decision_tree, train_gradient_boosting, ModelParams};

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
    let dt = train_decision_tree(&pair.train, &ModelParams::dt(3, 5, 42))?;
    let gbt = train_gradient_boosting(&pair.train, &ModelParams::gbt(3, 40, 42))?;

    // Model-derived rankings: max-normalize, then band at 2/3 and 1/3
    // with a 0.05 floor below which a feature is left unranked.
    let mut assignments = vec![
        discretize(&mdi(&dt), DiscretizePolicy::default())?,
        discretize(&shap_global(&shap_values(&dt, &pair.test)?), DiscretizePolicy::default())?,
        discretize(&mdi(&gbt), DiscretizePolicy::default())?,
        discretize(&shap_global(&shap_values(&gbt, &pair.test)?), DiscretizePolicy::default())?,
    ];

    // A reference ranking as a domain expert might write it: Stage and
    // N matter most, Age somewhat, T and M not at all.
    assignments.push(RankAssignment {
        label: "Experts".into(),
        ranks: BTreeMap::from([
            ("Age".into(), Rank::Three),
            ("Stage".into(), Rank::One),
            ("T".into(), Rank::Unranked),
            ("N".into(), Rank::One),
            ("M".into(), Rank::Unranked),
        ]),
    });

    println!("Rank bands (1 = most important, blank = unranked):\n");
    print!("{:<26}", "");
    for f in ["Age", "Stage", "T", "N", "M"] {
        print!("{f:>7}");
    }
    println!();
    for ra in &assignments {
        print!("{:<26}", ra.label);
        for f in ["Age", "Stage", "T", "N", "M"] {
            print!("{:>7}", ra.ranks[f].to_string());
        }
        println!();
    }

    let weights: Vec<_> = assignments
        .iter()
        .map(|ra| ranks_to_weights(ra, &WeightMap::default()))
        .collect::<treexplain::Result<_>>()?;
    let matrix = similarity_matrix(&weights)?;
    println!("\nWeighted Jaccard similarity (weights 3/2/1/0 per band):\n");
    print!("{}", matrix.to_csv());
    Ok(())
}
