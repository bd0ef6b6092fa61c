//! Shared helpers for integration tests: a brute-force Shapley oracle
//! over all 2^d feature subsets, a random-tree generator, and
//! dataset/schema file writers.
#![allow(dead_code)]

use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use treexplain::data::Dataset;
use treexplain::model::{goes_left, TreeNode};

/// Write a dataset back out as a CSV with the given target column name.
pub fn write_dataset_csv(d: &Dataset, path: &Path, target_name: &str) {
    let mut out = String::new();
    let names: Vec<String> = d.columns.iter().map(|c| c.name.clone()).collect();
    out.push_str(&format!("{},{target_name}\n", names.join(",")));
    for (row, &t) in d.rows.iter().zip(&d.target) {
        let cells: Vec<String> = d
            .columns
            .iter()
            .zip(row)
            .map(|(c, &v)| match c.decode(v) {
                Some(label) => label.to_string(),
                None => format!("{v}"),
            })
            .collect();
        out.push_str(&format!("{},{t}\n", cells.join(",")));
    }
    std::fs::write(path, out).unwrap();
}

/// Write the dataset's column schema (without the target) as JSON.
pub fn write_schema_json(d: &Dataset, path: &Path) {
    std::fs::write(path, serde_json::to_string_pretty(&d.columns).unwrap()).unwrap();
}

/// Cover-conditioned expectation E[f(x) | x_S]: splits on features in
/// `subset` follow the instance, all others are averaged by per-node
/// sample covers. This is the value function of path-dependent tree
/// SHAP.
pub fn conditional_expectation(tree: &TreeNode, row: &[f64], subset: u32) -> f64 {
    match tree {
        TreeNode::Leaf { value, .. } => *value,
        TreeNode::Internal {
            feature,
            threshold,
            left,
            right,
            n_samples,
            ..
        } => {
            if subset & (1 << feature) != 0 {
                if goes_left(row[*feature], *threshold) {
                    conditional_expectation(left, row, subset)
                } else {
                    conditional_expectation(right, row, subset)
                }
            } else {
                let n = *n_samples as f64;
                (left.n_samples() as f64 / n) * conditional_expectation(left, row, subset)
                    + (right.n_samples() as f64 / n) * conditional_expectation(right, row, subset)
            }
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Exact Shapley values by enumeration of all subsets of the d features.
/// O(2^d) per feature; only viable for small d.
pub fn shapley_enumeration(tree: &TreeNode, row: &[f64], d: usize) -> Vec<f64> {
    let mut phi = vec![0.0; d];
    let full = (1u32 << d) - 1;
    for j in 0..d {
        let bit = 1u32 << j;
        for subset in 0..=full {
            if subset & bit != 0 {
                continue;
            }
            let s = (subset.count_ones()) as usize;
            let weight = factorial(s) * factorial(d - s - 1) / factorial(d);
            phi[j] += weight
                * (conditional_expectation(tree, row, subset | bit)
                    - conditional_expectation(tree, row, subset));
        }
    }
    phi
}

/// Random tree with consistent covers: every internal node's sample
/// count equals the sum of its children's.
pub fn random_tree(rng: &mut ChaCha8Rng, n_features: usize, max_depth: usize, n_samples: usize) -> TreeNode {
    if max_depth == 0 || n_samples < 4 || rng.gen_bool(0.2) {
        return TreeNode::Leaf {
            value: rng.gen_range(-2.0..2.0),
            n_samples,
            class_counts: None,
        };
    }
    let left_n = rng.gen_range(1..n_samples);
    TreeNode::Internal {
        feature: rng.gen_range(0..n_features),
        threshold: rng.gen_range(0.05..0.95),
        left: Box::new(random_tree(rng, n_features, max_depth - 1, left_n)),
        right: Box::new(random_tree(rng, n_features, max_depth - 1, n_samples - left_n)),
        n_samples,
        impurity: 0.0,
        gain: 0.0,
    }
}
