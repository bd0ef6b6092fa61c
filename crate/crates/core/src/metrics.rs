//! Classification evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2x2 confusion counts with class 1 as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// How per-class precision/recall/F1 are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Support-weighted mean over both classes. Under this mode recall
    /// equals accuracy exactly.
    #[default]
    Weighted,
    /// Unweighted mean over both classes present in the labels.
    Macro,
    /// Metrics of class 1 only.
    PositiveClass,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub averaging: Averaging,
    /// Set when a 0/0 precision or recall ratio was defined as 0.
    pub degenerate_ratio: bool,
}

/// Count the confusion matrix of predictions against labels.
pub fn confusion(preds: &[u8], labels: &[u8]) -> Result<ConfusionMatrix> {
    if preds.len() != labels.len() {
        return Err(Error::LengthMismatch {
            a: preds.len(),
            b: labels.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::InvalidParameter("empty prediction vector".into()));
    }
    let mut cm = ConfusionMatrix {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&p, &l) in preds.iter().zip(labels) {
        match (p, l) {
            (1, 1) => cm.tp += 1,
            (1, 0) => cm.fp += 1,
            (0, 0) => cm.tn += 1,
            (0, 1) => cm.fn_ += 1,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "labels must be binary, saw prediction {p} / label {l}"
                )))
            }
        }
    }
    Ok(cm)
}

fn ratio(num: usize, den: usize, degenerate: &mut bool) -> f64 {
    if den == 0 {
        *degenerate = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1_of(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Compute accuracy, precision, recall and F1 from a confusion matrix.
/// A class absent from the labels contributes 0 with weight 0; 0/0
/// ratios are defined as 0 and flagged in the report.
pub fn evaluate(cm: &ConfusionMatrix, averaging: Averaging) -> Result<EvalReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidParameter("empty confusion matrix".into()));
    }
    let mut degenerate = false;
    let accuracy = (cm.tp + cm.tn) as f64 / total as f64;

    // Per-class views: class 1 and class 0 (where class 0 swaps roles).
    let p1 = ratio(cm.tp, cm.tp + cm.fp, &mut degenerate);
    let r1 = ratio(cm.tp, cm.tp + cm.fn_, &mut degenerate);
    let p0 = ratio(cm.tn, cm.tn + cm.fn_, &mut degenerate);
    let r0 = ratio(cm.tn, cm.tn + cm.fp, &mut degenerate);
    let support1 = cm.tp + cm.fn_;
    let support0 = cm.tn + cm.fp;

    let (precision, recall, f1) = match averaging {
        Averaging::Weighted => {
            let w1 = support1 as f64 / total as f64;
            let w0 = support0 as f64 / total as f64;
            // Support-weighted recall telescopes to (tp + tn) / total,
            // i.e. accuracy; the closed form keeps the identity exact
            // in floating point.
            (
                w0 * p0 + w1 * p1,
                accuracy,
                w0 * f1_of(p0, r0) + w1 * f1_of(p1, r1),
            )
        }
        Averaging::Macro => {
            let classes: Vec<(f64, f64)> = [(support0, p0, r0), (support1, p1, r1)]
                .into_iter()
                .filter(|(s, _, _)| *s > 0)
                .map(|(_, p, r)| (p, r))
                .collect();
            let k = classes.len() as f64;
            let precision = classes.iter().map(|(p, _)| p).sum::<f64>() / k;
            let recall = classes.iter().map(|(_, r)| r).sum::<f64>() / k;
            let f1 = classes.iter().map(|&(p, r)| f1_of(p, r)).sum::<f64>() / k;
            (precision, recall, f1)
        }
        Averaging::PositiveClass => (p1, r1, f1_of(p1, r1)),
    };

    Ok(EvalReport {
        accuracy,
        precision,
        recall,
        f1,
        averaging,
        degenerate_ratio: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_by_definition() {
        let cm = confusion(&[1, 0, 1, 0], &[1, 1, 0, 0]).unwrap();
        assert_eq!(
            cm,
            ConfusionMatrix {
                tp: 1,
                fn_: 1,
                fp: 1,
                tn: 1
            }
        );

        let perfect = confusion(&[1, 1, 1, 1, 1, 1, 0, 0, 0, 0], &[1, 1, 1, 1, 1, 1, 0, 0, 0, 0])
            .unwrap();
        assert_eq!(perfect.tp, 6);
        assert_eq!(perfect.tn, 4);
        assert_eq!(perfect.fp + perfect.fn_, 0);

        let all_pos = confusion(&[1; 10], &[1, 1, 1, 1, 1, 1, 0, 0, 0, 0]).unwrap();
        assert_eq!(all_pos.tp, 6);
        assert_eq!(all_pos.fp, 4);
        assert_eq!(all_pos.tn + all_pos.fn_, 0);
    }

    #[test]
    fn perfect_predictions_are_all_ones() {
        let cm = ConfusionMatrix {
            tp: 7,
            fp: 0,
            tn: 3,
            fn_: 0,
        };
        let r = evaluate(&cm, Averaging::Weighted).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.recall, 1.0);
        assert_eq!(r.f1, 1.0);
        assert!(!r.degenerate_ratio);
    }

    #[test]
    fn all_majority_weighted_recall_equals_accuracy() {
        // 60/40 labels, always predicting the majority class 1.
        let cm = confusion(&[1; 10], &[1, 1, 1, 1, 1, 1, 0, 0, 0, 0]).unwrap();
        let r = evaluate(&cm, Averaging::Weighted).unwrap();
        assert!((r.accuracy - 0.6).abs() < 1e-15);
        assert_eq!(r.recall, r.accuracy);
        assert!(r.degenerate_ratio);
    }

    #[test]
    fn weighted_hand_oracle() {
        // tp=50 fn=10 fp=20 tn=20: accuracy 0.7.
        // class1: p=50/70, r=50/60, support 60; class0: p=20/30, r=20/40, support 40.
        let cm = ConfusionMatrix {
            tp: 50,
            fn_: 10,
            fp: 20,
            tn: 20,
        };
        let r = evaluate(&cm, Averaging::Weighted).unwrap();
        assert!((r.accuracy - 0.7).abs() < 1e-15);
        let exp_p = 0.6 * (50.0 / 70.0) + 0.4 * (20.0 / 30.0);
        let exp_r = 0.6 * (50.0 / 60.0) + 0.4 * (20.0 / 40.0);
        let f1_1 = 2.0 * (50.0 / 70.0) * (50.0 / 60.0) / (50.0 / 70.0 + 50.0 / 60.0);
        let f1_0 = 2.0 * (20.0 / 30.0) * (20.0 / 40.0) / (20.0 / 30.0 + 20.0 / 40.0);
        assert!((r.precision - exp_p).abs() < 1e-15);
        assert!((r.recall - exp_r).abs() < 1e-15);
        assert!((r.f1 - (0.6 * f1_1 + 0.4 * f1_0)).abs() < 1e-15);
        assert_eq!(r.recall, r.accuracy);
    }

    #[test]
    fn length_mismatch_and_empty() {
        assert!(confusion(&[1], &[1, 0]).is_err());
        assert!(confusion(&[], &[]).is_err());
    }
}
