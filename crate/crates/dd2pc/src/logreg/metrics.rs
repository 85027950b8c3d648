use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Vector;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub confusion: Confusion,
    pub threshold: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Threshold metrics (score ≥ θ is class 1) and ROC AUC.
///
/// Scores are clamped to [0, 1] first. Precision, recall and F1 are 0 when
/// their denominator is 0. With a single class present the ROC curve is
/// undefined and AUC is reported as 0.5.
pub fn evaluate(y: &Vector, scores: &Vector, threshold: f64) -> Result<MetricsReport> {
    if y.len() != scores.len() {
        return Err(Error::shape("evaluate", format!("{} labels, {} scores", y.len(), scores.len())));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(format!("threshold {threshold} outside [0, 1]")));
    }
    let scores: Vec<f64> = scores.iter().map(|s| s.clamp(0.0, 1.0)).collect();
    let mut c = Confusion::default();
    for (&label, &s) in y.iter().zip(&scores) {
        match (label == 1.0, s >= threshold) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(MetricsReport {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision,
        recall,
        f1,
        auc: roc_auc(y.as_slice(), &scores),
        confusion: c,
        threshold,
    })
}

/// Trapezoidal area under the ROC curve, stepping through distinct scores
/// from high to low so tied scores contribute a diagonal segment.
pub fn roc_auc(y: &[f64], scores: &[f64]) -> f64 {
    let pos = y.iter().filter(|&&v| v == 1.0).count();
    let neg = y.len() - pos;
    if pos == 0 || neg == 0 {
        return 0.5;
    }
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]));
    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_tpr, mut prev_fpr) = (0.0, 0.0);
    let mut area = 0.0;
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if y[order[k]] == 1.0 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        let tpr = tp as f64 / pos as f64;
        let fpr = fp as f64 / neg as f64;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    area
}
