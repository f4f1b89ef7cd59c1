//! Turning scores into accuracy, precision, recall and ROC AUC.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{GroundTruth, ScoreVector};
use crate::error::{Error, Result};

/// How scores become outlier / inlier predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum DecisionRule {
    /// Outlier iff score > t.
    Threshold(f64),
    /// The `n` highest scores; ties at the cut-off go to the lower id.
    TopN(usize),
}

impl Default for DecisionRule {
    fn default() -> Self {
        DecisionRule::Threshold(1.0)
    }
}

impl fmt::Display for DecisionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionRule::Threshold(t) => write!(f, "threshold:{t}"),
            DecisionRule::TopN(n) => write!(f, "top:{n}"),
        }
    }
}

impl FromStr for DecisionRule {
    type Err = Error;

    /// Parses `threshold:<t>` or `top:<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::input(format!("bad decision rule `{s}`"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "threshold" => {
                let t: f64 = value.trim().parse().map_err(|_| bad())?;
                if t.is_nan() || t < 0.0 {
                    return Err(bad());
                }
                Ok(DecisionRule::Threshold(t))
            }
            "top" | "top-n" => {
                let n: usize = value.trim().parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                Ok(DecisionRule::TopN(n))
            }
            _ => Err(bad()),
        }
    }
}

pub fn binarize(scores: &ScoreVector, rule: DecisionRule) -> Result<Vec<bool>> {
    let s = scores.as_slice();
    match rule {
        DecisionRule::Threshold(t) => Ok(s.iter().map(|&v| v > t).collect()),
        DecisionRule::TopN(n) => {
            if n == 0 || n > s.len() {
                return Err(Error::input(format!(
                    "top-n needs 1 <= n <= {}, got {n}",
                    s.len()
                )));
            }
            let mut order: Vec<usize> = (0..s.len()).collect();
            order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
            let mut pred = vec![false; s.len()];
            for &i in &order[..n] {
                pred[i] = true;
            }
            Ok(pred)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        let n = self.total();
        if n == 0 {
            return 0.0;
        }
        (self.tp + self.tn) as f64 / n as f64
    }

    /// Zero when nothing was predicted positive; see [`Self::precision_defined`].
    pub fn precision(&self) -> f64 {
        if self.precision_defined() {
            self.tp as f64 / (self.tp + self.fp) as f64
        } else {
            0.0
        }
    }

    pub fn precision_defined(&self) -> bool {
        self.tp + self.fp > 0
    }

    /// Zero when there are no positives; see [`Self::recall_defined`].
    pub fn recall(&self) -> f64 {
        if self.recall_defined() {
            self.tp as f64 / (self.tp + self.fn_) as f64
        } else {
            0.0
        }
    }

    pub fn recall_defined(&self) -> bool {
        self.tp + self.fn_ > 0
    }
}

pub fn confusion(pred: &[bool], truth: &GroundTruth) -> Result<ConfusionCounts> {
    if pred.len() != truth.len() {
        return Err(Error::input(format!(
            "{} predictions for {} labels",
            pred.len(),
            truth.len()
        )));
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in pred.iter().zip(truth.as_slice()) {
        match (p, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (outlier, inlier) pairs ranked correctly, ties counting one half.
pub fn roc_auc(scores: &ScoreVector, truth: &GroundTruth) -> Result<f64> {
    let s = scores.as_slice();
    if s.len() != truth.len() {
        return Err(Error::input(format!(
            "{} scores for {} labels",
            s.len(),
            truth.len()
        )));
    }
    if !truth.has_both_classes() {
        return Err(Error::input("ROC AUC needs both outliers and inliers"));
    }
    if let Some(i) = s.iter().position(|v| v.is_nan()) {
        return Err(Error::input(format!("score {i} is NaN")));
    }

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));

    // Twice the number of correctly ordered pairs, so ties stay integral.
    let mut doubled: u128 = 0;
    let mut inliers_below: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u128, 0u128);
        while j < order.len() && s[order[j]] == s[order[i]] {
            if truth[order[j]] {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        doubled += 2 * pos * inliers_below + pos * neg;
        inliers_below += neg;
        i = j;
    }

    let positives = truth.outlier_count() as u128;
    let negatives = truth.len() as u128 - positives;
    Ok(doubled as f64 / (2 * positives * negatives) as f64)
}
