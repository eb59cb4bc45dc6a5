//! Recovery metrics: confusion counts, F1 and ROC curves over inclusion
//! thresholds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{combine, graph_diff, Graph, NeighbourhoodSet, Rule};
use crate::mcmc::InclusionMatrix;

/// Pair-level confusion counts between an estimated and a true graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// No true edges and no predicted edges: F1 is undefined and reported
    /// as 1 by convention.
    pub fn is_degenerate(&self) -> bool {
        self.tp + self.fp + self.fn_ == 0
    }

    pub fn tpr(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn fpr(&self) -> f64 {
        ratio(self.fp, self.fp + self.tn)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

/// `2TP / (2TP + FP + FN)`, with the all-empty case scored as 1.
pub fn f1(c: &Confusion) -> f64 {
    let den = 2 * c.tp + c.fp + c.fn_;
    if den == 0 {
        1.0
    } else {
        (2 * c.tp) as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

/// ROC points ordered by strictly decreasing threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    /// Truth has no edges (TPR undefined) or no non-edges (FPR undefined);
    /// the affected rate is NaN in every point.
    pub degenerate: bool,
}

impl RocCurve {
    /// Trapezoidal area under the curve, anchored at (0,0) and (1,1).
    /// NaN for degenerate curves.
    pub fn auc(&self) -> f64 {
        if self.degenerate {
            return f64::NAN;
        }
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(self.points.len() + 2);
        pts.push((0.0, 0.0));
        pts.extend(self.points.iter().map(|p| (p.fpr, p.tpr)));
        pts.push((1.0, 1.0));
        pts.windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
            .sum()
    }
}

/// `n` evenly spaced thresholds from 0 to 1 inclusive.
pub fn default_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Thresholds the inclusion matrix row-wise at each grid value
/// (`u ∈ N_v` iff `P(u ∈ N_v) >= t`), combines by `rule`, and scores the
/// resulting graph against `truth`.
pub fn roc(inclusion: &InclusionMatrix, truth: &Graph, rule: Rule, grid: &[f64]) -> Result<RocCurve> {
    if inclusion.p() != truth.p() {
        return Err(Error::invalid(format!(
            "inclusion matrix is {p}x{p} but truth has p={}",
            truth.p(),
            p = inclusion.p()
        )));
    }
    if let Some(t) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::invalid(format!("ROC threshold {t} outside [0,1]")));
    }
    let mut thresholds = grid.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let mut points = Vec::with_capacity(thresholds.len());
    for t in thresholds {
        let est = inclusion.threshold_graph(t, rule)?;
        let c = graph_diff(&est, truth)?;
        points.push(RocPoint {
            threshold: t,
            tpr: c.tpr(),
            fpr: c.fpr(),
        });
    }
    let degenerate = truth.edge_count() == 0 || truth.edge_count() == truth.pair_count();
    Ok(RocCurve { points, degenerate })
}

/// Per-row thresholding helper shared with structure learning.
pub(crate) fn threshold_rows(rows: &[Vec<f64>], threshold: f64) -> Result<Vec<NeighbourhoodSet>> {
    rows.iter()
        .enumerate()
        .map(|(v, row)| {
            let members = row
                .iter()
                .enumerate()
                .filter(|&(u, &x)| u != v && x >= threshold)
                .map(|(u, _)| u);
            NeighbourhoodSet::new(v, members)
        })
        .collect()
}

pub(crate) fn combine_rows(rows: &[Vec<f64>], threshold: f64, rule: Rule) -> Result<Graph> {
    combine(&threshold_rows(rows, threshold)?, rule)
}
