use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::{inclusion_probabilities, run_chain, ChainConfig, ChainTrace};
use crate::error::{Error, Result};
use crate::eval::combine_rows;
use crate::glm::Dataset;
use crate::graph::{Graph, Rule};

/// `p x p` posterior inclusion probabilities; row `v` holds `P(u ∈ N_v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionMatrix {
    rows: Vec<Vec<f64>>,
}

impl InclusionMatrix {
    pub fn zeros(p: usize) -> Self {
        InclusionMatrix {
            rows: vec![vec![0.0; p]; p],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = rows.len();
        for (v, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::invalid(format!(
                    "inclusion row {v} has {} entries, expected {p}",
                    row.len()
                )));
            }
            if let Some(x) = row.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(Error::invalid(format!("inclusion row {v}: {x} outside [0,1]")));
            }
            if row[v] != 0.0 {
                return Err(Error::invalid(format!("inclusion diagonal ({v},{v}) must be 0")));
            }
        }
        Ok(InclusionMatrix { rows })
    }

    pub fn p(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, v: usize, u: usize) -> f64 {
        self.rows[v][u]
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.rows[v]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub(crate) fn set_row(&mut self, v: usize, mut row: Vec<f64>) {
        row[v] = 0.0;
        self.rows[v] = row;
    }

    /// Graph from thresholding each row (`>= threshold`) and combining by
    /// `rule`.
    pub fn threshold_graph(&self, threshold: f64, rule: Rule) -> Result<Graph> {
        combine_rows(&self.rows, threshold, rule)
    }
}

/// Runs one chain per vertex, in parallel on the current rayon pool.
/// Results are in vertex order and independent of the thread count.
pub fn run_chains(data: &Dataset, config: &ChainConfig) -> Vec<Result<ChainTrace>> {
    (0..data.p())
        .into_par_iter()
        .map(|v| run_chain(v, data, config))
        .collect()
}

/// Learns the graph: one birth-death chain per vertex, inclusion
/// probabilities thresholded at `config.threshold`, then combined by `rule`.
/// Fails on the first stuck chain.
pub fn learn_structure(data: &Dataset, config: &ChainConfig, rule: Rule) -> Result<(Graph, InclusionMatrix)> {
    let fit = learn_structure_flagged(data, config, rule)?;
    match fit.stuck.into_iter().next() {
        Some((_, err)) => Err(err),
        None => Ok((fit.graph, fit.inclusion)),
    }
}

/// Result of [`learn_structure_flagged`].
#[derive(Debug, Clone, PartialEq)]
pub struct StructureFit {
    pub graph: Graph,
    pub inclusion: InclusionMatrix,
    /// Accepted jumps per vertex chain (0 for stuck vertices).
    pub jumps: Vec<usize>,
    /// Vertices whose chain could not move, with the reason. Their inclusion
    /// rows are all zero.
    pub stuck: Vec<(usize, Error)>,
}

/// Like [`learn_structure`], but a stuck chain only zeroes and flags its own
/// row. Any other error still aborts.
pub fn learn_structure_flagged(data: &Dataset, config: &ChainConfig, rule: Rule) -> Result<StructureFit> {
    config.validate()?;
    let p = data.p();
    if p < 2 {
        return Err(Error::invalid("structure learning needs p >= 2"));
    }
    let mut inclusion = InclusionMatrix::zeros(p);
    let mut jumps = vec![0; p];
    let mut stuck = Vec::new();
    for (v, trace) in run_chains(data, config).into_iter().enumerate() {
        match trace {
            Ok(trace) => {
                jumps[v] = trace.jumps;
                inclusion.set_row(v, inclusion_probabilities(&trace, p)?);
            }
            Err(err @ Error::ChainStuck { .. }) => stuck.push((v, err)),
            Err(err) => return Err(err),
        }
    }
    let graph = inclusion.threshold_graph(config.threshold, rule)?;
    Ok(StructureFit {
        graph,
        inclusion,
        jumps,
        stuck,
    })
}
