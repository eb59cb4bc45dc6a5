use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_factorial;

/// Distributional family of a variable, fixing its node-conditional model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    /// Linear regression with profiled error variance.
    Gaussian,
    /// Logistic regression; values in {0, 1}.
    Binary,
    /// Poisson log-link regression; non-negative integer values.
    Count,
}

impl VarKind {
    /// Single-letter code used in data headers and kind mixes.
    pub fn code(self) -> char {
        match self {
            VarKind::Gaussian => 'g',
            VarKind::Binary => 'b',
            VarKind::Count => 'c',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'g' => Some(VarKind::Gaussian),
            'b' => Some(VarKind::Binary),
            'c' => Some(VarKind::Count),
            _ => None,
        }
    }

    /// Checks a single value against the kind's support.
    pub fn admits(self, x: f64) -> bool {
        match self {
            VarKind::Gaussian => x.is_finite(),
            VarKind::Binary => x == 0.0 || x == 1.0,
            VarKind::Count => x.is_finite() && x >= 0.0 && x.fract() == 0.0,
        }
    }
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

impl FromStr for VarKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => VarKind::from_code(c),
            _ => None,
        }
        .ok_or_else(|| Error::invalid(format!("unknown variable kind `{s}` (expected g, b or c)")))
    }
}

/// Column-major `n x p` observation matrix with a kind per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    columns: Vec<Vec<f64>>,
    kinds: Vec<VarKind>,
    // sum_i ln(y_i!) per count column, 0 elsewhere
    ln_fact_sums: Vec<f64>,
}

impl Dataset {
    pub fn new(columns: Vec<Vec<f64>>, kinds: Vec<VarKind>) -> Result<Self> {
        if columns.len() != kinds.len() {
            return Err(Error::invalid(format!(
                "{} columns but {} kinds",
                columns.len(),
                kinds.len()
            )));
        }
        let n = columns.first().map_or(0, Vec::len);
        for (j, (col, &kind)) in columns.iter().zip(&kinds).enumerate() {
            if col.len() != n {
                return Err(Error::invalid(format!(
                    "column {j} has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|&x| !kind.admits(x)) {
                return Err(Error::invalid(format!(
                    "column {j} ({kind}) row {i}: value {} outside support",
                    col[i]
                )));
            }
        }
        let ln_fact_sums = columns
            .iter()
            .zip(&kinds)
            .map(|(col, kind)| match kind {
                VarKind::Count => col.iter().map(|&y| ln_factorial(y as u64)).sum(),
                _ => 0.0,
            })
            .collect();
        Ok(Dataset {
            n,
            columns,
            kinds,
            ln_fact_sums,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn kind(&self, j: usize) -> VarKind {
        self.kinds[j]
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    pub(crate) fn ln_fact_sum(&self, j: usize) -> f64 {
        self.ln_fact_sums[j]
    }

    /// Value at row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    /// Keeps the first `n` rows.
    pub fn head(&self, n: usize) -> Dataset {
        let columns = self.columns.iter().map(|c| c[..n.min(self.n)].to_vec()).collect();
        Dataset::new(columns, self.kinds.clone()).expect("prefix of a valid dataset is valid")
    }
}
