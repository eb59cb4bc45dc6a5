use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::glm::VarKind;
use crate::graph::Graph;

/// Added to the absolute row sum when setting Gaussian diagonals.
pub const DIAGONAL_MARGIN: f64 = 0.1;

/// Interaction on edge `{u, v}`, `u < v`, as it enters each endpoint's
/// conditional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeParam {
    pub u: usize,
    pub v: usize,
    /// Coefficient of `w_v` in the conditional of `u`.
    pub theta_uv: f64,
    /// Coefficient of `w_u` in the conditional of `v`.
    pub theta_vu: f64,
}

impl EdgeParam {
    pub fn symmetric(u: usize, v: usize, theta: f64) -> Self {
        EdgeParam {
            u,
            v,
            theta_uv: theta,
            theta_vu: theta,
        }
    }
}

/// Parameters of a pairwise local mixed model on `graph`.
///
/// Node `v` has conditional natural parameter
/// `eta_v = node_params[v] + Σ_j theta_vj w_j`. Gaussian nodes additionally
/// carry a conditional precision `gaussian_precision[v]`, giving the
/// conditional `N(eta_v / K_vv, 1 / K_vv)`; Gaussian pairs interact
/// symmetrically and the joint precision has `K_uv = -theta_uv`.
///
/// The model is specified through its node conditionals only, so an edge may
/// carry different coefficients in its two endpoints' conditionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedModelSpec {
    pub graph: Graph,
    pub kinds: Vec<VarKind>,
    pub node_params: Vec<f64>,
    /// One entry per graph edge, sorted like `graph.edges()`.
    pub edge_params: Vec<EdgeParam>,
    /// `K_vv` for Gaussian nodes; ignored (and 0) for the others.
    pub gaussian_precision: Vec<f64>,
}

impl MixedModelSpec {
    pub fn new(
        graph: Graph,
        kinds: Vec<VarKind>,
        node_params: Vec<f64>,
        mut edge_params: Vec<EdgeParam>,
        gaussian_precision: Vec<f64>,
    ) -> Result<Self, SimError> {
        for e in edge_params.iter_mut() {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
                std::mem::swap(&mut e.theta_uv, &mut e.theta_vu);
            }
        }
        edge_params.sort_by_key(|e| (e.u, e.v));
        let spec = MixedModelSpec {
            graph,
            kinds,
            node_params,
            edge_params,
            gaussian_precision,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn p(&self) -> usize {
        self.graph.p()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let p = self.p();
        let bad = |m: String| Err(SimError::InvalidSpec(m));
        if self.kinds.len() != p || self.node_params.len() != p || self.gaussian_precision.len() != p {
            return bad(format!(
                "per-vertex vectors must have length p={p} (kinds {}, node params {}, precisions {})",
                self.kinds.len(),
                self.node_params.len(),
                self.gaussian_precision.len()
            ));
        }
        let keys: Vec<(usize, usize)> = self.edge_params.iter().map(|e| (e.u, e.v)).collect();
        if !keys.iter().copied().eq(self.graph.edges()) {
            return bad("edge parameters must be keyed exactly by the graph edges".into());
        }
        for e in &self.edge_params {
            if !(e.theta_uv.is_finite() && e.theta_vu.is_finite()) {
                return bad(format!("non-finite interaction on {{{},{}}}", e.u, e.v));
            }
            let gaussian_pair = self.kinds[e.u] == VarKind::Gaussian && self.kinds[e.v] == VarKind::Gaussian;
            if gaussian_pair && e.theta_uv != e.theta_vu {
                return bad(format!("Gaussian pair {{{},{}}} must interact symmetrically", e.u, e.v));
            }
        }
        if let Some(v) = self.node_params.iter().position(|x| !x.is_finite()) {
            return bad(format!("non-finite node parameter at {v}"));
        }
        for v in 0..p {
            if self.kinds[v] == VarKind::Gaussian && !(self.gaussian_precision[v] > 0.0) {
                return bad(format!("Gaussian vertex {v} needs a positive conditional precision"));
            }
        }
        Ok(())
    }

    pub fn is_gaussian_only(&self) -> bool {
        self.kinds.iter().all(|&k| k == VarKind::Gaussian)
    }

    /// Coefficient of `w_v` in the conditional of `u` (0 off the graph).
    pub fn theta(&self, u: usize, v: usize) -> f64 {
        let key = if u < v { (u, v) } else { (v, u) };
        match self.edge_params.binary_search_by_key(&key, |e| (e.u, e.v)) {
            Ok(i) if u < v => self.edge_params[i].theta_uv,
            Ok(i) => self.edge_params[i].theta_vu,
            Err(_) => 0.0,
        }
    }

    /// Per-node lists of `(neighbour, coefficient in this node's conditional)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.p()];
        for e in &self.edge_params {
            adj[e.u].push((e.v, e.theta_uv));
            adj[e.v].push((e.u, e.theta_vu));
        }
        adj
    }

    /// Joint precision matrix of a Gaussian-only spec.
    pub fn precision_matrix(&self) -> Result<DMatrix<f64>, SimError> {
        if !self.is_gaussian_only() {
            return Err(SimError::InvalidSpec(
                "a precision matrix exists only for Gaussian-only specs".into(),
            ));
        }
        let p = self.p();
        let mut k = DMatrix::zeros(p, p);
        for v in 0..p {
            k[(v, v)] = self.gaussian_precision[v];
        }
        for e in &self.edge_params {
            k[(e.u, e.v)] = -e.theta_uv;
            k[(e.v, e.u)] = -e.theta_vu;
        }
        Ok(k)
    }
}

/// Draws node and edge parameters from the standard normal.
///
/// Interactions with a count vertex are constrained so the Gibbs sampler
/// cannot run away: count-count edges get `-|z|` in both conditionals; a
/// Gaussian-count edge gets `-|z|` in the count conditional and `+|z|` in the
/// Gaussian one, which turns the Gaussian/count loop into negative
/// feedback. Gaussian vertices get conditional precision
/// `Σ_j |theta_vj| + 0.1` over all their edges, which makes the Gaussian
/// block strictly diagonally dominant and hence positive definite.
pub fn gen_spec(graph: &Graph, kinds: &[VarKind], seed: u64) -> Result<MixedModelSpec, SimError> {
    let p = graph.p();
    if kinds.len() != p {
        return Err(SimError::InvalidSpec(format!(
            "{} kinds for a graph on {p} vertices",
            kinds.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };

    let node_params: Vec<f64> = (0..p).map(|_| draw()).collect();
    let edge_params: Vec<EdgeParam> = graph
        .edges()
        .map(|(u, v)| {
            let z = draw();
            let (theta_uv, theta_vu) = match (kinds[u], kinds[v]) {
                (VarKind::Count, VarKind::Count) => (-z.abs(), -z.abs()),
                (VarKind::Gaussian, VarKind::Count) => (z.abs(), -z.abs()),
                (VarKind::Count, VarKind::Gaussian) => (-z.abs(), z.abs()),
                _ => (z, z),
            };
            EdgeParam { u, v, theta_uv, theta_vu }
        })
        .collect();

    let mut row_sums = vec![0.0; p];
    for e in &edge_params {
        row_sums[e.u] += e.theta_uv.abs();
        row_sums[e.v] += e.theta_vu.abs();
    }
    let gaussian_precision = (0..p)
        .map(|v| match kinds[v] {
            VarKind::Gaussian => row_sums[v] + DIAGONAL_MARGIN,
            _ => 0.0,
        })
        .collect();

    MixedModelSpec::new(graph.clone(), kinds.to_vec(), node_params, edge_params, gaussian_precision)
}
