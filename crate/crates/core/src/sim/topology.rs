use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Barabási–Albert preferential attachment with one edge per arriving
/// vertex: a random tree on `p` vertices with a heavy-tailed degree
/// distribution.
pub fn gen_scale_free(p: usize, seed: u64) -> Result<Graph> {
    if p < 2 {
        return Err(Error::invalid(format!("scale-free graph needs p >= 2, got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(p);
    g.add_edge(0, 1)?;
    // each vertex appears once per incident edge, so a uniform pick is
    // degree-proportional
    let mut endpoints = vec![0usize, 1];
    for t in 2..p {
        let target = endpoints[rng.random_range(0..endpoints.len())];
        g.add_edge(t, target)?;
        endpoints.push(t);
        endpoints.push(target);
    }
    Ok(g)
}

/// Erdős–Rényi graph: every pair independently with probability `edge_prob`.
pub fn gen_random(p: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    if !(edge_prob > 0.0 && edge_prob < 1.0) {
        return Err(Error::invalid(format!("edge probability {edge_prob} outside (0,1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(p);
    for u in 0..p {
        for v in u + 1..p {
            if rng.random::<f64>() < edge_prob {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}
