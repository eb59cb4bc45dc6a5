//! Binary-only Gibbs output against exhaustive enumeration of the Ising joint.

use mixnet_core::sim::{gen_random, gibbs_sample, EdgeParam};
use mixnet_core::{Graph, MixedModelSpec, VarKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact probabilities of every state, indexed by the bitmask of ones.
fn ising_joint(spec: &MixedModelSpec) -> Vec<f64> {
    let p = spec.p();
    let energy = |s: usize| -> f64 {
        let bit = |v: usize| ((s >> v) & 1) as f64;
        let node: f64 = (0..p).map(|v| spec.node_params[v] * bit(v)).sum();
        let pair: f64 = spec.edge_params.iter().map(|e| e.theta_uv * bit(e.u) * bit(e.v)).sum();
        node + pair
    };
    let w: Vec<f64> = (0..1usize << p).map(|s| energy(s).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn empirical_joint(spec: &MixedModelSpec, n: usize, seed: u64) -> Vec<f64> {
    let p = spec.p();
    let data = gibbs_sample(spec, n, 1000, 1, seed).unwrap();
    let mut counts = vec![0.0; 1 << p];
    for i in 0..n {
        let s = (0..p).fold(0, |acc, v| acc | ((data.get(i, v) as usize) << v));
        counts[s] += 1.0;
    }
    counts.into_iter().map(|c| c / n as f64).collect()
}

fn random_ising(graph: Graph, seed: u64) -> MixedModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = graph.p();
    let node = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
    let edges = graph.edges().map(|(u, v)| EdgeParam::symmetric(u, v, rng.random_range(-1.5..1.5))).collect();
    MixedModelSpec::new(graph, vec![VarKind::Binary; p], node, edges, vec![0.0; p]).unwrap()
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[test]
fn chain_of_three_marginals_match_enumeration() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let spec = MixedModelSpec::new(
        g,
        vec![VarKind::Binary; 3],
        vec![-0.5, 0.3, 0.2],
        vec![EdgeParam::symmetric(0, 1, 1.2), EdgeParam::symmetric(1, 2, -0.8)],
        vec![0.0; 3],
    )
    .unwrap();
    let exact = ising_joint(&spec);
    let emp = empirical_joint(&spec, 100_000, 11);
    for v in 0..3 {
        let marg = |j: &[f64]| -> f64 { (0..8).filter(|s| s >> v & 1 == 1).map(|s| j[s]).sum() };
        let (e, m) = (marg(&exact), marg(&emp));
        assert!((e - m).abs() < 0.02, "vertex {v}: exact {e} empirical {m}");
    }
    assert!(total_variation(&exact, &emp) < 0.03);
}

#[test]
fn small_random_ising_joints_match_enumeration() {
    for (p, seed) in [(3, 1), (3, 2), (4, 3), (4, 4)] {
        let spec = random_ising(gen_random(p, 0.7, seed).unwrap(), seed);
        let tv = total_variation(&ising_joint(&spec), &empirical_joint(&spec, 100_000, seed));
        assert!(tv < 0.03, "p={p} seed {seed}: TV {tv}");
    }
}
