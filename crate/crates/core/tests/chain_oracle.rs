//! Birth-death chains on a p=4 mixed dataset against the exactly enumerated
//! neighbourhood posterior.

use mixnet_core::{
    fit_node, inclusion_probabilities, log_evidence, log_prior, log_rate, run_chain, ChainConfig, Dataset,
    ScoreConfig, VarKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Normal, Poisson};

const P: usize = 4;

fn mixed_data(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let (mut x0, mut x1, mut b, mut c) = (vec![], vec![], vec![], vec![]);
    for _ in 0..n {
        let a: f64 = normal.sample(&mut rng);
        let z = 0.6 * a + 0.8 * normal.sample(&mut rng);
        let bit = Bernoulli::new(1.0 / (1.0 + (-1.2 * z).exp())).unwrap().sample(&mut rng);
        let bf = bit as u8 as f64;
        x0.push(a);
        x1.push(z);
        b.push(bf);
        c.push(Poisson::new((0.3 + 0.7 * bf).exp()).unwrap().sample(&mut rng));
    }
    Dataset::new(
        vec![x0, x1, b, c],
        vec![VarKind::Gaussian, VarKind::Gaussian, VarKind::Binary, VarKind::Count],
    )
    .unwrap()
}

fn others(v: usize) -> Vec<usize> {
    (0..P).filter(|&u| u != v).collect()
}

fn state(v: usize, mask: usize) -> Vec<usize> {
    others(v).into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, u)| u).collect()
}

/// Normalised log posterior over the 8 neighbourhoods of `v`, by mask.
fn exact_log_posterior(data: &Dataset, v: usize, score: &ScoreConfig) -> Vec<f64> {
    let raw: Vec<f64> = (0..1usize << (P - 1))
        .map(|mask| {
            let members = state(v, mask);
            match fit_node(data, v, &members) {
                Ok(fit) => log_evidence(&fit, data.n(), P, score) + log_prior(members.len(), P, score),
                Err(_) => f64::NEG_INFINITY,
            }
        })
        .collect();
    let m = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lz = m + raw.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
    raw.into_iter().map(|x| x - lz).collect()
}

#[test]
fn chain_reproduces_exact_posterior() {
    let data = mixed_data(60, 4);
    let cfg = ChainConfig {
        iterations: 5000,
        burn_in: 100,
        seed: 21,
        ..ChainConfig::default()
    };
    for v in 0..P {
        let exact: Vec<f64> = exact_log_posterior(&data, v, &cfg.score).iter().map(|x| x.exp()).collect();
        let trace = run_chain(v, &data, &cfg).unwrap();
        let freq = trace.state_frequencies();
        let mut tv = 0.0;
        for (mask, &pe) in exact.iter().enumerate() {
            let members = state(v, mask);
            let pc = freq.iter().find(|(s, _)| *s == members).map_or(0.0, |(_, f)| *f);
            tv += 0.5 * (pe - pc).abs();
        }
        assert!(tv < 0.05, "vertex {v}: TV {tv}");

        let incl = inclusion_probabilities(&trace, P).unwrap();
        for (i, u) in others(v).into_iter().enumerate() {
            let pe: f64 = exact.iter().enumerate().filter(|(m, _)| m >> i & 1 == 1).map(|(_, p)| p).sum();
            assert!((incl[u] - pe).abs() < 0.05, "P({u} in N_{v}): chain {} exact {pe}", incl[u]);
        }
    }
}

#[test]
fn rates_balance_the_exact_posterior() {
    let data = mixed_data(60, 4);
    let cfg = ChainConfig::default();
    for v in 0..P {
        let log_pi = exact_log_posterior(&data, v, &cfg.score);
        let mut checked = 0;
        for mask in 0..1usize << (P - 1) {
            for bit in 0..P - 1 {
                let next = mask ^ (1 << bit);
                let u = others(v)[bit];
                let forward = log_rate(v, &state(v, mask), u, &data, &cfg);
                let backward = log_rate(v, &state(v, next), u, &data, &cfg);
                if !(log_pi[mask].is_finite() && log_pi[next].is_finite()) {
                    continue;
                }
                let gap = log_pi[mask] + forward - log_pi[next] - backward;
                assert!(gap.abs() < 1e-10, "vertex {v}, {mask:03b} <-> {next:03b}: {gap}");
                checked += 1;
            }
        }
        assert_eq!(checked, 24);
    }
}
