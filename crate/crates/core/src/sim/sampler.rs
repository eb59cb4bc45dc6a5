use nalgebra::{Cholesky, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::spec::MixedModelSpec;
use super::SimError;
use crate::glm::{Dataset, VarKind};

/// Poisson conditional means are capped at `exp(COUNT_LOG_MEAN_CAP)`.
pub const COUNT_LOG_MEAN_CAP: f64 = 12.0;

/// Default Gibbs schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GibbsConfig {
    pub burn_in: usize,
    pub thin: usize,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            burn_in: 1000,
            thin: 10,
        }
    }
}

/// `n` iid draws from `N(0, K^{-1})` for a Gaussian-only spec.
pub fn sample_gaussian(spec: &MixedModelSpec, n: usize, seed: u64) -> Result<Dataset, SimError> {
    let k = spec.precision_matrix()?;
    let p = spec.p();
    let chol = Cholesky::new(k).ok_or(SimError::NotPositiveDefinite)?;
    // K = L L^T, so x = L^{-T} z has covariance K^{-1}.
    let lt = chol.l().transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = vec![Vec::with_capacity(n); p];
    for _ in 0..n {
        let z = DVector::from_fn(p, |_, _| StandardNormal.sample(&mut rng));
        let x = lt
            .solve_upper_triangular(&z)
            .ok_or(SimError::NotPositiveDefinite)?;
        for (col, xi) in columns.iter_mut().zip(x.iter()) {
            col.push(*xi);
        }
    }
    Dataset::new(columns, spec.kinds.clone()).map_err(|e| SimError::InvalidSpec(e.to_string()))
}

/// Single-site Gibbs sampler over the node conditionals of `spec`.
///
/// Starts from all zeros, discards `burn_in` sweeps, then keeps every
/// `thin`-th sweep until `n` rows are collected.
pub fn gibbs_sample(
    spec: &MixedModelSpec,
    n: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<Dataset, SimError> {
    spec.validate()?;
    if burn_in == 0 || thin == 0 {
        return Err(SimError::InvalidSpec("burn-in and thinning must be at least 1".into()));
    }
    let p = spec.p();
    let adj = spec.adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = vec![0.0; p];
    let mut columns = vec![Vec::with_capacity(n); p];

    let total_sweeps = burn_in + n * thin;
    for sweep in 1..=total_sweeps {
        for v in 0..p {
            let eta = spec.node_params[v] + adj[v].iter().map(|&(j, t)| t * state[j]).sum::<f64>();
            let diverged = |reason: String| SimError::Divergent {
                vertex: v,
                sweep,
                reason,
            };
            if !eta.is_finite() {
                return Err(diverged(format!("natural parameter {eta}")));
            }
            state[v] = match spec.kinds[v] {
                VarKind::Gaussian => {
                    let prec = spec.gaussian_precision[v];
                    let z: f64 = StandardNormal.sample(&mut rng);
                    eta / prec + z / prec.sqrt()
                }
                VarKind::Binary => {
                    let prob = 1.0 / (1.0 + (-eta).exp());
                    if rng.random::<f64>() < prob {
                        1.0
                    } else {
                        0.0
                    }
                }
                VarKind::Count => {
                    let mean = eta.min(COUNT_LOG_MEAN_CAP).exp();
                    if mean < f64::MIN_POSITIVE {
                        0.0
                    } else {
                        Poisson::new(mean)
                            .map_err(|e| diverged(format!("Poisson mean {mean}: {e}")))?
                            .sample(&mut rng)
                    }
                }
            };
        }
        if sweep > burn_in && (sweep - burn_in) % thin == 0 {
            for (col, &x) in columns.iter_mut().zip(&state) {
                col.push(x);
            }
        }
    }
    Dataset::new(columns, spec.kinds.clone()).map_err(|e| SimError::InvalidSpec(e.to_string()))
}
