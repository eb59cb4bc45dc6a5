use crate::glm::{Prior, ScoreConfig};
use crate::special::ln_binomial;

/// Unnormalised log prior of a neighbourhood of size `k` among `p - 1`
/// candidates.
///
/// The NY complexity term `ln C(p-1,k) + 2 ln k` is taken as 0 at `k = 0`.
pub fn log_prior(k: usize, p: usize, config: &ScoreConfig) -> f64 {
    let a = config.prior_a;
    let candidates = p.saturating_sub(1);
    match config.prior {
        Prior::Dm => k as f64 * a.ln(),
        Prior::Ny => {
            if k == 0 {
                0.0
            } else {
                -a * (ln_binomial(candidates as u64, k as u64) + 2.0 * (k as f64).ln())
            }
        }
        Prior::Sb => k as f64 * a.ln() + (candidates - k) as f64 * (1.0 - a).ln(),
    }
}

/// `log_prior(k_to) - log_prior(k_from)` for `|k_to - k_from| = 1`.
///
/// DM and SB ratios are evaluated in closed form, so a flat prior (DM with
/// `a = 1`, SB with `a = 1/2`) contributes exactly zero.
pub fn log_prior_delta(k_from: usize, k_to: usize, p: usize, config: &ScoreConfig) -> f64 {
    debug_assert!(k_from.abs_diff(k_to) == 1);
    let a = config.prior_a;
    let birth = match config.prior {
        Prior::Dm => a.ln(),
        Prior::Sb => a.ln() - (1.0 - a).ln(),
        Prior::Ny => {
            let lo = k_from.min(k_to);
            log_prior(lo + 1, p, config) - log_prior(lo, p, config)
        }
    };
    if k_to > k_from {
        birth
    } else {
        -birth
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glm::Criterion;

    fn cfg(prior: Prior, a: f64) -> ScoreConfig {
        ScoreConfig::new(Criterion::Ebic, 0.5, prior, a).unwrap()
    }

    #[test]
    fn dm_formula() {
        let lp = log_prior(3, 10, &cfg(Prior::Dm, 0.5));
        assert!((lp - 3.0 * 0.5f64.ln()).abs() < 1e-15);
        assert!((lp + 2.0794).abs() < 1e-4);
    }

    #[test]
    fn sb_half_is_uniform() {
        let c = cfg(Prior::Sb, 0.5);
        for p in [2usize, 5, 12] {
            for k in 0..p {
                let lp = log_prior(k, p, &c);
                assert!((lp - (p - 1) as f64 * 0.5f64.ln()).abs() < 1e-12);
            }
            for k in 0..p - 1 {
                assert_eq!(log_prior_delta(k, k + 1, p, &c), 0.0);
                assert_eq!(log_prior_delta(k + 1, k, p, &c), 0.0);
            }
        }
    }

    #[test]
    fn ny_small_k_convention() {
        let c = cfg(Prior::Ny, 1.0);
        assert_eq!(log_prior(0, 7, &c), 0.0);
        assert!((log_prior(1, 7, &c) + 6f64.ln()).abs() < 1e-14);
        let k2 = -(15f64.ln() + 2.0 * 2f64.ln());
        assert!((log_prior(2, 7, &c) - k2).abs() < 1e-12);
    }

    #[test]
    fn delta_matches_difference() {
        for (prior, a) in [(Prior::Dm, 0.3), (Prior::Ny, 0.5), (Prior::Sb, 0.2)] {
            let c = cfg(prior, a);
            for k in 0..6 {
                let d = log_prior(k + 1, 7, &c) - log_prior(k, 7, &c);
                assert!((log_prior_delta(k, k + 1, 7, &c) - d).abs() < 1e-12);
                assert!((log_prior_delta(k + 1, k, 7, &c) + d).abs() < 1e-12);
            }
        }
    }
}
