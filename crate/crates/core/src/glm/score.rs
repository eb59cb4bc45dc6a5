
use serde::{Deserialize, Serialize};

use super::fit::GlmFit;
use crate::error::{Error, Result};
use crate::special::ln_binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Bic,
    Ebic,
}

/// Model-space prior over neighbourhoods of size `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prior {
    /// `p(M) ∝ a^k`.
    Dm,
    /// `p(M) ∝ exp(-a (ln C(p-1, k) + 2 ln k))`.
    Ny,
    /// `p(M) = a^k (1-a)^(p-1-k)`.
    Sb,
}

lowercase_enum_str!(Criterion, Criterion::Bic => "bic", Criterion::Ebic => "ebic");
lowercase_enum_str!(Prior, Prior::Dm => "dm", Prior::Ny => "ny", Prior::Sb => "sb");

/// Evidence criterion and model-space prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    pub criterion: Criterion,
    /// EBIC weight in `[0, 1]`; ignored under BIC.
    pub gamma: f64,
    pub prior: Prior,
    pub prior_a: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            criterion: Criterion::Ebic,
            gamma: 0.5,
            prior: Prior::Dm,
            prior_a: 0.5,
        }
    }
}

impl ScoreConfig {
    pub fn new(criterion: Criterion, gamma: f64, prior: Prior, prior_a: f64) -> Result<Self> {
        let cfg = ScoreConfig {
            criterion,
            gamma,
            prior,
            prior_a,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!("gamma {} outside [0,1]", self.gamma)));
        }
        let a = self.prior_a;
        let ok = match self.prior {
            Prior::Dm => a > 0.0 && a <= 1.0,
            Prior::Ny => (0.0..=1.0).contains(&a),
            Prior::Sb => a > 0.0 && a < 1.0,
        };
        if !ok {
            return Err(Error::invalid(format!(
                "prior parameter a={a} outside the admissible range for the {} prior",
                self.prior
            )));
        }
        Ok(())
    }
}

/// BIC (or EBIC) of a node-conditional fit, with model dimension `k + 1`.
///
/// EBIC adds `2 γ ln C(p-1, k)`: the number of same-size neighbourhoods among
/// the `p - 1` candidates. Non-converged fits score `+inf`.
pub fn score(fit: &GlmFit, n: usize, p: usize, config: &ScoreConfig) -> f64 {
    if !fit.converged || !fit.loglik.is_finite() {
        return f64::INFINITY;
    }
    let d = (fit.k + 1) as f64;
    let bic = -2.0 * fit.loglik + d * (n as f64).ln();
    match config.criterion {
        Criterion::Bic => bic,
        Criterion::Ebic => {
            let candidates = p.saturating_sub(1) as u64;
            bic + 2.0 * config.gamma * ln_binomial(candidates, fit.k as u64)
        }
    }
}

/// `ln p(D | M) ≈ -score / 2`.
pub fn log_evidence(fit: &GlmFit, n: usize, p: usize, config: &ScoreConfig) -> f64 {
    -score(fit, n, p, config) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(loglik: f64, k: usize) -> GlmFit {
        GlmFit {
            coefficients: vec![0.0; k + 1],
            loglik,
            k,
            converged: true,
            iterations: 1,
        }
    }

    fn bic() -> ScoreConfig {
        ScoreConfig::new(Criterion::Bic, 0.0, Prior::Dm, 0.5).unwrap()
    }

    fn ebic(gamma: f64) -> ScoreConfig {
        ScoreConfig::new(Criterion::Ebic, gamma, Prior::Dm, 0.5).unwrap()
    }

    #[test]
    fn bic_arithmetic() {
        let s = score(&fit(-10.0, 2), 100, 11, &bic());
        assert!((s - (20.0 + 3.0 * 100f64.ln())).abs() < 1e-12);
        assert!((s - 33.8155).abs() < 1e-4);
        assert!((log_evidence(&fit(-10.0, 2), 100, 11, &bic()) + 16.9078).abs() < 1e-4);
    }

    #[test]
    fn ebic_arithmetic() {
        let s = score(&fit(-10.0, 2), 100, 11, &ebic(1.0));
        assert!((s - (20.0 + 3.0 * 100f64.ln() + 2.0 * 45f64.ln())).abs() < 1e-12);
        assert!((s - 41.429).abs() < 1e-3);
    }

    #[test]
    fn ebic_gamma_zero_is_bic_bitwise() {
        for (ll, k, n, p) in [(-10.0, 2, 100, 11), (-3.7, 0, 17, 4), (-1234.5, 7, 1000, 30)] {
            let f = fit(ll, k);
            assert_eq!(score(&f, n, p, &ebic(0.0)).to_bits(), score(&f, n, p, &bic()).to_bits());
        }
    }

    #[test]
    fn penalty_strictly_increasing_in_k() {
        for cfg in [bic(), ebic(0.5), ebic(1.0)] {
            for k in 0..8 {
                let a = score(&fit(-50.0, k), 200, 10, &cfg);
                let b = score(&fit(-50.0, k + 1), 200, 10, &cfg);
                assert!(b > a, "k={k} {cfg:?}");
            }
        }
    }

    #[test]
    fn non_converged_scores_infinite() {
        let mut f = fit(-1.0, 1);
        f.converged = false;
        assert_eq!(score(&f, 10, 3, &bic()), f64::INFINITY);
        assert_eq!(log_evidence(&f, 10, 3, &bic()), f64::NEG_INFINITY);
    }

    #[test]
    fn config_validation() {
        assert!(ScoreConfig::new(Criterion::Ebic, 1.5, Prior::Dm, 0.5).is_err());
        assert!(ScoreConfig::new(Criterion::Ebic, 0.5, Prior::Dm, 0.0).is_err());
        assert!(ScoreConfig::new(Criterion::Ebic, 0.5, Prior::Dm, 1.0).is_ok());
        assert!(ScoreConfig::new(Criterion::Ebic, 0.5, Prior::Ny, 0.0).is_ok());
        assert!(ScoreConfig::new(Criterion::Ebic, 0.5, Prior::Sb, 1.0).is_err());
        assert!(ScoreConfig::new(Criterion::Ebic, 0.5, Prior::Sb, 0.0).is_err());
        assert_eq!("EBIC".parse::<Criterion>().unwrap(), Criterion::Ebic);
        assert_eq!("sb".parse::<Prior>().unwrap(), Prior::Sb);
        assert!("flat".parse::<Prior>().is_err());
    }
}
