//! Node-conditional exponential-family regressions and their BIC / EBIC
//! evidence scores.

mod dataset;
mod fit;
mod score;

pub use dataset::{Dataset, VarKind};
pub use fit::{
    conditional_gradient, conditional_loglik, fit_node, GlmFit, COEF_CLAMP, IRLS_RIDGE,
    IRLS_TOLERANCE, MAX_IRLS_ITERATIONS, VARIANCE_FLOOR,
};
pub use score::{log_evidence, score, Criterion, Prior, ScoreConfig};
