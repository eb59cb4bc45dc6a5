//! Birth-death MCMC over node neighbourhoods.
//!
//! For a target `v`, the chain lives on subsets of `V \ {v}`. From state `N`
//! each candidate `u` is born (if absent) or dies (if present) as a Poisson
//! event whose rate is `1/(p-1)` times a function of the posterior ratio
//! `p(N'|D) / p(N|D)`, where `N'` is `N` with `u` toggled and the posterior is
//! evidence times model-space prior (see [`RateForm`]). Under the default
//! square-root form the process is reversible with respect to the posterior,
//! so holding-time-weighted averages over visited states estimate posterior
//! inclusion probabilities.

mod chain;
mod prior;
mod structure;

pub use chain::{
    inclusion_probabilities, log_rate, run_chain, run_chain_with, ChainConfig, ChainTrace,
    Evidence, EvidenceCache, HoldingTime, RateForm, TraceSample,
};
pub use prior::{log_prior, log_prior_delta};
pub use structure::{learn_structure, learn_structure_flagged, run_chains, InclusionMatrix, StructureFit};
