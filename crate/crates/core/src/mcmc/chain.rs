use std::collections::HashMap;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::prior::log_prior_delta;
use crate::error::{Error, Result};
use crate::glm::{fit_node, log_evidence, Dataset, ScoreConfig};

/// How each visited state is weighted in the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum HoldingTime {
    /// Expected holding time `1 / Σ rates` (Rao-Blackwellised).
    #[default]
    Mean,
    /// A draw from the exponential holding-time distribution.
    Sampled,
}

/// Functional form of the birth and death rates.
///
/// Both forms share the `1/(p-1)` normalisation and the same jump targets;
/// they differ in how the posterior ratio `r = p(N'|D) / p(N|D)` of the
/// destination `N'` to the current state `N` enters the rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RateForm {
    /// Rate `sqrt(r) / (p-1)`. Satisfies detailed balance with respect to
    /// the neighbourhood posterior, so holding-time-weighted state
    /// frequencies converge to it.
    #[default]
    Balanced,
    /// Rate `r / (p-1)`. Then `π_x q(x,y) = π_y / (p-1)`, and the process is
    /// reversible with respect to the squared posterior instead.
    Ratio,
}

lowercase_enum_str!(HoldingTime, HoldingTime::Mean => "mean", HoldingTime::Sampled => "sampled");
lowercase_enum_str!(RateForm, RateForm::Balanced => "balanced", RateForm::Ratio => "ratio");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Number of birth/death jumps.
    pub iterations: usize,
    /// Leading jumps whose states are not recorded.
    pub burn_in: usize,
    /// Inclusion cutoff: `u ∈ N_v` iff `P(u ∈ N_v) >= threshold`.
    pub threshold: f64,
    pub seed: u64,
    pub score: ScoreConfig,
    #[serde(default)]
    pub holding: HoldingTime,
    #[serde(default)]
    pub rates: RateForm,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            iterations: 200,
            burn_in: 50,
            threshold: 0.5,
            seed: 0,
            score: ScoreConfig::default(),
            holding: HoldingTime::Mean,
            rates: RateForm::Balanced,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be positive"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::invalid(format!(
                "burn-in {} must be smaller than iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::invalid(format!("threshold {} outside (0,1)", self.threshold)));
        }
        self.score.validate()
    }

    /// Independent RNG stream for the chain of vertex `v`.
    pub fn rng_for(&self, v: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(v as u64);
        rng
    }
}

/// Source of neighbourhood evidence `ln p(D | N_v)` for one target.
pub trait Evidence {
    /// `members` is sorted ascending and excludes the target. Failed or
    /// degenerate fits report `-inf`.
    fn log_evidence(&mut self, members: &[usize]) -> f64;
}

/// GLM-backed evidence with a per-chain memo keyed by the sorted
/// neighbourhood.
pub struct EvidenceCache<'a> {
    data: &'a Dataset,
    target: usize,
    score: ScoreConfig,
    memo: HashMap<Vec<usize>, f64>,
    hits: usize,
}

impl<'a> EvidenceCache<'a> {
    pub fn new(data: &'a Dataset, target: usize, score: ScoreConfig) -> Self {
        EvidenceCache {
            data,
            target,
            score,
            memo: HashMap::new(),
            hits: 0,
        }
    }

    /// Evaluates without consulting or filling the memo.
    pub fn fresh(&self, members: &[usize]) -> f64 {
        fresh_log_evidence(self.data, self.target, members, &self.score)
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    pub fn hits(&self) -> usize {
        self.hits
    }
}

impl Evidence for EvidenceCache<'_> {
    fn log_evidence(&mut self, members: &[usize]) -> f64 {
        if let Some(&le) = self.memo.get(members) {
            self.hits += 1;
            return le;
        }
        let le = self.fresh(members);
        self.memo.insert(members.to_vec(), le);
        le
    }
}

fn fresh_log_evidence(data: &Dataset, target: usize, members: &[usize], score: &ScoreConfig) -> f64 {
    match fit_node(data, target, members) {
        Ok(fit) => log_evidence(&fit, data.n(), data.p(), score),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Log birth (if `u ∉ current`) or death (if `u ∈ current`) rate for vertex
/// `u` in the chain of target `v`.
///
/// Fit failures give `-inf` evidence; a move into such a state has rate 0.
pub fn log_rate(v: usize, current: &[usize], u: usize, data: &Dataset, config: &ChainConfig) -> f64 {
    let mut members = current.to_vec();
    members.sort_unstable();
    members.dedup();
    let evidence = EvidenceCache::new(data, v, config.score);
    let le_current = evidence.fresh(&members);
    let (next, _) = toggled(&members, u);
    let le_next = evidence.fresh(&next);
    let step = Step {
        le_current,
        le_next,
        k_current: members.len(),
        k_next: next.len(),
    };
    step.log_rate(data.p(), config)
}

/// Log posterior ratio between two adjacent neighbourhoods, and the
/// resulting log rate.
struct Step {
    le_current: f64,
    le_next: f64,
    k_current: usize,
    k_next: usize,
}

impl Step {
    fn log_rate(&self, p: usize, config: &ChainConfig) -> f64 {
        if self.le_next == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let log_ratio = (self.le_next - self.le_current)
            + log_prior_delta(self.k_current, self.k_next, p, &config.score);
        let exponent = match config.rates {
            RateForm::Balanced => 0.5 * log_ratio,
            RateForm::Ratio => log_ratio,
        };
        -((p - 1) as f64).ln() + exponent
    }
}

/// `members` with `u` inserted or removed (kept sorted); flag is true for a
/// birth.
fn toggled(members: &[usize], u: usize) -> (Vec<usize>, bool) {
    match members.binary_search(&u) {
        Ok(pos) => {
            let mut next = members.to_vec();
            next.remove(pos);
            (next, false)
        }
        Err(pos) => {
            let mut next = members.to_vec();
            next.insert(pos, u);
            (next, true)
        }
    }
}

/// Log rates of every move out of `members` (index `u`; `-inf` at the target).
pub(crate) fn log_rates<E: Evidence>(
    evidence: &mut E,
    target: usize,
    p: usize,
    members: &[usize],
    le_current: f64,
    config: &ChainConfig,
) -> Vec<f64> {
    (0..p)
        .map(|u| {
            if u == target {
                return f64::NEG_INFINITY;
            }
            let (next, _) = toggled(members, u);
            let step = Step {
                le_current,
                le_next: evidence.log_evidence(&next),
                k_current: members.len(),
                k_next: next.len(),
            };
            step.log_rate(p, config)
        })
        .collect()
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// One recorded state of a chain and its (log) holding time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    /// Sorted neighbourhood members.
    pub members: Vec<usize>,
    pub log_weight: f64,
}

impl TraceSample {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

/// Post-burn-in states of one chain with their holding times.
///
/// Weights are kept on the log scale: a state deep in a posterior mode can
/// have a holding time beyond `f64::MAX`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub target: usize,
    pub samples: Vec<TraceSample>,
    /// Total jumps performed, burn-in included.
    pub jumps: usize,
    /// Distinct neighbourhoods whose evidence was evaluated.
    pub evaluated_states: usize,
}

impl ChainTrace {
    /// Builds a trace from explicit `(members, weight)` pairs.
    pub fn from_weighted(target: usize, samples: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let samples = samples
            .into_iter()
            .map(|(mut members, w)| {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::invalid(format!("holding time {w} is not positive and finite")));
                }
                members.sort_unstable();
                if members.contains(&target) {
                    return Err(Error::invalid(format!("target {target} inside its own neighbourhood")));
                }
                Ok(TraceSample {
                    members,
                    log_weight: w.ln(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let jumps = samples.len();
        Ok(ChainTrace {
            target,
            samples,
            jumps,
            evaluated_states: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sub-trace of the recorded samples in `range`.
    pub fn window(&self, range: Range<usize>) -> ChainTrace {
        ChainTrace {
            target: self.target,
            samples: self.samples[range].to_vec(),
            jumps: self.jumps,
            evaluated_states: self.evaluated_states,
        }
    }

    /// Holding-time-weighted empirical distribution over visited states,
    /// sorted by state.
    pub fn state_frequencies(&self) -> Vec<(Vec<usize>, f64)> {
        let m = self.max_log_weight();
        let mut acc: HashMap<&[usize], f64> = HashMap::new();
        let mut total = 0.0;
        for s in &self.samples {
            let w = (s.log_weight - m).exp();
            *acc.entry(&s.members).or_default() += w;
            total += w;
        }
        let mut out: Vec<(Vec<usize>, f64)> =
            acc.into_iter().map(|(k, w)| (k.to_vec(), w / total)).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Most heavily weighted state.
    pub fn modal_state(&self) -> Option<Vec<usize>> {
        self.state_frequencies()
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(s, _)| s)
    }

    fn max_log_weight(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.log_weight)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Holding-time-weighted inclusion frequency of every vertex in `0..p`.
pub fn inclusion_probabilities(trace: &ChainTrace, p: usize) -> Result<Vec<f64>> {
    if trace.is_empty() {
        return Err(Error::invalid("inclusion probabilities need a non-empty trace"));
    }
    let m = trace.max_log_weight();
    let mut acc = vec![0.0; p];
    let mut total = 0.0;
    for s in &trace.samples {
        let w = (s.log_weight - m).exp();
        total += w;
        for &u in &s.members {
            if u >= p {
                return Err(Error::invalid(format!("trace member {u} out of range for p={p}")));
            }
            acc[u] += w;
        }
    }
    Ok(acc.into_iter().map(|a| (a / total).clamp(0.0, 1.0)).collect())
}

/// Runs the birth-death chain for target `v` from the empty neighbourhood.
pub fn run_chain(v: usize, data: &Dataset, config: &ChainConfig) -> Result<ChainTrace> {
    config.validate()?;
    if v >= data.p() {
        return Err(Error::invalid(format!("target {v} out of range for p={}", data.p())));
    }
    let mut evidence = EvidenceCache::new(data, v, config.score);
    let mut trace = run_chain_with(&mut evidence, v, data.p(), config)?;
    trace.evaluated_states = evidence.len();
    Ok(trace)
}

/// Birth-death chain over subsets of `0..p \ {target}` driven by an
/// arbitrary evidence source.
pub fn run_chain_with<E: Evidence>(
    evidence: &mut E,
    target: usize,
    p: usize,
    config: &ChainConfig,
) -> Result<ChainTrace> {
    config.validate()?;
    if p < 2 {
        return Err(Error::invalid("a birth-death chain needs at least one candidate (p >= 2)"));
    }
    let stuck = |reason: &str| Error::ChainStuck {
        vertex: target,
        reason: reason.to_string(),
    };
    let mut rng = config.rng_for(target);
    let mut members: Vec<usize> = Vec::new();
    let mut samples = Vec::with_capacity(config.iterations - config.burn_in);

    for jump in 0..config.iterations {
        let le_current = evidence.log_evidence(&members);
        if !le_current.is_finite() {
            return Err(stuck(&format!(
                "neighbourhood {members:?} has no finite evidence"
            )));
        }
        let rates = log_rates(evidence, target, p, &members, le_current, config);
        let total = log_sum_exp(&rates);
        if !total.is_finite() {
            return Err(stuck(&format!("all move rates out of {members:?} vanish")));
        }

        let log_weight = match config.holding {
            HoldingTime::Mean => -total,
            HoldingTime::Sampled => {
                let e: f64 = rng.sample(Exp1);
                e.ln() - total
            }
        };
        if jump >= config.burn_in {
            samples.push(TraceSample {
                members: members.clone(),
                log_weight,
            });
        }

        let u = draw_categorical(&mut rng, &rates, total);
        members = toggled(&members, u).0;
    }

    Ok(ChainTrace {
        target,
        samples,
        jumps: config.iterations,
        evaluated_states: 0,
    })
}

/// Index drawn with probability `exp(log_w[i] - log_total)`.
fn draw_categorical(rng: &mut ChaCha8Rng, log_w: &[f64], log_total: f64) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &lw) in log_w.iter().enumerate() {
        if lw == f64::NEG_INFINITY {
            continue;
        }
        acc += (lw - log_total).exp();
        last = i;
        if r < acc {
            return i;
        }
    }
    last
}
