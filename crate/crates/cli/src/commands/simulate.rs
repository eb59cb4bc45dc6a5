use std::path::Path;
use std::time::Instant;

use mixnet_core::sim::{derive_seed, gen_random, gen_scale_free, gen_spec, gibbs_sample, sample_gaussian};
use mixnet_core::{Dataset, Graph, MixedModelSpec, VarKind};
use rayon::prelude::*;

use super::prepare_out_dir;
use crate::args::{SimulateArgs, Topology};
use crate::error::{CliError, Result};
use crate::io::{self, Table};
use crate::manifest::{RunManifest, MANIFEST_FILE};

pub const TRUTH_FILE: &str = "truth.tsv";
pub const SPEC_FILE: &str = "spec.json";

/// Name of the data file for replicate `rep` (0-based).
pub fn data_file(rep: usize) -> String {
    format!("data_{:03}.csv", rep + 1)
}

/// Expands a kind mix such as `g25b15c10` into per-vertex kinds, in order.
pub fn parse_kind_mix(mix: &str, p: usize) -> Result<Vec<VarKind>> {
    let bad = |why: String| CliError::Usage(format!("--kinds `{mix}`: {why}"));
    let mut kinds = Vec::with_capacity(p);
    let mut chars = mix.chars().peekable();
    while let Some(c) = chars.next() {
        let kind = VarKind::from_code(c).ok_or_else(|| bad(format!("unknown kind `{c}`")))?;
        let mut digits = String::new();
        while let Some(d) = chars.next_if(char::is_ascii_digit) {
            digits.push(d);
        }
        let count: usize = digits.parse().map_err(|_| bad(format!("`{c}` needs a count")))?;
        kinds.extend(std::iter::repeat_n(kind, count));
    }
    if kinds.len() != p {
        return Err(bad(format!("describes {} variables but --p is {p}", kinds.len())));
    }
    Ok(kinds)
}

pub struct Simulation {
    pub graph: Graph,
    pub spec: MixedModelSpec,
    pub datasets: Vec<Dataset>,
}

/// Draws the graph (seed stream 0), the model parameters (stream 1) and one
/// dataset per replicate (stream 2 + rep). Gaussian-only models are sampled
/// exactly, others by Gibbs sampling.
pub fn simulate(args: &SimulateArgs) -> Result<Simulation> {
    if args.p < 2 {
        return Err(CliError::Usage(format!("--p must be at least 2, got {}", args.p)));
    }
    if args.n == 0 || args.reps == 0 {
        return Err(CliError::Usage("--n and --reps must be positive".into()));
    }
    if args.burn_in == 0 || args.thin == 0 {
        return Err(CliError::Usage("--burn-in and --thin must be positive".into()));
    }
    if !(0.0..=1.0).contains(&args.edge_prob) {
        return Err(CliError::Usage(format!("--edge-prob {} outside [0,1]", args.edge_prob)));
    }
    let kinds = match &args.kinds {
        Some(mix) => parse_kind_mix(mix, args.p)?,
        None => vec![VarKind::Gaussian; args.p],
    };
    let graph_seed = derive_seed(args.seed, 0);
    let graph = match args.topology {
        Topology::Scalefree => gen_scale_free(args.p, graph_seed),
        Topology::Random => gen_random(args.p, args.edge_prob, graph_seed),
    }
    .map_err(CliError::config)?;
    let spec = gen_spec(&graph, &kinds, derive_seed(args.seed, 1))?;
    let datasets = (0..args.reps)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(args.seed, 2 + rep as u64);
            if spec.is_gaussian_only() {
                sample_gaussian(&spec, args.n, seed)
            } else {
                gibbs_sample(&spec, args.n, args.burn_in, args.thin, seed)
            }
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Simulation { graph, spec, datasets })
}

pub fn column_names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("x{j}")).collect()
}

pub fn run(mut args: SimulateArgs) -> Result<()> {
    let start = Instant::now();
    let sim = simulate(&args)?;
    args.out = prepare_out_dir(&args.out)?;
    let out: &Path = &args.out;

    let mut outputs = vec![TRUTH_FILE.to_string(), SPEC_FILE.to_string()];
    io::write_text(&out.join(TRUTH_FILE), &io::format_edges(&sim.graph))?;
    io::write_json(&out.join(SPEC_FILE), &sim.spec)?;
    for (rep, data) in sim.datasets.into_iter().enumerate() {
        let table = Table {
            names: column_names(args.p),
            data,
        };
        io::write_text(&out.join(data_file(rep)), &io::format_table(&table))?;
        outputs.push(data_file(rep));
    }

    let manifest = RunManifest {
        command: "simulate".into(),
        version: mixnet_core::VERSION.into(),
        config: serde_json::to_value(&args).map_err(|e| CliError::Data(e.to_string()))?,
        seed: Some(args.seed),
        threads: None,
        duration_secs: start.elapsed().as_secs_f64(),
        jumps: Vec::new(),
        stuck: Vec::new(),
        outputs,
    };
    manifest.write(&out.join(MANIFEST_FILE))?;
    println!(
        "simulated {} replicate(s), p={}, {} true edges -> {}",
        args.reps,
        args.p,
        sim.graph.edge_count(),
        out.display()
    );
    Ok(())
}
