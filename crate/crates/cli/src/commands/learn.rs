use std::time::Instant;

use mixnet_core::{learn_structure_flagged, ChainConfig, ScoreConfig, StructureFit};

use super::prepare_out_dir;
use crate::args::LearnArgs;
use crate::error::{CliError, Result};
use crate::io::{self, IngestOptions, Table};
use crate::manifest::{RunManifest, StuckVertex, MANIFEST_FILE};

pub const EDGES_FILE: &str = "edges.tsv";
pub const INCLUSION_FILE: &str = "inclusion.csv";

pub fn chain_config(args: &LearnArgs) -> Result<ChainConfig> {
    let score = ScoreConfig::new(args.criterion, args.gamma, args.prior, args.prior_a).map_err(CliError::config)?;
    let cfg = ChainConfig {
        iterations: args.iters,
        burn_in: args.burnin,
        threshold: args.threshold,
        seed: args.seed,
        score,
        holding: args.holding,
        rates: args.rates,
    };
    cfg.validate().map_err(CliError::config)?;
    Ok(cfg)
}

/// Runs the per-vertex chains on a pool of `threads` workers (all cores
/// when `None`).
pub fn learn_table(table: &Table, cfg: &ChainConfig, args: &LearnArgs) -> Result<StructureFit> {
    if args.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(|| learn_structure_flagged(&table.data, cfg, args.rule))?)
}

pub fn run(mut args: LearnArgs) -> Result<()> {
    let start = Instant::now();
    let cfg = chain_config(&args)?;
    let opts = IngestOptions {
        log_transform: args.log_transform.clone(),
        standardize: args.standardize,
    };
    let table = io::read_table(&args.data, &opts)?;
    args.data = args.data.canonicalize().map_err(|e| CliError::io(&args.data, e))?;

    let fit = learn_table(&table, &cfg, &args)?;
    for (v, err) in &fit.stuck {
        eprintln!("warning: vertex {v} (`{}`): {err}; its inclusion row is left at zero", table.names[*v]);
    }

    args.out = prepare_out_dir(&args.out)?;
    io::write_text(&args.out.join(EDGES_FILE), &io::format_edges(&fit.graph))?;
    io::write_text(&args.out.join(INCLUSION_FILE), &io::format_inclusion(&fit.inclusion))?;

    let config = serde_json::json!({ "args": args, "chain": cfg });
    let manifest = RunManifest {
        command: "learn".into(),
        version: mixnet_core::VERSION.into(),
        config,
        seed: Some(args.seed),
        threads: Some(args.threads.unwrap_or_else(rayon::current_num_threads)),
        duration_secs: start.elapsed().as_secs_f64(),
        jumps: fit.jumps.clone(),
        stuck: fit
            .stuck
            .iter()
            .map(|(v, e)| StuckVertex {
                vertex: *v,
                reason: e.to_string(),
            })
            .collect(),
        outputs: vec![EDGES_FILE.into(), INCLUSION_FILE.into()],
    };
    manifest.write(&args.out.join(MANIFEST_FILE))?;
    println!(
        "learned {} edges among {} variables -> {}",
        fit.graph.edge_count(),
        table.data.p(),
        args.out.display()
    );
    Ok(())
}
