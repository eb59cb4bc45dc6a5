pub mod eval;
pub mod learn;
pub mod simulate;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::args::{Command, EvalArgs, LearnArgs, ReplayArgs, SimulateArgs};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate(args) => simulate::run(args),
        Command::Learn(args) => learn::run(args),
        Command::Eval(args) => eval::run(args),
        Command::Replay(args) => replay(args),
    }
}

/// Creates `dir` if needed and returns its absolute path.
pub(crate) fn prepare_out_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    dir.canonicalize().map_err(|e| CliError::io(dir, e))
}

fn recorded<T: DeserializeOwned>(manifest: &RunManifest, value: &serde_json::Value) -> Result<T> {
    serde_json::from_value(value.clone())
        .map_err(|e| CliError::Data(format!("manifest for `{}` has unusable arguments: {e}", manifest.command)))
}

/// Re-runs the command recorded in a manifest, optionally redirecting its
/// output and changing the worker count.
pub fn replay(args: ReplayArgs) -> Result<()> {
    let manifest = RunManifest::read(&args.manifest)?;
    match manifest.command.as_str() {
        "simulate" => {
            let mut run: SimulateArgs = recorded(&manifest, &manifest.config)?;
            if let Some(out) = args.out {
                run.out = out;
            }
            simulate::run(run)
        }
        "learn" => {
            let mut run: LearnArgs = recorded(&manifest, &manifest.config["args"])?;
            if let Some(out) = args.out {
                run.out = out;
            }
            if args.threads.is_some() {
                run.threads = args.threads;
            }
            learn::run(run)
        }
        "eval" => {
            let mut run: EvalArgs = recorded(&manifest, &manifest.config)?;
            if let Some(out) = args.out {
                run.out = Some(out);
            }
            eval::run(run)
        }
        other => Err(CliError::Data(format!(
            "{}: cannot replay command `{other}`",
            args.manifest.display()
        ))),
    }
}
