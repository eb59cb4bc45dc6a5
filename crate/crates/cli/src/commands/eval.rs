use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mixnet_core::eval::default_grid;
use mixnet_core::{f1, graph_diff, roc, Confusion, RocCurve};
use serde::Serialize;

use crate::args::EvalArgs;
use crate::error::{CliError, Result};
use crate::io;
use crate::manifest::RunManifest;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    #[serde(flatten)]
    pub confusion: Confusion,
    pub f1: f64,
    /// The truth has no edges, so F1 falls back to its convention.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub pairs: usize,
    pub mean_f1: f64,
    /// Sample standard deviation (0 for a single pair).
    pub sd_f1: f64,
    pub f1: Vec<f64>,
}

pub fn metrics(args: &EvalArgs) -> Result<Metrics> {
    let truth_path = args.truth.as_ref().ok_or_else(|| CliError::Usage("--truth is required".into()))?;
    let est_path = args
        .estimate
        .as_ref()
        .ok_or_else(|| CliError::Usage("--estimate is required unless --roc or --batch is given".into()))?;
    let truth = io::read_edges(truth_path, args.p)?;
    let estimate = io::read_edges(est_path, args.p)?;
    let confusion = graph_diff(&estimate, &truth)?;
    let auc = match &args.inclusion {
        Some(path) => Some(roc_curve(args, path)?.auc()),
        None => None,
    };
    Ok(Metrics {
        confusion,
        f1: f1(&confusion),
        degenerate: truth.edge_count() == 0,
        auc,
    })
}

fn roc_curve(args: &EvalArgs, inclusion: &Path) -> Result<RocCurve> {
    let truth_path = args.truth.as_ref().ok_or_else(|| CliError::Usage("--truth is required".into()))?;
    let truth = io::read_edges(truth_path, args.p)?;
    let matrix = io::read_inclusion(inclusion, args.p)?;
    if args.grid < 2 {
        return Err(CliError::Usage("--grid needs at least 2 thresholds".into()));
    }
    Ok(roc(&matrix, &truth, args.rule, &default_grid(args.grid))?)
}

pub fn format_roc(curve: &RocCurve) -> String {
    let mut out = String::from("threshold,tpr,fpr\n");
    for pt in &curve.points {
        let _ = writeln!(out, "{:.6},{:.6},{:.6}", pt.threshold, pt.tpr, pt.fpr);
    }
    out
}

pub fn batch(list: &Path, p: usize) -> Result<BatchSummary> {
    let base = list.parent().map(Path::to_path_buf).unwrap_or_default();
    let resolve = |s: &str| -> PathBuf {
        let path = PathBuf::from(s);
        if path.is_absolute() {
            path
        } else {
            base.join(path)
        }
    };
    let mut scores = Vec::new();
    for (i, line) in io::read_text(list)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((t, e)) = line.split_once('\t') else {
            return Err(CliError::Data(format!(
                "{} line {}: expected `truth<TAB>estimate`",
                list.display(),
                i + 1
            )));
        };
        let truth = io::read_edges(&resolve(t.trim()), p)?;
        let estimate = io::read_edges(&resolve(e.trim()), p)?;
        scores.push(f1(&graph_diff(&estimate, &truth)?));
    }
    if scores.is_empty() {
        return Err(CliError::Data(format!("{}: no replicate pairs", list.display())));
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let sd = if scores.len() > 1 {
        (scores.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(BatchSummary {
        pairs: scores.len(),
        mean_f1: mean,
        sd_f1: sd,
        f1: scores,
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// `metrics.json` gets `metrics.manifest.json` next to it.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

pub fn run(mut args: EvalArgs) -> Result<()> {
    let start = Instant::now();
    let text = if let Some(list) = &args.batch {
        to_json(&batch(list, args.p)?)?
    } else if args.roc {
        let path = args.inclusion.clone().expect("clap requires --inclusion with --roc");
        let curve = roc_curve(&args, &path)?;
        if curve.degenerate {
            eprintln!("warning: the true graph has no edges or no non-edges; one ROC rate is undefined");
        }
        format_roc(&curve)
    } else {
        to_json(&metrics(&args)?)?
    };

    let Some(out) = args.out.clone() else {
        print!("{text}");
        return Ok(());
    };
    io::write_text(&out, &text)?;
    let absolute = |p: &Option<PathBuf>| p.as_ref().map(|p| p.canonicalize().unwrap_or_else(|_| p.clone()));
    args.truth = absolute(&args.truth);
    args.estimate = absolute(&args.estimate);
    args.inclusion = absolute(&args.inclusion);
    args.batch = absolute(&args.batch);
    args.out = absolute(&args.out);
    let manifest = RunManifest {
        command: "eval".into(),
        version: mixnet_core::VERSION.into(),
        config: serde_json::to_value(&args).map_err(|e| CliError::Data(e.to_string()))?,
        seed: None,
        threads: None,
        duration_secs: start.elapsed().as_secs_f64(),
        jumps: Vec::new(),
        stuck: Vec::new(),
        outputs: vec![out.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()],
    };
    manifest.write(&manifest_path(&out))
}
