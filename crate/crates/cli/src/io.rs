//! Text formats: data CSV, edge-list TSV, inclusion-matrix CSV, JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mixnet_core::{Dataset, Graph, InclusionMatrix, VarKind};
use serde::Serialize;

use crate::error::{CliError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

/// Data table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub data: Dataset,
}

/// Preprocessing applied after parsing.
#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Gaussian columns replaced by their natural log; values must be > 0.
    pub log_transform: Vec<String>,
    /// Center and scale every Gaussian column.
    pub standardize: bool,
}

fn missing(field: &str) -> bool {
    field.is_empty() || ["na", "nan", "null"].contains(&field.to_ascii_lowercase().as_str())
}

/// Parses a data CSV whose header cells read `name:kind`.
///
/// Rows are numbered from 1 (the first line after the header).
pub fn parse_table(text: &str, opts: &IngestOptions) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| CliError::Data(format!("header: {e}")))?
        .clone();
    let mut names = Vec::with_capacity(header.len());
    let mut kinds = Vec::with_capacity(header.len());
    for (j, cell) in header.iter().enumerate() {
        let (name, code) = cell
            .rsplit_once(':')
            .ok_or_else(|| CliError::Data(format!("header column {} `{cell}` needs a `name:kind` label", j + 1)))?;
        let kind: VarKind = code
            .parse()
            .map_err(|e| CliError::Data(format!("header column {} `{cell}`: {e}", j + 1)))?;
        if name.is_empty() || names.iter().any(|n| n == name) {
            return Err(CliError::Data(format!("header column {}: empty or duplicate name `{name}`", j + 1)));
        }
        names.push(name.to_string());
        kinds.push(kind);
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let mut n_missing = 0usize;
    let mut first_missing = None;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::Data(format!("row {row}: {e}")))?;
        for (j, field) in record.iter().enumerate() {
            if missing(field) {
                n_missing += 1;
                first_missing.get_or_insert((row, j));
                continue;
            }
            let value: f64 = field.parse().map_err(|_| {
                CliError::Data(format!("row {row}, column `{}`: `{field}` is not a number", names[j]))
            })?;
            if !kinds[j].admits(value) {
                let support = match kinds[j] {
                    VarKind::Gaussian => "a finite real",
                    VarKind::Binary => "0 or 1",
                    VarKind::Count => "a non-negative integer",
                };
                return Err(CliError::Data(format!(
                    "row {row}, column `{}` ({}): {field} is not {support}",
                    names[j], kinds[j]
                )));
            }
            columns[j].push(value);
        }
    }
    if let Some((row, j)) = first_missing {
        return Err(CliError::Data(format!(
            "{n_missing} missing value(s); first at row {row}, column `{}`",
            names[j]
        )));
    }

    for name in &opts.log_transform {
        let j = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CliError::Usage(format!("--log-transform: no column `{name}`")))?;
        if kinds[j] != VarKind::Gaussian {
            return Err(CliError::Usage(format!("--log-transform: column `{name}` is not Gaussian")));
        }
        if let Some(i) = columns[j].iter().position(|&x| x <= 0.0) {
            return Err(CliError::Data(format!(
                "row {}, column `{name}`: log transform needs positive values, found {}",
                i + 1,
                columns[j][i]
            )));
        }
        columns[j].iter_mut().for_each(|x| *x = x.ln());
    }
    if opts.standardize {
        for (col, _) in columns.iter_mut().zip(&kinds).filter(|(_, k)| **k == VarKind::Gaussian) {
            standardize(col);
        }
    }

    let data = Dataset::new(columns, kinds)?;
    Ok(Table { names, data })
}

/// Centers, then scales to unit sample standard deviation when that is
/// positive.
fn standardize(col: &mut [f64]) {
    let n = col.len() as f64;
    if col.is_empty() {
        return;
    }
    let mean = col.iter().sum::<f64>() / n;
    col.iter_mut().for_each(|x| *x -= mean);
    if col.len() > 1 {
        let sd = (col.iter().map(|x| x * x).sum::<f64>() / (n - 1.0)).sqrt();
        if sd > 0.0 {
            col.iter_mut().for_each(|x| *x /= sd);
        }
    }
}

pub fn read_table(path: &Path, opts: &IngestOptions) -> Result<Table> {
    parse_table(&read_text(path)?, opts).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Renders a table; reals use the shortest round-trip representation.
pub fn format_table(table: &Table) -> String {
    let data = &table.data;
    let mut out = String::new();
    let header: Vec<String> = table
        .names
        .iter()
        .zip(data.kinds())
        .map(|(n, k)| format!("{n}:{k}"))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..data.n() {
        for j in 0..data.p() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", data.get(i, j));
        }
        out.push('\n');
    }
    out
}

/// One `u<TAB>v` line per edge, `u < v`, in lexicographic order.
pub fn format_edges(graph: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{u}\t{v}");
    }
    out
}

pub fn parse_edges(text: &str, p: usize) -> Result<Graph> {
    let mut graph = Graph::empty(p);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |why: &str| CliError::Data(format!("edge list line {}: {why}: `{line}`", i + 1));
        let fields: Vec<&str> = line.split('\t').collect();
        let [u, v] = fields[..] else {
            return Err(bad("expected two tab-separated vertices"));
        };
        let u: usize = u.trim().parse().map_err(|_| bad("vertex is not a non-negative integer"))?;
        let v: usize = v.trim().parse().map_err(|_| bad("vertex is not a non-negative integer"))?;
        if u >= p || v >= p {
            return Err(bad(&format!("vertex out of range for p={p}")));
        }
        graph.add_edge(u, v).map_err(|e| bad(&e.to_string()))?;
    }
    Ok(graph)
}

pub fn read_edges(path: &Path, p: usize) -> Result<Graph> {
    parse_edges(&read_text(path)?, p).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// `p` comma-separated rows of 6-decimal probabilities; row `v` is the
/// target.
pub fn format_inclusion(m: &InclusionMatrix) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_inclusion(text: &str, p: usize) -> Result<InclusionMatrix> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| CliError::Data(format!("inclusion matrix line {}: not a number", i + 1)))?;
        rows.push(row);
    }
    if rows.len() != p {
        return Err(CliError::Data(format!("inclusion matrix has {} rows, expected p={p}", rows.len())));
    }
    Ok(InclusionMatrix::from_rows(rows)?)
}

pub fn read_inclusion(path: &Path, p: usize) -> Result<InclusionMatrix> {
    parse_inclusion(&read_text(path)?, p).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
