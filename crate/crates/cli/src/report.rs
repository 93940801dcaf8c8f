//! Report artifacts and their text renderings.

use std::fmt::Write as _;

use hullknn::{EvalReport, GridResult};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub path: String,
    pub format: String,
    pub instances: usize,
    pub features: usize,
    pub classes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub dataset: DatasetInfo,
    pub preset: Option<String>,
    pub seed: u32,
    pub test_fraction: f64,
    pub trials: usize,
    pub stratified: bool,
    pub scale: bool,
    pub point_count: Option<usize>,
    pub ensure_enclosure: bool,
    pub hull_only: bool,
    pub per_dimension_box: bool,
    pub enclosing_hull: bool,
    pub assumptions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub metadata: Metadata,
    pub reports: Vec<EvalReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridArtifact {
    pub metadata: Metadata,
    pub validation_fraction: f64,
    pub train_size: usize,
    pub validation_size: usize,
    pub result: GridResult,
}

pub fn display_name(id: &str) -> &str {
    match id {
        "hull-knn" => "Proposed k-NN",
        "knn" => "Classic k-NN",
        "svm" => "Classic SVM",
        other => other,
    }
}

pub fn percent(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

fn real(x: f64) -> String {
    if x != 0.0 && x.abs() < 0.01 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_else(|| "-".to_string())
}

/// `classifier | k | threshold | gamma | accuracy` cells for one report.
pub fn row(r: &EvalReport) -> [String; 5] {
    [
        display_name(&r.classifier_id).to_string(),
        opt(r.params.k, |k| k.to_string()),
        opt(r.params.threshold, real),
        opt(r.params.gamma, real),
        percent(r.accuracy),
    ]
}

pub const HEADER: [&str; 5] = ["classifier", "k", "threshold", "gamma", "accuracy"];

fn metadata_lines(m: &Metadata) -> Vec<String> {
    let d = &m.dataset;
    let mut lines = vec![
        format!(
            "dataset: {} ({}, format {}, {} instances, {} features, {} classes)",
            d.name, d.path, d.format, d.instances, d.features, d.classes
        ),
        format!("seed: {}", m.seed),
        format!("test fraction: {}", m.test_fraction),
        format!("trials: {}", m.trials),
        format!("stratified: {}", m.stratified),
        format!("scale: {}", m.scale),
    ];
    if let Some(p) = &m.preset {
        lines.push(format!("preset: {p}"));
    }
    if let Some(n) = m.point_count {
        lines.push(format!("hull points: {n}"));
    }
    let flags: Vec<&str> = [
        (m.ensure_enclosure, "ensure-enclosure"),
        (m.hull_only, "hull-only"),
        (m.per_dimension_box, "per-dimension-box"),
        (m.enclosing_hull, "enclosing-hull"),
    ]
    .iter()
    .filter(|(on, _)| *on)
    .map(|(_, name)| *name)
    .collect();
    if !flags.is_empty() {
        lines.push(format!("flags: {}", flags.join(", ")));
    }
    for a in &m.assumptions {
        lines.push(format!("assumption: {a}"));
    }
    lines
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit_table(artifact: &Artifact, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(artifact).expect("artifact serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut out = String::new();
            for line in metadata_lines(&artifact.metadata) {
                let _ = writeln!(out, "# {line}");
            }
            let _ = writeln!(out, "{}", HEADER.join(","));
            for r in &artifact.reports {
                let cells: Vec<String> = row(r).iter().map(|c| csv_field(c)).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
            out
        }
        OutputFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "# Benchmark: {}\n", artifact.metadata.dataset.name);
            for line in metadata_lines(&artifact.metadata) {
                let _ = writeln!(out, "- {line}");
            }
            out.push('\n');
            let _ = writeln!(out, "| {} |", HEADER.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
            for r in &artifact.reports {
                let _ = writeln!(out, "| {} |", row(r).join(" | "));
            }
            if artifact.metadata.trials > 1 {
                out.push('\n');
                let _ = writeln!(out, "| classifier | mean | min | max | in-hull deficit |");
                let _ = writeln!(out, "|---|---|---|---|---|");
                for r in &artifact.reports {
                    let _ = writeln!(
                        out,
                        "| {} | {} | {} | {} | {} |",
                        display_name(&r.classifier_id),
                        percent(r.trials.mean),
                        percent(r.trials.min),
                        percent(r.trials.max),
                        opt(r.in_hull_neighbor_deficit, percent),
                    );
                }
            }
            out
        }
    }
}

pub fn emit_grid(artifact: &GridArtifact, format: OutputFormat) -> String {
    let header = ["k", "threshold", "seed", "train_error", "validation_error"];
    let cells = |c: &hullknn::GridCell| {
        [
            c.k.to_string(),
            real(c.threshold),
            c.seed.to_string(),
            percent(c.train_error),
            percent(c.validation_error),
        ]
    };
    let (bk, bt) = artifact.result.best;
    let mut meta = metadata_lines(&artifact.metadata);
    meta.push(format!(
        "validation: holdout {} of the training split ({} train, {} validation)",
        artifact.validation_fraction, artifact.train_size, artifact.validation_size
    ));
    meta.push(format!("best: k={bk} threshold={}", real(bt)));
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(artifact).expect("artifact serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut out = String::new();
            for line in meta {
                let _ = writeln!(out, "# {line}");
            }
            let _ = writeln!(out, "{}", header.join(","));
            for c in &artifact.result.grid {
                let _ = writeln!(out, "{}", cells(c).join(","));
            }
            out
        }
        OutputFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "# Grid search: {}\n", artifact.metadata.dataset.name);
            for line in meta {
                let _ = writeln!(out, "- {line}");
            }
            out.push('\n');
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for c in &artifact.result.grid {
                let _ = writeln!(out, "| {} |", cells(c).join(" | "));
            }
            out
        }
    }
}
