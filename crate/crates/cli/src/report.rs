//! Run reports: per-repetition metrics, aggregated summaries, and the
//! three output formats (canonical JSON, CSV, paper-style text table).

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Echo of the resolved configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub dataset: String,
    pub task: String,
    pub model: String,
    pub encoder: String,
    pub depth: usize,
    pub variational: bool,
    pub use_features: bool,
    pub embedding_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub repetitions: usize,
    pub master_seed: u64,
    pub val_frac: f64,
    pub test_frac: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionRecord {
    pub index: usize,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummaryRecord {
    pub metric: String,
    pub per_run: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub repetitions: Vec<RepetitionRecord>,
    pub summaries: Vec<MetricSummaryRecord>,
    pub software_version: String,
    pub timestamp_unix_secs: u64,
    pub total_wall_clock_secs: f64,
}

impl RunReport {
    pub fn summary(&self, metric: &str) -> Option<&MetricSummaryRecord> {
        self.summaries.iter().find(|s| s.metric == metric)
    }

    /// Metric names in presentation order: AUC, AP, AMI first, the rest
    /// alphabetical.
    pub fn metric_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.summaries.iter().map(|s| s.metric.clone()).collect();
        let priority = |m: &str| match m {
            "auc" => 0,
            "ap" => 1,
            "ami" => 2,
            _ => 3,
        };
        names.sort_by(|a, b| priority(a).cmp(&priority(b)).then(a.cmp(b)));
        names
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "table" | "text-table" => Ok(Self::Table),
            other => bail!("unknown format `{other}` (json | csv | table)"),
        }
    }
}

pub fn render_report(report: &RunReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => render_json(report),
        OutputFormat::Csv => Ok(render_csv(report)),
        OutputFormat::Table => Ok(render_table(report)),
    }
}

/// Canonical JSON: object keys sorted, trailing newline.
fn render_json(report: &RunReport) -> Result<String> {
    let value = serde_json::to_value(report).context("serializing report")?;
    let mut text = serde_json::to_string_pretty(&value).context("rendering report")?;
    text.push('\n');
    Ok(text)
}

/// One row per repetition plus `mean` and `std` summary rows.
fn render_csv(report: &RunReport) -> String {
    let metrics = report.metric_names();
    let mut out = String::new();
    out.push_str("repetition,seed,wall_clock_secs");
    for m in &metrics {
        out.push(',');
        out.push_str(m);
    }
    out.push('\n');
    for rep in &report.repetitions {
        out.push_str(&format!(
            "{},{},{}",
            rep.index, rep.seed, rep.wall_clock_secs
        ));
        for m in &metrics {
            out.push(',');
            if let Some(v) = rep.metrics.get(m) {
                out.push_str(&format!("{v}"));
            }
        }
        out.push('\n');
    }
    for (label, pick) in [("mean", 0usize), ("std", 1usize)] {
        out.push_str(label);
        out.push_str(",,");
        for m in &metrics {
            out.push(',');
            if let Some(s) = report.summary(m) {
                let v = if pick == 0 { s.mean } else { s.std };
                out.push_str(&format!("{v}"));
            }
        }
        out.push('\n');
    }
    out
}

/// Benchmark-table layout: one `Model / AUC / AP` row, `mean ± std`.
fn render_table(report: &RunReport) -> String {
    let metrics = report.metric_names();
    let header_for = |m: &str| match m {
        "auc" => "AUC (in %)".to_string(),
        "ap" => "AP (in %)".to_string(),
        "ami" => "AMI (in %)".to_string(),
        other => other.to_string(),
    };
    let mut out = String::new();
    out.push_str(&format!(
        "Dataset: {} | task: {} | {} repetitions, {} epochs, d = {}\n",
        report.config.dataset,
        report.config.task,
        report.config.repetitions,
        report.config.epochs,
        report.config.embedding_dim,
    ));
    out.push_str(&format!("{:<16}", "Model"));
    for m in &metrics {
        out.push_str(&format!("{:>18}", header_for(m)));
    }
    out.push('\n');
    out.push_str(&"-".repeat(16 + 18 * metrics.len()));
    out.push('\n');
    out.push_str(&format!("{:<16}", report.config.model));
    for m in &metrics {
        match report.summary(m) {
            Some(s) => out.push_str(&format!("{:>18}", format!("{:.2} ± {:.2}", s.mean, s.std))),
            None => out.push_str(&format!("{:>18}", "-")),
        }
    }
    out.push('\n');
    out
}

pub fn parse_report(json: &str) -> Result<RunReport> {
    serde_json::from_str(json).context("parsing report JSON")
}

pub fn load_report(path: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading report {}", path.display()))?;
    parse_report(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(reps: usize) -> RunReport {
        let per_run: Vec<f64> = (0..reps).map(|i| 80.0 + i as f64).collect();
        let mean = per_run.iter().sum::<f64>() / reps.max(1) as f64;
        RunReport {
            config: ConfigEcho {
                dataset: "toy".into(),
                task: "link-prediction".into(),
                model: "linear_ae".into(),
                encoder: "linear".into(),
                depth: 1,
                variational: false,
                use_features: false,
                embedding_dim: 16,
                hidden_dims: vec![],
                epochs: 200,
                learning_rate: 0.01,
                repetitions: reps,
                master_seed: 1,
                val_frac: 0.05,
                test_frac: 0.10,
            },
            repetitions: (0..reps)
                .map(|i| RepetitionRecord {
                    index: i,
                    seed: i as u64,
                    metrics: BTreeMap::from([("auc".to_string(), per_run[i])]),
                    wall_clock_secs: 0.5,
                })
                .collect(),
            summaries: vec![MetricSummaryRecord {
                metric: "auc".into(),
                per_run,
                mean,
                std: 0.0,
            }],
            software_version: "test".into(),
            timestamp_unix_secs: 0,
            total_wall_clock_secs: 1.0,
        }
    }

    #[test]
    fn json_round_trip_is_idempotent() {
        let report = sample(3);
        let once = render_report(&report, OutputFormat::Json).unwrap();
        let parsed = parse_report(&once).unwrap();
        let twice = render_report(&parsed, OutputFormat::Json).unwrap();
        assert_eq!(once, twice);
        assert_eq!(parsed, report);
    }

    #[test]
    fn csv_row_count_is_repetitions_plus_header_plus_two() {
        let report = sample(4);
        let csv = render_report(&report, OutputFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 4 + 1 + 2);
        assert!(csv.lines().next().unwrap().ends_with("auc"));
        assert!(csv.lines().last().unwrap().starts_with("std"));
    }

    #[test]
    fn empty_metric_report_renders_everywhere() {
        let mut report = sample(0);
        report.summaries.clear();
        for format in [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Table] {
            let rendered = render_report(&report, format).unwrap();
            assert!(!rendered.is_empty());
        }
        let parsed = parse_report(&render_report(&report, OutputFormat::Json).unwrap()).unwrap();
        assert!(parsed.summaries.is_empty());
    }

    #[test]
    fn table_uses_paper_layout() {
        let table = render_report(&sample(2), OutputFormat::Table).unwrap();
        assert!(table.contains("Model"));
        assert!(table.contains("AUC (in %)"));
        assert!(table.contains("linear_ae"));
        assert!(table.contains("±"));
    }
}
