//! Pass/fail comparison of report metrics against reference values.
//!
//! Reference files are flat text, one check per line:
//!
//! ```text
//! # key              mean   tolerance
//! linear_ae.auc      83.19  2.0
//! cora:linear_vae.auc 84.70 2.0
//! ```
//!
//! A key is `<model_label>.<metric>`, optionally prefixed with
//! `<dataset>:` to disambiguate when reports from several datasets are
//! checked in one invocation.

use anyhow::{bail, Context, Result};

use crate::report::RunReport;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceEntry {
    pub dataset: Option<String>,
    pub model: String,
    pub metric: String,
    pub mean: f64,
    pub tolerance: f64,
}

impl ReferenceEntry {
    pub fn key(&self) -> String {
        match &self.dataset {
            Some(d) => format!("{d}:{}.{}", self.model, self.metric),
            None => format!("{}.{}", self.model, self.metric),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub key: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn parse_reference(text: &str) -> Result<Vec<ReferenceEntry>> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            bail!(
                "reference line {}: expected `key mean tolerance`, got `{line}`",
                lineno + 1
            );
        }
        let (dataset, rest) = match tokens[0].split_once(':') {
            Some((d, r)) => (Some(d.to_string()), r),
            None => (None, tokens[0]),
        };
        let Some((model, metric)) = rest.rsplit_once('.') else {
            bail!(
                "reference line {}: key `{}` must look like model.metric",
                lineno + 1,
                tokens[0]
            );
        };
        let mean: f64 = tokens[1]
            .parse()
            .with_context(|| format!("reference line {}: bad mean", lineno + 1))?;
        let tolerance: f64 = tokens[2]
            .parse()
            .with_context(|| format!("reference line {}: bad tolerance", lineno + 1))?;
        entries.push(ReferenceEntry {
            dataset,
            model: model.to_string(),
            metric: metric.to_string(),
            mean,
            tolerance,
        });
    }
    Ok(entries)
}

/// One verdict per reference entry: |observed mean - mean| <= tolerance.
/// A metric missing from every matching report is an error.
pub fn compare_against_reference(
    reports: &[RunReport],
    entries: &[ReferenceEntry],
) -> Result<Vec<Verdict>> {
    let mut verdicts = Vec::with_capacity(entries.len());
    for entry in entries {
        let matching = reports.iter().find(|r| {
            r.config.model == entry.model
                && entry
                    .dataset
                    .as_ref()
                    .is_none_or(|d| r.config.dataset == *d)
        });
        let Some(report) = matching else {
            bail!("no report matches reference key `{}`", entry.key());
        };
        let Some(summary) = report.summary(&entry.metric) else {
            bail!(
                "report for `{}` has no metric `{}`",
                entry.model,
                entry.metric
            );
        };
        let observed = summary.mean;
        verdicts.push(Verdict {
            key: entry.key(),
            observed,
            expected: entry.mean,
            tolerance: entry.tolerance,
            pass: (observed - entry.mean).abs() <= entry.tolerance,
        });
    }
    Ok(verdicts)
}
