//! Experiment configuration: flat key-value files with CLI overrides
//! (CLI wins over file).
//!
//! ```text
//! # featureless Cora, linear VAE
//! task = link-prediction
//! dataset = cora
//! format = citation-content
//! edge_path = data/cora/cora.cites
//! feature_path = data/cora/cora.content
//! encoder = linear
//! variational = true
//! repetitions = 100
//! master_seed = 1
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use lgae::data::{DatasetDescriptor, DatasetFormat, SbmConfig};
use lgae::models::{EncoderKind, ModelSpec, DEFAULT_HIDDEN_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    LinkPrediction,
    Clustering,
}

impl TaskKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "link-prediction" => Ok(Self::LinkPrediction),
            "clustering" => Ok(Self::Clustering),
            other => bail!("unknown task `{other}` (link-prediction | clustering)"),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LinkPrediction => "link-prediction",
            Self::Clustering => "clustering",
        }
    }
}

#[derive(Debug, Clone)]
pub enum DatasetSource {
    Files(DatasetDescriptor),
    Sbm(SbmConfig),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset_name: String,
    pub dataset: DatasetSource,
    pub task: TaskKind,
    pub model: ModelSpec,
    pub epochs: usize,
    /// None picks the per-dataset default.
    pub learning_rate: Option<f64>,
    pub repetitions: usize,
    pub master_seed: u64,
    pub val_frac: f64,
    pub test_frac: f64,
    /// Cluster count for the clustering task; defaults to the number of
    /// ground-truth classes.
    pub clusters: Option<usize>,
    pub jobs: usize,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Per-dataset defaults: 0.1 for Arxiv-HepTh; 0.005 for WebKD (but
    /// 0.001 for its linear AE and 0.01 for its linear VAE) and for
    /// variational models on Proteins; 0.01 everywhere else.
    pub fn effective_learning_rate(&self) -> f64 {
        if let Some(lr) = self.learning_rate {
            return lr;
        }
        let name = self.dataset_name.to_ascii_lowercase();
        let linear = self.model.encoder == EncoderKind::Linear;
        match name.as_str() {
            "arxiv-hepth" | "arxiv_hepth" | "arxivhepth" => 0.1,
            "webkd" | "webkb" => {
                if linear && !self.model.variational {
                    0.001
                } else if linear && self.model.variational {
                    0.01
                } else {
                    0.005
                }
            }
            "proteins" if self.model.variational => 0.005,
            _ => 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            bail!("repetitions must be >= 1");
        }
        if !(0.0..1.0).contains(&self.val_frac)
            || !(0.0..1.0).contains(&self.test_frac)
            || self.val_frac + self.test_frac >= 1.0
        {
            bail!(
                "split fractions must lie in [0, 1) and sum below 1 (val {}, test {})",
                self.val_frac,
                self.test_frac
            );
        }
        if self.jobs == 0 {
            bail!("jobs must be >= 1");
        }
        self.model
            .validate()
            .map_err(|e| anyhow!("invalid model: {e}"))
    }
}

/// Parses `key = value` / `key value` lines; `#` lines are comments.
/// Later occurrences of a key win.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = if let Some((k, v)) = line.split_once('=') {
            (k.trim(), v.trim())
        } else if let Some((k, v)) = line.split_once(char::is_whitespace) {
            (k.trim(), v.trim())
        } else {
            bail!(
                "config line {}: expected `key = value`, got `{line}`",
                lineno + 1
            );
        };
        if key.is_empty() || value.is_empty() {
            bail!("config line {}: empty key or value", lineno + 1);
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}

fn get_usize(map: &BTreeMap<String, String>, key: &str, default: usize) -> Result<usize> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().with_context(|| format!("bad {key} `{v}`")),
    }
}

fn get_f64(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().with_context(|| format!("bad {key} `{v}`")),
    }
}

fn get_bool(map: &BTreeMap<String, String>, key: &str, default: bool) -> Result<bool> {
    match map.get(key).map(String::as_str) {
        None => Ok(default),
        Some("true") | Some("1") => Ok(true),
        Some("false") | Some("0") => Ok(false),
        Some(v) => bail!("bad {key} `{v}` (true | false)"),
    }
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().with_context(|| format!("bad count `{t}`")))
        .collect()
}

/// Builds the experiment configuration from merged key-values.
pub fn build_config(map: &BTreeMap<String, String>) -> Result<ExperimentConfig> {
    let dataset_name = map
        .get("dataset")
        .cloned()
        .unwrap_or_else(|| "custom".to_string());
    let task = TaskKind::parse(
        map.get("task")
            .map(String::as_str)
            .unwrap_or("link-prediction"),
    )?;

    let format = map
        .get("format")
        .ok_or_else(|| anyhow!("missing `format` (citation-content | edge-list-tsv | sbm)"))?;
    let dataset = if format == "sbm" {
        let blocks = map
            .get("sbm_blocks")
            .ok_or_else(|| anyhow!("sbm needs `sbm_blocks` (comma-separated sizes)"))?;
        DatasetSource::Sbm(SbmConfig {
            block_sizes: parse_usize_list(blocks)?,
            p_in: get_f64(map, "sbm_p_in", 0.5)?,
            p_out: get_f64(map, "sbm_p_out", 0.05)?,
            seed: get_usize(map, "sbm_seed", 0)? as u64,
        })
    } else {
        let format = DatasetFormat::parse(format).map_err(|e| anyhow!("{e}"))?;
        let edge_path = map
            .get("edge_path")
            .ok_or_else(|| anyhow!("missing `edge_path`"))?;
        DatasetSource::Files(DatasetDescriptor {
            name: dataset_name.clone(),
            edge_path: PathBuf::from(edge_path),
            feature_path: map.get("feature_path").map(PathBuf::from),
            label_path: map.get("label_path").map(PathBuf::from),
            format,
            binarize: get_bool(map, "binarize", true)?,
            directed_input: get_bool(map, "directed_input", true)?,
            row_normalize_features: get_bool(map, "row_normalize_features", false)?,
        })
    };

    let variational = get_bool(map, "variational", false)?;
    let use_features = get_bool(map, "use_features", false)?;
    let embedding_dim = get_usize(map, "embedding_dim", 16)?;
    let encoder = map.get("encoder").map(String::as_str).unwrap_or("linear");
    let model = match encoder {
        "linear" => ModelSpec::linear(embedding_dim, variational, use_features),
        "gcn" => {
            let depth = get_usize(map, "depth", 2)?;
            let spec = ModelSpec::gcn(depth, embedding_dim, variational, use_features);
            match map.get("hidden_dims") {
                Some(list) => spec.with_hidden_dims(parse_usize_list(list)?),
                None => spec.with_hidden_dims(vec![DEFAULT_HIDDEN_DIM; depth.saturating_sub(1)]),
            }
        }
        other => bail!("unknown encoder `{other}` (linear | gcn)"),
    };

    let learning_rate = match map.get("learning_rate") {
        None => None,
        Some(v) => Some(
            v.parse()
                .with_context(|| format!("bad learning_rate `{v}`"))?,
        ),
    };

    let cfg = ExperimentConfig {
        dataset_name,
        dataset,
        task,
        model,
        epochs: get_usize(map, "epochs", 200)?,
        learning_rate,
        repetitions: get_usize(map, "repetitions", 100)?,
        master_seed: get_usize(map, "master_seed", 1)? as u64,
        val_frac: get_f64(map, "val_frac", 0.05)?,
        test_frac: get_f64(map, "test_frac", 0.10)?,
        clusters: match map.get("clusters") {
            None => None,
            Some(v) => Some(v.parse().with_context(|| format!("bad clusters `{v}`"))?),
        },
        jobs: get_usize(map, "jobs", 1)?,
        output_path: map.get("output").map(PathBuf::from),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// File contents plus `key=value` overrides, overrides winning.
pub fn config_from_text_with_overrides(
    text: &str,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig> {
    let mut map = parse_key_values(text)?;
    for (k, v) in overrides {
        map.insert(k.clone(), v.clone());
    }
    build_config(&map)
}
