//! The experiment runner: data -> split -> train -> evaluate over R
//! repetitions, aggregated as mean ± std.
//!
//! Repetition r draws its whole random stream (split, initialization,
//! sampling noise, k-means seeding) from one generator seeded by
//! `derive_seed(master_seed, r)`, so the experiment is a pure function of
//! (config, master_seed) modulo the timing fields, and adding repetitions
//! never changes earlier ones. Repetitions run in parallel up to `jobs`.

use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use lgae::data::{generate_sbm, load_citation_dataset, load_edge_list, DatasetFormat, LoadStats};
use lgae::eval::{
    evaluate_clustering_with_k, evaluate_link_prediction, make_link_split, MetricSummary,
};
use lgae::linalg::{FeatureMatrix, Graph};
use lgae::rng::{derive_seed, rng_from_seed};
use lgae::training::{train, TrainConfig, ValidationEdges};

use crate::config::{DatasetSource, ExperimentConfig, TaskKind};
use crate::report::{ConfigEcho, MetricSummaryRecord, RepetitionRecord, RunReport};

pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Graph> {
    let report_stats = |stats: &LoadStats| {
        if stats.skipped_edges > 0 {
            eprintln!(
                "warning: skipped {} edge lines referencing unknown node ids",
                stats.skipped_edges
            );
        }
        if stats.dropped_self_loops > 0 {
            eprintln!("note: dropped {} self-loops", stats.dropped_self_loops);
        }
    };
    match &cfg.dataset {
        DatasetSource::Sbm(sbm) => generate_sbm(sbm).map_err(|e| anyhow!("sbm: {e}")),
        DatasetSource::Files(desc) => {
            let (graph, stats) = match desc.format {
                DatasetFormat::CitationContent => load_citation_dataset(desc)
                    .with_context(|| format!("loading citation dataset `{}`", desc.name))?,
                DatasetFormat::EdgeListTsv => load_edge_list(desc)
                    .with_context(|| format!("loading edge list `{}`", desc.name))?,
            };
            report_stats(&stats);
            Ok(graph)
        }
    }
}

fn config_echo(cfg: &ExperimentConfig) -> ConfigEcho {
    ConfigEcho {
        dataset: cfg.dataset_name.clone(),
        task: cfg.task.as_str().to_string(),
        model: cfg.model.label(),
        encoder: cfg.model.encoder.as_str().to_string(),
        depth: cfg.model.depth,
        variational: cfg.model.variational,
        use_features: cfg.model.use_features,
        embedding_dim: cfg.model.embedding_dim,
        hidden_dims: cfg.model.hidden_dims.clone(),
        epochs: cfg.epochs,
        learning_rate: cfg.effective_learning_rate(),
        repetitions: cfg.repetitions,
        master_seed: cfg.master_seed,
        val_frac: cfg.val_frac,
        test_frac: cfg.test_frac,
    }
}

fn run_one(
    cfg: &ExperimentConfig,
    graph: &Graph,
    features: Option<&FeatureMatrix>,
    index: usize,
) -> Result<RepetitionRecord> {
    let seed = derive_seed(cfg.master_seed, index as u64);
    let started = Instant::now();
    let mut rng = rng_from_seed(seed);
    let mut metrics = BTreeMap::new();

    match cfg.task {
        TaskKind::LinkPrediction => {
            let split = make_link_split(graph, cfg.val_frac, cfg.test_frac, &mut rng)?;
            let validation = (!split.val_pos.is_empty()).then(|| ValidationEdges {
                pos: split.val_pos.clone(),
                neg: split.val_neg.clone(),
            });
            let hp = TrainConfig {
                epochs: cfg.epochs,
                learning_rate: cfg.effective_learning_rate(),
                validation,
            };
            let outcome = train(&split.train_adjacency, features, &cfg.model, &hp, &mut rng)?;
            let (auc, ap) =
                evaluate_link_prediction(&outcome.params, &cfg.model, &split, features)?;
            metrics.insert("auc".to_string(), 100.0 * auc);
            metrics.insert("ap".to_string(), 100.0 * ap);
        }
        TaskKind::Clustering => {
            let hp = TrainConfig {
                epochs: cfg.epochs,
                learning_rate: cfg.effective_learning_rate(),
                validation: None,
            };
            let outcome = train(graph.adjacency(), features, &cfg.model, &hp, &mut rng)?;
            let k = cfg.clusters.or(graph.n_classes()).unwrap_or(1).max(1);
            let ami = evaluate_clustering_with_k(
                &outcome.params,
                &cfg.model,
                graph,
                features,
                k,
                &mut rng,
            )?;
            metrics.insert("ami".to_string(), 100.0 * ami);
        }
    }

    Ok(RepetitionRecord {
        index,
        seed,
        metrics,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

/// Runs every repetition and aggregates. Scores are reported in percent.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let total_timer = Instant::now();
    let graph = load_dataset(cfg)?;

    let features = if cfg.model.use_features {
        Some(graph.features().cloned().ok_or_else(|| {
            anyhow!(
                "model wants features but dataset `{}` has none",
                cfg.dataset_name
            )
        })?)
    } else {
        None
    };
    if cfg.task == TaskKind::Clustering && graph.labels().is_none() {
        bail!(
            "clustering needs ground-truth labels; dataset `{}` has none",
            cfg.dataset_name
        );
    }

    let run_indexed = |index: usize| {
        run_one(cfg, &graph, features.as_ref(), index).with_context(|| {
            format!(
                "repetition {index} (seed {}) failed; replay with master_seed {} ",
                derive_seed(cfg.master_seed, index as u64),
                cfg.master_seed
            )
        })
    };

    let repetitions: Vec<RepetitionRecord> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .context("building worker pool")?;
        pool.install(|| {
            (0..cfg.repetitions)
                .into_par_iter()
                .map(run_indexed)
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        (0..cfg.repetitions)
            .map(run_indexed)
            .collect::<Result<Vec<_>>>()?
    };

    let mut metric_names: Vec<String> = repetitions
        .first()
        .map(|r| r.metrics.keys().cloned().collect())
        .unwrap_or_default();
    metric_names.sort();
    let summaries: Vec<MetricSummaryRecord> = metric_names
        .iter()
        .map(|name| {
            let values: Vec<f64> = repetitions.iter().map(|r| r.metrics[name]).collect();
            let summary = MetricSummary::from_values(name.clone(), values);
            MetricSummaryRecord {
                metric: summary.name,
                per_run: summary.per_run,
                mean: summary.mean,
                std: summary.std,
            }
        })
        .collect();

    Ok(RunReport {
        config: config_echo(cfg),
        repetitions,
        summaries,
        software_version: format!("lgae {}", env!("CARGO_PKG_VERSION")),
        timestamp_unix_secs: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        total_wall_clock_secs: total_timer.elapsed().as_secs_f64(),
    })
}
