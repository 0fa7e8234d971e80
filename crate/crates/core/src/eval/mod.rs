//! Evaluation: splits, ranking metrics, clustering metrics.

pub mod ami;
pub mod kmeans;
pub mod ranking;
pub mod split;

pub use ami::adjusted_mutual_information;
pub use kmeans::{kmeans, ClusteringResult, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use ranking::{average_precision, roc_auc};
pub use split::{make_link_split, EdgeSplit, DEFAULT_TEST_FRACTION, DEFAULT_VAL_FRACTION};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{normalize_adjacency, FeatureMatrix, Graph};
use crate::models::{self, ModelSpec, Parameters};

/// Per-run metric values with their mean and sample standard deviation
/// (n - 1 denominator; 0 by convention for a single run).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub name: String,
    pub per_run: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl MetricSummary {
    pub fn from_values(name: impl Into<String>, per_run: Vec<f64>) -> Self {
        let n = per_run.len();
        let mean = if n == 0 {
            0.0
        } else {
            per_run.iter().sum::<f64>() / n as f64
        };
        let std = if n < 2 {
            0.0
        } else {
            let ss: f64 = per_run.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        Self {
            name: name.into(),
            per_run,
            mean,
            std,
        }
    }
}

/// Scores held-out edges with the trained embedding (posterior mean for
/// variational models) and returns (AUC, AP) on the test sets.
pub fn evaluate_link_prediction(
    params: &Parameters,
    spec: &ModelSpec,
    split: &EdgeSplit,
    features: Option<&FeatureMatrix>,
) -> Result<(f64, f64)> {
    if split.test_pos.is_empty() || split.test_neg.is_empty() {
        return Err(Error::EmptyInput("evaluate_link_prediction: test sets"));
    }
    let a_norm = normalize_adjacency(&split.train_adjacency)?;
    let z = models::embed(&a_norm, features, params, spec)?;
    let pos = models::score_edges(&z, &split.test_pos)?;
    let neg = models::score_edges(&z, &split.test_neg)?;
    Ok((roc_auc(&pos, &neg)?, average_precision(&pos, &neg)?))
}

/// Embeds the complete graph, clusters with k-means (k = number of
/// ground-truth classes) and scores AMI against the labels.
pub fn evaluate_clustering<R: Rng>(
    params: &Parameters,
    spec: &ModelSpec,
    graph: &Graph,
    features: Option<&FeatureMatrix>,
    rng: &mut R,
) -> Result<f64> {
    let k = graph.n_classes().unwrap_or(0).max(1);
    evaluate_clustering_with_k(params, spec, graph, features, k, rng)
}

/// Same, with an explicit cluster count (k may differ from the number of
/// ground-truth classes; AMI compares arbitrary partitions).
pub fn evaluate_clustering_with_k<R: Rng>(
    params: &Parameters,
    spec: &ModelSpec,
    graph: &Graph,
    features: Option<&FeatureMatrix>,
    k: usize,
    rng: &mut R,
) -> Result<f64> {
    let labels = graph.labels().ok_or(Error::MissingLabels)?;
    let a_norm = normalize_adjacency(graph.adjacency())?;
    let z = models::embed(&a_norm, features, params, spec)?;
    let clustering = kmeans(&z, k, rng, DEFAULT_MAX_ITER, DEFAULT_TOL)?;
    adjusted_mutual_information(&clustering.assignments, labels)
}
