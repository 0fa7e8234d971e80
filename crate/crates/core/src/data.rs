//! Dataset ingestion and synthetic graph generation.
//!
//! Two on-disk formats are understood:
//!
//! * `citation-content`: a content file of `node_id <ws> f feature values
//!   <ws> class_label` lines plus a cites file of `cited_id <ws> citing_id`
//!   lines. Citation direction is dropped; features are kept sparse.
//! * `edge-list-tsv`: whitespace-separated `src dst [weight]` lines, `#`
//!   and `%` comments skipped. Self-loops are dropped, parallel edges
//!   collapsed (summed when weighted), the result symmetrized.
//!
//! Node ids are compacted to 0..n-1 by sorted original id (numeric when
//! every id parses as an integer, else lexicographic), so loading is
//! insensitive to line order. Datasets are read from local files only.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, FeatureMatrix, Graph, SparseMatrix};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    CitationContent,
    EdgeListTsv,
}

impl DatasetFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "citation-content" => Ok(Self::CitationContent),
            "edge-list-tsv" => Ok(Self::EdgeListTsv),
            other => Err(Error::InvalidArgument(format!(
                "unknown dataset format `{other}`"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CitationContent => "citation-content",
            Self::EdgeListTsv => "edge-list-tsv",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DatasetDescriptor {
    pub name: String,
    pub edge_path: PathBuf,
    /// Content file for `citation-content`; optional dense feature file
    /// (`node_id v1 .. vf` lines) for `edge-list-tsv`.
    pub feature_path: Option<PathBuf>,
    /// Optional `node_id label` file for `edge-list-tsv`.
    pub label_path: Option<PathBuf>,
    pub format: DatasetFormat,
    pub binarize: bool,
    pub directed_input: bool,
    /// Divide each feature row by its sum. Off by default.
    pub row_normalize_features: bool,
}

impl DatasetDescriptor {
    pub fn citation(
        name: impl Into<String>,
        content: impl Into<PathBuf>,
        cites: impl Into<PathBuf>,
    ) -> Self {
        Self {
            name: name.into(),
            edge_path: cites.into(),
            feature_path: Some(content.into()),
            label_path: None,
            format: DatasetFormat::CitationContent,
            binarize: true,
            directed_input: true,
            row_normalize_features: false,
        }
    }

    pub fn edge_list(name: impl Into<String>, path: impl Into<PathBuf>) -> Self {
        Self {
            name: name.into(),
            edge_path: path.into(),
            feature_path: None,
            label_path: None,
            format: DatasetFormat::EdgeListTsv,
            binarize: true,
            directed_input: true,
            row_normalize_features: false,
        }
    }
}

/// Counters for the clean-up a loader performed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Edge lines referencing ids absent from the node set.
    pub skipped_edges: usize,
    pub dropped_self_loops: usize,
    /// Extra directed lines that mapped onto an already-seen undirected pair.
    pub collapsed_duplicates: usize,
    /// Feature/label rows for unknown node ids.
    pub skipped_attribute_rows: usize,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Sorted-id compaction: numeric order when every id is an integer,
/// lexicographic otherwise.
fn sorted_node_ids(ids: impl Iterator<Item = String>) -> Vec<String> {
    let mut ids: Vec<String> = ids.collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.iter().all(|s| s.parse::<u128>().is_ok()) {
        ids.sort_by_key(|s| s.parse::<u128>().expect("checked numeric"));
    }
    ids
}

fn index_of(ids: &[String]) -> BTreeMap<&str, usize> {
    ids.iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect()
}

pub fn load_citation_dataset(desc: &DatasetDescriptor) -> Result<(Graph, LoadStats)> {
    if desc.format != DatasetFormat::CitationContent {
        return Err(Error::InvalidArgument(
            "load_citation_dataset requires format = citation-content".into(),
        ));
    }
    let content_path = desc.feature_path.as_deref().ok_or_else(|| {
        Error::InvalidArgument("citation-content needs a content file as feature_path".into())
    })?;

    // content file: node id, f feature values, class label
    let mut raw: Vec<(String, Vec<f64>, String)> = Vec::new();
    let mut n_features: Option<usize> = None;
    for (lineno, line) in open(content_path)?.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: content_path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 3 {
            return Err(parse_error(
                content_path,
                lineno + 1,
                "expected `id features... label`",
            ));
        }
        let f = tokens.len() - 2;
        match n_features {
            None => n_features = Some(f),
            Some(expected) if expected != f => {
                return Err(parse_error(
                    content_path,
                    lineno + 1,
                    format!("{f} feature values, expected {expected}"),
                ));
            }
            _ => {}
        }
        let mut values = Vec::with_capacity(f);
        for tok in &tokens[1..1 + f] {
            let v: f64 = tok.parse().map_err(|_| {
                parse_error(
                    content_path,
                    lineno + 1,
                    format!("bad feature value `{tok}`"),
                )
            })?;
            values.push(v);
        }
        raw.push((
            tokens[0].to_string(),
            values,
            tokens[tokens.len() - 1].to_string(),
        ));
    }
    if raw.is_empty() {
        return Err(Error::EmptyGraph(desc.name.clone()));
    }
    let n_features = n_features.expect("raw non-empty");

    let ids = sorted_node_ids(raw.iter().map(|(id, _, _)| id.clone()));
    if ids.len() != raw.len() {
        return Err(parse_error(
            content_path,
            0,
            "duplicate node id in content file",
        ));
    }
    let index = index_of(&ids);
    let n = ids.len();

    let mut class_names: Vec<String> = raw.iter().map(|(_, _, c)| c.clone()).collect();
    class_names.sort_unstable();
    class_names.dedup();
    let class_index: BTreeMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut labels = vec![0usize; n];
    let mut feature_triplets: Vec<(usize, usize, f64)> = Vec::new();
    for (id, values, class) in &raw {
        let node = index[id.as_str()];
        labels[node] = class_index[class.as_str()];
        let row_sum: f64 = values.iter().sum();
        let scale = if desc.row_normalize_features && row_sum > 0.0 {
            1.0 / row_sum
        } else {
            1.0
        };
        for (col, &v) in values.iter().enumerate() {
            if v != 0.0 {
                feature_triplets.push((node, col, v * scale));
            }
        }
    }
    let features = SparseMatrix::from_triplets(n, n_features, &feature_triplets)?;

    // cites file: `cited_id citing_id`, direction dropped
    let mut stats = LoadStats::default();
    let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (lineno, line) in open(&desc.edge_path)?.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: desc.edge_path.display().to_string(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_error(
                &desc.edge_path,
                lineno + 1,
                "expected `cited_id citing_id`",
            ));
        }
        let (a, b) = match (index.get(tokens[0]), index.get(tokens[1])) {
            (Some(&a), Some(&b)) => (a, b),
            _ => {
                stats.skipped_edges += 1;
                continue;
            }
        };
        if a == b {
            stats.dropped_self_loops += 1;
            continue;
        }
        let key = (a.min(b), a.max(b));
        if pairs.insert(key, 1.0).is_some() {
            stats.collapsed_duplicates += 1;
        }
    }

    let adjacency = adjacency_from_pairs(n, &pairs)?;
    let graph = Graph::new(
        adjacency,
        Some(FeatureMatrix::Sparse(features)),
        Some(labels),
        false,
    )?;
    Ok((graph, stats))
}

pub fn load_edge_list(desc: &DatasetDescriptor) -> Result<(Graph, LoadStats)> {
    if desc.format != DatasetFormat::EdgeListTsv {
        return Err(Error::InvalidArgument(
            "load_edge_list requires format = edge-list-tsv".into(),
        ));
    }
    let path = &desc.edge_path;
    let mut raw: Vec<(String, String, f64)> = Vec::new();
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let weight = match tokens.len() {
            2 => 1.0,
            3 => tokens[2].parse::<f64>().map_err(|_| {
                parse_error(path, lineno + 1, format!("bad weight `{}`", tokens[2]))
            })?,
            _ => {
                return Err(parse_error(
                    path,
                    lineno + 1,
                    "expected `src dst` or `src dst weight`",
                ))
            }
        };
        if weight < 0.0 {
            return Err(parse_error(
                path,
                lineno + 1,
                format!("negative edge weight {weight}"),
            ));
        }
        raw.push((tokens[0].to_string(), tokens[1].to_string(), weight));
    }

    let ids = sorted_node_ids(
        raw.iter()
            .flat_map(|(a, b, _)| [a.clone(), b.clone()].into_iter()),
    );
    if ids.is_empty() {
        return Err(Error::EmptyGraph(desc.name.clone()));
    }
    let index = index_of(&ids);
    let n = ids.len();

    let mut stats = LoadStats::default();
    let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (a, b, w) in &raw {
        let (a, b) = (index[a.as_str()], index[b.as_str()]);
        if a == b {
            stats.dropped_self_loops += 1;
            continue;
        }
        let key = (a.min(b), a.max(b));
        match pairs.get_mut(&key) {
            Some(acc) => {
                *acc += w;
                stats.collapsed_duplicates += 1;
            }
            None => {
                pairs.insert(key, *w);
            }
        }
    }

    let weighted = !desc.binarize && pairs.values().any(|&w| w != 1.0);
    if desc.binarize {
        for w in pairs.values_mut() {
            *w = 1.0;
        }
    }
    let adjacency = adjacency_from_pairs(n, &pairs)?;

    let features = match &desc.feature_path {
        Some(feature_path) => {
            let (features, skipped) =
                load_dense_features(feature_path, &index, n, desc.row_normalize_features)?;
            stats.skipped_attribute_rows += skipped;
            Some(FeatureMatrix::Dense(features))
        }
        None => None,
    };
    let labels = match &desc.label_path {
        Some(label_path) => Some(load_labels(label_path, &index, n)?),
        None => None,
    };
    let graph = Graph::new(adjacency, features, labels, weighted)?;
    Ok((graph, stats))
}

fn adjacency_from_pairs(n: usize, pairs: &BTreeMap<(usize, usize), f64>) -> Result<SparseMatrix> {
    let mut triplets = Vec::with_capacity(pairs.len() * 2);
    for (&(a, b), &w) in pairs {
        triplets.push((a, b, w));
        triplets.push((b, a, w));
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

fn load_dense_features(
    path: &Path,
    index: &BTreeMap<&str, usize>,
    n: usize,
    row_normalize: bool,
) -> Result<(DenseMatrix, usize)> {
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut skipped = 0usize;
    let mut width: Option<usize> = None;
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() < 2 {
            return Err(parse_error(path, lineno + 1, "expected `id v1 .. vf`"));
        }
        let f = tokens.len() - 1;
        match width {
            None => width = Some(f),
            Some(expected) if expected != f => {
                return Err(parse_error(
                    path,
                    lineno + 1,
                    format!("{f} values, expected {expected}"),
                ));
            }
            _ => {}
        }
        let Some(&node) = index.get(tokens[0]) else {
            skipped += 1;
            continue;
        };
        let mut values = Vec::with_capacity(f);
        for tok in &tokens[1..] {
            values.push(tok.parse::<f64>().map_err(|_| {
                parse_error(path, lineno + 1, format!("bad feature value `{tok}`"))
            })?);
        }
        if row_normalize {
            let s: f64 = values.iter().sum();
            if s > 0.0 {
                for v in &mut values {
                    *v /= s;
                }
            }
        }
        rows.push((node, values));
    }
    let width = width.ok_or(Error::EmptyInput("feature file"))?;
    let mut features = DenseMatrix::zeros(n, width);
    for (node, values) in rows {
        features.row_mut(node).copy_from_slice(&values);
    }
    Ok((features, skipped))
}

fn load_labels(path: &Path, index: &BTreeMap<&str, usize>, n: usize) -> Result<Vec<usize>> {
    let mut assigned: Vec<Option<String>> = vec![None; n];
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_error(path, lineno + 1, "expected `id label`"));
        }
        if let Some(&node) = index.get(tokens[0]) {
            assigned[node] = Some(tokens[1].to_string());
        }
    }
    let mut class_names: Vec<String> = assigned.iter().flatten().cloned().collect();
    class_names.sort_unstable();
    class_names.dedup();
    let class_index: BTreeMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    assigned
        .iter()
        .enumerate()
        .map(|(node, label)| {
            label
                .as_deref()
                .map(|l| class_index[l])
                .ok_or_else(|| parse_error(path, 0, format!("node index {node} has no label")))
        })
        .collect()
}

/// Writes the graph as `src<TAB>dst[<TAB>weight]` lines with i < j and
/// `\n` endings. Node ids are the 0-based compacted indices, so a load of
/// the exported file reproduces the adjacency exactly.
pub fn export_edge_list(graph: &Graph, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    let adjacency = graph.adjacency();
    let write_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    for (i, j, w) in adjacency.iter_entries() {
        if i >= j {
            continue;
        }
        if graph.is_weighted() {
            writeln!(out, "{i}\t{j}\t{w}").map_err(write_err)?;
        } else {
            writeln!(out, "{i}\t{j}").map_err(write_err)?;
        }
    }
    out.flush().map_err(write_err)
}

/// Stochastic block model configuration: within-block probability `p_in`,
/// cross-block probability `p_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmConfig {
    pub block_sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

pub fn generate_sbm(cfg: &SbmConfig) -> Result<Graph> {
    if cfg.block_sizes.is_empty() || cfg.block_sizes.contains(&0) {
        return Err(Error::InvalidArgument(
            "sbm: block sizes must be non-empty and positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&cfg.p_out) || !(0.0..=1.0).contains(&cfg.p_in) || cfg.p_out > cfg.p_in
    {
        return Err(Error::InvalidArgument(
            "sbm: need 0 <= p_out <= p_in <= 1".into(),
        ));
    }
    let n: usize = cfg.block_sizes.iter().sum();
    let mut labels = Vec::with_capacity(n);
    for (block, &size) in cfg.block_sizes.iter().enumerate() {
        labels.extend(std::iter::repeat_n(block, size));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] {
                cfg.p_in
            } else {
                cfg.p_out
            };
            if rng.random_bool(p) {
                triplets.push((i, j, 1.0));
                triplets.push((j, i, 1.0));
            }
        }
    }
    let adjacency = SparseMatrix::from_triplets(n, n, &triplets)?;
    Graph::new(adjacency, None, Some(labels), false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sbm_disjoint_triangles() {
        let cfg = SbmConfig {
            block_sizes: vec![3, 3],
            p_in: 1.0,
            p_out: 0.0,
            seed: 1,
        };
        let g = generate_sbm(&cfg).unwrap();
        assert_eq!(g.n_nodes(), 6);
        assert_eq!(g.n_edges(), 6); // two K3s
        assert!(g.adjacency().contains(0, 1));
        assert!(!g.adjacency().contains(0, 3));
        assert_eq!(g.labels().unwrap(), &[0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn sbm_empty_graph() {
        let cfg = SbmConfig {
            block_sizes: vec![4],
            p_in: 0.0,
            p_out: 0.0,
            seed: 1,
        };
        let g = generate_sbm(&cfg).unwrap();
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn sbm_edge_count_matches_binomial_expectation() {
        // blocks [50, 50], p_in 0.3, p_out 0.01:
        // E[m] = 2 * C(50,2) * 0.3 + 2500 * 0.01 = 760, sd = sqrt(539.25)
        let seeds = 10;
        let mut total = 0usize;
        for seed in 0..seeds {
            let cfg = SbmConfig {
                block_sizes: vec![50, 50],
                p_in: 0.3,
                p_out: 0.01,
                seed,
            };
            total += generate_sbm(&cfg).unwrap().n_edges();
        }
        let mean = total as f64 / seeds as f64;
        let tolerance = 4.0 * 539.25_f64.sqrt() / (seeds as f64).sqrt();
        assert!(
            (mean - 760.0).abs() < tolerance,
            "mean {mean} not within {tolerance} of 760"
        );
    }

    #[test]
    fn sbm_rejects_bad_probabilities() {
        let cfg = SbmConfig {
            block_sizes: vec![3],
            p_in: 0.1,
            p_out: 0.5,
            seed: 0,
        };
        assert!(generate_sbm(&cfg).is_err());
    }

    #[test]
    fn numeric_ids_sort_numerically() {
        let ids = sorted_node_ids(["10", "2", "1"].into_iter().map(String::from));
        assert_eq!(ids, vec!["1", "2", "10"]);
        let mixed = sorted_node_ids(["10", "node2", "1"].into_iter().map(String::from));
        assert_eq!(mixed, vec!["1", "10", "node2"]);
    }
}
