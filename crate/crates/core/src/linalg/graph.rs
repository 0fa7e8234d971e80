//! Undirected graphs: symmetric adjacency, optional node features and labels.

use crate::error::{Error, Result};

use super::dense::DenseMatrix;
use super::sparse::SparseMatrix;

/// Node feature matrix, sparse (bag-of-words) or dense (real-valued).
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMatrix {
    Sparse(SparseMatrix),
    Dense(DenseMatrix),
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        match self {
            FeatureMatrix::Sparse(m) => m.n_rows(),
            FeatureMatrix::Dense(m) => m.n_rows(),
        }
    }

    pub fn n_cols(&self) -> usize {
        match self {
            FeatureMatrix::Sparse(m) => m.n_cols(),
            FeatureMatrix::Dense(m) => m.n_cols(),
        }
    }
}

/// An undirected graph. The adjacency is symmetric with a zero diagonal;
/// self-loops only ever appear inside [`super::normalize_adjacency`].
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: SparseMatrix,
    features: Option<FeatureMatrix>,
    labels: Option<Vec<usize>>,
    is_weighted: bool,
}

impl Graph {
    pub fn new(
        adjacency: SparseMatrix,
        features: Option<FeatureMatrix>,
        labels: Option<Vec<usize>>,
        is_weighted: bool,
    ) -> Result<Self> {
        if adjacency.n_rows() != adjacency.n_cols() {
            return Err(Error::NotSquare {
                rows: adjacency.n_rows(),
                cols: adjacency.n_cols(),
            });
        }
        let n = adjacency.n_rows();
        for (i, j, v) in adjacency.iter_entries() {
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if adjacency.get(j, i) != v {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
        if let Some(f) = &features {
            if f.n_rows() != n {
                return Err(Error::ShapeMismatch {
                    op: "Graph::new",
                    details: format!("features have {} rows for {} nodes", f.n_rows(), n),
                });
            }
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::ShapeMismatch {
                    op: "Graph::new",
                    details: format!("{} labels for {} nodes", l.len(), n),
                });
            }
            let k = l.iter().copied().max().map_or(0, |m| m + 1);
            let mut seen = vec![false; k];
            for &c in l {
                seen[c] = true;
            }
            if !seen.iter().all(|&s| s) {
                return Err(Error::BadLabels);
            }
        }
        Ok(Self {
            adjacency,
            features,
            labels,
            is_weighted,
        })
    }

    /// Builds an unweighted graph from undirected edges given as (i, j) pairs.
    /// Each pair is stored in both directions; duplicates collapse to one edge.
    pub fn from_undirected_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut triplets = Vec::with_capacity(edges.len() * 2);
        for &(i, j) in edges {
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            triplets.push((i, j, 1.0));
            triplets.push((j, i, 1.0));
        }
        let raw = SparseMatrix::from_triplets(n, n, &triplets)?;
        // duplicate input pairs would have summed; clamp back to 0/1
        let ones: Vec<(usize, usize, f64)> =
            raw.iter_entries().map(|(i, j, _)| (i, j, 1.0)).collect();
        let adjacency = SparseMatrix::from_triplets(n, n, &ones)?;
        Self::new(adjacency, None, None, false)
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    pub fn features(&self) -> Option<&FeatureMatrix> {
        self.features.as_ref()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.is_weighted
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.n_rows()
    }

    /// Number of undirected edges m.
    pub fn n_edges(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }

    /// Undirected edge list with i < j, in row-major order.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter_entries()
            .filter(|&(i, j, _)| i < j)
            .map(|(i, j, _)| (i, j))
            .collect()
    }

    pub fn with_features(mut self, features: Option<FeatureMatrix>) -> Result<Self> {
        if let Some(f) = &features {
            if f.n_rows() != self.n_nodes() {
                return Err(Error::ShapeMismatch {
                    op: "Graph::with_features",
                    details: format!(
                        "features have {} rows for {} nodes",
                        f.n_rows(),
                        self.n_nodes()
                    ),
                });
            }
        }
        self.features = features;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_adjacency() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            Graph::new(m, None, None, false),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn rejects_stored_self_loop() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0)]).unwrap();
        assert!(matches!(
            Graph::new(m, None, None, false),
            Err(Error::SelfLoop(0))
        ));
    }

    #[test]
    fn rejects_non_contiguous_labels() {
        let g = Graph::from_undirected_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let adj = g.adjacency().clone();
        assert!(matches!(
            Graph::new(adj, None, Some(vec![0, 2, 2]), false),
            Err(Error::BadLabels)
        ));
    }

    #[test]
    fn edge_bookkeeping() {
        let g = Graph::from_undirected_edges(4, &[(0, 1), (1, 2), (1, 2)]).unwrap();
        assert_eq!(g.n_nodes(), 4);
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.undirected_edges(), vec![(0, 1), (1, 2)]);
    }
}
