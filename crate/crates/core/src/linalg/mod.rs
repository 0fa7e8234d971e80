//! Sparse and dense matrix kernels plus graph normalization.
//!
//! Everything is 64-bit and immutable after construction. Kernels may
//! parallelize over rows internally, but the result is always identical to
//! the sequential computation for fixed inputs.

mod dense;
mod graph;
mod sparse;

pub use dense::{gemm, DenseMatrix};
pub use graph::{FeatureMatrix, Graph};
pub use sparse::{spmm, SparseMatrix};

use crate::error::{Error, Result};

/// Per-node weighted degree of a symmetric adjacency, optionally counting a
/// unit self-loop per node.
pub fn degree_vector(adjacency: &SparseMatrix, add_self_loops: bool) -> Result<Vec<f64>> {
    if adjacency.n_rows() != adjacency.n_cols() {
        return Err(Error::NotSquare {
            rows: adjacency.n_rows(),
            cols: adjacency.n_cols(),
        });
    }
    let base = if add_self_loops { 1.0 } else { 0.0 };
    Ok((0..adjacency.n_rows())
        .map(|i| {
            let (_, vals) = adjacency.row(i);
            base + vals.iter().sum::<f64>()
        })
        .collect())
}

/// Symmetric normalization with self-loops: D^{-1/2} (A + I) D^{-1/2},
/// where D is the degree matrix of A + I.
///
/// Every row of the result carries at least its diagonal entry; an isolated
/// node has degree 1 and a diagonal value of exactly 1. Off-diagonal values
/// are computed as `a_ij / sqrt(d_i * d_j)`: the degree product commutes
/// bitwise, so the (i, j) and (j, i) entries are bit-identical, and integer
/// degree products with exact square roots normalize exactly.
pub fn normalize_adjacency(adjacency: &SparseMatrix) -> Result<SparseMatrix> {
    if adjacency.n_rows() != adjacency.n_cols() {
        return Err(Error::NotSquare {
            rows: adjacency.n_rows(),
            cols: adjacency.n_cols(),
        });
    }
    for (i, j, v) in adjacency.iter_entries() {
        if v < 0.0 {
            return Err(Error::NegativeWeight {
                row: i,
                col: j,
                value: v,
            });
        }
    }
    let n = adjacency.n_rows();
    let degrees = degree_vector(adjacency, true)?;

    let mut triplets = Vec::with_capacity(adjacency.nnz() + n);
    for i in 0..n {
        triplets.push((i, i, 1.0 / degrees[i]));
        let (cols, vals) = adjacency.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            triplets.push((i, j, v / (degrees[i] * degrees[j]).sqrt()));
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SparseMatrix {
        SparseMatrix::from_triplets(3, 3, &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)])
            .unwrap()
    }

    #[test]
    fn normalize_two_node_edge() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let t = normalize_adjacency(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(t.get(i, j), 0.5);
            }
        }
    }

    #[test]
    fn normalize_isolated_node() {
        let a = SparseMatrix::zeros(1, 1);
        let t = normalize_adjacency(&a).unwrap();
        assert_eq!(t.get(0, 0), 1.0);
        assert_eq!(t.nnz(), 1);
    }

    #[test]
    fn normalize_path_matches_hand_computation() {
        // degrees of A + I are (2, 3, 2)
        let t = normalize_adjacency(&path3()).unwrap();
        let inv_sqrt6 = 1.0 / 6.0_f64.sqrt();
        assert!((t.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((t.get(0, 1) - inv_sqrt6).abs() < 1e-15);
        assert!((t.get(1, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((t.get(1, 2) - inv_sqrt6).abs() < 1e-15);
        assert!((t.get(2, 2) - 0.5).abs() < 1e-15);
        assert_eq!(t.get(0, 2), 0.0);
    }

    #[test]
    fn normalize_is_bit_symmetric() {
        let mut triplets = Vec::new();
        // weighted star plus a triangle, irregular degrees
        for &(i, j, w) in &[(0usize, 1usize, 0.3), (0, 2, 1.7), (0, 3, 2.2), (1, 2, 0.9)] {
            triplets.push((i, j, w));
            triplets.push((j, i, w));
        }
        let a = SparseMatrix::from_triplets(5, 5, &triplets).unwrap();
        let t = normalize_adjacency(&a).unwrap();
        for (i, j, v) in t.iter_entries() {
            assert_eq!(t.get(j, i).to_bits(), v.to_bits(), "entry ({i},{j})");
        }
    }

    #[test]
    fn normalize_rejects_negative_weight() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, -1.0), (1, 0, -1.0)]).unwrap();
        assert!(matches!(
            normalize_adjacency(&a),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn normalize_rejects_non_square() {
        let a = SparseMatrix::zeros(2, 3);
        assert!(matches!(
            normalize_adjacency(&a),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn degree_vector_examples() {
        let two = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(degree_vector(&two, true).unwrap(), vec![2.0, 2.0]);

        let empty = SparseMatrix::zeros(3, 3);
        assert_eq!(degree_vector(&empty, true).unwrap(), vec![1.0, 1.0, 1.0]);

        assert_eq!(degree_vector(&path3(), false).unwrap(), vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn principal_eigenpair_is_exact() {
        // A_hat * (D^{1/2} 1) = D^{1/2} 1
        let a = path3();
        let t = normalize_adjacency(&a).unwrap();
        let d = degree_vector(&a, true).unwrap();
        let v = DenseMatrix::from_vec(3, 1, d.iter().map(|x| x.sqrt()).collect()).unwrap();
        let out = spmm(&t, &v).unwrap();
        for i in 0..3 {
            assert!((out.get(i, 0) - v.get(i, 0)).abs() < 1e-10);
        }
    }
}
