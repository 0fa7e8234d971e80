//! Link-prediction edge splits.
//!
//! 15% of edges removed by default: 5% validation, 10% test (floor
//! rounding, remainder stays in train). Negatives are non-edges of the
//! original graph, sampled without replacement and disjoint between
//! validation and test. No connectivity guarantee is made.

use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{Graph, SparseMatrix};

pub const DEFAULT_VAL_FRACTION: f64 = 0.05;
pub const DEFAULT_TEST_FRACTION: f64 = 0.10;

/// Train adjacency plus held-out positive and sampled negative pairs.
/// All pairs are stored with i < j.
#[derive(Debug, Clone)]
pub struct EdgeSplit {
    pub train_adjacency: SparseMatrix,
    pub val_pos: Vec<(usize, usize)>,
    pub val_neg: Vec<(usize, usize)>,
    pub test_pos: Vec<(usize, usize)>,
    pub test_neg: Vec<(usize, usize)>,
}

pub fn make_link_split<R: Rng>(
    graph: &Graph,
    val_frac: f64,
    test_frac: f64,
    rng: &mut R,
) -> Result<EdgeSplit> {
    if !(0.0..1.0).contains(&val_frac)
        || !(0.0..1.0).contains(&test_frac)
        || val_frac + test_frac >= 1.0
    {
        return Err(Error::InvalidArgument(format!(
            "split fractions must lie in [0, 1) and sum below 1, got val {val_frac}, test {test_frac}"
        )));
    }
    let n = graph.n_nodes();
    let mut edges = graph.undirected_edges();
    let m = edges.len();
    let n_val = (val_frac * m as f64).floor() as usize;
    let n_test = (test_frac * m as f64).floor() as usize;
    if n_val + n_test >= m {
        return Err(Error::SplitInfeasible(format!(
            "graph has {m} edges; removing {} leaves no train edges",
            n_val + n_test
        )));
    }
    let needed_negatives = n_val + n_test;
    let possible_negatives = n * (n - 1) / 2 - m;
    if needed_negatives > possible_negatives {
        return Err(Error::SplitInfeasible(format!(
            "need {needed_negatives} negatives but only {possible_negatives} non-edges exist"
        )));
    }

    edges.shuffle(rng);
    let test_pos: Vec<(usize, usize)> = edges[..n_test].to_vec();
    let val_pos: Vec<(usize, usize)> = edges[n_test..n_test + n_val].to_vec();
    let train_edges = &edges[n_test + n_val..];

    let adjacency = graph.adjacency();
    let mut triplets = Vec::with_capacity(train_edges.len() * 2);
    for &(i, j) in train_edges {
        let w = adjacency.get(i, j);
        triplets.push((i, j, w));
        triplets.push((j, i, w));
    }
    let train_adjacency = SparseMatrix::from_triplets(n, n, &triplets)?;

    // Negative sampling: rejection against the original edge set, falling
    // back to full enumeration when non-edges are scarce.
    let mut negatives: Vec<(usize, usize)> = Vec::with_capacity(needed_negatives);
    if needed_negatives > 0 {
        if needed_negatives * 3 >= possible_negatives {
            let mut all: Vec<(usize, usize)> = Vec::with_capacity(possible_negatives);
            for i in 0..n {
                for j in (i + 1)..n {
                    if !adjacency.contains(i, j) {
                        all.push((i, j));
                    }
                }
            }
            all.shuffle(rng);
            negatives.extend_from_slice(&all[..needed_negatives]);
        } else {
            let mut taken: HashSet<(usize, usize)> = HashSet::with_capacity(needed_negatives);
            while negatives.len() < needed_negatives {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                if a == b {
                    continue;
                }
                let pair = (a.min(b), a.max(b));
                if adjacency.contains(pair.0, pair.1) || !taken.insert(pair) {
                    continue;
                }
                negatives.push(pair);
            }
        }
    }
    let test_neg = negatives[..n_test].to_vec();
    let val_neg = negatives[n_test..].to_vec();

    Ok(EdgeSplit {
        train_adjacency,
        val_pos,
        val_neg,
        test_pos,
        test_neg,
    })
}
