//! Shared fixtures for the benchmark targets.

use lgae::data::{generate_sbm, SbmConfig};
use lgae::linalg::{DenseMatrix, Graph};
use lgae::models::glorot_uniform;
use lgae::rng::rng_from_seed;

/// Two-block SBM with moderate density, n nodes total.
pub fn bench_graph(n: usize, seed: u64) -> Graph {
    let half = n / 2;
    generate_sbm(&SbmConfig {
        block_sizes: vec![half, n - half],
        p_in: 0.08,
        p_out: 0.01,
        seed,
    })
    .expect("valid sbm config")
}

pub fn bench_embedding(n: usize, d: usize, seed: u64) -> DenseMatrix {
    glorot_uniform(n, d, &mut rng_from_seed(seed))
}
