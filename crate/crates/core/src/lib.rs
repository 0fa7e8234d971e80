//! Graph autoencoders with linear and GCN encoders, built from first
//! principles: CSR/dense kernels, exact reverse-mode gradients, Adam, and
//! the standard link-prediction and node-clustering evaluation protocol
//! (random edge splits, AUC/AP, k-means with AMI).
//!
//! The crate is organized around five modules:
//!
//! * [`linalg`] — sparse/dense matrices, `A_hat = D^{-1/2}(A + I)D^{-1/2}`
//! * [`models`] — encoders, reparameterization, inner-product decoder
//! * [`training`] — weighted cross entropy, KL, backprop, Adam, the loop
//! * [`eval`] — edge splits, ROC-AUC / AP, k-means, AMI
//! * [`data`] — citation-content and edge-list loaders, SBM fixtures
//!
//! Everything that consumes randomness takes an explicit [`rng::RunRng`]
//! stream; results are a pure function of inputs and seeds.
//!
//! ```
//! use lgae::eval::{evaluate_link_prediction, make_link_split};
//! use lgae::linalg::Graph;
//! use lgae::models::ModelSpec;
//! use lgae::rng::rng_from_seed;
//! use lgae::training::{train, TrainConfig};
//!
//! // a ring of 30 nodes plus a few chords
//! let mut edges: Vec<(usize, usize)> = (0..30).map(|i| (i, (i + 1) % 30)).collect();
//! edges.extend([(0, 15), (5, 20), (10, 25)]);
//! let graph = Graph::from_undirected_edges(30, &edges)?;
//!
//! let mut rng = rng_from_seed(7);
//! let split = make_link_split(&graph, 0.05, 0.10, &mut rng)?;
//! let spec = ModelSpec::linear(8, false, false);
//! let hp = TrainConfig { epochs: 100, learning_rate: 0.01, validation: None };
//! let outcome = train(&split.train_adjacency, None, &spec, &hp, &mut rng)?;
//! let (auc, ap) = evaluate_link_prediction(&outcome.params, &spec, &split, None)?;
//! assert!(auc >= 0.0 && auc <= 1.0 && ap <= 1.0);
//! # Ok::<(), lgae::Error>(())
//! ```

pub mod data;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod models;
pub mod rng;
pub mod training;

pub use error::{Error, Result};

pub use data::{DatasetDescriptor, DatasetFormat, LoadStats, SbmConfig};
pub use eval::{ClusteringResult, EdgeSplit, MetricSummary};
pub use linalg::{DenseMatrix, FeatureMatrix, Graph, SparseMatrix};
pub use models::{EncoderKind, ForwardCache, ModelSpec, Parameters};
pub use training::{GradientSet, LossConfig, OptimizerState, TrainConfig, TrainOutcome};
