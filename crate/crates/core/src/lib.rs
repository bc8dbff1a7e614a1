//! Simulation and inference for the d-uniform hypergraph stochastic block model.
//!
//! The crate is organised around the two-stage exact-recovery pipeline:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`model`] | Parameters, assignment-vector combinatorics, degree profiles, the generalized Chernoff–Hellinger (GCH) divergence |
//! | [`sampler`] | Label draws, hypergraph generation, the two-way edge split |
//! | [`spectral`] | Stage 1: pair co-occurrence Laplacian, trimming, rank-k approximation, ball clustering |
//! | [`refine`] | Stage 2: per-node local MAP relabeling |
//! | [`eval`] | Misclassification proportion under the best label permutation |
//! | [`harness`] | Experiment configuration, seeded trials, sweeps, CSV/JSON output |
//!
//! Node ids and community indices are 0-based in memory. The text file
//! formats in [`hypergraph`] are 1-based.
//!
//! ```
//! use hsbm::model::{ModelParams, gch_threshold};
//!
//! // Two balanced communities, d = 2, in-rate 9 and cross-rate 1.
//! let params = ModelParams::symmetric(1000, 2, 2, 9.0, 1.0).unwrap();
//! let gch = gch_threshold(&params).unwrap();
//! assert!((gch.value - 2.0).abs() < 1e-8);
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod eval;
pub mod harness;
pub mod hypergraph;
pub mod model;
pub mod refine;
pub mod rng;
pub mod sampler;
pub mod spectral;

pub use error::{Error, Result};
pub use hypergraph::{Hypergraph, LabelVector};
pub use model::{AssignmentVector, ModelParams};
