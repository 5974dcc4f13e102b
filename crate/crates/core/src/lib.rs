//! Stability analysis for influence maximization.
//!
//! Influence maximization picks `k` seed nodes maximizing the expected
//! diffusion spread under the Independent Cascade or Linear Threshold model.
//! Its input parameters are noisy in practice, so this crate also quantifies
//! how much an adversary moving every edge parameter inside an interval can
//! distort any seed set's spread: it estimates and maximizes the spread
//! difference `spread(upper) - spread(lower)` between the two extremal
//! parameter vectors, alongside the standard maximization.
//!
//! The pieces: [`graph`] holds graphs and parameter vectors, [`netgen`] the
//! synthetic graph families, [`uncertainty`] the interval perturbation
//! model, [`diffusion`] live-edge simulation with exact oracles and coupled
//! Monte Carlo estimators, [`optimize`] the greedy selection algorithms over
//! pluggable objectives, and [`verify`] brute-force checkers and fixtures.
//! Everything randomized runs on counter-based streams ([`rng`]), so results
//! are a pure function of the inputs and the master seed, independent of
//! thread scheduling.

pub mod diffusion;
pub mod error;
pub mod graph;
pub mod netgen;
pub mod optimize;
pub mod rng;
pub mod uncertainty;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Graph, Model, NodeId, ParamVector, SeedSet};
