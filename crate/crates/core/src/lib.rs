//! Heterogeneous graph propagation engine for tripartite (group-user-item)
//! social recommendation: per-relation personalized-PageRank propagation with
//! learnable nonlinear steps, attention fusion of the per-relation node
//! embeddings, a dot-product CTR head, heterogeneity-aware layer sampling,
//! and a synthetic-data experiment harness.
//!
//! The numeric core is generic over the scalar type (f32/f64 via
//! [`scalar::Scalar`]); training, checkpoints, and the experiment harness are
//! pinned to f64 through the aliases below.

pub mod hetgraph;
pub mod numerics;
pub mod rng;
pub mod scalar;

pub use hetgraph::{build_graph, normalized_adjacency, EdgeType, HetGraph, NodeType, TypedEdge};
pub use numerics::{adam_step, AdamConfig, AdamState, Dense};
pub use scalar::Scalar;

/// f64 matrix, the precision every shipped pipeline runs at.
pub type Mat = numerics::Dense<f64>;
/// f32 matrix for callers that trade precision for footprint.
pub type Mat32 = numerics::Dense<f32>;
/// f64 normalized adjacency.
pub type Adj = hetgraph::NormAdj<f64>;
/// f32 normalized adjacency.
pub type Adj32 = hetgraph::NormAdj<f32>;
