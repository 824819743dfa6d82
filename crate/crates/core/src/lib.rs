//! Arbitrage cycle detection for cryptocurrency market networks.
//!
//! Exchange rates are turned into an integer-weighted digraph, the minimum
//! weight cycle is found through a minimum weight triangle search over an
//! auxiliary tripartite graph, and the cycle is recovered from a witness
//! matrix of the distance product. Floyd-Warshall, the edge-plus-return-path
//! reduction and an exhaustive enumerator serve as independent cross-checks.

pub mod apsp;
pub mod error;
pub mod evaluate;
pub mod pipeline;
pub mod snapshot;
pub mod transform;
pub mod triangle;
pub mod witness;

pub use apsp::{CycleReport, DistanceMatrix, INF};
pub use error::{Error, Result};
pub use evaluate::{brute_force_best_cycle, brute_force_stratum, evaluate_cycle, BruteSource, Objective, ProfitReport};
pub use pipeline::{find_cycle, Method, PipelineConfig};
pub use snapshot::{
    build_graph, gen_synthetic, parse_snapshot, ExchangeGraph, Format, GraphConfig, NodeId, Plant,
    Quote, SnapshotStats, SyntheticSpec,
};
pub use transform::{backmap_cycle, transform, uniqueness_stats, TransformParams, TransformedGraph, UniquenessStats};
pub use triangle::{build_tripartite, min_triangle, TriangleResult, TripartiteGraph};
pub use witness::{reconstruct_cycle, unique_witnesses, witness_matrix, SamplerConfig, WitnessMatrix};
