//! Photonic pair-source experiments as edge-colored weighted multigraphs.
//!
//! Vertices are photon paths, edges are crystals, and every perfect matching
//! is one coincidence event. The crate simulates a graph into its
//! post-selected state, synthesizes graphs for GHZ, W, Dicke, Schmidt-rank
//! vector and AME targets, and decides which three-party Schmidt-rank vectors
//! are reachable with four paths.

pub mod analysis;
pub mod constructors;
pub mod graph;
pub mod io;
pub mod state;
pub mod target;

pub use num_complex::Complex64;

pub use graph::{
    enumerate_perfect_matchings, is_perfect_matching, max_disjoint_perfect_matchings,
    DisjointPacking, Edge, EdgeId, EdgeSpec, ExperimentGraph, GraphError, ModeColor,
    PerfectMatching,
};
pub use state::{
    classify, is_maximally_entangled, normalize, reference_state, schmidt_rank_vector,
    state_from_graph, states_equal, strip_trigger, QuantumState, SrVector, StateError, StateLabel,
    Term,
};
pub use target::TargetSpec;
