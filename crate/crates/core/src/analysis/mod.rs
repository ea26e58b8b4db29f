//! Feasibility of Schmidt-rank vectors and weight solving for maximal
//! entanglement.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{
    enumerate_perfect_matchings, EdgeId, ExperimentGraph, ModeColor, PerfectMatching,
};
use crate::state::{StateError, Term};

pub mod feasibility;
pub mod weights;

pub use feasibility::{
    srv_feasibility, srv_table, FeasibilityKind, FeasibilityVerdict, TermBudget,
};
pub use weights::{
    coefficient_polynomials, solve_weights, solve_weights_numeric, CoefficientPolynomial,
    SolveMethod, WeightClass, WeightSolution,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("SRV({a},{b},{c}) must satisfy A >= B >= C >= 1")]
    SrvOrdering { a: usize, b: usize, c: usize },

    #[error(transparent)]
    State(#[from] StateError),

    #[error("weight class '{0}' is defined twice")]
    DuplicateClass(String),

    #[error("weight class refers to unknown edge {0}")]
    UnknownEdge(EdgeId),

    #[error("edge {0} belongs to two weight classes")]
    EdgeInTwoClasses(EdgeId),

    #[error("edge {0} belongs to no weight class")]
    UnclassifiedEdge(EdgeId),

    #[error("at least one weight class must be pinned")]
    NoPinnedClass,

    #[error("pinned class '{0}' does not exist")]
    UnknownClass(String),

    #[error("pinned class '{0}' has unusable value {1}")]
    BadPin(String, f64),

    #[error("graph has no perfect matchings")]
    NoMatchings,

    #[error(
        "no real weight assignment balances the terms (best coefficient imbalance {imbalance:.3e})"
    )]
    WeightsInfeasible { imbalance: f64 },

    #[error("W weights need an even party count of at least 4, got {0}")]
    InvalidW(usize),
}

/// Perfect matchings keyed by the term they produce. Every matching appears
/// in exactly one group, in canonical order.
pub fn group_matchings_by_term(
    graph: &ExperimentGraph,
) -> Result<BTreeMap<Term, Vec<PerfectMatching>>, AnalysisError> {
    let n = graph.vertex_count();
    if n < 2 || n % 2 == 1 {
        return Err(StateError::OddVertexCount(n).into());
    }
    let mut groups: BTreeMap<Term, Vec<PerfectMatching>> = BTreeMap::new();
    for matching in enumerate_perfect_matchings(graph) {
        let mut modes = vec![ModeColor::default(); n];
        for edge in matching.edges(graph) {
            modes[edge.u] = edge.color_u;
            modes[edge.v] = edge.color_v;
        }
        groups.entry(Term(modes)).or_default().push(matching);
    }
    Ok(groups)
}

/// Class weights that balance the W graph: the hub-excited class `alpha`,
/// the leaf-excited class `beta` and the all-ground class `gamma`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct WWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// The hub-excited term collects `n - 1` times as many matchings as each
/// leaf-excited term, so `beta = (n - 1) * alpha`.
pub fn w_weight_closed_form(n: usize) -> Result<WWeights, AnalysisError> {
    if n < 4 || n % 2 == 1 {
        return Err(AnalysisError::InvalidW(n));
    }
    Ok(WWeights {
        alpha: 1.0,
        beta: (n - 1) as f64,
        gamma: 1.0,
    })
}
