//! Graph constructions for the supported target families, plus the
//! synthesize-and-verify entry point.
//!
//! Layout conventions:
//! - vertices are labelled `a, b, c, ...` in index order;
//! - four-vertex SRV and AME graphs use `a, b, c` for the parties and `t`
//!   (index 3) for the trigger, which emits mode 0 in every term;
//! - Dicke-type graphs put the all-ground block `K_{n-m}` first and the
//!   excited block `K_m` last.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::analysis::{
    solve_weights, srv_feasibility, w_weight_closed_form, AnalysisError, FeasibilityVerdict,
    WeightClass, WeightSolution,
};
use crate::graph::{max_disjoint_perfect_matchings, EdgeId, EdgeSpec, ExperimentGraph, GraphError};
use crate::state::{
    is_maximally_entangled, normalize, reference_state, schmidt_rank_vector, state_from_graph,
    states_equal, strip_trigger, QuantumState, SrVector, StateError, DEFAULT_TOL,
};
use crate::target::TargetSpec;

/// Vertex index of the trigger in four-vertex SRV and AME graphs.
pub const TRIGGER: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error("{target} cannot be realized with pair sources: {reason}")]
    Unrealizable {
        target: TargetSpec,
        reason: &'static str,
    },

    #[error("{target} is not constructible ({verdict})")]
    Infeasible {
        target: TargetSpec,
        verdict: FeasibilityVerdict,
    },

    #[error("invalid target {target}: {reason}")]
    InvalidTarget {
        target: TargetSpec,
        reason: &'static str,
    },

    #[error("{target} is not supported: {reason}")]
    Unsupported {
        target: TargetSpec,
        reason: &'static str,
    },

    #[error("verification of {target} failed: {detail}")]
    VerificationFailed { target: TargetSpec, detail: String },

    #[error(transparent)]
    Analysis(#[from] AnalysisError),

    #[error(transparent)]
    State(#[from] StateError),

    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type ConstructResult<T> = Result<T, ConstructError>;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(vertex_label).collect()
}

/// `a`..`z`, then `a1`, `b1`, ...
fn vertex_label(i: usize) -> String {
    let letter = char::from(b'a' + (i % 26) as u8);
    match i / 26 {
        0 => letter.to_string(),
        round => format!("{letter}{round}"),
    }
}

fn even_at_least(target: TargetSpec, n: usize, min: usize) -> ConstructResult<()> {
    if n < min || n % 2 == 1 {
        return Err(ConstructError::InvalidTarget {
            target,
            reason: "party count must be even and large enough; odd counts need a trigger photon",
        });
    }
    Ok(())
}

/// GHZ graph: for `d = 2` two disjoint perfect matchings forming one
/// Hamiltonian cycle, coloured all-0 and all-1; for `(4, 3)` the three
/// disjoint matchings of `K4` coloured 0, 1 and 2.
pub fn ghz_graph(n: usize, d: usize) -> ConstructResult<ExperimentGraph> {
    let target = TargetSpec::Ghz { n, d };
    even_at_least(target, n, 4)?;
    match d {
        2 => {
            let pairs = n / 2;
            let mut specs: Vec<EdgeSpec> = (0..pairs)
                .map(|p| EdgeSpec::new(2 * p, 2 * p + 1, 0, 0, 1.0))
                .collect();
            // walk pair p forwards when p is even and backwards when odd
            let entry = |p: usize| {
                if p.is_multiple_of(2) {
                    2 * p
                } else {
                    2 * p + 1
                }
            };
            let exit = |p: usize| {
                if p.is_multiple_of(2) {
                    2 * p + 1
                } else {
                    2 * p
                }
            };
            let mut links: Vec<(usize, usize)> = (0..pairs)
                .map(|p| {
                    let next = if p + 1 == pairs { 0 } else { entry(p + 1) };
                    let (u, v) = (exit(p), next);
                    (u.min(v), u.max(v))
                })
                .collect();
            links.sort_unstable();
            specs.extend(
                links
                    .into_iter()
                    .map(|(u, v)| EdgeSpec::new(u, v, 1, 1, 1.0)),
            );
            Ok(ExperimentGraph::build(labels(n), specs)?)
        }
        3 if n == 4 => Ok(ExperimentGraph::build(
            labels(4),
            [
                EdgeSpec::new(0, 1, 0, 0, 1.0),
                EdgeSpec::new(2, 3, 0, 0, 1.0),
                EdgeSpec::new(0, 2, 1, 1, 1.0),
                EdgeSpec::new(1, 3, 1, 1, 1.0),
                EdgeSpec::new(0, 3, 2, 2, 1.0),
                EdgeSpec::new(1, 2, 2, 2, 1.0),
            ],
        )?),
        0 | 1 => Err(ConstructError::InvalidTarget {
            target,
            reason: "dimension must be at least 2",
        }),
        _ => Err(ConstructError::Unrealizable {
            target,
            reason: "K4 is the only graph whose perfect matchings are all disjoint, so GHZ(4,3) \
                     is the only high-dimensional GHZ state reachable this way",
        }),
    }
}

/// The unweighted book graph for W states: `n/2 - 1` copies of `K4` glued
/// along the base `a-b`. Every perfect matching holds exactly one edge with
/// one excited endpoint, all of them incident to `a`, and each of the `n`
/// matchings yields a distinct term, so the state is `W_n` as is.
pub fn oliver_graph(n: usize) -> ConstructResult<ExperimentGraph> {
    even_at_least(TargetSpec::W { n }, n, 4)?;
    let mut specs = vec![
        EdgeSpec::new(0, 1, 1, 0, 1.0),
        EdgeSpec::new(0, 1, 0, 1, 1.0),
    ];
    for page in 0..n / 2 - 1 {
        let (l0, l1) = (2 + 2 * page, 3 + 2 * page);
        specs.extend([
            EdgeSpec::new(0, l0, 0, 1, 1.0),
            EdgeSpec::new(0, l1, 0, 1, 1.0),
            EdgeSpec::new(1, l0, 0, 0, 1.0),
            EdgeSpec::new(1, l1, 0, 0, 1.0),
            EdgeSpec::new(l0, l1, 0, 0, 1.0),
        ]);
    }
    Ok(ExperimentGraph::build(labels(n), specs)?)
}

/// All-ground `K_{n-m}` on the first `n - m` vertices, all-excited `K_m` on
/// the last `m`, and between the blocks a double edge with colours (0,1)
/// and (1,0). Every perfect matching carries exactly `m` excitations.
pub fn general_dicke_graph(n: usize, m: usize) -> ConstructResult<ExperimentGraph> {
    let target = TargetSpec::Dicke { n, m };
    even_at_least(target, n, 2)?;
    if m == 0 || m >= n {
        return Err(ConstructError::InvalidTarget {
            target,
            reason: "excitations must satisfy 0 < m < n",
        });
    }
    let split = n - m;
    let mut specs = Vec::new();
    for u in 0..split {
        for v in u + 1..split {
            specs.push(EdgeSpec::new(u, v, 0, 0, 1.0));
        }
    }
    for u in split..n {
        for v in u + 1..n {
            specs.push(EdgeSpec::new(u, v, 1, 1, 1.0));
        }
    }
    for x in 0..split {
        for y in split..n {
            specs.push(EdgeSpec::new(x, y, 0, 1, 1.0));
            specs.push(EdgeSpec::new(x, y, 1, 0, 1.0));
        }
    }
    Ok(ExperimentGraph::build(labels(n), specs)?)
}

/// Weight classes of a Dicke-type graph by colour pattern: `delta`
/// (ground-ground), `alpha` (cross edge excited on the `K_m` side), `beta`
/// (cross edge excited on the `K_{n-m}` side) and `gamma` (excited-excited).
/// Empty classes are omitted.
pub fn dicke_weight_classes(graph: &ExperimentGraph, m: usize) -> Vec<WeightClass> {
    let split = graph.vertex_count().saturating_sub(m);
    let mut buckets: BTreeMap<&'static str, Vec<EdgeId>> = BTreeMap::new();
    for e in graph.edges() {
        let key = match (e.color_u.0, e.color_v.0) {
            (0, 0) => "delta",
            (1, 1) => "gamma",
            _ => {
                let excited = if e.color_u.0 == 1 { e.u } else { e.v };
                if excited >= split {
                    "alpha"
                } else {
                    "beta"
                }
            }
        };
        buckets.entry(key).or_default().push(e.id);
    }
    ["delta", "alpha", "beta", "gamma"]
        .into_iter()
        .filter_map(|k| buckets.remove(k).map(|edges| WeightClass::new(k, edges)))
        .collect()
}

/// Classes of the W graph: `alpha` (hub excited), `beta` (leaf excited) and
/// `gamma` (ground-ground).
pub fn w_weight_classes(graph: &ExperimentGraph) -> Vec<WeightClass> {
    dicke_weight_classes(graph, 1)
        .into_iter()
        .map(|mut class| {
            if class.id == "delta" {
                class.id = "gamma".into();
            }
            class
        })
        .collect()
}

/// Weighted W graph: the single excited hub is the last vertex, joined to
/// every other vertex by a double edge, with the others forming a
/// ground-state `K_{n-1}`. At unit weights the hub-excited term collects
/// `n - 1` times the amplitude of each other term; weighting the
/// leaf-excited edges by `n - 1` balances them.
pub fn w_graph(n: usize) -> ConstructResult<ExperimentGraph> {
    even_at_least(TargetSpec::W { n }, n, 4)?;
    let weights = w_weight_closed_form(n)?;
    let unit = general_dicke_graph(n, 1)?;
    let classes = w_weight_classes(&unit);
    let mut weight = vec![0.0; unit.edges().len()];
    for class in &classes {
        let value = match class.id.as_str() {
            "alpha" => weights.alpha,
            "beta" => weights.beta,
            _ => weights.gamma,
        };
        for id in &class.edges {
            weight[id.0] = value;
        }
    }
    Ok(unit.reweighted(|e| Complex64::new(weight[e.id.0], 0.0))?)
}

/// `K_n` with a (0,1)/(1,0) double edge between every pair. Every term has
/// `n/2` excitations and arises from `(n/2)!` matchings.
pub fn symmetric_dicke_graph(n: usize) -> ConstructResult<ExperimentGraph> {
    even_at_least(TargetSpec::Dicke { n, m: n / 2 }, n, 2)?;
    let mut specs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            specs.push(EdgeSpec::new(u, v, 0, 1, 1.0));
            specs.push(EdgeSpec::new(u, v, 1, 0, 1.0));
        }
    }
    Ok(ExperimentGraph::build(labels(n), specs)?)
}

/// Which of the three disjoint `K4` matchings produces a term: the trigger
/// edge goes to `a`, `b` or `c`, paired with the complementary edge.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum TriggerEdge {
    ToA,
    ToB,
    ToC,
}

/// One term `(a, b, c)` of an SRV layout and the trigger edge realizing it.
type LayoutTerm = (u32, u32, u32, TriggerEdge);

/// Modes for an `(A, B, C)` state of `A` terms. Party `a` takes modes
/// `0..A` in order. Terms sharing the trigger edge to `b` share the `b` mode
/// and need distinct `c` modes; terms on the trigger edge to `c` share the
/// `c` mode and need distinct `b` modes. `(b, c)` pairs must all differ so
/// that `a` keeps full rank, and exactly `B` and `C` distinct modes must
/// appear.
fn srv_layout(a: usize, b: usize, c: usize) -> Option<Vec<LayoutTerm>> {
    let greedy = (1 + (a - b)).min(c);
    for via_a in [1usize, 0] {
        let rest = a.checked_sub(via_a)?;
        let mut splits: Vec<usize> = (0..=rest.min(c)).rev().collect();
        splits.sort_by_key(|&k| k != greedy);
        for via_b in splits {
            let via_c = rest - via_b;
            if let Some(layout) = assign_srv_modes(b, c, via_a, via_b, via_c) {
                return Some(layout);
            }
        }
    }
    None
}

fn assign_srv_modes(
    b: usize,
    c: usize,
    via_a: usize,
    via_b: usize,
    via_c: usize,
) -> Option<Vec<LayoutTerm>> {
    let (b, c) = (b as u32, c as u32);
    let (via_b_n, via_c_n) = (via_b as u32, via_c as u32);
    if via_b_n > c || via_c_n > b {
        return None;
    }
    // class b: b mode 0, c modes 0..via_b
    let b_pairs: Vec<(u32, u32)> = (0..via_b_n).map(|j| (0, j)).collect();
    let shared_c_options: Vec<u32> = if via_c > 0 { (0..c).collect() } else { vec![0] };
    let offsets: &[u32] = if via_c > 0 { &[0, 1] } else { &[0] };
    let a_options: Vec<(u32, u32)> = if via_a > 0 {
        (0..b).flat_map(|x| (0..c).map(move |y| (x, y))).collect()
    } else {
        vec![(0, 0)]
    };

    for &shared_c in &shared_c_options {
        for &offset in offsets {
            if offset + via_c_n > b {
                continue;
            }
            let c_pairs: Vec<(u32, u32)> =
                (offset..offset + via_c_n).map(|x| (x, shared_c)).collect();
            for &a_pair in &a_options {
                let mut pairs = Vec::new();
                if via_a > 0 {
                    pairs.push(a_pair);
                }
                pairs.extend(&b_pairs);
                pairs.extend(&c_pairs);
                let mut seen = pairs.clone();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() != pairs.len() {
                    continue;
                }
                let mut b_modes: Vec<u32> = pairs.iter().map(|p| p.0).collect();
                let mut c_modes: Vec<u32> = pairs.iter().map(|p| p.1).collect();
                b_modes.sort_unstable();
                b_modes.dedup();
                c_modes.sort_unstable();
                c_modes.dedup();
                if b_modes.len() != b as usize || c_modes.len() != c as usize {
                    continue;
                }
                let classes = std::iter::repeat_n(TriggerEdge::ToA, via_a)
                    .chain(std::iter::repeat_n(TriggerEdge::ToB, via_b))
                    .chain(std::iter::repeat_n(TriggerEdge::ToC, via_c));
                return Some(
                    pairs
                        .into_iter()
                        .zip(classes)
                        .enumerate()
                        .map(|(i, ((pb, pc), class))| (i as u32, pb, pc, class))
                        .collect(),
                );
            }
        }
    }
    None
}

/// Four-vertex graph (`a, b, c, t`) whose state, after removing the
/// trigger `t`, is a maximally entangled `A`-term state with Schmidt-rank
/// vector `(A, B, C)`.
pub fn srv_graph(a: usize, b: usize, c: usize) -> ConstructResult<ExperimentGraph> {
    let target = TargetSpec::Srv { a, b, c };
    let verdict = srv_feasibility(a, b, c)?;
    if !verdict.is_feasible() {
        return Err(ConstructError::Infeasible { target, verdict });
    }
    let layout = srv_layout(a, b, c).ok_or_else(|| ConstructError::VerificationFailed {
        target,
        detail: "no collision-free mode layout found".into(),
    })?;

    // one trigger edge per used class, then its complementary edges
    let (pa, pb, pc, t) = (0usize, 1usize, 2usize, TRIGGER);
    let mut specs = Vec::new();
    for class in [TriggerEdge::ToA, TriggerEdge::ToB, TriggerEdge::ToC] {
        let members: Vec<&LayoutTerm> = layout.iter().filter(|term| term.3 == class).collect();
        let Some(first) = members.first() else {
            continue;
        };
        match class {
            TriggerEdge::ToA => {
                specs.push(EdgeSpec::new(pa, t, first.0, 0, 1.0));
                specs.extend(members.iter().map(|m| EdgeSpec::new(pb, pc, m.1, m.2, 1.0)));
            }
            TriggerEdge::ToB => {
                specs.push(EdgeSpec::new(pb, t, first.1, 0, 1.0));
                specs.extend(members.iter().map(|m| EdgeSpec::new(pa, pc, m.0, m.2, 1.0)));
            }
            TriggerEdge::ToC => {
                specs.push(EdgeSpec::new(pc, t, first.2, 0, 1.0));
                specs.extend(members.iter().map(|m| EdgeSpec::new(pa, pb, m.0, m.1, 1.0)));
            }
        }
    }
    let graph = ExperimentGraph::build(["a", "b", "c", "t"], specs)?;
    // a repeated trigger edge per class would multiply matchings; confirm
    // the count and the rank vector before handing the graph out
    verify_graph(&graph, &target)?;
    Ok(graph)
}

/// Three-party AME graph with trigger. Only `d = 2` exists: its state needs
/// four terms from three disjoint `K4` matchings, which works because two
/// of the terms share the trigger-to-`c` edge.
pub fn ame_graph(parties: usize, d: usize) -> ConstructResult<ExperimentGraph> {
    let target = TargetSpec::Ame { parties, d };
    if parties != 3 {
        return Err(ConstructError::Unsupported {
            target,
            reason: "only three-party AME states are handled",
        });
    }
    match d {
        0 | 1 => Err(ConstructError::InvalidTarget {
            target,
            reason: "dimension must be at least 2",
        }),
        2 => Ok(ExperimentGraph::build(
            ["a", "b", "c", "t"],
            [
                EdgeSpec::new(0, 3, 0, 0, 1.0),
                EdgeSpec::new(1, 2, 0, 0, 1.0),
                EdgeSpec::new(1, 3, 1, 0, 1.0),
                EdgeSpec::new(0, 2, 1, 0, 1.0),
                EdgeSpec::new(2, 3, 1, 0, 1.0),
                EdgeSpec::new(0, 1, 0, 1, 1.0),
                EdgeSpec::new(0, 1, 1, 0, 1.0),
            ],
        )?),
        _ => Err(ConstructError::Unrealizable {
            target,
            reason:
                "the state would need more than three disjoint perfect matchings on four vertices; \
                     such a graph does not exist",
        }),
    }
}

/// Counts gathered while checking a graph against its target.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisReport {
    pub target: TargetSpec,
    pub matching_count: usize,
    pub term_count: usize,
    pub max_disjoint: usize,
    /// Rank vector of the logical (trigger-free) state.
    pub srv: Option<SrVector>,
    pub weights: Option<WeightSolution>,
}

impl fmt::Display for SynthesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} perfect matchings, {} terms, {} disjoint",
            self.target, self.matching_count, self.term_count, self.max_disjoint
        )?;
        if let Some(srv) = &self.srv {
            write!(f, ", SRV {srv}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Synthesis {
    pub graph: ExperimentGraph,
    /// Normalized state over every vertex, trigger included.
    pub state: QuantumState,
    pub report: SynthesisReport,
}

/// Builds the graph for `target` and verifies it by re-simulation.
pub fn synthesize(target: &TargetSpec) -> ConstructResult<Synthesis> {
    let mut weights = None;
    let graph = match *target {
        TargetSpec::Ghz { n, d } => ghz_graph(n, d)?,
        TargetSpec::W { n } => w_graph(n)?,
        TargetSpec::Dicke { n, m } => {
            even_at_least(*target, n, 2)?;
            if m == 0 || m >= n {
                return Err(ConstructError::InvalidTarget {
                    target: *target,
                    reason: "excitations must satisfy 0 < m < n",
                });
            }
            if 2 * m == n {
                symmetric_dicke_graph(n)?
            } else if m == 1 && n >= 4 {
                w_graph(n)?
            } else {
                let (graph, solution) = balanced_dicke_graph(n, m)?;
                weights = Some(solution);
                graph
            }
        }
        TargetSpec::Srv { a, b, c } => srv_graph(a, b, c)?,
        TargetSpec::Ame { parties, d } => ame_graph(parties, d)?,
    };
    let verified = verify_graph(&graph, target)?;
    Ok(Synthesis {
        graph,
        state: verified.state,
        report: SynthesisReport {
            weights,
            ..verified.report
        },
    })
}

/// `general_dicke_graph(n, m)` with its colour classes solved for equal
/// amplitudes (`delta` pinned to 1).
pub fn balanced_dicke_graph(
    n: usize,
    m: usize,
) -> ConstructResult<(ExperimentGraph, WeightSolution)> {
    let unit = general_dicke_graph(n, m)?;
    let classes = dicke_weight_classes(&unit, m);
    let pin_id = classes.first().map(|c| c.id.clone()).unwrap_or_default();
    let pinned: BTreeMap<String, f64> = [(pin_id, 1.0)].into();
    let solution = solve_weights(&unit, &classes, &pinned)?;
    let mut weight = vec![0.0; unit.edges().len()];
    for class in &classes {
        for id in &class.edges {
            weight[id.0] = solution.weights[&class.id];
        }
    }
    let graph = unit.reweighted(|e| Complex64::new(weight[e.id.0], 0.0))?;
    Ok((graph, solution))
}

/// Result of [`verify_graph`].
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub state: QuantumState,
    pub report: SynthesisReport,
}

/// Re-simulates `graph` and checks it against `target`: equality with the
/// reference state, or for SRV targets `A` terms, maximal entanglement, the
/// requested rank vector and a constant trigger.
pub fn verify_graph(graph: &ExperimentGraph, target: &TargetSpec) -> ConstructResult<Verification> {
    let fail = |detail: String| ConstructError::VerificationFailed {
        target: *target,
        detail,
    };
    let raw = state_from_graph(graph)?;
    if raw.is_empty() {
        return Err(fail("graph has no perfect matchings".into()));
    }
    let state = normalize(&raw)?;
    let matchings = graph.enumerate_perfect_matchings();

    let uses_trigger = matches!(target, TargetSpec::Srv { .. } | TargetSpec::Ame { .. });
    let logical = if uses_trigger {
        if graph.vertex_count() != 4 {
            return Err(fail(format!(
                "expected 4 vertices, found {}",
                graph.vertex_count()
            )));
        }
        strip_trigger(&state, TRIGGER).map_err(|e| fail(e.to_string()))?
    } else {
        state.clone()
    };

    let srv = schmidt_rank_vector(&logical).ok();
    match *target {
        TargetSpec::Srv { a, b, c } => {
            if matchings.len() != a {
                return Err(fail(format!(
                    "{} perfect matchings, expected {a}",
                    matchings.len()
                )));
            }
            if logical.len() != a {
                return Err(fail(format!("{} terms, expected {a}", logical.len())));
            }
            if !is_maximally_entangled(&logical, DEFAULT_TOL) {
                return Err(fail("amplitudes differ".into()));
            }
            let expected = SrVector(vec![a, b, c]);
            if srv.as_ref() != Some(&expected) {
                return Err(fail(format!("rank vector {srv:?}, expected {expected}")));
            }
        }
        _ => {
            let reference = reference_state(target)?;
            if !states_equal(&logical, &reference, DEFAULT_TOL) {
                return Err(fail(format!(
                    "simulated {logical} differs from {reference}"
                )));
            }
        }
    }

    Ok(Verification {
        report: SynthesisReport {
            target: *target,
            matching_count: matchings.len(),
            term_count: state.len(),
            max_disjoint: max_disjoint_perfect_matchings(graph).count,
            srv,
            weights: None,
        },
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_perfect_matchings;
    use crate::state::{Term, DEFAULT_TOL};

    #[test]
    fn ghz_4_2_is_the_basic_graph() {
        let g = ghz_graph(4, 2).unwrap();
        let edges: Vec<(usize, usize, u32)> =
            g.edges().iter().map(|e| (e.u, e.v, e.color_u.0)).collect();
        assert_eq!(edges, vec![(0, 1, 0), (2, 3, 0), (0, 2, 1), (1, 3, 1)]);
    }

    #[test]
    fn ghz_refusals() {
        assert!(matches!(
            ghz_graph(6, 3),
            Err(ConstructError::Unrealizable { .. })
        ));
        assert!(matches!(
            ghz_graph(4, 4),
            Err(ConstructError::Unrealizable { .. })
        ));
        assert!(matches!(
            ghz_graph(5, 2),
            Err(ConstructError::InvalidTarget { .. })
        ));
        assert!(matches!(
            ghz_graph(4, 1),
            Err(ConstructError::InvalidTarget { .. })
        ));
    }

    #[test]
    fn ghz_4_3() {
        let g = ghz_graph(4, 3).unwrap();
        assert_eq!(g.edges().len(), 6);
        assert_eq!(max_disjoint_perfect_matchings(&g).count, 3);
    }

    #[test]
    fn oliver_4_has_four_matchings() {
        let g = oliver_graph(4).unwrap();
        assert_eq!(enumerate_perfect_matchings(&g).len(), 4);
        let s = normalize(&state_from_graph(&g).unwrap()).unwrap();
        assert!(states_equal(
            &s,
            &reference_state(&TargetSpec::W { n: 4 }).unwrap(),
            DEFAULT_TOL
        ));
    }

    #[test]
    fn general_dicke_4_1_is_w_graph_topology() {
        let w = w_graph(4).unwrap();
        let d = general_dicke_graph(4, 1).unwrap();
        assert_eq!(w.edges().len(), d.edges().len());
        for (a, b) in w.edges().iter().zip(d.edges()) {
            assert_eq!(
                (a.u, a.v, a.color_u, a.color_v),
                (b.u, b.v, b.color_u, b.color_v)
            );
        }
    }

    #[test]
    fn dicke_classes() {
        let g = general_dicke_graph(6, 2).unwrap();
        let classes = dicke_weight_classes(&g, 2);
        let sizes: Vec<(&str, usize)> = classes
            .iter()
            .map(|c| (c.id.as_str(), c.edges.len()))
            .collect();
        assert_eq!(
            sizes,
            vec![("delta", 6), ("alpha", 8), ("beta", 8), ("gamma", 1)]
        );
        let w = w_weight_classes(&general_dicke_graph(4, 1).unwrap());
        let ids: Vec<&str> = w.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, vec!["gamma", "alpha", "beta"]);
    }

    #[test]
    fn srv_4_2_2_reproduces_the_example_up_to_relabeling() {
        let g = srv_graph(4, 2, 2).unwrap();
        let s =
            strip_trigger(&normalize(&state_from_graph(&g).unwrap()).unwrap(), TRIGGER).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(schmidt_rank_vector(&s).unwrap(), SrVector(vec![4, 2, 2]));
        // relabel b and c so the a=0 term is |000>
        let first: &Term = s.terms().next().unwrap();
        let (b0, c0) = (first.0[1].0, first.0[2].0);
        let relabeled = s.relabeled(|p, m| match p {
            1 => crate::graph::ModeColor(m.0 ^ b0),
            2 => crate::graph::ModeColor(m.0 ^ c0),
            _ => m,
        });
        let mut bc: Vec<(u32, u32)> = relabeled.terms().map(|t| (t.0[1].0, t.0[2].0)).collect();
        bc.sort_unstable();
        assert_eq!(bc, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn srv_refusals() {
        assert!(matches!(
            srv_graph(6, 3, 2),
            Err(ConstructError::Infeasible { .. })
        ));
        assert!(matches!(
            srv_graph(7, 3, 2),
            Err(ConstructError::Infeasible { .. })
        ));
        assert!(matches!(
            srv_graph(2, 3, 2),
            Err(ConstructError::Analysis(_))
        ));
    }

    #[test]
    fn srv_2_2_2_is_ghz3_with_trigger() {
        let g = srv_graph(2, 2, 2).unwrap();
        let s =
            strip_trigger(&normalize(&state_from_graph(&g).unwrap()).unwrap(), TRIGGER).unwrap();
        assert_eq!(
            crate::state::classify(&s),
            crate::state::StateLabel::Ghz { n: 3, d: 2 }
        );
    }

    #[test]
    fn ame_graphs() {
        let g = ame_graph(3, 2).unwrap();
        assert_eq!(enumerate_perfect_matchings(&g).len(), 4);
        assert!(matches!(
            ame_graph(3, 3),
            Err(ConstructError::Unrealizable { .. })
        ));
        assert!(matches!(
            ame_graph(3, 4),
            Err(ConstructError::Unrealizable { .. })
        ));
        assert!(matches!(
            ame_graph(4, 2),
            Err(ConstructError::Unsupported { .. })
        ));
    }

    #[test]
    fn synthesize_reports() {
        let ghz = synthesize(&TargetSpec::Ghz { n: 4, d: 2 }).unwrap();
        assert_eq!((ghz.report.matching_count, ghz.report.term_count), (2, 2));
        assert_eq!(ghz.report.max_disjoint, 2);

        let w6 = synthesize(&TargetSpec::W { n: 6 }).unwrap();
        assert!(states_equal(
            &w6.state,
            &reference_state(&TargetSpec::W { n: 6 }).unwrap(),
            DEFAULT_TOL
        ));

        assert!(matches!(
            synthesize(&TargetSpec::Srv { a: 6, b: 3, c: 2 }),
            Err(ConstructError::Infeasible { .. })
        ));
        assert!(matches!(
            synthesize(&TargetSpec::Dicke { n: 5, m: 2 }),
            Err(ConstructError::InvalidTarget { .. })
        ));
    }
}
