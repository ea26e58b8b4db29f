//! Edge-colored, complex-weighted multigraphs and their perfect matchings.
//!
//! A vertex is an optical output path and an edge is a pair source (crystal)
//! emitting one photon into each of its endpoints. Every edge carries a mode
//! number for each endpoint and a complex amplitude. A perfect matching is a
//! set of crystals that together fire exactly one photon into every path,
//! i.e. one n-fold coincidence event.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("duplicate vertex label '{0}'")]
    DuplicateLabel(String),

    #[error("edge {edge}: endpoint {vertex} is out of range for {vertex_count} vertices")]
    EndpointOutOfRange {
        edge: usize,
        vertex: usize,
        vertex_count: usize,
    },

    #[error("edge {edge}: self-loop on vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },

    #[error("edge {edge}: weight {weight} is not finite")]
    NonFiniteWeight { edge: usize, weight: Complex64 },

    #[error("unknown vertex label '{0}'")]
    UnknownLabel(String),

    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
}

pub type GraphResult<T> = Result<T, GraphError>;

/// Photon mode number carried by one endpoint of an edge.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeColor(pub u32);

impl fmt::Display for ModeColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for ModeColor {
    fn from(value: u32) -> Self {
        Self(value)
    }
}

/// Identity of an edge within its graph. Ids are assigned in insertion order
/// starting at zero, so they double as indices into [`ExperimentGraph::edges`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
    pub color_u: ModeColor,
    pub color_v: ModeColor,
    pub weight: Complex64,
}

impl Edge {
    /// Mode emitted into `vertex`, or `None` if the edge does not touch it.
    pub fn color_at(&self, vertex: usize) -> Option<ModeColor> {
        if vertex == self.u {
            Some(self.color_u)
        } else if vertex == self.v {
            Some(self.color_v)
        } else {
            None
        }
    }

    pub fn touches(&self, vertex: usize) -> bool {
        self.u == vertex || self.v == vertex
    }

    pub fn other(&self, vertex: usize) -> Option<usize> {
        if vertex == self.u {
            Some(self.v)
        } else if vertex == self.v {
            Some(self.u)
        } else {
            None
        }
    }

    /// Number of endpoints carrying `mode`.
    pub fn count_mode(&self, mode: ModeColor) -> usize {
        usize::from(self.color_u == mode) + usize::from(self.color_v == mode)
    }
}

/// Input record for [`ExperimentGraph::build`].
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: usize,
    pub color_u: ModeColor,
    pub color_v: ModeColor,
    pub weight: Complex64,
}

impl EdgeSpec {
    pub fn new(u: usize, v: usize, color_u: u32, color_v: u32, weight: f64) -> Self {
        Self {
            u,
            v,
            color_u: ModeColor(color_u),
            color_v: ModeColor(color_v),
            weight: Complex64::new(weight, 0.0),
        }
    }

    pub fn with_weight(mut self, weight: Complex64) -> Self {
        self.weight = weight;
        self
    }
}

/// Immutable multigraph. Edge order is the iteration order everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<usize>>,
}

impl ExperimentGraph {
    pub fn build<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        specs: impl IntoIterator<Item = EdgeSpec>,
    ) -> GraphResult<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = HashSet::with_capacity(labels.len());
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(GraphError::DuplicateLabel(label.clone()));
            }
        }

        let vertex_count = labels.len();
        let mut edges = Vec::new();
        let mut incidence = vec![Vec::new(); vertex_count];
        for (index, spec) in specs.into_iter().enumerate() {
            for vertex in [spec.u, spec.v] {
                if vertex >= vertex_count {
                    return Err(GraphError::EndpointOutOfRange {
                        edge: index,
                        vertex,
                        vertex_count,
                    });
                }
            }
            if spec.u == spec.v {
                return Err(GraphError::SelfLoop {
                    edge: index,
                    vertex: spec.u,
                });
            }
            if !(spec.weight.re.is_finite() && spec.weight.im.is_finite()) {
                return Err(GraphError::NonFiniteWeight {
                    edge: index,
                    weight: spec.weight,
                });
            }
            incidence[spec.u].push(index);
            incidence[spec.v].push(index);
            edges.push(Edge {
                id: EdgeId(index),
                u: spec.u,
                v: spec.v,
                color_u: spec.color_u,
                color_v: spec.color_v,
                weight: spec.weight,
            });
        }

        Ok(Self {
            labels,
            edges,
            incidence,
        })
    }

    /// Builds a graph from edges addressed by vertex label:
    /// `(u, v, color_u, color_v, weight)`.
    pub fn from_labeled<S: AsRef<str>>(
        labels: &[S],
        edges: &[(&str, &str, u32, u32, f64)],
    ) -> GraphResult<Self> {
        let lookup = |name: &str| {
            labels
                .iter()
                .position(|l| l.as_ref() == name)
                .ok_or_else(|| GraphError::UnknownLabel(name.to_string()))
        };
        let specs = edges
            .iter()
            .map(|&(u, v, cu, cv, w)| Ok(EdgeSpec::new(lookup(u)?, lookup(v)?, cu, cv, w)))
            .collect::<GraphResult<Vec<_>>>()?;
        Self::build(labels.iter().map(|l| l.as_ref().to_string()), specs)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> GraphResult<&Edge> {
        self.edges.get(id.0).ok_or(GraphError::UnknownEdge(id))
    }

    /// Edge indices incident to `vertex`, ascending.
    pub fn incident(&self, vertex: usize) -> &[usize] {
        &self.incidence[vertex]
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.incidence[vertex].len()
    }

    /// Rebuilds the graph with every weight replaced by `weight_of(edge)`.
    pub fn reweighted(&self, mut weight_of: impl FnMut(&Edge) -> Complex64) -> GraphResult<Self> {
        let specs: Vec<EdgeSpec> = self
            .edges
            .iter()
            .map(|e| EdgeSpec {
                u: e.u,
                v: e.v,
                color_u: e.color_u,
                color_v: e.color_v,
                weight: weight_of(e),
            })
            .collect();
        Self::build(self.labels.clone(), specs)
    }

    /// Rebuilds the graph without the edge `id`.
    pub fn without_edge(&self, id: EdgeId) -> GraphResult<Self> {
        self.edge(id)?;
        let specs: Vec<EdgeSpec> = self
            .edges
            .iter()
            .filter(|e| e.id != id)
            .map(|e| EdgeSpec {
                u: e.u,
                v: e.v,
                color_u: e.color_u,
                color_v: e.color_v,
                weight: e.weight,
            })
            .collect();
        Self::build(self.labels.clone(), specs)
    }

    pub fn enumerate_perfect_matchings(&self) -> Vec<PerfectMatching> {
        enumerate_perfect_matchings(self)
    }

    pub fn is_perfect_matching(&self, edge_ids: &[EdgeId]) -> GraphResult<bool> {
        is_perfect_matching(self, edge_ids)
    }
}

/// Edge ids of one perfect matching, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerfectMatching {
    edge_ids: Vec<EdgeId>,
}

impl PerfectMatching {
    fn from_unsorted(mut edge_ids: Vec<EdgeId>) -> Self {
        edge_ids.sort_unstable();
        Self { edge_ids }
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edge_ids
    }

    pub fn edges<'g>(&'g self, graph: &'g ExperimentGraph) -> impl Iterator<Item = &'g Edge> + 'g {
        self.edge_ids.iter().map(move |id| &graph.edges[id.0])
    }

    pub fn shares_edge_with(&self, other: &PerfectMatching) -> bool {
        // both sides are sorted
        let (mut i, mut j) = (0, 0);
        while i < self.edge_ids.len() && j < other.edge_ids.len() {
            match self.edge_ids[i].cmp(&other.edge_ids[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Product of the edge weights.
    pub fn amplitude(&self, graph: &ExperimentGraph) -> Complex64 {
        self.edges(graph).map(|e| e.weight).product()
    }
}

/// All perfect matchings in canonical order (lexicographic by sorted edge
/// ids). Parallel edges give distinct matchings.
pub fn enumerate_perfect_matchings(graph: &ExperimentGraph) -> Vec<PerfectMatching> {
    let n = graph.vertex_count();
    if n == 0 || n % 2 == 1 {
        return Vec::new();
    }
    let mut matched = vec![false; n];
    let mut chosen = Vec::with_capacity(n / 2);
    let mut out = Vec::new();
    extend_matching(graph, &mut matched, &mut chosen, &mut out);
    out.sort_unstable();
    out
}

fn extend_matching(
    graph: &ExperimentGraph,
    matched: &mut [bool],
    chosen: &mut Vec<EdgeId>,
    out: &mut Vec<PerfectMatching>,
) {
    let Some(vertex) = matched.iter().position(|&m| !m) else {
        out.push(PerfectMatching::from_unsorted(chosen.clone()));
        return;
    };
    matched[vertex] = true;
    for &index in graph.incident(vertex) {
        let edge = &graph.edges[index];
        let partner = if edge.u == vertex { edge.v } else { edge.u };
        if matched[partner] {
            continue;
        }
        matched[partner] = true;
        chosen.push(edge.id);
        extend_matching(graph, matched, chosen, out);
        chosen.pop();
        matched[partner] = false;
    }
    matched[vertex] = false;
}

pub fn is_perfect_matching(graph: &ExperimentGraph, edge_ids: &[EdgeId]) -> GraphResult<bool> {
    let mut covered = vec![0usize; graph.vertex_count()];
    let mut distinct = HashSet::with_capacity(edge_ids.len());
    for &id in edge_ids {
        let edge = graph.edge(id)?;
        if !distinct.insert(id) {
            return Ok(false);
        }
        covered[edge.u] += 1;
        covered[edge.v] += 1;
    }
    Ok(covered.iter().all(|&c| c == 1))
}

/// Result of [`max_disjoint_perfect_matchings`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointPacking {
    pub count: usize,
    pub witness: Vec<PerfectMatching>,
}

/// Maximum number of pairwise disjoint perfect matchings, with a witness.
///
/// Two matchings are disjoint when no pair of vertices is joined in both;
/// parallel edges between the same two vertices occupy the same place, so on
/// four vertices there are never more than three. Without parallel edges this
/// is plain edge-disjointness. Witness matchings therefore never share an
/// edge id either.
///
/// The search runs on the underlying simple graph. A packing can only grow by
/// as many matchings as there are free edges at any vertex, and as many as the
/// free edges away from any vertex divided by `n/2 - 1`. Starting at that
/// ceiling, each size is tried in turn as an exact search: edges the bound
/// forces into use are branched on first, fewest candidate matchings first,
/// and edges no candidate can use are dropped.
pub fn max_disjoint_perfect_matchings(graph: &ExperimentGraph) -> DisjointPacking {
    let mut first_edge: Vec<usize> = Vec::new();
    let mut specs = Vec::new();
    let mut seen = HashSet::new();
    for e in &graph.edges {
        if seen.insert((e.u.min(e.v), e.u.max(e.v))) {
            first_edge.push(e.id.0);
            specs.push(EdgeSpec::new(e.u, e.v, 0, 0, 1.0));
        }
    }
    let support = ExperimentGraph::build(graph.labels.iter().cloned(), specs)
        .expect("the support of a valid graph is valid");

    let matchings = enumerate_perfect_matchings(&support);
    let mut through = vec![Vec::new(); support.edges().len()];
    let mut blocked = vec![true; support.edges().len()];
    for (i, m) in matchings.iter().enumerate() {
        for id in m.edge_ids() {
            through[id.0].push(i);
            blocked[id.0] = false;
        }
    }

    let mut search = PackingSearch {
        graph: &support,
        matchings: &matchings,
        through,
        blocked,
        target: 0,
        current: Vec::new(),
        found: Vec::new(),
    };
    let ceiling = if matchings.is_empty() {
        0
    } else {
        search.tally().room
    };
    for target in (1..=ceiling).rev() {
        search.target = target;
        if search.run() {
            break;
        }
    }
    let witness: Vec<PerfectMatching> = search
        .found
        .iter()
        .map(|&i| {
            let mut edge_ids: Vec<EdgeId> = matchings[i]
                .edge_ids()
                .iter()
                .map(|id| EdgeId(first_edge[id.0]))
                .collect();
            edge_ids.sort_unstable();
            PerfectMatching { edge_ids }
        })
        .collect();
    DisjointPacking {
        count: witness.len(),
        witness,
    }
}

struct PackingSearch<'a> {
    graph: &'a ExperimentGraph,
    matchings: &'a [PerfectMatching],
    /// Matchings through each edge.
    through: Vec<Vec<usize>>,
    /// Edges already packed or discarded.
    blocked: Vec<bool>,
    target: usize,
    current: Vec<usize>,
    found: Vec<usize>,
}

struct Tally {
    free: Vec<usize>,
    free_total: usize,
    /// Edges a perfect matching uses away from any one vertex.
    away: usize,
    room: usize,
}

impl PackingSearch<'_> {
    fn fits(&self, index: usize) -> bool {
        self.matchings[index]
            .edge_ids()
            .iter()
            .all(|id| !self.blocked[id.0])
    }

    fn tally(&self) -> Tally {
        let n = self.graph.vertex_count();
        let free: Vec<usize> = (0..n)
            .map(|v| {
                self.graph
                    .incident(v)
                    .iter()
                    .filter(|&&e| !self.blocked[e])
                    .count()
            })
            .collect();
        let free_total = self.blocked.iter().filter(|&&b| !b).count();
        let away = (n / 2).saturating_sub(1);
        let mut room = free_total;
        for &f in &free {
            room = room.min(f);
            if let Some(rest) = (free_total - f).checked_div(away) {
                room = room.min(rest);
            }
        }
        Tally {
            free,
            free_total,
            away,
            room,
        }
    }

    fn run(&mut self) -> bool {
        if self.current.len() == self.target {
            self.found = self.current.clone();
            return true;
        }

        let mut live = vec![0usize; self.blocked.len()];
        for index in 0..self.matchings.len() {
            if self.fits(index) {
                for id in self.matchings[index].edge_ids() {
                    live[id.0] += 1;
                }
            }
        }
        let dead: Vec<usize> = (0..self.blocked.len())
            .filter(|&e| !self.blocked[e] && live[e] == 0)
            .collect();
        for &e in &dead {
            self.blocked[e] = true;
        }
        let done = self.branch(&live);
        for &e in &dead {
            self.blocked[e] = false;
        }
        done
    }

    fn branch(&mut self, live: &[usize]) -> bool {
        let tally = self.tally();
        let needed = self.target - self.current.len();
        if tally.room < needed {
            return false;
        }

        let mut must = vec![false; self.blocked.len()];
        for (v, &f) in tally.free.iter().enumerate() {
            if f == needed {
                for &e in self.graph.incident(v) {
                    must[e] = true;
                }
            }
            if tally.away > 0 && tally.free_total - f == needed * tally.away {
                for (e, edge) in self.graph.edges().iter().enumerate() {
                    if !edge.touches(v) {
                        must[e] = true;
                    }
                }
            }
        }
        let Some(edge) = (0..self.blocked.len())
            .filter(|&e| !self.blocked[e])
            .min_by_key(|&e| (!must[e], live[e]))
        else {
            return false;
        };

        for k in 0..self.through[edge].len() {
            let index = self.through[edge][k];
            if !self.fits(index) {
                continue;
            }
            let ids = self.matchings[index].edge_ids();
            for id in ids {
                self.blocked[id.0] = true;
            }
            self.current.push(index);
            let done = self.run();
            self.current.pop();
            for id in ids {
                self.blocked[id.0] = false;
            }
            if done {
                return true;
            }
        }

        if must[edge] {
            return false;
        }
        self.blocked[edge] = true;
        let done = self.run();
        self.blocked[edge] = false;
        done
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz4() -> ExperimentGraph {
        ExperimentGraph::from_labeled(
            &["a", "b", "c", "d"],
            &[
                ("a", "b", 0, 0, 1.0),
                ("c", "d", 0, 0, 1.0),
                ("a", "c", 1, 1, 1.0),
                ("b", "d", 1, 1, 1.0),
            ],
        )
        .unwrap()
    }

    fn complete(n: usize) -> ExperimentGraph {
        let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut specs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                specs.push(EdgeSpec::new(u, v, 0, 0, 1.0));
            }
        }
        ExperimentGraph::build(labels, specs).unwrap()
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(
            ExperimentGraph::from_labeled(&["a"], &[("a", "a", 0, 0, 1.0)]),
            Err(GraphError::SelfLoop { edge: 0, vertex: 0 })
        );
        assert_eq!(
            ExperimentGraph::build(["a", "a"], []),
            Err(GraphError::DuplicateLabel("a".into()))
        );
        assert!(matches!(
            ExperimentGraph::build(["a", "b"], [EdgeSpec::new(0, 2, 0, 0, 1.0)]),
            Err(GraphError::EndpointOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            ExperimentGraph::build(["a", "b"], [EdgeSpec::new(0, 1, 0, 0, f64::NAN)]),
            Err(GraphError::NonFiniteWeight { .. })
        ));
    }

    #[test]
    fn single_edge_graph() {
        let g = ExperimentGraph::from_labeled(&["a", "b"], &[("a", "b", 0, 0, 1.0)]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.enumerate_perfect_matchings().len(), 1);
    }

    #[test]
    fn ghz4_matchings() {
        let g = ghz4();
        let ms = g.enumerate_perfect_matchings();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].edge_ids(), &[EdgeId(0), EdgeId(1)]);
        assert_eq!(ms[1].edge_ids(), &[EdgeId(2), EdgeId(3)]);
        assert_eq!(max_disjoint_perfect_matchings(&g).count, 2);
    }

    #[test]
    fn membership() {
        let g = ghz4();
        assert!(g.is_perfect_matching(&[EdgeId(0), EdgeId(1)]).unwrap());
        assert!(!g.is_perfect_matching(&[EdgeId(0), EdgeId(2)]).unwrap());
        assert!(!g.is_perfect_matching(&[EdgeId(0)]).unwrap());
        assert!(!g
            .is_perfect_matching(&[EdgeId(0), EdgeId(0), EdgeId(1)])
            .unwrap());
        assert_eq!(
            g.is_perfect_matching(&[EdgeId(9)]),
            Err(GraphError::UnknownEdge(EdgeId(9)))
        );
    }

    #[test]
    fn odd_vertex_count_has_no_matchings() {
        assert!(complete(3).enumerate_perfect_matchings().is_empty());
        assert!(complete(5).enumerate_perfect_matchings().is_empty());
    }

    #[test]
    fn k4_packs_three() {
        let g = complete(4);
        assert_eq!(g.enumerate_perfect_matchings().len(), 3);
        let packing = max_disjoint_perfect_matchings(&g);
        assert_eq!(packing.count, 3);
        for (i, a) in packing.witness.iter().enumerate() {
            for b in &packing.witness[i + 1..] {
                assert!(!a.shares_edge_with(b));
            }
        }
    }

    #[test]
    fn empty_graph_has_no_matchings() {
        let g = ExperimentGraph::build(Vec::<String>::new(), []).unwrap();
        assert!(g.enumerate_perfect_matchings().is_empty());
        assert_eq!(max_disjoint_perfect_matchings(&g).count, 0);
    }
}
