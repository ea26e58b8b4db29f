//! Post-selected quantum states and their entanglement structure.
//!
//! A [`QuantumState`] is a sparse map from basis kets ([`Term`]s) to complex
//! amplitudes. Simulating a graph sums, for every perfect matching, the
//! product of its edge weights into the ket that assigns each path the mode
//! of its matching edge.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{enumerate_perfect_matchings, ExperimentGraph, ModeColor};
use crate::target::TargetSpec;

/// Amplitudes below this magnitude are dropped.
pub const PRUNE_EPS: f64 = 1e-12;
/// Default tolerance for normalization and equality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("graph has {0} vertices; an even count of at least 2 is required")]
    OddVertexCount(usize),

    #[error("state is empty")]
    Empty,

    #[error("state is not normalized (norm squared {0})")]
    NotNormalized(f64),

    #[error("term {term} has {found} parties, expected {expected}")]
    PartyMismatch {
        term: Term,
        expected: usize,
        found: usize,
    },

    #[error("party index {party} out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },

    #[error("at least {min} parties required, got {found}")]
    TooFewParties { min: usize, found: usize },

    #[error("trigger party {0} does not carry a constant mode")]
    TriggerVaries(usize),

    #[error("invalid parameters for {0}")]
    InvalidTarget(TargetSpec),

    #[error("{0} has no canonical reference state")]
    NoReference(TargetSpec),

    #[error("cannot parse term '{0}'")]
    ParseTerm(String),
}

pub type StateResult<T> = Result<T, StateError>;

/// One basis ket: the mode of every party, in vertex order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(pub Vec<ModeColor>);

impl Term {
    pub fn from_modes(modes: impl IntoIterator<Item = u32>) -> Self {
        Term(modes.into_iter().map(ModeColor).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn modes(&self) -> &[ModeColor] {
        &self.0
    }

    /// Number of parties in a nonzero mode.
    pub fn excitations(&self) -> usize {
        self.0.iter().filter(|m| m.0 != 0).count()
    }
}

impl fmt::Display for Term {
    /// Single-digit modes are concatenated (`0110`); otherwise modes are
    /// comma-separated (`0,10,3`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self.0.iter().all(|m| m.0 < 10);
        for (i, m) in self.0.iter().enumerate() {
            if !compact && i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for Term {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || StateError::ParseTerm(s.to_string());
        if s.is_empty() {
            return Err(err());
        }
        let modes: Option<Vec<u32>> = if s.contains(',') {
            s.split(',').map(|p| p.trim().parse().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10)).collect()
        };
        modes.map(Term::from_modes).ok_or_else(err)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    parties: usize,
    amplitudes: BTreeMap<Term, Complex64>,
}

impl QuantumState {
    pub fn empty(parties: usize) -> Self {
        Self {
            parties,
            amplitudes: BTreeMap::new(),
        }
    }

    /// Sums repeated terms and drops near-zero amplitudes.
    pub fn from_terms(
        parties: usize,
        terms: impl IntoIterator<Item = (Term, Complex64)>,
    ) -> StateResult<Self> {
        let mut state = Self::empty(parties);
        for (term, amplitude) in terms {
            state.accumulate(term, amplitude)?;
        }
        state.prune();
        Ok(state)
    }

    fn accumulate(&mut self, term: Term, amplitude: Complex64) -> StateResult<()> {
        if term.len() != self.parties {
            return Err(StateError::PartyMismatch {
                expected: self.parties,
                found: term.len(),
                term,
            });
        }
        *self.amplitudes.entry(term).or_default() += amplitude;
        Ok(())
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm() >= PRUNE_EPS);
    }

    pub fn party_count(&self) -> usize {
        self.parties
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, term: &Term) -> Complex64 {
        self.amplitudes.get(term).copied().unwrap_or_default()
    }

    /// Terms in ascending order with their amplitudes.
    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.amplitudes.keys()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= DEFAULT_TOL
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = Self {
            parties: self.parties,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(t, a)| (t.clone(), a * factor))
                .collect(),
        };
        out.prune();
        out
    }

    /// Distinct modes of `party`, ascending.
    pub fn modes_of(&self, party: usize) -> Vec<ModeColor> {
        self.amplitudes
            .keys()
            .map(|t| t.0[party])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Applies a per-party mode map. The caller guarantees each map is
    /// injective on the modes that occur.
    pub fn relabeled(&self, mut relabel: impl FnMut(usize, ModeColor) -> ModeColor) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(t, a)| {
                let modes =
                    t.0.iter()
                        .enumerate()
                        .map(|(p, &m)| relabel(p, m))
                        .collect();
                (Term(modes), *a)
            })
            .collect();
        Self {
            parties: self.parties,
            amplitudes,
        }
    }

    pub fn normalize(&self) -> StateResult<Self> {
        normalize(self)
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        for (i, (term, amp)) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i)|{term}>", amp.re, amp.im)?;
        }
        Ok(())
    }
}

/// Unnormalized post-selected state of `graph`. A graph without perfect
/// matchings yields an empty state.
pub fn state_from_graph(graph: &ExperimentGraph) -> StateResult<QuantumState> {
    let n = graph.vertex_count();
    if n < 2 || n % 2 == 1 {
        return Err(StateError::OddVertexCount(n));
    }
    let mut state = QuantumState::empty(n);
    for matching in enumerate_perfect_matchings(graph) {
        let mut modes = vec![ModeColor::default(); n];
        let mut amplitude = Complex64::new(1.0, 0.0);
        for edge in matching.edges(graph) {
            modes[edge.u] = edge.color_u;
            modes[edge.v] = edge.color_v;
            amplitude *= edge.weight;
        }
        state.accumulate(Term(modes), amplitude)?;
    }
    state.prune();
    Ok(state)
}

pub fn normalize(state: &QuantumState) -> StateResult<QuantumState> {
    if state.is_empty() {
        return Err(StateError::Empty);
    }
    let norm = state.norm_sqr().sqrt();
    Ok(state.scaled(Complex64::new(1.0 / norm, 0.0)))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn uniform(parties: usize, terms: Vec<Term>) -> StateResult<QuantumState> {
    let amp = Complex64::new(1.0 / (terms.len() as f64).sqrt(), 0.0);
    QuantumState::from_terms(parties, terms.into_iter().map(|t| (t, amp)))
}

/// All length-`n` bit patterns with exactly `m` ones, as terms.
fn dicke_terms(n: usize, m: usize) -> Vec<Term> {
    let mut out = Vec::with_capacity(binomial(n, m));
    let mut ones = (0..m).collect::<Vec<_>>();
    loop {
        let mut modes = vec![0u32; n];
        for &i in &ones {
            modes[i] = 1;
        }
        out.push(Term::from_modes(modes));
        // next combination
        let Some(i) = (0..m).rev().find(|&i| ones[i] < n - m + i) else {
            break;
        };
        ones[i] += 1;
        for j in i + 1..m {
            ones[j] = ones[j - 1] + 1;
        }
    }
    out
}

/// Normalized canonical state of a target family.
pub fn reference_state(spec: &TargetSpec) -> StateResult<QuantumState> {
    let invalid = || StateError::InvalidTarget(*spec);
    match *spec {
        TargetSpec::Ghz { n, d } => {
            if n < 2 || d < 2 {
                return Err(invalid());
            }
            let terms = (0..d as u32)
                .map(|i| Term::from_modes(std::iter::repeat_n(i, n)))
                .collect();
            uniform(n, terms)
        }
        TargetSpec::W { n } => reference_state(&TargetSpec::Dicke { n, m: 1 })
            .map_err(|_| StateError::InvalidTarget(*spec)),
        TargetSpec::Dicke { n, m } => {
            if n < 2 || m == 0 || m >= n {
                return Err(invalid());
            }
            uniform(n, dicke_terms(n, m))
        }
        TargetSpec::Ame { parties, d } => {
            if parties != 3 || d < 2 {
                return Err(invalid());
            }
            let d = d as u32;
            let terms = (0..d)
                .flat_map(|i| (0..d).map(move |j| Term::from_modes([i, j, (i + j) % d])))
                .collect();
            uniform(3, terms)
        }
        TargetSpec::Srv { .. } => Err(StateError::NoReference(*spec)),
    }
}

/// Non-increasing per-party ranks of the single-party reduced density
/// matrices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SrVector(pub Vec<usize>);

impl SrVector {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for SrVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

/// Reduced density matrix of `party`, indexed by that party's distinct
/// modes in ascending order.
pub fn reduced_density_matrix(
    state: &QuantumState,
    party: usize,
) -> StateResult<DMatrix<Complex64>> {
    if party >= state.party_count() {
        return Err(StateError::PartyOutOfRange {
            party,
            parties: state.party_count(),
        });
    }
    let modes = state.modes_of(party);
    let row_of = |m: ModeColor| modes.binary_search(&m).expect("mode collected above");

    // group amplitudes by the configuration of the other parties
    let mut by_rest: BTreeMap<Vec<ModeColor>, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (term, amp) in state.iter() {
        let mut rest = term.0.clone();
        let own = rest.remove(party);
        by_rest.entry(rest).or_default().push((row_of(own), *amp));
    }

    let dim = modes.len();
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for entries in by_rest.values() {
        for &(i, ai) in entries {
            for &(j, aj) in entries {
                rho[(i, j)] += ai * aj.conj();
            }
        }
    }
    Ok(rho)
}

/// Numerical rank: singular values above `1e-9` times the largest.
pub fn numerical_rank(matrix: &DMatrix<Complex64>) -> usize {
    if matrix.is_empty() {
        return 0;
    }
    let singular = matrix.clone().svd(false, false).singular_values;
    let largest = singular.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    singular
        .iter()
        .filter(|&&s| s > DEFAULT_TOL * largest)
        .count()
}

/// Per-party ranks in party order (unsorted).
pub fn party_ranks(state: &QuantumState) -> StateResult<Vec<usize>> {
    if state.party_count() < 2 {
        return Err(StateError::TooFewParties {
            min: 2,
            found: state.party_count(),
        });
    }
    if !state.is_normalized() {
        return Err(StateError::NotNormalized(state.norm_sqr()));
    }
    (0..state.party_count())
        .map(|p| reduced_density_matrix(state, p).map(|rho| numerical_rank(&rho)))
        .collect()
}

pub fn schmidt_rank_vector(state: &QuantumState) -> StateResult<SrVector> {
    let mut ranks = party_ranks(state)?;
    ranks.sort_unstable_by(|a, b| b.cmp(a));
    Ok(SrVector(ranks))
}

/// All nonzero amplitudes share one magnitude within `tol`.
pub fn is_maximally_entangled(state: &QuantumState, tol: f64) -> bool {
    let mut mags = state.iter().map(|(_, a)| a.norm());
    let Some(first) = mags.next() else {
        return true;
    };
    let (lo, hi) = mags.fold((first, first), |(lo, hi), m| (lo.min(m), hi.max(m)));
    hi - lo <= tol
}

/// Removes a party that holds the same mode in every term.
pub fn strip_trigger(state: &QuantumState, party: usize) -> StateResult<QuantumState> {
    if party >= state.party_count() {
        return Err(StateError::PartyOutOfRange {
            party,
            parties: state.party_count(),
        });
    }
    if state.modes_of(party).len() > 1 {
        return Err(StateError::TriggerVaries(party));
    }
    let terms = state.iter().map(|(t, a)| {
        let mut modes = t.0.clone();
        modes.remove(party);
        (Term(modes), *a)
    });
    QuantumState::from_terms(state.party_count() - 1, terms)
}

/// Equality up to one global phase, fixed on the largest-magnitude term of
/// `lhs`.
pub fn states_equal(lhs: &QuantumState, rhs: &QuantumState, tol: f64) -> bool {
    if lhs.party_count() != rhs.party_count() {
        return false;
    }
    let anchor = lhs
        .iter()
        .max_by(|(ta, a), (tb, b)| a.norm().total_cmp(&b.norm()).then_with(|| tb.cmp(ta)));
    let Some((term, a)) = anchor else {
        return rhs.is_empty();
    };
    let b = rhs.amplitude(term);
    if b.norm() < PRUNE_EPS {
        return false;
    }
    let phase = (a / a.norm()) / (b / b.norm());
    let terms: BTreeSet<&Term> = lhs.terms().chain(rhs.terms()).collect();
    terms
        .into_iter()
        .all(|t| (lhs.amplitude(t) - phase * rhs.amplitude(t)).norm() <= tol)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum StateLabel {
    Ghz { n: usize, d: usize },
    W { n: usize },
    Dicke { n: usize, m: usize },
    Other,
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StateLabel::Ghz { n, d } => write!(f, "GHZ({n},{d})"),
            StateLabel::W { n } => write!(f, "W({n})"),
            StateLabel::Dicke { n, m } => write!(f, "Dicke({n},{m})"),
            StateLabel::Other => f.write_str("Other"),
        }
    }
}

/// Largest party count for which the two-mode relabelings are enumerated.
const CLASSIFY_MAX_PARTIES: usize = 20;

/// Matches a normalized state against GHZ, then W, then Dicke (ascending
/// excitations), allowing any per-party bijective relabeling of modes.
pub fn classify(state: &QuantumState) -> StateLabel {
    let n = state.party_count();
    if n < 2 || state.len() < 2 || !state.is_normalized() {
        return StateLabel::Other;
    }
    if let Some(label) = match_ghz(state) {
        return label;
    }
    match_dicke(state).unwrap_or(StateLabel::Other)
}

fn match_ghz(state: &QuantumState) -> Option<StateLabel> {
    let n = state.party_count();
    let d = state.len();
    // each party must tell the terms apart
    if (0..n).any(|p| state.modes_of(p).len() != d) {
        return None;
    }
    let index_of: Vec<BTreeMap<ModeColor, u32>> = (0..n)
        .map(|p| {
            state
                .terms()
                .enumerate()
                .map(|(k, t)| (t.0[p], k as u32))
                .collect()
        })
        .collect();
    let relabeled = state.relabeled(|p, m| ModeColor(index_of[p][&m]));
    let reference = reference_state(&TargetSpec::Ghz { n, d }).ok()?;
    states_equal(&relabeled, &reference, DEFAULT_TOL).then_some(StateLabel::Ghz { n, d })
}

fn match_dicke(state: &QuantumState) -> Option<StateLabel> {
    let n = state.party_count();
    if n > CLASSIFY_MAX_PARTIES {
        return None;
    }
    let modes: Vec<Vec<ModeColor>> = (0..n).map(|p| state.modes_of(p)).collect();
    if modes.iter().any(|m| m.len() != 2) {
        return None;
    }
    let count = state.len();
    let mut best: Option<usize> = None;
    // party 0 is fixed; flipping every party maps m to n - m, which is
    // covered by the smaller m
    for mask in 0u64..(1u64 << (n - 1)) {
        let flipped = |p: usize| p > 0 && (mask >> (p - 1)) & 1 == 1;
        let relabeled = state.relabeled(|p, m| {
            let high = m == modes[p][1];
            ModeColor(u32::from(high != flipped(p)))
        });
        let mut weights = relabeled.terms().map(Term::excitations);
        let Some(m) = weights.next() else { continue };
        if m == 0 || m == n || weights.any(|w| w != m) || count != binomial(n, m) {
            continue;
        }
        let m = m.min(n - m);
        if best.is_some_and(|b| b <= m) {
            continue;
        }
        let matches = [m, n - m].into_iter().any(|k| {
            reference_state(&TargetSpec::Dicke { n, m: k })
                .map(|r| states_equal(&relabeled, &r, DEFAULT_TOL))
                .unwrap_or(false)
        });
        if matches {
            best = Some(m);
        }
    }
    best.map(|m| {
        if m == 1 {
            StateLabel::W { n }
        } else {
            StateLabel::Dicke { n, m }
        }
    })
}
