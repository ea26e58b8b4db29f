//! Weight solving: choose one real weight per edge class so that every term
//! of the simulated state gets the same amplitude.
//!
//! Each term's coefficient is a polynomial in the class weights: a sum over
//! the matchings producing that term of the product of their edge weights.
//! When every coefficient is a single monomial the equal-coefficient system
//! is linear in log space and is solved directly. Otherwise a damped
//! Gauss-Newton (Levenberg-Marquardt) iteration runs from the all-ones start,
//! followed by seeded random restarts. Every candidate is re-simulated
//! before it is accepted.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{group_matchings_by_term, AnalysisError};
use crate::graph::{EdgeId, ExperimentGraph};
use crate::state::{normalize, state_from_graph, Term, DEFAULT_TOL};

pub const MAX_RESTARTS: usize = 100;
const MAX_ITERATIONS: usize = 500;
/// Consecutive steps improving the cost by less than `STALL_RATIO` before a
/// start is abandoned.
const STALL_LIMIT: usize = 8;
const STALL_RATIO: f64 = 1e-6;
const RESTART_SEED: u64 = 0x5eed_f00d;

/// A set of edges constrained to share one weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightClass {
    pub id: String,
    pub edges: Vec<EdgeId>,
}

impl WeightClass {
    pub fn new(id: impl Into<String>, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        Self {
            id: id.into(),
            edges: edges.into_iter().collect(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedForm,
    /// Numeric root finding; `attempt` 0 is the all-ones start.
    Numeric {
        attempt: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSolution {
    pub weights: BTreeMap<String, f64>,
    pub method: SolveMethod,
    /// Largest minus smallest amplitude magnitude of the normalized,
    /// re-simulated state.
    pub spread: f64,
}

impl WeightSolution {
    pub fn weight(&self, class: &str) -> Option<f64> {
        self.weights.get(class).copied()
    }
}

/// Coefficient of one term: exponent vector (one entry per class) to
/// integer multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CoefficientPolynomial {
    pub monomials: BTreeMap<Vec<u32>, u64>,
}

impl CoefficientPolynomial {
    pub fn eval(&self, weights: &[f64]) -> f64 {
        self.monomials
            .iter()
            .map(|(exps, &coef)| coef as f64 * monomial(exps, weights))
            .sum()
    }

    fn gradient(&self, weights: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (exps, &coef) in &self.monomials {
            for (k, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut term = coef as f64 * f64::from(e) * weights[k].powi(e as i32 - 1);
                for (j, &ej) in exps.iter().enumerate() {
                    if j != k {
                        term *= weights[j].powi(ej as i32);
                    }
                }
                out[k] += term;
            }
        }
    }
}

fn monomial(exps: &[u32], weights: &[f64]) -> f64 {
    exps.iter()
        .zip(weights)
        .map(|(&e, &w)| w.powi(e as i32))
        .product()
}

/// Index of the class owning each edge. Fails unless `classes` partition
/// the edge set.
fn class_of_edges(
    graph: &ExperimentGraph,
    classes: &[WeightClass],
) -> Result<Vec<usize>, AnalysisError> {
    let mut ids = BTreeSet::new();
    for class in classes {
        if !ids.insert(class.id.as_str()) {
            return Err(AnalysisError::DuplicateClass(class.id.clone()));
        }
    }
    let mut owner = vec![None; graph.edges().len()];
    for (k, class) in classes.iter().enumerate() {
        for &id in &class.edges {
            let slot = owner.get_mut(id.0).ok_or(AnalysisError::UnknownEdge(id))?;
            if slot.is_some() {
                return Err(AnalysisError::EdgeInTwoClasses(id));
            }
            *slot = Some(k);
        }
    }
    owner
        .into_iter()
        .enumerate()
        .map(|(i, o)| o.ok_or(AnalysisError::UnclassifiedEdge(EdgeId(i))))
        .collect()
}

/// Coefficient polynomial of every term, with one variable per class.
pub fn coefficient_polynomials(
    graph: &ExperimentGraph,
    classes: &[WeightClass],
) -> Result<BTreeMap<Term, CoefficientPolynomial>, AnalysisError> {
    let owner = class_of_edges(graph, classes)?;
    let groups = group_matchings_by_term(graph)?;
    Ok(groups
        .into_iter()
        .map(|(term, matchings)| {
            let mut poly = CoefficientPolynomial::default();
            for matching in matchings {
                let mut exps = vec![0u32; classes.len()];
                for id in matching.edge_ids() {
                    exps[owner[id.0]] += 1;
                }
                *poly.monomials.entry(exps).or_default() += 1;
            }
            (term, poly)
        })
        .collect())
}

/// Finds real class weights making the simulated state maximally entangled.
/// `pinned` fixes the gauge; at least one class must be pinned.
///
/// When every term coefficient is a single monomial the system is solved in
/// closed form in log space; otherwise, or if that fails, numerically.
pub fn solve_weights(
    graph: &ExperimentGraph,
    classes: &[WeightClass],
    pinned: &BTreeMap<String, f64>,
) -> Result<WeightSolution, AnalysisError> {
    solve(graph, classes, pinned, true)
}

/// [`solve_weights`] without the closed-form shortcut.
pub fn solve_weights_numeric(
    graph: &ExperimentGraph,
    classes: &[WeightClass],
    pinned: &BTreeMap<String, f64>,
) -> Result<WeightSolution, AnalysisError> {
    solve(graph, classes, pinned, false)
}

fn solve(
    graph: &ExperimentGraph,
    classes: &[WeightClass],
    pinned: &BTreeMap<String, f64>,
    closed_form: bool,
) -> Result<WeightSolution, AnalysisError> {
    if pinned.is_empty() {
        return Err(AnalysisError::NoPinnedClass);
    }
    for (id, &value) in pinned {
        if !classes.iter().any(|c| &c.id == id) {
            return Err(AnalysisError::UnknownClass(id.clone()));
        }
        if !value.is_finite() || value == 0.0 {
            return Err(AnalysisError::BadPin(id.clone(), value));
        }
    }
    let polys: Vec<CoefficientPolynomial> = coefficient_polynomials(graph, classes)?
        .into_values()
        .collect();
    if polys.is_empty() {
        return Err(AnalysisError::NoMatchings);
    }

    let problem = Problem::new(classes, pinned, &polys);
    let verify = |values: &[f64]| verify_assignment(graph, classes, values);

    if let Some(values) = problem.solve_log_linear().filter(|_| closed_form) {
        if let Some(spread) = verify(&values) {
            return Ok(problem.solution(values, SolveMethod::ClosedForm, spread));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    let mut best_imbalance = 1.0f64;
    for attempt in 0..=MAX_RESTARTS {
        let start: Vec<f64> = if attempt == 0 {
            vec![1.0; problem.free.len()]
        } else {
            (0..problem.free.len())
                .map(|_| {
                    let magnitude = rng.random_range(0.1..3.0);
                    if rng.random_bool(0.5) {
                        magnitude
                    } else {
                        -magnitude
                    }
                })
                .collect()
        };
        let (values, residual) = problem.levenberg_marquardt(&start);
        best_imbalance = best_imbalance.min(problem.imbalance(&values));
        if residual > 1e-10 {
            continue;
        }
        if let Some(spread) = verify(&values) {
            return Ok(problem.solution(values, SolveMethod::Numeric { attempt }, spread));
        }
    }
    Err(AnalysisError::WeightsInfeasible {
        imbalance: best_imbalance,
    })
}

/// Re-simulates with the given class values; returns the amplitude spread
/// when the state is maximally entangled.
fn verify_assignment(
    graph: &ExperimentGraph,
    classes: &[WeightClass],
    values: &[f64],
) -> Option<f64> {
    let mut weight = vec![0.0; graph.edges().len()];
    for (class, &value) in classes.iter().zip(values) {
        for id in &class.edges {
            weight[id.0] = value;
        }
    }
    let reweighted = graph
        .reweighted(|e| Complex64::new(weight[e.id.0], 0.0))
        .ok()?;
    let state = normalize(&state_from_graph(&reweighted).ok()?).ok()?;
    let mags: Vec<f64> = state.iter().map(|(_, a)| a.norm()).collect();
    let hi = mags.iter().copied().fold(0.0, f64::max);
    let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo <= DEFAULT_TOL).then_some(hi - lo)
}

struct Problem<'a> {
    classes: &'a [WeightClass],
    polys: &'a [CoefficientPolynomial],
    /// Full value vector with pinned entries filled in.
    template: Vec<f64>,
    free: Vec<usize>,
}

impl<'a> Problem<'a> {
    fn new(
        classes: &'a [WeightClass],
        pinned: &BTreeMap<String, f64>,
        polys: &'a [CoefficientPolynomial],
    ) -> Self {
        let mut template = vec![1.0; classes.len()];
        let mut free = Vec::new();
        for (k, class) in classes.iter().enumerate() {
            match pinned.get(&class.id) {
                Some(&v) => template[k] = v,
                None => free.push(k),
            }
        }
        Self {
            classes,
            polys,
            template,
            free,
        }
    }

    fn full(&self, free_values: &[f64]) -> Vec<f64> {
        let mut values = self.template.clone();
        for (&k, &v) in self.free.iter().zip(free_values) {
            values[k] = v;
        }
        values
    }

    fn solution(&self, values: Vec<f64>, method: SolveMethod, spread: f64) -> WeightSolution {
        WeightSolution {
            weights: self
                .classes
                .iter()
                .map(|c| c.id.clone())
                .zip(values)
                .collect(),
            method,
            spread,
        }
    }

    /// Closed form for single-monomial coefficients with positive pins:
    /// `log c + sum e_k log w_k = log K` is linear in `(log w_free, log K)`.
    fn solve_log_linear(&self) -> Option<Vec<f64>> {
        if self.polys.iter().any(|p| p.monomials.len() != 1) {
            return None;
        }
        if self.template.iter().any(|&v| v <= 0.0) {
            return None;
        }
        let rows = self.polys.len();
        let cols = self.free.len() + 1;
        let mut a = DMatrix::<f64>::zeros(rows, cols);
        let mut b = DVector::<f64>::zeros(rows);
        for (t, poly) in self.polys.iter().enumerate() {
            let (exps, &coef) = poly.monomials.iter().next()?;
            let mut rhs = -(coef as f64).ln();
            for (k, &e) in exps.iter().enumerate() {
                if !self.free.contains(&k) {
                    rhs -= f64::from(e) * self.template[k].ln();
                }
            }
            for (col, &k) in self.free.iter().enumerate() {
                a[(t, col)] = f64::from(exps[k]);
            }
            a[(t, cols - 1)] = -1.0;
            b[t] = rhs;
        }
        let y = a.clone().svd(true, true).solve(&b, 1e-12).ok()?;
        let residual = (&a * &y - &b).amax();
        if residual > 1e-10 {
            return None;
        }
        let free_values: Vec<f64> = y.iter().take(self.free.len()).map(|v| v.exp()).collect();
        Some(self.full(&free_values))
    }

    /// Residuals `c_t(w) - K` over unknowns `(w_free, K)`.
    fn residuals(&self, x: &[f64]) -> DVector<f64> {
        let (free_values, k) = x.split_at(self.free.len());
        let values = self.full(free_values);
        DVector::from_iterator(
            self.polys.len(),
            self.polys.iter().map(|p| p.eval(&values) - k[0]),
        )
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let (free_values, _) = x.split_at(self.free.len());
        let values = self.full(free_values);
        let cols = self.free.len() + 1;
        let mut jac = DMatrix::<f64>::zeros(self.polys.len(), cols);
        let mut grad = vec![0.0; values.len()];
        for (t, poly) in self.polys.iter().enumerate() {
            poly.gradient(&values, &mut grad);
            for (col, &k) in self.free.iter().enumerate() {
                jac[(t, col)] = grad[k];
            }
            jac[(t, cols - 1)] = -1.0;
        }
        jac
    }

    /// `(max |c| - min |c|) / max |c|` over the term coefficients; 1 when
    /// every coefficient vanishes.
    fn imbalance(&self, values: &[f64]) -> f64 {
        let mags: Vec<f64> = self.polys.iter().map(|p| p.eval(values).abs()).collect();
        let hi = mags.iter().copied().fold(0.0, f64::max);
        let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
        if hi > 0.0 && hi.is_finite() {
            (hi - lo) / hi
        } else {
            1.0
        }
    }

    /// Returns the full class values and the final relative residual.
    fn levenberg_marquardt(&self, start: &[f64]) -> (Vec<f64>, f64) {
        let start_values = self.full(start);
        let mean = self
            .polys
            .iter()
            .map(|p| p.eval(&start_values))
            .sum::<f64>()
            / self.polys.len() as f64;
        let mut x: Vec<f64> = start.iter().copied().chain([mean]).collect();
        let mut r = self.residuals(&x);
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        let mut stalled = 0;

        for _ in 0..MAX_ITERATIONS {
            if stalled >= STALL_LIMIT {
                break;
            }
            if relative_residual(&r, x[x.len() - 1]) <= 1e-14 {
                break;
            }
            let jac = self.jacobian(&x);
            let jtj = jac.transpose() * &jac;
            let grad = jac.transpose() * &r;
            let mut improved = false;
            for _ in 0..30 {
                let mut damped = jtj.clone();
                for i in 0..damped.nrows() {
                    damped[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
                }
                let Some(step) = damped.lu().solve(&(-&grad)) else {
                    lambda *= 10.0;
                    continue;
                };
                let candidate: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let r_new = self.residuals(&candidate);
                let new_cost = r_new.norm_squared();
                if new_cost.is_finite() && new_cost < cost {
                    if cost - new_cost < STALL_RATIO * cost {
                        stalled += 1;
                    } else {
                        stalled = 0;
                    }
                    x = candidate;
                    r = r_new;
                    cost = new_cost;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }

        let k = x[x.len() - 1];
        let residual = relative_residual(&r, k);
        x.pop();
        (self.full(&x), residual)
    }
}

/// Max residual relative to the common coefficient; infinite when the common
/// coefficient has collapsed to zero.
fn relative_residual(r: &DVector<f64>, k: f64) -> f64 {
    if k.abs() < 1e-8 {
        return f64::INFINITY;
    }
    r.amax() / k.abs()
}
