//! Which three-party Schmidt-rank vectors `(A, B, C)` can be realized as
//! maximally entangled `A`-term states by four-path graphs (three parties
//! plus a trigger).
//!
//! Every term comes from one of the three disjoint perfect matchings of
//! `K4`, each pairing one trigger edge with a complementary edge. The
//! trigger edge to `a` can carry one term; the one to `b` at most
//! `min(1 + (A - B), C)`; the one to `c` at most `min(1 + (A - C), B - 1)`.
//! A state is only possible at all when `A <= B * C`.

use std::fmt;

use super::AnalysisError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FeasibilityKind {
    Feasible,
    /// Exists as a state, but needs more disjoint matchings than four paths allow.
    InfeasiblePairSources,
    /// Violates `A <= B * C`; no state has this rank vector.
    NonexistentState,
}

impl FeasibilityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeasibilityKind::Feasible => "feasible",
            FeasibilityKind::InfeasiblePairSources => "infeasible-pair-sources",
            FeasibilityKind::NonexistentState => "nonexistent-state",
        }
    }
}

impl fmt::Display for FeasibilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Term budget per trigger edge, summed against the required term count.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermBudget {
    pub via_a: usize,
    pub via_b: usize,
    pub via_c: usize,
}

impl TermBudget {
    pub fn total(&self) -> usize {
        self.via_a + self.via_b + self.via_c
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeasibilityVerdict {
    pub kind: FeasibilityKind,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub budget: TermBudget,
}

impl FeasibilityVerdict {
    /// Left side of the budget inequality.
    pub fn lhs(&self) -> usize {
        self.budget.total()
    }

    /// Right side of the budget inequality (the number of terms needed).
    pub fn rhs(&self) -> usize {
        self.a
    }

    pub fn existence_bound(&self) -> usize {
        self.b * self.c
    }

    pub fn is_feasible(&self) -> bool {
        self.kind == FeasibilityKind::Feasible
    }
}

impl fmt::Display for FeasibilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let TermBudget {
            via_a,
            via_b,
            via_c,
        } = self.budget;
        match self.kind {
            FeasibilityKind::NonexistentState => write!(
                f,
                "{}: {} > {}*{} = {}",
                self.kind,
                self.a,
                self.b,
                self.c,
                self.existence_bound()
            ),
            FeasibilityKind::Feasible => write!(
                f,
                "{}: {via_a}+{via_b}+{via_c} = {} >= {}",
                self.kind,
                self.lhs(),
                self.rhs()
            ),
            FeasibilityKind::InfeasiblePairSources => write!(
                f,
                "{}: {via_a}+{via_b}+{via_c} = {} < {}",
                self.kind,
                self.lhs(),
                self.rhs()
            ),
        }
    }
}

pub fn term_budget(a: usize, b: usize, c: usize) -> TermBudget {
    TermBudget {
        via_a: 1,
        via_b: (1 + (a - b)).min(c),
        via_c: (1 + (a - c)).min(b - 1),
    }
}

pub fn srv_feasibility(a: usize, b: usize, c: usize) -> Result<FeasibilityVerdict, AnalysisError> {
    if !(a >= b && b >= c && c >= 1) {
        return Err(AnalysisError::SrvOrdering { a, b, c });
    }
    let budget = term_budget(a, b, c);
    let kind = if a > b * c {
        FeasibilityKind::NonexistentState
    } else if budget.total() >= a {
        FeasibilityKind::Feasible
    } else {
        FeasibilityKind::InfeasiblePairSources
    };
    Ok(FeasibilityVerdict {
        kind,
        a,
        b,
        c,
        budget,
    })
}

/// Every ordered `(A, B, C)` with `A <= max_a`, by ascending `A`, then
/// descending `B`, then descending `C`.
pub fn srv_table(max_a: usize) -> Vec<FeasibilityVerdict> {
    let mut out = Vec::new();
    for a in 1..=max_a {
        for b in (1..=a).rev() {
            for c in (1..=b).rev() {
                out.push(srv_feasibility(a, b, c).expect("ordered by construction"));
            }
        }
    }
    out
}
