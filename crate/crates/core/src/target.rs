use std::fmt;

/// A family of states to synthesize.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TargetSpec {
    /// `n` parties of local dimension `d`.
    Ghz {
        n: usize,
        d: usize,
    },
    W {
        n: usize,
    },
    /// `n` parties with `m` excitations.
    Dicke {
        n: usize,
        m: usize,
    },
    /// Three parties with Schmidt-rank vector `(a, b, c)`, realized with a trigger.
    Srv {
        a: usize,
        b: usize,
        c: usize,
    },
    /// Absolutely maximally entangled state.
    Ame {
        parties: usize,
        d: usize,
    },
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TargetSpec::Ghz { n, d } => write!(f, "GHZ({n},{d})"),
            TargetSpec::W { n } => write!(f, "W({n})"),
            TargetSpec::Dicke { n, m } => write!(f, "Dicke({n},{m})"),
            TargetSpec::Srv { a, b, c } => write!(f, "SRV({a},{b},{c})"),
            TargetSpec::Ame { parties, d } => write!(f, "AME({parties},{d})"),
        }
    }
}
