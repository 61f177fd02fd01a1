//! Relation transformers: the two monotonisations, forced extension, and
//! right closure extension, plus a small term language composing them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relation::TernaryRelation;
use crate::subset::Subset;

/// Default bound on operator nesting.
pub const DEFAULT_DEPTH_CAP: usize = 4;

/// `A ⫝^M_C B` iff `A ⫝_D B` for every `C ⊆ D ⊆ cl(B ∪ C)`.
pub fn monotonise(r: &TernaryRelation) -> TernaryRelation {
    let site = r.site().clone();
    let inner = r.clone();
    TernaryRelation::from_fn(r.site(), format!("M({})", r.name()), move |a, c, b| {
        Subset::interval(c, site.closure(b.union(c))).all(|d| inner.get(a, d, b))
    })
}

/// `A ⫝^m_C B` iff `A ⫝_D B` for every `C ⊆ D ⊆ B ∪ C`.
pub fn monotonise_naive(r: &TernaryRelation) -> TernaryRelation {
    let inner = r.clone();
    TernaryRelation::from_fn(r.site(), format!("m({})", r.name()), move |a, c, b| {
        Subset::interval(c, b.union(c)).all(|d| inner.get(a, d, b))
    })
}

/// `A ⫝^*_C B` iff for every `D ⊇ B` some `A' ≡_{BC} A` has `A' ⫝_C D`.
///
/// `D` ranges over supersets of `B` only, not of `B ∪ C`.
pub fn star(r: &TernaryRelation) -> TernaryRelation {
    let site = r.site().clone();
    let inner = r.clone();
    TernaryRelation::from_fn(r.site(), format!("star({})", r.name()), move |a, c, b| {
        let orbits = site.stabilizer_orbits(b.union(c));
        let orbit = orbits.orbit_of(a);
        Subset::interval(b, site.full()).all(|d| orbit.iter().any(|&a2| inner.get(a2, c, d)))
    })
}

/// `A ⫝^c_C B` iff `A ⫝_C cl(B ∪ C)`.
pub fn closure_extension(r: &TernaryRelation) -> TernaryRelation {
    let site = r.site().clone();
    let inner = r.clone();
    TernaryRelation::from_fn(r.site(), format!("c({})", r.name()), move |a, c, b| {
        inner.get(a, c, site.closure(b.union(c)))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    /// `M`
    Monotonise,
    /// `m`
    NaiveMonotonise,
    /// `star`
    Star,
    /// `c`
    ClosureExtension,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Monotonise => "M",
            Op::NaiveMonotonise => "m",
            Op::Star => "star",
            Op::ClosureExtension => "c",
        }
    }

    pub fn apply(self, r: &TernaryRelation) -> TernaryRelation {
        match self {
            Op::Monotonise => monotonise(r),
            Op::NaiveMonotonise => monotonise_naive(r),
            Op::Star => star(r),
            Op::ClosureExtension => closure_extension(r),
        }
    }
}

/// A term over `M`, `m`, `star`, `c` applied to the base symbol `R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorExpr {
    Base,
    Apply(Op, Box<OperatorExpr>),
}

impl OperatorExpr {
    pub fn base() -> Self {
        OperatorExpr::Base
    }

    /// Wraps `self` in one more operator.
    pub fn then(self, op: Op) -> Self {
        OperatorExpr::Apply(op, Box::new(self))
    }

    /// Builds `outer(...(inner(R)))` from operators listed outermost first.
    pub fn chain(ops: &[Op]) -> Self {
        ops.iter().rev().fold(OperatorExpr::Base, |e, &op| e.then(op))
    }

    pub fn depth(&self) -> usize {
        match self {
            OperatorExpr::Base => 0,
            OperatorExpr::Apply(_, inner) => 1 + inner.depth(),
        }
    }

    /// Operators innermost first.
    pub fn ops_inside_out(&self) -> Vec<Op> {
        let mut ops = Vec::new();
        let mut cur = self;
        while let OperatorExpr::Apply(op, inner) = cur {
            ops.push(*op);
            cur = inner;
        }
        ops.reverse();
        ops
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorExpr::Base => f.write_str("R"),
            OperatorExpr::Apply(op, inner) => write!(f, "{}({inner})", op.symbol()),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OperatorError {
    #[error("cannot parse operator expression {input:?} at byte {pos}")]
    Parse { input: String, pos: usize },
    #[error("expression depth {depth} exceeds cap {cap}")]
    DepthExceeded { depth: usize, cap: usize },
}

impl FromStr for OperatorExpr {
    type Err = OperatorError;

    /// `EXPR := "R" | "m(" EXPR ")" | "M(" EXPR ")" | "star(" EXPR ")" | "c(" EXPR ")"`
    fn from_str(input: &str) -> Result<Self, OperatorError> {
        let err = |pos| OperatorError::Parse {
            input: input.to_string(),
            pos,
        };
        let mut ops = Vec::new();
        let mut rest = input;
        loop {
            let pos = input.len() - rest.len();
            if let Some(r) = rest.strip_prefix('R') {
                rest = r;
                break;
            }
            let (op, r) = if let Some(r) = rest.strip_prefix("star(") {
                (Op::Star, r)
            } else if let Some(r) = rest.strip_prefix("M(") {
                (Op::Monotonise, r)
            } else if let Some(r) = rest.strip_prefix("m(") {
                (Op::NaiveMonotonise, r)
            } else if let Some(r) = rest.strip_prefix("c(") {
                (Op::ClosureExtension, r)
            } else {
                return Err(err(pos));
            };
            ops.push(op);
            rest = r;
        }
        for _ in 0..ops.len() {
            let pos = input.len() - rest.len();
            rest = rest.strip_prefix(')').ok_or_else(|| err(pos))?;
        }
        if !rest.is_empty() {
            return Err(err(input.len() - rest.len()));
        }
        Ok(OperatorExpr::chain(&ops))
    }
}

/// Applies `expr` to `r`, innermost operator first. The result's name is the
/// expression with `R` replaced by `r`'s name.
pub fn apply_expr(
    expr: &OperatorExpr,
    r: &TernaryRelation,
    depth_cap: usize,
) -> Result<TernaryRelation, OperatorError> {
    let depth = expr.depth();
    if depth > depth_cap {
        return Err(OperatorError::DepthExceeded { depth, cap: depth_cap });
    }
    Ok(expr
        .ops_inside_out()
        .into_iter()
        .fold(r.clone(), |acc, op| op.apply(&acc)))
}
