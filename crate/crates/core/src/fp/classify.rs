//! Trichotomy for finite sequences of vector pairs `(d1ⁿ, d2ⁿ)`.
//!
//! Indiscernibility is approximated by order-type invariance of linear
//! dependencies: for each length `j ≤ m`, every increasing index tuple must
//! give the same space of vanishing combinations of its `2j` vectors.

use std::fmt;

use serde::Serialize;

use super::space::{left_kernel, FpError, FpSubspace, FpVector};

pub const MAX_SEQUENCE: usize = 24;
pub const MAX_ARITY: usize = 4;
pub const DEFAULT_ARITY: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Configuration {
    /// All `d1ⁿ, d2ⁿ` jointly independent.
    Config1,
    /// `d1ⁿ` constant, `d2ⁿ` independent over it.
    Config2,
    /// `d2ⁿ` constant, `d1ⁿ` independent over it.
    Config3,
    NotIndiscernible,
    /// Indiscernible to the tested arity but in none of the configurations.
    Inconclusive,
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn independent(p: u32, k: usize, vs: &[FpVector]) -> Result<bool, FpError> {
    Ok(FpSubspace::span(p, k, vs)?.dim() == vs.len())
}

/// Calls `f` on each increasing `j`-tuple of `0..len` in lexicographic order.
fn for_each_tuple(len: usize, j: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn go(len: usize, j: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == j {
            return f(cur);
        }
        for i in start..len {
            cur.push(i);
            if !go(len, j, i + 1, cur, f) {
                return false;
            }
            cur.pop();
        }
        true
    }
    go(len, j, 0, &mut Vec::with_capacity(j), f)
}

/// First pair of same-length increasing tuples with different vanishing
/// combinations, if any.
pub fn indiscernibility_violation(seq: &[(FpVector, FpVector)], arity: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let (p, k) = (seq[0].0.p(), seq[0].0.k());
    for j in 1..=arity.min(seq.len()) {
        let mut reference: Option<(Vec<usize>, Vec<Vec<u32>>)> = None;
        let mut found = None;
        for_each_tuple(seq.len(), j, &mut |t| {
            let rows: Vec<Vec<u32>> = t
                .iter()
                .flat_map(|&i| [seq[i].0.coords().to_vec(), seq[i].1.coords().to_vec()])
                .collect();
            let kernel = left_kernel(p, k, &rows);
            match &reference {
                None => {
                    reference = Some((t.to_vec(), kernel));
                    true
                }
                Some((first, kr)) if *kr != kernel => {
                    found = Some((first.clone(), t.to_vec()));
                    false
                }
                Some(_) => true,
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Classifies `seq` into one of the three configurations, testing
/// indiscernibility up to `arity` first.
pub fn classify_sequence(seq: &[(FpVector, FpVector)], arity: usize) -> Result<Configuration, FpError> {
    if !(2..=MAX_SEQUENCE).contains(&seq.len()) {
        return Err(FpError::Cap(format!(
            "sequence length {} outside 2..={MAX_SEQUENCE}",
            seq.len()
        )));
    }
    if !(1..=MAX_ARITY).contains(&arity) {
        return Err(FpError::Cap(format!("arity {arity} outside 1..={MAX_ARITY}")));
    }
    let (p, k) = (seq[0].0.p(), seq[0].0.k());
    for (x, y) in seq {
        for v in [x, y] {
            if (v.p(), v.k()) != (p, k) {
                return Err(FpError::Mismatch {
                    p1: p,
                    k1: k,
                    p2: v.p(),
                    k2: v.k(),
                });
            }
        }
    }
    for i in 0..seq.len() {
        if seq[i + 1..].contains(&seq[i]) {
            return Err(FpError::Precondition(format!("pair {i} repeats")));
        }
    }
    if indiscernibility_violation(seq, arity).is_some() {
        return Ok(Configuration::NotIndiscernible);
    }
    let firsts: Vec<FpVector> = seq.iter().map(|s| s.0.clone()).collect();
    let seconds: Vec<FpVector> = seq.iter().map(|s| s.1.clone()).collect();
    let all: Vec<FpVector> = firsts.iter().chain(&seconds).cloned().collect();
    if independent(p, k, &all)? {
        return Ok(Configuration::Config1);
    }
    // independent over a constant c: {c} ∪ others independent, or c = 0
    let over = |constant: &[FpVector], varying: &[FpVector]| -> Result<bool, FpError> {
        if constant.iter().any(|c| c != &constant[0]) {
            return Ok(false);
        }
        let mut vs = varying.to_vec();
        if !constant[0].is_zero() {
            vs.push(constant[0].clone());
        }
        independent(p, k, &vs)
    };
    if over(&firsts, &seconds)? {
        return Ok(Configuration::Config2);
    }
    if over(&seconds, &firsts)? {
        return Ok(Configuration::Config3);
    }
    Ok(Configuration::Inconclusive)
}
