//! Hypothesis-rich relations for claim checking.
//!
//! Random invariant relations almost never satisfy conjunctions like "left
//! and right NOR and MON". Each such axiom is a single-premise rule
//! `r(t) → r(t')`, so every relation has a largest sub-relation closed under
//! a chosen set of them: drop any true triple with a false successor until
//! nothing changes. The result implies the input, stays invariant when the
//! input is, and satisfies the chosen axioms by construction.

use crate::axioms::{AxiomId, Side};
use crate::relation::{RelationError, TernaryRelation, EXTENSIONAL_MAX};
use crate::subset::Subset;

/// Axioms expressible as single-premise rules.
pub fn is_horn_rule(ax: AxiomId) -> bool {
    matches!(
        ax,
        AxiomId::Nor(_) | AxiomId::Mon(_) | AxiomId::Bmon | AxiomId::CloB(_) | AxiomId::CloBc(_) | AxiomId::Sym
    )
}

/// One-step consequences of `(a, c, b)` under `ax`; longer chains are
/// covered by iterating to a fixpoint.
fn successors(
    r: &TernaryRelation,
    ax: AxiomId,
    a: Subset,
    c: Subset,
    b: Subset,
    out: &mut Vec<(Subset, Subset, Subset)>,
) {
    let site = r.site();
    let mirror = |out: &mut Vec<_>, (x, y, z): (Subset, Subset, Subset)| out.push((z, y, x));
    match ax {
        AxiomId::Nor(Side::Right) => out.push((a, c, b.union(c))),
        AxiomId::Nor(Side::Left) => out.push((a.union(c), c, b)),
        AxiomId::Mon(Side::Right) => out.extend(b.elems().map(|x| (a, c, b.minus(Subset::singleton(x))))),
        AxiomId::Mon(Side::Left) => out.extend(a.elems().map(|x| (a.minus(Subset::singleton(x)), c, b))),
        AxiomId::Bmon => out.extend(b.minus(c).elems().map(|x| (a, c.union(Subset::singleton(x)), b))),
        AxiomId::CloB(Side::Right) => out.push((a, c, site.closure(b))),
        AxiomId::CloBc(Side::Right) => out.push((a, c, site.closure(b.union(c)))),
        AxiomId::CloB(Side::Left) => mirror(out, (b, c, site.closure(a))),
        AxiomId::CloBc(Side::Left) => mirror(out, (b, c, site.closure(a.union(c)))),
        AxiomId::Sym => out.push((b, c, a)),
        other => panic!("{other} is not a single-premise rule"),
    }
}

/// Largest sub-relation of `r` satisfying every axiom in `rules`.
pub fn horn_interior(r: &TernaryRelation, rules: &[AxiomId]) -> Result<TernaryRelation, RelationError> {
    assert!(rules.iter().all(|&ax| is_horn_rule(ax)), "rules must be single-premise");
    let n = r.site().n();
    if n > EXTENSIONAL_MAX {
        return Err(RelationError::TooLarge(n));
    }
    let idx = |a: Subset, c: Subset, b: Subset| (a.index() << (2 * n)) | (c.index() << n) | b.index();
    let triples: Vec<_> = r.triples().collect();
    let mut table: Vec<bool> = triples.iter().map(|t| r.get(t.a, t.c, t.b)).collect();
    let mut succ = Vec::new();
    loop {
        let mut changed = false;
        for (i, t) in triples.iter().enumerate() {
            if !table[i] {
                continue;
            }
            succ.clear();
            for &ax in rules {
                successors(r, ax, t.a, t.c, t.b, &mut succ);
            }
            if succ.iter().any(|&(a, c, b)| !table[idx(a, c, b)]) {
                table[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let tags: Vec<String> = rules.iter().map(|ax| ax.to_string()).collect();
    Ok(TernaryRelation::from_table(
        r.site(),
        format!("int[{}]({})", tags.join(","), r.name()),
        table,
    ))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::axioms::{satisfies, AxiomId::*, Side::*};
    use crate::relation::{implies, is_invariant, random_invariant_relation};
    use crate::site::{Permutation, Site};

    #[test]
    fn interior_satisfies_rules_and_implies_input() {
        let site = Arc::new(
            Site::new(
                3,
                &[Subset(0), Subset(3), Subset(4), Subset(7)],
                vec![Permutation::transposition(3, 0, 1)],
            )
            .unwrap(),
        );
        let rules = [Nor(Left), Nor(Right), Mon(Left), Mon(Right), Bmon, CloBc(Right), Sym];
        for seed in 0..10 {
            let r = random_invariant_relation(&site, seed, 0.9).unwrap();
            for k in 1..=rules.len() {
                let i = horn_interior(&r, &rules[..k]).unwrap();
                for &ax in &rules[..k] {
                    assert!(satisfies(&i, ax), "{ax} seed {seed}");
                }
                assert!(implies(&i, &r).unwrap().holds);
                assert!(is_invariant(&i).holds);
            }
        }
    }

    #[test]
    fn interior_is_largest() {
        // a relation already satisfying the rules is its own interior
        let site = Arc::new(Site::discrete(3));
        let r = crate::relation::builtin_a_indep(&site);
        let i = horn_interior(&r, &[Nor(Right), Mon(Right), Mon(Left), Nor(Left)]).unwrap();
        assert!(i.same_table(&r));
    }
}
