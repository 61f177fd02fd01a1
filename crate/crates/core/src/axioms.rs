//! Finite-semantics checkers for the axioms of independence relations.
//!
//! Every checker scans candidate tuples in ascending canonical order
//! (`A`, `C`, `B`, then any extra sets) and reports the first violation, so
//! witnesses are reproducible. Left-sided axioms are the right-sided ones
//! applied to the mirrored relation `(A, C, B) ↦ r(B, C, A)`; their
//! witnesses are renamed back so `A` is the left argument.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::relation::{is_invariant, TernaryRelation};
use crate::site::Site;
use crate::subset::Subset;
use crate::verdict::{Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxiomId {
    Fin,
    Ex,
    Sym,
    Loc,
    Nor(Side),
    Mon(Side),
    /// Right base monotonicity.
    Bmon,
    Tra(Side),
    Aref,
    /// Closure of the right side alone: `cl(B)`.
    CloB(Side),
    /// Closure together with the base: `cl(B ∪ C)`.
    CloBc(Side),
    Sclo,
    Strfin,
    Ext,
    Fex,
    Indthm,
    Stat,
}

use AxiomId::*;
use Side::{Left, Right};

impl AxiomId {
    /// Every axiom and side, in profile order.
    pub const ALL: [AxiomId; 22] = [
        Fin,
        Ex,
        Sym,
        Loc,
        Nor(Left),
        Nor(Right),
        Mon(Left),
        Mon(Right),
        Bmon,
        Tra(Left),
        Tra(Right),
        Aref,
        CloB(Left),
        CloB(Right),
        CloBc(Left),
        CloBc(Right),
        Sclo,
        Strfin,
        Ext,
        Fex,
        Indthm,
        Stat,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Fin => "FIN",
            Ex => "EX",
            Sym => "SYM",
            Loc => "LOC",
            Nor(_) => "NOR",
            Mon(_) => "MON",
            Bmon => "BMON",
            Tra(_) => "TRA",
            Aref => "AREF",
            CloB(_) => "CLO_B",
            CloBc(_) => "CLO_BC",
            Sclo => "SCLO",
            Strfin => "STRFIN",
            Ext => "EXT",
            Fex => "FEX",
            Indthm => "INDTHM",
            Stat => "STAT",
        }
    }

    pub fn side(self) -> Option<Side> {
        match self {
            Nor(s) | Mon(s) | Tra(s) | CloB(s) | CloBc(s) => Some(s),
            Bmon => Some(Right),
            _ => None,
        }
    }

    /// Checks that read the group and expect an invariant relation.
    pub fn needs_invariance(self) -> bool {
        matches!(self, Strfin | Ext | Fex | Indthm | Stat)
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self, self.side()) {
            (Bmon, _) | (_, None) => f.write_str(self.label()),
            (_, Some(side)) => write!(f, "{side} {}", self.label()),
        }
    }
}

impl FromStr for AxiomId {
    type Err = String;

    /// Accepts `EX`, `right NOR`, `left CLO_BC`, and `BMON` / `right BMON`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (side, label) = match s.split_once(' ') {
            Some(("left", rest)) => (Some(Left), rest),
            Some(("right", rest)) => (Some(Right), rest),
            _ => (None, s),
        };
        AxiomId::ALL
            .into_iter()
            .find(|ax| {
                ax.label() == label
                    && (side.is_none() || ax.side() == side)
                    && (side.is_some() || ax.side().is_none() || *ax == Bmon)
            })
            .ok_or_else(|| format!("unknown axiom {s:?}"))
    }
}

// ---- right-sided checkers over an arbitrary view ----

fn nor_right(site: &Site, f: &impl Fn(Subset, Subset, Subset) -> bool) -> Option<Witness> {
    for a in site.subsets() {
        for c in site.subsets() {
            for b in site.subsets() {
                if f(a, c, b) && !f(a, c, b.union(c)) {
                    return Some(Witness::triple(a, c, b));
                }
            }
        }
    }
    None
}

fn mon_right(site: &Site, f: &impl Fn(Subset, Subset, Subset) -> bool) -> Option<Witness> {
    for a in site.subsets() {
        for c in site.subsets() {
            for b in site.subsets() {
                if f(a, c, b) {
                    continue;
                }
                for d in site.subsets() {
                    if f(a, c, b.union(d)) {
                        return Some(Witness::new([("A", a), ("C", c), ("B", b), ("D", d)]));
                    }
                }
            }
        }
    }
    None
}

fn tra_right(site: &Site, f: &impl Fn(Subset, Subset, Subset) -> bool) -> Option<Witness> {
    let full = site.full();
    for a in site.subsets() {
        for c in site.subsets() {
            for b in Subset::interval(c, full) {
                if !f(a, c, b) {
                    continue;
                }
                for d in Subset::interval(b, full) {
                    if f(a, b, d) && !f(a, c, d) {
                        return Some(Witness::new([("A", a), ("C", c), ("B", b), ("D", d)]));
                    }
                }
            }
        }
    }
    None
}

fn clo_right(site: &Site, with_base: bool, f: &impl Fn(Subset, Subset, Subset) -> bool) -> Option<Witness> {
    for a in site.subsets() {
        for c in site.subsets() {
            for b in site.subsets() {
                let closed = if with_base {
                    site.closure(b.union(c))
                } else {
                    site.closure(b)
                };
                if f(a, c, b) && !f(a, c, closed) {
                    return Some(Witness::triple(a, c, b));
                }
            }
        }
    }
    None
}

fn sided(
    r: &TernaryRelation,
    side: Side,
    check: impl Fn(&dyn Fn(Subset, Subset, Subset) -> bool) -> Option<Witness>,
) -> Option<Witness> {
    match side {
        Right => check(&|a, c, b| r.get(a, c, b)),
        Left => check(&|a, c, b| r.get(b, c, a)).map(|w| w.swap_names("A", "B")),
    }
}

// ---- unsided checkers ----

fn ex(r: &TernaryRelation) -> Option<Witness> {
    let site = r.site();
    for a in site.subsets() {
        for c in site.subsets() {
            if !r.get(a, c, c) {
                return Some(Witness::new([("A", a), ("C", c)]));
            }
        }
    }
    None
}

fn sym(r: &TernaryRelation) -> Option<Witness> {
    r.triples()
        .find(|t| r.get(t.a, t.c, t.b) && !r.get(t.b, t.c, t.a))
        .map(|t| Witness::triple(t.a, t.c, t.b))
}

fn bmon(r: &TernaryRelation) -> Option<Witness> {
    let site = r.site();
    let full = site.full();
    for a in site.subsets() {
        for c in site.subsets() {
            for b in Subset::interval(c, full) {
                for d in Subset::interval(b, full) {
                    if r.get(a, c, d) && !r.get(a, b, d) {
                        return Some(Witness::new([("A", a), ("C", c), ("B", b), ("D", d)]));
                    }
                }
            }
        }
    }
    None
}

fn aref(r: &TernaryRelation) -> Option<Witness> {
    let site = r.site();
    for x in 0..site.n() {
        let sx = Subset::singleton(x);
        for c in site.subsets() {
            if r.get(sx, c, sx) && !site.closure(c).contains(x) {
                return Some(Witness::new([("A", sx), ("C", c)]));
            }
        }
    }
    None
}

fn sclo(r: &TernaryRelation) -> Option<Witness> {
    let site = r.site();
    r.triples()
        .find(|t| {
            r.get(t.a, t.c, t.b)
                != r.get(
                    site.closure(t.a.union(t.c)),
                    site.closure(t.c),
                    site.closure(t.b.union(t.c)),
                )
        })
        .map(|t| Witness::triple(t.a, t.c, t.b))
}

fn strfin(r: &TernaryRelation) -> Option<Witness> {
    let site = r.site();
    for t in r.triples() {
        if r.get(t.a, t.c, t.b) {
            continue;
        }
        let orbits = site.stabilizer_orbits(t.c.union(t.b));
        if let Some(&a2) = orbits.orbit_of(t.a).iter().find(|&&a2| r.get(a2, t.c, t.b)) {
            return Some(Witness::new([("A", t.a), ("C", t.c), ("B", t.b), ("A'", a2)]));
        }
    }
    None
}

fn ext(r: &TernaryRelation) -> Option<Witness> {
    let site = r.site();
    let full = site.full();
    for t in r.true_triples() {
        let orbits = site.stabilizer_orbits(t.b.union(t.c));
        let orbit = orbits.orbit_of(t.a);
        for d in Subset::interval(t.b, full) {
            if !orbit.iter().any(|&a2| r.get(a2, t.c, d)) {
                return Some(
                    Witness::new([("A", t.a), ("C", t.c), ("B", t.b), ("D", d)]).with_searched(orbit.to_vec()),
                );
            }
        }
    }
    None
}

fn fex(r: &TernaryRelation) -> Option<Witness> {
    let site = r.site();
    for t in r.triples() {
        let orbits = site.stabilizer_orbits(t.c);
        let orbit = orbits.orbit_of(t.a);
        if !orbit.iter().any(|&a2| r.get(a2, t.c, t.b)) {
            return Some(Witness::triple(t.a, t.c, t.b).with_searched(orbit.to_vec()));
        }
    }
    None
}

fn indthm(r: &TernaryRelation) -> Option<Witness> {
    let site = r.site();
    for &m in site.models() {
        let over_m = site.stabilizer_orbits(m);
        for a in site.subsets() {
            let over_ma = site.stabilizer_orbits(m.union(a));
            for b in site.subsets() {
                if !r.get(a, m, b) {
                    continue;
                }
                let over_mb = site.stabilizer_orbits(m.union(b));
                let ab = a.union(b);
                for c1 in site.subsets() {
                    if !r.get(c1, m, a) {
                        continue;
                    }
                    for &c2 in over_m.orbit_of(c1) {
                        if !r.get(c2, m, b) {
                            continue;
                        }
                        let candidates = over_ma.orbit_of(c1);
                        let found = candidates.iter().any(|&c| over_mb.same(c, c2) && r.get(c, m, ab));
                        if !found {
                            return Some(
                                Witness::new([("M", m), ("A", a), ("B", b), ("C1", c1), ("C2", c2)])
                                    .with_searched(candidates.to_vec()),
                            );
                        }
                    }
                }
            }
        }
    }
    None
}

fn stat(r: &TernaryRelation) -> Option<Witness> {
    let site = r.site();
    for &m in site.models() {
        let over_m = site.stabilizer_orbits(m);
        for a in site.subsets() {
            let over_ma = site.stabilizer_orbits(m.union(a));
            for c1 in site.subsets() {
                if !r.get(c1, m, a) {
                    continue;
                }
                for &c2 in over_m.orbit_of(c1) {
                    if r.get(c2, m, a) && !over_ma.same(c1, c2) {
                        return Some(Witness::new([("M", m), ("A", a), ("C1", c1), ("C2", c2)]));
                    }
                }
            }
        }
    }
    None
}

/// First violation of `ax`, or `None` when it holds.
pub fn violation(r: &TernaryRelation, ax: AxiomId) -> Option<Witness> {
    let site = r.site().as_ref();
    match ax {
        Fin | Loc => None,
        Ex => ex(r),
        Sym => sym(r),
        Nor(side) => sided(r, side, |f| nor_right(site, &f)),
        Mon(side) => sided(r, side, |f| mon_right(site, &f)),
        Bmon => bmon(r),
        Tra(side) => sided(r, side, |f| tra_right(site, &f)),
        Aref => aref(r),
        CloB(side) => sided(r, side, |f| clo_right(site, false, &f)),
        CloBc(side) => sided(r, side, |f| clo_right(site, true, &f)),
        Sclo => sclo(r),
        Strfin => strfin(r),
        Ext => ext(r),
        Fex => fex(r),
        Indthm => indthm(r),
        Stat => stat(r),
    }
}

/// Whether `r` satisfies `ax`.
pub fn satisfies(r: &TernaryRelation, ax: AxiomId) -> bool {
    violation(r, ax).is_none()
}

pub fn check_axiom(r: &TernaryRelation, ax: AxiomId) -> Verdict {
    let mut v = Verdict::from_witness(violation(r, ax));
    if matches!(ax, Fin | Loc) {
        v = v.with_note("vacuous");
    } else if ax.needs_invariance() && !is_invariant(r).holds {
        v = v.with_note("warning: relation not invariant");
    } else if matches!(ax, Indthm | Stat) && r.site().models().is_empty() {
        v = v.with_note("vacuous: no models");
    }
    v
}

/// Re-derives a failure from its witness using only relation lookups,
/// closure, and type equivalence. True iff the witness demonstrates `ax`
/// failing on `r`.
pub fn replay_witness(r: &TernaryRelation, ax: AxiomId, w: &Witness) -> bool {
    match ax.side() {
        Some(Left) if ax != Bmon => {
            let w = w.clone().swap_names("A", "B");
            replay_view(r, ax, &w, &|a, c, b| r.get(b, c, a))
        }
        _ => replay_view(r, ax, w, &|a, c, b| r.get(a, c, b)),
    }
}

fn replay_view(r: &TernaryRelation, ax: AxiomId, w: &Witness, f: &dyn Fn(Subset, Subset, Subset) -> bool) -> bool {
    let site = r.site();
    let g = |name: &str| w.get(name);
    let all_equiv = |a: Subset, base: Subset| site.subsets().filter(move |&x| site.equivalent(a, x, base));
    match ax {
        Fin | Loc => false,
        Ex => matches!((g("A"), g("C")), (Some(a), Some(c)) if !f(a, c, c)),
        Sym => {
            let (a, c, b) = (w.slot("A"), w.slot("C"), w.slot("B"));
            f(a, c, b) && !f(b, c, a)
        }
        Nor(_) => {
            let (a, c, b) = (w.slot("A"), w.slot("C"), w.slot("B"));
            f(a, c, b) && !f(a, c, b.union(c))
        }
        Mon(_) => {
            let (a, c, b, d) = (w.slot("A"), w.slot("C"), w.slot("B"), w.slot("D"));
            f(a, c, b.union(d)) && !f(a, c, b)
        }
        Bmon => {
            let (a, c, b, d) = (w.slot("A"), w.slot("C"), w.slot("B"), w.slot("D"));
            c.is_subset_of(b) && b.is_subset_of(d) && f(a, c, d) && !f(a, b, d)
        }
        Tra(_) => {
            let (a, c, b, d) = (w.slot("A"), w.slot("C"), w.slot("B"), w.slot("D"));
            c.is_subset_of(b) && b.is_subset_of(d) && f(a, c, b) && f(a, b, d) && !f(a, c, d)
        }
        Aref => {
            let (a, c) = (w.slot("A"), w.slot("C"));
            a.len() == 1 && f(a, c, a) && !a.is_subset_of(site.closure(c))
        }
        CloB(_) | CloBc(_) => {
            let (a, c, b) = (w.slot("A"), w.slot("C"), w.slot("B"));
            let closed = if matches!(ax, CloBc(_)) {
                site.closure(b.union(c))
            } else {
                site.closure(b)
            };
            f(a, c, b) && !f(a, c, closed)
        }
        Sclo => {
            let (a, c, b) = (w.slot("A"), w.slot("C"), w.slot("B"));
            f(a, c, b) != f(site.closure(a.union(c)), site.closure(c), site.closure(b.union(c)))
        }
        Strfin => {
            let (a, c, b, a2) = (w.slot("A"), w.slot("C"), w.slot("B"), w.slot("A'"));
            !f(a, c, b) && site.equivalent(a, a2, c.union(b)) && f(a2, c, b)
        }
        Ext => {
            let (a, c, b, d) = (w.slot("A"), w.slot("C"), w.slot("B"), w.slot("D"));
            f(a, c, b) && b.is_subset_of(d) && all_equiv(a, b.union(c)).all(|a2| !f(a2, c, d))
        }
        Fex => {
            let (a, c, b) = (w.slot("A"), w.slot("C"), w.slot("B"));
            all_equiv(a, c).all(|a2| !f(a2, c, b))
        }
        Indthm => {
            let (m, a, b, c1, c2) = (w.slot("M"), w.slot("A"), w.slot("B"), w.slot("C1"), w.slot("C2"));
            site.models().contains(&m)
                && f(a, m, b)
                && f(c1, m, a)
                && f(c2, m, b)
                && site.equivalent(c1, c2, m)
                && site.subsets().all(|c| {
                    !(f(c, m, a.union(b)) && site.equivalent(c, c1, m.union(a)) && site.equivalent(c, c2, m.union(b)))
                })
        }
        Stat => {
            let (m, a, c1, c2) = (w.slot("M"), w.slot("A"), w.slot("C1"), w.slot("C2"));
            site.models().contains(&m)
                && site.equivalent(c1, c2, m)
                && f(c1, m, a)
                && f(c2, m, a)
                && !site.equivalent(c1, c2, m.union(a))
        }
    }
}

/// Verdicts for every axiom and side, in [`AxiomId::ALL`] order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomProfile {
    pub relation: String,
    pub entries: Vec<(AxiomId, Verdict)>,
}

impl AxiomProfile {
    pub fn get(&self, ax: AxiomId) -> Option<&Verdict> {
        self.entries.iter().find(|(a, _)| *a == ax).map(|(_, v)| v)
    }

    /// Plain-text table: axiom, side, holds, witness.
    pub fn render_table(&self) -> String {
        let mut out = format!("relation: {}\n", self.relation);
        out.push_str(&format!("{:<8} {:<6} {:<6} {}\n", "axiom", "side", "holds", "witness"));
        for (ax, v) in &self.entries {
            let side = ax.side().map_or("-".to_string(), |s| s.to_string());
            let mut detail = v.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
            if let Some(note) = &v.note {
                if !detail.is_empty() {
                    detail.push(' ');
                }
                detail.push_str(&format!("({note})"));
            }
            out.push_str(&format!(
                "{:<8} {:<6} {:<6} {}\n",
                ax.label(),
                side,
                if v.holds { "yes" } else { "no" },
                detail
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(ax, v)| {
                serde_json::json!({
                    "axiom": ax.label(),
                    "side": ax.side(),
                    "holds": v.holds,
                    "note": v.note,
                    "witness": v.witness,
                })
            })
            .collect();
        serde_json::json!({ "relation": self.relation, "axioms": rows })
    }
}

pub fn axiom_profile(r: &TernaryRelation) -> AxiomProfile {
    AxiomProfile {
        relation: r.name().to_string(),
        entries: AxiomId::ALL.iter().map(|&ax| (ax, check_axiom(r, ax))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::operators::{closure_extension, monotonise_naive};
    use crate::relation::{builtin_a_indep, builtin_from_predicate, builtin_full, random_invariant_relation};
    use crate::site::Permutation;

    fn s(elems: &[usize]) -> Subset {
        Subset::from_elems(elems.iter().copied())
    }

    fn s1() -> Arc<Site> {
        Arc::new(Site::new(3, &[s(&[]), s(&[0, 1]), s(&[2]), s(&[0, 1, 2])], vec![]).unwrap())
    }

    #[test]
    fn axiom_names_round_trip() {
        for ax in AxiomId::ALL {
            assert_eq!(ax.to_string().parse::<AxiomId>().unwrap(), ax, "{ax}");
        }
        assert_eq!("BMON".parse::<AxiomId>().unwrap(), Bmon);
        assert!("NOR".parse::<AxiomId>().is_err());
        assert!("left BMON".parse::<AxiomId>().is_err());
    }

    #[test]
    fn full_relation_profile_on_discrete_site() {
        let s0 = Arc::new(Site::discrete(3));
        let p = axiom_profile(&builtin_full(&s0));
        for (ax, v) in &p.entries {
            if *ax == Aref {
                let w = v.witness.as_ref().unwrap();
                assert_eq!((w.slot("A"), w.slot("C")), (s(&[0]), s(&[])));
            } else {
                assert!(v.holds, "{ax}: {v}");
            }
        }
        assert_eq!(p.get(Fin).unwrap().note.as_deref(), Some("vacuous"));
    }

    #[test]
    fn a_indep_is_existent_and_symmetric() {
        let r = builtin_a_indep(&s1());
        assert!(satisfies(&r, Ex));
        assert!(satisfies(&r, Sym));
    }

    #[test]
    fn even_base_fails_bmon() {
        let s0 = Arc::new(Site::discrete(3));
        let r = builtin_from_predicate(&s0, "|C| even", |_, c, _| c.len() % 2 == 0);
        let v = check_axiom(&r, Bmon);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        // least violation in (A, C, B, D) order
        assert_eq!(
            (w.slot("A"), w.slot("C"), w.slot("B"), w.slot("D")),
            (s(&[]), s(&[]), s(&[0]), s(&[0]))
        );
        // the hand-picked instance with D = {0,1} is also a violation
        let alt = Witness::new([("A", s(&[])), ("C", s(&[])), ("B", s(&[0])), ("D", s(&[0, 1]))]);
        assert!(replay_witness(&r, Bmon, &alt));
    }

    #[test]
    fn left_sided_witness_orientation() {
        let s0 = Arc::new(Site::discrete(3));
        // true only when the left side is empty: fails left MON? no, holds; fails left NOR
        let r = builtin_from_predicate(&s0, "A=∅", |a, _, _| a.is_empty());
        assert!(satisfies(&r, Mon(Left)));
        let v = check_axiom(&r, Nor(Left));
        let w = v.witness.unwrap();
        let (a, c, b) = (w.slot("A"), w.slot("C"), w.slot("B"));
        assert!(r.get(a, c, b) && !r.get(a.union(c), c, b));
        assert!(replay_witness(&r, Nor(Left), &w));
    }

    #[test]
    fn operator_outputs_gain_axioms() {
        let site = s1();
        for seed in 0..20 {
            let r = random_invariant_relation(&site, seed, 0.5).unwrap();
            assert!(satisfies(&monotonise_naive(&r), Bmon));
            let c = closure_extension(&r);
            assert!(satisfies(&c, Nor(Right)));
            assert!(satisfies(&c, CloBc(Right)));
        }
    }

    #[test]
    fn invariant_relations_satisfy_strfin() {
        let site = Arc::new(
            Site::new(
                3,
                &Subset::all(3).collect::<Vec<_>>(),
                vec![Permutation::transposition(3, 0, 1), Permutation::transposition(3, 1, 2)],
            )
            .unwrap(),
        );
        for seed in 0..20 {
            let r = random_invariant_relation(&site, seed, 0.4).unwrap();
            assert!(satisfies(&r, Strfin));
        }
        let skew = builtin_from_predicate(&site, "0∈A", |a, _, _| a.contains(0));
        let v = check_axiom(&skew, Strfin);
        assert!(!v.holds);
        assert_eq!(v.note.as_deref(), Some("warning: relation not invariant"));
        assert!(replay_witness(&skew, Strfin, v.witness.as_ref().unwrap()));
    }

    #[test]
    fn witnesses_replay() {
        let site = Arc::new(
            Site::new(
                3,
                &[s(&[]), s(&[0, 1]), s(&[2]), s(&[0, 1, 2])],
                vec![Permutation::transposition(3, 0, 1)],
            )
            .unwrap(),
        );
        for seed in 0..30 {
            let r = random_invariant_relation(&site, seed, [0.2, 0.5, 0.8][seed as usize % 3]).unwrap();
            for ax in AxiomId::ALL {
                let v = check_axiom(&r, ax);
                if let Some(w) = &v.witness {
                    assert!(replay_witness(&r, ax, w), "{ax} seed {seed}: {w}");
                }
            }
        }
    }
}
