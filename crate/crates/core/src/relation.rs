//! Ternary relations `A ⫝_C B` on the subsets of a site.
//!
//! Arguments are always passed in the order `(A, C, B)`: left side, base,
//! right side. Sites with at most [`EXTENSIONAL_MAX`] points get a
//! materialized truth table; larger sites keep a memoized predicate.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex};

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::site::{RawSite, Site, SiteError};
use crate::subset::Subset;
use crate::verdict::{Verdict, Witness};

/// Largest ground size with an extensional table (2^15 triples).
pub const EXTENSIONAL_MAX: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub a: Subset,
    pub c: Subset,
    pub b: Subset,
}

impl Triple {
    pub fn new(a: Subset, c: Subset, b: Subset) -> Self {
        Triple { a, c, b }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.c, self.b)
    }
}

#[derive(Debug, Error)]
pub enum RelationError {
    #[error("triple {0} does not fit a site with {1} points")]
    OutOfRange(Triple, usize),
    #[error("relations live on different sites")]
    SiteMismatch,
    #[error("operation needs an extensional table, site has {0} > {EXTENSIONAL_MAX} points")]
    TooLarge(usize),
    #[error("{what} needs at most {cap} points, site has {n}")]
    Cap { what: &'static str, cap: usize, n: usize },
    #[error("unsupported relation mode {0:?}")]
    Mode(String),
    #[error(transparent)]
    Site(#[from] SiteError),
    #[error("relation file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

type Predicate = dyn Fn(Subset, Subset, Subset) -> bool + Send + Sync;

#[derive(Clone)]
enum Repr {
    Table(Arc<[bool]>),
    Lazy {
        pred: Arc<Predicate>,
        memo: Arc<Mutex<HashMap<u64, bool>>>,
    },
}

/// A ternary relation on the subsets of a site.
#[derive(Clone)]
pub struct TernaryRelation {
    site: Arc<Site>,
    name: String,
    repr: Repr,
}

impl fmt::Debug for TernaryRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TernaryRelation")
            .field("name", &self.name)
            .field("n", &self.site.n())
            .field("extensional", &self.is_extensional())
            .finish()
    }
}

#[inline]
fn index(n: usize, a: Subset, c: Subset, b: Subset) -> usize {
    (a.index() << (2 * n)) | (c.index() << n) | b.index()
}

impl TernaryRelation {
    /// Materializes `pred` on small sites, wraps it lazily otherwise.
    pub fn from_fn<F>(site: &Arc<Site>, name: impl Into<String>, pred: F) -> Self
    where
        F: Fn(Subset, Subset, Subset) -> bool + Send + Sync + 'static,
    {
        let n = site.n();
        let repr = if n <= EXTENSIONAL_MAX {
            let size = 1usize << (3 * n);
            let mask = (1usize << n) - 1;
            let table: Vec<bool> = (0..size)
                .map(|i| {
                    let a = Subset((i >> (2 * n)) as u32);
                    let c = Subset(((i >> n) & mask) as u32);
                    let b = Subset((i & mask) as u32);
                    pred(a, c, b)
                })
                .collect();
            Repr::Table(table.into())
        } else {
            Repr::Lazy {
                pred: Arc::new(pred),
                memo: Arc::default(),
            }
        };
        TernaryRelation {
            site: site.clone(),
            name: name.into(),
            repr,
        }
    }

    /// Wraps an existing table; `table.len()` must be `2^(3n)`.
    pub fn from_table(site: &Arc<Site>, name: impl Into<String>, table: Vec<bool>) -> Self {
        assert_eq!(table.len(), 1usize << (3 * site.n()), "table length");
        TernaryRelation {
            site: site.clone(),
            name: name.into(),
            repr: Repr::Table(table.into()),
        }
    }

    pub fn site(&self) -> &Arc<Site> {
        &self.site
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn is_extensional(&self) -> bool {
        matches!(self.repr, Repr::Table(_))
    }

    pub fn table(&self) -> Option<&[bool]> {
        match &self.repr {
            Repr::Table(t) => Some(t),
            Repr::Lazy { .. } => None,
        }
    }

    /// Unchecked lookup; arguments must fit the site.
    #[inline]
    pub fn get(&self, a: Subset, c: Subset, b: Subset) -> bool {
        let n = self.site.n();
        match &self.repr {
            Repr::Table(t) => t[index(n, a, c, b)],
            Repr::Lazy { pred, memo } => {
                let key = index(n, a, c, b) as u64;
                if let Some(&v) = memo.lock().unwrap().get(&key) {
                    return v;
                }
                let v = pred(a, c, b);
                memo.lock().unwrap().insert(key, v);
                v
            }
        }
    }

    pub fn eval(&self, a: Subset, c: Subset, b: Subset) -> Result<bool, RelationError> {
        let n = self.site.n();
        if !(a.fits(n) && c.fits(n) && b.fits(n)) {
            return Err(RelationError::OutOfRange(Triple::new(a, c, b), n));
        }
        Ok(self.get(a, c, b))
    }

    pub fn same_site(&self, other: &TernaryRelation) -> bool {
        Arc::ptr_eq(&self.site, &other.site) || *self.site == *other.site
    }

    /// Every triple in canonical `(A, C, B)` order.
    pub fn triples(&self) -> impl Iterator<Item = Triple> {
        let n = self.site.n();
        let mask = (1u64 << n) - 1;
        (0..1u64 << (3 * n)).map(move |i| {
            Triple::new(
                Subset((i >> (2 * n)) as u32),
                Subset(((i >> n) & mask) as u32),
                Subset((i & mask) as u32),
            )
        })
    }

    pub fn true_triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.triples().filter(|t| self.get(t.a, t.c, t.b))
    }

    /// A materialized copy, required for file output and table comparison.
    pub fn materialize(&self) -> Result<TernaryRelation, RelationError> {
        if self.is_extensional() {
            return Ok(self.clone());
        }
        let n = self.site.n();
        if n > EXTENSIONAL_MAX {
            return Err(RelationError::TooLarge(n));
        }
        let table = self.triples().map(|t| self.get(t.a, t.c, t.b)).collect();
        Ok(TernaryRelation::from_table(&self.site, self.name.clone(), table))
    }

    /// Same truth values, as tables.
    pub fn same_table(&self, other: &TernaryRelation) -> bool {
        match (self.table(), other.table()) {
            (Some(x), Some(y)) => x == y,
            _ => self
                .triples()
                .all(|t| self.get(t.a, t.c, t.b) == other.get(t.a, t.c, t.b)),
        }
    }

    // ---- file form ----

    pub fn to_file(&self, inline_site: bool, site_path: Option<&str>) -> Result<RelationFile, RelationError> {
        if self.site.n() > EXTENSIONAL_MAX {
            return Err(RelationError::TooLarge(self.site.n()));
        }
        let site = match (inline_site, site_path) {
            (false, Some(p)) => SiteRef::Path(p.to_string()),
            _ => SiteRef::Inline(self.site.to_raw()),
        };
        Ok(RelationFile {
            site,
            mode: "extensional".to_string(),
            true_triples: self
                .true_triples()
                .map(|t| [t.a.bits(), t.c.bits(), t.b.bits()])
                .collect(),
            name: self.name.clone(),
        })
    }

    /// Loads a relation file; a site path is resolved against `base_dir`.
    pub fn from_file(file: &RelationFile, base_dir: Option<&Path>) -> Result<TernaryRelation, RelationError> {
        if file.mode != "extensional" {
            return Err(RelationError::Mode(file.mode.clone()));
        }
        let raw = match &file.site {
            SiteRef::Inline(raw) => raw.clone(),
            SiteRef::Path(p) => {
                let path = match base_dir {
                    Some(dir) => dir.join(p),
                    None => p.into(),
                };
                let text = std::fs::read_to_string(&path).map_err(|source| RelationError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                serde_json::from_str(&text)?
            }
        };
        let site = Arc::new(Site::from_raw(&raw)?);
        TernaryRelation::from_triples(&site, file.name.clone(), file.true_triples.iter().copied())
    }

    pub fn from_triples<I>(
        site: &Arc<Site>,
        name: impl Into<String>,
        triples: I,
    ) -> Result<TernaryRelation, RelationError>
    where
        I: IntoIterator<Item = [u32; 3]>,
    {
        let n = site.n();
        if n > EXTENSIONAL_MAX {
            return Err(RelationError::TooLarge(n));
        }
        let mut table = vec![false; 1usize << (3 * n)];
        for [a, c, b] in triples {
            let t = Triple::new(Subset(a), Subset(c), Subset(b));
            if !(t.a.fits(n) && t.c.fits(n) && t.b.fits(n)) {
                return Err(RelationError::OutOfRange(t, n));
            }
            table[index(n, t.a, t.c, t.b)] = true;
        }
        Ok(TernaryRelation::from_table(site, name, table))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteRef {
    Path(String),
    Inline(RawSite),
}

/// Relation file contents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFile {
    pub site: SiteRef,
    pub mode: String,
    pub true_triples: Vec<[u32; 3]>,
    pub name: String,
}

// ---- built-in relations ----

/// The constantly true relation.
pub fn builtin_full(site: &Arc<Site>) -> TernaryRelation {
    TernaryRelation::from_fn(site, "full", |_, _, _| true)
}

/// The constantly false relation.
pub fn builtin_empty(site: &Arc<Site>) -> TernaryRelation {
    TernaryRelation::from_fn(site, "empty", |_, _, _| false)
}

/// `cl(A ∪ C) ∩ cl(B ∪ C) = cl(C)`.
pub fn builtin_a_indep(site: &Arc<Site>) -> TernaryRelation {
    let s = site.clone();
    TernaryRelation::from_fn(site, "a-indep", move |a, c, b| {
        s.closure(a.union(c)).intersect(s.closure(b.union(c))) == s.closure(c)
    })
}

pub fn builtin_from_predicate<F>(site: &Arc<Site>, name: impl Into<String>, pred: F) -> TernaryRelation
where
    F: Fn(Subset, Subset, Subset) -> bool + Send + Sync + 'static,
{
    TernaryRelation::from_fn(site, name, pred)
}

/// Looks up a built-in by name (`full`, `empty`, `a-indep`).
pub fn builtin_by_name(site: &Arc<Site>, name: &str) -> Option<TernaryRelation> {
    match name {
        "full" => Some(builtin_full(site)),
        "empty" => Some(builtin_empty(site)),
        "a-indep" => Some(builtin_a_indep(site)),
        _ => None,
    }
}

// ---- comparisons ----

/// Every group element preserves the relation. The witness is the first
/// triple (canonical order) with the first element moving it in or out.
pub fn is_invariant(r: &TernaryRelation) -> Verdict {
    let group = r.site().group();
    if group.is_trivial() {
        return Verdict::pass();
    }
    for t in r.triples() {
        let v = r.get(t.a, t.c, t.b);
        for g in group.elements() {
            if r.get(g.apply(t.a), g.apply(t.c), g.apply(t.b)) != v {
                return Verdict::fail(Witness::triple(t.a, t.c, t.b).with_sigma(g.clone()));
            }
        }
    }
    Verdict::pass()
}

/// `r1 → r2`; the witness is the first triple true in `r1` but not `r2`.
pub fn implies(r1: &TernaryRelation, r2: &TernaryRelation) -> Result<Verdict, RelationError> {
    if !r1.same_site(r2) {
        return Err(RelationError::SiteMismatch);
    }
    Ok(Verdict::from_witness(
        r1.triples()
            .find(|t| r1.get(t.a, t.c, t.b) && !r2.get(t.a, t.c, t.b))
            .map(|t| Witness::triple(t.a, t.c, t.b)),
    ))
}

/// Table equality; the witness is the first triple where the two differ.
pub fn equals(r1: &TernaryRelation, r2: &TernaryRelation) -> Result<Verdict, RelationError> {
    if !r1.same_site(r2) {
        return Err(RelationError::SiteMismatch);
    }
    Ok(Verdict::from_witness(
        r1.triples()
            .find(|t| r1.get(t.a, t.c, t.b) != r2.get(t.a, t.c, t.b))
            .map(|t| Witness::triple(t.a, t.c, t.b)),
    ))
}

// ---- sampling ----

/// A uniform draw in `[0, 1)` from the top 53 bits of one `u64`.
pub(crate) fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Random relation constant on group orbits of triples.
///
/// Generator: ChaCha8 seeded with `seed_from_u64(seed)`. Orbits are visited
/// in ascending order of their least triple; each consumes one `u64`, and
/// the orbit is true iff `(x >> 11) · 2^-53 < density`.
pub fn random_invariant_relation(site: &Arc<Site>, seed: u64, density: f64) -> Result<TernaryRelation, RelationError> {
    let n = site.n();
    if n > EXTENSIONAL_MAX {
        return Err(RelationError::TooLarge(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1usize << (3 * n);
    let mut assigned = vec![false; size];
    let mut table = vec![false; size];
    let mask = (1usize << n) - 1;
    for i in 0..size {
        if assigned[i] {
            continue;
        }
        let value = unit_f64(&mut rng) < density;
        let (a, c, b) = (
            Subset((i >> (2 * n)) as u32),
            Subset(((i >> n) & mask) as u32),
            Subset((i & mask) as u32),
        );
        for g in site.group().elements() {
            let j = index(n, g.apply(a), g.apply(c), g.apply(b));
            assigned[j] = true;
            table[j] = value;
        }
    }
    Ok(TernaryRelation::from_table(
        site,
        format!("rand(seed={seed},density={density})"),
        table,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::site::Permutation;

    fn s(elems: &[usize]) -> Subset {
        Subset::from_elems(elems.iter().copied())
    }

    fn s1(gens: Vec<Permutation>) -> Arc<Site> {
        Arc::new(Site::new(3, &[s(&[]), s(&[0, 1]), s(&[2]), s(&[0, 1, 2])], gens).unwrap())
    }

    #[test]
    fn a_indep_values() {
        let site = s1(vec![]);
        let r = builtin_a_indep(&site);
        assert!(r.eval(s(&[2]), s(&[]), s(&[0])).unwrap());
        assert!(!r.eval(s(&[0]), s(&[]), s(&[1])).unwrap());
        for c in site.subsets() {
            for b in site.subsets() {
                assert!(r.get(Subset::EMPTY, c, b));
            }
        }
        assert!(r.eval(Subset(8), s(&[]), s(&[])).is_err());
    }

    #[test]
    fn predicates_on_discrete_site() {
        let s0 = Arc::new(Site::discrete(3));
        let no0 = builtin_from_predicate(&s0, "0∉C", |_, c, _| !c.contains(0));
        assert!(!no0.get(s(&[1]), s(&[0]), s(&[2])));
        let even = builtin_from_predicate(&s0, "|C| even", |_, c, _| c.len() % 2 == 0);
        assert!(even.get(s(&[0]), s(&[]), s(&[1])));
        assert!(builtin_full(&s0)
            .triples()
            .all(|t| builtin_full(&s0).get(t.a, t.c, t.b)));
    }

    #[test]
    fn invariance() {
        let site = s1(vec![Permutation::transposition(3, 0, 1)]);
        assert!(is_invariant(&builtin_a_indep(&site)).holds);
        let r = builtin_from_predicate(&site, "0∈A", |a, _, _| a.contains(0));
        let v = is_invariant(&r);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.sigma, Some(Permutation::transposition(3, 0, 1)));
        assert_eq!((w.slot("A"), w.slot("C"), w.slot("B")), (s(&[0]), s(&[]), s(&[])));
        // trivial group: anything is invariant
        let trivial = s1(vec![]);
        let r = builtin_from_predicate(&trivial, "0∈A", |a, _, _| a.contains(0));
        assert!(is_invariant(&r).holds);
    }

    #[test]
    fn implication_and_equality() {
        let site = s1(vec![]);
        let full = builtin_full(&site);
        let a = builtin_a_indep(&site);
        assert!(implies(&a, &full).unwrap().holds);
        let v = implies(&full, &a).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        // first triple in (A, C, B) order where a-indep fails
        let first = a.triples().find(|t| !a.get(t.a, t.c, t.b)).unwrap();
        assert_eq!((w.slot("A"), w.slot("C"), w.slot("B")), (first.a, first.c, first.b));
        // the example triple is a counterexample as well
        assert!(!a.get(s(&[0]), s(&[]), s(&[1])));
        assert!(equals(&a, &a).unwrap().holds);
        let other = Arc::new(Site::discrete(3));
        assert!(matches!(
            implies(&a, &builtin_full(&other)),
            Err(RelationError::SiteMismatch)
        ));
    }

    #[test]
    fn random_relations_are_deterministic() {
        let s0 = Arc::new(Site::discrete(3));
        let x = random_invariant_relation(&s0, 42, 0.5).unwrap();
        let y = random_invariant_relation(&s0, 42, 0.5).unwrap();
        assert_eq!(x.table(), y.table());
        let full = random_invariant_relation(&s0, 1, 1.0).unwrap();
        assert!(full.same_table(&builtin_full(&s0)));
        let none = random_invariant_relation(&s0, 1, 0.0).unwrap();
        assert!(none.same_table(&builtin_empty(&s0)));
    }

    #[test]
    fn file_round_trip() {
        let site = s1(vec![Permutation::transposition(3, 0, 1)]);
        let r = random_invariant_relation(&site, 9, 0.5).unwrap();
        let file = r.to_file(true, None).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let back = TernaryRelation::from_file(&serde_json::from_str(&text).unwrap(), None).unwrap();
        assert!(back.same_table(&r));
        assert_eq!(back.name(), r.name());
    }

    #[test]
    fn lazy_relations_on_larger_sites() {
        let big = Arc::new(Site::discrete(7));
        let r = builtin_a_indep(&big);
        assert!(!r.is_extensional());
        assert!(r.eval(s(&[6]), s(&[]), s(&[5])).unwrap());
        assert!(!r.eval(s(&[6]), s(&[]), s(&[6])).unwrap());
        assert!(r.eval(s(&[6]), s(&[]), s(&[6])).is_ok());
        assert!(matches!(
            random_invariant_relation(&big, 0, 0.5),
            Err(RelationError::TooLarge(7))
        ));
    }
}
