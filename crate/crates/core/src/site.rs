//! Finite sites: a ground set with a closure operator (given as a Moore
//! family), a symmetry group, and designated model subsets.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subset::{Subset, MAX_GROUND};

/// Default bound on materialized group size.
pub const DEFAULT_GROUP_CAP: usize = 20160;

/// A permutation of `{0, .., n-1}`, stored as its image list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u8).collect())
    }

    /// Builds from an image list, rejecting anything that is not a bijection.
    pub fn from_images(images: &[usize]) -> Result<Self, String> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in images {
            if x >= n {
                return Err(format!("image {x} out of range for n = {n}"));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(format!("image {x} repeated"));
            }
        }
        Ok(Permutation(images.iter().map(|&x| x as u8).collect()))
    }

    /// The transposition swapping `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(i, j);
        p
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&x| x as usize)
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    #[inline]
    pub fn apply(&self, s: Subset) -> Subset {
        let mut out = 0u32;
        for x in s.elems() {
            out |= 1 << self.0[x];
        }
        Subset(out)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn fixes_pointwise(&self, s: Subset) -> bool {
        s.elems().all(|x| self.0[x] as usize == x)
    }

    /// Every permutation of `{0, .., n-1}` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..n as u8).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation, e.g. `(0 1)(2 3)`; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut wrote = false;
        for start in 0..self.0.len() {
            if seen[start] || self.image(start) == start {
                continue;
            }
            f.write_str("(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.image(x);
            }
            f.write_str(")")?;
            wrote = true;
        }
        if !wrote {
            f.write_str("()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A closure operator represented by its Moore family of closed sets, with
/// the derived closure map precomputed for every subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureOperator {
    n: usize,
    closed_sets: Vec<Subset>,
    table: Vec<Subset>,
}

impl ClosureOperator {
    /// Assumes `closed_sets` already forms a Moore family on `n` points;
    /// use [`validate_site`] on untrusted data.
    fn from_moore_family(n: usize, closed_sets: &[Subset]) -> Self {
        let sets: BTreeSet<Subset> = closed_sets.iter().copied().collect();
        let size = 1usize << n;
        let mut is_closed = vec![false; size];
        for s in &sets {
            is_closed[s.index()] = true;
        }
        // cl(A) = A if closed, else the meet of cl(A + x) over x ∉ A.
        // Supersets have larger masks, so a descending sweep sees them first.
        let full = Subset::full(n);
        let mut table = vec![Subset::EMPTY; size];
        for mask in (0..size).rev() {
            let a = Subset(mask as u32);
            table[mask] = if is_closed[mask] {
                a
            } else {
                full.minus(a)
                    .elems()
                    .map(|x| table[a.union(Subset::singleton(x)).index()])
                    .fold(full, Subset::intersect)
            };
        }
        ClosureOperator {
            n,
            closed_sets: sets.into_iter().collect(),
            table,
        }
    }

    /// The trivial closure: every subset is closed.
    pub fn discrete(n: usize) -> Self {
        let all: Vec<Subset> = Subset::all(n).collect();
        Self::from_moore_family(n, &all)
    }

    /// Converts an explicit closure map (indexed by subset mask) into its
    /// Moore family, rejecting maps that are not closure operators.
    pub fn from_map(n: usize, map: &[Subset]) -> Result<Self, Vec<Violation>> {
        let mut errs = Vec::new();
        if map.len() != 1 << n {
            errs.push(Violation::ClosureMap(format!(
                "map has {} entries, expected {}",
                map.len(),
                1usize << n
            )));
            return Err(errs);
        }
        for a in Subset::all(n) {
            let ca = map[a.index()];
            if !ca.fits(n) {
                errs.push(Violation::ClosureMap(format!("cl({a}) = {} out of range", ca.bits())));
                continue;
            }
            if !a.is_subset_of(ca) {
                errs.push(Violation::ClosureMap(format!("not extensive: cl({a}) = {ca}")));
            }
            if map[ca.index()] != ca {
                errs.push(Violation::ClosureMap(format!(
                    "not idempotent: cl({a}) = {ca} but cl({ca}) = {}",
                    map[ca.index()]
                )));
            }
            for x in 0..n {
                let b = a.union(Subset::singleton(x));
                if !ca.is_subset_of(map[b.index()]) {
                    errs.push(Violation::ClosureMap(format!(
                        "not monotone: cl({a}) = {ca} ⊄ cl({b}) = {}",
                        map[b.index()]
                    )));
                }
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        let closed: Vec<Subset> = Subset::all(n).filter(|a| map[a.index()] == *a).collect();
        Ok(Self::from_moore_family(n, &closed))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn closed_sets(&self) -> &[Subset] {
        &self.closed_sets
    }

    #[inline]
    pub fn closure(&self, a: Subset) -> Subset {
        self.table[a.index()]
    }

    #[inline]
    pub fn is_closed(&self, a: Subset) -> bool {
        self.table[a.index()] == a
    }

    pub fn is_discrete(&self) -> bool {
        self.closed_sets.len() == 1 << self.n
    }

    /// Exchange: `y ∈ cl(A ∪ {x}) \ cl(A)` implies `x ∈ cl(A ∪ {y})`.
    pub fn has_exchange(&self) -> bool {
        self.exchange_violation().is_none()
    }

    /// First `(A, x, y)` violating exchange, in ascending order.
    pub fn exchange_violation(&self) -> Option<(Subset, usize, usize)> {
        for a in Subset::all(self.n) {
            let ca = self.closure(a);
            for x in 0..self.n {
                let cax = self.closure(a.union(Subset::singleton(x)));
                for y in cax.minus(ca).elems() {
                    if !self.closure(a.union(Subset::singleton(y))).contains(x) {
                        return Some((a, x, y));
                    }
                }
            }
        }
        None
    }

    /// Whether `sigma` maps closed sets onto closed sets.
    pub fn preserved_by(&self, sigma: &Permutation) -> bool {
        self.closed_sets.iter().all(|&s| self.is_closed(sigma.apply(s)))
    }

    /// All permutations of the ground set preserving the family.
    pub fn automorphisms(&self) -> Vec<Permutation> {
        Permutation::all(self.n)
            .into_iter()
            .filter(|p| self.preserved_by(p))
            .collect()
    }
}

/// A permutation group given by generators, materialized in full.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
}

impl SymmetryGroup {
    pub fn trivial(n: usize) -> Self {
        SymmetryGroup {
            generators: Vec::new(),
            elements: vec![Permutation::identity(n)],
        }
    }

    /// Breadth-first closure of the generators under composition. The
    /// identity comes first; the remaining order is the BFS discovery order.
    pub fn generate(n: usize, generators: Vec<Permutation>, cap: usize) -> Result<Self, SiteError> {
        let id = Permutation::identity(n);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut elements = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in &generators {
                let h = s.compose(&g);
                if seen.insert(h.clone()) {
                    if seen.len() > cap {
                        return Err(SiteError::GroupTooLarge { cap });
                    }
                    elements.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        Ok(SymmetryGroup { generators, elements })
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }
}

/// Orbits of subsets under the pointwise stabilizer of some base set.
#[derive(Debug)]
pub struct StabilizerOrbits {
    label: Vec<u32>,
    members: Vec<Vec<Subset>>,
}

impl StabilizerOrbits {
    #[inline]
    pub fn orbit_id(&self, a: Subset) -> u32 {
        self.label[a.index()]
    }

    /// Members of the orbit containing `a`, ascending.
    #[inline]
    pub fn orbit_of(&self, a: Subset) -> &[Subset] {
        &self.members[self.label[a.index()] as usize]
    }

    pub fn same(&self, a: Subset, b: Subset) -> bool {
        self.label[a.index()] == self.label[b.index()]
    }
}

/// The finite stand-in for an ambient structure.
pub struct Site {
    n: usize,
    cl: ClosureOperator,
    group: SymmetryGroup,
    models: Vec<Subset>,
    orbit_cache: Vec<OnceLock<Arc<StabilizerOrbits>>>,
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Site")
            .field("n", &self.n)
            .field("closed_sets", &self.cl.closed_sets)
            .field("generators", &self.group.generators)
            .field("models", &self.models)
            .finish()
    }
}

impl PartialEq for Site {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.cl == other.cl
            && self.group.elements == other.group.elements
            && self.models == other.models
    }
}

impl Site {
    /// Builds a validated site from closed sets and group generators, with
    /// the default models (all closed sets).
    pub fn new(n: usize, closed_sets: &[Subset], generators: Vec<Permutation>) -> Result<Site, SiteError> {
        Site::from_raw(&RawSite {
            n,
            closed_sets: Some(closed_sets.iter().map(|s| s.bits()).collect()),
            closure_map: None,
            group_generators: generators.iter().map(|g| g.images().collect()).collect(),
            models: None,
        })
    }

    /// The site where every subset is closed and the group is trivial.
    pub fn discrete(n: usize) -> Site {
        Site::assemble(n, ClosureOperator::discrete(n), SymmetryGroup::trivial(n), None)
    }

    pub fn from_raw(raw: &RawSite) -> Result<Site, SiteError> {
        Site::from_raw_with_cap(raw, DEFAULT_GROUP_CAP)
    }

    pub fn from_raw_with_cap(raw: &RawSite, cap: usize) -> Result<Site, SiteError> {
        let report = validate_site(raw);
        if !report.is_valid() {
            return Err(SiteError::Invalid(report));
        }
        let n = raw.n;
        let cl = match (&raw.closed_sets, &raw.closure_map) {
            (Some(sets), _) => {
                let sets: Vec<Subset> = sets.iter().map(|&m| Subset(m)).collect();
                ClosureOperator::from_moore_family(n, &sets)
            }
            (None, Some(map)) => {
                let map: Vec<Subset> = map.iter().map(|&m| Subset(m)).collect();
                ClosureOperator::from_map(n, &map)
                    .map_err(|v| SiteError::Invalid(ValidationReport { violations: v }))?
            }
            (None, None) => unreachable!("rejected by validation"),
        };
        let generators = raw
            .group_generators
            .iter()
            .map(|g| Permutation::from_images(g).expect("validated"))
            .collect();
        let group = SymmetryGroup::generate(n, generators, cap)?;
        let models = raw.models.as_ref().map(|ms| {
            ms.iter()
                .map(|&m| Subset(m))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        });
        Ok(Site::assemble(n, cl, group, models))
    }

    /// Combines already-checked parts. The group must preserve `cl`.
    pub fn assemble(n: usize, cl: ClosureOperator, group: SymmetryGroup, models: Option<Vec<Subset>>) -> Site {
        debug_assert!(group.elements.iter().all(|g| cl.preserved_by(g)));
        let models = models.unwrap_or_else(|| cl.closed_sets.clone());
        Site {
            n,
            cl,
            group,
            models,
            orbit_cache: (0..1usize << n).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Same closure and models, different (already-checked) group.
    pub fn with_group(&self, group: SymmetryGroup) -> Site {
        Site::assemble(self.n, self.cl.clone(), group, Some(self.models.clone()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn cl(&self) -> &ClosureOperator {
        &self.cl
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn models(&self) -> &[Subset] {
        &self.models
    }

    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        Subset::all(self.n)
    }

    #[inline]
    pub fn closure(&self, a: Subset) -> Subset {
        self.cl.closure(a)
    }

    pub fn contains_subset(&self, a: Subset) -> bool {
        a.fits(self.n)
    }

    /// Orbits under the pointwise stabilizer of `base`, computed once per base.
    pub fn stabilizer_orbits(&self, base: Subset) -> Arc<StabilizerOrbits> {
        self.orbit_cache[base.index()]
            .get_or_init(|| Arc::new(self.compute_orbits(base)))
            .clone()
    }

    fn compute_orbits(&self, base: Subset) -> StabilizerOrbits {
        let stab: Vec<&Permutation> = self.group.elements.iter().filter(|g| g.fixes_pointwise(base)).collect();
        let size = 1usize << self.n;
        let mut label = vec![u32::MAX; size];
        let mut members = Vec::new();
        for a in Subset::all(self.n) {
            if label[a.index()] != u32::MAX {
                continue;
            }
            let id = members.len() as u32;
            let mut orbit: Vec<Subset> = stab.iter().map(|g| g.apply(a)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for s in &orbit {
                label[s.index()] = id;
            }
            members.push(orbit);
        }
        StabilizerOrbits { label, members }
    }

    /// Type equality over `base`: some group element fixing `base` pointwise
    /// maps `a` onto `a2`.
    pub fn equivalent(&self, a: Subset, a2: Subset, base: Subset) -> bool {
        self.stabilizer_orbits(base).same(a, a2)
    }

    pub fn to_raw(&self) -> RawSite {
        RawSite {
            n: self.n,
            closed_sets: Some(self.cl.closed_sets.iter().map(|s| s.bits()).collect()),
            closure_map: None,
            group_generators: self.group.generators.iter().map(|g| g.images().collect()).collect(),
            models: Some(self.models.iter().map(|s| s.bits()).collect()),
        }
    }
}

/// Site file contents. Either `closed_sets` or `closure_map` must be given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSite {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_sets: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_map: Option<Vec<u32>>,
    #[serde(default)]
    pub group_generators: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    GroundSize(usize),
    MissingClosure,
    OutOfRange {
        field: &'static str,
        mask: u32,
    },
    FullSetAbsent,
    NotIntersectionClosed {
        a: Subset,
        b: Subset,
    },
    ClosureMap(String),
    BadGenerator {
        index: usize,
        reason: String,
    },
    NotEquivariant {
        generator: Permutation,
        closed: Subset,
        image: Subset,
    },
    ModelNotClosed(Subset),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GroundSize(n) => write!(f, "ground size {n} outside 1..={MAX_GROUND}"),
            Violation::MissingClosure => f.write_str("neither closed_sets nor closure_map given"),
            Violation::OutOfRange { field, mask } => write!(f, "{field}: mask {mask} out of range"),
            Violation::FullSetAbsent => f.write_str("full set absent"),
            Violation::NotIntersectionClosed { a, b } => {
                write!(f, "{a} ∩ {b} = {} not closed", a.intersect(*b))
            }
            Violation::ClosureMap(msg) => write!(f, "closure map: {msg}"),
            Violation::BadGenerator { index, reason } => write!(f, "generator {index}: {reason}"),
            Violation::NotEquivariant {
                generator,
                closed,
                image,
            } => {
                write!(f, "σ({closed}) = {image} not closed (σ = {generator})")
            }
            Violation::ModelNotClosed(m) => write!(f, "model {m} not closed"),
        }
    }
}

/// Every violated site invariant, each with a witness. Empty iff valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "OK");
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SiteError {
    #[error("invalid site:\n{0}")]
    Invalid(ValidationReport),
    #[error("symmetry group exceeds {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("site file: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn validate_site(raw: &RawSite) -> ValidationReport {
    let mut v = Vec::new();
    let n = raw.n;
    if n == 0 || n > MAX_GROUND {
        v.push(Violation::GroundSize(n));
        return ValidationReport { violations: v };
    }
    let fits = |m: u32| Subset(m).fits(n);

    let cl = match (&raw.closed_sets, &raw.closure_map) {
        (Some(sets), _) => {
            let mut ok = true;
            for &m in sets {
                if !fits(m) {
                    v.push(Violation::OutOfRange {
                        field: "closed_sets",
                        mask: m,
                    });
                    ok = false;
                }
            }
            let family: BTreeSet<Subset> = sets.iter().filter(|&&m| fits(m)).map(|&m| Subset(m)).collect();
            if !family.contains(&Subset::full(n)) {
                v.push(Violation::FullSetAbsent);
                ok = false;
            }
            let members: Vec<Subset> = family.iter().copied().collect();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    if !family.contains(&a.intersect(b)) {
                        v.push(Violation::NotIntersectionClosed { a, b });
                        ok = false;
                    }
                }
            }
            ok.then(|| ClosureOperator::from_moore_family(n, &members))
        }
        (None, Some(map)) => {
            let mut ok = true;
            for &m in map {
                if !fits(m) {
                    v.push(Violation::OutOfRange {
                        field: "closure_map",
                        mask: m,
                    });
                    ok = false;
                }
            }
            if ok {
                let map: Vec<Subset> = map.iter().map(|&m| Subset(m)).collect();
                match ClosureOperator::from_map(n, &map) {
                    Ok(cl) => Some(cl),
                    Err(errs) => {
                        v.extend(errs);
                        None
                    }
                }
            } else {
                None
            }
        }
        (None, None) => {
            v.push(Violation::MissingClosure);
            None
        }
    };

    for (index, g) in raw.group_generators.iter().enumerate() {
        if g.len() != n {
            v.push(Violation::BadGenerator {
                index,
                reason: format!("length {} differs from n = {n}", g.len()),
            });
            continue;
        }
        let sigma = match Permutation::from_images(g) {
            Ok(p) => p,
            Err(reason) => {
                v.push(Violation::BadGenerator { index, reason });
                continue;
            }
        };
        if let Some(cl) = &cl {
            for &s in cl.closed_sets() {
                let image = sigma.apply(s);
                if !cl.is_closed(image) {
                    v.push(Violation::NotEquivariant {
                        generator: sigma.clone(),
                        closed: s,
                        image,
                    });
                }
            }
        }
    }

    if let Some(models) = &raw.models {
        for &m in models {
            if !fits(m) {
                v.push(Violation::OutOfRange {
                    field: "models",
                    mask: m,
                });
            } else if let Some(cl) = &cl {
                if !cl.is_closed(Subset(m)) {
                    v.push(Violation::ModelNotClosed(Subset(m)));
                }
            }
        }
    }
    ValidationReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(elems: &[usize]) -> Subset {
        Subset::from_elems(elems.iter().copied())
    }

    /// n = 3, closed sets ∅, {0,1}, {2}, {0,1,2}.
    fn s1_raw(gens: Vec<Vec<usize>>) -> RawSite {
        RawSite {
            n: 3,
            closed_sets: Some(vec![0, 3, 4, 7]),
            closure_map: None,
            group_generators: gens,
            models: None,
        }
    }

    #[test]
    fn closure_on_s1() {
        let site = Site::from_raw(&s1_raw(vec![])).unwrap();
        // oracle: intersect every closed superset
        for a in site.subsets() {
            let want = site
                .cl()
                .closed_sets()
                .iter()
                .filter(|c| a.is_subset_of(**c))
                .fold(site.full(), |acc, c| acc.intersect(*c));
            assert_eq!(site.closure(a), want);
        }
        assert_eq!(site.closure(s(&[0])), s(&[0, 1]));
        assert_eq!(site.closure(Subset::EMPTY), Subset::EMPTY);
        assert_eq!(site.closure(s(&[0, 1, 2])), s(&[0, 1, 2]));
    }

    #[test]
    fn equivalence_under_stabilizers() {
        let site = Site::from_raw(&s1_raw(vec![vec![1, 0, 2]])).unwrap();
        assert_eq!(site.group().order(), 2);
        assert!(site.equivalent(s(&[0]), s(&[1]), Subset::EMPTY));
        assert!(!site.equivalent(s(&[0]), s(&[1]), s(&[0])));
        let trivial = Site::from_raw(&s1_raw(vec![])).unwrap();
        assert!(!trivial.equivalent(s(&[0]), s(&[1]), Subset::EMPTY));
        for a in trivial.subsets() {
            assert!(trivial.equivalent(a, a, s(&[2])));
        }
    }

    #[test]
    fn validation_reports() {
        assert!(validate_site(&s1_raw(vec![])).is_valid());

        let report = validate_site(&s1_raw(vec![vec![0, 2, 1]]));
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        assert!(
            msgs.iter().any(|m| m.starts_with("σ({0,1}) = {0,2} not closed")),
            "{msgs:?}"
        );

        let mut missing = s1_raw(vec![]);
        missing.closed_sets = Some(vec![0, 3, 4]);
        let report = validate_site(&missing);
        assert!(report.violations.contains(&Violation::FullSetAbsent));

        let mut not_meet = s1_raw(vec![]);
        not_meet.closed_sets = Some(vec![3, 6, 7]);
        let report = validate_site(&not_meet);
        assert!(report.violations.contains(&Violation::NotIntersectionClosed {
            a: s(&[0, 1]),
            b: s(&[1, 2])
        }));

        let mut bad_model = s1_raw(vec![]);
        bad_model.models = Some(vec![1]);
        assert_eq!(
            validate_site(&bad_model).violations,
            vec![Violation::ModelNotClosed(s(&[0]))]
        );

        let bad_gen = validate_site(&s1_raw(vec![vec![0, 0, 1]]));
        assert!(matches!(bad_gen.violations[0], Violation::BadGenerator { .. }));
    }

    #[test]
    fn closure_map_form() {
        let site = Site::from_raw(&s1_raw(vec![])).unwrap();
        let map: Vec<u32> = site.subsets().map(|a| site.closure(a).bits()).collect();
        let raw = RawSite {
            n: 3,
            closed_sets: None,
            closure_map: Some(map),
            group_generators: vec![],
            models: None,
        };
        let from_map = Site::from_raw(&raw).unwrap();
        assert_eq!(from_map.cl(), site.cl());

        // not extensive
        let bad = RawSite {
            closure_map: Some(vec![0; 8]),
            ..raw
        };
        assert!(!validate_site(&bad).is_valid());
    }

    #[test]
    fn group_generation_and_cap() {
        let n = 4;
        let gens = vec![
            Permutation::transposition(n, 0, 1),
            Permutation::from_images(&[1, 2, 3, 0]).unwrap(),
        ];
        let g = SymmetryGroup::generate(n, gens.clone(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(g.order(), 24);
        assert!(g.elements()[0].is_identity());
        assert!(matches!(
            SymmetryGroup::generate(n, gens, 10),
            Err(SiteError::GroupTooLarge { cap: 10 })
        ));
    }

    #[test]
    fn permutation_display() {
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert_eq!(Permutation::transposition(3, 1, 2).to_string(), "(1 2)");
        assert_eq!(
            Permutation::from_images(&[1, 2, 0, 4, 3]).unwrap().to_string(),
            "(0 1 2)(3 4)"
        );
        assert_eq!(Permutation::all(4).len(), 24);
    }

    #[test]
    fn exchange_property() {
        // discrete closure is a pregeometry; S1 is not
        assert!(ClosureOperator::discrete(3).has_exchange());
        let s1 = Site::from_raw(&s1_raw(vec![])).unwrap();
        assert!(s1.cl().has_exchange());
        // {∅, {0}, X} on n=2: 1 ∈ cl({0}∪{1}) trivially; cl(∅ ∪ {1}) = X ∋ 0 but cl({0}) = {0}
        let c = Site::new(2, &[s(&[]), s(&[0]), s(&[0, 1])], vec![]).unwrap();
        assert_eq!(c.cl().exchange_violation(), Some((Subset::EMPTY, 1, 0)));
    }
}
