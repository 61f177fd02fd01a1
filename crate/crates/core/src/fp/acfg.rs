//! The linear-algebra core of the ACFG counterexample.
//!
//! Field products are modelled by monomial coordinates `(a, d1, d2, ad1,
//! ad2)` and the generic subgroup by a subspace `G`. The transcendental `x`
//! of the generic-intersection condition is modelled by the degree-one slice
//! `x·u − v`: such an element lies in the base field iff its `x`-coefficient
//! vanishes.

use std::fmt;

use serde::Serialize;

use super::space::{left_kernel, FpError, FpSubspace, FpVector};

/// Coordinate names of the five-dimensional instance.
pub const MONOMIALS: [&str; 5] = ["a", "d1", "d2", "ad1", "ad2"];
const A: usize = 0;
const D1: usize = 1;
const D2: usize = 2;
const AD1: usize = 3;
const AD2: usize = 4;

/// Why the Kim analogue fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KimFailure {
    /// A vector of `U ∩ V` outside `W`.
    NotFree { vector: FpVector },
    /// A vector of `G ∩ (U + V)` outside `G ∩ U + G ∩ V`.
    NotSplit { vector: FpVector },
}

impl KimFailure {
    pub fn vector(&self) -> &FpVector {
        match self {
            KimFailure::NotFree { vector } | KimFailure::NotSplit { vector } => vector,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KimVerdict {
    pub holds: bool,
    pub failure: Option<KimFailure>,
}

/// First basis vector of `big` outside `small`, scaled so its last nonzero
/// coordinate is 1.
fn missing(big: &FpSubspace, small: &FpSubspace) -> Result<Option<FpVector>, FpError> {
    for b in big.basis() {
        if !small.contains(b)? {
            return Ok(Some(b.normalized_last()));
        }
    }
    Ok(None)
}

/// Kim-independence analogue of `U` and `V` over `W` with generic part `G`:
/// `U ∩ V = W` and `G ∩ (U + V) = G ∩ U + G ∩ V`.
pub fn kim_indep(u: &FpSubspace, v: &FpSubspace, w: &FpSubspace, g: &FpSubspace) -> Result<KimVerdict, FpError> {
    if !w.is_subspace_of(u)? || !w.is_subspace_of(v)? {
        return Err(FpError::Precondition("W must lie in both U and V".into()));
    }
    if let Some(vector) = missing(&u.intersect(v)?, w)? {
        return Ok(KimVerdict {
            holds: false,
            failure: Some(KimFailure::NotFree { vector }),
        });
    }
    let lhs = g.intersect(&u.sum(v)?)?;
    let rhs = g.intersect(u)?.sum(&g.intersect(v)?)?;
    Ok(match missing(&lhs, &rhs)? {
        Some(vector) => KimVerdict {
            holds: false,
            failure: Some(KimFailure::NotSplit { vector }),
        },
        None => KimVerdict {
            holds: true,
            failure: None,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KimCase {
    pub u: FpSubspace,
    pub v: FpSubspace,
    pub w: FpSubspace,
    pub verdict: KimVerdict,
}

impl KimCase {
    fn run(g: &FpSubspace, u: FpSubspace, v: FpSubspace, w: FpSubspace) -> Self {
        let verdict = kim_indep(&u, &v, &w, g).expect("instance meets preconditions");
        KimCase { u, v, w, verdict }
    }
}

/// The base-monotonicity failure: independence at base `0` and failure at
/// the larger base `W′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub p: u32,
    pub coordinates: Vec<String>,
    pub g: FpSubspace,
    pub base: KimCase,
    pub intermediate: KimCase,
}

impl InstanceReport {
    /// True when the base case holds and the intermediate one fails.
    pub fn shows_bmon_failure(&self) -> bool {
        self.base.verdict.holds && !self.intermediate.verdict.holds
    }

    pub fn witness(&self) -> Option<&FpVector> {
        self.intermediate.verdict.failure.as_ref().map(KimFailure::vector)
    }

    /// Reruns the Kim analogue on the stored subspaces.
    pub fn replay(&self) -> Result<(KimVerdict, KimVerdict), FpError> {
        Ok((
            kim_indep(&self.base.u, &self.base.v, &self.base.w, &self.g)?,
            kim_indep(
                &self.intermediate.u,
                &self.intermediate.v,
                &self.intermediate.w,
                &self.g,
            )?,
        ))
    }

    fn show_space(&self, s: &FpSubspace) -> String {
        let parts: Vec<String> = s.basis().iter().map(|b| self.show(&b.normalized_last())).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            format!("span{{{}}}", parts.join(", "))
        }
    }

    fn show(&self, v: &FpVector) -> String {
        let names: Vec<&str> = self.coordinates.iter().map(String::as_str).collect();
        v.render(&names)
    }

    fn show_case(&self, f: &mut fmt::Formatter<'_>, label: &str, c: &KimCase) -> fmt::Result {
        writeln!(
            f,
            "{label}: U={} V={} W={}",
            self.show_space(&c.u),
            self.show_space(&c.v),
            self.show_space(&c.w)
        )?;
        match &c.verdict.failure {
            None => writeln!(f, "  kim_indep holds"),
            Some(KimFailure::NotFree { vector }) => {
                writeln!(f, "  kim_indep fails: {} in U∩V but not in W", self.show(vector))
            }
            Some(KimFailure::NotSplit { vector }) => writeln!(
                f,
                "  kim_indep fails: witness {} in G∩(U+V) but not in G∩U + G∩V",
                self.show(vector)
            ),
        }
    }
}

impl fmt::Display for InstanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p={} coordinates=({})", self.p, self.coordinates.join(", "))?;
        writeln!(f, "G={}", self.show_space(&self.g))?;
        self.show_case(f, "base", &self.base)?;
        self.show_case(f, "intermediate", &self.intermediate)?;
        writeln!(
            f,
            "base monotonicity {}",
            if self.shows_bmon_failure() {
                "fails"
            } else {
                "not refuted"
            }
        )
    }
}

fn build(p: u32, [a, d1, d2, ad2]: [usize; 4]) -> Result<InstanceReport, FpError> {
    let k = MONOMIALS.len();
    let unit = |i| FpVector::unit(p, k, i);
    let span = |is: &[usize]| FpSubspace::coordinate(p, k, is);
    let g = FpSubspace::span(p, k, &[unit(ad2).add(&unit(d1).neg())])?;
    let base = KimCase::run(&g, span(&[a]), span(&[d1, d2]), FpSubspace::zero(p, k));
    let intermediate = KimCase::run(&g, span(&[a, d2, ad2]), span(&[d1, d2]), span(&[d2]));
    Ok(InstanceReport {
        p,
        coordinates: MONOMIALS.iter().map(|s| s.to_string()).collect(),
        g,
        base,
        intermediate,
    })
}

/// `U = span{a}`, `V = span{d1, d2}`, `G = span{ad2 − d1}`: independent over
/// `0`, but not over `W′ = span{d2}` once `U` grows to `span{a, d2, ad2}`.
pub fn acfg_bmon_failure_instance(p: u32) -> Result<InstanceReport, FpError> {
    super::space::check_prime(p)?;
    build(p, [A, D1, D2, AD2])
}

/// The same instance with the roles of `d1`, `d2` (and so `ad1`, `ad2`)
/// exchanged.
pub fn acfg_swapped_instance(p: u32) -> Result<InstanceReport, FpError> {
    super::space::check_prime(p)?;
    build(p, [A, D2, D1, AD1])
}

/// The degree-one element `x·u − v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericPair {
    pub u: FpVector,
    pub v: FpVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericVerdict {
    pub holds: bool,
    /// Coefficients with `Σ λ_n u_n = 0` and `Σ λ_n v_n ∉ G`.
    pub lambda: Option<Vec<u32>>,
    pub vector: Option<FpVector>,
}

impl GenericVerdict {
    /// Checks the witness by substitution.
    pub fn witness_valid(&self, g: &FpSubspace, pairs: &[GenericPair]) -> bool {
        let (Some(lambda), Some(vector)) = (&self.lambda, &self.vector) else {
            return false;
        };
        let (p, k) = (g.p(), g.k());
        let us: Vec<FpVector> = pairs.iter().map(|q| q.u.clone()).collect();
        let vs: Vec<FpVector> = pairs.iter().map(|q| q.v.clone()).collect();
        lambda.len() == pairs.len()
            && FpVector::combination(p, k, lambda, &us).is_zero()
            && &FpVector::combination(p, k, lambda, &vs) == vector
            && !g.contains(vector).unwrap_or(true)
    }
}

/// Whether `[G ⊕ ⊕ Span(x·u_n − v_n)] ∩ K = G`: every `λ` killing the
/// `x`-coefficient must send `Σ λ_n v_n` into `G`. The set of good `λ` is a
/// subspace, so checking a kernel basis suffices.
pub fn generic_intersection_check(g: &FpSubspace, pairs: &[GenericPair]) -> Result<GenericVerdict, FpError> {
    let (p, k) = (g.p(), g.k());
    for q in pairs {
        for x in [&q.u, &q.v] {
            if (x.p(), x.k()) != (p, k) {
                return Err(FpError::Mismatch {
                    p1: p,
                    k1: k,
                    p2: x.p(),
                    k2: x.k(),
                });
            }
        }
    }
    let rows: Vec<Vec<u32>> = pairs.iter().map(|q| q.u.coords().to_vec()).collect();
    let vs: Vec<FpVector> = pairs.iter().map(|q| q.v.clone()).collect();
    for lambda in left_kernel(p, k, &rows) {
        let vector = FpVector::combination(p, k, &lambda, &vs);
        if !g.contains(&vector)? {
            return Ok(GenericVerdict {
                holds: false,
                lambda: Some(lambda),
                vector: Some(vector),
            });
        }
    }
    Ok(GenericVerdict {
        holds: true,
        lambda: None,
        vector: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: u32, k: usize, i: usize) -> FpVector {
        FpVector::unit(p, k, i - 1)
    }

    #[test]
    fn kim_examples_p2() {
        let (p, k) = (2, 5);
        let s = |is: &[usize]| FpSubspace::span(p, k, &is.iter().map(|&i| e(p, k, i)).collect::<Vec<_>>()).unwrap();
        let g = FpSubspace::span(p, k, &[e(p, k, 5).add(&e(p, k, 2))]).unwrap();
        let zero = FpSubspace::zero(p, k);
        assert!(kim_indep(&s(&[1]), &s(&[2, 3]), &zero, &g).unwrap().holds);
        let v = kim_indep(&s(&[1, 3, 5]), &s(&[2, 3]), &s(&[3]), &g).unwrap();
        assert_eq!(
            v.failure,
            Some(KimFailure::NotSplit {
                vector: e(p, k, 5).add(&e(p, k, 2))
            })
        );
        let u = s(&[1, 4]);
        assert!(kim_indep(&u, &u, &u, &g).unwrap().holds);
        assert!(matches!(
            kim_indep(&s(&[1]), &s(&[2]), &s(&[3]), &g),
            Err(FpError::Precondition(_))
        ));
    }

    #[test]
    fn instance_shape() {
        for p in [2, 3, 5, 7, 251] {
            let r = acfg_bmon_failure_instance(p).unwrap();
            assert!(r.shows_bmon_failure(), "p={p}");
            let want = FpVector::new(p, [0, -1, 0, 0, 1]).unwrap();
            assert_eq!(r.witness(), Some(&want));
            let (b, i) = r.replay().unwrap();
            assert_eq!((b, i), (r.base.verdict.clone(), r.intermediate.verdict.clone()));
            let s = acfg_swapped_instance(p).unwrap();
            assert!(s.shows_bmon_failure());
            assert_eq!(s.witness(), Some(&FpVector::new(p, [0, 0, -1, 1, 0]).unwrap()));
        }
        assert!(acfg_bmon_failure_instance(4).is_err());
    }

    #[test]
    fn report_text() {
        let text = acfg_bmon_failure_instance(3).unwrap().to_string();
        assert!(text.contains("G=span{ad2 - d1}"), "{text}");
        assert!(text.contains("witness ad2 - d1"), "{text}");
        assert!(text.ends_with("base monotonicity fails\n"));
    }

    #[test]
    fn generic_cases() {
        let (p, k) = (2, 3);
        let g = FpSubspace::zero(p, k);
        let pairs = vec![
            GenericPair {
                u: e(p, k, 1),
                v: e(p, k, 2),
            },
            GenericPair {
                u: e(p, k, 1),
                v: e(p, k, 3),
            },
        ];
        let v = generic_intersection_check(&g, &pairs).unwrap();
        assert!(!v.holds);
        assert_eq!(v.lambda, Some(vec![1, 1]));
        assert_eq!(v.vector, Some(e(p, k, 2).add(&e(p, k, 3))));
        assert!(v.witness_valid(&g, &pairs));
        assert!(generic_intersection_check(&g, &[]).unwrap().holds);
        // a G containing the difference repairs it
        let g2 = FpSubspace::span(p, k, &[e(p, k, 2).add(&e(p, k, 3))]).unwrap();
        assert!(generic_intersection_check(&g2, &pairs).unwrap().holds);
    }
}
