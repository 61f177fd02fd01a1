//! Preservation laws as machine-checkable claims.
//!
//! A claim has claim-level hypotheses and a list of clauses. Each clause adds
//! its own hypotheses on the input relation `R` and lists conclusions about
//! operator expressions over `R`. A clause whose hypotheses fail is skipped;
//! a claim is skipped on an instance when every clause is.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::axioms::{check_axiom, satisfies, AxiomId, Side};
use crate::curate::horn_interior;
use crate::operators::{apply_expr, Op, OperatorExpr, DEFAULT_DEPTH_CAP};
use crate::relation::{builtin_a_indep, builtin_empty, equals, implies, is_invariant, TernaryRelation};
use crate::site::Site;
use crate::verdict::Verdict;

use AxiomId::*;
use Side::{Left, Right};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Hypothesis {
    Axiom(AxiomId),
    Invariant,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Axiom(ax) => write!(f, "{ax}"),
            Hypothesis::Invariant => f.write_str("invariant"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SiteRequirement {
    /// The closure operator has the exchange property.
    Exchange,
}

/// Which relation the claim's `R` denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Subject {
    /// The relation under test.
    Input,
    /// The site's built-in `a-indep`, whatever relation is supplied.
    AIndep,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conclusion {
    Satisfies(OperatorExpr, AxiomId),
    Invariant(OperatorExpr),
    Implies(OperatorExpr, OperatorExpr),
    Equals(OperatorExpr, OperatorExpr),
    /// For every candidate `R0 → R` with right NOR, MON and BMON:
    /// `R0 → m(R)`. Candidates come from [`weakening_candidates`].
    Weakening,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::Satisfies(e, ax) => write!(f, "{e} satisfies {ax}"),
            Conclusion::Invariant(e) => write!(f, "{e} is invariant"),
            Conclusion::Implies(x, y) => write!(f, "{x} → {y}"),
            Conclusion::Equals(x, y) => write!(f, "{x} = {y}"),
            Conclusion::Weakening => f.write_str("R0 → R with right NOR, MON, BMON gives R0 → m(R)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub hypotheses: Vec<Hypothesis>,
    pub conclusions: Vec<Conclusion>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub id: &'static str,
    pub name: &'static str,
    pub statement: &'static str,
    /// Proof lives outside this note; refutations are findings, not bugs.
    pub external_proof: bool,
    pub subject: Subject,
    pub site_requirements: Vec<SiteRequirement>,
    pub hypotheses: Vec<Hypothesis>,
    pub clauses: Vec<Clause>,
}

impl Claim {
    /// Looks up by id (`C6`) or name (`Mstar-eq-mstar`).
    pub fn find(key: &str) -> Option<Claim> {
        registry()
            .into_iter()
            .find(|c| c.id.eq_ignore_ascii_case(key) || c.name == key)
    }
}

fn e(text: &str) -> OperatorExpr {
    text.parse().expect("registry expression")
}

fn ax(list: &[AxiomId]) -> Vec<Hypothesis> {
    list.iter().map(|&a| Hypothesis::Axiom(a)).collect()
}

fn clause(hypotheses: Vec<Hypothesis>, conclusions: Vec<Conclusion>) -> Clause {
    Clause {
        hypotheses,
        conclusions,
    }
}

fn sat(expr: &str, axioms: &[AxiomId]) -> Vec<Conclusion> {
    axioms.iter().map(|&a| Conclusion::Satisfies(e(expr), a)).collect()
}

/// The built-in claims, ids `C1` through `C11`.
pub fn registry() -> Vec<Claim> {
    use Conclusion::*;
    let inv = Hypothesis::Invariant;
    let base = |id, name, statement| Claim {
        id,
        name,
        statement,
        external_proof: false,
        subject: Subject::Input,
        site_requirements: vec![],
        hypotheses: vec![],
        clauses: vec![],
    };
    vec![
        Claim {
            clauses: vec![clause(vec![], sat("m(R)", &[Bmon]))],
            ..base("C1", "m-bmon", "m(R) satisfies right BMON")
        },
        Claim {
            clauses: vec![
                clause(ax(&[Mon(Left)]), sat("m(R)", &[Mon(Left)])),
                clause(ax(&[Mon(Right)]), sat("m(R)", &[Mon(Right)])),
                clause(ax(&[Nor(Left), Mon(Left)]), sat("m(R)", &[Nor(Left)])),
                clause(ax(&[Nor(Right)]), sat("m(R)", &[Nor(Right)])),
                clause(ax(&[Tra(Left), Nor(Left), Mon(Left)]), sat("m(R)", &[Tra(Left)])),
            ],
            ..base(
                "C2",
                "m-preserve",
                "m preserves left/right MON, left NOR, right NOR, left TRA",
            )
        },
        Claim {
            clauses: vec![clause(vec![], vec![Weakening])],
            ..base("C3", "m-weakening", "R0 → R and R0 right NOR, MON, BMON give R0 → m(R)")
        },
        Claim {
            external_proof: true,
            hypotheses: vec![inv, Hypothesis::Axiom(Mon(Left)), Hypothesis::Axiom(Mon(Right))],
            clauses: vec![
                clause(vec![], {
                    let mut c = vec![Invariant(e("star(R)"))];
                    c.extend(sat("star(R)", &[Mon(Left), Mon(Right), Nor(Right), Ext, CloBc(Right)]));
                    c
                }),
                clause(ax(&[Bmon]), sat("star(R)", &[Bmon])),
                clause(ax(&[Tra(Left)]), sat("star(R)", &[Tra(Left)])),
                clause(ax(&[Nor(Left)]), sat("star(R)", &[Nor(Left)])),
                clause(ax(&[Aref]), sat("star(R)", &[Aref])),
            ],
            ..base(
                "C4",
                "star-preserve",
                "star(R) of an invariant left+right MON relation gains and keeps axioms",
            )
        },
        Claim {
            external_proof: true,
            hypotheses: vec![inv, Hypothesis::Axiom(Mon(Left)), Hypothesis::Axiom(Mon(Right))],
            clauses: vec![clause(vec![], {
                let mut c = sat("star(m(R))", &[Nor(Right), CloBc(Right), Bmon, Ext]);
                c.push(Implies(e("star(m(R))"), e("m(R)")));
                c.push(Implies(e("m(R)"), e("R")));
                c
            })],
            ..base(
                "C5",
                "mstar-chain",
                "star(m(R)) has right NOR, CLO, BMON, EXT and star(m(R)) → m(R) → R",
            )
        },
        Claim {
            external_proof: true,
            hypotheses: vec![
                inv,
                Hypothesis::Axiom(Nor(Left)),
                Hypothesis::Axiom(Nor(Right)),
                Hypothesis::Axiom(Mon(Left)),
                Hypothesis::Axiom(Mon(Right)),
            ],
            clauses: vec![clause(vec![], vec![Equals(e("star(M(R))"), e("star(m(R))"))])],
            ..base(
                "C6",
                "Mstar-eq-mstar",
                "left+right NOR and MON give star(M(R)) = star(m(R))",
            )
        },
        Claim {
            clauses: vec![
                clause(vec![], sat("c(R)", &[CloBc(Right), Nor(Right)])),
                clause(ax(&[Mon(Right)]), vec![Implies(e("c(R)"), e("R"))]),
                clause(ax(&[Mon(Left)]), sat("c(R)", &[Mon(Left)])),
                clause(ax(&[Mon(Right)]), sat("c(R)", &[Mon(Right)])),
                clause(ax(&[Nor(Left)]), sat("c(R)", &[Nor(Left)])),
                clause(ax(&[Bmon]), sat("c(R)", &[Bmon])),
            ],
            ..base(
                "C7",
                "c-basic",
                "c(R) has right CLO and NOR; c → R and preservation under MON, NOR, BMON",
            )
        },
        Claim {
            clauses: vec![
                clause(ax(&[Nor(Right), Mon(Right)]), vec![Implies(e("c(m(R))"), e("M(R)"))]),
                clause(
                    ax(&[Nor(Right), Mon(Right), CloBc(Right)]),
                    vec![Equals(e("c(m(R))"), e("M(R)"))],
                ),
            ],
            ..base(
                "C8",
                "mc-vs-M",
                "right NOR, MON give c(m(R)) → M(R); with right CLO they are equal",
            )
        },
        Claim {
            clauses: vec![clause(vec![], vec![Implies(e("M(R)"), e("m(R)"))])],
            ..base("C9", "M-to-m", "M(R) → m(R)")
        },
        Claim {
            subject: Subject::AIndep,
            site_requirements: vec![SiteRequirement::Exchange],
            clauses: vec![clause(vec![], vec![Equals(e("M(R)"), e("m(R)"))])],
            ..base(
                "C10",
                "pregeom-aM-eq-am",
                "exchange closure gives M(a-indep) = m(a-indep)",
            )
        },
        Claim {
            hypotheses: vec![inv, Hypothesis::Axiom(Mon(Right))],
            clauses: vec![clause(vec![], vec![Implies(e("star(R)"), e("R"))])],
            ..base("C11", "star-weaker", "star(R) → R")
        },
    ]
}

/// Candidate `R0` relations for the weakening law, derived from `r`: its
/// largest sub-relation with right NOR, MON, BMON, then `r` and a few
/// operator images, then the empty relation. Candidates failing the
/// hypotheses are skipped at check time.
pub fn weakening_candidates(r: &TernaryRelation) -> Vec<TernaryRelation> {
    let mut out = Vec::new();
    if let Ok(i) = horn_interior(r, &[Nor(Right), Mon(Right), Bmon]) {
        out.push(i);
    }
    out.push(r.clone());
    for ops in [
        &[Op::NaiveMonotonise][..],
        &[Op::Monotonise],
        &[Op::Star],
        &[Op::Star, Op::NaiveMonotonise],
        &[Op::ClosureExtension, Op::NaiveMonotonise],
    ] {
        out.push(apply_expr(&OperatorExpr::chain(ops), r, DEFAULT_DEPTH_CAP).expect("shallow"));
    }
    out.push(builtin_empty(r.site()));
    out
}

/// Details of a failed conclusion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub clause: usize,
    pub conclusion: String,
    /// Names of every relation the failing check compared.
    pub relations: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ClaimStatus {
    Confirmed,
    Refuted(Box<Refutation>),
    Skipped {
        /// Clauses (or the whole claim, counted once) whose hypotheses failed.
        unmet: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimVerdict {
    pub claim: String,
    pub relation: String,
    /// Conclusions evaluated.
    pub instances_checked: usize,
    /// Clauses skipped for unmet hypotheses.
    pub clauses_skipped: usize,
    pub status: ClaimStatus,
}

impl ClaimVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self.status, ClaimStatus::Refuted(_))
    }

    pub fn is_confirmed(&self) -> bool {
        matches!(self.status, ClaimStatus::Confirmed)
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self.status, ClaimStatus::Skipped { .. })
    }
}

impl fmt::Display for ClaimVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}: ", self.claim, self.relation)?;
        match &self.status {
            ClaimStatus::Confirmed => write!(
                f,
                "confirmed ({} checks, {} clauses skipped)",
                self.instances_checked, self.clauses_skipped
            ),
            ClaimStatus::Skipped { unmet } => write!(f, "skipped ({unmet} unmet)"),
            ClaimStatus::Refuted(r) => write!(
                f,
                "REFUTED clause {}: {} [{}] {}",
                r.clause,
                r.conclusion,
                r.relations.join(", "),
                r.verdict
            ),
        }
    }
}

/// Operator images of one base relation, computed once each.
struct Images {
    base: TernaryRelation,
    cache: HashMap<OperatorExpr, TernaryRelation>,
    hypotheses: HashMap<Hypothesis, bool>,
}

impl Images {
    fn new(base: TernaryRelation) -> Self {
        Images {
            base,
            cache: HashMap::new(),
            hypotheses: HashMap::new(),
        }
    }

    /// Whether the base relation meets `h`.
    fn hypothesis(&mut self, h: Hypothesis) -> bool {
        if let Some(&v) = self.hypotheses.get(&h) {
            return v;
        }
        let v = hypothesis_holds(&self.base, h);
        self.hypotheses.insert(h, v);
        v
    }

    fn get(&mut self, expr: &OperatorExpr) -> TernaryRelation {
        if let Some(r) = self.cache.get(expr) {
            return r.clone();
        }
        let r = match expr {
            OperatorExpr::Base => self.base.clone(),
            OperatorExpr::Apply(op, inner) => {
                let inner = self.get(inner);
                op.apply(&inner)
            }
        };
        self.cache.insert(expr.clone(), r.clone());
        r
    }
}

fn hypothesis_holds(r: &TernaryRelation, h: Hypothesis) -> bool {
    match h {
        Hypothesis::Axiom(ax) => satisfies(r, ax),
        Hypothesis::Invariant => is_invariant(r).holds,
    }
}

fn site_requirement_holds(site: &Site, req: SiteRequirement) -> bool {
    match req {
        SiteRequirement::Exchange => site.cl().has_exchange(),
    }
}

/// Checks `claim` on one relation (ignored when the claim's subject is
/// the site's `a-indep`).
pub fn verify_claim(claim: &Claim, r: &TernaryRelation) -> ClaimVerdict {
    verify_claims(std::slice::from_ref(claim), r).pop().expect("one claim")
}

/// Checks several claims on one relation, computing each operator image of
/// `r` at most once.
pub fn verify_claims(claims: &[Claim], r: &TernaryRelation) -> Vec<ClaimVerdict> {
    let mut input = Images::new(r.clone());
    let mut a_indep: Option<Images> = None;
    claims
        .iter()
        .map(|claim| match claim.subject {
            Subject::Input => verify_on(claim, &mut input),
            Subject::AIndep => {
                let images = a_indep.get_or_insert_with(|| Images::new(builtin_a_indep(r.site())));
                verify_on(claim, images)
            }
        })
        .collect()
}

fn verify_on(claim: &Claim, images: &mut Images) -> ClaimVerdict {
    let subject = images.get(&OperatorExpr::Base);
    let site = subject.site();
    let mut out = ClaimVerdict {
        claim: claim.id.to_string(),
        relation: subject.name().to_string(),
        instances_checked: 0,
        clauses_skipped: 0,
        status: ClaimStatus::Confirmed,
    };
    if !claim.site_requirements.iter().all(|&q| site_requirement_holds(site, q))
        || !claim.hypotheses.iter().all(|&h| images.hypothesis(h))
    {
        out.clauses_skipped = claim.clauses.len();
        out.status = ClaimStatus::Skipped { unmet: 1 };
        return out;
    }
    for (ci, cl) in claim.clauses.iter().enumerate() {
        if !cl.hypotheses.iter().all(|&h| images.hypothesis(h)) {
            out.clauses_skipped += 1;
            continue;
        }
        for conclusion in &cl.conclusions {
            let (verdict, relations) = match conclusion {
                Conclusion::Weakening => {
                    let (v, names, checked) = check_weakening(&subject, images);
                    out.instances_checked += checked;
                    (v, names)
                }
                other => {
                    out.instances_checked += 1;
                    evaluate(other, images)
                }
            };
            if !verdict.holds {
                out.status = ClaimStatus::Refuted(Box::new(Refutation {
                    clause: ci,
                    conclusion: conclusion.to_string(),
                    relations,
                    verdict,
                }));
                return out;
            }
        }
    }
    if out.clauses_skipped == claim.clauses.len() {
        out.status = ClaimStatus::Skipped {
            unmet: out.clauses_skipped,
        };
    }
    out
}

fn evaluate(conclusion: &Conclusion, images: &mut Images) -> (Verdict, Vec<String>) {
    match conclusion {
        Conclusion::Satisfies(expr, ax) => {
            let r = images.get(expr);
            (check_axiom(&r, *ax), vec![r.name().to_string()])
        }
        Conclusion::Invariant(expr) => {
            let r = images.get(expr);
            (is_invariant(&r), vec![r.name().to_string()])
        }
        Conclusion::Implies(x, y) | Conclusion::Equals(x, y) => {
            let (rx, ry) = (images.get(x), images.get(y));
            let v = if matches!(conclusion, Conclusion::Implies(..)) {
                implies(&rx, &ry)
            } else {
                equals(&rx, &ry)
            }
            .expect("same site");
            (v, vec![rx.name().to_string(), ry.name().to_string()])
        }
        Conclusion::Weakening => unreachable!("handled by check_weakening"),
    }
}

/// Returns the first failing candidate, or a pass, plus the number of
/// candidates that met the hypotheses.
fn check_weakening(r: &TernaryRelation, images: &mut Images) -> (Verdict, Vec<String>, usize) {
    let m = images.get(&OperatorExpr::chain(&[Op::NaiveMonotonise]));
    let mut checked = 0;
    for r0 in weakening_candidates(r) {
        let eligible = implies(&r0, r).expect("same site").holds
            && [Nor(Right), Mon(Right), Bmon].iter().all(|&ax| satisfies(&r0, ax));
        if !eligible {
            continue;
        }
        checked += 1;
        let v = implies(&r0, &m).expect("same site");
        if !v.holds {
            return (v, vec![r0.name().to_string(), m.name().to_string()], checked);
        }
    }
    (Verdict::pass(), vec![], checked)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::relation::{builtin_from_predicate, builtin_full, random_invariant_relation};
    use crate::subset::Subset;

    fn s(elems: &[usize]) -> Subset {
        Subset::from_elems(elems.iter().copied())
    }

    fn s1() -> Arc<Site> {
        Arc::new(Site::new(3, &[s(&[]), s(&[0, 1]), s(&[2]), s(&[0, 1, 2])], vec![]).unwrap())
    }

    #[test]
    fn registry_ids() {
        let ids: Vec<_> = registry().iter().map(|c| c.id).collect();
        assert_eq!(
            ids,
            ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11"]
        );
        let names: Vec<_> = registry().iter().map(|c| c.name).collect();
        assert_eq!(
            names,
            [
                "m-bmon",
                "m-preserve",
                "m-weakening",
                "star-preserve",
                "mstar-chain",
                "Mstar-eq-mstar",
                "c-basic",
                "mc-vs-M",
                "M-to-m",
                "pregeom-aM-eq-am",
                "star-weaker"
            ]
        );
        assert_eq!(Claim::find("c9").unwrap().name, "M-to-m");
        assert_eq!(Claim::find("mc-vs-M").unwrap().id, "C8");
        assert!(Claim::find("C12").is_none());
    }

    #[test]
    fn worked_examples() {
        let site = s1();
        let a = builtin_a_indep(&site);
        assert!(verify_claim(&Claim::find("C9").unwrap(), &a).is_confirmed());

        let s0 = Arc::new(Site::discrete(3));
        let even = builtin_from_predicate(&s0, "|C| even", |_, c, _| c.len() % 2 == 0);
        assert!(verify_claim(&Claim::find("C1").unwrap(), &even).is_confirmed());

        let full = builtin_full(&s0);
        assert!(verify_claim(&Claim::find("C6").unwrap(), &full).is_confirmed());
        assert!(verify_claim(&Claim::find("C3").unwrap(), &full).is_confirmed());

        // a-indep on S1 meets right NOR, MON and CLO_BC, so C8's equality clause runs
        for h in [Nor(Right), Mon(Right), CloBc(Right)] {
            assert!(satisfies(&a, h), "{h}");
        }
        let v = verify_claim(&Claim::find("C8").unwrap(), &a);
        assert!(v.is_confirmed(), "{v}");
        assert_eq!(v.clauses_skipped, 0);
    }

    #[test]
    fn hypotheses_gate_clauses() {
        let s0 = Arc::new(Site::discrete(3));
        let even = builtin_from_predicate(&s0, "|C| even", |_, c, _| c.len() % 2 == 0);
        // |C| even fails right BMON, so C7's BMON clause is skipped
        let v = verify_claim(&Claim::find("C7").unwrap(), &even);
        assert!(v.is_confirmed());
        assert!(v.clauses_skipped >= 1);
        // C10 skipped on a closure without exchange
        let no_exchange = Arc::new(Site::new(2, &[s(&[]), s(&[0]), s(&[0, 1])], vec![]).unwrap());
        assert!(verify_claim(&Claim::find("C10").unwrap(), &builtin_full(&no_exchange)).is_skipped());
    }

    #[test]
    fn literal_left_nor_preservation_fails() {
        // Left NOR alone is not kept by m: R(A,E,B) iff E ⊆ A or A = ∅.
        let s0 = Arc::new(Site::discrete(2));
        let r = builtin_from_predicate(&s0, "E⊆A or A=∅", |a, e, _| e.is_subset_of(a) || a.is_empty());
        assert!(satisfies(&r, Nor(Left)));
        assert!(!satisfies(&r, Mon(Left)));
        assert!(!satisfies(&crate::operators::monotonise_naive(&r), Nor(Left)));
        // so the registry pairs it with left MON, and the clause is skipped here
        let v = verify_claim(&Claim::find("C2").unwrap(), &r);
        assert!(!v.is_refuted(), "{v}");
    }

    #[test]
    fn skips_grow_with_hypotheses() {
        let site = s1();
        let sample: Vec<_> = (0..30)
            .map(|seed| random_invariant_relation(&site, seed, 0.8).unwrap())
            .collect();
        for claim in registry() {
            let skipped = |c: &Claim| sample.iter().filter(|r| verify_claim(c, r).is_skipped()).count();
            let mut stronger = claim.clone();
            stronger.hypotheses.push(Hypothesis::Axiom(Sym));
            assert!(skipped(&stronger) >= skipped(&claim), "{}", claim.id);
        }
    }
}
