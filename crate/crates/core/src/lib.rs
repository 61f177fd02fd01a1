//! Executable calculus of independence-relation operators over finite
//! closure sites, with exhaustive axiom checking, a registry of
//! preservation claims and a search harness for them, and exact F_p
//! linear algebra for the subgroup-generic counterexample kernel.

pub mod axioms;
pub mod claims;
pub mod curate;
pub mod diagram;
pub mod fp;
pub mod operators;
pub mod relation;
pub mod search;
pub mod site;
pub mod subset;
pub mod verdict;

pub use axioms::{axiom_profile, check_axiom, satisfies, AxiomId, AxiomProfile, Side};
pub use claims::{registry, verify_claim, verify_claims, Claim, ClaimStatus, ClaimVerdict};
pub use operators::{apply_expr, closure_extension, monotonise, monotonise_naive, star, Op, OperatorExpr};
pub use relation::{equals, implies, is_invariant, random_invariant_relation, TernaryRelation, Triple};
pub use site::{ClosureOperator, Permutation, RawSite, Site, SymmetryGroup, ValidationReport};
pub use subset::Subset;
pub use verdict::{Verdict, Witness};
