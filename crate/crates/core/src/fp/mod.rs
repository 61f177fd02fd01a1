//! Exact linear algebra over F_p for the ACFG counterexample mechanism.

mod acfg;
mod classify;
mod space;

pub use acfg::{
    acfg_bmon_failure_instance, acfg_swapped_instance, generic_intersection_check, kim_indep, GenericPair,
    GenericVerdict, InstanceReport, KimCase, KimFailure, KimVerdict, MONOMIALS,
};
pub use classify::{
    classify_sequence, indiscernibility_violation, Configuration, DEFAULT_ARITY, MAX_ARITY, MAX_SEQUENCE,
};
pub use space::{apply_matrix, check_prime, is_direct_sum, is_prime, FpError, FpSubspace, FpVector, MAX_PRIME};
