//! Additive bases built from g-adic digit supports.
//!
//! For a set of digit positions `W`, `A_g(W)` is the set of positive integers
//! whose canonical base-`g` expansion only uses positions in `W`. Given a
//! partition `N = W_0 ∪ … ∪ W_{h-1}` of the positions, the union of the
//! `A_g(W_i)` is an asymptotic basis of order `h`. This crate provides:
//!
//! - [`gadic`]: canonical expansions, membership in `A_g(W)`, enumeration and
//!   counting.
//! - [`partition`]: eventually periodic partitions of the naturals, including
//!   the two sparse-cell constructions for which the basis is not minimal.
//! - [`sumset`]: bounded bitset oracles for `hA`, `r_h(A, n)` and the
//!   removability sets `E_a = hA \ h(A \ {a})`.
//! - [`decompose`]: certified decompositions of large `n` into `h` parts, with
//!   a full case trace and an independent certificate checker.
//! - [`checks`]: the verification drivers used by the CLI and the acceptance
//!   suite.

pub mod checks;
pub mod decompose;
pub mod gadic;
pub mod partition;
pub mod sumset;

mod decimal;

pub use decompose::{
    classify_case, decompose_thm1, decompose_thm2, sample_for_case, split_groups,
    verify_certificate, DecomposeError, DecompositionCertificate, DecompositionTrace, Thm1Case,
    Thm1Decomposer, Thm2Decomposer, TraceStep, Verdict, Violation,
};
pub use gadic::{GadicError, GadicExpansion, Term};
pub use partition::{
    HypothesisReport, PartitionError, PartitionSpec, Regime, Thm1Params, Thm2Params,
};
pub use sumset::{BoundedBitset, MinimalityReport, SumsetError, SumsetReport};

pub use num_bigint::BigUint;
