//! Modular instantiation and rank checks.

pub mod assignment;
pub mod field;
pub mod matrix;
pub mod oracle;

pub use assignment::RandomAssignment;
pub use field::{is_prime, PrimeField, MERSENNE_61};
pub use matrix::{determinant_mod_p, rank_mod_p, rank_mod_p_incremental, ModularMatrix};
pub use oracle::{
    brute_force_uniqueness, certificate_columns, expand_monomial, instantiate,
    minor_determinant_check, minor_determinant_check_with, subspace_dimension_oracle,
    symbolic_minor, unique_in_determinant, verify_generic_rank, MonomialExpansion, RankReport,
    SpanningSet, TrialRank, MAX_BRUTE_FORCE_SIZE,
};
