//! Pattern matrices, crossing-out certificates and modular rank checks for
//! the generic subrank of k-tensors.
//!
//! The pipeline for a shape `n_1 x ... x n_k` and a target `r`:
//! [`build_pattern`] lays out the sparse pattern matrix, [`find_certificate`]
//! crosses it out block by block to exhibit a unique row monomial,
//! [`validate`] replays that certificate independently, and
//! [`verify_generic_rank`] checks full row rank at random points modulo a
//! prime. [`generic_subrank`] and [`dim_c_r`] give the closed forms the
//! computations confirm.

pub mod certificate;
pub mod combinatorics;
pub mod error;
pub mod export;
pub mod formulas;
pub mod pattern;
pub mod rank;

pub use certificate::{
    cross_block, find_certificate, scripted_certificate, validate, Certificate, CrossState,
    MonomialFactor, ScriptStep, Step, Verdict,
};
pub use combinatorics::{
    act, block_intersection_count, count_rows, enumerate_orbits, enumerate_rows, is_admissible,
    maximal_uncrossed_block, orbit_of, Block, Orbit, RowIndex, TensorShape,
};
pub use error::{Error, Result};
pub use export::{export_pattern, parse_coordinate_list, parse_pattern_json, PatternFormat};
pub use formulas::{
    classify, dim_c_r, generic_subrank, integer_root, BindingConstraint, DimensionRegime,
    DimensionResult, RegimeReport, SubrankResult,
};
pub use pattern::{build_pattern, ColIndex, PatternMatrix, VariableId};
pub use rank::{
    instantiate, rank_mod_p, subspace_dimension_oracle, verify_generic_rank, PrimeField,
    RandomAssignment, RankReport, MERSENNE_61,
};
