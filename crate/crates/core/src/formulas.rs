//! Closed forms: the generic subrank, the dimension of the locus of
//! tensors with subrank at least `r`, and regime classification.
//!
//! Floor roots are computed in exact integer arithmetic. Floating point
//! gets `floor(sqrt(m^2))` wrong often enough near perfect powers to matter.

use serde::Serialize;

use crate::combinatorics::{count_rows, TensorShape};
use crate::error::{Error, Result};

/// Largest `y` with `y^e <= x`.
pub fn integer_root(x: u128, e: u32) -> u128 {
    assert!(e >= 1, "root exponent must be positive");
    if e == 1 || x < 2 {
        return x;
    }
    let fits = |y: u128| y.checked_pow(e).is_some_and(|v| v <= x);
    // y^e <= x < 2^128 implies y < 2^(128/e + 1)
    let mut lo = 1u128;
    let mut hi = (1u128 << (128 / e + 1).min(127)).min(x) + 1;
    // invariant: fits(lo), !fits(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BindingConstraint {
    /// `min n_i` is the smaller bound.
    DimensionBound,
    /// The floor root is strictly smaller than every dimension.
    RootBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubrankResult {
    pub q: usize,
    pub binding: BindingConstraint,
    /// `sum n_i - (k - 1)`, whose floor `(k-1)`-th root bounds `q`.
    pub root_argument: usize,
}

/// `Q = min(min n_i, floor((sum n_i - (k-1))^(1/(k-1))))`.
pub fn generic_subrank(shape: &TensorShape) -> SubrankResult {
    let k = shape.order();
    let root_argument = shape.sum() - (k - 1);
    let root = integer_root(root_argument as u128, (k - 1) as u32) as usize;
    let min_dim = shape.min_dim();
    let (q, binding) = if min_dim <= root {
        (min_dim, BindingConstraint::DimensionBound)
    } else {
        (root, BindingConstraint::RootBound)
    };
    SubrankResult {
        q,
        binding,
        root_argument,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionRegime {
    /// `r <= Q`: the locus is dense.
    Full,
    /// `Q < r <= min n_i`.
    Formula,
    /// `r > min n_i`: no tensor of this shape has subrank `r`.
    EmptyOrInvalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DimensionResult {
    pub dim: u128,
    pub regime: DimensionRegime,
}

/// Dimension of `{T : Q(T) >= r}` in `K^{n_1 x ... x n_k}`.
///
/// Full regime gives `prod n_i`; the formula regime gives
/// `prod n_i - r (r^(k-1) - sum n_i + (k-1))`; beyond `min n_i` the
/// dimension is reported as 0 with the empty-or-invalid tag.
pub fn dim_c_r(shape: &TensorShape, r: usize) -> Result<DimensionResult> {
    let product = shape
        .product()
        .ok_or(Error::Overflow("product of dimensions"))?;
    if r > shape.min_dim() {
        return Ok(DimensionResult {
            dim: 0,
            regime: DimensionRegime::EmptyOrInvalid,
        });
    }
    if r <= generic_subrank(shape).q {
        return Ok(DimensionResult {
            dim: product,
            regime: DimensionRegime::Full,
        });
    }
    let k = shape.order() as u32;
    let r128 = r as i128;
    let power = r128.checked_pow(k - 1).ok_or(Error::Overflow("r^(k-1)"))?;
    let deficit = power - shape.sum() as i128 + (k as i128 - 1);
    let dim = i128::try_from(product)
        .ok()
        .and_then(|p| p.checked_sub(r128.checked_mul(deficit)?))
        .ok_or(Error::Overflow("dimension formula"))?;
    Ok(DimensionResult {
        dim: u128::try_from(dim).map_err(|_| Error::Overflow("negative dimension"))?,
        regime: DimensionRegime::Formula,
    })
}

/// Where `(shape, r)` sits relative to the pattern-matrix argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeReport {
    pub r: usize,
    pub rows: u128,
    /// `r * sum max(n_i - r, 0)`.
    pub cols: u128,
    pub within_dims: bool,
    /// `r <= min n_i` and the pattern has at least as many columns as rows.
    pub certificate_regime: bool,
    /// Some `n_i - r > r^2`: `Q >= r` holds without the matrix argument.
    pub footnote_shortcut: bool,
}

pub fn classify(shape: &TensorShape, r: usize) -> RegimeReport {
    let rows = count_rows(r, shape.order());
    let cols = (r as u128)
        * shape
            .dims()
            .iter()
            .map(|&n| n.saturating_sub(r) as u128)
            .sum::<u128>();
    let within_dims = r <= shape.min_dim();
    let r_sq = (r as u128) * (r as u128);
    RegimeReport {
        r,
        rows,
        cols,
        within_dims,
        certificate_regime: within_dims && cols >= rows,
        footnote_shortcut: within_dims && shape.dims().iter().any(|&n| (n - r) as u128 > r_sq),
    }
}
