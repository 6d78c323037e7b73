//! Row index sets, the cyclic shift action and t-blocks.
//!
//! All coordinates are 1-based: a row index is a k-tuple over `[r] = {1, ..., r}`
//! and shifting wraps residue 0 back to `r`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions `(n_1, ..., n_k)` of an order-k tensor space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TensorShape {
    dims: Vec<usize>,
}

impl TensorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 3 {
            return Err(Error::InvalidShape(format!(
                "order must be at least 3, got {}",
                dims.len()
            )));
        }
        if let Some(pos) = dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!(
                "dimension {} is zero",
                pos + 1
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Size of direction `t` (1-based).
    pub fn dim(&self, t: usize) -> usize {
        self.dims[t - 1]
    }

    pub fn min_dim(&self) -> usize {
        *self
            .dims
            .iter()
            .min()
            .expect("shape has at least three dims")
    }

    pub fn sum(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn product(&self) -> Option<u128> {
        self.dims
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
    }
}

impl TryFrom<Vec<usize>> for TensorShape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<TensorShape> for Vec<usize> {
    fn from(shape: TensorShape) -> Self {
        shape.dims
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A k-tuple over `[r]`. Ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RowIndex(pub Vec<usize>);

impl RowIndex {
    pub fn new(coords: Vec<usize>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Coordinate `t` (1-based direction).
    pub fn get(&self, t: usize) -> usize {
        self.0[t - 1]
    }

    /// The (k-1)-tuple left after deleting coordinate `t`.
    pub fn without(&self, t: usize) -> Vec<usize> {
        let mut reduced = self.0.clone();
        reduced.remove(t - 1);
        reduced
    }

    /// Copy of this tuple with coordinate `t` replaced by `value`.
    pub fn with(&self, t: usize, value: usize) -> RowIndex {
        let mut coords = self.0.clone();
        coords[t - 1] = value;
        RowIndex(coords)
    }
}

impl From<Vec<usize>> for RowIndex {
    fn from(coords: Vec<usize>) -> Self {
        Self(coords)
    }
}

impl fmt::Display for RowIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Membership in the admissible set: every coordinate lies in `[r]`, the
/// tuple has order at least 3 and no value occupies `k - 1` or more
/// coordinates. For `k = 3` this means pairwise distinct entries.
pub fn is_admissible(coords: &[usize], r: usize) -> bool {
    let k = coords.len();
    if k < 3 || coords.iter().any(|&c| c == 0 || c > r) {
        return false;
    }
    let mut counts = vec![0usize; r + 1];
    for &c in coords {
        counts[c] += 1;
        if counts[c] >= k - 1 {
            return false;
        }
    }
    true
}

/// All admissible k-tuples over `[r]` in lexicographic order.
pub fn enumerate_rows(r: usize, k: usize) -> Vec<RowIndex> {
    if r == 0 || k < 3 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = vec![1usize; k];
    loop {
        if is_admissible(&current, r) {
            out.push(RowIndex(current.clone()));
        }
        // odometer increment, last coordinate fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if current[pos] < r {
                current[pos] += 1;
                break;
            }
            current[pos] = 1;
        }
    }
}

/// `max(0, r^k - k r^2 + (k-1) r)`, the number of admissible tuples.
///
/// Saturates at `u128::MAX` for astronomically large inputs.
pub fn count_rows(r: usize, k: usize) -> u128 {
    let r = r as u128;
    let k = k as u128;
    let Some(power) = u32::try_from(k).ok().and_then(|e| r.checked_pow(e)) else {
        return u128::MAX;
    };
    let positive = power.saturating_add((k.saturating_sub(1)).saturating_mul(r));
    let negative = k.saturating_mul(r).saturating_mul(r);
    positive.saturating_sub(negative)
}

/// Simultaneous cyclic shift of every coordinate by `a` modulo `r`.
pub fn act(a: i64, p: &RowIndex, r: usize) -> RowIndex {
    let r_i = r as i64;
    let shift = a.rem_euclid(r_i);
    RowIndex(
        p.0.iter()
            .map(|&c| ((c as i64 - 1 + shift).rem_euclid(r_i) + 1) as usize)
            .collect(),
    )
}

/// An orbit of the cyclic action, identified by its lexicographically
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orbit {
    canonical: RowIndex,
    r: usize,
}

impl Orbit {
    pub fn canonical(&self) -> &RowIndex {
        &self.canonical
    }

    pub fn modulus(&self) -> usize {
        self.r
    }

    /// Members in shift order starting from the canonical representative.
    pub fn members(&self) -> Vec<RowIndex> {
        (0..self.r as i64)
            .map(|a| act(a, &self.canonical, self.r))
            .collect()
    }

    pub fn contains(&self, p: &RowIndex) -> bool {
        orbit_of(p, self.r).canonical == self.canonical
    }
}

impl fmt::Display for Orbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "orbit{}", self.canonical)
    }
}

pub fn orbit_of(p: &RowIndex, r: usize) -> Orbit {
    let canonical = (0..r as i64)
        .map(|a| act(a, p, r))
        .min()
        .unwrap_or_else(|| p.clone());
    Orbit { canonical, r }
}

/// All orbits of the admissible set, sorted by canonical representative.
pub fn enumerate_orbits(r: usize, k: usize) -> Vec<Orbit> {
    let mut orbits: Vec<Orbit> = enumerate_rows(r, k)
        .iter()
        .map(|p| orbit_of(p, r))
        .filter(|o| o.canonical.0.len() == k)
        .collect();
    orbits.sort();
    orbits.dedup();
    orbits
}

/// A set of orbits whose members differ from each other only in
/// coordinate `direction`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    direction: usize,
    orbits: Vec<Orbit>,
}

impl Block {
    pub fn direction(&self) -> usize {
        self.direction
    }

    /// Orbits sorted by canonical representative.
    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn size(&self) -> usize {
        self.orbits.len()
    }

    pub fn contains(&self, o: &Orbit) -> bool {
        self.orbits.binary_search(o).is_ok()
    }

    /// Every row of every orbit, sorted lexicographically.
    pub fn rows(&self) -> Vec<RowIndex> {
        let mut rows: Vec<RowIndex> = self.orbits.iter().flat_map(|o| o.members()).collect();
        rows.sort();
        rows
    }
}

/// The maximal `t`-block through `o` that avoids every crossed orbit.
///
/// Its orbits are those of the tuples obtained from `o`'s canonical member
/// by substituting each admissible value at coordinate `t`.
pub fn maximal_uncrossed_block(o: &Orbit, t: usize, crossed: &HashSet<Orbit>) -> Result<Block> {
    let base = &o.canonical;
    let k = base.order();
    if t == 0 || t > k {
        return Err(Error::Structural(format!("direction {t} outside 1..={k}")));
    }
    if crossed.contains(o) {
        return Err(Error::OrbitCrossed(base.0.clone()));
    }
    let mut orbits: Vec<Orbit> = (1..=o.r)
        .map(|v| base.with(t, v))
        .filter(|p| is_admissible(&p.0, o.r))
        .map(|p| orbit_of(&p, o.r))
        .filter(|orb| !crossed.contains(orb))
        .collect();
    orbits.sort();
    orbits.dedup();
    Ok(Block {
        direction: t,
        orbits,
    })
}

/// Number of orbits shared by two blocks of different directions.
pub fn block_intersection_count(b1: &Block, b2: &Block) -> Result<usize> {
    if b1.direction == b2.direction {
        return Err(Error::SameDirection(b1.direction));
    }
    Ok(b1.orbits.iter().filter(|o| b2.contains(o)).count())
}
