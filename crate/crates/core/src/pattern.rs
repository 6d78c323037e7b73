//! The sparse symbolic pattern matrix.
//!
//! Rows are the admissible tuples `(j_1, ..., j_k)`, columns are triples
//! `(t, m, s)` with `t` a direction, `m` in `[r]` and `s` in `[n_t - r]`.
//! The entry at row `j`, column `(t, m, s)` is the variable `a^{t,s}` indexed
//! by `j` with coordinate `t` deleted when `m = j_t`, and zero otherwise.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{enumerate_rows, RowIndex, TensorShape};
use crate::error::{Error, Result};

/// The symbol `a^{t,s}_{c_1,...,c_(k-1)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableId {
    pub direction: usize,
    pub slot: usize,
    pub reduced: Vec<usize>,
}

impl VariableId {
    pub fn new(direction: usize, slot: usize, reduced: Vec<usize>) -> Self {
        Self {
            direction,
            slot,
            reduced,
        }
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub: Vec<String> = self.reduced.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "a^{{{},{}}}_{{{}}}",
            self.direction,
            self.slot,
            sub.join(",")
        )
    }
}

impl FromStr for VariableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed variable name {s:?}"));
        let rest = s.strip_prefix("a^{").ok_or_else(bad)?;
        let (sup, rest) = rest.split_once("}_{").ok_or_else(bad)?;
        let sub = rest.strip_suffix('}').ok_or_else(bad)?;
        let (t, slot) = sup.split_once(',').ok_or_else(bad)?;
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        let reduced = sub.split(',').map(num).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(num(t)?, num(slot)?, reduced))
    }
}

impl Serialize for VariableId {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VariableId {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Column label `(t, m, s)`; ordering is lexicographic in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColIndex {
    pub direction: usize,
    pub value: usize,
    pub slot: usize,
}

impl ColIndex {
    pub fn new(direction: usize, value: usize, slot: usize) -> Self {
        Self {
            direction,
            value,
            slot,
        }
    }
}

impl fmt::Display for ColIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.direction, self.value, self.slot)
    }
}

impl Serialize for ColIndex {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        [self.direction, self.value, self.slot].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ColIndex {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let [t, m, s] = <[usize; 3]>::deserialize(deserializer)?;
        Ok(Self::new(t, m, s))
    }
}

/// Number of column slots `n_t - r` in each direction, or an error when
/// `r` exceeds some dimension.
pub(crate) fn slot_counts(r: usize, shape: &TensorShape) -> Result<Vec<usize>> {
    if r > shape.min_dim() {
        return Err(Error::RankExceedsDims {
            r,
            min_dim: shape.min_dim(),
        });
    }
    Ok(shape.dims().iter().map(|&n| n - r).collect())
}

/// Row-major sparse storage with a per-column reverse index and a
/// per-variable occurrence index. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatrix {
    r: usize,
    shape: TensorShape,
    rows: Vec<RowIndex>,
    row_lookup: HashMap<RowIndex, usize>,
    cols: Vec<ColIndex>,
    slots: Vec<usize>,
    col_offsets: Vec<usize>,
    /// (column position, variable position), sorted by column
    row_entries: Vec<Vec<(usize, usize)>>,
    /// (row position, variable position), sorted by row
    col_entries: Vec<Vec<(usize, usize)>>,
    variables: Vec<VariableId>,
    var_lookup: HashMap<VariableId, usize>,
    /// (row position, column position), sorted by row
    occurrences: Vec<Vec<(usize, usize)>>,
}

/// Builds the pattern matrix for `r` and `shape`.
pub fn build_pattern(r: usize, shape: &TensorShape) -> Result<PatternMatrix> {
    let slots = slot_counts(r, shape)?;
    let rows = enumerate_rows(r, shape.order());
    let mut entries = Vec::with_capacity(rows.len() * slots.iter().sum::<usize>());
    for (i, p) in rows.iter().enumerate() {
        for (t0, &width) in slots.iter().enumerate() {
            let t = t0 + 1;
            for s in 1..=width {
                let var = VariableId::new(t, s, p.without(t));
                entries.push((i, ColIndex::new(t, p.get(t), s), var));
            }
        }
    }
    PatternMatrix::assemble(r, shape.clone(), rows, slots, entries)
}

impl PatternMatrix {
    /// Reassembles a pattern from explicit entries, checking that every
    /// entry sits on a valid row/column label. Used by the importers.
    pub fn from_parts(
        r: usize,
        shape: TensorShape,
        entries: Vec<(RowIndex, ColIndex, VariableId)>,
    ) -> Result<Self> {
        let slots = slot_counts(r, &shape)?;
        let rows = enumerate_rows(r, shape.order());
        let lookup: HashMap<&RowIndex, usize> =
            rows.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut positioned = Vec::with_capacity(entries.len());
        for (row, col, var) in entries {
            let i = *lookup
                .get(&row)
                .ok_or_else(|| Error::Parse(format!("row {row} is not admissible")))?;
            positioned.push((i, col, var));
        }
        Self::assemble(r, shape, rows, slots, positioned)
    }

    fn assemble(
        r: usize,
        shape: TensorShape,
        rows: Vec<RowIndex>,
        slots: Vec<usize>,
        entries: Vec<(usize, ColIndex, VariableId)>,
    ) -> Result<Self> {
        let mut col_offsets = Vec::with_capacity(slots.len() + 1);
        let mut cols = Vec::new();
        col_offsets.push(0);
        for (t0, &width) in slots.iter().enumerate() {
            for m in 1..=r {
                for s in 1..=width {
                    cols.push(ColIndex::new(t0 + 1, m, s));
                }
            }
            col_offsets.push(cols.len());
        }

        let var_set: BTreeSet<&VariableId> = entries.iter().map(|(_, _, v)| v).collect();
        let variables: Vec<VariableId> = var_set.into_iter().cloned().collect();
        let var_lookup: HashMap<VariableId, usize> = variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();

        let mut pm = Self {
            r,
            row_lookup: rows
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), i))
                .collect(),
            row_entries: vec![Vec::new(); rows.len()],
            col_entries: vec![Vec::new(); cols.len()],
            occurrences: vec![Vec::new(); variables.len()],
            shape,
            rows,
            cols,
            slots,
            col_offsets,
            variables,
            var_lookup,
        };

        for (i, col, var) in entries {
            let j = pm
                .col_position(&col)
                .ok_or_else(|| Error::Parse(format!("column {col} out of range")))?;
            let v = pm.var_lookup[&var];
            if i >= pm.rows.len() {
                return Err(Error::Parse(format!("row position {i} out of range")));
            }
            pm.row_entries[i].push((j, v));
        }
        for (i, entries) in pm.row_entries.iter_mut().enumerate() {
            entries.sort_unstable();
            if entries.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Parse(format!(
                    "duplicate entry in row {}",
                    pm.rows[i]
                )));
            }
            for &(j, v) in entries.iter() {
                pm.col_entries[j].push((i, v));
                pm.occurrences[v].push((i, j));
            }
        }
        Ok(pm)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.row_entries.iter().map(Vec::len).sum()
    }

    pub fn rows(&self) -> &[RowIndex] {
        &self.rows
    }

    pub fn cols(&self) -> &[ColIndex] {
        &self.cols
    }

    pub fn row(&self, i: usize) -> &RowIndex {
        &self.rows[i]
    }

    pub fn col(&self, j: usize) -> ColIndex {
        self.cols[j]
    }

    /// Number of slots `n_t - r` in direction `t`.
    pub fn slots(&self, t: usize) -> usize {
        self.slots[t - 1]
    }

    pub fn variables(&self) -> &[VariableId] {
        &self.variables
    }

    pub fn variable(&self, v: usize) -> &VariableId {
        &self.variables[v]
    }

    pub fn variable_position(&self, var: &VariableId) -> Option<usize> {
        self.var_lookup.get(var).copied()
    }

    pub fn row_position(&self, p: &RowIndex) -> Option<usize> {
        self.row_lookup.get(p).copied()
    }

    pub fn col_position(&self, c: &ColIndex) -> Option<usize> {
        let t = c.direction;
        if t == 0 || t > self.slots.len() {
            return None;
        }
        let width = self.slots[t - 1];
        if c.value == 0 || c.value > self.r || c.slot == 0 || c.slot > width {
            return None;
        }
        Some(self.col_offsets[t - 1] + (c.value - 1) * width + (c.slot - 1))
    }

    /// Nonzeros of row `i` as (column position, variable position).
    pub fn row_entries(&self, i: usize) -> &[(usize, usize)] {
        &self.row_entries[i]
    }

    /// Nonzeros of column `j` as (row position, variable position).
    pub fn col_entries(&self, j: usize) -> &[(usize, usize)] {
        &self.col_entries[j]
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&VariableId> {
        let entries = &self.row_entries[i];
        entries
            .binary_search_by_key(&j, |&(c, _)| c)
            .ok()
            .map(|pos| &self.variables[entries[pos].1])
    }

    /// Symbolic entry by labels; `None` for zero or unknown labels.
    pub fn entry_at(&self, row: &RowIndex, col: &ColIndex) -> Option<&VariableId> {
        let i = self.row_position(row)?;
        let j = self.col_position(col)?;
        self.entry(i, j)
    }

    /// Positions (row, column) holding variable position `v`, sorted by row.
    pub fn occurrence_positions(&self, v: usize) -> &[(usize, usize)] {
        &self.occurrences[v]
    }

    /// All cells holding `var`; empty for unknown variables.
    pub fn occurrences(&self, var: &VariableId) -> Vec<(RowIndex, ColIndex)> {
        match self.variable_position(var) {
            Some(v) => self.occurrences[v]
                .iter()
                .map(|&(i, j)| (self.rows[i].clone(), self.cols[j]))
                .collect(),
            None => Vec::new(),
        }
    }
}
