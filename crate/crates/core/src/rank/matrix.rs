use std::io::{self, Write};

use super::field::PrimeField;
use crate::error::{Error, Result};

/// Sparse matrix over a prime field, stored as sorted row lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularMatrix {
    n_rows: usize,
    n_cols: usize,
    field: PrimeField,
    rows: Vec<Vec<(usize, u64)>>,
}

impl ModularMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize, field: PrimeField) -> Self {
        Self {
            n_rows,
            n_cols,
            field,
            rows: vec![Vec::new(); n_rows],
        }
    }

    /// Builds from `(row, col, value)` triplets; values are reduced and
    /// zeros dropped. Repeated positions are an error.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        field: PrimeField,
        triplets: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Result<Self> {
        let mut m = Self::zeros(n_rows, n_cols, field);
        for (i, j, v) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::Structural(format!(
                    "entry ({i}, {j}) outside {n_rows}x{n_cols}"
                )));
            }
            let v = v % field.modulus();
            if v != 0 {
                m.rows[i].push((j, v));
            }
        }
        for row in &mut m.rows {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Structural("repeated matrix position".into()));
            }
        }
        Ok(m)
    }

    pub fn identity(n: usize, field: PrimeField) -> Self {
        Self::from_triplets(n, n, field, (0..n).map(|i| (i, i, 1))).expect("diagonal is valid")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, u64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |e| e.0)
            .map(|pos| row[pos].1)
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut dense = vec![vec![0u64; self.n_cols]; self.n_rows];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                dense[i][j] = v;
            }
        }
        dense
    }

    /// Keeps the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut new_index = vec![usize::MAX; self.n_cols];
        for (new, &old) in cols.iter().enumerate() {
            new_index[old] = new;
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut kept: Vec<(usize, u64)> = row
                    .iter()
                    .filter(|&&(j, _)| new_index[j] != usize::MAX)
                    .map(|&(j, v)| (new_index[j], v))
                    .collect();
                kept.sort_unstable();
                kept
            })
            .collect();
        Self {
            n_rows: self.n_rows,
            n_cols: cols.len(),
            field: self.field,
            rows,
        }
    }

    /// `nRows nCols nnz` header followed by 1-based `i j v` lines.
    pub fn write_coordinate_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                writeln!(out, "{} {} {}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }
}

/// Rank by Gaussian elimination, pivoting column by column.
///
/// The matrix is densified; each elimination only touches the nonzero
/// positions of the pivot row, which keeps the early (sparse) phase cheap.
pub fn rank_mod_p(m: &ModularMatrix) -> usize {
    let f = m.field;
    let (n_rows, n_cols) = (m.n_rows, m.n_cols);
    if n_rows == 0 || n_cols == 0 {
        return 0;
    }
    let mut a = vec![0u64; n_rows * n_cols];
    for (i, row) in m.rows.iter().enumerate() {
        for &(j, v) in row {
            a[i * n_cols + j] = v;
        }
    }
    let mut rank = 0;
    let mut support = Vec::with_capacity(n_cols);
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(pivot) = (rank..n_rows).find(|&i| a[i * n_cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in col..n_cols {
                a.swap(pivot * n_cols + j, rank * n_cols + j);
            }
        }
        let (head, tail) = a.split_at_mut((rank + 1) * n_cols);
        let prow = &mut head[rank * n_cols..];
        let inv = f.inv(prow[col]);
        support.clear();
        for (j, x) in prow.iter_mut().enumerate().skip(col) {
            if *x != 0 {
                *x = f.mul(*x, inv);
                support.push(j);
            }
        }
        for row in tail.chunks_exact_mut(n_cols) {
            let factor = row[col];
            if factor == 0 {
                continue;
            }
            for &j in &support {
                row[j] = f.sub(row[j], f.mul(factor, prow[j]));
            }
        }
        rank += 1;
    }
    rank
}

/// Rank by inserting rows one at a time into a reduced basis indexed by
/// leading column. Shares no code with [`rank_mod_p`] so the two can be
/// checked against each other.
pub fn rank_mod_p_incremental(m: &ModularMatrix) -> usize {
    let f = m.field;
    // basis[c] = row with leading entry 1 at column c
    let mut basis: Vec<Option<Vec<u64>>> = vec![None; m.n_cols];
    let mut rank = 0;
    for row in &m.rows {
        let mut v = vec![0u64; m.n_cols];
        for &(j, x) in row {
            v[j] = x;
        }
        let mut lead = None;
        for c in 0..m.n_cols {
            if v[c] == 0 {
                continue;
            }
            match &basis[c] {
                Some(b) => {
                    let factor = v[c];
                    for j in c..m.n_cols {
                        if b[j] != 0 {
                            v[j] = f.sub(v[j], f.mul(factor, b[j]));
                        }
                    }
                }
                None => {
                    lead = Some(c);
                    break;
                }
            }
        }
        if let Some(c) = lead {
            let inv = f.inv(v[c]);
            for x in v.iter_mut().skip(c) {
                *x = f.mul(*x, inv);
            }
            basis[c] = Some(v);
            rank += 1;
        }
    }
    rank
}

/// Determinant of a square matrix modulo p.
pub fn determinant_mod_p(m: &ModularMatrix) -> Result<u64> {
    if m.n_rows != m.n_cols {
        return Err(Error::Structural(format!(
            "determinant of a {}x{} matrix",
            m.n_rows, m.n_cols
        )));
    }
    let f = m.field;
    let n = m.n_rows;
    let mut a = m.to_dense();
    let mut det = 1 % f.modulus();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&i| a[i][col] != 0) else {
            return Ok(0);
        };
        if pivot != col {
            a.swap(pivot, col);
            det = f.neg(det);
        }
        det = f.mul(det, a[col][col]);
        let inv = f.inv(a[col][col]);
        let (top, below) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in below {
            let factor = f.mul(row[col], inv);
            if factor == 0 {
                continue;
            }
            for (x, &p) in row.iter_mut().zip(pivot_row).skip(col) {
                *x = f.sub(*x, f.mul(factor, p));
            }
        }
    }
    Ok(det)
}
