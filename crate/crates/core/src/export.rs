//! Text serializations of pattern matrices.
//!
//! JSON carries the full row and column label lists and 0-based entry
//! positions into them. The coordinate list is a Matrix Market style file:
//! a `%` comment line recording `r` and the dimensions, a `nRows nCols nnz`
//! header, then one `row col name` line per nonzero with 1-based positions.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{RowIndex, TensorShape};
use crate::error::{Error, Result};
use crate::pattern::{ColIndex, PatternMatrix, VariableId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternFormat {
    Json,
    CoordinateList,
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    r: usize,
    dims: Vec<usize>,
    rows: Vec<RowIndex>,
    cols: Vec<ColIndex>,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    row: usize,
    col: usize,
    var: VariableId,
}

pub fn export_pattern<W: Write>(
    pm: &PatternMatrix,
    format: PatternFormat,
    out: W,
) -> io::Result<()> {
    match format {
        PatternFormat::Json => write_json(pm, out),
        PatternFormat::CoordinateList => write_coordinate_list(pm, out),
    }
}

pub fn write_json<W: Write>(pm: &PatternMatrix, mut out: W) -> io::Result<()> {
    let doc = PatternJson {
        r: pm.r(),
        dims: pm.shape().dims().to_vec(),
        rows: pm.rows().to_vec(),
        cols: pm.cols().to_vec(),
        entries: (0..pm.n_rows())
            .flat_map(|i| {
                pm.row_entries(i).iter().map(move |&(j, v)| EntryJson {
                    row: i,
                    col: j,
                    var: pm.variable(v).clone(),
                })
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)
}

pub fn write_coordinate_list<W: Write>(pm: &PatternMatrix, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", header_comment(pm.r(), pm.shape()))?;
    writeln!(out, "{} {} {}", pm.n_rows(), pm.n_cols(), pm.nnz())?;
    for i in 0..pm.n_rows() {
        for &(j, v) in pm.row_entries(i) {
            writeln!(out, "{} {} {}", i + 1, j + 1, pm.variable(v))?;
        }
    }
    Ok(())
}

pub(crate) fn header_comment(r: usize, shape: &TensorShape) -> String {
    let dims: Vec<String> = shape.dims().iter().map(|d| d.to_string()).collect();
    format!("% subrank pattern r={} dims={}", r, dims.join(","))
}

pub fn pattern_to_string(pm: &PatternMatrix, format: PatternFormat) -> String {
    let mut buf = Vec::new();
    export_pattern(pm, format, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("exports are ASCII")
}

pub fn parse_pattern_json(text: &str) -> Result<PatternMatrix> {
    let doc: PatternJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let shape = TensorShape::new(doc.dims)?;
    let mut entries = Vec::with_capacity(doc.entries.len());
    for e in doc.entries {
        let row = doc
            .rows
            .get(e.row)
            .ok_or_else(|| Error::Parse(format!("row position {} out of range", e.row)))?;
        let col = doc
            .cols
            .get(e.col)
            .ok_or_else(|| Error::Parse(format!("column position {} out of range", e.col)))?;
        entries.push((row.clone(), *col, e.var));
    }
    let pm = PatternMatrix::from_parts(doc.r, shape, entries)?;
    if pm.rows() != doc.rows.as_slice() || pm.cols() != doc.cols.as_slice() {
        return Err(Error::Parse(
            "row or column labels do not match r and dims".into(),
        ));
    }
    Ok(pm)
}

pub fn parse_coordinate_list(text: &str) -> Result<PatternMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let comment = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let (r, shape) = parse_header_comment(comment)?;

    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing size header".into()))?;
    let sizes = header
        .split_whitespace()
        .map(|x| {
            x.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad header {header:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let [n_rows, n_cols, nnz] = sizes[..] else {
        return Err(Error::Parse(format!("bad header {header:?}")));
    };

    let rows = crate::combinatorics::enumerate_rows(r, shape.order());
    let template = PatternMatrix::from_parts(r, shape.clone(), Vec::new())?;
    if rows.len() != n_rows || template.n_cols() != n_cols {
        return Err(Error::Parse(format!(
            "header {n_rows}x{n_cols} does not match r={r} dims={shape}"
        )));
    }

    let mut entries = Vec::with_capacity(nnz);
    for line in lines {
        let mut parts = line.split_whitespace();
        let (Some(i), Some(j), Some(name), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Parse(format!("bad data line {line:?}")));
        };
        let pos = |x: &str, bound: usize| -> Result<usize> {
            match x.parse::<usize>() {
                Ok(p) if p >= 1 && p <= bound => Ok(p - 1),
                _ => Err(Error::Parse(format!("bad position in {line:?}"))),
            }
        };
        let i = pos(i, n_rows)?;
        let j = pos(j, n_cols)?;
        entries.push((
            rows[i].clone(),
            template.col(j),
            name.parse::<VariableId>()?,
        ));
    }
    if entries.len() != nnz {
        return Err(Error::Parse(format!(
            "header declares {nnz} nonzeros, found {}",
            entries.len()
        )));
    }
    PatternMatrix::from_parts(r, shape, entries)
}

fn parse_header_comment(line: &str) -> Result<(usize, TensorShape)> {
    let bad = || Error::Parse(format!("bad comment line {line:?}"));
    let body = line.strip_prefix('%').ok_or_else(bad)?;
    let mut r = None;
    let mut dims = None;
    for token in body.split_whitespace() {
        if let Some(v) = token.strip_prefix("r=") {
            r = Some(v.parse::<usize>().map_err(|_| bad())?);
        } else if let Some(v) = token.strip_prefix("dims=") {
            dims = Some(
                v.split(',')
                    .map(|d| d.parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
    }
    Ok((r.ok_or_else(bad)?, TensorShape::new(dims.ok_or_else(bad)?)?))
}
