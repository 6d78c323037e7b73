use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use subrank_core::export::export_pattern;
use subrank_core::{
    build_pattern, classify, dim_c_r, find_certificate, generic_subrank, instantiate,
    subspace_dimension_oracle, validate, verify_generic_rank, BindingConstraint, DimensionRegime,
    PatternFormat, PrimeField, RandomAssignment, TensorShape,
};

use crate::{Command, ExportFormat, RngArgs};

pub enum Outcome {
    Success,
    Failed,
}

impl Outcome {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::Failed
        }
    }
}

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Q { dims, json } => cmd_q(&shape(dims)?, json),
        Command::Certificate { dims, r, out } => cmd_certificate(&shape(dims)?, r, out.as_deref()),
        Command::Verify {
            dims,
            r,
            rng,
            trials,
        } => cmd_verify(&shape(dims)?, r, rng, trials),
        Command::Dim {
            dims,
            r,
            oracle,
            rng,
        } => cmd_dim(&shape(dims)?, r, oracle.then_some(rng)),
        Command::Table {
            max,
            verify,
            rng,
            trials,
            out,
        } => cmd_table(max, verify.then_some((rng, trials)), out.as_deref()),
        Command::Export {
            dims,
            r,
            format,
            rng,
            out,
        } => cmd_export(&shape(dims)?, r, format, rng, out.as_deref()),
    }
}

fn shape(dims: Vec<usize>) -> Result<TensorShape> {
    Ok(TensorShape::new(dims)?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct QReport {
    dims: Vec<usize>,
    q: usize,
    binding: BindingConstraint,
    root_argument: usize,
    rows: u128,
    cols: u128,
}

fn cmd_q(shape: &TensorShape, json: bool) -> Result<Outcome> {
    let sub = generic_subrank(shape);
    let regime = classify(shape, sub.q);
    let report = QReport {
        dims: shape.dims().to_vec(),
        q: sub.q,
        binding: sub.binding,
        root_argument: sub.root_argument,
        rows: regime.rows,
        cols: regime.cols,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        let binding = match sub.binding {
            BindingConstraint::DimensionBound => format!("min dimension {}", shape.min_dim()),
            BindingConstraint::RootBound => {
                format!("floor({}^(1/{}))", sub.root_argument, shape.order() - 1)
            }
        };
        println!("shape {shape}: Q = {}", sub.q);
        println!("binding: {binding}");
        println!(
            "at r = {}: {} rows, {} columns",
            sub.q, report.rows, report.cols
        );
    }
    Ok(Outcome::Success)
}

fn cmd_certificate(shape: &TensorShape, r: usize, out: Option<&Path>) -> Result<Outcome> {
    let pm = build_pattern(r, shape)?;
    let cert = find_certificate(&pm)?;
    let verdict = validate(&pm, &cert);
    let mut json = cert.to_json();
    json.push('\n');
    match out {
        Some(path) => {
            emit(Some(path), json.as_bytes())?;
            println!("steps: {}", cert.steps.len());
            println!("degree: {}", cert.degree());
            println!(
                "{}: {}",
                if verdict.ok { "valid" } else { "INVALID" },
                verdict.detail
            );
        }
        None => {
            emit(None, json.as_bytes())?;
            eprintln!("steps: {}, degree: {}", cert.steps.len(), cert.degree());
            eprintln!(
                "{}: {}",
                if verdict.ok { "valid" } else { "INVALID" },
                verdict.detail
            );
        }
    }
    Ok(Outcome::from_ok(verdict.ok))
}

fn cmd_verify(shape: &TensorShape, r: usize, rng: RngArgs, trials: usize) -> Result<Outcome> {
    let pm = build_pattern(r, shape)?;
    let report = verify_generic_rank(&pm, pm.n_rows(), trials, rng.prime, rng.seed)?;
    println!(
        "pattern: {} rows, {} columns, prime {}",
        pm.n_rows(),
        pm.n_cols(),
        rng.prime
    );
    for trial in &report.trials {
        println!("seed {}: rank {}", trial.seed, trial.rank);
    }
    println!(
        "{}: {}",
        if report.ok { "ok" } else { "not ok" },
        report.detail
    );
    Ok(Outcome::from_ok(report.ok))
}

fn regime_name(regime: DimensionRegime) -> &'static str {
    match regime {
        DimensionRegime::Full => "full",
        DimensionRegime::Formula => "formula",
        DimensionRegime::EmptyOrInvalid => "empty-or-invalid",
    }
}

fn cmd_dim(shape: &TensorShape, r: usize, oracle: Option<RngArgs>) -> Result<Outcome> {
    if r == 0 {
        bail!("r must be at least 1");
    }
    let result = dim_c_r(shape, r)?;
    println!("regime: {}", regime_name(result.regime));
    println!("dim: {}", result.dim);
    let Some(rng) = oracle else {
        return Ok(Outcome::Success);
    };
    if result.regime == DimensionRegime::EmptyOrInvalid {
        println!("oracle: skipped, r exceeds the smallest dimension");
        return Ok(Outcome::Success);
    }
    let computed = subspace_dimension_oracle(shape, r, rng.prime, rng.seed)?;
    if computed as u128 == result.dim {
        println!("oracle: {computed} (agrees)");
        Ok(Outcome::Success)
    } else {
        println!("oracle: {computed} (disagrees with formula {})", result.dim);
        Ok(Outcome::Failed)
    }
}

struct TableRow {
    n: usize,
    q: usize,
    rows: u128,
    cols: u128,
    checks: Option<(bool, bool)>,
}

fn table_row(n: usize, verify: Option<(RngArgs, usize)>) -> Result<TableRow> {
    let shape = TensorShape::new(vec![n; 3])?;
    let q = generic_subrank(&shape).q;
    let regime = classify(&shape, q);
    let checks = match verify {
        None => None,
        Some((rng, trials)) => {
            let pm = build_pattern(q, &shape)?;
            let certified = find_certificate(&pm).is_ok_and(|cert| validate(&pm, &cert).ok);
            let ranked = verify_generic_rank(&pm, pm.n_rows(), trials, rng.prime, rng.seed)?.ok;
            Some((certified, ranked))
        }
    };
    Ok(TableRow {
        n,
        q,
        rows: regime.rows,
        cols: regime.cols,
        checks,
    })
}

fn cmd_table(max: usize, verify: Option<(RngArgs, usize)>, out: Option<&Path>) -> Result<Outcome> {
    if max == 0 {
        bail!("--max must be at least 1");
    }
    if let Some((rng, _)) = verify {
        PrimeField::new(rng.prime)?;
    }
    // collect keeps the rows in n order whatever order they finish in
    let rows: Vec<TableRow> = (1..=max)
        .into_par_iter()
        .map(|n| table_row(n, verify))
        .collect::<Result<_>>()?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["n", "q", "rows", "cols"];
    if verify.is_some() {
        header.extend(["certificate_valid", "rank_verified"]);
    }
    csv.write_record(&header)?;
    let mut all_ok = true;
    for row in &rows {
        let mut record = vec![
            row.n.to_string(),
            row.q.to_string(),
            row.rows.to_string(),
            row.cols.to_string(),
        ];
        if let Some((certified, ranked)) = row.checks {
            all_ok &= certified && ranked;
            record.extend([certified.to_string(), ranked.to_string()]);
        }
        csv.write_record(&record)?;
    }
    emit(out, &csv.into_inner()?)?;
    Ok(Outcome::from_ok(all_ok))
}

fn cmd_export(
    shape: &TensorShape,
    r: usize,
    format: ExportFormat,
    rng: RngArgs,
    out: Option<&Path>,
) -> Result<Outcome> {
    let pm = build_pattern(r, shape)?;
    let mut buf = Vec::new();
    match format {
        ExportFormat::Json => export_pattern(&pm, PatternFormat::Json, &mut buf)?,
        ExportFormat::CoordinateList => {
            export_pattern(&pm, PatternFormat::CoordinateList, &mut buf)?
        }
        ExportFormat::Instantiated => {
            let field = PrimeField::new(rng.prime)?;
            let assignment = RandomAssignment::generate(&pm, rng.seed, field);
            instantiate(&pm, &assignment)?.write_coordinate_list(&mut buf)?;
        }
    }
    emit(out, &buf)?;
    Ok(Outcome::Success)
}
