//! File formats: field CSVs, tuple directories, the ladder table and JSON
//! reports.
//!
//! A field file has the header `x,y,value` (`x,value` in 1D) and one row per
//! interior or boundary node in row-major order. Values are written with 17
//! significant digits so a write followed by a read reproduces every nodal
//! value exactly. Exterior nodes are not written and read back as zero.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::density::DensityTuple;
use crate::eps_solver::SolveReport;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

/// Relative tolerance, in units of `h`, for matching coordinates on read.
const COORD_TOL: f64 = 1e-6;

fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::FieldFormat {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Serializes a field to CSV bytes.
pub fn field_to_csv(grid: &Grid, field: &Field) -> Result<Vec<u8>> {
    if field.len() != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "field has {} values, grid has {} nodes",
            field.len(),
            grid.len()
        )));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    if grid.dim() == 1 {
        w.write_record(["x", "value"])?;
    } else {
        w.write_record(["x", "y", "value"])?;
    }
    for node in grid.active_nodes() {
        let (x, y) = grid.coords(node);
        let v = format_value(field[node]);
        if grid.dim() == 1 {
            w.write_record([format_value(x), v])?;
        } else {
            w.write_record([format_value(x), format_value(y), v])?;
        }
    }
    w.into_inner()
        .map_err(|e| Error::Io(e.into_error()))
}

pub fn write_field(path: &Path, grid: &Grid, field: &Field) -> Result<()> {
    fs::write(path, field_to_csv(grid, field)?)?;
    Ok(())
}

/// Parses a field CSV, checking the header, row count and node coordinates
/// against `grid`.
pub fn field_from_csv(path: &Path, grid: &Grid, bytes: &[u8]) -> Result<Field> {
    let mut r = csv::ReaderBuilder::new().from_reader(bytes);
    let expected: &[&str] = if grid.dim() == 1 { &["x", "value"] } else { &["x", "y", "value"] };
    let header = r.headers()?.clone();
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(format_err(
            path,
            format!("header must be `{}`", expected.join(",")),
        ));
    }
    let mut values = vec![0.0; grid.len()];
    let mut nodes = grid.active_nodes();
    let tol = COORD_TOL * grid.h();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let node = nodes
            .next()
            .ok_or_else(|| format_err(path, format!("line {line}: more rows than grid nodes")))?;
        let parse = |col: usize| -> Result<f64> {
            let s = record.get(col).unwrap_or("").trim();
            s.parse::<f64>()
                .map_err(|_| format_err(path, format!("line {line}: `{s}` is not a number")))
        };
        let (x, y) = grid.coords(node);
        let px = parse(0)?;
        let py = if grid.dim() == 2 { parse(1)? } else { y };
        if (px - x).abs() > tol || (py - y).abs() > tol {
            return Err(format_err(
                path,
                format!("line {line}: coordinates do not match the grid node at ({x}, {y})"),
            ));
        }
        values[node] = parse(grid.dim())?;
    }
    if nodes.next().is_some() {
        return Err(format_err(path, "fewer rows than grid nodes"));
    }
    Field::from_values(grid, values)
}

pub fn read_field(path: &Path, grid: &Grid) -> Result<Field> {
    let bytes = fs::read(path)?;
    field_from_csv(path, grid, &bytes)
}

fn species_file(dir: &Path, i: usize) -> PathBuf {
    dir.join(format!("u{}.csv", i + 1))
}

/// Writes `u1.csv`, ..., `um.csv` into `dir`, creating it if needed.
pub fn write_tuple(dir: &Path, grid: &Grid, u: &DensityTuple) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (i, f) in u.iter().enumerate() {
        write_field(&species_file(dir, i), grid, f)?;
    }
    Ok(())
}

/// Reads `u1.csv`, `u2.csv`, ... from `dir` until the first missing index.
pub fn read_tuple(dir: &Path, grid: &Grid) -> Result<DensityTuple> {
    let mut fields = Vec::new();
    loop {
        let path = species_file(dir, fields.len());
        if !path.is_file() {
            break;
        }
        fields.push(read_field(&path, grid)?);
    }
    if fields.is_empty() {
        return Err(format_err(dir, "no u1.csv in directory"));
    }
    DensityTuple::new(fields)
}

/// One row of `ladder.csv`. Limit runs are recorded with `epsilon = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub epsilon: f64,
    pub iterations: usize,
    pub residual: f64,
    pub overlap: f64,
    pub wall_time: f64,
}

impl LadderRow {
    pub fn new(report: &SolveReport, overlap: f64) -> Self {
        Self {
            epsilon: report.epsilon,
            iterations: report.iterations,
            residual: report.residual,
            overlap,
            wall_time: report.wall_time,
        }
    }
}

/// Subdirectory holding the fields of one ladder rung, e.g. `eps_1e-3`.
pub fn ladder_entry_dir(root: &Path, epsilon: f64) -> PathBuf {
    root.join(format!("eps_{epsilon:e}"))
}

pub fn write_ladder(path: &Path, rows: &[LadderRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Appends a row, writing the header first when the file does not exist.
pub fn append_ladder_row(path: &Path, row: &LadderRow) -> Result<()> {
    let mut rows = if path.is_file() { read_ladder(path)? } else { Vec::new() };
    rows.push(row.clone());
    write_ladder(path, &rows)
}

pub fn read_ladder(path: &Path) -> Result<Vec<LadderRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// `species,epsilon,h1_distance` rows, species numbered from 1.
pub fn write_rates(path: &Path, distances: &[(f64, Vec<f64>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["species", "epsilon", "h1_distance"])?;
    let m = distances.first().map_or(0, |d| d.1.len());
    for i in 0..m {
        for (eps, d) in distances {
            w.write_record([(i + 1).to_string(), format!("{eps:e}"), format_value(d[i])])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
