//! On-disk formats. Every number is written with 17 significant digits,
//! so reading a file back reproduces the in-memory `f64` bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use radwave_core::functionals::{DiagnosticRow, DiagnosticsSeries, HyperbolicRow, HyperbolicSeries};
use radwave_core::truncation::SplitNorms;
use radwave_core::{RadialField, RadialGrid};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

pub const FIELD_HEADER: [&str; 2] = ["r", "phi"];
pub const CHECKPOINT_HEADER: [&str; 3] = ["r", "phi", "phit"];

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a table whose cells are all reals.
pub fn write_table<'a>(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = &'a [f64]>,
) -> LabResult<()> {
    let mut out = csv::Writer::from_path(path).map_err(LabError::csv(path))?;
    out.write_record(header).map_err(LabError::csv(path))?;
    for row in rows {
        out.write_record(row.iter().map(|x| fmt_f64(*x))).map_err(LabError::csv(path))?;
    }
    out.flush().map_err(LabError::io(path))
}

/// Reads a table of reals, insisting on the exact header.
pub fn read_table(path: &Path, header: &[&str]) -> LabResult<Vec<Vec<f64>>> {
    let mut input = csv::Reader::from_path(path).map_err(LabError::csv(path))?;
    let found = input.headers().map_err(LabError::csv(path))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(format_error(path, format!("expected header {header:?}, found {found:?}")));
    }
    let mut rows = Vec::new();
    for (line, record) in input.records().enumerate() {
        let record = record.map_err(LabError::csv(path))?;
        let row = record
            .iter()
            .map(|cell| cell.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format_error(path, format!("row {}: {e}", line + 1)))?;
        if row.len() != header.len() {
            return Err(format_error(path, format!("row {} has {} cells", line + 1, row.len())));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn format_error(path: &Path, reason: impl Into<String>) -> LabError {
    LabError::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Recovers the grid from the node column `r_k = (k+1)h`.
fn grid_from_nodes(path: &Path, r: &[f64]) -> LabResult<RadialGrid> {
    let (Some(&first), n) = (r.first(), r.len()) else {
        return Err(format_error(path, "no grid points"));
    };
    let grid = RadialGrid::new(first * (n + 1) as f64, n)?;
    let uniform = r
        .iter()
        .enumerate()
        .all(|(k, x)| (x - grid.r(k)).abs() <= 1e-12 * grid.r_max());
    if !uniform {
        return Err(format_error(path, "radii are not the nodes (k+1)h"));
    }
    Ok(grid)
}

pub fn write_field(path: &Path, field: &RadialField) -> LabResult<()> {
    let rows: Vec<[f64; 2]> = field.grid().radii().zip(field.phi()).map(|(r, p)| [r, *p]).collect();
    write_table(path, &FIELD_HEADER, rows.iter().map(|r| &r[..]))
}

pub fn read_field(path: &Path) -> LabResult<RadialField> {
    let rows = read_table(path, &FIELD_HEADER)?;
    let r: Vec<f64> = rows.iter().map(|row| row[0]).collect();
    let grid = grid_from_nodes(path, &r)?;
    Ok(RadialField::from_phi(&grid, rows.into_iter().map(|row| row[1]).collect())?)
}

pub fn write_checkpoint(path: &Path, u: &RadialField, ut: &RadialField) -> LabResult<()> {
    let rows: Vec<[f64; 3]> = u
        .grid()
        .radii()
        .zip(u.phi().iter().zip(ut.phi()))
        .map(|(r, (a, b))| [r, *a, *b])
        .collect();
    write_table(path, &CHECKPOINT_HEADER, rows.iter().map(|r| &r[..]))
}

pub fn read_checkpoint(path: &Path) -> LabResult<(RadialField, RadialField)> {
    let rows = read_table(path, &CHECKPOINT_HEADER)?;
    let r: Vec<f64> = rows.iter().map(|row| row[0]).collect();
    let grid = grid_from_nodes(path, &r)?;
    let u = RadialField::from_phi(&grid, rows.iter().map(|row| row[1]).collect())?;
    let ut = RadialField::from_phi(&grid, rows.iter().map(|row| row[2]).collect())?;
    Ok((u, ut))
}

/// Index of the checkpoint files of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointIndex {
    pub times: Vec<f64>,
    pub files: Vec<String>,
    pub config: serde_json::Value,
}

pub fn write_series(path: &Path, series: &DiagnosticsSeries) -> LabResult<()> {
    let rows: Vec<[f64; 10]> = series.rows().iter().map(DiagnosticRow::to_array).collect();
    write_table(path, &DiagnosticRow::HEADER, rows.iter().map(|r| &r[..]))
}

pub fn read_series(path: &Path) -> LabResult<DiagnosticsSeries> {
    let rows = read_table(path, &DiagnosticRow::HEADER)?
        .into_iter()
        .map(|row| DiagnosticRow::from_array(row.try_into().expect("width checked")))
        .collect();
    Ok(DiagnosticsSeries::from_rows(rows)?)
}

pub fn write_hyperbolic_series(path: &Path, series: &HyperbolicSeries) -> LabResult<()> {
    let rows: Vec<[f64; 5]> = series.rows().iter().map(HyperbolicRow::to_array).collect();
    write_table(path, &HyperbolicRow::HEADER, rows.iter().map(|r| &r[..]))
}

pub fn read_hyperbolic_series(path: &Path) -> LabResult<HyperbolicSeries> {
    let rows = read_table(path, &HyperbolicRow::HEADER)?
        .into_iter()
        .map(|row| HyperbolicRow::from_array(row.try_into().expect("width checked")))
        .collect();
    Ok(HyperbolicSeries::from_rows(rows)?)
}

/// Norms certifying a Fourier-truncation split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateNorms {
    pub w0_hsc: f64,
    pub w1_hscm1: f64,
    pub v0_h1: f64,
    pub v1_l2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitCertificate {
    pub lambda: f64,
    pub epsilon: f64,
    pub norms: CertificateNorms,
}

impl SplitCertificate {
    pub fn new(lambda: f64, epsilon: f64, n: &SplitNorms) -> Self {
        SplitCertificate {
            lambda,
            epsilon,
            norms: CertificateNorms {
                w0_hsc: n.w0_hsc,
                w1_hscm1: n.w1_hscm1,
                v0_h1: n.v0_h1,
                v1_l2: n.v1_l2,
            },
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> LabResult<()> {
    let file = File::create(path).map_err(LabError::io(path))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value).map_err(LabError::json(path))?;
    out.write_all(b"\n").map_err(LabError::io(path))?;
    out.flush().map_err(LabError::io(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> LabResult<T> {
    let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
    serde_json::from_str(&text).map_err(LabError::json(path))
}

pub fn ensure_dir(path: &Path) -> LabResult<PathBuf> {
    std::fs::create_dir_all(path).map_err(LabError::io(path))?;
    Ok(path.to_path_buf())
}
