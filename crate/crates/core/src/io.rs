//! File formats: signals as `re,im` CSV, grayscale images as binary PGM
//! (P5, 8-bit), dense matrix frames as CSV with `re,im` column pairs, and
//! JSON reports.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::{Error, Result, Shape, Signal, C64};

fn parse_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), msg: msg.into() }
}

/// Parses every record as numbers; a leading non-numeric record is taken as
/// a header and skipped.
fn read_numeric_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if line == 0 => continue,
            Err(e) => return Err(parse_err(path, format!("line {}: {e}", line + 1))),
        }
    }
    Ok(rows)
}

/// Reads a 1D signal: one entry per line, `re,im` or just `re`.
pub fn read_signal_csv(path: &Path) -> Result<Signal> {
    let rows = read_numeric_csv(path)?;
    let values = rows
        .iter()
        .enumerate()
        .map(|(i, r)| match r.as_slice() {
            [re] => Ok(C64::new(*re, 0.0)),
            [re, im] => Ok(C64::new(*re, *im)),
            _ => Err(parse_err(path, format!("entry {} has {} fields", i + 1, r.len()))),
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(parse_err(path, "no samples"));
    }
    Signal::from_vec(values)
}

/// Writes one `re,im` line per sample (row-major for 2D signals) after a
/// `re,im` header.
pub fn write_signal_csv(path: &Path, signal: &Signal) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["re", "im"])?;
    for v in signal.values() {
        writer.write_record([format!("{:e}", v.re), format!("{:e}", v.im)])?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads a dense frame: one row per ambient dimension, `re,im` pairs per atom.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<C64>> {
    let rows = read_numeric_csv(path)?;
    let Some(first) = rows.first() else {
        return Err(parse_err(path, "empty matrix"));
    };
    let width = first.len();
    if width == 0 || width % 2 != 0 {
        return Err(parse_err(path, "rows must hold re,im pairs"));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(parse_err(path, format!("row {} has {} fields, expected {width}", i + 1, r.len())));
    }
    let cols = width / 2;
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][2 * j], rows[i][2 * j + 1])))
}

pub fn write_matrix_csv(path: &Path, matrix: &DMatrix<C64>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let header: Vec<String> =
        (0..matrix.ncols()).flat_map(|j| [format!("re{j}"), format!("im{j}")]).collect();
    writer.write_record(&header)?;
    for i in 0..matrix.nrows() {
        let row: Vec<String> =
            (0..matrix.ncols()).flat_map(|j| [format!("{:e}", matrix[(i, j)].re), format!("{:e}", matrix[(i, j)].im)]).collect();
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a binary PGM (P5) as a 2D real signal with intensities in `[0, 1]`.
pub fn read_pgm(path: &Path) -> Result<Signal> {
    let bytes = fs::read(path)?;
    let mut pos = 0;
    let mut header = Vec::with_capacity(4);
    while header.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(parse_err(path, "truncated header"));
        }
        header.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if header[0] != "P5" {
        return Err(parse_err(path, format!("expected P5, found {}", header[0])));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|e| parse_err(path, format!("{s}: {e}")));
    let (cols, rows, maxval) = (num(&header[1])?, num(&header[2])?, num(&header[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(parse_err(path, format!("only 8-bit PGM is supported (maxval {maxval})")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let raster = bytes.get(pos..pos + rows * cols).ok_or_else(|| parse_err(path, "truncated raster"))?;
    let values: Vec<f64> = raster.iter().map(|&b| b as f64 / maxval as f64).collect();
    Signal::grid_from_real(rows, cols, &values)
}

/// Maps `v` to `round(255 * clamp(v, 0, 1))`.
pub fn to_gray(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Writes the real parts of a 2D signal as binary PGM, adding `offset`
/// before quantizing (use `0.5` for signed data such as residuals).
pub fn write_pgm(path: &Path, signal: &Signal, offset: f64) -> Result<()> {
    let Shape::Grid { rows, cols } = signal.shape() else {
        return Err(Error::InvalidParameter("PGM output needs a 2D signal".into()));
    };
    let mut out = Vec::with_capacity(rows * cols + 20);
    write!(out, "P5\n{cols} {rows}\n255\n")?;
    out.extend(signal.values().iter().map(|v| to_gray(v.re + offset)));
    fs::write(path, out)?;
    Ok(())
}

/// Writes serializable records as CSV with a header of field names.
/// An empty slice produces an empty file.
pub fn write_rows_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
