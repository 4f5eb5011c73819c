//! Snapshot files and CSV exports.
//!
//! A snapshot is a text record:
//!
//! ```text
//! # movewin field
//! dim 1
//! half_width 40
//! modes 1600
//! representation spectral
//! layout dft
//! <re> <im>
//! ...
//! ```
//!
//! followed by one coefficient per line in DFT layout: along each axis
//! position `j` holds mode `j` for `j <= N` and `j - (2N + 1)` otherwise,
//! two-dimensional arrays row-major with `k_x` as the slow index. Floats are
//! written in shortest round-trip form, so reading a snapshot back is exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{layout_index, Grid};

const MAGIC: &str = "# movewin field";

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        what: path.display().to_string(),
        reason: reason.into(),
    }
}

pub fn write_snapshot(field: &Field, path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let g = field.grid();
    writeln!(w, "{MAGIC}").map_err(io)?;
    writeln!(w, "dim {}", g.dim()).map_err(io)?;
    writeln!(w, "half_width {:?}", g.half_width()).map_err(io)?;
    writeln!(w, "modes {}", g.modes()).map_err(io)?;
    writeln!(w, "representation spectral").map_err(io)?;
    writeln!(w, "layout dft").map_err(io)?;
    for c in field.coeffs() {
        writeln!(w, "{:?} {:?}", c.re, c.im).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_snapshot(path: &Path) -> Result<Field> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| format_err(path, "unexpected end of file"))?
            .map_err(|e| Error::io(path, e))
    };
    if next()?.trim() != MAGIC {
        return Err(format_err(path, "missing header"));
    }
    let mut header = |key: &str| -> Result<String> {
        let line = next()?;
        let (k, v) = line
            .split_once(' ')
            .ok_or_else(|| format_err(path, format!("bad header line `{line}`")))?;
        if k != key {
            return Err(format_err(path, format!("expected `{key}`, found `{k}`")));
        }
        Ok(v.trim().to_string())
    };
    let parse_err = |e: std::num::ParseIntError| format_err(path, e.to_string());
    let dim: usize = header("dim")?.parse().map_err(parse_err)?;
    let half_width: f64 = header("half_width")?
        .parse()
        .map_err(|e: std::num::ParseFloatError| format_err(path, e.to_string()))?;
    let modes: usize = header("modes")?.parse().map_err(parse_err)?;
    if header("representation")? != "spectral" {
        return Err(format_err(path, "only the spectral representation is supported"));
    }
    if header("layout")? != "dft" {
        return Err(format_err(path, "only the dft layout is supported"));
    }
    let grid = Grid::new(dim, half_width, modes)?;
    let mut coeffs = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let line = next()?;
        let mut it = line.split_whitespace().map(str::parse::<f64>);
        match (it.next(), it.next()) {
            (Some(Ok(re)), Some(Ok(im))) => coeffs.push(Complex64::new(re, im)),
            _ => return Err(format_err(path, format!("bad coefficient line `{line}`"))),
        }
    }
    Field::from_coeffs(grid, coeffs)
}

/// Writes nodal samples in ascending coordinate order with columns
/// `x,re,im,abs` (or `x,y,re,im,abs`).
pub fn write_samples_csv(field: &Field, path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let g = field.grid();
    let s = field.samples();
    let n = g.modes() as i64;
    let m = g.axis_len();
    match g.dim() {
        1 => {
            writeln!(w, "x,re,im,abs").map_err(io)?;
            for i in -n..=n {
                let v = s[layout_index(i, g.modes())];
                writeln!(w, "{:?},{:?},{:?},{:?}", g.coordinate(i), v.re, v.im, v.norm()).map_err(io)?;
            }
        }
        _ => {
            writeln!(w, "x,y,re,im,abs").map_err(io)?;
            for i in -n..=n {
                for j in -n..=n {
                    let v = s[layout_index(i, g.modes()) * m + layout_index(j, g.modes())];
                    writeln!(
                        w,
                        "{:?},{:?},{:?},{:?},{:?}",
                        g.coordinate(i),
                        g.coordinate(j),
                        v.re,
                        v.im,
                        v.norm()
                    )
                    .map_err(io)?;
                }
            }
        }
    }
    w.flush().map_err(io)
}

/// Writes serializable rows as CSV with a header line.
pub fn write_rows<T: Serialize>(rows: &[T], header: &[&str], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
