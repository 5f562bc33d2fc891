//! Field export: binary PGM (P5) greyscale and full-precision CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::GridSpec;
use crate::scalar::Scalar;
use crate::solver::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapFormat {
    Pgm,
    Csv,
}

impl std::str::FromStr for HeatmapFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pgm" => Ok(HeatmapFormat::Pgm),
            "csv" => Ok(HeatmapFormat::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown heatmap format {other:?}"
            ))),
        }
    }
}

/// P5 image, `nx` wide and `ny` high, maxval 255, min-max normalized.
/// The first row written is `y = 0`. A constant field maps to all zeros.
pub fn pgm_bytes<T: Scalar>(field: &Field<T>) -> Vec<u8> {
    let (lo, hi) = (field.min(), field.max());
    let span = hi - lo;
    let mut out = format!("P5\n{} {}\n255\n", field.grid.nx, field.grid.ny).into_bytes();
    out.extend(field.values.iter().map(|&v| {
        if span > T::zero() {
            let level = ((v - lo) / span * T::lit(255.0)).round().to_f64_lossy();
            level.clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    out
}

/// `ny` lines of `nx` comma-separated values, shortest round-trip formatting.
pub fn csv_string<T: Scalar>(field: &Field<T>) -> String {
    let mut s = String::with_capacity(field.values.len() * 20);
    for row in field.values.chunks(field.grid.nx) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write!(s, "{}", v.to_f64_lossy()).expect("write to string");
        }
        s.push('\n');
    }
    s
}

/// Parses [`csv_string`] output back onto `grid`.
pub fn parse_csv(text: &str, grid: GridSpec<f64>) -> Result<Field<f64>> {
    let mut values = Vec::with_capacity(grid.len());
    for (line_no, line) in text.lines().enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidConfig(format!("line {}: {e}", line_no + 1)))?;
        if row.len() != grid.nx {
            return Err(Error::DimensionMismatch {
                context: "heatmap CSV row",
                expected: grid.nx,
                actual: row.len(),
            });
        }
        values.extend(row);
    }
    Field::new(grid, values)
}

pub fn export_heatmap<T: Scalar>(
    field: &Field<T>,
    path: impl AsRef<Path>,
    format: HeatmapFormat,
) -> Result<()> {
    match format {
        HeatmapFormat::Pgm => fs::write(path, pgm_bytes(field))?,
        HeatmapFormat::Csv => fs::write(path, csv_string(field))?,
    }
    Ok(())
}
