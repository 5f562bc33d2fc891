//! Solver-generated corpora of `(d, field)` pairs, supervision masks, and
//! the little-endian `CAPD` file format.
//!
//! Layout: magic `CAPD`, version `u32 = 1`, `nx u32`, `ny u32`, `m u32`,
//! `a f64`, `b f64`, `v0 f64` (44 bytes), then `m` records of
//! `d f64`, `supervised u8`, and `nx*ny` field values as `f64`, row-major.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{CapacitorSpec, GridSpec};
use crate::rng::Prng;
use crate::scalar::Scalar;
use crate::solver::{solve_sor, Field, SolverConfig};

pub const DATASET_MAGIC: [u8; 4] = *b"CAPD";
pub const DATASET_VERSION: u32 = 1;
pub const DATASET_HEADER_LEN: usize = 44;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub d: T,
    pub field: Field<T>,
}

/// Corpus of solved fields sharing one housing geometry and grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub a: T,
    pub b: T,
    pub v0: T,
    pub grid: GridSpec<T>,
    pub samples: Vec<Sample<T>>,
    pub supervised: Vec<bool>,
}

impl<T: Scalar> Dataset<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Capacitor specification for plate length `d` in this corpus' housing.
    pub fn spec(&self, d: T) -> CapacitorSpec<T> {
        CapacitorSpec {
            a: self.a,
            b: self.b,
            d,
            v0: self.v0,
        }
    }

    pub fn supervised_count(&self) -> usize {
        self.supervised.iter().filter(|&&s| s).count()
    }

    pub fn supervised_samples(&self) -> impl Iterator<Item = &Sample<T>> {
        self.samples
            .iter()
            .zip(&self.supervised)
            .filter_map(|(s, &sup)| sup.then_some(s))
    }

    pub fn d_values(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.d).collect()
    }
}

/// Multiplicative rescaling of field values into the open range of `tanh`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleTransform<T> {
    pub scale: T,
}

impl<T: Scalar> Default for ScaleTransform<T> {
    fn default() -> Self {
        Self { scale: T::lit(0.9) }
    }
}

impl<T: Scalar> ScaleTransform<T> {
    pub fn new(scale: T) -> Result<Self> {
        if !(scale > T::zero() && scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "scale must be positive, got {scale}"
            )));
        }
        Ok(Self { scale })
    }

    pub fn apply(&self, values: &[T]) -> Vec<T> {
        values.iter().map(|&v| v * self.scale).collect()
    }

    pub fn unapply(&self, values: &[T]) -> Vec<T> {
        values.iter().map(|&v| v / self.scale).collect()
    }
}

/// Solves one field per entry of `d_values`, in input order.
///
/// Only the housing (`a`, `b`, `v0`) of `housing` is used. Any
/// non-converged solve aborts generation.
pub fn generate_dataset<T: Scalar>(
    housing: &CapacitorSpec<T>,
    grid: &GridSpec<T>,
    d_values: &[T],
    solver: &SolverConfig<T>,
) -> Result<Dataset<T>> {
    if d_values.is_empty() {
        return Err(Error::InvalidConfig(
            "dataset needs at least one d value".into(),
        ));
    }
    let samples = d_values
        .iter()
        .map(|&d| {
            let spec = CapacitorSpec { d, ..*housing };
            let (field, report) = solve_sor(&spec, grid, solver)?;
            if !report.converged {
                return Err(Error::NotConverged {
                    d: d.to_f64_lossy(),
                    iterations: report.iterations,
                    final_update: report.final_update.to_f64_lossy(),
                });
            }
            Ok(Sample { d, field })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        a: housing.a,
        b: housing.b,
        v0: housing.v0,
        grid: *grid,
        supervised: vec![false; samples.len()],
        samples,
    })
}

/// Marks exactly `n_sup` samples as supervised, drawn uniformly without
/// replacement from a generator seeded with `seed`.
pub fn split_supervised<T: Scalar>(ds: &Dataset<T>, n_sup: usize, seed: u64) -> Result<Dataset<T>> {
    let m = ds.len();
    if n_sup > m {
        return Err(Error::InvalidConfig(format!(
            "cannot mark {n_sup} of {m} samples as supervised"
        )));
    }
    let mut rng = Prng::new(seed);
    let mut mask = vec![false; m];
    for idx in rand::seq::index::sample(&mut rng, m, n_sup) {
        mask[idx] = true;
    }
    Ok(Dataset {
        supervised: mask,
        ..ds.clone()
    })
}

fn u32_of(n: usize, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::InvalidConfig(format!("{what} = {n} does not fit in u32")))
}

/// Serializes a dataset to the `CAPD` byte layout.
pub fn to_bytes<T: Scalar>(ds: &Dataset<T>) -> Result<Vec<u8>> {
    let n = ds.grid.len();
    let mut out = Vec::with_capacity(DATASET_HEADER_LEN + ds.len() * (9 + 8 * n));
    out.extend_from_slice(&DATASET_MAGIC);
    out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    out.extend_from_slice(&u32_of(ds.grid.nx, "nx")?.to_le_bytes());
    out.extend_from_slice(&u32_of(ds.grid.ny, "ny")?.to_le_bytes());
    out.extend_from_slice(&u32_of(ds.len(), "m")?.to_le_bytes());
    for v in [ds.a, ds.b, ds.v0] {
        out.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
    }
    for (sample, &sup) in ds.samples.iter().zip(&ds.supervised) {
        out.extend_from_slice(&sample.d.to_f64_lossy().to_le_bytes());
        out.push(u8::from(sup));
        for &v in &sample.field.values {
            out.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
        }
    }
    Ok(out)
}

/// Bounds-checked little-endian reader.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Truncated(format!(
                "{what}: need {n} bytes at offset {}, have {}",
                self.pos,
                self.bytes.len() - self.pos
            ))),
        }
    }

    pub(crate) fn magic(&mut self) -> Result<[u8; 4]> {
        Ok(self.take(4, "magic")?.try_into().expect("4 bytes"))
    }

    pub(crate) fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    pub(crate) fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4, what)?.try_into().expect("4 bytes"),
        ))
    }

    pub(crate) fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8, what)?.try_into().expect("8 bytes"),
        ))
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

/// Parses the `CAPD` byte layout.
pub fn from_bytes<T: Scalar>(bytes: &[u8]) -> Result<Dataset<T>> {
    let mut r = Reader::new(bytes);
    let magic = r.magic()?;
    if magic != DATASET_MAGIC {
        return Err(Error::BadMagic {
            expected: DATASET_MAGIC,
            found: magic,
        });
    }
    let version = r.u32("version")?;
    if version != DATASET_VERSION {
        return Err(Error::VersionMismatch {
            expected: DATASET_VERSION,
            found: version,
        });
    }
    let nx = r.u32("nx")? as usize;
    let ny = r.u32("ny")? as usize;
    let m = r.u32("m")? as usize;
    let a = T::lit(r.f64("a")?);
    let b = T::lit(r.f64("b")?);
    let v0 = T::lit(r.f64("v0")?);
    let housing = CapacitorSpec {
        a,
        b,
        d: a * T::lit(0.5),
        v0,
    };
    let grid = GridSpec::new(nx, ny, &housing)?;
    let n = grid.len();

    let mut samples = Vec::with_capacity(m);
    let mut supervised = Vec::with_capacity(m);
    for k in 0..m {
        let d = T::lit(r.f64("sample d")?);
        let flag = r.u8("supervised flag")?;
        if flag > 1 {
            return Err(Error::Truncated(format!(
                "record {k}: supervised flag {flag} is not 0/1"
            )));
        }
        let raw = r.take(8 * n, "field values")?;
        let values = raw
            .chunks_exact(8)
            .map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8 bytes"))))
            .collect();
        samples.push(Sample {
            d,
            field: Field::new(grid, values)?,
        });
        supervised.push(flag == 1);
    }
    if r.remaining() != 0 {
        return Err(Error::Truncated(format!(
            "{} trailing bytes after {m} records",
            r.remaining()
        )));
    }
    Ok(Dataset {
        a,
        b,
        v0,
        grid,
        samples,
        supervised,
    })
}

pub fn save<T: Scalar>(ds: &Dataset<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_bytes(ds)?)?;
    Ok(())
}

pub fn load<T: Scalar>(path: impl AsRef<Path>) -> Result<Dataset<T>> {
    from_bytes(&fs::read(path)?)
}
