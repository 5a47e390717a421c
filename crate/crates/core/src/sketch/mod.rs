//! Deterministic streaming sketches: co-occurring directions for matrix
//! products and frequent directions for covariances.

mod cod;
mod config;
mod fd;
mod length;

pub use cod::{cod_merge, CoOccurringSketch, DeltaAudit, BOUND_SLACK};
pub use config::SketchConfig;
pub use fd::FrequentDirectionsSketch;
pub use length::{sketch_length_for, LengthMode, MatrixStats};

use crate::error::{Error, Result};

/// Shrunk values at or below this fraction of the largest one are set to zero.
pub const ZERO_FLOOR: f64 = 1e-12;

/// One element of a paired stream: the i-th column of `X` and of `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnPair {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl ColumnPair {
    /// Builds a pair, rejecting NaN and infinite entries.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_finite(&x, 0)?;
        check_finite(&y, x.len())?;
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.x, self.y)
    }
}

pub(crate) fn check_finite(v: &[f64], offset: usize) -> Result<()> {
    match v.iter().position(|a| !a.is_finite()) {
        Some(i) => Err(Error::NonFinite { index: offset + i }),
        None => Ok(()),
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { what, expected, got });
    }
    Ok(())
}

/// Summary of one shrink step.
#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkReport {
    /// Shrink level subtracted from the spectrum.
    pub delta: f64,
    /// Spectrum before shrinking, descending, length `ell`.
    pub sigma: Vec<f64>,
    /// Number of strictly positive shrunk values (the new fill).
    pub retained: usize,
}

/// Columns of a pair of equal-width matrices as a stream of pairs.
pub fn column_pairs<'a>(
    x: &'a nalgebra::DMatrix<f64>,
    y: &'a nalgebra::DMatrix<f64>,
) -> impl Iterator<Item = Result<ColumnPair>> + 'a {
    let n = x.ncols().min(y.ncols());
    (0..n).map(move |i| {
        ColumnPair::new(
            x.column(i).iter().copied().collect(),
            y.column(i).iter().copied().collect(),
        )
    })
}
