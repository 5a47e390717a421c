//! Co-occurring directions.
//!
//! The sketch keeps two buffers `bx` (`mx x ell`) and `by` (`my x ell`) whose
//! product `bx * by^T` tracks `X Y^T`. Columns are appended until the buffers
//! are full; then both buffers are QR-factored, the small `ell x ell` core
//! `Rx Ry^T` is decomposed, and its spectrum is shrunk by the singular value
//! at position `ell/2`. This frees at least half of the columns while the
//! spectral error grows by at most the shrink level, so the running sum of
//! shrink levels certifies the error of the sketch at every point of the
//! stream.
//!
//! Occupied columns are kept contiguous: after a shrink the surviving
//! directions sit in columns `0..fill` in descending order of their shrunk
//! singular value, and every column from `fill` on is exactly zero.

use nalgebra::DMatrix;

use super::config::SketchConfig;
use super::{check_finite, check_len, ColumnPair, ShrinkReport, ZERO_FLOOR};
use crate::error::{Error, Result};
use crate::linalg::{norm_sq, svd, thin_qr, Svd};

#[derive(Clone, Debug, PartialEq)]
pub struct CoOccurringSketch {
    config: SketchConfig,
    bx: DMatrix<f64>,
    by: DMatrix<f64>,
    fill: usize,
    delta_log: Vec<f64>,
    columns_seen: u64,
    frob_x_sq: f64,
    frob_y_sq: f64,
}

/// Outcome of checking the accumulated shrink levels against their ceiling
/// `2/ell * ||X||_F * ||Y||_F`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaAudit {
    pub delta_sum: f64,
    pub ceiling: f64,
    pub holds: bool,
}

/// Relative slack allowed when comparing floating-point bounds.
pub const BOUND_SLACK: f64 = 1e-9;

impl CoOccurringSketch {
    pub fn new(config: SketchConfig) -> Self {
        let ell = config.ell();
        Self {
            config,
            bx: DMatrix::zeros(config.mx(), ell),
            by: DMatrix::zeros(config.my(), ell),
            fill: 0,
            delta_log: Vec::new(),
            columns_seen: 0,
            frob_x_sq: 0.0,
            frob_y_sq: 0.0,
        }
    }

    /// Reassembles a sketch from stored state, checking every structural invariant.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        config: SketchConfig,
        bx: DMatrix<f64>,
        by: DMatrix<f64>,
        fill: usize,
        delta_log: Vec<f64>,
        columns_seen: u64,
        frob_x_sq: f64,
        frob_y_sq: f64,
    ) -> Result<Self> {
        let ell = config.ell();
        check_len("bx rows", config.mx(), bx.nrows())?;
        check_len("bx columns", ell, bx.ncols())?;
        check_len("by rows", config.my(), by.nrows())?;
        check_len("by columns", ell, by.ncols())?;
        if fill > ell {
            return Err(Error::InvalidParameter(format!("fill {fill} exceeds ell {ell}")));
        }
        let tail_zero = |m: &DMatrix<f64>| (fill..ell).all(|j| m.column(j).iter().all(|&v| v == 0.0));
        if !tail_zero(&bx) || !tail_zero(&by) {
            return Err(Error::InvalidParameter("columns past fill must be zero".into()));
        }
        check_finite(bx.as_slice(), 0)?;
        check_finite(by.as_slice(), 0)?;
        if delta_log.iter().any(|d| !d.is_finite() || *d < 0.0)
            || !(frob_x_sq.is_finite() && frob_x_sq >= 0.0)
            || !(frob_y_sq.is_finite() && frob_y_sq >= 0.0)
        {
            return Err(Error::InvalidParameter("accumulators must be finite and nonnegative".into()));
        }
        Ok(Self {
            config,
            bx,
            by,
            fill,
            delta_log,
            columns_seen,
            frob_x_sq,
            frob_y_sq,
        })
    }

    pub fn config(&self) -> SketchConfig {
        self.config
    }

    pub fn fill(&self) -> usize {
        self.fill
    }

    pub fn delta_log(&self) -> &[f64] {
        &self.delta_log
    }

    pub fn delta_sum(&self) -> f64 {
        self.delta_log.iter().sum()
    }

    pub fn columns_seen(&self) -> u64 {
        self.columns_seen
    }

    pub fn frob_x_sq(&self) -> f64 {
        self.frob_x_sq
    }

    pub fn frob_y_sq(&self) -> f64 {
        self.frob_y_sq
    }

    pub fn bx(&self) -> &DMatrix<f64> {
        &self.bx
    }

    pub fn by(&self) -> &DMatrix<f64> {
        &self.by
    }

    /// Current buffers. No final shrink is applied, so a stream shorter than
    /// `ell` is reproduced exactly.
    pub fn result(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.bx.clone(), self.by.clone())
    }

    /// `bx * by^T`, dense `mx x my`.
    pub fn product(&self) -> DMatrix<f64> {
        &self.bx * self.by.transpose()
    }

    /// The worst-case error bound `2/ell * ||X||_F * ||Y||_F` for the data seen so far.
    pub fn error_bound(&self) -> f64 {
        2.0 / self.config.ell() as f64 * self.frob_x_sq.sqrt() * self.frob_y_sq.sqrt()
    }

    pub fn audit(&self) -> DeltaAudit {
        let delta_sum = self.delta_sum();
        let ceiling = self.error_bound();
        DeltaAudit {
            delta_sum,
            ceiling,
            holds: delta_sum <= ceiling * (1.0 + BOUND_SLACK),
        }
    }

    pub fn update(&mut self, pair: &ColumnPair) -> Result<Option<ShrinkReport>> {
        check_len("x", self.config.mx(), pair.x().len())?;
        check_len("y", self.config.my(), pair.y().len())?;
        Ok(self.insert(pair.x(), pair.y()))
    }

    /// Same as [`update`](Self::update) for borrowed columns.
    pub fn update_slices(&mut self, x: &[f64], y: &[f64]) -> Result<Option<ShrinkReport>> {
        check_len("x", self.config.mx(), x.len())?;
        check_len("y", self.config.my(), y.len())?;
        check_finite(x, 0)?;
        check_finite(y, x.len())?;
        Ok(self.insert(x, y))
    }

    fn insert(&mut self, x: &[f64], y: &[f64]) -> Option<ShrinkReport> {
        let j = self.fill;
        self.bx.column_mut(j).copy_from_slice(x);
        self.by.column_mut(j).copy_from_slice(y);
        self.fill += 1;
        self.columns_seen += 1;
        self.frob_x_sq += norm_sq(x);
        self.frob_y_sq += norm_sq(y);
        if self.fill == self.config.ell() {
            Some(self.shrink_full())
        } else {
            None
        }
    }

    /// Runs the shrink step; the buffers must be full.
    pub fn shrink(&mut self) -> Result<ShrinkReport> {
        if self.fill < self.config.ell() {
            return Err(Error::BufferNotFull {
                fill: self.fill,
                ell: self.config.ell(),
            });
        }
        Ok(self.shrink_full())
    }

    fn shrink_full(&mut self) -> ShrinkReport {
        let ell = self.config.ell();
        let (qx, rx) = thin_qr(&self.bx);
        let (qy, ry) = thin_qr(&self.by);
        let Svd { u, sigma, v } = svd(&(&rx * ry.transpose()));

        let delta = sigma[ell / 2 - 1];
        let shrunk: Vec<f64> = sigma.iter().map(|s| (s - delta).max(0.0)).collect();
        let top = shrunk[0];
        let retained = shrunk.iter().take_while(|&&s| s > 0.0 && s > ZERO_FLOOR * top).count();

        self.bx.fill(0.0);
        self.by.fill(0.0);
        if retained > 0 {
            let left = &qx * u.columns(0, retained);
            let right = &qy * v.columns(0, retained);
            for (j, s) in shrunk.iter().take(retained).enumerate() {
                let scale = s.sqrt();
                self.bx.set_column(j, &(left.column(j) * scale));
                self.by.set_column(j, &(right.column(j) * scale));
            }
        }
        self.fill = retained;
        self.delta_log.push(delta);
        ShrinkReport {
            delta,
            sigma,
            retained,
        }
    }

    /// Sketch of the union of two streams: the occupied columns of `a`, then
    /// of `b`, are streamed into a fresh sketch. Shrink levels and Frobenius
    /// accumulators of both inputs carry over, so the audit stays valid for
    /// the combined data.
    pub fn merge(a: &Self, b: &Self) -> Result<Self> {
        if a.config != b.config {
            return Err(Error::ConfigMismatch(format!("{:?} vs {:?}", a.config, b.config)));
        }
        let mut out = Self::new(a.config);
        out.delta_log.extend_from_slice(&a.delta_log);
        out.delta_log.extend_from_slice(&b.delta_log);
        for src in [a, b] {
            for j in 0..src.fill {
                out.insert(src.bx.column(j).as_slice(), src.by.column(j).as_slice());
            }
        }
        out.columns_seen = a.columns_seen + b.columns_seen;
        out.frob_x_sq = a.frob_x_sq + b.frob_x_sq;
        out.frob_y_sq = a.frob_y_sq + b.frob_y_sq;
        Ok(out)
    }
}

pub fn cod_merge(a: &CoOccurringSketch, b: &CoOccurringSketch) -> Result<CoOccurringSketch> {
    CoOccurringSketch::merge(a, b)
}
