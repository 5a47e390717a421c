//! Frequent directions: a streaming covariance sketch `D` with `D D^T ~ X X^T`.
//! When the buffer fills, its squared spectrum is reduced by the squared
//! singular value at position `ell/2`.

use nalgebra::DMatrix;

use super::config::validate_even_ell;
use super::{check_finite, check_len, ShrinkReport, ZERO_FLOOR};
use crate::error::{Error, Result};
use crate::linalg::{norm_sq, svd, Svd};

#[derive(Clone, Debug, PartialEq)]
pub struct FrequentDirectionsSketch {
    ell: usize,
    m: usize,
    dx: DMatrix<f64>,
    fill: usize,
    frob_sq: f64,
    columns_seen: u64,
    delta_log: Vec<f64>,
}

impl FrequentDirectionsSketch {
    pub fn new(ell: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroDimension("m"));
        }
        validate_even_ell(ell, m)?;
        Ok(Self {
            ell,
            m,
            dx: DMatrix::zeros(m, ell),
            fill: 0,
            frob_sq: 0.0,
            columns_seen: 0,
            delta_log: Vec::new(),
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn fill(&self) -> usize {
        self.fill
    }

    pub fn frob_sq(&self) -> f64 {
        self.frob_sq
    }

    pub fn columns_seen(&self) -> u64 {
        self.columns_seen
    }

    /// Squared-spectrum shrink levels, one per shrink.
    pub fn delta_log(&self) -> &[f64] {
        &self.delta_log
    }

    pub fn sketch(&self) -> &DMatrix<f64> {
        &self.dx
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        &self.dx * self.dx.transpose()
    }

    /// `2 ||X||_F^2 / ell`
    pub fn error_bound(&self) -> f64 {
        2.0 * self.frob_sq / self.ell as f64
    }

    pub fn update(&mut self, x: &[f64]) -> Result<Option<ShrinkReport>> {
        check_len("x", self.m, x.len())?;
        check_finite(x, 0)?;
        self.dx.column_mut(self.fill).copy_from_slice(x);
        self.fill += 1;
        self.columns_seen += 1;
        self.frob_sq += norm_sq(x);
        if self.fill == self.ell {
            Ok(Some(self.shrink_full()))
        } else {
            Ok(None)
        }
    }

    pub fn shrink(&mut self) -> Result<ShrinkReport> {
        if self.fill < self.ell {
            return Err(Error::BufferNotFull {
                fill: self.fill,
                ell: self.ell,
            });
        }
        Ok(self.shrink_full())
    }

    fn shrink_full(&mut self) -> ShrinkReport {
        let Svd { u, sigma, .. } = svd(&self.dx);
        let pivot = sigma[self.ell / 2 - 1];
        let delta = pivot * pivot;
        // sigma^2 - pivot^2 factored to avoid cancellation
        let shrunk: Vec<f64> = sigma
            .iter()
            .map(|&s| ((s - pivot).max(0.0) * (s + pivot)).sqrt())
            .collect();
        let top = shrunk[0];
        let retained = shrunk.iter().take_while(|&&s| s > 0.0 && s > ZERO_FLOOR * top).count();

        self.dx.fill(0.0);
        for (j, s) in shrunk.iter().take(retained).enumerate() {
            self.dx.set_column(j, &(u.column(j) * *s));
        }
        self.fill = retained;
        self.delta_log.push(delta);
        ShrinkReport {
            delta,
            sigma,
            retained,
        }
    }
}
