use nalgebra::DMatrix;
use rand::Rng;

use super::AmmSketcher;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};
use crate::sketch::{check_len, ColumnPair};

/// Random sign projection `bx = X P`, `by = Y P` with `P_ij = +-1/sqrt(ell)`.
///
/// Row `i` of `P` is regenerated from `(seed, i)` when column `i` arrives, so
/// `P` is never stored.
#[derive(Clone, Debug)]
pub struct ProjectionState {
    seed: u64,
    bx: DMatrix<f64>,
    by: DMatrix<f64>,
    columns_seen: u64,
    row: Vec<f64>,
}

impl ProjectionState {
    pub fn new(ell: usize, mx: usize, my: usize, seed: u64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::EllTooSmall { ell, min: 1 });
        }
        if mx == 0 || my == 0 {
            return Err(Error::ZeroDimension(if mx == 0 { "mx" } else { "my" }));
        }
        Ok(Self {
            seed,
            bx: DMatrix::zeros(mx, ell),
            by: DMatrix::zeros(my, ell),
            columns_seen: 0,
            row: vec![0.0; ell],
        })
    }

    /// Row `index` of the implicit projection matrix.
    pub fn projection_row(seed: u64, ell: usize, index: u64) -> Vec<f64> {
        let mut out = vec![0.0; ell];
        fill_row(seed, index, &mut out);
        out
    }
}

fn fill_row(seed: u64, index: u64, out: &mut [f64]) {
    let magnitude = 1.0 / (out.len() as f64).sqrt();
    let mut draws = rng::stream(seed, Domain::Projection, index);
    let mut bits = 0u64;
    for (k, v) in out.iter_mut().enumerate() {
        if k % 64 == 0 {
            bits = draws.random();
        }
        *v = if bits & 1 == 1 { magnitude } else { -magnitude };
        bits >>= 1;
    }
}

impl AmmSketcher for ProjectionState {
    fn update(&mut self, pair: &ColumnPair) -> Result<()> {
        check_len("x", self.bx.nrows(), pair.x().len())?;
        check_len("y", self.by.nrows(), pair.y().len())?;
        fill_row(self.seed, self.columns_seen, &mut self.row);
        self.columns_seen += 1;
        for (j, &p) in self.row.iter().enumerate() {
            for (dst, &v) in self.bx.column_mut(j).iter_mut().zip(pair.x()) {
                *dst += v * p;
            }
            for (dst, &v) in self.by.column_mut(j).iter_mut().zip(pair.y()) {
                *dst += v * p;
            }
        }
        Ok(())
    }

    fn sketches(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.bx.clone(), self.by.clone())
    }
}

pub fn projection_amm(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize, seed: u64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    super::Method::Projection.run(x, y, ell, seed)
}
