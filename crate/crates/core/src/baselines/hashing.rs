use nalgebra::DMatrix;
use rand::Rng;

use super::AmmSketcher;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};
use crate::sketch::{check_len, ColumnPair};

/// Count-sketch AMM: column `i` is added, with sign `s(i)`, into bucket `h(i)`
/// of both sketches. `h` and `s` are shared between `X` and `Y` and are
/// recomputed from `(seed, i)`.
#[derive(Clone, Debug)]
pub struct HashingState {
    seed: u64,
    bx: DMatrix<f64>,
    by: DMatrix<f64>,
    columns_seen: u64,
}

impl HashingState {
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
        })
    }

    /// `(h(i), s(i))` for the given seed and sketch width.
    pub fn bucket_and_sign(seed: u64, ell: usize, index: u64) -> (usize, f64) {
        let mut draws = rng::stream(seed, Domain::Hashing, index);
        let bucket = draws.random_range(0..ell);
        let sign = if draws.random::<bool>() { 1.0 } else { -1.0 };
        (bucket, sign)
    }
}

impl AmmSketcher for HashingState {
    fn update(&mut self, pair: &ColumnPair) -> Result<()> {
        check_len("x", self.bx.nrows(), pair.x().len())?;
        check_len("y", self.by.nrows(), pair.y().len())?;
        let (bucket, sign) = Self::bucket_and_sign(self.seed, self.bx.ncols(), self.columns_seen);
        self.columns_seen += 1;
        for (dst, &v) in self.bx.column_mut(bucket).iter_mut().zip(pair.x()) {
            *dst += sign * v;
        }
        for (dst, &v) in self.by.column_mut(bucket).iter_mut().zip(pair.y()) {
            *dst += sign * v;
        }
        Ok(())
    }

    fn sketches(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.bx.clone(), self.by.clone())
    }
}

pub fn hashing_amm(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize, seed: u64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    super::Method::Hashing.run(x, y, ell, seed)
}
