use nalgebra::DMatrix;

use super::AmmSketcher;
use crate::error::{Error, Result};
use crate::sketch::{check_len, ColumnPair, FrequentDirectionsSketch};

/// Frequent directions on the stacked columns `z_i = [x_i; y_i]`; the final
/// sketch is split row-wise into `bx` (first `mx` rows) and `by`.
///
/// `ell` may go up to `mx + my` here.
#[derive(Clone, Debug)]
pub struct FdAmmState {
    mx: usize,
    my: usize,
    inner: FrequentDirectionsSketch,
    stacked: Vec<f64>,
}

impl FdAmmState {
    pub fn new(ell: usize, mx: usize, my: usize) -> Result<Self> {
        if mx == 0 || my == 0 {
            return Err(Error::ZeroDimension(if mx == 0 { "mx" } else { "my" }));
        }
        Ok(Self {
            mx,
            my,
            inner: FrequentDirectionsSketch::new(ell, mx + my)?,
            stacked: vec![0.0; mx + my],
        })
    }

    pub fn inner(&self) -> &FrequentDirectionsSketch {
        &self.inner
    }
}

impl AmmSketcher for FdAmmState {
    fn update(&mut self, pair: &ColumnPair) -> Result<()> {
        check_len("x", self.mx, pair.x().len())?;
        check_len("y", self.my, pair.y().len())?;
        self.stacked[..self.mx].copy_from_slice(pair.x());
        self.stacked[self.mx..].copy_from_slice(pair.y());
        self.inner.update(&self.stacked).map(|_| ())
    }

    fn sketches(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let d = self.inner.sketch();
        (d.rows(0, self.mx).into_owned(), d.rows(self.mx, self.my).into_owned())
    }
}

pub fn fd_amm(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    super::Method::FdAmm.run(x, y, ell, 0)
}
