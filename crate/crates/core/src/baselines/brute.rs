use nalgebra::DMatrix;

use super::AmmSketcher;
use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::sketch::{check_len, ColumnPair};

/// Exact running product `C = sum x_i y_i^T`, truncated to rank `ell` on demand.
/// Its error is the optimal `sigma_{ell+1}(X Y^T)`.
#[derive(Clone, Debug)]
pub struct BruteForceState {
    ell: usize,
    product: DMatrix<f64>,
}

pub(super) fn validate(ell: usize, mx: usize, my: usize) -> Result<()> {
    if mx == 0 || my == 0 {
        return Err(Error::ZeroDimension(if mx == 0 { "mx" } else { "my" }));
    }
    if ell == 0 {
        return Err(Error::EllTooSmall { ell, min: 1 });
    }
    let limit = mx.min(my);
    if ell > limit {
        return Err(Error::EllTooLarge { ell, limit });
    }
    Ok(())
}

impl BruteForceState {
    pub fn new(ell: usize, mx: usize, my: usize) -> Result<Self> {
        validate(ell, mx, my)?;
        Ok(Self {
            ell,
            product: DMatrix::zeros(mx, my),
        })
    }

    pub fn product(&self) -> &DMatrix<f64> {
        &self.product
    }
}

impl AmmSketcher for BruteForceState {
    fn update(&mut self, pair: &ColumnPair) -> Result<()> {
        let (mx, my) = self.product.shape();
        check_len("x", mx, pair.x().len())?;
        check_len("y", my, pair.y().len())?;
        for (j, &yj) in pair.y().iter().enumerate() {
            if yj == 0.0 {
                continue;
            }
            let mut col = self.product.column_mut(j);
            for (c, &xi) in col.iter_mut().zip(pair.x()) {
                *c += xi * yj;
            }
        }
        Ok(())
    }

    fn sketches(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let d = svd(&self.product);
        let (mx, my) = self.product.shape();
        let mut bx = DMatrix::zeros(mx, self.ell);
        let mut by = DMatrix::zeros(my, self.ell);
        for j in 0..self.ell {
            let s = d.sigma[j].sqrt();
            bx.set_column(j, &(d.u.column(j) * s));
            by.set_column(j, &(d.v.column(j) * s));
        }
        (bx, by)
    }
}

pub fn brute_force_amm(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    super::Method::Brute.run(x, y, ell, 0)
}
