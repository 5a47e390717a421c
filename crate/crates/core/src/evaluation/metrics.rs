use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, singular_values, LinearOperator, ProductDifference};
use crate::rng::{self, Domain};

/// Above this smaller dimension the spectral norm switches from a full SVD to
/// power iteration.
pub const SVD_DIM_LIMIT: usize = 512;

/// Largest `mx * my` for which error metrics form the dense difference.
pub const DENSE_CAP: usize = 4_000_000;

/// Relative residual `||A^T A v - s^2 v|| / s^2` at which power iteration stops.
pub const POWER_RESIDUAL_TOL: f64 = 1e-8;

pub const POWER_MAX_ITERS: usize = 100_000;

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    if m.nrows().min(m.ncols()) <= SVD_DIM_LIMIT {
        Ok(singular_values(m).first().copied().unwrap_or(0.0))
    } else {
        spectral_norm_power(m)
    }
}

/// Power iteration on `A^T A`. Convergence is declared only once the
/// eigen-residual of the iterate is below [`POWER_RESIDUAL_TOL`]; running out
/// of iterations is an error rather than a silent estimate.
pub fn spectral_norm_power(op: &dyn LinearOperator) -> Result<f64> {
    let n = op.ncols();
    if n == 0 || op.nrows() == 0 {
        return Ok(0.0);
    }
    let mut draws = rng::stream(0x5eed, Domain::Harness, n as u64);
    let mut v = DVector::from_fn(n, |_, _| draws.sample::<f64, _>(StandardNormal));
    v /= v.norm();
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_MAX_ITERS {
        let w = op.apply(&v);
        let sigma = w.norm();
        if sigma == 0.0 {
            // A random start has a component along every right singular
            // vector, so A v = 0 means A = 0.
            return Ok(0.0);
        }
        let z = op.apply_t(&w);
        let lambda = sigma * sigma;
        residual = (&z - &v * lambda).norm() / lambda;
        if residual <= POWER_RESIDUAL_TOL {
            return Ok(sigma);
        }
        let zn = z.norm();
        v = z / zn;
    }
    Err(Error::NonConvergence {
        iterations: POWER_MAX_ITERS,
        residual,
    })
}

/// Spectral and Frobenius norms of `X Y^T - Bx By^T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmmErrors {
    pub spectral: f64,
    pub frobenius: f64,
}

fn check_shapes(x: &DMatrix<f64>, y: &DMatrix<f64>, bx: &DMatrix<f64>, by: &DMatrix<f64>) -> Result<()> {
    crate::sketch::check_len("column count of X and Y", x.ncols(), y.ncols())?;
    crate::sketch::check_len("rows of bx", x.nrows(), bx.nrows())?;
    crate::sketch::check_len("rows of by", y.nrows(), by.nrows())?;
    crate::sketch::check_len("columns of by", bx.ncols(), by.ncols())?;
    Ok(())
}

/// `||X Y^T - Bx By^T||` in spectral norm.
pub fn amm_error(x: &DMatrix<f64>, y: &DMatrix<f64>, bx: &DMatrix<f64>, by: &DMatrix<f64>) -> Result<f64> {
    check_shapes(x, y, bx, by)?;
    if x.nrows() * y.nrows() <= DENSE_CAP {
        spectral_norm(&(x * y.transpose() - bx * by.transpose()))
    } else {
        spectral_norm_power(&ProductDifference { x, y, bx, by })
    }
}

/// Precomputed exact product for scoring many sketches of the same data.
pub struct ProductOracle<'a> {
    x: &'a DMatrix<f64>,
    y: &'a DMatrix<f64>,
    dense: Option<DMatrix<f64>>,
}

impl<'a> ProductOracle<'a> {
    pub fn new(x: &'a DMatrix<f64>, y: &'a DMatrix<f64>) -> Result<Self> {
        crate::sketch::check_len("column count of X and Y", x.ncols(), y.ncols())?;
        let dense = (x.nrows() * y.nrows() <= DENSE_CAP).then(|| x * y.transpose());
        Ok(Self { x, y, dense })
    }

    /// `X Y^T` when it is small enough to hold.
    pub fn product(&self) -> Option<&DMatrix<f64>> {
        self.dense.as_ref()
    }

    pub fn errors(&self, bx: &DMatrix<f64>, by: &DMatrix<f64>) -> Result<AmmErrors> {
        check_shapes(self.x, self.y, bx, by)?;
        match &self.dense {
            Some(xy) => {
                let diff = xy - bx * by.transpose();
                Ok(AmmErrors {
                    spectral: spectral_norm(&diff)?,
                    frobenius: frobenius_sq(&diff).sqrt(),
                })
            }
            None => {
                let spectral = spectral_norm_power(&ProductDifference {
                    x: self.x,
                    y: self.y,
                    bx,
                    by,
                })?;
                Ok(AmmErrors {
                    spectral,
                    frobenius: blocked_difference_frobenius(self.x, self.y, bx, by),
                })
            }
        }
    }
}

fn blocked_difference_frobenius(x: &DMatrix<f64>, y: &DMatrix<f64>, bx: &DMatrix<f64>, by: &DMatrix<f64>) -> f64 {
    const BLOCK: usize = 64;
    let mut total = 0.0;
    let mut start = 0;
    while start < x.nrows() {
        let rows = BLOCK.min(x.nrows() - start);
        let chunk = x.rows(start, rows) * y.transpose() - bx.rows(start, rows) * by.transpose();
        total += frobenius_sq(&chunk);
        start += rows;
    }
    total.sqrt()
}

/// `||M||_F^2 / ||M||^2`, or 0 for the zero matrix.
pub fn stable_rank(m: &DMatrix<f64>) -> Result<f64> {
    let spec = spectral_norm(m)?;
    if spec == 0.0 {
        return Ok(0.0);
    }
    Ok(frobenius_sq(m) / (spec * spec))
}

/// Sum of singular values.
pub fn nuclear_norm(m: &DMatrix<f64>) -> Result<f64> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    Ok(singular_values(m).iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::generators::gaussian;

    #[test]
    fn simple_norms() {
        assert_eq!(spectral_norm(&DMatrix::zeros(3, 4)).unwrap(), 0.0);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0]));
        assert!((spectral_norm(&d).unwrap() - 3.0).abs() < 1e-15);
        assert!((nuclear_norm(&d).unwrap() - 4.0).abs() < 1e-15);
        assert_eq!(nuclear_norm(&DMatrix::zeros(2, 2)).unwrap(), 0.0);
        let d21 = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
        assert!((stable_rank(&d21).unwrap() - 1.25).abs() < 1e-15);
        assert_eq!(stable_rank(&DMatrix::zeros(2, 3)).unwrap(), 0.0);
    }

    #[test]
    fn stable_rank_extremes() {
        let r1 = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]) * DMatrix::from_row_slice(1, 4, &[1.0, -1.0, 0.5, 2.0]);
        assert!((stable_rank(&r1).unwrap() - 1.0).abs() < 1e-12);
        let q = crate::linalg::orthonormalize(gaussian(6, 6, 1, 0));
        assert!((stable_rank(&q).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_matches_svd() {
        for seed in 0..5 {
            let m = gaussian(20, 30, seed, 9);
            let exact = singular_values(&m)[0];
            let power = spectral_norm_power(&m).unwrap();
            assert!((power - exact).abs() <= 1e-9 * exact, "seed {seed}: {power} vs {exact}");
        }
        assert_eq!(spectral_norm_power(&DMatrix::<f64>::zeros(4, 5)).unwrap(), 0.0);
    }

    #[test]
    fn amm_error_zero_for_exact_sketch() {
        let x = gaussian(4, 9, 2, 0);
        let y = gaussian(5, 9, 2, 1);
        assert!(amm_error(&x, &y, &x, &y).unwrap() < 1e-12);
        assert!(amm_error(&x, &y, &x, &gaussian(5, 8, 2, 1)).is_err());
    }

    #[test]
    fn oracle_implicit_path_agrees_with_dense() {
        let x = gaussian(6, 40, 3, 0);
        let y = gaussian(7, 40, 3, 1);
        let bx = gaussian(6, 4, 3, 2);
        let by = gaussian(7, 4, 3, 3);
        let dense = ProductOracle::new(&x, &y).unwrap().errors(&bx, &by).unwrap();
        let spectral = spectral_norm_power(&ProductDifference { x: &x, y: &y, bx: &bx, by: &by }).unwrap();
        let frob = blocked_difference_frobenius(&x, &y, &bx, &by);
        assert!((dense.spectral - spectral).abs() <= 1e-9 * dense.spectral);
        assert!((dense.frobenius - frob).abs() <= 1e-12 * dense.frobenius);
    }
}
