use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{singular_values, svd, thin_qr};
use crate::sketch::check_len;

use super::metrics::amm_error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowRankApprox {
    /// `||X Y^T - (U_k U_k^T X)(V_k V_k^T Y)^T||`
    pub error: f64,
    /// `sigma_{k+1}(X Y^T)`
    pub sigma_k1: f64,
    /// `error / sigma_k1`; `None` when `sigma_k1 = 0`.
    pub ratio: Option<f64>,
}

/// Top-`k` left and right singular vectors of `bx by^T`, found from the
/// small core `Rx Ry^T` after thin QR of each sketch.
pub fn sketch_subspaces(bx: &DMatrix<f64>, by: &DMatrix<f64>, k: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_len("columns of by", bx.ncols(), by.ncols())?;
    let (qx, rx) = qr_any(bx);
    let (qy, ry) = qr_any(by);
    let core = svd(&(rx * ry.transpose()));
    if k > core.sigma.len() {
        return Err(Error::InvalidParameter(format!(
            "k={k} exceeds the rank limit {} of the sketch product",
            core.sigma.len()
        )));
    }
    Ok((qx * core.u.columns(0, k), qy * core.v.columns(0, k)))
}

// Thin QR that also accepts wide inputs (more sketch columns than rows).
fn qr_any(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    if m.nrows() >= m.ncols() {
        thin_qr(m)
    } else {
        let qr = m.clone().qr();
        (qr.q(), qr.r())
    }
}

/// Rank-`k` approximation of `X Y^T` by projecting `X` and `Y` onto the top
/// singular subspaces of the sketch product.
pub fn low_rank_product_approx(
    bx: &DMatrix<f64>,
    by: &DMatrix<f64>,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    k: usize,
) -> Result<LowRankApprox> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > bx.ncols() {
        return Err(Error::InvalidParameter(format!("k={k} exceeds ell={}", bx.ncols())));
    }
    check_len("column count of X and Y", x.ncols(), y.ncols())?;
    check_len("rows of bx", x.nrows(), bx.nrows())?;
    check_len("rows of by", y.nrows(), by.nrows())?;
    let (uk, vk) = sketch_subspaces(bx, by, k)?;
    // (Uk Uk^T X)(Vk Vk^T Y)^T = Uk (Uk^T X Y^T Vk) Vk^T
    let middle = (uk.transpose() * x) * (y.transpose() * &vk);
    let error = amm_error(x, y, &(&uk * middle), &vk)?;
    let sigma_k1 = singular_values(&(x * y.transpose())).get(k).copied().unwrap_or(0.0);
    let ratio = (sigma_k1 > 0.0).then(|| error / sigma_k1);
    Ok(LowRankApprox { error, sigma_k1, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::generators::{gaussian, gen_low_rank, LowRankModelSpec};

    #[test]
    fn exact_sketch_of_low_rank_product() {
        let spec = LowRankModelSpec::noise_free(40, 8, 9, 2, 2, 5);
        let (x, y) = gen_low_rank(&spec).unwrap();
        let out = low_rank_product_approx(&x, &y, &x, &y, 2).unwrap();
        let scale = singular_values(&(&x * y.transpose()))[0];
        assert!(out.error <= 1e-10 * scale);
        assert!(out.sigma_k1 <= 1e-10 * scale);
    }

    #[test]
    fn exact_sketch_attains_best_rank_k() {
        let x = gaussian(6, 30, 1, 0);
        let y = gaussian(7, 30, 1, 1);
        for k in 1..=4 {
            let out = low_rank_product_approx(&x, &y, &x, &y, k).unwrap();
            let ratio = out.ratio.unwrap();
            assert!((ratio - 1.0).abs() < 1e-9, "k={k}: {ratio}");
        }
    }

    #[test]
    fn rejects_bad_k() {
        let x = gaussian(6, 10, 1, 0);
        let y = gaussian(7, 10, 1, 1);
        let bx = gaussian(6, 4, 1, 2);
        let by = gaussian(7, 4, 1, 3);
        assert!(low_rank_product_approx(&bx, &by, &x, &y, 0).is_err());
        assert!(low_rank_product_approx(&bx, &by, &x, &y, 5).is_err());
        assert!(low_rank_product_approx(&bx, &by, &x, &y, 4).is_ok());
    }

    #[test]
    fn zero_sigma_gives_no_ratio() {
        let x = DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, 0.0]);
        let out = low_rank_product_approx(&x, &x, &x, &x, 1).unwrap();
        assert!(out.ratio.is_none());
        assert!(out.error < 1e-12);
    }
}
