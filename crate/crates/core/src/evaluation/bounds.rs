use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, singular_values};
use crate::sketch::{check_len, MatrixStats};

/// Guarantees for one `(X, Y, ell, k)`, computed from exact SVDs.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub ell: usize,
    pub k: usize,
    /// `2 ||X||_F ||Y||_F / ell`
    pub thm2_bound: f64,
    /// `2 ||X||_F^2 / ell`
    pub fd_bound: f64,
    /// `(||X||_F^2 + ||Y||_F^2) / ell`
    pub fdamm_bound: f64,
    /// `||Z - Z_k||_F^2` for `Z = [X; Y]`
    pub z_tail_sq: f64,
    pub frob_x_sq: f64,
    pub frob_y_sq: f64,
    pub stats: MatrixStats,
}

impl BoundsReport {
    /// `2 ||Z - Z_k||_F^2 / (ell - 2k)`, defined only for `ell > 2k`.
    pub fn improved_fd_bound(&self) -> Result<f64> {
        if self.ell <= 2 * self.k {
            return Err(Error::InvalidParameter(format!(
                "improved bound needs ell > 2k (ell={}, k={})",
                self.ell, self.k
            )));
        }
        Ok(2.0 * self.z_tail_sq / (self.ell - 2 * self.k) as f64)
    }

    /// Smallest real `ell` for which the low-rank projection guarantee
    /// applies at accuracy `eps`; `None` when `sigma_{k+1}(X Y^T) = 0`.
    pub fn thm3_threshold(&self, eps: f64) -> Result<Option<f64>> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::EpsilonOutOfRange(eps));
        }
        let s = &self.stats;
        if s.sigma_k1 <= 0.0 {
            return Ok(None);
        }
        Ok(Some(8.0 * (s.sr_x * s.sr_y).sqrt() / eps * s.norm_x * s.norm_y / s.sigma_k1))
    }
}

pub fn theoretical_bounds(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize, k: usize) -> Result<BoundsReport> {
    check_len("column count of X and Y", x.ncols(), y.ncols())?;
    if ell == 0 {
        return Err(Error::EllTooSmall { ell, min: 1 });
    }
    let frob_x_sq = frobenius_sq(x);
    let frob_y_sq = frobenius_sq(y);
    let norm_x = singular_values(x).first().copied().unwrap_or(0.0);
    let norm_y = singular_values(y).first().copied().unwrap_or(0.0);
    let sr = |f: f64, s: f64| if s == 0.0 { 0.0 } else { f / (s * s) };

    let mut z = DMatrix::zeros(x.nrows() + y.nrows(), x.ncols());
    z.rows_mut(0, x.nrows()).copy_from(x);
    z.rows_mut(x.nrows(), y.nrows()).copy_from(y);
    let z_tail_sq = singular_values(&z).iter().skip(k).map(|s| s * s).sum();

    let sigma_k1 = singular_values(&(x * y.transpose())).get(k).copied().unwrap_or(0.0);
    let l = ell as f64;
    Ok(BoundsReport {
        ell,
        k,
        thm2_bound: 2.0 * (frob_x_sq * frob_y_sq).sqrt() / l,
        fd_bound: 2.0 * frob_x_sq / l,
        fdamm_bound: (frob_x_sq + frob_y_sq) / l,
        z_tail_sq,
        frob_x_sq,
        frob_y_sq,
        stats: MatrixStats {
            sr_x: sr(frob_x_sq, norm_x),
            sr_y: sr(frob_y_sq, norm_y),
            norm_x,
            norm_y,
            sigma_k1,
        },
    })
}
