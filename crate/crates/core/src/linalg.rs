//! Dense linear-algebra helpers shared by the sketches and the evaluation code.
//!
//! All decompositions go through `nalgebra`; this module pins down the
//! conventions the rest of the crate relies on: singular values sorted in
//! descending order and a deterministic sign for every singular pair.

use nalgebra::{DMatrix, DVector};

/// Thin SVD `m = u * diag(sigma) * v^T` with `sigma` sorted descending.
///
/// Each left singular vector is oriented so that its largest-magnitude entry
/// is nonnegative; the matching right vector is flipped with it.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub fn svd(m: &DMatrix<f64>) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            u: DMatrix::zeros(rows, 0),
            sigma: Vec::new(),
            v: DMatrix::zeros(cols, 0),
        };
    }
    let dec = m.clone().svd(true, true);
    let u = dec.u.expect("u requested");
    let v_t = dec.v_t.expect("v_t requested");
    let values = dec.singular_values;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut out_u = DMatrix::zeros(rows, k);
    let mut out_v = DMatrix::zeros(cols, k);
    let mut sigma = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let ucol = u.column(src);
        let pivot = ucol
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        out_u.set_column(dst, &(ucol * sign));
        out_v.set_column(dst, &(v_t.row(src).transpose() * sign));
        sigma.push(values[src].max(0.0));
    }
    Svd {
        u: out_u,
        sigma,
        v: out_v,
    }
}

/// Singular values only, sorted descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().map(|v| v.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Economy QR of a tall matrix: `q` is `rows x cols` with orthonormal
/// columns, `r` is `cols x cols` upper triangular.
pub fn thin_qr(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    debug_assert!(m.nrows() >= m.ncols(), "thin QR expects a tall matrix");
    let qr = m.clone().qr();
    (qr.q(), qr.r())
}

/// Orthonormal basis for the column space of a tall matrix.
pub fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

pub fn frobenius_sq(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}

pub fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

/// A real linear map given only through products with vectors.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `A v`
    fn apply(&self, v: &DVector<f64>) -> DVector<f64>;
    /// `A^T u`
    fn apply_t(&self, u: &DVector<f64>) -> DVector<f64>;
}

impl LinearOperator for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }
    fn ncols(&self) -> usize {
        self.ncols()
    }
    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        self * v
    }
    fn apply_t(&self, u: &DVector<f64>) -> DVector<f64> {
        self.tr_mul(u)
    }
}

/// The difference `X Y^T - Bx By^T`, applied without forming either product.
pub struct ProductDifference<'a> {
    pub x: &'a DMatrix<f64>,
    pub y: &'a DMatrix<f64>,
    pub bx: &'a DMatrix<f64>,
    pub by: &'a DMatrix<f64>,
}

impl LinearOperator for ProductDifference<'_> {
    fn nrows(&self) -> usize {
        self.x.nrows()
    }
    fn ncols(&self) -> usize {
        self.y.nrows()
    }
    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        self.x * self.y.tr_mul(v) - self.bx * self.by.tr_mul(v)
    }
    fn apply_t(&self, u: &DVector<f64>) -> DVector<f64> {
        self.y * self.x.tr_mul(u) - self.by * self.bx.tr_mul(u)
    }
}
