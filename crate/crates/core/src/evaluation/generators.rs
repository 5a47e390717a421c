//! Synthetic paired data.
//!
//! The low-rank model builds `X = Vx Sx Ux^T (+ Nx / zeta_x)` with Gaussian
//! `Ux` (`n x kx`), a linearly decaying diagonal `Sx` with entries
//! `1 - (j-1)/kx`, and `Vx` (`mx x kx`) with orthonormal columns obtained from
//! the QR factor of a Gaussian matrix. `Y` is built the same way from
//! independent draws.
//!
//! Each random block comes from its own counter stream under `spec.seed`,
//! so a given `(spec, seed)` always yields bitwise identical matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::orthonormalize;
use crate::rng::{self, Domain};

#[derive(Clone, Debug, PartialEq)]
pub struct LowRankModelSpec {
    pub n: usize,
    pub mx: usize,
    pub my: usize,
    pub kx: usize,
    pub ky: usize,
    /// Noise divisor for `X`; `None` means noise-free.
    pub zeta_x: Option<f64>,
    pub zeta_y: Option<f64>,
    pub seed: u64,
}

impl LowRankModelSpec {
    pub fn noise_free(n: usize, mx: usize, my: usize, kx: usize, ky: usize, seed: u64) -> Self {
        Self {
            n,
            mx,
            my,
            kx,
            ky,
            zeta_x: None,
            zeta_y: None,
            seed,
        }
    }

    pub fn with_noise(mut self, zeta_x: f64, zeta_y: f64) -> Self {
        self.zeta_x = Some(zeta_x);
        self.zeta_y = Some(zeta_y);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n", self.n), ("mx", self.mx), ("my", self.my), ("kx", self.kx), ("ky", self.ky)] {
            if v == 0 {
                return Err(Error::ZeroDimension(name));
            }
        }
        if self.kx > self.mx.min(self.n) {
            return Err(Error::InvalidParameter(format!(
                "kx={} exceeds min(mx, n)={}",
                self.kx,
                self.mx.min(self.n)
            )));
        }
        if self.ky > self.my.min(self.n) {
            return Err(Error::InvalidParameter(format!(
                "ky={} exceeds min(my, n)={}",
                self.ky,
                self.my.min(self.n)
            )));
        }
        for zeta in [self.zeta_x, self.zeta_y].into_iter().flatten() {
            if !(zeta.is_finite() && zeta > 0.0) {
                return Err(Error::InvalidParameter(format!("noise divisor must be positive, got {zeta}")));
            }
        }
        Ok(())
    }
}

// Stream ids for the independent random blocks.
const BLOCK_UX: u64 = 0;
const BLOCK_VX: u64 = 1;
const BLOCK_NX: u64 = 2;
const BLOCK_UY: u64 = 3;
const BLOCK_VY: u64 = 4;
const BLOCK_NY: u64 = 5;
const BLOCK_SHARED_U: u64 = 6;

/// Standard Gaussian matrix from one counter stream.
pub fn gaussian(rows: usize, cols: usize, seed: u64, block: u64) -> DMatrix<f64> {
    let mut draws = rng::stream(seed, Domain::Generator, block);
    DMatrix::from_fn(rows, cols, |_, _| draws.sample::<f64, _>(StandardNormal))
}

fn low_rank_factor(m: usize, k: usize, n: usize, seed: u64, v_block: u64, u_block: u64) -> DMatrix<f64> {
    let mut v = orthonormalize(gaussian(m, k, seed, v_block));
    for j in 0..k {
        let s = 1.0 - j as f64 / k as f64;
        v.column_mut(j).scale_mut(s);
    }
    let u = gaussian(n, k, seed, u_block);
    v * u.transpose()
}

/// Generates `(X, Y)` as described by `spec`.
pub fn gen_low_rank(spec: &LowRankModelSpec) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    spec.validate()?;
    let mut x = low_rank_factor(spec.mx, spec.kx, spec.n, spec.seed, BLOCK_VX, BLOCK_UX);
    let mut y = low_rank_factor(spec.my, spec.ky, spec.n, spec.seed, BLOCK_VY, BLOCK_UY);
    if let Some(zeta) = spec.zeta_x {
        x += gaussian(spec.mx, spec.n, spec.seed, BLOCK_NX) / zeta;
    }
    if let Some(zeta) = spec.zeta_y {
        y += gaussian(spec.my, spec.n, spec.seed, BLOCK_NY) / zeta;
    }
    Ok((x, y))
}

/// Paired model with a common latent factor: `X = Vx U^T`, `Y = Vy U^T` where
/// `U` is `n x rank` Gaussian and `Vx`, `Vy` have orthonormal columns. The
/// two views are strongly correlated and `X Y^T` has rank `rank` with a
/// nearly flat spectrum, which keeps the spectral ratios that govern
/// low-rank product guarantees close to their minimum.
pub fn gen_shared_factor(n: usize, mx: usize, my: usize, rank: usize, seed: u64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    LowRankModelSpec::noise_free(n, mx, my, rank, rank, seed).validate()?;
    let u = gaussian(n, rank, seed, BLOCK_SHARED_U);
    let vx = orthonormalize(gaussian(mx, rank, seed, BLOCK_VX));
    let vy = orthonormalize(gaussian(my, rank, seed, BLOCK_VY));
    Ok((&vx * u.transpose(), &vy * u.transpose()))
}
