//! Importance sampling of column pairs with probability proportional to
//! `||x_i|| ||y_i||`, in one pass.
//!
//! Each of the `ell` slots is an independent single-item weighted reservoir
//! using exponential keys: column `i` draws `k = -ln(u) / w_i` and replaces
//! the slot when `k` is smaller than the current key. The minimum of
//! independent exponentials with rates `w_i` lands on `i` with probability
//! `w_i / S`, so each slot is an i.i.d. draw from the target distribution and
//! slots may pick the same column.
//!
//! Sampled columns are rescaled by `1 / sqrt(ell * p_i)` with `p_i = w_i / S`
//! computed from the final total `S`, which makes `bx by^T` unbiased.

use nalgebra::DMatrix;
use rand::Rng;

use super::AmmSketcher;
use crate::error::{Error, Result};
use crate::linalg::norm_sq;
use crate::rng::{self, Domain};
use crate::sketch::{check_len, ColumnPair};

#[derive(Clone, Debug)]
struct Slot {
    key: f64,
    weight: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SamplingState {
    ell: usize,
    mx: usize,
    my: usize,
    seed: u64,
    slots: Vec<Option<Slot>>,
    total_weight: f64,
    columns_seen: u64,
    rescale: bool,
}

impl SamplingState {
    pub fn new(ell: usize, mx: usize, my: usize, seed: u64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::EllTooSmall { ell, min: 1 });
        }
        if mx == 0 || my == 0 {
            return Err(Error::ZeroDimension(if mx == 0 { "mx" } else { "my" }));
        }
        Ok(Self {
            ell,
            mx,
            my,
            seed,
            slots: vec![None; ell],
            total_weight: 0.0,
            columns_seen: 0,
            rescale: true,
        })
    }

    /// Returns sampled columns as they are, without the `1/sqrt(ell p_i)`
    /// factor. The result is biased; kept for comparison runs.
    pub fn unscaled(mut self) -> Self {
        self.rescale = false;
        self
    }

    /// `S = sum ||x_i|| ||y_i||` over the stream so far.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// True when every column seen had zero weight, so nothing could be
    /// sampled and the sketches are zero.
    pub fn is_degenerate(&self) -> bool {
        self.total_weight == 0.0
    }

    /// Number of slots holding a sample.
    pub fn filled_slots(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }
}

impl AmmSketcher for SamplingState {
    fn update(&mut self, pair: &ColumnPair) -> Result<()> {
        check_len("x", self.mx, pair.x().len())?;
        check_len("y", self.my, pair.y().len())?;
        let index = self.columns_seen;
        self.columns_seen += 1;
        let weight = norm_sq(pair.x()).sqrt() * norm_sq(pair.y()).sqrt();
        if weight == 0.0 {
            return Ok(());
        }
        self.total_weight += weight;
        let mut draws = rng::stream(self.seed, Domain::Sampling, index);
        for slot in self.slots.iter_mut() {
            // 1 - u lies in (0, 1], so the log is finite.
            let u: f64 = draws.random();
            let key = -(1.0 - u).ln() / weight;
            let replace = match slot {
                Some(s) => key < s.key,
                None => true,
            };
            if replace {
                *slot = Some(Slot {
                    key,
                    weight,
                    x: pair.x().to_vec(),
                    y: pair.y().to_vec(),
                });
            }
        }
        Ok(())
    }

    fn sketches(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut bx = DMatrix::zeros(self.mx, self.ell);
        let mut by = DMatrix::zeros(self.my, self.ell);
        if self.is_degenerate() {
            return (bx, by);
        }
        for (j, slot) in self.slots.iter().enumerate() {
            let Some(s) = slot else { continue };
            let scale = if self.rescale {
                let p = s.weight / self.total_weight;
                1.0 / (self.ell as f64 * p).sqrt()
            } else {
                1.0
            };
            for (dst, v) in bx.column_mut(j).iter_mut().zip(&s.x) {
                *dst = v * scale;
            }
            for (dst, v) in by.column_mut(j).iter_mut().zip(&s.y) {
                *dst = v * scale;
            }
        }
        (bx, by)
    }
}

pub fn sampling_amm(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize, seed: u64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    super::Method::Sampling.run(x, y, ell, seed)
}
