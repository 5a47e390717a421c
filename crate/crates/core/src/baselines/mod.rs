//! Comparison methods for streaming approximate matrix multiplication.
//!
//! Every method consumes the same [`ColumnPair`] stream and produces a pair of
//! sketches `(bx, by)` whose product estimates `X Y^T`. The deterministic
//! co-occurring directions sketch implements the same trait so callers can
//! treat all methods uniformly.

mod brute;
mod fd_amm;
mod hashing;
mod projection;
mod sampling;

pub use brute::{brute_force_amm, BruteForceState};
pub use fd_amm::{fd_amm, FdAmmState};
pub use hashing::{hashing_amm, HashingState};
pub use projection::{projection_amm, ProjectionState};
pub use sampling::{sampling_amm, SamplingState};

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sketch::{column_pairs, CoOccurringSketch, ColumnPair, SketchConfig};

/// A streaming AMM method.
pub trait AmmSketcher: Send {
    fn update(&mut self, pair: &ColumnPair) -> Result<()>;
    /// Current `(bx, by)`.
    fn sketches(&self) -> (DMatrix<f64>, DMatrix<f64>);
}

impl AmmSketcher for CoOccurringSketch {
    fn update(&mut self, pair: &ColumnPair) -> Result<()> {
        CoOccurringSketch::update(self, pair).map(|_| ())
    }
    fn sketches(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        self.result()
    }
}

/// Knobs that only some methods read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Skip the `1/sqrt(ell p_i)` rescaling of sampled columns.
    pub unscaled_sampling: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Cod,
    FdAmm,
    Brute,
    Sampling,
    Projection,
    Hashing,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Cod,
        Method::FdAmm,
        Method::Brute,
        Method::Sampling,
        Method::Projection,
        Method::Hashing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cod => "cod",
            Method::FdAmm => "fd-amm",
            Method::Brute => "brute",
            Method::Sampling => "sampling",
            Method::Projection => "projection",
            Method::Hashing => "hashing",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Method::Sampling | Method::Projection | Method::Hashing)
    }

    pub fn code(self) -> u8 {
        match self {
            Method::Cod => 1,
            Method::FdAmm => 2,
            Method::Brute => 3,
            Method::Sampling => 4,
            Method::Projection => 5,
            Method::Hashing => 6,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Method::ALL.into_iter().find(|m| m.code() == code)
    }

    /// Checks `ell` against the method's own limits.
    pub fn validate_ell(self, ell: usize, mx: usize, my: usize) -> Result<()> {
        match self {
            Method::Cod => SketchConfig::new(ell, mx, my).map(|_| ()),
            Method::FdAmm => crate::sketch::FrequentDirectionsSketch::new(ell, mx + my).map(|_| ()),
            Method::Brute => brute::validate(ell, mx, my),
            Method::Sampling | Method::Projection | Method::Hashing => {
                if ell == 0 {
                    Err(Error::EllTooSmall { ell, min: 1 })
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Fresh streaming state for this method. `seed` is ignored by the
    /// deterministic methods.
    pub fn build(self, ell: usize, mx: usize, my: usize, seed: u64) -> Result<Box<dyn AmmSketcher>> {
        self.build_with(ell, mx, my, seed, BuildOptions::default())
    }

    pub fn build_with(
        self,
        ell: usize,
        mx: usize,
        my: usize,
        seed: u64,
        options: BuildOptions,
    ) -> Result<Box<dyn AmmSketcher>> {
        Ok(match self {
            Method::Cod => Box::new(CoOccurringSketch::new(SketchConfig::new(ell, mx, my)?)),
            Method::FdAmm => Box::new(FdAmmState::new(ell, mx, my)?),
            Method::Brute => Box::new(BruteForceState::new(ell, mx, my)?),
            Method::Sampling if options.unscaled_sampling => {
                Box::new(SamplingState::new(ell, mx, my, seed)?.unscaled())
            }
            Method::Sampling => Box::new(SamplingState::new(ell, mx, my, seed)?),
            Method::Projection => Box::new(ProjectionState::new(ell, mx, my, seed)?),
            Method::Hashing => Box::new(HashingState::new(ell, mx, my, seed)?),
        })
    }

    /// Sketches the columns of in-memory matrices.
    pub fn run(self, x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize, seed: u64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let mut state = self.build(ell, x.nrows(), y.nrows(), seed)?;
        feed(state.as_mut(), x, y)?;
        Ok(state.sketches())
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

pub(crate) fn feed(state: &mut dyn AmmSketcher, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<()> {
    crate::sketch::check_len("column count", x.ncols(), y.ncols())?;
    for pair in column_pairs(x, y) {
        state.update(&pair?)?;
    }
    Ok(())
}
