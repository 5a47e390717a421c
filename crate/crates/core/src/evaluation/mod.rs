//! Synthetic data, error metrics and bound calculators.

mod bounds;
pub mod generators;
mod lowrank;
pub mod metrics;

pub use bounds::{theoretical_bounds, BoundsReport};
pub use generators::{gen_low_rank, gen_shared_factor, LowRankModelSpec};
pub use lowrank::{low_rank_product_approx, sketch_subspaces, LowRankApprox};
pub use metrics::{amm_error, nuclear_norm, spectral_norm, stable_rank, AmmErrors, ProductOracle};

use std::fmt;

/// One scored sketch.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub method: String,
    pub ell: usize,
    pub spectral_error: f64,
    pub bound_used: Option<f64>,
    pub wall_time_s: f64,
    pub seed: Option<u64>,
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "method={} ell={} spectral_error={:.6e}", self.method, self.ell, self.spectral_error)?;
        match self.bound_used {
            Some(b) => write!(f, " bound={b:.6e} within_bound={}", self.spectral_error <= b)?,
            None => f.write_str(" bound=-")?,
        }
        write!(f, " wall_time_s={:.6}", self.wall_time_s)?;
        match self.seed {
            Some(s) => write!(f, " seed={s}"),
            None => f.write_str(" seed=-"),
        }
    }
}
