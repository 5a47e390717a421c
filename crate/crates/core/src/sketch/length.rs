use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which guarantee a sketch length is chosen for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthMode {
    /// error <= 2 eps ||X||_F ||Y||_F
    Frobenius,
    /// error <= eps ||X|| ||Y||
    Spectral,
    /// rank-k projection within (1 + eps) of the best rank-k error
    LowRank,
}

impl FromStr for LengthMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frobenius" => Ok(Self::Frobenius),
            "spectral" => Ok(Self::Spectral),
            "lowrank" => Ok(Self::LowRank),
            other => Err(Error::InvalidParameter(format!("unknown length mode `{other}`"))),
        }
    }
}

impl fmt::Display for LengthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Frobenius => "frobenius",
            Self::Spectral => "spectral",
            Self::LowRank => "lowrank",
        })
    }
}

/// Spectral summaries of the inputs needed by the data-dependent modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixStats {
    pub sr_x: f64,
    pub sr_y: f64,
    pub norm_x: f64,
    pub norm_y: f64,
    /// sigma_{k+1}(X Y^T)
    pub sigma_k1: f64,
}

/// Smallest even sketch length meeting the requested guarantee.
pub fn sketch_length_for(epsilon: f64, mode: LengthMode, stats: Option<&MatrixStats>) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let raw = match mode {
        LengthMode::Frobenius => 1.0 / epsilon,
        LengthMode::Spectral => {
            let s = stats.ok_or(Error::MissingStats("spectral"))?;
            2.0 * (s.sr_x * s.sr_y).sqrt() / epsilon
        }
        LengthMode::LowRank => {
            let s = stats.ok_or(Error::MissingStats("lowrank"))?;
            if s.sigma_k1 <= 0.0 {
                return Err(Error::InvalidParameter(
                    "sigma_{k+1}(X Y^T) must be positive for the low-rank length".into(),
                ));
            }
            8.0 * (s.sr_x * s.sr_y).sqrt() / epsilon * s.norm_x * s.norm_y / s.sigma_k1
        }
    };
    if !raw.is_finite() {
        return Err(Error::InvalidParameter(format!("sketch length is not finite ({raw})")));
    }
    Ok(round_up_even(raw))
}

/// ceil, then up to the next even integer (minimum 2). Quotients that land a
/// few ulps above an integer are treated as that integer.
pub(crate) fn round_up_even(raw: f64) -> usize {
    let ceil = (raw * (1.0 - 4.0 * f64::EPSILON)).ceil().max(2.0) as usize;
    ceil + ceil % 2
}
