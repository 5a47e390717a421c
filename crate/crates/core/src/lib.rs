//! Streaming approximate matrix multiplication.
//!
//! Given paired columns `(x_i, y_i)` arriving one at a time, the sketches in
//! this crate keep two small matrices `bx`, `by` with `bx by^T ~ X Y^T`.
//!
//! * [`sketch`] holds the deterministic co-occurring directions and frequent
//!   directions sketches.
//! * [`baselines`] holds the comparison methods behind one trait.
//! * [`evaluation`] generates data, scores sketches and computes bounds.
//! * [`io`] reads and writes paired-column streams and sketch snapshots.
//!
//! ```
//! use codsketch::evaluation::{amm_error, gen_low_rank, LowRankModelSpec};
//! use codsketch::sketch::{CoOccurringSketch, SketchConfig};
//!
//! let (x, y) = gen_low_rank(&LowRankModelSpec::noise_free(200, 20, 30, 5, 5, 1)).unwrap();
//! let mut sk = CoOccurringSketch::new(SketchConfig::new(8, 20, 30).unwrap());
//! for j in 0..200 {
//!     sk.update_slices(x.column(j).as_slice(), y.column(j).as_slice()).unwrap();
//! }
//! let (bx, by) = sk.result();
//! assert!(amm_error(&x, &y, &bx, &by).unwrap() <= sk.error_bound());
//! ```

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod sketch;
pub mod verify;

pub use error::{Error, FormatError, Result};
