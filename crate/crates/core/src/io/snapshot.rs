use std::path::Path;

use nalgebra::DMatrix;

use super::io_err;
use crate::baselines::Method;
use crate::error::{Error, FormatError, Result};
use crate::sketch::{CoOccurringSketch, SketchConfig};

pub const SNAPSHOT_MAGIC: [u8; 7] = *b"CODSNAP";
pub const SNAPSHOT_VERSION: u8 = 1;

// magic, version, method, five u64 counts, two f64 accumulators, seed flag + value, log length
const FIXED_LEN: usize = 7 + 1 + 1 + 5 * 8 + 2 * 8 + 1 + 8 + 8;

/// Serialized sketch state.
///
/// Layout (little-endian): `CODSNAP`, version byte, method byte, then `ell`,
/// `mx`, `my`, `fill`, `columns_seen` as `u64`, `frob_x_sq`, `frob_y_sq` as
/// `f64`, a seed flag byte and `u64` seed, the shrink log length and values,
/// and finally `bx` and `by` in column-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchSnapshot {
    pub method: Method,
    pub ell: usize,
    pub mx: usize,
    pub my: usize,
    pub fill: usize,
    pub columns_seen: u64,
    pub frob_x_sq: f64,
    pub frob_y_sq: f64,
    pub seed: Option<u64>,
    pub delta_log: Vec<f64>,
    pub bx: DMatrix<f64>,
    pub by: DMatrix<f64>,
}

impl SketchSnapshot {
    pub fn from_cod(sketch: &CoOccurringSketch) -> Self {
        let c = sketch.config();
        Self {
            method: Method::Cod,
            ell: c.ell(),
            mx: c.mx(),
            my: c.my(),
            fill: sketch.fill(),
            columns_seen: sketch.columns_seen(),
            frob_x_sq: sketch.frob_x_sq(),
            frob_y_sq: sketch.frob_y_sq(),
            seed: None,
            delta_log: sketch.delta_log().to_vec(),
            bx: sketch.bx().clone(),
            by: sketch.by().clone(),
        }
    }

    /// Snapshot of a finished sketch from any method. Every column counts as
    /// occupied and there is no shrink log.
    pub fn from_sketches(
        method: Method,
        seed: Option<u64>,
        bx: DMatrix<f64>,
        by: DMatrix<f64>,
        columns_seen: u64,
        frob_x_sq: f64,
        frob_y_sq: f64,
    ) -> Result<Self> {
        crate::sketch::check_len("columns of by", bx.ncols(), by.ncols())?;
        Ok(Self {
            method,
            ell: bx.ncols(),
            mx: bx.nrows(),
            my: by.nrows(),
            fill: bx.ncols(),
            columns_seen,
            frob_x_sq,
            frob_y_sq,
            seed,
            delta_log: Vec::new(),
            bx,
            by,
        })
    }

    pub fn into_cod(self) -> Result<CoOccurringSketch> {
        if self.method != Method::Cod {
            return Err(Error::ConfigMismatch(format!(
                "snapshot holds a `{}` sketch, not `cod`",
                self.method
            )));
        }
        CoOccurringSketch::from_parts(
            SketchConfig::new(self.ell, self.mx, self.my)?,
            self.bx,
            self.by,
            self.fill,
            self.delta_log,
            self.columns_seen,
            self.frob_x_sq,
            self.frob_y_sq,
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FIXED_LEN + 8 * (self.delta_log.len() + self.bx.len() + self.by.len()));
        out.extend_from_slice(&SNAPSHOT_MAGIC);
        out.push(SNAPSHOT_VERSION);
        out.push(self.method.code());
        for v in [self.ell as u64, self.mx as u64, self.my as u64, self.fill as u64, self.columns_seen] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.frob_x_sq.to_le_bytes());
        out.extend_from_slice(&self.frob_y_sq.to_le_bytes());
        out.push(self.seed.is_some() as u8);
        out.extend_from_slice(&self.seed.unwrap_or(0).to_le_bytes());
        out.extend_from_slice(&(self.delta_log.len() as u64).to_le_bytes());
        for v in self.delta_log.iter().chain(self.bx.iter()).chain(self.by.iter()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut cur = Cursor { bytes, pos: 0 };
        let magic = cur.take(7)?;
        if magic != SNAPSHOT_MAGIC {
            return Err(FormatError::BadMagic {
                expected: String::from_utf8_lossy(&SNAPSHOT_MAGIC).into_owned(),
                found: String::from_utf8_lossy(magic).into_owned(),
            });
        }
        let version = cur.u8()?;
        if version != SNAPSHOT_VERSION {
            return Err(FormatError::Version {
                found: version,
                expected: SNAPSHOT_VERSION,
            });
        }
        let method_at = cur.pos as u64;
        let method = Method::from_code(cur.u8()?).ok_or_else(|| FormatError::Corrupt {
            offset: method_at,
            reason: "unknown method code".into(),
        })?;
        let dims_at = cur.pos as u64;
        let ell = cur.usize()?;
        let mx = cur.usize()?;
        let my = cur.usize()?;
        let fill = cur.usize()?;
        let columns_seen = cur.u64()?;
        let frob_x_sq = cur.f64()?;
        let frob_y_sq = cur.f64()?;
        let flag_at = cur.pos as u64;
        let seed = match (cur.u8()?, cur.u64()?) {
            (0, _) => None,
            (1, s) => Some(s),
            (f, _) => {
                return Err(FormatError::Corrupt {
                    offset: flag_at,
                    reason: format!("bad seed flag {f}"),
                })
            }
        };
        let log_len = cur.usize()?;

        // Check the declared sizes against the actual payload before allocating.
        let payload = mx
            .checked_mul(ell)
            .and_then(|a| my.checked_mul(ell).and_then(|b| a.checked_add(b)))
            .and_then(|m| m.checked_add(log_len))
            .and_then(|v| v.checked_mul(8));
        match payload {
            Some(p) if p == bytes.len() - cur.pos => {}
            Some(p) if p > bytes.len() - cur.pos => {
                return Err(FormatError::Corrupt {
                    offset: bytes.len() as u64,
                    reason: format!("payload truncated: need {p} bytes after offset {}", cur.pos),
                })
            }
            Some(p) => {
                return Err(FormatError::Corrupt {
                    offset: (cur.pos + p) as u64,
                    reason: "trailing bytes after payload".into(),
                })
            }
            None => {
                return Err(FormatError::Corrupt {
                    offset: dims_at,
                    reason: "declared sizes overflow".into(),
                })
            }
        }
        if fill > ell {
            return Err(FormatError::Corrupt {
                offset: dims_at + 24,
                reason: format!("fill {fill} exceeds ell {ell}"),
            });
        }
        let delta_log = cur.f64s(log_len)?;
        let bx = DMatrix::from_vec(mx, ell, cur.f64s(mx * ell)?);
        let by = DMatrix::from_vec(my, ell, cur.f64s(my * ell)?);
        Ok(Self {
            method,
            ell,
            mx,
            my,
            fill,
            columns_seen,
            frob_x_sq,
            frob_y_sq,
            seed,
            delta_log,
            bx,
            by,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(io_err(path))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(io_err(path))?;
        Ok(Self::from_bytes(&bytes)?)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], FormatError> {
        if self.bytes.len() - self.pos < k {
            return Err(FormatError::Corrupt {
                offset: self.bytes.len() as u64,
                reason: format!("truncated: needed {k} bytes at offset {}", self.pos),
            });
        }
        let out = &self.bytes[self.pos..self.pos + k];
        self.pos += k;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn usize(&mut self) -> Result<usize, FormatError> {
        let at = self.pos as u64;
        usize::try_from(self.u64()?).map_err(|_| FormatError::Corrupt {
            offset: at,
            reason: "count does not fit in memory".into(),
        })
    }

    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn f64s(&mut self, k: usize) -> Result<Vec<f64>, FormatError> {
        Ok(self
            .take(8 * k)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}
