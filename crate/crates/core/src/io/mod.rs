//! On-disk formats.
//!
//! Streams are a 32-byte header followed by interleaved little-endian `f64`
//! records, one per column pair (`mx` values of `x_i`, then `my` of `y_i`).
//! Snapshots hold a finished or in-progress sketch so that sketches built on
//! different machines can be merged later.

mod csv_import;
mod snapshot;
mod stream;

pub use csv_import::{csv_to_stream, read_csv_pair};
pub use snapshot::{SketchSnapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use stream::{write_stream, StreamHeader, StreamReader, StreamWriter, HEADER_LEN, OPEN_ENDED, STREAM_MAGIC};

use std::path::Path;

use crate::error::FormatError;

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FormatError + '_ {
    move |source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    }
}
