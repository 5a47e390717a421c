use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Seek, SeekFrom, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::io_err;
use crate::error::{Error, FormatError, Result};
use crate::sketch::{check_len, ColumnPair};

/// The last byte doubles as the element type tag: `b'1'` is `f64` LE.
pub const STREAM_MAGIC: [u8; 8] = *b"CODSTRM1";
pub const HEADER_LEN: u64 = 32;
/// `n` value marking a stream whose length was unknown when it was written.
pub const OPEN_ENDED: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamHeader {
    pub mx: u64,
    pub my: u64,
    pub n: u64,
}

impl StreamHeader {
    pub fn is_open_ended(&self) -> bool {
        self.n == OPEN_ENDED
    }

    /// Bytes per record.
    pub fn record_len(&self) -> u64 {
        (self.mx + self.my) * 8
    }

    fn encode(&self) -> [u8; HEADER_LEN as usize] {
        let mut out = [0u8; HEADER_LEN as usize];
        out[..8].copy_from_slice(&STREAM_MAGIC);
        out[8..16].copy_from_slice(&self.mx.to_le_bytes());
        out[16..24].copy_from_slice(&self.my.to_le_bytes());
        out[24..32].copy_from_slice(&self.n.to_le_bytes());
        out
    }

    fn decode(buf: &[u8; HEADER_LEN as usize]) -> Result<Self, FormatError> {
        if buf[..7] != STREAM_MAGIC[..7] {
            return Err(FormatError::BadMagic {
                expected: String::from_utf8_lossy(&STREAM_MAGIC).into_owned(),
                found: String::from_utf8_lossy(&buf[..8]).into_owned(),
            });
        }
        if buf[7] != STREAM_MAGIC[7] {
            return Err(FormatError::UnsupportedDtype(buf[7]));
        }
        let word = |i: usize| u64::from_le_bytes(buf[i..i + 8].try_into().expect("8 bytes"));
        let header = Self {
            mx: word(8),
            my: word(16),
            n: word(24),
        };
        if header.mx == 0 || header.my == 0 {
            return Err(FormatError::Corrupt {
                offset: 8,
                reason: format!("zero row dimension (mx={}, my={})", header.mx, header.my),
            });
        }
        if header.mx.checked_add(header.my).and_then(|s| s.checked_mul(8)).is_none() {
            return Err(FormatError::Corrupt {
                offset: 8,
                reason: "row dimensions overflow".into(),
            });
        }
        Ok(header)
    }
}

/// Writes `X` and `Y` (equal column counts) as a stream file.
pub fn write_stream(path: impl AsRef<Path>, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<()> {
    check_len("column count of X and Y", x.ncols(), y.ncols())?;
    let mut w = StreamWriter::create(path, x.nrows(), y.nrows())?;
    for j in 0..x.ncols() {
        w.write_column(x.column(j).as_slice(), y.column(j).as_slice())?;
    }
    w.finish()?;
    Ok(())
}

/// Incremental stream writer. The column count is patched into the header by
/// [`finish`](Self::finish); a writer dropped without finishing leaves an
/// open-ended stream.
pub struct StreamWriter {
    out: BufWriter<File>,
    path: std::path::PathBuf,
    mx: usize,
    my: usize,
    written: u64,
}

impl StreamWriter {
    pub fn create(path: impl AsRef<Path>, mx: usize, my: usize) -> Result<Self> {
        if mx == 0 || my == 0 {
            return Err(Error::ZeroDimension(if mx == 0 { "mx" } else { "my" }));
        }
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut out = BufWriter::new(file);
        let header = StreamHeader {
            mx: mx as u64,
            my: my as u64,
            n: OPEN_ENDED,
        };
        out.write_all(&header.encode()).map_err(io_err(&path))?;
        Ok(Self {
            out,
            path,
            mx,
            my,
            written: 0,
        })
    }

    pub fn write_column(&mut self, x: &[f64], y: &[f64]) -> Result<()> {
        check_len("x", self.mx, x.len())?;
        check_len("y", self.my, y.len())?;
        crate::sketch::check_finite(x, 0)?;
        crate::sketch::check_finite(y, x.len())?;
        for v in x.iter().chain(y) {
            self.out.write_all(&v.to_le_bytes()).map_err(io_err(&self.path))?;
        }
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> u64 {
        self.written
    }

    /// Records the column count in the header and flushes. Returns the count.
    pub fn finish(self) -> Result<u64> {
        self.close(true)
    }

    /// Flushes but keeps the open-ended marker in the header.
    pub fn finish_open_ended(self) -> Result<u64> {
        self.close(false)
    }

    fn close(mut self, patch: bool) -> Result<u64> {
        let path = self.path.clone();
        self.out.flush().map_err(io_err(&path))?;
        if patch {
            let file = self.out.get_mut();
            file.seek(SeekFrom::Start(24)).map_err(io_err(&path))?;
            file.write_all(&self.written.to_le_bytes()).map_err(io_err(&path))?;
            file.flush().map_err(io_err(&path))?;
        }
        Ok(self.written)
    }
}

/// Sequential reader over the records of a stream.
///
/// Memory use is one record buffer plus whatever batch the caller asks for.
pub struct StreamReader<R = BufReader<File>> {
    inner: R,
    header: StreamHeader,
    record: Vec<u8>,
    /// Byte offset of the next record.
    offset: u64,
    /// Records left to read; `None` reads to end of file.
    remaining: Option<u64>,
}

impl StreamReader {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(io_err(path))?;
        let len = file.metadata().map_err(io_err(path))?.len();
        let reader = Self::new(BufReader::new(file))?;
        if !reader.header.is_open_ended() {
            let expected = reader
                .header
                .n
                .checked_mul(reader.header.record_len())
                .and_then(|b| b.checked_add(HEADER_LEN));
            if let Some(expected) = expected {
                if len > expected {
                    return Err(FormatError::Corrupt {
                        offset: expected,
                        reason: format!("{} trailing bytes after the last record", len - expected),
                    }
                    .into());
                }
            }
        }
        Ok(reader)
    }

    /// Reader positioned at record `start`, yielding at most `count` records.
    /// Lets several readers sketch disjoint chunks of one file.
    pub fn open_range(path: impl AsRef<Path>, start: u64, count: u64) -> Result<Self> {
        let mut reader = Self::open(path)?;
        if !reader.header.is_open_ended() && start > reader.header.n {
            return Err(Error::InvalidParameter(format!(
                "start {start} is past the end of a {}-column stream",
                reader.header.n
            )));
        }
        let offset = HEADER_LEN + start * reader.header.record_len();
        reader.inner.seek(SeekFrom::Start(offset)).map_err(FormatError::from)?;
        reader.offset = offset;
        let left = reader.remaining.map_or(count, |r| r.saturating_sub(start).min(count));
        reader.remaining = Some(left);
        Ok(reader)
    }
}

impl<R: Read> StreamReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let mut buf = [0u8; HEADER_LEN as usize];
        read_full(&mut inner, &mut buf).and_then(|got| {
            if got < buf.len() {
                Err(FormatError::Corrupt {
                    offset: got as u64,
                    reason: format!("header truncated ({got} of {HEADER_LEN} bytes)"),
                })
            } else {
                Ok(())
            }
        })?;
        let header = StreamHeader::decode(&buf)?;
        let record_len = usize::try_from(header.record_len()).map_err(|_| FormatError::Corrupt {
            offset: 8,
            reason: "record length does not fit in memory".into(),
        })?;
        Ok(Self {
            inner,
            header,
            record: vec![0; record_len],
            offset: HEADER_LEN,
            remaining: (!header.is_open_ended()).then_some(header.n),
        })
    }

    pub fn header(&self) -> StreamHeader {
        self.header
    }

    pub fn mx(&self) -> usize {
        self.header.mx as usize
    }

    pub fn my(&self) -> usize {
        self.header.my as usize
    }

    /// Reads one record; `Ok(None)` at a clean end of stream.
    pub fn next_pair(&mut self) -> Result<Option<ColumnPair>> {
        if self.remaining == Some(0) {
            return Ok(None);
        }
        let got = read_full(&mut self.inner, &mut self.record)?;
        if got == 0 && self.remaining.is_none() {
            return Ok(None);
        }
        if got < self.record.len() {
            return Err(FormatError::Corrupt {
                offset: self.offset,
                reason: format!("record truncated ({got} of {} bytes)", self.record.len()),
            }
            .into());
        }
        let mx = self.mx();
        let mut values = self
            .record
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
        let x: Vec<f64> = values.by_ref().take(mx).collect();
        let y: Vec<f64> = values.collect();
        let pair = ColumnPair::new(x, y).map_err(|e| match e {
            Error::NonFinite { index } => Error::from(FormatError::Corrupt {
                offset: self.offset + 8 * index as u64,
                reason: "non-finite value".into(),
            }),
            other => other,
        })?;
        self.offset += self.record.len() as u64;
        if let Some(r) = self.remaining.as_mut() {
            *r -= 1;
        }
        Ok(Some(pair))
    }

    /// Up to `batch_size` pairs; an empty batch means the stream is exhausted.
    pub fn read_batch(&mut self, batch_size: usize) -> Result<Vec<ColumnPair>> {
        let mut out = Vec::with_capacity(batch_size.min(1 << 16));
        while out.len() < batch_size {
            match self.next_pair()? {
                Some(p) => out.push(p),
                None => break,
            }
        }
        Ok(out)
    }

    /// Everything left in the stream as two dense matrices.
    pub fn read_all(&mut self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let (mx, my) = (self.mx(), self.my());
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        while let Some(p) = self.next_pair()? {
            xs.extend_from_slice(p.x());
            ys.extend_from_slice(p.y());
        }
        let n = xs.len() / mx;
        Ok((DMatrix::from_vec(mx, n, xs), DMatrix::from_vec(my, n, ys)))
    }
}

impl<R: Read> Iterator for StreamReader<R> {
    type Item = Result<ColumnPair>;
    fn next(&mut self) -> Option<Self::Item> {
        self.next_pair().transpose()
    }
}

// Reads until `buf` is full or EOF; returns the number of bytes read.
fn read_full(r: &mut impl Read, buf: &mut [u8]) -> Result<usize, FormatError> {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..]) {
            Ok(0) => break,
            Ok(k) => got += k,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(got)
}
