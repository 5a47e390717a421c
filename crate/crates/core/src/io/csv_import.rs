use std::fs::File;
use std::path::Path;

use nalgebra::DMatrix;

use super::io_err;
use super::stream::StreamWriter;
use crate::error::{Error, FormatError, Result};

/// Row reader over a headerless numeric CSV file; row `i` is sample `i`.
struct Rows {
    reader: csv::Reader<File>,
    record: csv::StringRecord,
    width: Option<usize>,
}

impl Rows {
    fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(io_err(path))?;
        let reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(file);
        Ok(Self {
            reader,
            record: csv::StringRecord::new(),
            width: None,
        })
    }

    fn next_row(&mut self, out: &mut Vec<f64>) -> Result<bool> {
        if !self.reader.read_record(&mut self.record).map_err(FormatError::from)? {
            return Ok(false);
        }
        let offset = self.record.position().map_or(0, |p| p.byte());
        out.clear();
        for field in self.record.iter() {
            let v: f64 = field.parse().map_err(|_| FormatError::Corrupt {
                offset,
                reason: format!("not a number: `{field}`"),
            })?;
            out.push(v);
        }
        if out.is_empty() {
            return Err(FormatError::Corrupt {
                offset,
                reason: "empty row".into(),
            }
            .into());
        }
        Ok(true)
    }

    fn width(&mut self, row: &[f64]) -> Result<usize> {
        let w = *self.width.get_or_insert(row.len());
        crate::sketch::check_len("CSV row width", w, row.len())?;
        Ok(w)
    }
}

/// Converts two sample-per-row CSV files into a stream file without holding
/// either matrix. Returns the number of columns written.
pub fn csv_to_stream(x_csv: impl AsRef<Path>, y_csv: impl AsRef<Path>, out: impl AsRef<Path>) -> Result<u64> {
    let mut rx = Rows::open(x_csv.as_ref())?;
    let mut ry = Rows::open(y_csv.as_ref())?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    let mut writer: Option<StreamWriter> = None;
    let mut n = 0u64;
    loop {
        let more_x = rx.next_row(&mut x)?;
        let more_y = ry.next_row(&mut y)?;
        match (more_x, more_y) {
            (false, false) => break,
            (true, true) => {}
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "CSV files have different sample counts ({} has more than {n} rows)",
                    if more_x { "X" } else { "Y" }
                )))
            }
        }
        let mx = rx.width(&x)?;
        let my = ry.width(&y)?;
        let w = match writer.as_mut() {
            Some(w) => w,
            None => writer.insert(StreamWriter::create(out.as_ref(), mx, my)?),
        };
        w.write_column(&x, &y)?;
        n += 1;
    }
    match writer {
        Some(w) => w.finish(),
        None => Err(Error::InvalidParameter("CSV input has no rows".into())),
    }
}

/// Loads two sample-per-row CSV files as `X` (`mx x n`) and `Y` (`my x n`).
pub fn read_csv_pair(x_csv: impl AsRef<Path>, y_csv: impl AsRef<Path>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let load = |path: &Path| -> Result<DMatrix<f64>> {
        let mut rows = Rows::open(path)?;
        let mut row = Vec::new();
        let mut data = Vec::new();
        let mut n = 0;
        while rows.next_row(&mut row)? {
            rows.width(&row)?;
            data.extend_from_slice(&row);
            n += 1;
        }
        if n == 0 {
            return Err(Error::InvalidParameter(format!("{} has no rows", path.display())));
        }
        // Rows are samples, so the row-major data is the column-major X.
        Ok(DMatrix::from_vec(data.len() / n, n, data))
    };
    let x = load(x_csv.as_ref())?;
    let y = load(y_csv.as_ref())?;
    crate::sketch::check_len("CSV sample count", x.ncols(), y.ncols())?;
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{write_stream, StreamReader};

    #[test]
    fn csv_and_binary_paths_agree() {
        let dir = tempfile::tempdir().unwrap();
        let (px, py) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
        std::fs::write(&px, "1.5,2,3\n-4,5e-3,6\n").unwrap();
        std::fs::write(&py, "7, 8\n9, 10\n").unwrap();
        let (x, y) = read_csv_pair(&px, &py).unwrap();
        assert_eq!(x, DMatrix::from_column_slice(3, 2, &[1.5, 2.0, 3.0, -4.0, 5e-3, 6.0]));
        assert_eq!(y, DMatrix::from_column_slice(2, 2, &[7.0, 8.0, 9.0, 10.0]));

        let (a, b) = (dir.path().join("a.cod"), dir.path().join("b.cod"));
        assert_eq!(csv_to_stream(&px, &py, &a).unwrap(), 2);
        write_stream(&b, &x, &y).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(StreamReader::open(&a).unwrap().read_all().unwrap(), (x, y));
    }

    #[test]
    fn malformed_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let (px, py) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
        let out = dir.path().join("o.cod");
        std::fs::write(&px, "1,2\n3,4\n").unwrap();
        std::fs::write(&py, "1\n").unwrap();
        assert!(csv_to_stream(&px, &py, &out).is_err());
        assert!(read_csv_pair(&px, &py).is_err());
        std::fs::write(&py, "1\nabc\n").unwrap();
        assert!(matches!(
            read_csv_pair(&px, &py),
            Err(Error::Format(FormatError::Corrupt { offset: 2, .. }))
        ));
        std::fs::write(&px, "1,2\n3\n").unwrap();
        std::fs::write(&py, "1\n2\n").unwrap();
        assert!(read_csv_pair(&px, &py).is_err());
    }
}
