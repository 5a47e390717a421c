//! On-disk workflow: CSV to binary stream, chunked sketching from file
//! ranges, snapshots, and merging snapshots back together.
//!
//! ```bash
//! cargo run --release --example stream_files
//! ```

use std::io::Write;

use codsketch::evaluation::{amm_error, gen_low_rank, LowRankModelSpec};
use codsketch::io::{csv_to_stream, SketchSnapshot, StreamReader};
use codsketch::sketch::{cod_merge, CoOccurringSketch, SketchConfig};

fn main() -> codsketch::Result<()> {
    let tmp = tempfile::tempdir().expect("temp dir");
    let dir = tmp.path();

    let (x, y) = gen_low_rank(&LowRankModelSpec::noise_free(1000, 20, 30, 6, 6, 9))?;
    let (xs, ys) = (dir.join("x.csv"), dir.join("y.csv"));
    write_csv(&xs, &x);
    write_csv(&ys, &y);
    let stream = dir.join("pairs.cod");
    let n = csv_to_stream(&xs, &ys, &stream)?;
    println!("wrote {n} column pairs to {}", stream.display());

    let cfg = SketchConfig::new(8, 20, 30)?;
    let mut snaps = Vec::new();
    for (i, start) in (0..n).step_by(250).enumerate() {
        let mut sk = CoOccurringSketch::new(cfg);
        for pair in StreamReader::open_range(&stream, start, 250)? {
            sk.update(&pair?)?;
        }
        let path = dir.join(format!("part{i}.snap"));
        SketchSnapshot::from_cod(&sk).save(&path)?;
        snaps.push(path);
    }

    let mut merged: Option<CoOccurringSketch> = None;
    for path in &snaps {
        let sk = SketchSnapshot::load(path)?.into_cod()?;
        merged = Some(match merged {
            None => sk,
            Some(acc) => cod_merge(&acc, &sk)?,
        });
    }
    let merged = merged.expect("at least one chunk");
    let (bx, by) = merged.result();
    println!(
        "merged {} snapshots: {} columns, error {:.4e}, bound {:.4e}",
        snaps.len(),
        merged.columns_seen(),
        amm_error(&x, &y, &bx, &by)?,
        merged.error_bound()
    );
    Ok(())
}

fn write_csv(path: &std::path::Path, m: &nalgebra::DMatrix<f64>) {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
    for j in 0..m.ncols() {
        let row: Vec<String> = m.column(j).iter().map(|v| format!("{v:e}")).collect();
        writeln!(f, "{}", row.join(",")).unwrap();
    }
}
