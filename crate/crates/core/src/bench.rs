//! Error-versus-ell sweeps over every method.
//!
//! A plan expands into cells `(method, ell, seed)`; deterministic methods get
//! one cell per `ell`, randomized ones `repeats` cells with seeds
//! `seed_base, seed_base + 1, ...`. Cells run in parallel on a bounded pool
//! and rows come back in plan order. A failing cell produces a row whose
//! `status` column carries the error; the sweep continues.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::baselines::{feed, BuildOptions, Method};
use crate::error::{Error, FormatError, Result};
use crate::evaluation::metrics::DENSE_CAP;
use crate::evaluation::{gen_low_rank, LowRankModelSpec, ProductOracle};
use crate::io::StreamReader;
use crate::linalg::frobenius_sq;

/// Default number of seeds per randomized cell.
pub const DEFAULT_REPEATS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    Generated(LowRankModelSpec),
    Stream(PathBuf),
}

impl DataSource {
    pub fn load(&self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        match self {
            DataSource::Generated(spec) => gen_low_rank(spec),
            DataSource::Stream(path) => StreamReader::open(path)?.read_all(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchPlan {
    pub source: DataSource,
    pub methods: Vec<Method>,
    pub ells: Vec<usize>,
    pub repeats: usize,
    pub seed_base: u64,
    /// Allow error computation above the dense-product cap.
    pub force: bool,
    pub options: BuildOptions,
}

impl BenchPlan {
    pub fn new(source: DataSource, methods: Vec<Method>, ells: Vec<usize>) -> Self {
        Self {
            source,
            methods,
            ells,
            repeats: DEFAULT_REPEATS,
            seed_base: 0,
            force: false,
            options: BuildOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be at least 1".into()));
        }
        if self.methods.is_empty() || self.ells.is_empty() {
            return Err(Error::InvalidParameter("plan needs at least one method and one ell".into()));
        }
        Ok(())
    }

    fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &method in &self.methods {
            for &ell in &self.ells {
                if method.is_randomized() {
                    out.extend((0..self.repeats as u64).map(|r| Cell {
                        method,
                        ell,
                        seed: Some(self.seed_base.wrapping_add(r)),
                    }));
                } else {
                    out.push(Cell { method, ell, seed: None });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    method: Method,
    ell: usize,
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedCell {
    Deterministic,
    Seed(u64),
    Mean,
    Std,
}

impl SeedCell {
    fn render(self) -> String {
        match self {
            SeedCell::Deterministic => String::new(),
            SeedCell::Seed(s) => s.to_string(),
            SeedCell::Mean => "mean".into(),
            SeedCell::Std => "std".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub ell: usize,
    pub seed: SeedCell,
    pub spectral_error: Option<f64>,
    pub frobenius_error: Option<f64>,
    /// Worst-case bound for deterministic methods.
    pub thm_bound: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub status: String,
}

impl BenchRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Worst-case spectral error guarantee for a deterministic method.
pub fn method_bound(method: Method, ell: usize, frob_x_sq: f64, frob_y_sq: f64) -> Option<f64> {
    let l = ell as f64;
    match method {
        Method::Cod | Method::Brute => Some(2.0 * (frob_x_sq * frob_y_sq).sqrt() / l),
        Method::FdAmm => Some((frob_x_sq + frob_y_sq) / l),
        _ => None,
    }
}

/// Runs the plan on a pool of at most `workers` threads (all cores when `None`).
pub fn run_bench(plan: &BenchPlan, workers: Option<usize>) -> Result<Vec<BenchRow>> {
    plan.validate()?;
    let (x, y) = plan.source.load()?;
    run_bench_on(plan, &x, &y, workers)
}

/// Same as [`run_bench`] on data already in memory.
pub fn run_bench_on(plan: &BenchPlan, x: &DMatrix<f64>, y: &DMatrix<f64>, workers: Option<usize>) -> Result<Vec<BenchRow>> {
    plan.validate()?;
    if x.nrows() * y.nrows() > DENSE_CAP && !plan.force {
        return Err(Error::InvalidParameter(format!(
            "mx*my = {} exceeds the dense cap {DENSE_CAP}; pass --force to score through power iteration",
            x.nrows() * y.nrows()
        )));
    }
    let oracle = ProductOracle::new(x, y)?;
    let (fx, fy) = (frobenius_sq(x), frobenius_sq(y));
    let cells = plan.cells();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<BenchRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| run_cell(*cell, x, y, &oracle, plan.options, fx, fy))
            .collect()
    });
    Ok(with_summaries(rows))
}

fn run_cell(
    cell: Cell,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    oracle: &ProductOracle<'_>,
    options: BuildOptions,
    fx: f64,
    fy: f64,
) -> BenchRow {
    let mut row = BenchRow {
        method: cell.method,
        ell: cell.ell,
        seed: cell.seed.map_or(SeedCell::Deterministic, SeedCell::Seed),
        spectral_error: None,
        frobenius_error: None,
        thm_bound: method_bound(cell.method, cell.ell, fx, fy),
        wall_time_s: None,
        status: "ok".into(),
    };
    let attempt = || -> Result<(f64, f64, f64)> {
        cell.method.validate_ell(cell.ell, x.nrows(), y.nrows())?;
        let start = Instant::now();
        let mut state = cell
            .method
            .build_with(cell.ell, x.nrows(), y.nrows(), cell.seed.unwrap_or(0), options)?;
        feed(state.as_mut(), x, y)?;
        let (bx, by) = state.sketches();
        let elapsed = start.elapsed().as_secs_f64();
        let errors = oracle.errors(&bx, &by)?;
        Ok((errors.spectral, errors.frobenius, elapsed))
    };
    match attempt() {
        Ok((s, f, t)) => {
            row.spectral_error = Some(s);
            row.frobenius_error = Some(f);
            row.wall_time_s = Some(t);
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    row
}

// Appends mean/std rows after each randomized (method, ell) group.
fn with_summaries(rows: Vec<BenchRow>) -> Vec<BenchRow> {
    let mut out = Vec::with_capacity(rows.len());
    let mut i = 0;
    while i < rows.len() {
        let (method, ell) = (rows[i].method, rows[i].ell);
        let mut j = i;
        while j < rows.len() && rows[j].method == method && rows[j].ell == ell {
            j += 1;
        }
        let group = &rows[i..j];
        out.extend_from_slice(group);
        if method.is_randomized() {
            let ok: Vec<&BenchRow> = group.iter().filter(|r| r.is_ok()).collect();
            let col = |f: fn(&BenchRow) -> Option<f64>| ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>();
            let spectral = col(|r| r.spectral_error);
            let frob = col(|r| r.frobenius_error);
            let time = col(|r| r.wall_time_s);
            let status = if ok.len() == group.len() {
                "ok".to_string()
            } else {
                format!("{} of {} cells failed", group.len() - ok.len(), group.len())
            };
            for (seed, stat) in [(SeedCell::Mean, mean as fn(&[f64]) -> Option<f64>), (SeedCell::Std, std_dev)] {
                out.push(BenchRow {
                    method,
                    ell,
                    seed,
                    spectral_error: stat(&spectral),
                    frobenius_error: stat(&frob),
                    thm_bound: None,
                    wall_time_s: stat(&time),
                    status: status.clone(),
                });
            }
        }
        i = j;
    }
    out
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Sample standard deviation; 0 for a single value.
fn std_dev(v: &[f64]) -> Option<f64> {
    let m = mean(v)?;
    if v.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = v.iter().map(|a| (a - m) * (a - m)).sum();
    Some((ss / (v.len() - 1) as f64).sqrt())
}

pub const CSV_HEADER: [&str; 8] = [
    "method",
    "ell",
    "seed",
    "spectral_error",
    "frobenius_error",
    "thm_bound",
    "wall_time_s",
    "status",
];

/// Writes rows as CSV with a header row and LF line endings.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let csv_err = |e: csv::Error| Error::from(FormatError::from(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let num = |v: Option<f64>| v.map(|a| a.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            r.ell.to_string(),
            r.seed.render(),
            num(r.spectral_error),
            num(r.frobenius_error),
            num(r.thm_bound),
            num(r.wall_time_s),
            r.status.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::from(FormatError::from(e)))?;
    Ok(())
}
