//! The `cod` command line: `gen`, `sketch`, `bench`, `merge`, `verify`.
//!
//! Exit status is 0 on success, 1 when a check or audit fails or a runtime
//! error occurs, and 2 for usage and validation errors.
//!
//! `--config FILE` reads `key = value` lines and applies them as if they were
//! flags of the chosen subcommand; flags given on the command line win.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::baselines::{BuildOptions, Method};
use crate::bench::{method_bound, run_bench, write_csv, BenchPlan, DataSource, DEFAULT_REPEATS};
use crate::error::{Error, Result};
use crate::evaluation::metrics::DENSE_CAP;
use crate::evaluation::{amm_error, gen_low_rank, ErrorReport, LowRankModelSpec};
use crate::io::{csv_to_stream, write_stream, SketchSnapshot, StreamReader};
use crate::linalg::norm_sq;
use crate::sketch::{CoOccurringSketch, SketchConfig, BOUND_SLACK};
use crate::verify::{run_verify, Check, VerifyOptions};

/// Environment variable capping the number of bench worker threads.
pub const WORKERS_ENV: &str = "COD_WORKERS";

const SUBCOMMANDS: [&str; 5] = ["gen", "sketch", "bench", "merge", "verify"];

#[derive(Parser, Debug)]
#[command(name = "cod", version, about = "Streaming approximate matrix multiplication sketches")]
struct Cli {
    /// File of `key = value` lines used as default flag values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a paired-column stream file.
    Gen(GenArgs),
    /// Sketch a stream file with one method.
    Sketch(SketchArgs),
    /// Sweep methods and sketch lengths, writing CSV.
    Bench(BenchArgs),
    /// Merge co-occurring directions snapshots.
    Merge(MergeArgs),
    /// Run the property battery.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, required_unless_present = "csv_x")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "csv_x")]
    mx: Option<usize>,
    #[arg(long, required_unless_present = "csv_x")]
    my: Option<usize>,
    #[arg(long, required_unless_present = "csv_x")]
    kx: Option<usize>,
    #[arg(long, required_unless_present = "csv_x")]
    ky: Option<usize>,
    /// Noise divisor for X (noise-free when absent).
    #[arg(long)]
    zeta_x: Option<f64>,
    #[arg(long)]
    zeta_y: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Import X from a CSV file with one sample per row instead of generating.
    #[arg(long, requires = "csv_y", conflicts_with_all = ["n", "mx", "my", "kx", "ky", "zeta_x", "zeta_y"])]
    csv_x: Option<PathBuf>,
    #[arg(long, requires = "csv_x")]
    csv_y: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SketchArgs {
    /// Stream file to read.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    algo: Method,
    #[arg(long)]
    ell: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Snapshot file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// First column to read.
    #[arg(long, default_value_t = 0)]
    start: u64,
    /// Number of columns to read (to the end when absent).
    #[arg(long)]
    count: Option<u64>,
    #[arg(long, default_value_t = 1024)]
    batch: usize,
    /// Score the sketch against the dense product.
    #[arg(long)]
    audit: bool,
    /// Allow the audit above the dense-product cap.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    unscaled_sampling: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Stream file to benchmark on; otherwise data is generated.
    #[arg(long, conflicts_with_all = ["n", "mx", "my", "kx", "ky", "zeta_x", "zeta_y", "data_seed"])]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    mx: usize,
    #[arg(long, default_value_t = 300)]
    my: usize,
    #[arg(long, default_value_t = 80)]
    kx: usize,
    #[arg(long, default_value_t = 8)]
    ky: usize,
    #[arg(long)]
    zeta_x: Option<f64>,
    #[arg(long)]
    zeta_y: Option<f64>,
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "cod,fd-amm,brute,sampling,projection,hashing")]
    methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    ells: Vec<usize>,
    /// Seeds per randomized (method, ell) cell.
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: usize,
    /// First seed for randomized methods.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    unscaled_sampling: bool,
}

#[derive(Args, Debug)]
struct MergeArgs {
    #[arg(required = true)]
    snapshots: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Checks to run (all when absent).
    #[arg(long, value_delimiter = ',')]
    check: Vec<Check>,
    /// Trials per check, overriding the defaults.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

enum Failure {
    Usage(String),
    Check(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OddEll(_)
            | Error::EllTooSmall { .. }
            | Error::EllTooLarge { .. }
            | Error::ZeroDimension(_)
            | Error::ConfigMismatch(_)
            | Error::EpsilonOutOfRange(_)
            | Error::MissingStats(_)
            | Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other),
        }
    }
}

fn command() -> clap::Command {
    SUBCOMMANDS
        .iter()
        .fold(Cli::command(), |cmd, name| cmd.mut_subcommand(name, |s| s.args_override_self(true)))
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match apply_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match command()
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Sketch(a) => cmd_sketch(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Merge(a) => cmd_merge(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            1
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Inserts `--key value` pairs from the config file right after the
/// subcommand name, so later command-line occurrences override them.
fn apply_config(mut args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut config = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        }
    }
    let Some(path) = config else { return Ok(args) };
    let Some(sub_at) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let sub_name = args[sub_at].to_string_lossy().into_owned();
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let cmd = command();
    let sub = cmd.find_subcommand(&sub_name).expect("known subcommand");
    let mut injected: Vec<OsString> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| format!("{}:{}: `{key}` is not a flag of `{sub_name}`", path.display(), lineno + 1))?;
        if arg.get_action().takes_values() {
            injected.push(format!("--{key}").into());
            injected.push(value.into());
        } else {
            match value {
                "true" => injected.push(format!("--{key}").into()),
                "false" => {}
                other => {
                    return Err(format!(
                        "{}:{}: `{key}` is a switch; use true or false, not `{other}`",
                        path.display(),
                        lineno + 1
                    ))
                }
            }
        }
    }
    args.splice(sub_at + 1..sub_at + 1, injected);
    Ok(args)
}

fn cmd_gen(a: GenArgs) -> std::result::Result<(), Failure> {
    if let (Some(px), Some(py)) = (&a.csv_x, &a.csv_y) {
        let n = csv_to_stream(px, py, &a.out)?;
        let header = StreamReader::open(&a.out)?.header();
        println!(
            "gen csv_x={} csv_y={} mx={} my={} n={n} out={}",
            px.display(),
            py.display(),
            header.mx,
            header.my,
            a.out.display()
        );
        return Ok(());
    }
    // clap enforces presence unless importing CSV
    let spec = LowRankModelSpec {
        n: a.n.expect("required"),
        mx: a.mx.expect("required"),
        my: a.my.expect("required"),
        kx: a.kx.expect("required"),
        ky: a.ky.expect("required"),
        zeta_x: a.zeta_x,
        zeta_y: a.zeta_y,
        seed: a.seed,
    };
    let (x, y) = gen_low_rank(&spec)?;
    write_stream(&a.out, &x, &y)?;
    let zeta = |z: Option<f64>| z.map_or_else(|| "none".to_string(), |v| v.to_string());
    println!(
        "gen n={} mx={} my={} kx={} ky={} zeta_x={} zeta_y={} seed={} out={}",
        spec.n,
        spec.mx,
        spec.my,
        spec.kx,
        spec.ky,
        zeta(spec.zeta_x),
        zeta(spec.zeta_y),
        spec.seed,
        a.out.display()
    );
    Ok(())
}

fn open_stream(input: &Path, start: u64, count: Option<u64>) -> Result<StreamReader> {
    if start == 0 && count.is_none() {
        StreamReader::open(input)
    } else {
        StreamReader::open_range(input, start, count.unwrap_or(u64::MAX))
    }
}

fn cmd_sketch(a: SketchArgs) -> std::result::Result<(), Failure> {
    if a.batch == 0 {
        return Err(Failure::Usage("--batch must be positive".into()));
    }
    let mut reader = open_stream(&a.input, a.start, a.count)?;
    let (mx, my) = (reader.mx(), reader.my());
    a.algo.validate_ell(a.ell, mx, my)?;
    if a.audit && mx * my > DENSE_CAP && !a.force {
        return Err(Failure::Usage(format!(
            "audit needs the dense {mx} x {my} product, above the cap of {DENSE_CAP} entries; pass --force"
        )));
    }
    let seed = a.algo.is_randomized().then_some(a.seed);
    let options = BuildOptions {
        unscaled_sampling: a.unscaled_sampling,
    };

    let start = Instant::now();
    let mut cod = (a.algo == Method::Cod).then(|| CoOccurringSketch::new(SketchConfig::new(a.ell, mx, my).expect("validated")));
    let mut other = match cod {
        Some(_) => None,
        None => Some(a.algo.build_with(a.ell, mx, my, a.seed, options)?),
    };
    let (mut fx, mut fy, mut seen) = (0.0, 0.0, 0u64);
    loop {
        let batch = reader.read_batch(a.batch)?;
        if batch.is_empty() {
            break;
        }
        for pair in &batch {
            match (&mut cod, &mut other) {
                (Some(s), _) => {
                    s.update(pair)?;
                }
                (None, Some(s)) => s.update(pair)?,
                (None, None) => unreachable!(),
            }
            fx += norm_sq(pair.x());
            fy += norm_sq(pair.y());
            seen += 1;
        }
    }
    let (bx, by) = match (&cod, &other) {
        (Some(s), _) => s.result(),
        (None, Some(s)) => s.sketches(),
        (None, None) => unreachable!(),
    };
    let wall = start.elapsed().as_secs_f64();

    if let Some(out) = &a.out {
        let snap = match &cod {
            Some(s) => SketchSnapshot::from_cod(s),
            None => SketchSnapshot::from_sketches(a.algo, seed, bx.clone(), by.clone(), seen, fx, fy)?,
        };
        snap.save(out)?;
    }

    if !a.audit {
        print!("method={} ell={} columns={seen} wall_time_s={wall:.6}", a.algo, a.ell);
        match seed {
            Some(s) => println!(" seed={s}"),
            None => println!(" seed=-"),
        }
        return Ok(());
    }
    let (x, y) = open_stream(&a.input, a.start, a.count)?.read_all()?;
    let report = ErrorReport {
        method: a.algo.name().to_string(),
        ell: a.ell,
        spectral_error: amm_error(&x, &y, &bx, &by)?,
        bound_used: method_bound(a.algo, a.ell, fx, fy),
        wall_time_s: wall,
        seed,
    };
    println!("{report}");
    if let Some(s) = &cod {
        let audit = s.audit();
        println!(
            "shrink_sum={:.6e} ceiling={:.6e} audit_holds={}",
            audit.delta_sum, audit.ceiling, audit.holds
        );
        if !audit.holds {
            return Err(Failure::Check("shrink-level audit failed".into()));
        }
    }
    if let Some(b) = report.bound_used {
        if report.spectral_error > b * (1.0 + BOUND_SLACK) {
            return Err(Failure::Check(format!(
                "spectral error {:e} exceeds bound {b:e}",
                report.spectral_error
            )));
        }
    }
    Ok(())
}

fn workers_from_env() -> std::result::Result<Option<usize>, Failure> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

fn cmd_bench(a: BenchArgs) -> std::result::Result<(), Failure> {
    let workers = workers_from_env()?;
    let source = match a.input {
        Some(path) => DataSource::Stream(path),
        None => {
            let mut spec = LowRankModelSpec::noise_free(a.n, a.mx, a.my, a.kx, a.ky, a.data_seed);
            spec.zeta_x = a.zeta_x;
            spec.zeta_y = a.zeta_y;
            spec.validate()?;
            DataSource::Generated(spec)
        }
    };
    let mut plan = BenchPlan::new(source, a.methods, a.ells);
    plan.repeats = a.repeats;
    plan.seed_base = a.seed;
    plan.force = a.force;
    plan.options.unscaled_sampling = a.unscaled_sampling;
    let rows = run_bench(&plan, workers)?;
    match &a.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| {
                Error::from(crate::error::FormatError::Io {
                    path: path.clone(),
                    source: e,
                })
            })?;
            write_csv(&rows, std::io::BufWriter::new(file))?;
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            println!("bench rows={} failed_cells={failed} out={}", rows.len(), path.display());
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_merge(a: MergeArgs) -> std::result::Result<(), Failure> {
    let mut merged: Option<CoOccurringSketch> = None;
    for path in &a.snapshots {
        let sketch = SketchSnapshot::load(path)?.into_cod()?;
        merged = Some(match merged {
            None => sketch,
            Some(acc) => CoOccurringSketch::merge(&acc, &sketch)?,
        });
    }
    let mut merged = merged.expect("clap requires one snapshot");
    if a.snapshots.len() == 1 {
        merged = CoOccurringSketch::merge(&merged, &CoOccurringSketch::new(merged.config()))?;
    }
    SketchSnapshot::from_cod(&merged).save(&a.out)?;
    let audit = merged.audit();
    println!(
        "merge inputs={} columns={} fill={} shrink_sum={:.6e} ceiling={:.6e} out={}",
        a.snapshots.len(),
        merged.columns_seen(),
        merged.fill(),
        audit.delta_sum,
        audit.ceiling,
        a.out.display()
    );
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> std::result::Result<(), Failure> {
    if a.trials == Some(0) {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let options = VerifyOptions {
        checks: if a.check.is_empty() { Check::ALL.to_vec() } else { a.check },
        trials: a.trials,
        seed: a.seed,
        inject_fault: a.inject_fault,
    };
    let report = run_verify(&options);
    println!("{report}");
    match a.json.as_deref() {
        Some(p) if p == Path::new("-") => println!("{}", report.to_json()),
        Some(p) => std::fs::write(p, report.to_json()).map_err(|e| {
            Error::from(crate::error::FormatError::Io {
                path: p.to_path_buf(),
                source: e,
            })
        })?,
        None => {}
    }
    let _ = std::io::stdout().flush();
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Check("verification failed".into()))
    }
}
