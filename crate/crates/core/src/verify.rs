//! Desk-scale property battery.
//!
//! Every check draws its instances from a seeded generator, compares the
//! sketches against dense oracles and reports how many trials held. Nothing
//! here panics on a violation; failures are collected into the report.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::baselines::{FdAmmState, Method};
use crate::error::{Error, FormatError, Result};
use crate::evaluation::generators::gaussian;
use crate::evaluation::{amm_error, gen_low_rank, gen_shared_factor, low_rank_product_approx, theoretical_bounds, LowRankModelSpec};
use crate::io::{write_stream, SketchSnapshot, StreamReader};
use crate::linalg::{frobenius_sq, singular_values};
use crate::rng::{self, Domain};
use crate::sketch::{sketch_length_for, CoOccurringSketch, FrequentDirectionsSketch, LengthMode, SketchConfig, BOUND_SLACK};

/// Factor applied to the shrink-level sum when fault injection is on.
pub const FAULT_SCALE: f64 = 1e-6;

/// Absolute allowance, relative to `||X||_F ||Y||_F`, when comparing a
/// measured error against the shrink-level sum. With no shrink the exact
/// error is zero but the dense oracle still sees product rounding.
pub const ROUNDING_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Thm2,
    DeltaAudit,
    FdBound,
    FdReduction,
    Fdamm,
    Thm3,
    Merge,
    Unbiased,
    Io,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Thm2,
        Check::DeltaAudit,
        Check::FdBound,
        Check::FdReduction,
        Check::Fdamm,
        Check::Thm3,
        Check::Merge,
        Check::Unbiased,
        Check::Io,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Thm2 => "thm2",
            Check::DeltaAudit => "delta-audit",
            Check::FdBound => "fd-bound",
            Check::FdReduction => "fd-reduction",
            Check::Fdamm => "fdamm",
            Check::Thm3 => "thm3",
            Check::Merge => "merge",
            Check::Unbiased => "unbiased",
            Check::Io => "io",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Check::Thm2 | Check::DeltaAudit | Check::FdBound => 100,
            Check::FdReduction | Check::Thm3 => 20,
            Check::Fdamm | Check::Merge => 50,
            Check::Unbiased => 200,
            Check::Io => 3,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown check `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub checks: Vec<Check>,
    /// Overrides every check's default trial count.
    pub trials: Option<usize>,
    pub seed: u64,
    /// Shrinks the recorded shrink-level sum so the delta audit must fail.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            checks: Check::ALL.to_vec(),
            trials: None,
            seed: 0,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub trials: usize,
    pub passed: usize,
    pub skipped: usize,
    /// Largest observed `measured / allowed` ratio, where meaningful.
    pub worst_ratio: Option<f64>,
    pub failures: Vec<String>,
    pub note: String,
}

impl CheckOutcome {
    fn new(check: Check) -> Self {
        Self {
            check,
            trials: 0,
            passed: 0,
            skipped: 0,
            worst_ratio: None,
            failures: Vec::new(),
            note: String::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed + self.skipped == self.trials
    }

    fn record(&mut self, holds: bool, ratio: Option<f64>, describe: impl FnOnce() -> String) {
        self.trials += 1;
        if let Some(r) = ratio {
            self.worst_ratio = Some(self.worst_ratio.map_or(r, |w| w.max(r)));
        }
        if holds {
            self.passed += 1;
        } else if self.failures.len() < 5 {
            self.failures.push(describe());
        } else if self.failures.len() == 5 {
            self.failures.push("...".into());
        }
    }

    fn error(&mut self, e: Error) {
        self.record(false, None, || format!("error: {e}"));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub fault_injected: bool,
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::ok)
    }

    /// Pretty JSON of the report with an added top-level `all_passed`.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report is plain data");
        v["all_passed"] = serde_json::Value::Bool(self.all_passed());
        serde_json::to_string_pretty(&v).expect("report is plain data")
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            write!(
                f,
                "[{}] {:<13} {}/{} held",
                if o.ok() { " ok " } else { "FAIL" },
                o.check.name(),
                o.passed,
                o.trials - o.skipped
            )?;
            if o.skipped > 0 {
                write!(f, ", {} skipped", o.skipped)?;
            }
            if let Some(r) = o.worst_ratio {
                write!(f, ", worst ratio {r:.4}")?;
            }
            if !o.note.is_empty() {
                write!(f, " ({})", o.note)?;
            }
            writeln!(f)?;
            for msg in &o.failures {
                writeln!(f, "         {msg}")?;
            }
        }
        let failed = self.outcomes.iter().filter(|o| !o.ok()).count();
        if failed == 0 {
            write!(f, "all {} checks passed", self.outcomes.len())
        } else {
            write!(f, "{failed} of {} checks failed", self.outcomes.len())
        }
    }
}

/// A random paired stream for bound checks.
#[derive(Clone, Debug)]
pub struct TrialInstance {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub ell: usize,
}

/// Instance `trial` of the family keyed by `seed`: `ell` from {2, 4, 8, 16}
/// unless given, `ell <= mx, my <= 50`, `1 <= n <= 500`, and one of three
/// data shapes (Gaussian, low rank plus noise, Gaussian with wildly varying
/// column norms).
pub fn trial_instance(seed: u64, trial: u64, ell: Option<usize>) -> TrialInstance {
    let mut r = rng::stream(seed, Domain::Harness, trial);
    let ell = ell.unwrap_or([2, 4, 8, 16][r.random_range(0..4)]);
    let mx = r.random_range(ell.min(50)..=50);
    let my = r.random_range(ell.min(50)..=50);
    let n = r.random_range(1..=500);
    let data_seed: u64 = r.random();
    let (x, y) = match r.random_range(0..3) {
        0 => (gaussian(mx, n, data_seed, 0), gaussian(my, n, data_seed, 1)),
        1 => {
            let kx = r.random_range(1..=mx.min(n));
            let ky = r.random_range(1..=my.min(n));
            let spec = LowRankModelSpec::noise_free(n, mx, my, kx, ky, data_seed).with_noise(100.0, 10.0);
            gen_low_rank(&spec).expect("valid spec")
        }
        _ => {
            let scales: Vec<f64> = (0..n).map(|_| (4.0 * r.random::<f64>() - 2.0).exp2().powi(3)).collect();
            let mut x = gaussian(mx, n, data_seed, 0);
            let mut y = gaussian(my, n, data_seed, 1);
            for (j, s) in scales.iter().enumerate() {
                x.column_mut(j).scale_mut(*s);
                y.column_mut(j).scale_mut(s.sqrt());
            }
            (x, y)
        }
    };
    TrialInstance { x, y, ell }
}

fn sketch_cod(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize) -> Result<CoOccurringSketch> {
    let mut s = CoOccurringSketch::new(SketchConfig::new(ell, x.nrows(), y.nrows())?);
    for j in 0..x.ncols() {
        s.update_slices(x.column(j).as_slice(), y.column(j).as_slice())?;
    }
    Ok(s)
}

fn thm2_bound(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize) -> f64 {
    2.0 * frobenius_sq(x).sqrt() * frobenius_sq(y).sqrt() / ell as f64
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn run_verify(options: &VerifyOptions) -> VerifyReport {
    let outcomes = options
        .checks
        .iter()
        .map(|&c| {
            let trials = options.trials.unwrap_or_else(|| c.default_trials());
            run_check(c, trials, options.seed, options.inject_fault)
        })
        .collect();
    VerifyReport {
        seed: options.seed,
        fault_injected: options.inject_fault,
        outcomes,
    }
}

pub fn run_check(check: Check, trials: usize, seed: u64, inject_fault: bool) -> CheckOutcome {
    let mut out = CheckOutcome::new(check);
    match check {
        Check::Thm2 => thm2(&mut out, trials, seed),
        Check::DeltaAudit => delta_audit(&mut out, trials, seed, inject_fault),
        Check::FdBound => fd_bound(&mut out, trials, seed),
        Check::FdReduction => fd_reduction(&mut out, trials, seed),
        Check::Fdamm => fdamm(&mut out, trials, seed),
        Check::Thm3 => thm3(&mut out, trials, seed),
        Check::Merge => merge(&mut out, trials, seed),
        Check::Unbiased => unbiased(&mut out, trials, seed),
        Check::Io => io(&mut out, trials, seed),
    }
    out
}

fn thm2(out: &mut CheckOutcome, trials: usize, seed: u64) {
    for t in 0..trials as u64 {
        let inst = trial_instance(seed, t, None);
        let res = sketch_cod(&inst.x, &inst.y, inst.ell).and_then(|s| {
            let (bx, by) = s.result();
            amm_error(&inst.x, &inst.y, &bx, &by)
        });
        match res {
            Ok(err) => {
                let bound = thm2_bound(&inst.x, &inst.y, inst.ell);
                out.record(err <= bound * (1.0 + BOUND_SLACK), Some(ratio(err, bound)), || {
                    format!("trial {t}: error {err:e} > bound {bound:e} (ell={})", inst.ell)
                });
            }
            Err(e) => out.error(e),
        }
    }
}

fn delta_audit(out: &mut CheckOutcome, trials: usize, seed: u64, inject_fault: bool) {
    for t in 0..trials as u64 {
        let inst = trial_instance(seed, t, None);
        let res = sketch_cod(&inst.x, &inst.y, inst.ell).and_then(|s| {
            let (bx, by) = s.result();
            Ok((amm_error(&inst.x, &inst.y, &bx, &by)?, s.delta_sum()))
        });
        match res {
            Ok((err, mut delta_sum)) => {
                if inject_fault {
                    delta_sum *= FAULT_SCALE;
                }
                let ceiling = thm2_bound(&inst.x, &inst.y, inst.ell);
                let floor = ROUNDING_FLOOR * ceiling * inst.ell as f64 / 2.0;
                let holds =
                    err <= delta_sum * (1.0 + BOUND_SLACK) + floor && delta_sum <= ceiling * (1.0 + BOUND_SLACK);
                out.record(holds, Some(ratio(err, delta_sum + floor)), || {
                    format!(
                        "trial {t}: error {err:e}, shrink sum {delta_sum:e}, ceiling {ceiling:e} (n={}, ell={})",
                        inst.x.ncols(),
                        inst.ell
                    )
                });
            }
            Err(e) => out.error(e),
        }
    }
    if inject_fault {
        out.note = format!("fault injected: shrink sums scaled by {FAULT_SCALE:e}");
    }
}

fn fd_bound(out: &mut CheckOutcome, trials: usize, seed: u64) {
    for t in 0..trials as u64 {
        let inst = trial_instance(seed, t, None);
        let x = &inst.x;
        let res = (|| -> Result<f64> {
            let mut fd = FrequentDirectionsSketch::new(inst.ell, x.nrows())?;
            for j in 0..x.ncols() {
                fd.update(x.column(j).as_slice())?;
            }
            crate::evaluation::spectral_norm(&(x * x.transpose() - fd.covariance()))
        })();
        match res {
            Ok(err) => {
                let bound = 2.0 * frobenius_sq(x) / inst.ell as f64;
                out.record(err <= bound * (1.0 + BOUND_SLACK), Some(ratio(err, bound)), || {
                    format!("trial {t}: error {err:e} > bound {bound:e}")
                });
            }
            Err(e) => out.error(e),
        }
    }
}

/// Relative Frobenius gap allowed between the two sketches on `X = Y` streams.
pub const REDUCTION_TOL: f64 = 1e-9;

fn fd_reduction(out: &mut CheckOutcome, trials: usize, seed: u64) {
    for t in 0..trials as u64 {
        let mut r = rng::stream(seed ^ 0xfd, Domain::Harness, t);
        let ell = [2, 4, 8, 16][r.random_range(0..4)];
        let m = r.random_range(ell..=40);
        let n = r.random_range(ell..=300);
        let x = gaussian(m, n, r.random(), 0);
        let res = (|| -> Result<f64> {
            let cod = sketch_cod(&x, &x, ell)?;
            let mut fd = FrequentDirectionsSketch::new(ell, m)?;
            for j in 0..n {
                fd.update(x.column(j).as_slice())?;
            }
            let cov = fd.covariance();
            let gap = (cod.product() - &cov).norm();
            // ell = 2 shrinks everything away; both sketches are then exactly zero.
            Ok(if gap == 0.0 { 0.0 } else { gap / cov.norm() })
        })();
        match res {
            Ok(gap) => out.record(gap <= REDUCTION_TOL, Some(gap / REDUCTION_TOL), || {
                format!("trial {t}: relative gap {gap:e} (m={m}, n={n}, ell={ell})")
            }),
            Err(e) => out.error(e),
        }
    }
}

fn fdamm(out: &mut CheckOutcome, trials: usize, seed: u64) {
    for t in 0..trials as u64 {
        let ell = [4, 8, 16][(t % 3) as usize];
        let eps = 1.0 / ell as f64;
        let inst = trial_instance(seed ^ 0xa3, t, Some(ell));
        let res = (|| -> Result<f64> {
            let mut st = FdAmmState::new(ell, inst.x.nrows(), inst.y.nrows())?;
            crate::baselines::feed(&mut st, &inst.x, &inst.y)?;
            let (bx, by) = crate::baselines::AmmSketcher::sketches(&st);
            amm_error(&inst.x, &inst.y, &bx, &by)
        })();
        match res {
            Ok(err) => {
                let bound = eps * (frobenius_sq(&inst.x) + frobenius_sq(&inst.y));
                out.record(err <= bound * (1.0 + BOUND_SLACK), Some(ratio(err, bound)), || {
                    format!("trial {t}: error {err:e} > bound {bound:e} (ell={ell})")
                });
            }
            Err(e) => out.error(e),
        }
    }
}

/// Accuracy used for the low-rank check; the ratio must stay below `1 + eps`.
pub const THM3_EPS: f64 = 0.5;
pub const THM3_KS: [usize; 3] = [1, 2, 4];

/// Outcome of one low-rank projection instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Thm3Trial {
    /// Premise met at `ell`; `ratio` is the projection error over `sigma_{k+1}`.
    Evaluated { k: usize, ell: usize, ratio: f64 },
    /// The premise asks for `ell_needed > min(mx, my)`.
    Skipped { k: usize, ell_needed: usize },
}

/// Instance `trial`: `k` cycles through [`THM3_KS`]; `X`, `Y` share a rank
/// `k + 1` latent factor (`n = 600`, `mx = my = 60`) and are sketched at the
/// smallest even `ell` meeting the premise.
pub fn thm3_trial(seed: u64, trial: u64) -> Result<Thm3Trial> {
    let k = THM3_KS[(trial % 3) as usize];
    let (n, m) = (600, 60);
    let (x, y) = gen_shared_factor(n, m, m, k + 1, seed.wrapping_mul(1000).wrapping_add(trial))?;
    let stats = theoretical_bounds(&x, &y, 2, k)?.stats;
    let ell = sketch_length_for(THM3_EPS, LengthMode::LowRank, Some(&stats))?;
    if ell > m {
        return Ok(Thm3Trial::Skipped { k, ell_needed: ell });
    }
    let s = sketch_cod(&x, &y, ell)?;
    let res = low_rank_product_approx(s.bx(), s.by(), &x, &y, k)?;
    let ratio = res
        .ratio
        .ok_or_else(|| Error::InvalidParameter("sigma_{k+1} vanished on a premise-checked instance".into()))?;
    Ok(Thm3Trial::Evaluated { k, ell, ratio })
}

fn thm3(out: &mut CheckOutcome, trials: usize, seed: u64) {
    let mut evaluated = 0;
    for t in 0..trials as u64 {
        match thm3_trial(seed, t) {
            Ok(Thm3Trial::Evaluated { k, ell, ratio }) => {
                evaluated += 1;
                out.record(ratio <= 1.0 + THM3_EPS, Some(ratio), || {
                    format!("trial {t}: k={k}, ell={ell}, ratio {ratio:.6} > {}", 1.0 + THM3_EPS)
                });
            }
            Ok(Thm3Trial::Skipped { .. }) => {
                out.trials += 1;
                out.skipped += 1;
            }
            Err(e) => out.error(e),
        }
    }
    out.note = format!("{evaluated} evaluated");
}

fn merge(out: &mut CheckOutcome, trials: usize, seed: u64) {
    for t in 0..trials as u64 {
        let inst = trial_instance(seed ^ 0x4e, t, None);
        let n = inst.x.ncols();
        let res = (|| -> Result<(f64, bool)> {
            let mut merged: Option<CoOccurringSketch> = None;
            for c in 0..4 {
                let (start, end) = (c * n / 4, (c + 1) * n / 4);
                let part = sketch_cod(
                    &inst.x.columns(start, end - start).into_owned(),
                    &inst.y.columns(start, end - start).into_owned(),
                    inst.ell,
                )?;
                merged = Some(match merged {
                    None => part,
                    Some(acc) => CoOccurringSketch::merge(&acc, &part)?,
                });
            }
            let m = merged.expect("four chunks");
            let (bx, by) = m.result();
            Ok((amm_error(&inst.x, &inst.y, &bx, &by)?, m.audit().holds))
        })();
        match res {
            Ok((err, audit)) => {
                let bound = thm2_bound(&inst.x, &inst.y, inst.ell);
                out.record(err <= bound * (1.0 + BOUND_SLACK) && audit, Some(ratio(err, bound)), || {
                    format!("trial {t}: error {err:e} vs bound {bound:e}, audit holds: {audit}")
                });
            }
            Err(e) => out.error(e),
        }
    }
}

/// Entrywise Monte-Carlo summary of a randomized estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct UnbiasedSummary {
    pub method: Method,
    pub seeds: usize,
    /// Fraction of entries of `X Y^T` within three standard errors of the mean estimate.
    pub within_fraction: f64,
}

/// Fraction of entries that must fall within three standard errors.
pub const UNBIASED_FRACTION: f64 = 0.99;

/// Runs `method` with seeds `0..seeds` on the fixed 6 x 8, n = 30 instance
/// derived from `seed`.
pub fn unbiased_summary(method: Method, seeds: usize, seed: u64, ell: usize) -> Result<UnbiasedSummary> {
    let x = gaussian(6, 30, seed ^ 0xb1a5, 0);
    let y = gaussian(8, 30, seed ^ 0xb1a5, 1);
    let truth = &x * y.transpose();
    let mut sum = DMatrix::<f64>::zeros(6, 8);
    let mut sum_sq = DMatrix::<f64>::zeros(6, 8);
    for s in 0..seeds as u64 {
        let (bx, by) = method.run(&x, &y, ell, s)?;
        let est = bx * by.transpose();
        sum_sq += est.component_mul(&est);
        sum += est;
    }
    let n = seeds as f64;
    let scale = singular_values(&truth)[0];
    let mut within = 0;
    for (i, (&total, &total_sq)) in sum.iter().zip(sum_sq.iter()).enumerate() {
        let mean = total / n;
        let var = ((total_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        let se = (var / n).sqrt();
        let gap = (mean - truth[i]).abs();
        if gap <= 3.0 * se || gap <= 1e-12 * scale {
            within += 1;
        }
    }
    Ok(UnbiasedSummary {
        method,
        seeds,
        within_fraction: within as f64 / truth.len() as f64,
    })
}

fn unbiased(out: &mut CheckOutcome, seeds: usize, seed: u64) {
    let mut notes = Vec::new();
    for method in [Method::Sampling, Method::Projection, Method::Hashing] {
        match unbiased_summary(method, seeds.max(2), seed, 4) {
            Ok(s) => {
                notes.push(format!("{} {:.3}", method, s.within_fraction));
                out.record(s.within_fraction >= UNBIASED_FRACTION, None, || {
                    format!("{method}: only {:.3} of entries within 3 standard errors", s.within_fraction)
                });
            }
            Err(e) => out.error(e),
        }
    }
    out.note = format!("{} seeds; {}", seeds.max(2), notes.join(", "));
}

fn io(out: &mut CheckOutcome, trials: usize, seed: u64) {
    let dir = std::env::temp_dir().join(format!("codsketch-verify-{}-{seed}", std::process::id()));
    if let Err(e) = std::fs::create_dir_all(&dir) {
        out.error(FormatError::Io { path: dir, source: e }.into());
        return;
    }
    for t in 0..trials as u64 {
        let res = io_round_trip(&dir, seed, t);
        match res {
            Ok(()) => out.record(true, None, String::new),
            Err(e) => out.error(e),
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
}

fn io_round_trip(dir: &std::path::Path, seed: u64, t: u64) -> Result<()> {
    let inst = trial_instance(seed ^ 0x10, t, None);
    let path = dir.join(format!("s{t}.cod"));
    write_stream(&path, &inst.x, &inst.y)?;
    let (x2, y2) = StreamReader::open(&path)?.read_all()?;
    let bitwise = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
        a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(p, q)| p.to_bits() == q.to_bits())
    };
    if !bitwise(&x2, &inst.x) || !bitwise(&y2, &inst.y) {
        return Err(Error::InvalidParameter("stream round trip changed the data".into()));
    }

    let sketch = sketch_cod(&inst.x, &inst.y, inst.ell)?;
    let snap = SketchSnapshot::from_cod(&sketch);
    let snap_path = dir.join(format!("s{t}.snap"));
    snap.save(&snap_path)?;
    let back = SketchSnapshot::load(&snap_path)?;
    if back.to_bytes() != snap.to_bytes() || back.into_cod()? != sketch {
        return Err(Error::InvalidParameter("snapshot round trip changed the sketch".into()));
    }

    let bytes = std::fs::read(&path).map_err(|e| FormatError::Io { path: path.clone(), source: e })?;
    let cut = bytes.len() - 1;
    let mut reader = StreamReader::new(std::io::Cursor::new(&bytes[..cut]))?;
    let truncated = loop {
        match reader.next_pair() {
            Ok(Some(_)) => continue,
            Ok(None) => break false,
            Err(Error::Format(FormatError::Corrupt { .. })) => break true,
            Err(e) => return Err(e),
        }
    };
    let snap_bytes = snap.to_bytes();
    let snap_truncated = matches!(
        SketchSnapshot::from_bytes(&snap_bytes[..snap_bytes.len() - 1]),
        Err(FormatError::Corrupt { .. })
    );
    if (inst.x.ncols() > 0 && !truncated) || !snap_truncated {
        return Err(Error::InvalidParameter("truncation went undetected".into()));
    }
    Ok(())
}
