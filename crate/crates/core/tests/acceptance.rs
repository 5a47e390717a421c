//! Acceptance suite. One line per criterion, nonzero exit if any fails.
//!
//! Every error here is recomputed from scratch with nalgebra's SVD on the
//! dense product; the crate's own metrics are not used as the oracle.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use codsketch::baselines::{fd_amm, Method};
use codsketch::evaluation::generators::gaussian;
use codsketch::evaluation::{gen_low_rank, gen_shared_factor, LowRankModelSpec};
use codsketch::io::{write_stream, SketchSnapshot, StreamReader};
use codsketch::sketch::{cod_merge, CoOccurringSketch, FrequentDirectionsSketch, SketchConfig};
use codsketch::verify::trial_instance;
use codsketch::{Error, FormatError};
use nalgebra::DMatrix;
use rayon::prelude::*;

const SLACK: f64 = 1e-9;
// Absolute allowance for gemm rounding when the shrink sum is exactly zero.
const ROUNDING: f64 = 1e-13;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("C1  co-occurring bound", c1_bound),
        ("C2  shrink audit", c2_audit),
        ("C3  frequent directions bound", c3_fd_bound),
        ("C4  reduction to frequent directions", c4_reduction),
        ("C5  fd-amm bound", c5_fdamm),
        ("C6  low-rank projection", c6_low_rank),
        ("C7  4-way merge", c7_merge),
        ("C8  method ordering (80,8)", c8_ordering),
        ("C9  error decay slopes (80,80)", c9_slopes),
        ("C10 unbiased estimators", c10_unbiased),
        ("C11 linear running time", c11_timing),
        ("C12 formats and verify", c12_io),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let res = f();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("[PASS] {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn spec_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

fn sing(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn amm_err(x: &DMatrix<f64>, y: &DMatrix<f64>, bx: &DMatrix<f64>, by: &DMatrix<f64>) -> f64 {
    spec_norm(&(x * y.transpose() - bx * by.transpose()))
}

fn cod(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize) -> CoOccurringSketch {
    let mut s = CoOccurringSketch::new(SketchConfig::new(ell, x.nrows(), y.nrows()).unwrap());
    for j in 0..x.ncols() {
        s.update_slices(x.column(j).as_slice(), y.column(j).as_slice()).unwrap();
    }
    s
}

fn frob(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

fn worst(ratios: &[f64]) -> f64 {
    ratios.iter().copied().fold(0.0, f64::max)
}

fn c1_bound() -> Outcome {
    let t = Instant::now();
    let mut ratios = Vec::new();
    for trial in 0..100 {
        let inst = trial_instance(1, trial, None);
        let s = cod(&inst.x, &inst.y, inst.ell);
        let err = amm_err(&inst.x, &inst.y, s.bx(), s.by());
        let bound = 2.0 * frob(&inst.x) * frob(&inst.y) / inst.ell as f64;
        if err > bound * (1.0 + SLACK) {
            return Err(format!("trial {trial}: error {err:e} > bound {bound:e}"));
        }
        ratios.push(err / bound);
    }
    let elapsed = t.elapsed();
    if elapsed > Duration::from_secs(120) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("100/100 within bound, worst error/bound {:.3}", worst(&ratios)))
}

fn c2_audit() -> Outcome {
    let mut ratios = Vec::new();
    for trial in 0..100 {
        let inst = trial_instance(1, trial, None);
        let s = cod(&inst.x, &inst.y, inst.ell);
        let err = amm_err(&inst.x, &inst.y, s.bx(), s.by());
        let sum: f64 = s.delta_log().iter().sum();
        let scale = frob(&inst.x) * frob(&inst.y);
        let ceiling = 2.0 * scale / inst.ell as f64;
        if err > sum * (1.0 + SLACK) + ROUNDING * scale {
            return Err(format!("trial {trial}: error {err:e} > shrink sum {sum:e}"));
        }
        if sum > ceiling * (1.0 + SLACK) {
            return Err(format!("trial {trial}: shrink sum {sum:e} > ceiling {ceiling:e}"));
        }
        if sum > 0.0 {
            ratios.push(err / sum);
        }
    }
    Ok(format!("error <= sum <= ceiling on 100/100, worst error/sum {:.3}", worst(&ratios)))
}

fn c3_fd_bound() -> Outcome {
    let mut ratios = Vec::new();
    for trial in 0..100 {
        let inst = trial_instance(2, trial, None);
        let x = &inst.x;
        let mut fd = FrequentDirectionsSketch::new(inst.ell, x.nrows()).unwrap();
        for j in 0..x.ncols() {
            fd.update(x.column(j).as_slice()).unwrap();
        }
        let d = fd.sketch();
        let err = spec_norm(&(x * x.transpose() - d * d.transpose()));
        let bound = 2.0 * frob(x).powi(2) / inst.ell as f64;
        if err > bound * (1.0 + SLACK) {
            return Err(format!("trial {trial}: error {err:e} > bound {bound:e}"));
        }
        ratios.push(err / bound);
    }
    Ok(format!("100/100 within bound, worst {:.3}", worst(&ratios)))
}

fn c4_reduction() -> Outcome {
    let mut gaps = Vec::new();
    for trial in 0..20u64 {
        let ell = [4, 8, 16][(trial % 3) as usize];
        let m = 20 + (trial as usize * 7) % 25;
        let n = 50 + (trial as usize * 37) % 400;
        let x = gaussian(m, n, 400 + trial, 0);
        let s = cod(&x, &x, ell);
        let mut fd = FrequentDirectionsSketch::new(ell, m).unwrap();
        for j in 0..n {
            fd.update(x.column(j).as_slice()).unwrap();
        }
        let d = fd.sketch();
        let ddt = d * d.transpose();
        let gap = frob(&(s.bx() * s.by().transpose() - &ddt)) / frob(&ddt);
        if gap.is_nan() || gap > 1e-9 {
            return Err(format!("trial {trial}: relative gap {gap:e} (m={m}, n={n}, ell={ell})"));
        }
        gaps.push(gap);
    }
    Ok(format!("20/20, largest relative gap {:.2e}", worst(&gaps)))
}

fn c5_fdamm() -> Outcome {
    let mut ratios = Vec::new();
    for trial in 0..50u64 {
        let eps = [0.25, 0.125, 0.0625][(trial % 3) as usize];
        let ell = (1.0f64 / eps).ceil() as usize;
        let inst = trial_instance(3, trial, Some(ell));
        let (bx, by) = fd_amm(&inst.x, &inst.y, ell).unwrap();
        let err = amm_err(&inst.x, &inst.y, &bx, &by);
        let bound = eps * (frob(&inst.x).powi(2) + frob(&inst.y).powi(2));
        if err > bound * (1.0 + SLACK) {
            return Err(format!("trial {trial}: error {err:e} > bound {bound:e}"));
        }
        ratios.push(err / bound);
    }
    Ok(format!("50/50 within bound, worst {:.3}", worst(&ratios)))
}

fn c6_low_rank() -> Outcome {
    let eps = 0.5;
    let (n, m) = (600, 60);
    let (mut evaluated, mut skipped, mut max_ratio) = (0, 0, 0.0f64);
    for trial in 0..20u64 {
        let k = [1, 2, 4][(trial % 3) as usize];
        let (x, y) = gen_shared_factor(n, m, m, k + 1, 9000 + trial).unwrap();
        let sx = sing(&x);
        let sy = sing(&y);
        let sxy = sing(&(&x * y.transpose()));
        let sr = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>() / (s[0] * s[0]);
        let need = 8.0 * (sr(&sx) * sr(&sy)).sqrt() / eps * sx[0] * sy[0] / sxy[k];
        let mut ell = need.ceil() as usize;
        ell += ell % 2;
        if ell > m {
            skipped += 1;
            continue;
        }
        let s = cod(&x, &y, ell);
        let svd = (s.bx() * s.by().transpose()).svd(true, true);
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let u = svd.u.as_ref().unwrap();
        let vt = svd.v_t.as_ref().unwrap();
        let uk = DMatrix::from_columns(&order[..k].iter().map(|&i| u.column(i)).collect::<Vec<_>>());
        let vk = DMatrix::from_rows(&order[..k].iter().map(|&i| vt.row(i)).collect::<Vec<_>>()).transpose();
        let px = &uk * (uk.transpose() * &x);
        let py = &vk * (vk.transpose() * &y);
        let ratio = amm_err(&x, &y, &px, &py) / sxy[k];
        if ratio > 1.0 + eps {
            return Err(format!("trial {trial}: k={k}, ell={ell}, ratio {ratio:.4}"));
        }
        evaluated += 1;
        max_ratio = max_ratio.max(ratio);
    }
    if evaluated == 0 {
        return Err(format!("no instance met the premise ({skipped} skipped)"));
    }
    Ok(format!("{evaluated} evaluated, {skipped} skipped, worst ratio {max_ratio:.4}"))
}

fn c7_merge() -> Outcome {
    let mut ratios = Vec::new();
    for trial in 0..50 {
        let inst = trial_instance(4, trial, None);
        let n = inst.x.ncols();
        let mut merged: Option<CoOccurringSketch> = None;
        for c in 0..4 {
            let (a, b) = (c * n / 4, (c + 1) * n / 4);
            let part = cod(
                &inst.x.columns(a, b - a).into_owned(),
                &inst.y.columns(a, b - a).into_owned(),
                inst.ell,
            );
            merged = Some(match merged {
                None => part,
                Some(acc) => cod_merge(&acc, &part).unwrap(),
            });
        }
        let s = merged.unwrap();
        let err = amm_err(&inst.x, &inst.y, s.bx(), s.by());
        let bound = 2.0 * frob(&inst.x) * frob(&inst.y) / inst.ell as f64;
        if err > bound * (1.0 + SLACK) {
            return Err(format!("trial {trial}: error {err:e} > bound {bound:e}"));
        }
        ratios.push(err / bound);
    }
    Ok(format!("50/50 within bound, worst {:.3}", worst(&ratios)))
}

fn c8_ordering() -> Outcome {
    let (x, y) = gen_low_rank(&LowRankModelSpec::noise_free(2000, 200, 300, 80, 8, 1)).unwrap();
    let xy = spec_norm(&(&x * y.transpose()));
    let s = cod(&x, &y, 32);
    let cod_err = amm_err(&x, &y, s.bx(), s.by());
    let (fx, fy) = fd_amm(&x, &y, 32).unwrap();
    let fd_err = amm_err(&x, &y, &fx, &fy);
    let (bx, by) = Method::Brute.run(&x, &y, 16, 0).unwrap();
    let brute_err = amm_err(&x, &y, &bx, &by);
    let detail = format!(
        "cod(32) {:.2e}, fd-amm(32) {:.2e}, brute(16) {:.2e} (relative to ||XY^T||)",
        cod_err / xy,
        fd_err / xy,
        brute_err / xy
    );
    if cod_err < fd_err && brute_err <= 1e-8 * xy {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// Least-squares slope of ln(err) against ln(ell).
fn slope(ells: &[usize], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ells.iter().map(|&l| (l as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn c9_slopes() -> Outcome {
    let ells = [8, 16, 32, 64, 128];
    let (x, y) = gen_low_rank(&LowRankModelSpec::noise_free(2000, 200, 300, 80, 80, 1)).unwrap();
    let cod_errs: Vec<f64> = ells
        .iter()
        .map(|&l| {
            let s = cod(&x, &y, l);
            amm_err(&x, &y, s.bx(), s.by())
        })
        .collect();
    let cod_slope = slope(&ells, &cod_errs);
    let mut parts = vec![format!("cod {cod_slope:.3}")];
    let mut ok = true;
    for method in [Method::Sampling, Method::Projection, Method::Hashing] {
        let means: Vec<f64> = ells
            .iter()
            .map(|&l| {
                let total: f64 = (0..50u64)
                    .into_par_iter()
                    .map(|seed| {
                        let (bx, by) = method.run(&x, &y, l, seed).unwrap();
                        amm_err(&x, &y, &bx, &by)
                    })
                    .sum();
                total / 50.0
            })
            .collect();
        let s = slope(&ells, &means);
        parts.push(format!("{} {s:.3}", method.name()));
        ok &= (-1.0..=-0.2).contains(&s) && cod_slope < s;
    }
    let detail = format!("slopes: {}", parts.join(", "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c10_unbiased() -> Outcome {
    // Same fixed instance as `cod verify --check unbiased`.
    let x = gaussian(6, 30, 0xb1a5, 0);
    let y = gaussian(8, 30, 0xb1a5, 1);
    let truth = &x * y.transpose();
    let seeds = 200;
    let mut parts = Vec::new();
    let mut ok = true;
    for method in [Method::Sampling, Method::Projection, Method::Hashing] {
        let ests: Vec<DMatrix<f64>> = (0..seeds as u64)
            .map(|s| {
                let (bx, by) = method.run(&x, &y, 4, s).unwrap();
                bx * by.transpose()
            })
            .collect();
        let mut within = 0;
        for i in 0..truth.len() {
            let vals: Vec<f64> = ests.iter().map(|e| e[i]).collect();
            let mean = vals.iter().sum::<f64>() / seeds as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
            let se = (var / seeds as f64).sqrt();
            if (mean - truth[i]).abs() <= 3.0 * se {
                within += 1;
            }
        }
        let frac = within as f64 / truth.len() as f64;
        ok &= frac >= 0.99;
        parts.push(format!("{} {frac:.3}", method.name()));
    }
    let detail = format!("fraction within 3 s.e.: {}", parts.join(", "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c11_timing() -> Outcome {
    let (mx, my, ell) = (200, 300, 32);
    let x = gaussian(mx, 4000, 11, 0);
    let y = gaussian(my, 4000, 11, 1);
    let time = |n: usize| {
        let mut runs: Vec<f64> = (0..7)
            .map(|_| {
                let t = Instant::now();
                let mut s = CoOccurringSketch::new(SketchConfig::new(ell, mx, my).unwrap());
                for j in 0..n {
                    s.update_slices(x.column(j).as_slice(), y.column(j).as_slice()).unwrap();
                }
                std::hint::black_box(s.fill());
                t.elapsed().as_secs_f64()
            })
            .collect();
        runs.sort_by(f64::total_cmp);
        runs[runs.len() / 2]
    };
    time(1000);
    let (t2, t4) = (time(2000), time(4000));
    let ratio = t4 / t2;
    let detail = format!("n=2000 {t2:.4}s, n=4000 {t4:.4}s, ratio {ratio:.2}");
    if (1.4..=2.6).contains(&ratio) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bitwise(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(p, q)| p.to_bits() == q.to_bits())
}

fn c12_io() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for trial in 0..10 {
        let inst = trial_instance(5, trial, None);
        let path = dir.path().join(format!("s{trial}.cod"));
        write_stream(&path, &inst.x, &inst.y).map_err(|e| e.to_string())?;
        let (x2, y2) = StreamReader::open(&path).and_then(|mut r| r.read_all()).map_err(|e| e.to_string())?;
        if !bitwise(&x2, &inst.x) || !bitwise(&y2, &inst.y) {
            return Err(format!("trial {trial}: stream round trip differs"));
        }
        let s = cod(&inst.x, &inst.y, inst.ell);
        let bytes = SketchSnapshot::from_cod(&s).to_bytes();
        let back = SketchSnapshot::from_bytes(&bytes).map_err(|e| e.to_string())?;
        if back.to_bytes() != bytes {
            return Err(format!("trial {trial}: snapshot round trip differs"));
        }
        let restored = back.into_cod().map_err(|e| e.to_string())?;
        if !bitwise(restored.bx(), s.bx()) || !bitwise(restored.by(), s.by()) {
            return Err(format!("trial {trial}: restored sketch differs"));
        }

        let raw = std::fs::read(&path).map_err(|e| e.to_string())?;
        let cut = dir.path().join(format!("t{trial}.cod"));
        std::fs::write(&cut, &raw[..raw.len() - 3]).map_err(|e| e.to_string())?;
        let truncated = StreamReader::open(&cut).and_then(|mut r| r.read_all());
        if !matches!(truncated, Err(Error::Format(FormatError::Corrupt { .. }))) {
            return Err(format!("trial {trial}: truncated stream gave {truncated:?}"));
        }
        let snap_cut = SketchSnapshot::from_bytes(&bytes[..bytes.len() - 5]);
        if !matches!(snap_cut, Err(FormatError::Corrupt { .. })) {
            return Err(format!("trial {trial}: truncated snapshot gave {snap_cut:?}"));
        }
    }
    let out = Command::new(env!("CARGO_BIN_EXE_cod"))
        .arg("verify")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!(
            "verify exited {:?}:\n{}",
            out.status.code(),
            String::from_utf8_lossy(&out.stdout)
        ));
    }
    Ok("10 stream and snapshot round trips bitwise equal, truncations typed, verify exit 0".into())
}
