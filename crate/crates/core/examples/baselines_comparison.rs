//! Run every method once on the same stream and print error and wall time.
//! Randomized methods are averaged over a handful of seeds.
//!
//! ```bash
//! cargo run --release --example baselines_comparison
//! ```

use std::time::Instant;

use codsketch::baselines::Method;
use codsketch::evaluation::{gen_low_rank, LowRankModelSpec, ProductOracle};

fn main() -> codsketch::Result<()> {
    let ell = 32;
    let seeds = 10;
    let spec = LowRankModelSpec::noise_free(2000, 200, 300, 80, 8, 42);
    let (x, y) = gen_low_rank(&spec)?;
    let oracle = ProductOracle::new(&x, &y)?;

    println!("{:>11} {:>12} {:>12} {:>10}", "method", "spectral", "frobenius", "time (s)");
    for method in Method::ALL {
        let runs = if method.is_randomized() { seeds } else { 1 };
        let (mut spec_sum, mut frob_sum, mut secs) = (0.0, 0.0, 0.0);
        for seed in 0..runs {
            let t = Instant::now();
            let (bx, by) = method.run(&x, &y, ell, seed)?;
            secs += t.elapsed().as_secs_f64();
            let e = oracle.errors(&bx, &by)?;
            spec_sum += e.spectral;
            frob_sum += e.frobenius;
        }
        let r = runs as f64;
        println!(
            "{:>11} {:>12.4e} {:>12.4e} {:>10.4}",
            method.name(),
            spec_sum / r,
            frob_sum / r,
            secs / r
        );
    }
    Ok(())
}
