//! Error versus sketch length for every method on the three synthetic regimes.
//!
//! Prints one table per `(kx, ky)` regime: the spectral error of each
//! deterministic method and the mean over seeds for the randomized ones.
//!
//! ```bash
//! cargo run --release --example ell_sweep
//! cargo run --release --example ell_sweep -- 10   # seeds per randomized cell
//! ```

use codsketch::baselines::Method;
use codsketch::bench::{run_bench_on, BenchPlan, DataSource, SeedCell};
use codsketch::evaluation::{gen_low_rank, LowRankModelSpec};

fn main() -> codsketch::Result<()> {
    let repeats: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let ells = vec![8, 16, 32, 64, 128];

    for (kx, ky) in [(80, 80), (80, 8), (8, 8)] {
        let spec = LowRankModelSpec::noise_free(2000, 200, 300, kx, ky, 7);
        let (x, y) = gen_low_rank(&spec)?;
        let xy_norm = codsketch::evaluation::spectral_norm(&(&x * y.transpose()))?;

        let mut plan = BenchPlan::new(DataSource::Generated(spec), Method::ALL.to_vec(), ells.clone());
        plan.repeats = repeats;
        let rows = run_bench_on(&plan, &x, &y, None)?;

        println!("\nregime kx={kx} ky={ky}  (errors relative to ||XY^T|| = {xy_norm:.3})");
        print!("{:>11}", "ell");
        for ell in &ells {
            print!("{ell:>11}");
        }
        println!();
        for method in Method::ALL {
            print!("{:>11}", method.name());
            for &ell in &ells {
                let wanted = if method.is_randomized() { SeedCell::Mean } else { SeedCell::Deterministic };
                let cell = rows
                    .iter()
                    .find(|r| r.method == method && r.ell == ell && r.seed == wanted)
                    .and_then(|r| r.spectral_error);
                match cell {
                    Some(e) => print!("{:>11.2e}", e / xy_norm),
                    None => print!("{:>11}", "-"),
                }
            }
            println!();
        }
    }
    Ok(())
}
