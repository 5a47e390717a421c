//! Stream a noisy low-rank pair through co-occurring directions and compare
//! the achieved error with the guarantee and the shrink log.
//!
//! ```bash
//! cargo run --release --example co_occurring_directions
//! ```

use codsketch::evaluation::{gen_low_rank, spectral_norm, LowRankModelSpec, ProductOracle};
use codsketch::sketch::{CoOccurringSketch, SketchConfig};

fn main() -> codsketch::Result<()> {
    let spec = LowRankModelSpec::noise_free(3000, 120, 150, 40, 20, 11).with_noise(1000.0, 100.0);
    let (x, y) = gen_low_rank(&spec)?;
    let oracle = ProductOracle::new(&x, &y)?;
    let xy_norm = spectral_norm(oracle.product().expect("small enough for a dense product"))?;

    println!("||XY^T|| = {xy_norm:.4}");
    println!("{:>5} {:>10} {:>12} {:>12} {:>12} {:>8}", "ell", "shrinks", "error", "sum delta", "bound", "rel");
    for ell in [4, 8, 16, 32, 64] {
        let mut sk = CoOccurringSketch::new(SketchConfig::new(ell, spec.mx, spec.my)?);
        let mut shrinks = 0;
        for j in 0..spec.n {
            if sk.update_slices(x.column(j).as_slice(), y.column(j).as_slice())?.is_some() {
                shrinks += 1;
            }
        }
        let (bx, by) = sk.result();
        let err = oracle.errors(&bx, &by)?.spectral;
        let audit = sk.audit();
        println!(
            "{ell:>5} {shrinks:>10} {err:>12.4e} {:>12.4e} {:>12.4e} {:>8.4}",
            audit.delta_sum,
            sk.error_bound(),
            err / xy_norm
        );
        assert!(err <= audit.delta_sum * (1.0 + 1e-9) + 1e-12 * xy_norm);
        assert!(audit.holds);
    }
    Ok(())
}
