//! Choose a sketch length from a target accuracy.
//!
//! ```bash
//! cargo run --release --example sketch_length
//! cargo run --release --example sketch_length -- 0.1
//! ```

use codsketch::evaluation::{gen_low_rank, theoretical_bounds, LowRankModelSpec};
use codsketch::sketch::{sketch_length_for, LengthMode};

fn main() -> codsketch::Result<()> {
    let eps: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.25);
    println!("frobenius (data-free): ell = {}", sketch_length_for(eps, LengthMode::Frobenius, None)?);

    for (kx, ky) in [(40, 40), (40, 4), (4, 4)] {
        let (x, y) = gen_low_rank(&LowRankModelSpec::noise_free(1000, 100, 120, kx, ky, 1).with_noise(100.0, 100.0))?;
        let b = theoretical_bounds(&x, &y, 2, 1)?;
        let s = b.stats;
        let spectral = sketch_length_for(eps, LengthMode::Spectral, Some(&s))?;
        let lowrank = sketch_length_for(eps, LengthMode::LowRank, Some(&s))?;
        println!(
            "kx={kx:>2} ky={ky:>2}  sr(X)={:.1} sr(Y)={:.1}  spectral ell={spectral}  lowrank(k=1) ell={lowrank}",
            s.sr_x, s.sr_y
        );
    }
    Ok(())
}
