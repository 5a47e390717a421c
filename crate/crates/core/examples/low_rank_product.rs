//! Rank-k approximation of a product from the sketch's singular subspaces,
//! against the best possible rank-k error.
//!
//! ```bash
//! cargo run --release --example low_rank_product
//! ```

use codsketch::evaluation::{gen_shared_factor, low_rank_product_approx, theoretical_bounds};
use codsketch::sketch::{sketch_length_for, CoOccurringSketch, LengthMode, SketchConfig};

fn main() -> codsketch::Result<()> {
    let (n, mx, my) = (600, 60, 60);
    for k in [1, 2, 3] {
        let (x, y) = gen_shared_factor(n, mx, my, k + 1, 100 + k as u64)?;
        let stats = theoretical_bounds(&x, &y, 2, k)?.stats;
        let needed = sketch_length_for(0.5, LengthMode::LowRank, Some(&stats))?;
        println!("k={k}: length for eps=0.5 is {needed}");
        for ell in [2 * k + 2, 4 * k + 4, needed.min(mx)] {
            let mut sk = CoOccurringSketch::new(SketchConfig::new(ell, mx, my)?);
            for j in 0..n {
                sk.update_slices(x.column(j).as_slice(), y.column(j).as_slice())?;
            }
            let (bx, by) = sk.result();
            let lr = low_rank_product_approx(&bx, &by, &x, &y, k)?;
            match lr.ratio {
                Some(r) => println!("  ell={ell:>3}  error={:.4e}  sigma_k+1={:.4e}  ratio={r:.4}", lr.error, lr.sigma_k1),
                None => println!("  ell={ell:>3}  error={:.4e}  (rank <= k)", lr.error),
            }
        }
    }
    Ok(())
}
