//! Split a stream into chunks, sketch each chunk on its own thread, then
//! merge. The merged sketch keeps the single-pass guarantee.
//!
//! ```bash
//! cargo run --release --example merge_parallel
//! ```

use codsketch::evaluation::{amm_error, gen_low_rank, LowRankModelSpec};
use codsketch::sketch::{cod_merge, CoOccurringSketch, SketchConfig};
use rayon::prelude::*;

fn main() -> codsketch::Result<()> {
    let spec = LowRankModelSpec::noise_free(4000, 100, 80, 30, 30, 5).with_noise(100.0, 100.0);
    let (x, y) = gen_low_rank(&spec)?;
    let cfg = SketchConfig::new(16, spec.mx, spec.my)?;

    for chunks in [1usize, 2, 4, 8] {
        let width = spec.n.div_ceil(chunks);
        let parts: Vec<CoOccurringSketch> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut sk = CoOccurringSketch::new(cfg);
                for j in c * width..((c + 1) * width).min(spec.n) {
                    sk.update_slices(x.column(j).as_slice(), y.column(j).as_slice())?;
                }
                Ok(sk)
            })
            .collect::<codsketch::Result<_>>()?;
        let merged = parts[1..].iter().try_fold(parts[0].clone(), |acc, p| cod_merge(&acc, p))?;
        let (bx, by) = merged.result();
        let err = amm_error(&x, &y, &bx, &by)?;
        println!(
            "chunks={chunks}  error={err:.4e}  bound={:.4e}  shrinks={}",
            merged.error_bound(),
            merged.delta_log().len()
        );
    }
    Ok(())
}
