//! Frequent directions on its own, and the observation that co-occurring
//! directions fed `(x, x)` reproduces it.
//!
//! ```bash
//! cargo run --release --example frequent_directions
//! ```

use codsketch::evaluation::generators::gaussian;
use codsketch::evaluation::spectral_norm;
use codsketch::linalg::frobenius_sq;
use codsketch::sketch::{CoOccurringSketch, FrequentDirectionsSketch, SketchConfig};

fn main() -> codsketch::Result<()> {
    let (m, n) = (60, 1500);
    let x = gaussian(m, 12, 3, 0) * gaussian(12, n, 3, 1) + gaussian(m, n, 3, 2) * 0.05;
    let cov = &x * x.transpose();

    for ell in [8, 16, 32] {
        let mut fd = FrequentDirectionsSketch::new(ell, m)?;
        let mut cod = CoOccurringSketch::new(SketchConfig::new(ell, m, m)?);
        for j in 0..n {
            let col = x.column(j);
            fd.update(col.as_slice())?;
            cod.update_slices(col.as_slice(), col.as_slice())?;
        }
        let d = fd.covariance();
        let err = spectral_norm(&(&cov - &d))?;
        let gap = (cod.product() - &d).norm() / d.norm();
        println!(
            "ell={ell:>3}  ||XX^T - DD^T|| = {err:.4e}  bound = {:.4e}  cod vs fd (rel frob) = {gap:.1e}",
            2.0 * frobenius_sq(&x) / ell as f64
        );
    }
    Ok(())
}
