use codsketch::evaluation::generators::gaussian;
use codsketch::sketch::{cod_merge, CoOccurringSketch, FrequentDirectionsSketch, SketchConfig};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn spec_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.singular_values().max()
    }
}

// (ell, mx, my, n, data seed), small enough for a dense oracle per prefix.
fn instance() -> impl Strategy<Value = (usize, usize, usize, usize, u64)> {
    prop::sample::select(vec![2usize, 4, 6, 8]).prop_flat_map(|ell| (Just(ell), ell..=20usize, ell..=20usize, 1..=60usize, any::<u64>()))
}

fn stream(mx: usize, my: usize, n: usize, seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
    // Column scales spread over four orders of magnitude.
    let mut x = gaussian(mx, n, seed, 0);
    let mut y = gaussian(my, n, seed, 1);
    let s = gaussian(1, n, seed, 2);
    for j in 0..n {
        let c = 10f64.powf(s[j].clamp(-2.0, 2.0));
        x.column_mut(j).scale_mut(c);
        y.column_mut(j).scale_mut(c.sqrt());
    }
    (x, y)
}

fn sketch(x: &DMatrix<f64>, y: &DMatrix<f64>, ell: usize) -> CoOccurringSketch {
    let mut s = CoOccurringSketch::new(SketchConfig::new(ell, x.nrows(), y.nrows()).unwrap());
    for j in 0..x.ncols() {
        s.update_slices(x.column(j).as_slice(), y.column(j).as_slice()).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn error_within_bound((ell, mx, my, n, seed) in instance()) {
        let (x, y) = stream(mx, my, n, seed);
        let s = sketch(&x, &y, ell);
        let err = spec_norm(&(&x * y.transpose() - s.product()));
        let bound = 2.0 * x.norm() * y.norm() / ell as f64;
        prop_assert!(err <= bound * (1.0 + 1e-9), "error {err:e} bound {bound:e}");
    }

    #[test]
    fn shrink_sum_dominates_error_at_every_prefix((ell, mx, my, n, seed) in instance()) {
        let (x, y) = stream(mx, my, n, seed);
        let mut s = CoOccurringSketch::new(SketchConfig::new(ell, mx, my).unwrap());
        for j in 0..n {
            s.update_slices(x.column(j).as_slice(), y.column(j).as_slice()).unwrap();
            let (px, py) = (x.columns(0, j + 1), y.columns(0, j + 1));
            let scale = px.norm() * py.norm();
            let err = spec_norm(&(px * py.transpose() - s.product()));
            let sum: f64 = s.delta_log().iter().sum();
            prop_assert!(err <= sum * (1.0 + 1e-9) + 1e-13 * scale, "prefix {j}: error {err:e} > sum {sum:e}");
            prop_assert!(sum <= 2.0 * scale / ell as f64 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn trailing_half_is_zero_after_every_shrink((ell, mx, my, n, seed) in instance()) {
        let (x, y) = stream(mx, my, n, seed);
        let mut s = CoOccurringSketch::new(SketchConfig::new(ell, mx, my).unwrap());
        for j in 0..n {
            let report = s.update_slices(x.column(j).as_slice(), y.column(j).as_slice()).unwrap();
            if let Some(r) = report {
                prop_assert!(s.fill() <= ell / 2);
                prop_assert_eq!(r.retained, s.fill());
                prop_assert_eq!(r.delta, r.sigma[ell / 2 - 1]);
                for c in ell / 2..ell {
                    prop_assert!(s.bx().column(c).iter().all(|v| *v == 0.0));
                    prop_assert!(s.by().column(c).iter().all(|v| *v == 0.0));
                }
            }
            for c in s.fill()..ell {
                prop_assert!(s.bx().column(c).iter().all(|v| *v == 0.0));
                prop_assert!(s.by().column(c).iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn scaling_x_scales_the_product((ell, mx, my, n, seed) in instance(), c in 0.01f64..100.0) {
        let (x, y) = stream(mx, my, n, seed);
        let base = sketch(&x, &y, ell).product();
        let scaled = sketch(&(&x * c), &y, ell).product();
        let gap = (scaled - &base * c).norm();
        prop_assert!(gap <= 1e-9 * c * base.norm().max(1e-300), "gap {gap:e}");
    }

    #[test]
    fn identical_inputs_match_frequent_directions(ell in prop::sample::select(vec![4usize, 6, 8]), m in 8usize..=20, n in 1usize..=80, seed in any::<u64>()) {
        let x = gaussian(m, n, seed, 0);
        let s = sketch(&x, &x, ell);
        let mut fd = FrequentDirectionsSketch::new(ell, m).unwrap();
        for j in 0..n {
            fd.update(x.column(j).as_slice()).unwrap();
        }
        let cov = fd.covariance();
        let gap = (s.product() - &cov).norm();
        prop_assert!(gap <= 1e-9 * cov.norm(), "gap {gap:e} vs {:e}", cov.norm());
    }

    #[test]
    fn chunked_merge_within_bound((ell, mx, my, n, seed) in instance(), chunks in 1usize..=5) {
        let (x, y) = stream(mx, my, n, seed);
        let mut merged: Option<CoOccurringSketch> = None;
        for c in 0..chunks {
            let (a, b) = (c * n / chunks, (c + 1) * n / chunks);
            let part = sketch(&x.columns(a, b - a).into_owned(), &y.columns(a, b - a).into_owned(), ell);
            merged = Some(match merged {
                None => part,
                Some(acc) => cod_merge(&acc, &part).unwrap(),
            });
        }
        let s = merged.unwrap();
        let err = spec_norm(&(&x * y.transpose() - s.product()));
        let bound = 2.0 * x.norm() * y.norm() / ell as f64;
        prop_assert!(err <= bound * (1.0 + 1e-9));
        prop_assert_eq!(s.columns_seen(), n as u64);
        prop_assert!(s.audit().holds);
    }

    #[test]
    fn fd_within_bound(ell in prop::sample::select(vec![2usize, 4, 8]), m in 8usize..=30, n in 1usize..=200, seed in any::<u64>()) {
        let x = gaussian(m, n, seed, 0);
        let mut fd = FrequentDirectionsSketch::new(ell, m).unwrap();
        for j in 0..n {
            fd.update(x.column(j).as_slice()).unwrap();
        }
        let err = spec_norm(&(&x * x.transpose() - fd.covariance()));
        prop_assert!(err <= 2.0 * x.norm_squared() / ell as f64 * (1.0 + 1e-9));
    }
}

#[test]
fn half_split_merge_example_in_both_orders() {
    let x = gaussian(8, 40, 21, 0);
    let y = gaussian(10, 40, 21, 1);
    let bound = 2.0 * x.norm() * y.norm() / 4.0;
    let first = sketch(&x.columns(0, 20).into_owned(), &y.columns(0, 20).into_owned(), 4);
    let second = sketch(&x.columns(20, 20).into_owned(), &y.columns(20, 20).into_owned(), 4);
    for merged in [cod_merge(&first, &second).unwrap(), cod_merge(&second, &first).unwrap()] {
        let err = spec_norm(&(&x * y.transpose() - merged.product()));
        assert!(err <= bound * (1.0 + 1e-9), "{err} > {bound}");
    }
}

#[test]
fn small_stream_example() {
    let x = gaussian(3, 6, 8, 0);
    let y = gaussian(4, 6, 8, 1);
    let s = sketch(&x, &y, 2);
    let err = spec_norm(&(&x * y.transpose() - s.product()));
    assert!(err <= x.norm() * y.norm() * (1.0 + 1e-9));
}

#[test]
fn fd_small_example() {
    let x = gaussian(5, 20, 4, 0);
    let mut fd = FrequentDirectionsSketch::new(2, 5).unwrap();
    for j in 0..20 {
        fd.update(x.column(j).as_slice()).unwrap();
    }
    let err = spec_norm(&(&x * x.transpose() - fd.covariance()));
    assert!(err <= x.norm_squared() * (1.0 + 1e-9));
}

#[test]
fn full_buffer_error_is_covered_by_one_shrink() {
    let x = gaussian(12, 6, 31, 0);
    let y = gaussian(9, 6, 31, 1);
    let s = sketch(&x, &y, 6);
    assert_eq!(s.delta_log().len(), 1);
    let err = spec_norm(&(&x * y.transpose() - s.product()));
    assert!(err <= s.delta_log()[0] * (1.0 + 1e-9));
}
