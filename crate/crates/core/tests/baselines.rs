use codsketch::baselines::{brute_force_amm, fd_amm, Method};
use codsketch::evaluation::generators::gaussian;
use codsketch::evaluation::{amm_error, gen_low_rank, nuclear_norm, spectral_norm, theoretical_bounds, LowRankModelSpec};
use codsketch::sketch::FrequentDirectionsSketch;
use nalgebra::DMatrix;

fn sorted_sv(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn oracle_err(x: &DMatrix<f64>, y: &DMatrix<f64>, bx: &DMatrix<f64>, by: &DMatrix<f64>) -> f64 {
    (x * y.transpose() - bx * by.transpose()).singular_values().max()
}

#[test]
fn brute_force_error_is_next_singular_value() {
    let x = gaussian(6, 30, 12, 0);
    let y = gaussian(8, 30, 12, 1);
    let (bx, by) = brute_force_amm(&x, &y, 3).unwrap();
    let sigma = sorted_sv(&(&x * y.transpose()));
    let err = oracle_err(&x, &y, &bx, &by);
    assert!((err - sigma[3]).abs() <= 1e-9 * sigma[0], "{err} vs {}", sigma[3]);
    assert!((amm_error(&x, &y, &bx, &by).unwrap() - sigma[3]).abs() <= 1e-9 * sigma[0]);
}

#[test]
fn brute_force_exact_once_ell_reaches_rank() {
    let (x, y) = gen_low_rank(&LowRankModelSpec::noise_free(300, 40, 50, 12, 5, 3)).unwrap();
    let xy = spectral_norm(&(&x * y.transpose())).unwrap();
    for ell in [5, 8, 12] {
        let (bx, by) = brute_force_amm(&x, &y, ell).unwrap();
        assert!(oracle_err(&x, &y, &bx, &by) <= 1e-10 * xy);
    }
}

#[test]
fn randomized_methods_are_pure_functions_of_seed() {
    let x = gaussian(7, 50, 1, 0);
    let y = gaussian(9, 50, 1, 1);
    for method in [Method::Sampling, Method::Projection, Method::Hashing] {
        let (a1, b1) = method.run(&x, &y, 5, 42).unwrap();
        let (a2, b2) = method.run(&x, &y, 5, 42).unwrap();
        let (a3, _) = method.run(&x, &y, 5, 43).unwrap();
        let bits = |m: &DMatrix<f64>| m.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a1), bits(&a2), "{method}");
        assert_eq!(bits(&b1), bits(&b2), "{method}");
        assert_ne!(bits(&a1), bits(&a3), "{method}");
    }
}

// Monte-Carlo mean over 200 seeds against the exact product, entrywise.
#[test]
fn randomized_estimators_are_unbiased() {
    let x = gaussian(6, 30, 0xb1a5, 0);
    let y = gaussian(8, 30, 0xb1a5, 1);
    let truth = &x * y.transpose();
    for method in [Method::Sampling, Method::Projection, Method::Hashing] {
        let mut sum = DMatrix::<f64>::zeros(6, 8);
        let mut sq = DMatrix::<f64>::zeros(6, 8);
        for s in 0..200 {
            let (bx, by) = method.run(&x, &y, 4, s).unwrap();
            let est = bx * by.transpose();
            sq += est.component_mul(&est);
            sum += est;
        }
        let mean = sum / 200.0;
        let var = (sq / 200.0 - mean.component_mul(&mean)) * (200.0 / 199.0);
        let within = (0..truth.len())
            .filter(|&i| (mean[i] - truth[i]).abs() <= 3.0 * (var[i].max(0.0) / 200.0).sqrt())
            .count();
        assert!(within as f64 >= 0.99 * truth.len() as f64, "{method}: {within}/{}", truth.len());
    }
}

// Error <= eps ||X||_F ||Y||_F with ell = 40 / eps^2 on at least 95 of 100 seeds.
#[test]
fn randomized_error_guarantee_holds_with_high_frequency() {
    let x = gaussian(20, 300, 8, 0);
    let y = gaussian(30, 300, 8, 1);
    let eps = 0.5;
    let ell = (40.0 / (eps * eps)) as usize;
    let target = eps * x.norm() * y.norm();
    for method in [Method::Sampling, Method::Projection, Method::Hashing] {
        let hits = (0..100)
            .filter(|&s| {
                let (bx, by) = method.run(&x, &y, ell, s).unwrap();
                oracle_err(&x, &y, &bx, &by) <= target
            })
            .count();
        assert!(hits >= 95, "{method}: {hits}/100");
    }
}

#[test]
fn fd_amm_meets_its_bound() {
    for (seed, eps) in [(1u64, 0.25), (2, 0.125), (3, 0.0625)] {
        let x = gaussian(20, 200, seed, 0);
        let y = gaussian(24, 200, seed, 1);
        let ell = (1.0f64 / eps).ceil() as usize;
        let (bx, by) = fd_amm(&x, &y, ell).unwrap();
        let bound = eps * (x.norm_squared() + y.norm_squared());
        assert!(oracle_err(&x, &y, &bx, &by) <= bound * (1.0 + 1e-9));
    }
}

#[test]
fn fd_amm_on_identical_inputs_is_the_stacked_cross_block() {
    let x = gaussian(10, 120, 5, 0);
    let (bx, by) = fd_amm(&x, &x, 8).unwrap();
    let mut fd = FrequentDirectionsSketch::new(8, 20).unwrap();
    for j in 0..120 {
        let col: Vec<f64> = x.column(j).iter().chain(x.column(j).iter()).copied().collect();
        fd.update(&col).unwrap();
    }
    let block = fd.covariance().view((0, 10), (10, 10)).into_owned();
    let gap = (bx * by.transpose() - &block).norm();
    assert!(gap <= 1e-9 * block.norm(), "{gap:e}");
}

#[test]
fn cod_beats_fd_amm_for_intermediate_ell() {
    let (x, y) = gen_low_rank(&LowRankModelSpec::noise_free(2000, 200, 300, 80, 8, 2)).unwrap();
    for ell in [16, 32, 64, 88] {
        let (cx, cy) = Method::Cod.run(&x, &y, ell, 0).unwrap();
        let (fx, fy) = Method::FdAmm.run(&x, &y, ell, 0).unwrap();
        let cod = oracle_err(&x, &y, &cx, &cy);
        let fd = oracle_err(&x, &y, &fx, &fy);
        assert!(cod < fd, "ell={ell}: cod {cod:e} fd-amm {fd:e}");
    }
}

#[test]
fn spectral_norm_matches_full_svd() {
    let m = gaussian(20, 30, 99, 0);
    let s = sorted_sv(&m)[0];
    assert!((spectral_norm(&m).unwrap() - s).abs() <= 1e-9 * s);
}

#[test]
fn sigma_k1_bounded_by_nuclear_share() {
    for seed in 0..10 {
        let x = gaussian(12, 40, seed, 0);
        let y = gaussian(15, 40, seed, 1);
        let xy = &x * y.transpose();
        let sigma = sorted_sv(&xy);
        let nuc = nuclear_norm(&xy).unwrap();
        for (k, s) in sigma.iter().enumerate() {
            assert!(*s <= nuc / (k + 1) as f64 * (1.0 + 1e-12));
        }
    }
}

#[test]
fn improved_fd_bound_vanishes_for_noise_free_input() {
    let (x, y) = gen_low_rank(&LowRankModelSpec::noise_free(200, 20, 25, 3, 2, 4)).unwrap();
    let b = theoretical_bounds(&x, &y, 16, 5).unwrap();
    let scale = x.norm_squared() + y.norm_squared();
    assert!(b.improved_fd_bound().unwrap() <= 1e-20 * scale);
    assert!(theoretical_bounds(&x, &y, 10, 5).unwrap().improved_fd_bound().is_err());
}
