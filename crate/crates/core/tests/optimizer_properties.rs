use mixcore::{
    general_threshold, optimize_pair, threshold_t, threshold_t_general, uniform_threshold, CaseLabel, EdgeMix,
    DEFAULT_EPS,
};
use proptest::prelude::*;

fn pairs() -> impl Iterator<Item = (u32, u32)> {
    (3..=6).flat_map(|a| (a + 1..=50).map(move |b| (a, b)))
}

fn d_dz(z: f64, a: u32, b: u32, alpha: f64) -> f64 {
    let h = 1e-6;
    (threshold_t(z + h, a, b, alpha).unwrap() - threshold_t(z - h, a, b, alpha).unwrap()) / (2.0 * h)
}

fn d_dalpha(z: f64, a: u32, b: u32, alpha: f64) -> f64 {
    let h = 1e-6;
    (threshold_t(z, a, b, alpha + h).unwrap() - threshold_t(z, a, b, alpha - h).unwrap()) / (2.0 * h)
}

#[test]
fn agrees_with_direct_minimisation() {
    for a in 3..=30 {
        for b in a + 1..=30 {
            let opt = optimize_pair(a, b, DEFAULT_EPS).unwrap();
            let c = general_threshold(&opt.mix().unwrap()).unwrap();
            assert!((c - opt.c_star).abs() < 1e-7, "({a},{b}): {c} vs {}", opt.c_star);
        }
    }
}

#[test]
fn never_worse_than_uniform() {
    for (a, b) in pairs() {
        let opt = optimize_pair(a, b, DEFAULT_EPS).unwrap();
        let uni = uniform_threshold(a).unwrap();
        assert!(opt.c_star >= uni.c_star - 1e-12, "({a},{b})");
    }
}

#[test]
fn interior_optima_are_stationary() {
    let mut seen = [0; 3];
    for (a, b) in pairs() {
        let opt = optimize_pair(a, b, DEFAULT_EPS).unwrap();
        let (z, alpha) = (opt.z_star, opt.alpha_star);
        match opt.case_label {
            CaseLabel::DegenerateAlphaOne => {
                seen[0] += 1;
                assert_eq!(alpha, 1.0);
                assert!(d_dz(z, a, b, 1.0).abs() < 1e-5, "({a},{b})");
            }
            CaseLabel::SaddlePoint => {
                seen[1] += 1;
                assert!(d_dz(z, a, b, alpha).abs() < 1e-5, "({a},{b})");
                assert!(d_dalpha(z, a, b, alpha).abs() < 1e-5, "({a},{b})");
            }
            CaseLabel::BinarySearch => {
                seen[2] += 1;
                let z2 = opt.z_star_second.unwrap();
                assert!(d_dz(z, a, b, alpha).abs() < 1e-5, "({a},{b})");
                assert!(d_dz(z2, a, b, alpha).abs() < 1e-5, "({a},{b})");
                let gap = threshold_t(z, a, b, alpha).unwrap() - threshold_t(z2, a, b, alpha).unwrap();
                assert!(gap.abs() < 1e-9, "({a},{b}) gap {gap}");
            }
        }
    }
    assert!(seen.iter().all(|&s| s > 0), "cases seen: {seen:?}");
}

#[test]
fn c_star_is_the_minimum_over_z() {
    for (a, b) in pairs() {
        let opt = optimize_pair(a, b, DEFAULT_EPS).unwrap();
        for i in 1..1000 {
            let z = i as f64 / 1000.0;
            let t = threshold_t(z, a, b, opt.alpha_star).unwrap();
            assert!(t >= opt.c_star - 1e-9, "({a},{b}) z={z}: {t} < {}", opt.c_star);
        }
    }
}

#[test]
fn threshold_values_are_reported_consistently() {
    for (a, b) in pairs() {
        let opt = optimize_pair(a, b, DEFAULT_EPS).unwrap();
        let t = threshold_t(opt.z_star, a, b, opt.alpha_star).unwrap();
        assert!((t - opt.c_star).abs() < 1e-12, "({a},{b})");
        assert!((opt.lambda_star + (1.0 - opt.z_star).ln()).abs() < 1e-12);
        let kbar = opt.alpha_star * a as f64 + (1.0 - opt.alpha_star) * b as f64;
        assert!((opt.avg_edge_size - kbar).abs() < 1e-12);
    }
}

// beyond λ ≈ 10 the z form loses digits to rounding in 1 - z
proptest! {
    #[test]
    fn change_of_variables(lambda in 0.01f64..8.0, a in 3u32..10, extra in 0u32..40, alpha in 0.0f64..=1.0) {
        let b = a + extra;
        let mix = EdgeMix::pair(a, b, alpha).unwrap();
        let direct = threshold_t_general(lambda, &mix).unwrap();
        let via_z = threshold_t(-(-lambda).exp_m1(), a, b, alpha).unwrap();
        prop_assert!((direct - via_z).abs() <= 1e-12 * direct.abs());
    }
}
