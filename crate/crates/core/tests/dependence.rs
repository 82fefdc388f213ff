use std::sync::Arc;

use levyarma::coeffs::{arma_coeffs, ModelSpec};
use levyarma::dependence::{codifference, i_empirical, i_id, i_stable, DependenceOptions};
use levyarma::innovations::{stable_exponent, stable_to_id, IdSpec, InnovationSpec, StableSpec};
use levyarma::levy::{GaussBump, Tempered};
use levyarma::simulate::{simulate_paths, SimOptions};
use levyarma::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn ar1(phi: f64) -> ModelSpec {
    ModelSpec::arma(&[phi], &[])
}

fn brute_force(model: &ModelSpec, s: &StableSpec, n: usize, z1: f64, z2: f64, terms: usize) -> Complex64 {
    let c = arma_coeffs(model, terms + n).unwrap().values;
    (0..terms)
        .map(|j| {
            let (a, b) = (z1 * c[j], z2 * c[j + n]);
            stable_exponent(s, a) + stable_exponent(s, b) - stable_exponent(s, a + b)
        })
        .sum()
}

#[test]
fn stable_matches_term_oracle() {
    let s = StableSpec::new(1.5, 0.3, 0.0).unwrap();
    let m = ar1(0.5);
    let v = i_stable(&m, &s, 1, 1.0, 1.0, &DependenceOptions::default()).unwrap();
    let o = brute_force(&m, &s, 1, 1.0, 1.0, 2000);
    assert!((v.value - o).norm() < 1e-10, "{} vs {}", v.value, o);
}

#[test]
fn stable_alpha_one_matches_term_oracle() {
    let s = StableSpec::new(1.0, -0.7, 0.4).unwrap();
    let m = ModelSpec::arma(&[0.6, -0.2], &[0.4]);
    for n in [0, 1, 3] {
        let v = i_stable(&m, &s, n, 0.8, -1.3, &DependenceOptions::default()).unwrap();
        let o = brute_force(&m, &s, n, 0.8, -1.3, 2000);
        assert!((v.value - o).norm() < 1e-10, "n={n}: {} vs {}", v.value, o);
    }
}

#[test]
fn zero_argument_gives_zero() {
    let s = StableSpec::new(1.2, 0.5, 0.0).unwrap();
    let v = i_stable(&ar1(0.5), &s, 3, 1.0, 0.0, &DependenceOptions::default()).unwrap();
    assert_eq!(v.value, Complex64::new(0.0, 0.0));
    assert_eq!(v.err, 0.0);
}

#[test]
fn codifference_series_oracle() {
    let s = StableSpec::new(1.5, 0.0, 0.0).unwrap();
    let m = ar1(0.5);
    let v = codifference(&m, &InnovationSpec::Stable(s), 1, &DependenceOptions::default()).unwrap();
    let c = arma_coeffs(&m, 3000).unwrap().values;
    let p = |x: f64| x.abs().powf(1.5);
    let o: f64 = -(0..2999).map(|j| p(c[j] - c[j + 1]) - p(c[j]) - p(c[j + 1])).sum::<f64>();
    assert!((v.value.re - o).abs() < 1e-12 && v.value.im == 0.0);
}

#[test]
fn truncation_error_suggests_larger_n() {
    let s = StableSpec::new(1.5, 0.0, 0.0).unwrap();
    let opts = DependenceOptions { truncation: Some(5), ..Default::default() };
    match i_stable(&ar1(0.9), &s, 1, 1.0, 1.0, &opts) {
        Err(Error::IncreaseN { suggested, .. }) => assert!(suggested > 5),
        other => panic!("expected IncreaseN, got {other:?}"),
    }
}

#[test]
fn err_is_monotone_and_bounds_the_change() {
    let s = StableSpec::new(0.8, 0.4, 0.0).unwrap();
    let m = ModelSpec::arma(&[0.7], &[0.5]);
    let mut last = f64::INFINITY;
    for nn in [4, 8, 16, 32, 64] {
        let a = i_stable(&m, &s, 2, 1.0, 0.7, &DependenceOptions::with_truncation(nn)).unwrap();
        let b = i_stable(&m, &s, 2, 1.0, 0.7, &DependenceOptions::with_truncation(2 * nn)).unwrap();
        assert!(a.err <= last);
        assert!((a.value - b.value).norm() <= a.err, "N={nn}");
        last = a.err;
    }
}

#[test]
fn id_stable_like_matches_stable() {
    let s = StableSpec::new(0.7, 0.0, 0.0).unwrap();
    let (id, _) = stable_to_id(&s).unwrap();
    let m = ar1(0.5);
    for n in [1, 5, 10] {
        let a = i_stable(&m, &s, n, 1.0, 1.0, &DependenceOptions::default()).unwrap();
        let b = i_id(&m, &id, n, 1.0, 1.0, &DependenceOptions::default()).unwrap();
        assert!((a.value - b.value).norm() <= 1e-5, "n={n}: {} vs {}", a.value, b.value);
    }
}

#[test]
fn id_skewed_matches_stable() {
    let s = StableSpec::new(1.4, 0.6, 0.0).unwrap();
    let (id, _) = stable_to_id(&s).unwrap();
    let m = ModelSpec::arma(&[0.5, 0.2], &[-0.3]);
    for n in [0, 2] {
        let a = i_stable(&m, &s, n, 0.9, -0.6, &DependenceOptions::default()).unwrap();
        let b = i_id(&m, &id, n, 0.9, -0.6, &DependenceOptions::default()).unwrap();
        assert!((a.value - b.value).norm() <= a.err + b.err + 1e-8, "n={n}: {} vs {} (err {})", a.value, b.value, b.err);
    }
}

#[test]
fn compound_poisson_bump_closed_form() {
    let (x0, w, rate) = (1.3, 0.05, 2.0);
    let id = IdSpec::new(0.0, Arc::new(GaussBump { center: x0, width: w, mass: rate }), 2.0).unwrap();
    let theta = 0.6;
    let m = ModelSpec::arma(&[], &[theta]);
    let (z1, z2) = (0.7, -1.1);
    let v = i_id(&m, &id, 1, z1, z2, &DependenceOptions::default()).unwrap();
    // shared innovation enters X₀ with c₀ = 1 and X₁ with c₁ = θ
    let phi = |om: f64| Complex64::new(-0.5 * om * om * w * w, om * x0).exp();
    let (a, b) = (z1, z2 * theta);
    let exact = rate * (phi(b) - 1.0 - phi(a + b) + phi(a));
    assert!((v.value - exact).norm() < 1e-9, "{} vs {}", v.value, exact);
}

#[test]
fn covariance_link_for_tempered_noise() {
    let (al, la) = (0.8, 1.5);
    let id = IdSpec::new(0.0, Arc::new(Tempered { alpha: al, lambda: la }), 2.0).unwrap();
    let var = 2.0 * libm::tgamma(2.0 - al) * la.powf(al - 2.0);
    let m = ar1(0.6);
    let h = 1e-2;
    let o = DependenceOptions::default();
    for n in [1usize, 3] {
        let f = |a: f64, b: f64| i_id(&m, &id, n, a, b, &o).unwrap().value.re;
        let d2 = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        let cov = var * 0.6f64.powi(n as i32) / (1.0 - 0.36);
        assert!(((d2 - cov) / cov).abs() < 1e-4, "n={n}: {d2} vs {cov}");
    }
}

#[test]
fn farima_tail_is_consistent_across_truncations() {
    let s = StableSpec::new(1.5, 0.3, 0.0).unwrap();
    let m = ModelSpec::farima(&[], -0.3, &[]);
    let a = i_stable(&m, &s, 5, 1.0, 1.0, &DependenceOptions::with_truncation(1000)).unwrap();
    let b = i_stable(&m, &s, 5, 1.0, 1.0, &DependenceOptions::with_truncation(8000)).unwrap();
    assert!((a.value - b.value).norm() < 1e-9 * a.value.norm().max(1e-300) + a.err, "{} vs {}", a.value, b.value);
}

#[test]
fn farima_without_solution_is_rejected() {
    let s = StableSpec::new(0.7, 0.0, 0.0).unwrap();
    let m = ModelSpec::farima(&[], 0.2, &[]);
    assert!(matches!(i_stable(&m, &s, 5, 1.0, 1.0, &DependenceOptions::default()), Err(Error::NoCausalSolution(_))));
}

#[test]
fn empirical_agrees_with_exact() {
    let s = StableSpec::new(1.7, 0.0, 0.0).unwrap();
    let m = ar1(0.5);
    let b = simulate_paths(&m, &s, 20_000, 3, 7, &SimOptions::default()).unwrap();
    let e = i_empirical(&b, 1, 0.5, 0.5).unwrap();
    let x = i_stable(&m, &s, 1, 0.5, 0.5, &DependenceOptions::default()).unwrap();
    assert!((e.value - x.value).norm() < 4.0 * e.err, "{} vs {} ± {}", e.value, x.value, e.err);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_symmetry(phi in -0.9f64..0.9, alpha in 0.3f64..2.0, beta in -1.0f64..1.0,
                          z1 in -3.0f64..3.0, z2 in -3.0f64..3.0, n in 0usize..6) {
        let s = StableSpec::new(alpha, beta, 0.0).unwrap();
        let m = ar1(phi);
        let o = DependenceOptions::default();
        let a = i_stable(&m, &s, n, z1, z2, &o).unwrap();
        let b = i_stable(&m, &s, n, -z1, -z2, &o).unwrap();
        prop_assert!((a.value - b.value.conj()).norm() <= 1e-12 * (1.0 + a.value.norm()));
    }

    #[test]
    fn symmetric_is_real(phi in -0.9f64..0.9, alpha in 0.3f64..2.0, z1 in -3.0f64..3.0,
                         z2 in -3.0f64..3.0, n in 0usize..6) {
        let s = StableSpec::new(alpha, 0.0, 0.0).unwrap();
        let v = i_stable(&ar1(phi), &s, n, z1, z2, &DependenceOptions::default()).unwrap();
        prop_assert_eq!(v.value.im, 0.0);
    }

    #[test]
    fn ma_independence(q in 1usize..4, alpha in 0.3f64..2.0, beta in -1.0f64..1.0, extra in 1usize..5,
                       z1 in -3.0f64..3.0, z2 in -3.0f64..3.0) {
        let theta: Vec<f64> = (0..q).map(|k| 0.4 / (k as f64 + 1.0)).collect();
        let m = ModelSpec::arma(&[], &theta);
        let s = StableSpec::new(alpha, beta, 0.0).unwrap();
        let v = i_stable(&m, &s, q + extra, z1, z2, &DependenceOptions::default()).unwrap();
        prop_assert!(v.value.norm() <= 1e-14);
    }
}
