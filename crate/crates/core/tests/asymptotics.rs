use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use levyarma::asymptotics::*;
use levyarma::coeffs::{asym_descriptor, ModelSpec};
use levyarma::dependence::{dependence, DependenceOptions};
use levyarma::innovations::{signed_pow, stable_to_id, IdSpec, InnovationSpec, StableSpec};
use levyarma::levy::{StableLike, Tempered};
use levyarma::Error;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn stable(a: f64, b: f64) -> InnovationSpec {
    InnovationSpec::Stable(StableSpec::new(a, b, 0.0).unwrap())
}

fn stable_like(a: f64, eta: f64) -> InnovationSpec {
    InnovationSpec::Id(IdSpec::new(0.0, Arc::new(StableLike { alpha: a, c_plus: 0.6, c_minus: 0.4 }), eta).unwrap())
}

fn tempered() -> InnovationSpec {
    InnovationSpec::Id(IdSpec::new(0.0, Arc::new(Tempered { alpha: 0.8, lambda: 1.0 }), 2.0).unwrap())
}

fn real_ar() -> ModelSpec {
    ModelSpec::arma(&[0.5], &[0.3])
}

fn complex_ar() -> ModelSpec {
    ModelSpec::arma(&[0.6, -0.5], &[])
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

#[test]
fn every_regime_is_reachable() {
    let fd = |d| ModelSpec::farima(&[], d, &[]);
    let cases: Vec<(ModelSpec, InnovationSpec, &str)> = vec![
        (real_ar(), stable(0.7, 0.3), "stable ARMA, 0<α<1, real dominant root"),
        (complex_ar(), stable(0.7, 0.3), "stable ARMA, 0<α<1, complex dominant root (bound)"),
        (real_ar(), stable(1.0, 0.3), "stable ARMA, α=1, real dominant root"),
        (complex_ar(), stable(1.0, 0.3), "stable ARMA, α=1, complex dominant root (bound)"),
        (real_ar(), stable(1.5, 0.3), "stable ARMA, 1<α≤2, real dominant root"),
        (complex_ar(), stable(2.0, 0.0), "stable ARMA, 1<α≤2, complex dominant root (bound)"),
        (real_ar(), stable_like(0.7, 0.6), "ID ARMA, 0<η<1, real dominant root (bound)"),
        (complex_ar(), stable_like(0.7, 0.6), "ID ARMA, 0<η<1, complex dominant root (bound)"),
        (real_ar(), tempered(), "ID ARMA, 1≤η≤2, real dominant root"),
        (complex_ar(), stable_like(1.5, 1.0), "ID ARMA, 1≤η≤2, complex dominant root (bound)"),
        (fd(-0.6), stable(0.7, 0.0), "stable FARIMA, 0<α≤1"),
        (fd(-0.6), stable(1.0, 0.0), "stable FARIMA, 0<α≤1"),
        (fd(-0.3), stable(1.0, 0.5), "stable FARIMA, α=1, skewed"),
        (fd(0.2), stable(1.5, 0.3), "stable FARIMA, 1<α≤2, (α-1)(d-1) > -1"),
        (fd(-1.5), stable(1.5, 0.3), "stable FARIMA, 1<α≤2, (α-1)(d-1) < -1"),
        (fd(-0.6), stable_like(0.9, 0.8), "ID FARIMA, 0<η≤1 (bound)"),
        (fd(-1.5), stable_like(1.9, 1.8), "ID FARIMA, 1<η≤2, (η-1)(d-1) < -1"),
        (fd(0.3), tempered(), "ID FARIMA, 1<η≤2, (η-1)(d-1) > -1 (bound)"),
        (ModelSpec::arma(&[], &[0.4, 0.2]), stable(1.2, 0.0), "finite memory: I_n = 0 beyond the MA order"),
    ];
    for (m, innov, tag) in cases {
        let p = predict_rate(&m, &innov, 1.0, 0.8).unwrap_or_else(|e| panic!("{tag}: {e}"));
        assert_eq!(p.regime, tag);
        assert!(p.constant.re.is_finite() && p.constant.im.is_finite(), "{tag}");
        let bound = tag.ends_with("(bound)");
        assert_eq!(p.kind == RateKind::UpperBound, bound, "{tag}");
        if m.is_farima() || tag.starts_with("finite") {
            assert_eq!(p.exp_rate, 0.0);
        } else {
            let lam = asym_descriptor(&m).unwrap().lambda1;
            let idx = innov.index();
            let factor = if idx < 1.0 { idx } else { 1.0 };
            assert!((p.exp_rate + lam * factor).abs() < 1e-12, "{tag}: {}", p.exp_rate);
        }
    }
}

#[test]
fn boundary_regimes_have_no_prediction() {
    let m = ModelSpec::farima(&[], -1.0, &[]);
    assert!(matches!(predict_rate(&m, &stable(1.5, 0.0), 1.0, 1.0), Err(Error::BoundaryRegime(_))));
    assert!(matches!(predict_rate(&m, &stable_like(1.7, 1.5), 1.0, 1.0), Err(Error::BoundaryRegime(_))));
}

#[test]
fn documented_rates() {
    let p = predict_rate(&ModelSpec::arma(&[0.5], &[]), &stable(1.5, 0.3), 1.0, 1.0).unwrap();
    assert_eq!(p.poly_exponent, 0.0);
    assert!((p.exp_rate + LN_2).abs() < 1e-14);
    let p = predict_rate(&ModelSpec::farima(&[], -0.3, &[]), &stable(1.0, 0.5), 1.0, 1.0).unwrap();
    assert_eq!(p.poly_exponent, -0.3);
    let p = predict_rate(&ModelSpec::farima(&[], 0.2, &[]), &stable(1.5, 0.0), 1.0, 1.0).unwrap();
    assert!((p.poly_exponent + 0.2).abs() < 1e-14);
}

#[test]
fn power_inequalities_hold_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..100_000 {
        let draw = |rng: &mut ChaCha8Rng| {
            let v = 10f64.powf(6.0 * uniform(rng) - 3.0);
            if rng.next_u32() & 1 == 0 { v } else { -v }
        };
        let (r, s) = (draw(&mut rng), draw(&mut rng));
        let alpha = 0.01 + 1.99 * uniform(&mut rng);
        let signed = signed_pow(r + s, alpha) - signed_pow(r, alpha) - signed_pow(s, alpha);
        let plain = (r + s).abs().powf(alpha) - r.abs().powf(alpha) - s.abs().powf(alpha);
        let bound = if alpha <= 1.0 {
            2.0 * r.abs().powf(alpha)
        } else {
            alpha * r.abs() * s.abs().powf(alpha - 1.0) + (alpha + 1.0) * r.abs().powf(alpha)
        };
        let slack = 1e-12 * (r.abs() + s.abs()).powf(alpha);
        assert!(signed.abs() <= bound + slack, "r={r} s={s} α={alpha}");
        assert!(plain.abs() <= bound + slack, "r={r} s={s} α={alpha}");
    }
}

#[test]
fn log_inequalities_hold_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let xlx = |x: f64| if x == 0.0 { 0.0 } else { x * x.abs().ln() };
    for _ in 0..100_000 {
        let draw = |rng: &mut ChaCha8Rng| {
            let v = 10f64.powf(8.0 * uniform(rng) - 4.0);
            if rng.next_u32() & 1 == 0 { v } else { -v }
        };
        let (r, s) = (draw(&mut rng), draw(&mut rng));
        let lg = |x: f64| x.abs().ln().abs();
        let bound = r.abs() * (lg(r + s) + lg(r) + lg(s) + 1.0);
        let slack = 1e-12 * (r.abs() + s.abs()) * (1.0 + lg(r.abs() + s.abs()));
        let e1 = xlx((r + s).abs()) - xlx(r.abs()) - xlx(s.abs());
        let e2 = xlx(r + s) - xlx(r) - xlx(s);
        assert!(e1.abs() <= bound + slack, "r={r} s={s}");
        assert!(e2.abs() <= bound + slack, "r={r} s={s}");
    }
}

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs()
}

#[test]
fn g_endpoint_limits() {
    let (z1, z2) = (1.3f64, -0.6f64);
    let (lo, hi) = (1e-6f64, 1e6f64);
    for (alpha, d) in [(0.6, -0.5), (1.0, -0.5), (1.5, -0.5)] {
        let at_inf = hi.powf(alpha * (d - 1.0));
        let want = (z1 + z2).abs().powf(alpha) - z1.abs().powf(alpha) - z2.abs().powf(alpha);
        assert!(close(eval_g1(hi, z1, z2, alpha, d) / at_inf, want, 0.01), "g1 at ∞, α={alpha}");
        let want = signed_pow(z1 + z2, alpha) - signed_pow(z1, alpha) - signed_pow(z2, alpha);
        assert!(close(eval_g2(hi, z1, z2, alpha, d) / at_inf, want, 0.01), "g2 at ∞, α={alpha}");
    }
    // α < 1: the limits at 0 involve z₂
    let (alpha, d) = (0.6, -0.5);
    assert!(close(eval_g1(lo, z1, z2, alpha, d), -z2.abs().powf(alpha), 0.01));
    assert!(close(eval_g2(lo, z1, z2, alpha, d), -signed_pow(z2, alpha), 0.01));
    let (z1a, z2a) = (-1.3f64, 0.6f64);
    assert!(close(eval_g1(lo, z1a, z2a, 1.0, d), z1a.signum() * z2a - z2a.abs(), 0.01));
    let alpha = 1.5;
    let scale = lo.powf((d - 1.0) * (alpha - 1.0));
    assert!(close(eval_g1(lo, z1, z2, alpha, d) / scale, alpha * signed_pow(z1, alpha - 1.0) * z2, 0.01));
    assert!(close(eval_g2(lo, z1, z2, alpha, d) / scale, alpha * z1.abs().powf(alpha - 1.0) * z2, 0.01));
}

#[test]
fn g3_endpoint_limits() {
    let (z1, z2, d) = (1.3f64, -0.6f64, -0.3f64);
    let xlx = |x: f64| x * x.abs().ln();
    // x g₃(x) vanishes like x^d times a fixed constant
    let c_inf = xlx(z1 + z2) - xlx(z1) - xlx(z2);
    let x = 1e6;
    assert!(close(x * eval_g3(x, z1, z2, d) / x.powf(d), c_inf, 0.01));
    assert!((x * eval_g3(x, z1, z2, d)).abs() < (eval_g3(1.0, z1, z2, d)).abs());
    // g₃(x) = (d-1) z₂ log x + z₂(log|z₁/z₂| + 1) + o(1)
    let x = 1e-6;
    let c0 = z2 * ((z1 / z2).abs().ln() + 1.0);
    assert!(close(eval_g3(x, z1, z2, d) - (d - 1.0) * z2 * x.ln(), c0, 0.01));
    let x = 1e-200;
    assert!(close(eval_g3(x, z1, z2, d) / x.ln(), (d - 1.0) * z2, 0.01));
}

// ∫₀^∞ f by the exp-sinh rule x = exp(π/2 sinh t).
fn exp_sinh(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let mut s = 0.0;
    let mut t = -5.5f64;
    while t <= 6.0 {
        let x = (0.5 * PI * t.sinh()).exp();
        s += f(x) * x * 0.5 * PI * t.cosh();
        t += h;
    }
    s * h
}

#[test]
fn limit_integrals_match_exp_sinh_oracle() {
    let cases = [
        (GFunction::G1, 1.0, 1.0, 0.7, -0.6),
        (GFunction::G2, 1.0, -0.5, 0.7, -0.6),
        (GFunction::G1, 0.8, 1.2, 1.5, -0.3),
        (GFunction::G2, -0.8, 1.2, 1.5, -0.3),
        (GFunction::G3, 1.0, 0.7, 1.0, -0.3),
    ];
    for (which, z1, z2, alpha, d) in cases {
        let got = limit_integral(which, z1, z2, alpha, d).unwrap();
        assert!(got.err <= 1e-8);
        let f = |x: f64| eval_g(which, x, z1, z2, alpha, d);
        let (a, b) = (exp_sinh(f, 1.0 / 256.0), exp_sinh(f, 1.0 / 1024.0));
        assert!((a - b).abs() < 1e-7 * b.abs().max(1.0), "oracle not converged for {which:?}: {a} {b}");
        let tol = 1e-7 * b.abs().max(1e-3) + 2.0 * (a - b).abs();
        assert!((got.value - b).abs() < tol, "{which:?} α={alpha}: {} vs {b}", got.value);
    }
}

#[test]
fn limit_integral_matches_riemann_sums() {
    let (z1, z2, alpha, d) = (1.0f64, 1.0f64, 0.9f64, -2.0f64);
    let x_max = 1000.0f64;
    let c = (z1 + z2).abs().powf(alpha) - z1.abs().powf(alpha) - z2.abs().powf(alpha);
    let e = alpha * (d - 1.0);
    // leading-order tail beyond x_max; the next order is ~1/x_max smaller
    let tail = -c * x_max.powf(e + 1.0) / (e + 1.0);
    // right-endpoint sums with the trapezoid end correction, using g₁(0+) = -|z₂|^α
    let g0 = -z2.abs().powf(alpha);
    let riemann = |n: usize| {
        let h = 1.0 / n as f64;
        let s: f64 = (1..=(n * x_max as usize)).map(|j| eval_g1(j as f64 * h, z1, z2, alpha, d)).sum();
        Complex64::new(h * s - 0.5 * h * (eval_g1(x_max, z1, z2, alpha, d) - g0) + tail, 0.0)
    };
    let pts = [100usize, 1000, 10_000].map(|n| (n as f64, riemann(n)));
    let r = richardson(pts).unwrap();
    let got = limit_integral(GFunction::G1, z1, z2, alpha, d).unwrap();
    assert!((r.value.re - got.value).abs() < 1e-5 * got.value.abs(), "{} vs {}", r.value.re, got.value);
}

#[test]
fn limit_integral_edge_cases() {
    assert_eq!(limit_integral(GFunction::G1, 1.0, 0.0, 0.7, -0.6).unwrap().value, 0.0);
    assert!(matches!(limit_integral(GFunction::G1, 1.0, 1.0, 0.7, 0.2), Err(Error::Divergent(_))));
    assert!(matches!(limit_integral(GFunction::G1, 1.0, 1.0, 1.8, -0.3), Err(Error::Divergent(_))));
    assert!(matches!(limit_integral(GFunction::G3, 1.0, 1.0, 1.0, 0.1), Err(Error::Divergent(_))));
}

#[test]
fn fit_rate_on_synthetic_series() {
    let s: Vec<(usize, Complex64)> = (1..=30).map(|n| (n, Complex64::new(n as f64 * (-0.69 * n as f64).exp(), 0.0))).collect();
    let f = fit_rate(&s).unwrap();
    assert!((f.fitted_exponent - 1.0).abs() < 1e-8 && (f.fitted_exp_rate + 0.69).abs() < 1e-9 && f.residual < 1e-10);
    assert_eq!(f.n_range, (1, 30));
    assert!(fit_rate(&s[..4]).is_err());
    let tiny: Vec<(usize, Complex64)> = (1..=10).map(|n| (n, Complex64::new(if n > 4 { 1e-310 } else { 1.0 }, 0.0))).collect();
    assert!(fit_rate(&tiny).is_err());
}

#[test]
fn fit_rate_on_computed_series() {
    let m = ModelSpec::arma(&[0.5], &[]);
    let s = stable(1.5, 0.0);
    let series: Vec<(usize, Complex64)> =
        (10..=40).map(|n| (n, dependence(&m, &s, n, 1.0, 1.0, &DependenceOptions::default()).unwrap().value)).collect();
    let f = fit_rate(&series).unwrap();
    assert!((f.fitted_exp_rate + LN_2).abs() < 0.01 * LN_2, "{}", f.fitted_exp_rate);
}

#[test]
fn verify_ar1_converges_to_series_constant() {
    let m = ModelSpec::arma(&[0.5], &[]);
    let grid: Vec<usize> = (10..=40).step_by(5).collect();
    let r = verify_table1(&m, &stable(1.5, 0.0), 1.0, 1.0, &grid, &DependenceOptions::default()).unwrap();
    assert!(r.pass && r.deviation_last < 1e-5);
    // the same constant by direct summation: α z₂ Σ |c_j|^{α-1} sgn(c_j) e^{-λj}, c_j = 2^{-j}
    let direct: f64 = 1.5 * (0..200).map(|j| 0.5f64.powi(j).powf(0.5) * 0.5f64.powi(j)).sum::<f64>();
    assert!((r.prediction.constant.re - direct).abs() < 1e-12 && r.prediction.constant.im == 0.0);
    let fit = r.prediction.constant_fit.unwrap();
    assert!((fit - r.prediction.constant).norm() < 1e-6);
}

#[test]
fn verify_farima_long_memory() {
    let s = stable(0.7, 0.0);
    let m = ModelSpec::farima(&[], 0.2, &[]);
    let grid = [1000, 3000, 10_000];
    let o = DependenceOptions::default();
    assert!(matches!(verify_table1(&m, &s, 1.0, 1.0, &grid, &o), Err(Error::NoCausalSolution(_))));
    let m = ModelSpec::farima(&[], -0.6, &[]);
    let r = verify_table1(&m, &s, 1.0, 1.0, &grid, &o).unwrap();
    assert!(r.pass);
    let g = limit_integral(GFunction::G1, 1.0, 1.0, 0.7, -0.6).unwrap();
    let want = (1.0 / libm::tgamma(-0.6)).abs().powf(0.7) * g.value;
    assert!((r.prediction.constant.re - want).abs() < 1e-12);
}

#[test]
fn verify_ma_is_trivial() {
    let m = ModelSpec::arma(&[], &[0.5, -0.3, 0.2]);
    let r = verify_table1(&m, &stable(1.3, 0.4), 1.0, -0.7, &[4, 5, 6, 7], &DependenceOptions::default()).unwrap();
    assert!(r.pass);
    assert!(r.rows.iter().all(|row| row.i_re == 0.0 && row.i_im == 0.0));
}

#[test]
fn report_serialization() {
    let m = ModelSpec::arma(&[0.5], &[]);
    let r = verify_table1(&m, &stable(1.5, 0.2), 1.0, 1.0, &[10, 20], &DependenceOptions::default()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    let row = &v["rows"][0];
    for k in ["n", "I_re", "I_im", "normalized_re", "normalized_im", "predicted_re", "predicted_im", "deviation"] {
        assert!(row.get(k).is_some(), "missing {k}");
    }
    assert_eq!(v["prediction"]["kind"], "exact-limit");
    let csv = r.to_csv();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("n,I_re,I_im,"));
}

#[test]
fn id_and_stable_long_memory_limits_agree() {
    let s = StableSpec::new(1.8, 0.4, 0.0).unwrap();
    let (id, _) = stable_to_id(&s).unwrap();
    let m = ModelSpec::farima(&[0.3], -1.5, &[]);
    let a = predict_rate(&m, &InnovationSpec::Stable(s), 0.9, -1.1).unwrap();
    let b = predict_rate(&m, &InnovationSpec::Id(id), 0.9, -1.1).unwrap();
    assert_eq!(a.regime, "stable FARIMA, 1<α≤2, (α-1)(d-1) < -1");
    assert_eq!(b.regime, "ID FARIMA, 1<η≤2, (η-1)(d-1) < -1");
    assert_eq!(a.poly_exponent, b.poly_exponent);
    let tol = a.constant_err + b.constant_err + 1e-9 * a.constant.norm();
    assert!((a.constant - b.constant).norm() <= tol, "{} vs {} (tol {tol})", a.constant, b.constant);
}
