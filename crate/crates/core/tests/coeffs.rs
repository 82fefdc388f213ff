use levyarma::coeffs::*;
use levyarma::special::gamma;
use num_complex::Complex64;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::function::gamma::ln_gamma;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

// Real polynomial 1 + a₁z + … with the given roots (complex ones in pairs).
fn from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c / r;
        }
        p = next;
    }
    p.iter().map(|c| c.re).collect()
}

fn random_roots(rng: &mut ChaCha8Rng, deg: usize) -> Vec<Complex64> {
    let mut roots = Vec::new();
    while roots.len() < deg {
        let m = 1.1 + 2.0 * uniform(rng);
        if deg - roots.len() >= 2 && rng.next_u32() & 1 == 0 {
            let r = Complex64::from_polar(m, 0.2 + 2.7 * uniform(rng));
            roots.push(r);
            roots.push(r.conj());
        } else {
            roots.push(Complex64::new(if rng.next_u32() & 1 == 0 { m } else { -m }, 0.0));
        }
    }
    roots
}

/// Random causal ARMA(p≤4, q≤4) together with its AR roots.
pub fn random_model(rng: &mut ChaCha8Rng) -> (ModelSpec, Vec<Complex64>) {
    let p = (rng.next_u32() % 5) as usize;
    let q = (rng.next_u32() % 5) as usize;
    let ar = random_roots(rng, p);
    let ma = random_roots(rng, q);
    let phi: Vec<f64> = from_roots(&ar)[1..].iter().map(|a| -a).collect();
    let theta = from_roots(&ma)[1..].to_vec();
    (ModelSpec::arma(&phi, &theta), ar)
}

// Θ(z) Π_k 1/(1 - z/r_k), each factor expanded as a geometric series.
fn factor_expansion(model: &ModelSpec, ar_roots: &[Complex64], n: usize) -> Vec<f64> {
    let mut s = vec![Complex64::new(0.0, 0.0); n + 1];
    s[0] = Complex64::new(1.0, 0.0);
    for r in ar_roots {
        let w = 1.0 / r;
        // multiply by Σ w^j: running sum recursion s_j += w s_{j-1}
        for j in 1..=n {
            let prev = s[j - 1];
            s[j] += w * prev;
        }
    }
    let th = model.ma_poly();
    (0..=n).map(|j| (0..th.len().min(j + 1)).map(|k| th[k] * s[j - k].re).sum()).collect()
}

// Plain long division Θ/Φ written from the definition of the quotient.
fn long_division(model: &ModelSpec, n: usize) -> Vec<f64> {
    let a = model.ar_poly();
    let mut rem: Vec<f64> = model.ma_poly();
    rem.resize(n + a.len() + 1, 0.0);
    let mut q = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let c = rem[j] / a[0];
        q.push(c);
        for (k, ak) in a.iter().enumerate() {
            rem[j + k] -= c * ak;
        }
    }
    q
}

#[test]
fn recurrence_matches_independent_expansions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let (m, roots) = random_model(&mut rng);
        let c = arma_coeffs(&m, 200).unwrap().values;
        let ld = long_division(&m, 200);
        let fe = factor_expansion(&m, &roots, 200);
        let scale = c.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        for j in 0..=200 {
            assert!((c[j] - ld[j]).abs() <= 1e-12 * scale, "{m:?} j={j}");
            assert!((c[j] - fe[j]).abs() <= 1e-11 * scale, "{m:?} j={j}: {} vs {}", c[j], fe[j]);
        }
    }
}

#[test]
fn long_division_example() {
    let m = ModelSpec::arma(&[0.5], &[0.3]);
    let c = arma_coeffs(&m, 3).unwrap().values;
    for (a, b) in c.iter().zip([1.0, 0.8, 0.4, 0.2]) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn farima_is_arma_convolved_with_binomial_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let (m, _) = random_model(&mut rng);
        let d = -0.9 + 1.3 * uniform(&mut rng);
        let f = ModelSpec { d, ..m.clone() };
        let c = farima_coeffs(&f, 300).unwrap().values;
        let a = arma_coeffs(&m, 300).unwrap().values;
        let b = binomial_weights(d, 300).unwrap();
        for j in 0..=300 {
            let conv: f64 = (0..=j).map(|k| a[k] * b[j - k]).sum();
            assert!((c[j] - conv).abs() <= 1e-12 * conv.abs().max(1.0), "j={j}");
        }
    }
    let pure = farima_coeffs(&ModelSpec::farima(&[], 0.3, &[]), 50).unwrap().values;
    assert_eq!(pure, binomial_weights(0.3, 50).unwrap());
}

#[test]
fn binomial_weight_matches_log_gamma() {
    let d = 0.3;
    let b = binomial_weights(d, 100).unwrap();
    let want = (ln_gamma(100.0 + d) - ln_gamma(d) - ln_gamma(101.0)).exp();
    assert!((b[100] - want).abs() <= 1e-12 * want, "{} vs {want}", b[100]);
}

#[test]
fn farima_leading_constant() {
    let m = ModelSpec::farima(&[0.5], 0.3, &[]);
    let k = 1.0 / (0.5 * gamma(0.3));
    assert!((asym_descriptor(&m).unwrap().farima_const.unwrap() - k).abs() < 1e-14);
    let j = 10_000usize;
    let c = farima_coeffs(&m, j).unwrap().values;
    let dev = (c[j] / (j as f64).powf(-0.7) - k).abs();
    assert!(dev * j as f64 <= 10.0, "{dev}");
}

#[test]
fn antipersistent_partial_sums() {
    // Σ_{j≤N} b_j(d) = b_N(d+1), which tends to Σ_j b_j = 0 like N^d
    let d = -0.3;
    let n = 1_000_000;
    let c = farima_coeffs(&ModelSpec::farima(&[], d, &[]), n).unwrap().values;
    let abs_sum: f64 = c.iter().map(|x| x.abs()).sum();
    assert!(abs_sum < 2.0);
    let mut s = 0.0;
    for (j, x) in c.iter().enumerate() {
        s += x;
        if [10, 1000, n].contains(&j) {
            let want = (ln_gamma(j as f64 + 1.0 + d) - ln_gamma(1.0 + d) - ln_gamma(j as f64 + 1.0)).exp();
            // log Γ(10⁶) ≈ 1.3e7 leaves the oracle itself about 1e-9 relative
            let tol = if j == n { 1e-8 } else { 1e-11 };
            assert!((s - want).abs() <= tol * want, "N={j}: {s} vs {want}");
        }
    }
}

#[test]
fn partial_fraction_constant() {
    // 1/((1-z/2)(1-z/4)) = 2/(1-z/2) - 1/(1-z/4)
    let d = asym_descriptor(&ModelSpec::arma(&[0.75, -0.125], &[])).unwrap();
    assert!((d.lambda1 - 2f64.ln()).abs() < 1e-12 && d.l1 == 1 && d.rho1 == 0.0);
    assert!((d.h - 2.0).abs() < 1e-10);
    assert!((d.h_fit - d.h).abs() < 1e-6);
}

#[test]
fn dominant_root_limit_envelope_shrinks() {
    for m in [ModelSpec::arma(&[0.75, -0.125], &[0.4]), ModelSpec::arma(&[1.0, -0.25], &[]), ModelSpec::arma(&[-0.6], &[0.2])] {
        let d = asym_descriptor(&m).unwrap();
        let c = arma_coeffs(&m, 600).unwrap().values;
        let sup = |jj: usize| {
            (jj..=600)
                .map(|j| {
                    let jf = j as f64;
                    let sign = if d.rho1 == 0.0 { 1.0 } else { (-1f64).powi(j as i32) };
                    (c[j] * sign * jf.powf(-(d.l1 as f64 - 1.0)) * (d.lambda1 * jf).exp() - d.h).abs()
                })
                .fold(0.0, f64::max)
        };
        let (a, b, e) = (sup(50), sup(100), sup(200));
        assert!(a >= b && b >= e && e < 0.05 * d.h.abs(), "{m:?}: {a} {b} {e}");
    }
}

#[test]
fn farima_rate_stays_bounded() {
    let m = ModelSpec::farima(&[0.5], 0.3, &[0.3]);
    let k = asym_descriptor(&m).unwrap().farima_const.unwrap();
    let c = farima_coeffs(&m, 100_000).unwrap().values;
    let scaled = |j: usize| j as f64 * (c[j] / (j as f64).powf(-0.7) - k).abs();
    let early = (100..1000).map(scaled).fold(0.0, f64::max);
    let late = (10_000..=100_000).step_by(7).map(scaled).fold(0.0, f64::max);
    assert!(late <= early * 1.01, "{early} {late}");
}

#[test]
fn coefficient_ratios() {
    let n = 3;
    let j = 10_000;
    let f = farima_coeffs(&ModelSpec::farima(&[0.5], 0.3, &[0.3]), j + n).unwrap().values;
    assert!((f[j + n] / f[j] - 1.0).abs() < 1e-3);
    // roots 1.05 and 2 keep c_j representable at j = 10⁴
    let m = ModelSpec::arma(&[1.0 / 1.05 + 0.5, -0.5 / 1.05], &[]);
    let d = asym_descriptor(&m).unwrap();
    let a = arma_coeffs(&m, j + n).unwrap().values;
    assert!((a[j + n] / a[j] - (-d.lambda1 * n as f64).exp()).abs() < 1e-3);
}

#[test]
fn serialization_formats() {
    let m: ModelSpec = serde_json::from_str(r#"{"phi":[0.5],"theta":[0.3],"d":0.3}"#).unwrap();
    assert_eq!(m, ModelSpec::farima(&[0.5], 0.3, &[0.3]));
    let back: ModelSpec = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(back, m);
    let csv = arma_coeffs(&ModelSpec::arma(&[0.5], &[]), 2).unwrap().to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "j,c_j");
    assert_eq!(lines[1].split(',').nth(1).unwrap().parse::<f64>().unwrap(), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tail_bound_dominates_tail(phi in -0.95f64..0.95, theta in -0.9f64..0.9, n in 10usize..80, eta in 0.5f64..2.0) {
        prop_assume!((phi + theta).abs() > 1e-3);
        let m = ModelSpec::arma(&[phi], &[theta]);
        let s = arma_coeffs(&m, n).unwrap();
        let long = arma_coeffs(&m, n + 4000).unwrap().values;
        let tail: f64 = long[n + 1..].iter().map(|c| c.abs().powf(eta)).sum();
        prop_assert!(s.tail_bound(eta) >= tail * (1.0 - 1e-12));
    }
}
