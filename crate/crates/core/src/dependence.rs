//! The dependence function I_n(z₁, z₂) of a linear process,
//!
//! I_n = log E e^{iz₁X₀} + log E e^{iz₂Xₙ} - log E e^{i(z₁X₀+z₂Xₙ)},
//!
//! computed as Σ_j V_j with V_j = ψ(z₁c_j) + ψ(z₂c_{j+n}) - ψ(z₁c_j + z₂c_{j+n}).
//! Terms are summed in a fixed pairwise order so parallel runs reproduce
//! sequential ones bit for bit.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{arma_coeffs, asym_descriptor, ensure_valid, farima_coeffs, CoeffExtension, Envelope, ModelSpec};
use crate::error::{invalid, Error, Result};
use crate::innovations::{IdSpec, InnovationSpec, StableSpec};
use crate::levy::{self, Kernel};
use crate::quad::{decades, Estimate, Sweep};
use crate::simulate::PathBatch;

const I: Complex64 = Complex64::new(0.0, 1.0);
const N_CAP: usize = 10_000_000;

/// One value of I_n(z₁, z₂) with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependenceValue {
    pub n: usize,
    pub z1: f64,
    pub z2: f64,
    pub value: Complex64,
    pub err: f64,
    /// Number of explicitly summed terms.
    pub terms: usize,
}

impl DependenceValue {
    fn zero(n: usize, z1: f64, z2: f64) -> Self {
        DependenceValue { n, z1, z2, value: Complex64::new(0.0, 0.0), err: 0.0, terms: 0 }
    }
}

#[derive(Serialize, Deserialize)]
struct DependenceJson {
    n: usize,
    re: f64,
    im: f64,
    err: f64,
}

impl Serialize for DependenceValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DependenceJson { n: self.n, re: self.value.re, im: self.value.im, err: self.err }.serialize(s)
    }
}

/// Truncation and tolerance settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DependenceOptions {
    /// Fixed truncation N. With `None` the smallest N meeting the tolerance
    /// is used for short memory, and 2000 for long memory.
    pub truncation: Option<usize>,
    /// The series tail bound must be below max(abs_tol, rel_tol·|value|).
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for DependenceOptions {
    fn default() -> Self {
        DependenceOptions { truncation: None, rel_tol: 1e-12, abs_tol: 0.0 }
    }
}

impl DependenceOptions {
    pub fn with_truncation(n: usize) -> Self {
        DependenceOptions { truncation: Some(n), rel_tol: f64::INFINITY, ..Default::default() }
    }
}

/// The overlapping coefficient pairs (z₁c_j, z₂c_{j+n}), j = 0..=N.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCoeffs {
    pub pairs: Vec<(f64, f64)>,
}

impl JointCoeffs {
    pub fn new(c: &[f64], n: usize, z1: f64, z2: f64) -> Self {
        let pairs = if c.len() > n { (0..c.len() - n).map(|j| (z1 * c[j], z2 * c[j + n])).collect() } else { Vec::new() };
        JointCoeffs { pairs }
    }
}

// |big|^α (1+t)^α - |big|^α with t = small/big, accurate for small t.
fn pow_diff(big: f64, t: f64, alpha: f64) -> f64 {
    big.abs().powf(alpha) * (alpha * t.ln_1p()).exp_m1()
}

/// |a+b|^α - |a|^α - |b|^α.
pub fn rv(a: f64, b: f64, alpha: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let (big, small) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
    let t = small / big;
    if t > -0.5 {
        pow_diff(big, t, alpha) - small.abs().powf(alpha)
    } else {
        (a + b).abs().powf(alpha) - a.abs().powf(alpha) - b.abs().powf(alpha)
    }
}

/// |a+b|^⟨α⟩ - |a|^⟨α⟩ - |b|^⟨α⟩ with |r|^⟨α⟩ = |r|^α sgn r.
pub fn iv(a: f64, b: f64, alpha: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let (big, small) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
    let t = small / big;
    if t > -0.5 {
        big.signum() * pow_diff(big, t, alpha) - small.abs().powf(alpha).copysign(small)
    } else {
        let sp = |x: f64| crate::innovations::signed_pow(x, alpha);
        sp(a + b) - sp(a) - sp(b)
    }
}

/// (a+b) log|a+b| - a log|a| - b log|b| with 0·log 0 = 0.
pub fn iv_log(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let (big, small) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
    let t = small / big;
    if t > -0.5 {
        (big + small) * t.ln_1p() + small * (big / small).abs().ln()
    } else {
        let xl = |x: f64| if x == 0.0 { 0.0 } else { x * x.abs().ln() };
        xl(a + b) - xl(a) - xl(b)
    }
}

/// V(a, b) = ψ(a) + ψ(b) - ψ(a+b) for a stable law; μ cancels.
pub fn stable_v(s: &StableSpec, a: f64, b: f64) -> Complex64 {
    if s.alpha == 1.0 {
        Complex64::new(rv(a, b, 1.0), s.beta * 2.0 / PI * iv_log(a, b))
    } else {
        Complex64::new(rv(a, b, s.alpha), -s.beta * s.tan() * iv(a, b, s.alpha))
    }
}

// sup of x|log x| over [0, x].
fn xlog_sup(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 1.0 / E {
        -x * x.ln()
    } else {
        (1.0 / E).max(x * x.ln().abs())
    }
}

/// Upper bound for |V(a, b)| given |a| ≤ ea and |b| ≤ eb.
pub fn stable_v_bound(s: &StableSpec, ea: f64, eb: f64) -> f64 {
    let (lo, hi) = (ea.min(eb), ea.max(eb));
    let a = s.alpha;
    if a == 1.0 {
        2.0 * lo + s.beta.abs() * 2.0 / PI * (xlog_sup(ea + eb) + xlog_sup(ea) + xlog_sup(eb))
    } else if a < 1.0 {
        2.0 * lo.powf(a) * (1.0 + (s.beta * s.tan()).abs())
    } else {
        (a * lo * hi.powf(a - 1.0) + (a + 1.0) * lo.powf(a)) * (1.0 + (s.beta * s.tan()).abs())
    }
}

/// Moments entering the ID term envelope.
#[derive(Debug, Clone, Copy)]
struct IdMoments {
    inner2: f64,
    outer: f64,
    eta: f64,
}

impl IdMoments {
    fn new(s: &IdSpec) -> Result<Self> {
        let outer = s.outer_moment()?;
        if !outer.is_finite() {
            return Err(invalid(format!("Lévy density has no finite moment of order η={}", s.eta)));
        }
        Ok(IdMoments { inner2: s.inner_second_moment()?, outer, eta: s.eta })
    }

    // |V| ≤ |ab| ∫_{|x|≤1} x² ν + 2^{2-η} |b|^η ∫_{|x|>1} |x|^η ν (η ≤ 1),
    // with |b|^η replaced by |a|^{η-1}|b| for η > 1.
    fn bound(&self, ea: f64, eb: f64) -> f64 {
        let k = 2f64.powf(2.0 - self.eta) * self.outer;
        let outer = if self.eta <= 1.0 { eb.powf(self.eta) } else { ea.powf(self.eta - 1.0) * eb };
        ea * eb * self.inner2 + k * outer
    }
}

/// V_j for an ID law: ∫ (1 - e^{iax})(e^{ibx} - 1) ν(dx).
pub fn id_v(s: &IdSpec, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    if a == 0.0 || b == 0.0 {
        return Ok(Estimate::ZERO);
    }
    let eval = move |x: f64| -levy::expm1_i(a * x) * levy::expm1_i(b * x);
    let one = Complex64::new(1.0, 0.0);
    // -(e^{iax}-1)(e^{ibx}-1) = E_a + E_b - E_{a+b} with E_ω = e^{iωx}-1
    let terms = vec![(one, a), (one, b), (-one, a + b)];
    let k = Kernel { eval: &eval, terms, power: 0 };
    levy::integrate(s.density.as_ref(), &k, tol)
}

/// Pairwise sum over a fixed binary tree.
pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        len => {
            let (l, r) = v.split_at(len / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

fn sum_estimates(v: &[Estimate]) -> Estimate {
    let vals: Vec<Complex64> = v.iter().map(|e| e.value).collect();
    Estimate::new(pairwise_sum(&vals), v.iter().map(|e| e.err).sum())
}

// Term evaluator and envelope for one innovation family.
trait Terms: Sync {
    fn term(&self, a: f64, b: f64, ea: f64, eb: f64) -> Result<Estimate>;
    fn bound(&self, ea: f64, eb: f64) -> f64;
    fn index(&self) -> f64;
}

struct StableTerms<'a>(&'a StableSpec);

impl Terms for StableTerms<'_> {
    fn term(&self, a: f64, b: f64, _: f64, _: f64) -> Result<Estimate> {
        Ok(Estimate::new(stable_v(self.0, a, b), 0.0))
    }
    fn bound(&self, ea: f64, eb: f64) -> f64 {
        stable_v_bound(self.0, ea, eb)
    }
    fn index(&self) -> f64 {
        self.0.alpha
    }
}

struct IdTerms<'a> {
    spec: &'a IdSpec,
    moments: IdMoments,
}

impl Terms for IdTerms<'_> {
    fn term(&self, a: f64, b: f64, ea: f64, eb: f64) -> Result<Estimate> {
        let scale = self.moments.bound(ea.max(a.abs()), eb.max(b.abs()));
        id_v(self.spec, a, b, (1e-11 * scale).max(1e-300))
    }
    fn bound(&self, ea: f64, eb: f64) -> f64 {
        self.moments.bound(ea, eb)
    }
    fn index(&self) -> f64 {
        self.moments.eta
    }
}

fn eval_terms<T: Terms>(t: &T, c: &[f64], range: std::ops::Range<usize>, n: usize, z1: f64, z2: f64) -> Result<Vec<Estimate>> {
    crate::par_map(range, |j| {
        let (a, b) = (z1 * c[j], z2 * c[j + n]);
        t.term(a, b, a.abs(), b.abs())
    })
    .into_iter()
    .collect()
}

// Σ_{j>N} bound(|z₁c_j|, |z₂c_{j+n}|): explicit magnitudes up to `upto`,
// then the envelope.
struct TailBound<'a> {
    c: &'a [f64],
    upto: usize,
    env: Envelope,
}

impl TailBound<'_> {
    fn eval<T: Terms>(&self, t: &T, nn: usize, n: usize, z1: f64, z2: f64) -> f64 {
        let (z1, z2) = (z1.abs(), z2.abs());
        let mut sum = 0.0;
        for j in (nn + 1)..=self.upto.max(nn) {
            if j + n < self.c.len() && j > nn {
                sum += t.bound(z1 * self.c[j].abs(), z2 * self.c[j + n].abs());
            }
        }
        let mut j = self.upto.max(nn) + 1;
        let mut steps = 0usize;
        loop {
            let x = j as f64;
            let b = t.bound(z1 * self.env.at(x), z2 * self.env.at(x + n as f64));
            sum += b;
            if b == 0.0 || b <= 1e-18 * sum {
                break;
            }
            j += 1;
            steps += 1;
            if steps > N_CAP {
                return f64::INFINITY;
            }
        }
        sum * (1.0 + 1e-9)
    }
}

fn arma_series<T: Terms>(
    model: &ModelSpec,
    t: &T,
    n: usize,
    z1: f64,
    z2: f64,
    opts: &DependenceOptions,
) -> Result<(Estimate, usize)> {
    if model.p() == 0 {
        let q = model.q();
        if n > q {
            return Ok((Estimate::ZERO, 0));
        }
        let c = model.ma_poly();
        let v = eval_terms(t, &c, 0..(q - n + 1), n, z1, z2)?;
        return Ok((sum_estimates(&v), q - n + 1));
    }
    let desc = asym_descriptor(model)?;
    let base = ((40.0 / desc.lambda1).ceil() as usize).clamp(64, 1_000_000);
    let fixed = arma_coeffs(model, base + n)?;
    let mut nn = opts.truncation.unwrap_or(32);
    let mut cache: Vec<Estimate> = Vec::new();
    loop {
        let stream = if nn + n <= base + n { fixed.clone() } else { arma_coeffs(model, nn + n)? };
        let c = &stream.values;
        if cache.len() < nn + 1 {
            let more = eval_terms(t, c, cache.len()..(nn + 1), n, z1, z2)?;
            cache.extend(more);
        }
        let est = sum_estimates(&cache[..=nn]);
        let tail = TailBound { c: &fixed.values, upto: base, env: fixed.envelope };
        let tb = tail.eval(t, nn, n, z1, z2);
        let target = opts.abs_tol.max(opts.rel_tol * est.value.norm());
        if tb <= target {
            return Ok((Estimate::new(est.value, est.err + tb), nn + 1));
        }
        // Smallest N' with an acceptable envelope bound.
        let ok = |m: usize| tail.eval(t, m, n, z1, z2) <= target;
        let mut hi = (nn * 2).max(64);
        while hi < N_CAP && !ok(hi) {
            hi *= 2;
        }
        let hi = hi.min(N_CAP);
        let suggested = if ok(hi) { bisect_first(nn, hi, &ok) } else { hi };
        if opts.truncation.is_some() || nn >= N_CAP || !ok(suggested) {
            return Err(Error::IncreaseN { bound: tb, tol: target, n_terms: nn, suggested });
        }
        nn = suggested;
    }
}

// First m in (lo, hi] with ok(m), assuming ok is monotone and ok(hi).
fn bisect_first(mut lo: usize, mut hi: usize, ok: &dyn Fn(usize) -> bool) -> usize {
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

// Long memory: explicit sum to N plus a midpoint Euler–Maclaurin tail
// from the continuous coefficient extension.
fn farima_series<T: Terms>(
    model: &ModelSpec,
    t: &T,
    n: usize,
    z1: f64,
    z2: f64,
    opts: &DependenceOptions,
) -> Result<(Estimate, usize)> {
    let idx = t.index();
    let d = model.d;
    if idx * (d - 1.0) >= -1.0 {
        return Err(Error::NoCausalSolution(format!(
            "FARIMA with d={d} needs {idx}·(d-1) < -1 for Σ|c_j|^{idx} to converge"
        )));
    }
    let ext = CoeffExtension::new(model)?;
    let min_n = 2 * ext.start().ceil() as usize;
    let nn = opts.truncation.unwrap_or(2000).max(min_n);
    let stream = farima_coeffs(model, nn + n)?;
    let c = &stream.values;
    let v = eval_terms(t, c, 0..(nn + 1), n, z1, z2)?;
    let full = sum_estimates(&v);
    let half_n = nn / 2;
    let half = sum_estimates(&v[..=half_n]);

    let f = |x: f64| -> Result<Estimate> {
        let (a, b) = (z1 * ext.eval(x), z2 * ext.eval(x + n as f64));
        t.term(a, b, a.abs(), b.abs())
    };
    let fv = |x: f64| f(x).map(|e| e.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let tol = (1e-14 * full.value.norm()).max(1e-300);
    let tail = |m: usize| -> Result<Estimate> {
        let m = m as f64;
        let mut e = decades(&fv, m + 0.5, Sweep::Up, tol, 400)?;
        let corr = (f(m + 1.5)?.value - f(m - 0.5)?.value) / 48.0;
        e.value += corr;
        Ok(e)
    };
    let t_full = tail(nn)?;
    let t_half = tail(half_n)?;
    let value = full.value + t_full.value;
    let alt = half.value + t_half.value;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Quadrature { partial_re: value.re, partial_im: value.im, residual: f64::INFINITY });
    }
    let err = (value - alt).norm() + full.err + t_full.err;
    Ok((Estimate::new(value, err), nn + 1))
}

fn check_args(z1: f64, z2: f64) -> Result<()> {
    if !z1.is_finite() || !z2.is_finite() {
        return Err(invalid("z1 and z2 must be finite"));
    }
    Ok(())
}

fn series<T: Terms>(model: &ModelSpec, t: &T, n: usize, z1: f64, z2: f64, opts: &DependenceOptions) -> Result<DependenceValue> {
    let (e, terms) = if model.is_farima() { farima_series(model, t, n, z1, z2, opts)? } else { arma_series(model, t, n, z1, z2, opts)? };
    Ok(DependenceValue { n, z1, z2, value: e.value, err: e.err, terms })
}

/// I_n(z₁, z₂) for stable innovations from the closed-form terms.
pub fn i_stable(model: &ModelSpec, s: &StableSpec, n: usize, z1: f64, z2: f64, opts: &DependenceOptions) -> Result<DependenceValue> {
    s.validate()?;
    ensure_valid(model)?;
    check_args(z1, z2)?;
    if model.is_farima() && s.alpha * (model.d - 1.0) >= -1.0 {
        return Err(Error::NoCausalSolution(format!(
            "FARIMA with d={} needs α(d-1) < -1, got α={}",
            model.d, s.alpha
        )));
    }
    if z1 == 0.0 || z2 == 0.0 {
        return Ok(DependenceValue::zero(n, z1, z2));
    }
    series(model, &StableTerms(s), n, z1, z2, opts)
}

/// I_n(z₁, z₂) for ID innovations, each term by quadrature.
pub fn i_id(model: &ModelSpec, s: &IdSpec, n: usize, z1: f64, z2: f64, opts: &DependenceOptions) -> Result<DependenceValue> {
    ensure_valid(model)?;
    check_args(z1, z2)?;
    if model.is_farima() && s.eta * (model.d - 1.0) >= -1.0 {
        return Err(Error::NoCausalSolution(format!(
            "FARIMA with d={} needs η(d-1) < -1, got η={}",
            model.d, s.eta
        )));
    }
    if z1 == 0.0 || z2 == 0.0 {
        return Ok(DependenceValue::zero(n, z1, z2));
    }
    let t = IdTerms { spec: s, moments: IdMoments::new(s)? };
    series(model, &t, n, z1, z2, opts)
}

/// Dispatches on the innovation family.
pub fn dependence(
    model: &ModelSpec,
    innov: &InnovationSpec,
    n: usize,
    z1: f64,
    z2: f64,
    opts: &DependenceOptions,
) -> Result<DependenceValue> {
    match innov {
        InnovationSpec::Stable(s) => i_stable(model, s, n, z1, z2, opts),
        InnovationSpec::Id(s) => i_id(model, s, n, z1, z2, opts),
    }
}

/// I_n over a range of lags.
pub fn dependence_curve(
    model: &ModelSpec,
    innov: &InnovationSpec,
    lags: impl IntoIterator<Item = usize>,
    z1: f64,
    z2: f64,
    opts: &DependenceOptions,
) -> Result<Vec<DependenceValue>> {
    lags.into_iter().map(|n| dependence(model, innov, n, z1, z2, opts)).collect()
}

/// The codifference -I_n(1, -1).
pub fn codifference(model: &ModelSpec, innov: &InnovationSpec, n: usize, opts: &DependenceOptions) -> Result<DependenceValue> {
    let v = dependence(model, innov, n, 1.0, -1.0, opts)?;
    Ok(DependenceValue { value: -v.value, ..v })
}

// Means of (cos z₁X, sin z₁X, cos z₂Y, sin z₂Y, cos(z₁X+z₂Y), sin(z₁X+z₂Y)).
fn cf_features(x: f64, y: f64, z1: f64, z2: f64) -> [f64; 6] {
    let (s1, c1) = (z1 * x).sin_cos();
    let (s2, c2) = (z2 * y).sin_cos();
    let (s3, c3) = (z1 * x + z2 * y).sin_cos();
    [c1, s1, c2, s2, c3, s3]
}

fn log_cf_combination(m: &[f64; 6]) -> Result<Complex64> {
    let phis = [Complex64::new(m[0], m[1]), Complex64::new(m[2], m[3]), Complex64::new(m[4], m[5])];
    for p in phis {
        if p.norm() < 1e-3 {
            return Err(Error::EmpiricalCf(p.norm()));
        }
    }
    Ok(phis[0].ln() + phis[1].ln() - phis[2].ln())
}

/// Monte Carlo estimate of I_n from one pair (X₀, Xₙ) per replicate path,
/// with a delta-method standard error.
pub fn i_empirical(paths: &PathBatch, n: usize, z1: f64, z2: f64) -> Result<DependenceValue> {
    check_args(z1, z2)?;
    if paths.len <= n {
        return Err(invalid(format!("paths of length {} are too short for lag {n}", paths.len)));
    }
    let r = paths.replicates;
    if r < 2 {
        return Err(invalid("at least two replicate paths are needed"));
    }
    if z1 == 0.0 || z2 == 0.0 {
        return Ok(DependenceValue::zero(n, z1, z2));
    }
    let feats: Vec<[f64; 6]> = (0..r)
        .map(|k| {
            let p = paths.path(k);
            cf_features(p[0], p[n], z1, z2)
        })
        .collect();
    let rf = r as f64;
    let mut mean = [0.0; 6];
    for f in &feats {
        for i in 0..6 {
            mean[i] += f[i] / rf;
        }
    }
    let value = log_cf_combination(&mean)?;
    let mut cov = [[0.0; 6]; 6];
    for f in &feats {
        for i in 0..6 {
            for k in 0..6 {
                cov[i][k] += (f[i] - mean[i]) * (f[k] - mean[k]) / (rf - 1.0);
            }
        }
    }
    // Gradient of ±log(C + iS) in (C, S) is ±(1/φ, i/φ).
    let mut g = [Complex64::new(0.0, 0.0); 6];
    for (slot, sign) in [(0usize, 1.0), (1, 1.0), (2, -1.0)] {
        let phi = Complex64::new(mean[2 * slot], mean[2 * slot + 1]);
        g[2 * slot] = sign / phi;
        g[2 * slot + 1] = I * sign / phi;
    }
    let (mut var_re, mut var_im) = (0.0, 0.0);
    for i in 0..6 {
        for k in 0..6 {
            var_re += g[i].re * cov[i][k] * g[k].re;
            var_im += g[i].im * cov[i][k] * g[k].im;
        }
    }
    let err = ((var_re + var_im) / rf).max(0.0).sqrt();
    Ok(DependenceValue { n, z1, z2, value, err, terms: r })
}

/// Estimate from all within-path pairs (X_t, X_{t+n}), with a delete-one-block
/// jackknife error over `blocks` contiguous blocks.
pub fn i_empirical_ergodic(paths: &PathBatch, n: usize, z1: f64, z2: f64, blocks: usize) -> Result<DependenceValue> {
    check_args(z1, z2)?;
    if paths.len <= n + 1 {
        return Err(invalid(format!("paths of length {} are too short for lag {n}", paths.len)));
    }
    if blocks < 2 {
        return Err(invalid("the jackknife needs at least two blocks"));
    }
    if z1 == 0.0 || z2 == 0.0 {
        return Ok(DependenceValue::zero(n, z1, z2));
    }
    let mut feats: Vec<[f64; 6]> = Vec::new();
    for k in 0..paths.replicates {
        let p = paths.path(k);
        for t in 0..(p.len() - n) {
            feats.push(cf_features(p[t], p[t + n], z1, z2));
        }
    }
    if feats.len() < blocks {
        return Err(invalid("fewer pairs than jackknife blocks"));
    }
    let total = feats.len();
    let mut sums = vec![[0.0; 6]; blocks];
    let mut counts = vec![0usize; blocks];
    for (i, f) in feats.iter().enumerate() {
        let b = i * blocks / total;
        counts[b] += 1;
        for k in 0..6 {
            sums[b][k] += f[k];
        }
    }
    let mut all = [0.0; 6];
    for s in &sums {
        for k in 0..6 {
            all[k] += s[k];
        }
    }
    let mean = all.map(|x| x / total as f64);
    let value = log_cf_combination(&mean)?;
    let mut loo = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let m = total - counts[b];
        let mut mb = [0.0; 6];
        for k in 0..6 {
            mb[k] = (all[k] - sums[b][k]) / m as f64;
        }
        loo.push(log_cf_combination(&mb)?);
    }
    let bar = loo.iter().sum::<Complex64>() / blocks as f64;
    let var: f64 = loo.iter().map(|v| (v - bar).norm_sqr()).sum::<f64>() * (blocks as f64 - 1.0) / blocks as f64;
    Ok(DependenceValue { n, z1, z2, value, err: var.sqrt(), terms: total })
}
