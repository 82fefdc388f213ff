//! Predicted decay of I_n as n → ∞, the limit integrals of the long-memory
//! regimes, and checks of computed sequences against the predictions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{arma_coeffs, asym_descriptor, ensure_valid, farima_coeffs, CoeffExtension, ModelSpec};
use crate::dependence::{dependence, iv, iv_log, rv, DependenceOptions};
use crate::error::{invalid, Error, Result};
use crate::innovations::{IdSpec, InnovationSpec, StableSpec};
use crate::levy::{self, Kernel};
use crate::quad::{decades, Estimate, Sweep};
use crate::special;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Whether the prediction is a limit or a limsup bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateKind {
    ExactLimit,
    UpperBound,
}

/// Predicted behaviour I_n ~ constant · n^{poly_exponent} e^{exp_rate·n}.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePrediction {
    pub kind: RateKind,
    pub poly_exponent: f64,
    pub exp_rate: f64,
    /// The limit, or for bounds the bound in the real part.
    pub constant: Complex64,
    /// Error of the constant from series truncation and quadrature.
    pub constant_err: f64,
    /// The constant recomputed with h fitted from the coefficients.
    pub constant_fit: Option<Complex64>,
    pub regime: String,
}

#[derive(Serialize)]
struct PredictionJson<'a> {
    kind: RateKind,
    regime: &'a str,
    poly_exponent: f64,
    exp_rate: f64,
    constant_re: f64,
    constant_im: f64,
    constant_err: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant_fit_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant_fit_im: Option<f64>,
}

impl Serialize for RatePrediction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PredictionJson {
            kind: self.kind,
            regime: &self.regime,
            poly_exponent: self.poly_exponent,
            exp_rate: self.exp_rate,
            constant_re: self.constant.re,
            constant_im: self.constant.im,
            constant_err: self.constant_err,
            constant_fit_re: self.constant_fit.map(|c| c.re),
            constant_fit_im: self.constant_fit.map(|c| c.im),
        }
        .serialize(s)
    }
}

impl RatePrediction {
    fn exact(poly: f64, exp_rate: f64, c: Estimate, regime: &str) -> Self {
        RatePrediction {
            kind: RateKind::ExactLimit,
            poly_exponent: poly,
            exp_rate,
            constant: c.value,
            constant_err: c.err,
            constant_fit: None,
            regime: regime.into(),
        }
    }

    fn bound(poly: f64, exp_rate: f64, b: f64, err: f64, regime: &str) -> Self {
        RatePrediction {
            kind: RateKind::UpperBound,
            poly_exponent: poly,
            exp_rate,
            constant: Complex64::new(b, 0.0),
            constant_err: err,
            constant_fit: None,
            regime: regime.into(),
        }
    }

    /// I_n / (n^{poly_exponent} e^{exp_rate·n}).
    pub fn normalize(&self, n: usize, value: Complex64) -> Complex64 {
        if value == Complex64::new(0.0, 0.0) {
            return value;
        }
        let nf = n as f64;
        let log_scale = -self.exp_rate * nf - if self.poly_exponent == 0.0 { 0.0 } else { self.poly_exponent * nf.ln() };
        // split to avoid overflow of e^{λn} before the product
        let m = value.norm();
        let arg = value / m;
        arg * (m.ln() + log_scale).exp()
    }

    pub fn is_finite_memory(&self) -> bool {
        self.regime.starts_with("finite memory") || self.regime.starts_with("degenerate")
    }
}

/// The three integrands of the long-memory limits, evaluated at
/// u = z₁x^{d-1}, v = z₂(1+x)^{d-1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GFunction {
    /// |u+v|^α - |u|^α - |v|^α
    G1,
    /// the same with signed powers
    G2,
    /// (u+v) log|u+v| - u log|u| - v log|v|
    G3,
}

fn uv(x: f64, z1: f64, z2: f64, d: f64) -> (f64, f64) {
    (z1 * x.powf(d - 1.0), z2 * (1.0 + x).powf(d - 1.0))
}

pub fn eval_g1(x: f64, z1: f64, z2: f64, alpha: f64, d: f64) -> f64 {
    let (u, v) = uv(x, z1, z2, d);
    rv(u, v, alpha)
}

pub fn eval_g2(x: f64, z1: f64, z2: f64, alpha: f64, d: f64) -> f64 {
    let (u, v) = uv(x, z1, z2, d);
    iv(u, v, alpha)
}

/// Written as (u+v) log|1+v/u| + v log|u| - v log|v|.
pub fn eval_g3(x: f64, z1: f64, z2: f64, d: f64) -> f64 {
    let (u, v) = uv(x, z1, z2, d);
    iv_log(u, v)
}

pub fn eval_g(which: GFunction, x: f64, z1: f64, z2: f64, alpha: f64, d: f64) -> f64 {
    match which {
        GFunction::G1 => eval_g1(x, z1, z2, alpha, d),
        GFunction::G2 => eval_g2(x, z1, z2, alpha, d),
        GFunction::G3 => eval_g3(x, z1, z2, d),
    }
}

/// A real integral with its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitIntegral {
    pub value: f64,
    pub err: f64,
}

/// ∫₀^∞ g(x) dx, integrated decade by decade in log scale toward both ends.
pub fn limit_integral(which: GFunction, z1: f64, z2: f64, alpha: f64, d: f64) -> Result<LimitIntegral> {
    if !(alpha > 0.0 && alpha <= 2.0) || !(d < 1.0) || !z1.is_finite() || !z2.is_finite() {
        return Err(invalid(format!("bad limit integral parameters α={alpha}, d={d}")));
    }
    if z1 == 0.0 || z2 == 0.0 {
        return Ok(LimitIntegral { value: 0.0, err: 0.0 });
    }
    let at_inf = match which {
        GFunction::G3 => d - 1.0,
        _ => alpha * (d - 1.0),
    };
    if at_inf >= -1.0 {
        return Err(Error::Divergent(format!("g decays like x^{at_inf} at infinity, not integrable")));
    }
    if which != GFunction::G3 && alpha > 1.0 && (alpha - 1.0) * (d - 1.0) <= -1.0 {
        return Err(Error::Divergent(format!(
            "g behaves like x^{} at 0, not integrable",
            (alpha - 1.0) * (d - 1.0)
        )));
    }
    let f = |x: f64| Complex64::new(eval_g(which, x, z1, z2, alpha, d), 0.0);
    let tol = 1e-11;
    let lo = decades(&f, 1.0, Sweep::Down, tol, 400)?;
    let hi = decades(&f, 1.0, Sweep::Up, tol, 400)?;
    let e = lo + hi;
    if e.err > 1e-8 {
        return Err(Error::Quadrature { partial_re: e.value.re, partial_im: 0.0, residual: e.err });
    }
    Ok(LimitIntegral { value: e.value.re, err: e.err })
}

// Σ_j e^{-λj} f(c_j) for ARMA coefficients, with a tail from the envelope:
// |f(c)| ≤ bound(|c|).
fn arma_weighted_sum(
    model: &ModelSpec,
    lambda: f64,
    f: &(dyn Fn(f64) -> Result<Estimate> + Sync),
    bound: &dyn Fn(f64) -> f64,
) -> Result<Estimate> {
    let mut n = 64usize;
    let mut cache: Vec<Estimate> = Vec::new();
    loop {
        let st = arma_coeffs(model, n)?;
        let c = &st.values;
        let start = cache.len();
        let more: Vec<Result<Estimate>> = crate::par_map(start..(n + 1), |j| f(c[j]));
        for (k, e) in more.into_iter().enumerate() {
            cache.push(e? * Complex64::new((-lambda * (start + k) as f64).exp(), 0.0));
        }
        let vals: Vec<Complex64> = cache.iter().map(|e| e.value).collect();
        let sum = Estimate::new(crate::dependence::pairwise_sum(&vals), cache.iter().map(|e| e.err).sum());
        let mut tail = 0.0;
        let mut j = n + 1;
        loop {
            let t = (-lambda * j as f64).exp() * bound(st.envelope.at(j as f64));
            tail += t;
            if t == 0.0 || t <= 1e-18 * tail || j > n + 10_000_000 {
                break;
            }
            j += 1;
        }
        if tail <= 1e-13 * sum.value.norm() || n >= 4_000_000 {
            return Ok(Estimate::new(sum.value, sum.err + tail));
        }
        n *= 2;
    }
}

// Σ_j f(c_j) for FARIMA coefficients: explicit to N, then the midpoint
// Euler–Maclaurin tail over the continuous extension.
fn farima_sum(model: &ModelSpec, f: &(dyn Fn(f64) -> Result<Estimate> + Sync)) -> Result<Estimate> {
    let ext = CoeffExtension::new(model)?;
    let nn = 2000usize.max(2 * ext.start().ceil() as usize);
    let c = farima_coeffs(model, nn)?.values;
    let terms: Vec<Estimate> = crate::par_map(0..(nn + 1), |j| f(c[j])).into_iter().collect::<Result<_>>()?;
    let vals: Vec<Complex64> = terms.iter().map(|e| e.value).collect();
    let qerr: f64 = terms.iter().map(|e| e.err).sum();
    let full = crate::dependence::pairwise_sum(&vals);
    let half = crate::dependence::pairwise_sum(&vals[..=nn / 2]);
    let g = |x: f64| f(ext.eval(x)).map(|e| e.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let tol = (1e-14 * full.norm()).max(1e-300);
    let tail = |m: usize| -> Result<Estimate> {
        let m = m as f64;
        let mut e = decades(&g, m + 0.5, Sweep::Up, tol, 400)?;
        e.value += (g(m + 1.5) - g(m - 0.5)) / 48.0;
        Ok(e)
    };
    let tf = tail(nn)?;
    let th = tail(nn / 2)?;
    let v = full + tf.value;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Quadrature { partial_re: v.re, partial_im: v.im, residual: f64::INFINITY });
    }
    Ok(Estimate::new(v, (v - half - th.value).norm() + qerr + tf.err))
}

// ∫ (1 - e^{iax}) x ν(dx).
fn first_moment_kernel(s: &IdSpec, a: f64) -> Result<Estimate> {
    if a == 0.0 {
        return Ok(Estimate::ZERO);
    }
    let eval = move |x: f64| -levy::expm1_i(a * x) * x;
    let k = Kernel {
        eval: &eval,
        terms: vec![(Complex64::new(-1.0, 0.0), a)],
        power: 1,
    };
    levy::integrate(s.density.as_ref(), &k, 1e-13)
}

// ∫ min(|a|x², 2|x|) ν(dx), which dominates ∫ |1 - e^{iax}||x| ν(dx).
fn first_moment_envelope(s: &IdSpec, a: f64) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.0);
    }
    let a = a.abs();
    let mut t = 0.0;
    for sg in [1.0, -1.0] {
        let g = |y: f64| Complex64::new((a * y * y).min(2.0 * y) * s.density.density(sg * y), 0.0);
        let knee = 2.0 / a;
        t += decades(&g, knee, Sweep::Down, 1e-14, 400)?.value.re;
        t += decades(&g, knee, Sweep::Up, 1e-14, 400)?.value.re;
    }
    Ok(t)
}

const TAG_ZERO: &str = "degenerate argument: I_n = 0";
const TAG_MA: &str = "finite memory: I_n = 0 beyond the MA order";

fn boundary(x: f64) -> bool {
    (x + 1.0).abs() <= 1e-12
}

/// Regime and constant of the asymptotic behaviour of I_n(z₁, z₂).
pub fn predict_rate(model: &ModelSpec, innov: &InnovationSpec, z1: f64, z2: f64) -> Result<RatePrediction> {
    ensure_valid(model)?;
    if !z1.is_finite() || !z2.is_finite() {
        return Err(invalid("z1 and z2 must be finite"));
    }
    let idx = innov.index();
    if model.is_farima() && idx * (model.d - 1.0) >= -1.0 {
        return Err(Error::NoCausalSolution(format!(
            "FARIMA with d={} needs index·(d-1) < -1, got index {idx}",
            model.d
        )));
    }
    if let InnovationSpec::Stable(s) = innov {
        s.validate()?;
    }
    if z1 == 0.0 || z2 == 0.0 {
        return Ok(RatePrediction::exact(0.0, 0.0, Estimate::ZERO, TAG_ZERO));
    }
    if !model.is_farima() && model.p() == 0 {
        return Ok(RatePrediction::exact(0.0, 0.0, Estimate::ZERO, TAG_MA));
    }
    match (innov, model.is_farima()) {
        (InnovationSpec::Stable(s), false) => stable_arma(model, s, z1, z2),
        (InnovationSpec::Stable(s), true) => stable_farima(model, s, z1, z2),
        (InnovationSpec::Id(s), false) => id_arma(model, s, z1, z2),
        (InnovationSpec::Id(s), true) => id_farima(model, s, z1, z2),
    }
}

fn stable_arma(model: &ModelSpec, s: &StableSpec, z1: f64, z2: f64) -> Result<RatePrediction> {
    let desc = asym_descriptor(model)?;
    let (lam, l, h) = (desc.lambda1, desc.l1 as f64, desc.h);
    let real = desc.real_dominant();
    let al = s.alpha;
    let be = s.beta;
    let tan = s.tan();
    let skew = (1.0 + (be * tan).powi(2)).sqrt();
    if al < 1.0 {
        let (poly, rate) = (al * (l - 1.0), -al * lam);
        let geo = 1.0 / (1.0 - (-lam * al).exp());
        if real {
            let c = |h: f64| (z2 * h).abs().powf(al) * Complex64::new(-1.0, be * tan * (z2 * h).signum()) * geo;
            let mut p = RatePrediction::exact(poly, rate, Estimate::new(c(h), 0.0), "stable ARMA, 0<α<1, real dominant root");
            p.constant_fit = Some(c(desc.h_fit));
            Ok(p)
        } else {
            let b = skew * (2.0 * z2 * h).abs().powf(al) * geo;
            Ok(RatePrediction::bound(poly, rate, b, 0.0, "stable ARMA, 0<α<1, complex dominant root (bound)"))
        }
    } else if al == 1.0 {
        let (poly, rate) = (l, -lam);
        let geo = 1.0 / (1.0 - (-lam).exp());
        if real {
            let c = |h: f64| I * (be * 2.0 / PI * lam * z2 * h * geo);
            let mut p = RatePrediction::exact(poly, rate, Estimate::new(c(h), 0.0), "stable ARMA, α=1, real dominant root");
            p.constant_fit = Some(c(desc.h_fit));
            Ok(p)
        } else {
            let b = 2.0 * lam * be.abs() * 2.0 / PI * (z2 * h).abs() * geo;
            Ok(RatePrediction::bound(poly, rate, b, 0.0, "stable ARMA, α=1, complex dominant root (bound)"))
        }
    } else {
        let (poly, rate) = (l - 1.0, -lam);
        let p1 = al - 1.0;
        let bound = |c: f64| c.powf(p1);
        let s1 = arma_weighted_sum(model, lam, &|c| Ok(Estimate::new(Complex64::new(crate::innovations::signed_pow(c, p1), 0.0), 0.0)), &bound)?;
        let s2 = arma_weighted_sum(model, lam, &|c| Ok(Estimate::new(Complex64::new(c.abs().powf(p1), 0.0), 0.0)), &bound)?;
        let pre = al * z1.abs().powf(p1) * z2;
        if real {
            let brace = z1.signum() * s1.value - I * (be * tan) * s2.value;
            let err = pre.abs() * h.abs() * (s1.err + (be * tan).abs() * s2.err);
            let mut p = RatePrediction::exact(poly, rate, Estimate::new(brace * (pre * h), err), "stable ARMA, 1<α≤2, real dominant root");
            p.constant_fit = Some(brace * (pre * desc.h_fit));
            Ok(p)
        } else {
            let b = skew * 2.0 * pre.abs() * h.abs() * s2.value.re;
            Ok(RatePrediction::bound(poly, rate, b, skew * 2.0 * pre.abs() * h * s2.err, "stable ARMA, 1<α≤2, complex dominant root (bound)"))
        }
    }
}

fn stable_farima(model: &ModelSpec, s: &StableSpec, z1: f64, z2: f64) -> Result<RatePrediction> {
    let d = model.d;
    let k = asym_descriptor(model)?.farima_const.expect("FARIMA model");
    let al = s.alpha;
    let be = s.beta;
    if al > 1.0 && boundary((al - 1.0) * (d - 1.0)) {
        return Err(Error::BoundaryRegime(format!("(α-1)(d-1) = -1 at α={al}, d={d}")));
    }
    if al == 1.0 && be != 0.0 {
        let g1 = limit_integral(GFunction::G1, z1, z2, 1.0, d)?;
        let g3 = limit_integral(GFunction::G3, z1, z2, 1.0, d)?;
        let c = Complex64::new(k.abs() * g1.value, 2.0 * be / PI * k * g3.value);
        let err = k.abs() * (g1.err + 2.0 * be.abs() / PI * g3.err);
        return Ok(RatePrediction::exact(d, 0.0, Estimate::new(c, err), "stable FARIMA, α=1, skewed"));
    }
    if al <= 1.0 || (al - 1.0) * (d - 1.0) > -1.0 {
        let g1 = limit_integral(GFunction::G1, z1, z2, al, d)?;
        let scale = k.abs().powf(al);
        let (mut c, mut err) = (Complex64::new(scale * g1.value, 0.0), scale * g1.err);
        if be != 0.0 {
            let g2 = limit_integral(GFunction::G2, z1, z2, al, d)?;
            let t = be * s.tan() * k.signum();
            c.im = -scale * t * g2.value;
            err += scale * t.abs() * g2.err;
        }
        let tag = if al <= 1.0 { "stable FARIMA, 0<α≤1" } else { "stable FARIMA, 1<α≤2, (α-1)(d-1) > -1" };
        return Ok(RatePrediction::exact(al * (d - 1.0) + 1.0, 0.0, Estimate::new(c, err), tag));
    }
    let p1 = al - 1.0;
    let tan = s.tan();
    let sum = farima_sum(model, &|c: f64| {
        let a = z1 * c;
        if a == 0.0 {
            return Ok(Estimate::ZERO);
        }
        Ok(Estimate::new(a.abs().powf(p1) * Complex64::new(a.signum(), -be * tan), 0.0))
    })?;
    let pre = al * k * z2;
    Ok(RatePrediction::exact(
        d - 1.0,
        0.0,
        Estimate::new(sum.value * pre, sum.err * pre.abs()),
        "stable FARIMA, 1<α≤2, (α-1)(d-1) < -1",
    ))
}

fn id_arma(model: &ModelSpec, s: &IdSpec, z1: f64, z2: f64) -> Result<RatePrediction> {
    let desc = asym_descriptor(model)?;
    let (lam, l, h) = (desc.lambda1, desc.l1 as f64, desc.h);
    let real = desc.real_dominant();
    let eta = s.eta;
    if eta < 1.0 {
        let m = s.outer_moment()?;
        let geo = 1.0 / (1.0 - (-lam * eta).exp());
        let (k, tag) = if real {
            (2f64.powf(2.0 - eta), "ID ARMA, 0<η<1, real dominant root (bound)")
        } else {
            (4.0, "ID ARMA, 0<η<1, complex dominant root (bound)")
        };
        let b = k * (z2 * h).abs().powf(eta) * m * geo;
        return Ok(RatePrediction::bound(eta * (l - 1.0), -eta * lam, b, 0.0, tag));
    }
    let m2 = s.inner_second_moment()?;
    let m1 = levy::moment_outer(s.density.as_ref(), 1.0)?;
    let env = move |c: f64| (z1 * c).abs() * m2 + 2.0 * m1;
    if real {
        let sum = arma_weighted_sum(model, lam, &|c| first_moment_kernel(s, z1 * c), &env)?;
        let c = |h: f64| sum.value * (I * z2 * h);
        let mut p = RatePrediction::exact(l - 1.0, -lam, Estimate::new(c(h), sum.err * (z2 * h).abs()), "ID ARMA, 1≤η≤2, real dominant root");
        p.constant_fit = Some(c(desc.h_fit));
        Ok(p)
    } else {
        let sum = arma_weighted_sum(
            model,
            lam,
            &|c| Ok(Estimate::new(Complex64::new(first_moment_envelope(s, z1 * c)?, 0.0), 0.0)),
            &env,
        )?;
        let pre = 2.0 * (z2 * h).abs();
        Ok(RatePrediction::bound(l - 1.0, -lam, pre * sum.value.re, pre * sum.err, "ID ARMA, 1≤η≤2, complex dominant root (bound)"))
    }
}

fn id_farima(model: &ModelSpec, s: &IdSpec, z1: f64, z2: f64) -> Result<RatePrediction> {
    let d = model.d;
    let k = asym_descriptor(model)?.farima_const.expect("FARIMA model");
    let eta = s.eta;
    if eta <= 1.0 {
        let m = s.outer_moment()?;
        let b = 2f64.powf(2.0 - eta) / (eta * (1.0 - d) - 1.0) * (z2 * k).abs().powf(eta) * m;
        return Ok(RatePrediction::bound(eta * (d - 1.0) + 1.0, 0.0, b, 0.0, "ID FARIMA, 0<η≤1 (bound)"));
    }
    let e = (eta - 1.0) * (d - 1.0);
    if boundary(e) {
        return Err(Error::BoundaryRegime(format!("(η-1)(d-1) = -1 at η={eta}, d={d}")));
    }
    if e < -1.0 {
        let sum = farima_sum(model, &|c| first_moment_kernel(s, z1 * c))?;
        let pre = I * (k * z2);
        return Ok(RatePrediction::exact(d - 1.0, 0.0, Estimate::new(sum.value * pre, sum.err * pre.norm()), "ID FARIMA, 1<η≤2, (η-1)(d-1) < -1"));
    }
    // at η = 2 the |x| ≤ 1 part decays at the same rate and is kept
    let m = if eta == 2.0 { s.outer_moment()? + s.inner_second_moment()? } else { s.outer_moment()? };
    let beta = special::beta(e + 1.0, -eta * (d - 1.0) - 1.0);
    let b = 2f64.powf(2.0 - eta) * k.abs().powf(eta) * z1.abs().powf(eta - 1.0) * z2.abs() * beta * m;
    Ok(RatePrediction::bound(eta * (d - 1.0) + 1.0, 0.0, b, 0.0, "ID FARIMA, 1<η≤2, (η-1)(d-1) > -1 (bound)"))
}

/// Least-squares fit of log|I_n| = a + b n + c log n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// c, the power of n.
    pub fitted_exponent: f64,
    /// b, the exponential rate.
    pub fitted_exp_rate: f64,
    /// RMS residual of the fit.
    pub residual: f64,
    pub n_range: (usize, usize),
}

pub fn fit_rate(series: &[(usize, Complex64)]) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(n, v)| *n > 0 && v.norm() >= 1e-300 && v.norm().is_finite())
        .map(|(n, v)| (*n as f64, v.norm().ln()))
        .collect();
    if pts.len() < 5 {
        return Err(invalid(format!("fit_rate needs at least 5 usable points, got {}", pts.len())));
    }
    let a = DMatrix::from_fn(pts.len(), 3, |i, c| match c {
        0 => 1.0,
        1 => pts[i].0,
        _ => pts[i].0.ln(),
    });
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let x = a.clone().svd(true, true).solve(&y, 1e-14).map_err(|e| invalid(format!("rate fit failed: {e}")))?;
    let r = &a * &x - &y;
    let rms = (r.norm_squared() / pts.len() as f64).sqrt();
    let ns: Vec<usize> = series.iter().map(|p| p.0).collect();
    Ok(RateFit {
        fitted_exponent: x[2],
        fitted_exp_rate: x[1],
        residual: rms,
        n_range: (*ns.iter().min().unwrap(), *ns.iter().max().unwrap()),
    })
}

/// Limit L of v(n) = L + K n^{-s} from three points, with s solved for.
/// The error is the distance to the last point.
pub fn richardson(points: [(f64, Complex64); 3]) -> Result<Estimate> {
    let [(n1, v1), (n2, v2), (n3, v3)] = points;
    if !(n1 < n2 && n2 < n3 && n1 > 0.0) {
        return Err(invalid("richardson needs increasing positive n"));
    }
    let (d12, d23) = (v1 - v2, v2 - v3);
    if d23.norm() == 0.0 {
        return Ok(Estimate::new(v3, 0.0));
    }
    // pick the component carrying the trend
    let (a, b) = if d12.re.abs() + d23.re.abs() >= d12.im.abs() + d23.im.abs() { (d12.re, d23.re) } else { (d12.im, d23.im) };
    let target = a / b;
    let ratio = |s: f64| (n1.powf(-s) - n2.powf(-s)) / (n2.powf(-s) - n3.powf(-s));
    // ratio is increasing in s from its s→0 limit ln(n2/n1)/ln(n3/n2)
    let (mut lo, mut hi) = (1e-6, 20.0);
    if !(target > ratio(lo) && target < ratio(hi)) {
        return Err(Error::Divergent(format!("sequence is not of the form L + K n^-s (ratio {target})")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let k = d23 / (n2.powf(-s) - n3.powf(-s));
    let l = v3 - k * n3.powf(-s);
    Ok(Estimate::new(l, (l - v3).norm()))
}

/// One row of a verification report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    #[serde(rename = "I_re")]
    pub i_re: f64,
    #[serde(rename = "I_im")]
    pub i_im: f64,
    pub normalized_re: f64,
    pub normalized_im: f64,
    pub predicted_re: f64,
    pub predicted_im: f64,
    /// Relative distance to the limit, or |normalized|/bound for bounds.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Report {
    pub prediction: RatePrediction,
    pub rows: Vec<Table1Row>,
    pub pass: bool,
    pub deviation_last: f64,
}

impl Table1Report {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,I_re,I_im,normalized_re,normalized_im,predicted_re,predicted_im,deviation\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.n, r.i_re, r.i_im, r.normalized_re, r.normalized_im, r.predicted_re, r.predicted_im, r.deviation
            ));
        }
        s
    }
}

/// Computes I_n on `n_grid`, normalizes by the predicted rate and compares.
pub fn verify_table1(
    model: &ModelSpec,
    innov: &InnovationSpec,
    z1: f64,
    z2: f64,
    n_grid: &[usize],
    opts: &DependenceOptions,
) -> Result<Table1Report> {
    if n_grid.is_empty() {
        return Err(invalid("empty lag grid"));
    }
    let pred = predict_rate(model, innov, z1, z2)?;
    let values: Vec<Result<_>> = crate::par_map(0..n_grid.len(), |k| dependence(model, innov, n_grid[k], z1, z2, opts));
    let mut rows = Vec::with_capacity(n_grid.len());
    for (&n, v) in n_grid.iter().zip(values) {
        let v = v?;
        let norm = pred.normalize(n, v.value);
        let deviation = match pred.kind {
            RateKind::ExactLimit => {
                let diff = (norm - pred.constant).norm();
                if pred.constant.norm() > 0.0 { diff / pred.constant.norm() } else { diff }
            }
            RateKind::UpperBound => norm.norm() / pred.constant.re,
        };
        rows.push(Table1Row {
            n,
            i_re: v.value.re,
            i_im: v.value.im,
            normalized_re: norm.re,
            normalized_im: norm.im,
            predicted_re: pred.constant.re,
            predicted_im: pred.constant.im,
            deviation,
        });
    }
    let last = rows.iter().max_by_key(|r| r.n).expect("nonempty");
    let first = rows.iter().min_by_key(|r| r.n).expect("nonempty");
    let pass = if pred.is_finite_memory() {
        let q = model.q();
        rows.iter().filter(|r| r.n > q || pred.regime == TAG_ZERO).all(|r| r.i_re.hypot(r.i_im) <= 1e-14)
    } else {
        match pred.kind {
            RateKind::ExactLimit => last.deviation < 0.02 && last.deviation <= first.deviation,
            RateKind::UpperBound => last.deviation <= 1.0 + 1e-6,
        }
    };
    let deviation_last = last.deviation;
    Ok(Table1Report { prediction: pred, rows, pass, deviation_last })
}
