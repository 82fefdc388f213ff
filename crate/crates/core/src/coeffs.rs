//! MA(∞) coefficients of causal ARMA and FARIMA models.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Diagnostic, Error, Result};
use crate::poly;
use crate::special;

/// Roots this close to the unit circle (or inside) fail validation.
pub const ROOT_TOL: f64 = 1e-9;
/// AR and MA roots closer than this (relative) count as a common zero.
pub const COMMON_ZERO_TOL: f64 = 1e-8;
/// Relative distance under which roots are merged into one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Φ(B) X = Θ(B) (1 - B)^{-d} ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ModelSpec {
    #[serde(default)]
    pub phi: Vec<f64>,
    #[serde(default)]
    pub theta: Vec<f64>,
    #[serde(default)]
    pub d: f64,
}

impl ModelSpec {
    pub fn arma(phi: &[f64], theta: &[f64]) -> Self {
        ModelSpec { phi: phi.to_vec(), theta: theta.to_vec(), d: 0.0 }
    }

    pub fn farima(phi: &[f64], d: f64, theta: &[f64]) -> Self {
        ModelSpec { phi: phi.to_vec(), theta: theta.to_vec(), d }
    }

    pub fn is_farima(&self) -> bool {
        self.d != 0.0
    }

    /// 1 - φ₁z - … - φ_p z^p, trailing zeros removed.
    pub fn ar_poly(&self) -> Vec<f64> {
        let mut a = vec![1.0];
        a.extend(self.phi.iter().map(|&p| -p));
        poly::trim(&a).to_vec()
    }

    /// 1 + θ₁z + … + θ_q z^q, trailing zeros removed.
    pub fn ma_poly(&self) -> Vec<f64> {
        let mut a = vec![1.0];
        a.extend_from_slice(&self.theta);
        poly::trim(&a).to_vec()
    }

    /// Effective AR order.
    pub fn p(&self) -> usize {
        self.ar_poly().len() - 1
    }

    /// Effective MA order.
    pub fn q(&self) -> usize {
        self.ma_poly().len() - 1
    }
}

fn pair(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

/// Checks causality and the absence of common zeros.
///
/// Non-finite input is an error; every other violation is reported as a
/// diagnostic. An empty list means the model is valid.
pub fn validate_model(spec: &ModelSpec) -> Result<Vec<Diagnostic>> {
    if spec.phi.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidModel(vec![Diagnostic::NonFinite("phi")]));
    }
    if spec.theta.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidModel(vec![Diagnostic::NonFinite("theta")]));
    }
    if !spec.d.is_finite() {
        return Err(Error::InvalidModel(vec![Diagnostic::NonFinite("d")]));
    }
    let mut out = Vec::new();
    if spec.d >= 1.0 {
        out.push(Diagnostic::MemoryParameter(spec.d));
    }
    let ar = poly::roots(&spec.ar_poly());
    let ma = poly::roots(&spec.ma_poly());
    for &r in &ar {
        let m = r.norm();
        if m <= 1.0 - ROOT_TOL {
            out.push(Diagnostic::ArRootInside { root: pair(r), modulus: m });
        } else if m <= 1.0 + ROOT_TOL {
            out.push(Diagnostic::Borderline { which: "AR", root: pair(r), modulus: m });
        }
    }
    for &a in &ar {
        if ma.iter().any(|&b| (a - b).norm() <= COMMON_ZERO_TOL * a.norm().max(1.0)) {
            out.push(Diagnostic::CommonZero { root: pair(a) });
        }
    }
    Ok(out)
}

/// Runs [`validate_model`] and turns diagnostics into an error.
pub fn ensure_valid(spec: &ModelSpec) -> Result<()> {
    let diags = validate_model(spec)?;
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidModel(diags))
    }
}

/// Decay envelope |c_j| ≤ env(j) used to bound neglected tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// c_j = 0 for j > last.
    Finite { last: usize },
    /// |c_j| ≤ m j^k e^{-λ j}.
    Geometric { m: f64, lambda: f64, k: f64 },
    /// |c_j| ≤ m j^e.
    Power { m: f64, exponent: f64 },
}

impl Envelope {
    /// Upper bound for |c_j|.
    pub fn at(&self, j: f64) -> f64 {
        match *self {
            Envelope::Finite { last } => {
                if j > last as f64 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Envelope::Geometric { m, lambda, k } => m * j.max(1.0).powf(k) * (-lambda * j).exp(),
            Envelope::Power { m, exponent } => m * j.max(1.0).powf(exponent),
        }
    }

    /// Upper bound for Σ_{j>n} |c_j|^η.
    pub fn tail_sum(&self, n: usize, eta: f64) -> f64 {
        match *self {
            Envelope::Finite { last } => {
                if n >= last {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Envelope::Geometric { m, lambda, k } => {
                let term = |j: f64| (m * j.powf(k) * (-lambda * j).exp()).powf(eta);
                let mut sum = 0.0;
                let mut j = n as f64 + 1.0;
                for _ in 0..1_000_000 {
                    let r = ((j + 1.0) / j).powf(k * eta) * (-lambda * eta).exp();
                    if r < 0.99 {
                        return sum + term(j) / (1.0 - r);
                    }
                    sum += term(j);
                    j += 1.0;
                }
                f64::INFINITY
            }
            Envelope::Power { m, exponent } => {
                let e = exponent * eta;
                if e >= -1.0 {
                    return f64::INFINITY;
                }
                let start = (n as f64).max(1.0);
                m.powf(eta) * start.powf(e + 1.0) / (-e - 1.0)
            }
        }
    }
}

/// Computed coefficients c_0..c_N with a tail envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffStream {
    pub values: Vec<f64>,
    pub envelope: Envelope,
}

impl CoeffStream {
    /// Truncation index N (values holds c_0..c_N).
    pub fn n(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// Bound on Σ_{j>N} |c_j|^η.
    pub fn tail_bound(&self, eta: f64) -> f64 {
        self.envelope.tail_sum(self.n(), eta)
    }

    /// c_j, with zero beyond a finite MA order and NaN past N otherwise.
    pub fn get(&self, j: usize) -> f64 {
        match self.values.get(j) {
            Some(&v) => v,
            None => match self.envelope {
                Envelope::Finite { .. } => 0.0,
                _ => f64::NAN,
            },
        }
    }

    /// CSV with header `j,c_j`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,c_j\n");
        for (j, c) in self.values.iter().enumerate() {
            s.push_str(&format!("{j},{c:.16e}\n"));
        }
        s
    }
}

// Extra terms computed beyond N for envelope fitting.
const FIT_WINDOW: usize = 50;

fn arma_raw(spec: &ModelSpec, len: usize) -> Vec<f64> {
    let phi = &spec.phi;
    let theta = spec.ma_poly();
    let mut c = vec![0.0; len];
    for j in 0..len {
        let mut v = theta.get(j).copied().unwrap_or(0.0);
        for k in 1..=phi.len().min(j) {
            v += phi[k - 1] * c[j - k];
        }
        c[j] = v;
    }
    c
}

fn geometric_envelope(c: &[f64], n: usize, desc: &AsymDescriptor) -> Envelope {
    let k = desc.l1 as f64 - 1.0;
    let lo = n.saturating_sub(FIT_WINDOW - 1).max(1);
    let hi = (lo + FIT_WINDOW).min(c.len());
    let mut m: f64 = 0.0;
    for j in lo..hi {
        let jf = j as f64;
        m = m.max(c[j].abs() * (desc.lambda1 * jf).exp() / jf.powf(k));
    }
    Envelope::Geometric { m: 2.0 * m, lambda: desc.lambda1, k }
}

/// c_j for d = 0 by the linear recurrence, j = 0..=n.
pub fn arma_coeffs(spec: &ModelSpec, n: usize) -> Result<CoeffStream> {
    if spec.d != 0.0 {
        return Err(invalid("arma_coeffs requires d = 0"));
    }
    ensure_valid(spec)?;
    let desc = asym_descriptor(spec)?;
    let len = n + 1 + FIT_WINDOW;
    let mut c = arma_raw(spec, len);
    let envelope = if spec.p() == 0 {
        Envelope::Finite { last: spec.q() }
    } else {
        geometric_envelope(&c, n, &desc)
    };
    c.truncate(n + 1);
    Ok(CoeffStream { values: c, envelope })
}

/// b_j = b_{j-1} (j - 1 + d) / j, the coefficients of (1 - z)^{-d}.
pub fn binomial_weights(d: f64, n: usize) -> Result<Vec<f64>> {
    if !d.is_finite() || d >= 1.0 {
        return Err(invalid(format!("binomial weights need finite d < 1, got {d}")));
    }
    let mut b = Vec::with_capacity(n + 1);
    b.push(1.0);
    for j in 1..=n {
        let prev = b[j - 1];
        b.push(prev * (j as f64 - 1.0 + d) / j as f64);
    }
    Ok(b)
}

fn farima_raw(spec: &ModelSpec, len: usize) -> Result<Vec<f64>> {
    let b = binomial_weights(spec.d, len.saturating_sub(1))?;
    let theta = spec.ma_poly();
    let phi = &spec.phi;
    let mut c = vec![0.0; len];
    for j in 0..len {
        let mut v = 0.0;
        for (k, &t) in theta.iter().enumerate().take(j + 1) {
            v += t * b[j - k];
        }
        for k in 1..=phi.len().min(j) {
            v += phi[k - 1] * c[j - k];
        }
        c[j] = v;
    }
    Ok(c)
}

/// c_j for a FARIMA model: the ARMA filter applied to (1 - B)^{-d}.
pub fn farima_coeffs(spec: &ModelSpec, n: usize) -> Result<CoeffStream> {
    if spec.d == 0.0 {
        return Err(invalid("farima_coeffs requires d ≠ 0"));
    }
    ensure_valid(spec)?;
    let len = n + 1 + FIT_WINDOW;
    let mut c = farima_raw(spec, len)?;
    let e = spec.d - 1.0;
    let lo = n.saturating_sub(FIT_WINDOW - 1).max(1);
    let mut m: f64 = 0.0;
    for (j, cj) in c.iter().enumerate().take(lo + FIT_WINDOW).skip(lo) {
        m = m.max(cj.abs() / (j as f64).powf(e));
    }
    c.truncate(n + 1);
    Ok(CoeffStream { values: c, envelope: Envelope::Power { m: 1.1 * m, exponent: e } })
}

/// Dispatches on d.
pub fn coefficients(spec: &ModelSpec, n: usize) -> Result<CoeffStream> {
    if spec.is_farima() {
        farima_coeffs(spec, n)
    } else {
        arma_coeffs(spec, n)
    }
}

/// Asymptotic description of the coefficient decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymDescriptor {
    /// log-modulus of the dominant AR root; +∞ when p = 0.
    pub lambda1: f64,
    /// Argument of the dominant root in [0, π].
    pub rho1: f64,
    /// Multiplicity of the dominant root.
    pub l1: usize,
    /// Limit of c_j j^{-(l₁-1)} e^{λ₁ j} from the partial-fraction expansion
    /// (its modulus when ρ₁ ≠ 0).
    pub h: f64,
    /// The same constant estimated from the coefficients themselves.
    pub h_fit: f64,
    /// log-modulus of the next root cluster (+∞ if none).
    pub lambda2: f64,
    /// Θ(1) / (Φ(1) Γ(d)) for d ≠ 0.
    pub farima_const: Option<f64>,
}

impl AsymDescriptor {
    /// True when the dominant root is a single positive real cluster.
    pub fn real_dominant(&self) -> bool {
        self.rho1 == 0.0
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Dominant-root data for the AR part, plus the FARIMA constant.
pub fn asym_descriptor(spec: &ModelSpec) -> Result<AsymDescriptor> {
    let ar = spec.ar_poly();
    let ma = spec.ma_poly();
    let farima_const = if spec.is_farima() {
        let phi1: f64 = ar.iter().sum();
        let theta1: f64 = ma.iter().sum();
        Some(theta1 / phi1 * special::recip_gamma(spec.d))
    } else {
        None
    };
    if ar.len() == 1 {
        return Ok(AsymDescriptor {
            lambda1: f64::INFINITY,
            rho1: 0.0,
            l1: 1,
            h: 0.0,
            h_fit: 0.0,
            lambda2: f64::INFINITY,
            farima_const,
        });
    }
    let clusters = poly::cluster(&poly::roots(&ar), CLUSTER_TOL);
    let min_mod = clusters.iter().map(|c| c.root.norm()).fold(f64::INFINITY, f64::min);
    let dominant: Vec<&poly::RootCluster> = clusters
        .iter()
        .filter(|c| c.root.norm() <= min_mod * (1.0 + CLUSTER_TOL))
        .collect();
    // Prefer the positive real cluster, then the upper half-plane member.
    let dom = dominant
        .iter()
        .copied()
        .max_by(|a, b| {
            let ka = (a.root.im == 0.0 && a.root.re > 0.0, a.root.im >= 0.0);
            let kb = (b.root.im == 0.0 && b.root.re > 0.0, b.root.im >= 0.0);
            ka.cmp(&kb)
        })
        .expect("at least one root");
    let lambda1 = min_mod.ln();
    // A real dominant root tied with other roots of the same modulus does not
    // produce a limit; report the largest argument in that case.
    let tied = dominant.iter().any(|c| c.root.im.abs() > 0.0) && dom.root.im == 0.0;
    let rho1 = if tied {
        dominant.iter().map(|c| c.root.arg().abs()).fold(0.0, f64::max)
    } else {
        dom.root.arg().abs()
    };
    let l1 = dom.multiplicity;
    let lambda2 = clusters
        .iter()
        .map(|c| c.root.norm())
        .filter(|&m| m > min_mod * (1.0 + CLUSTER_TOL))
        .fold(f64::INFINITY, f64::min)
        .ln();

    // e_{1 l₁} = (-1)^m m! Θ(r) / Φ^{(m)}(r).
    let r = dom.root;
    let dm = poly::derivative(&ar, l1);
    let sign = if l1 % 2 == 0 { 1.0 } else { -1.0 };
    let e = poly::eval(&ma, r) * (sign * factorial(l1)) / poly::eval(&dm, r);
    let scale = (-lambda1 * l1 as f64).exp() / factorial(l1 - 1);
    let h = if rho1 == 0.0 { e.re * scale } else { e.norm() * scale };

    let h_fit = fit_h(spec, lambda1, l1, lambda2, rho1);
    Ok(AsymDescriptor { lambda1, rho1, l1, h, h_fit, lambda2, farima_const })
}

/// c_j e^{λ j} for j = 0..len, computed without under- or overflow.
pub fn scaled_arma_coeffs(spec: &ModelSpec, lambda: f64, len: usize) -> Vec<f64> {
    let r = lambda.exp();
    let theta = spec.ma_poly();
    let phi_s: Vec<f64> = spec.phi.iter().enumerate().map(|(k, &p)| p * r.powi(k as i32 + 1)).collect();
    let mut s = vec![0.0; len];
    for j in 0..len {
        let mut v = theta.get(j).map(|&t| t * r.powi(j as i32)).unwrap_or(0.0);
        for k in 1..=phi_s.len().min(j) {
            v += phi_s[k - 1] * s[j - k];
        }
        s[j] = v;
    }
    s
}

fn fit_h(spec: &ModelSpec, lambda1: f64, l1: usize, lambda2: f64, rho1: f64) -> f64 {
    let gap = lambda2 - lambda1;
    let j0 = if gap.is_finite() && gap > 0.0 {
        ((32.0 / gap).ceil() as usize).clamp(50, 200_000)
    } else {
        50
    };
    let j0 = j0.max(spec.q() + 1);
    let len = 2 * j0 + 1;
    let s = scaled_arma_coeffs(spec, lambda1, len);
    let k = l1 as f64 - 1.0;
    let t: Vec<f64> = (j0..len).map(|j| s[j] / (j as f64).powf(k)).collect();
    if rho1 != 0.0 {
        return t.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    // t_j is a polynomial of degree l₁ - 1 in 1/j up to subdominant terms.
    let deg = l1 - 1;
    let rows = t.len();
    let a = DMatrix::from_fn(rows, deg + 1, |i, c| (1.0 / (j0 + i) as f64).powi(c as i32));
    let b = DVector::from_column_slice(&t);
    match a.svd(true, true).solve(&b, 1e-14) {
        Ok(x) => x[0],
        Err(_) => t[rows - 1],
    }
}

/// Continuous extension of the FARIMA coefficients, c(x) = Σ_k a_k b(x - k)
/// with a_k the ARMA coefficients and b the continuous binomial weights.
/// Used to sum slowly decaying tails by integration.
#[derive(Debug, Clone)]
pub struct CoeffExtension {
    a: Vec<f64>,
    d: f64,
}

impl CoeffExtension {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let arma = ModelSpec { d: 0.0, ..spec.clone() };
        let desc = asym_descriptor(&arma)?;
        let k = if spec.p() == 0 {
            spec.q()
        } else {
            let extra = (46.0 / desc.lambda1).ceil() as usize * desc.l1;
            spec.q() + extra.max(16)
        };
        let mut a = arma_raw(&arma, k + 1);
        while a.len() > 1 && a[a.len() - 1] == 0.0 {
            a.pop();
        }
        Ok(CoeffExtension { a, d: spec.d })
    }

    /// Smallest x at which [`eval`](Self::eval) is accurate.
    pub fn start(&self) -> f64 {
        self.a.len() as f64 + 31.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        let g = special::recip_gamma(self.d);
        self.a
            .iter()
            .enumerate()
            .map(|(k, &ak)| ak * special::gamma_ratio(x - k as f64, self.d))
            .sum::<f64>()
            * g
    }
}

/// Θ(1)/(Φ(1) Γ(d)) times j^{d-1}: the leading FARIMA behaviour.
pub fn farima_leading(spec: &ModelSpec, j: f64) -> f64 {
    let phi1: f64 = spec.ar_poly().iter().sum();
    let theta1: f64 = spec.ma_poly().iter().sum();
    theta1 / phi1 * special::recip_gamma(spec.d) * j.powf(spec.d - 1.0)
}
