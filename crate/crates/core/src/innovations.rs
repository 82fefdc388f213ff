//! Innovation laws: strictly stable S(α, β, μ), general infinitely divisible
//! laws given by a Lévy density, and radially absolutely continuous (RAC)
//! Lévy measures.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::levy::{self, expm1_i_lin, Kernel, LevyDensity, Side, StableLike};
use crate::quad::Estimate;
use crate::special::{gamma, EULER_GAMMA};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// |x|^a sgn(x).
pub fn signed_pow(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(a).copysign(x)
    }
}

/// Stable law with log-characteristic function ψ(z) as in [`stable_exponent`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableSpec {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub mu: f64,
}

impl StableSpec {
    pub fn new(alpha: f64, beta: f64, mu: f64) -> Result<Self> {
        let s = StableSpec { alpha, beta, mu };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(invalid(format!("stable index α={} outside (0, 2]", self.alpha)));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(invalid(format!("skewness β={} outside [-1, 1]", self.beta)));
        }
        if !self.mu.is_finite() {
            return Err(invalid("location μ must be finite"));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.beta == 0.0
    }

    /// tan(πα/2), taken as 0 at α = 2.
    pub fn tan(&self) -> f64 {
        if self.alpha == 2.0 {
            0.0
        } else {
            (FRAC_PI_2 * self.alpha).tan()
        }
    }
}

/// ψ(z) = -|z|^α (1 - iβ sgn(z) tan(πα/2)) + iμz for α ≠ 1 and
/// ψ(z) = -|z| (1 + iβ (2/π) sgn(z) log|z|) + iμz for α = 1.
pub fn stable_exponent(s: &StableSpec, z: f64) -> Complex64 {
    if z == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let a = z.abs();
    let sg = z.signum();
    let base = if s.alpha == 1.0 {
        -Complex64::new(a, s.beta * 2.0 / PI * sg * a * a.ln())
    } else {
        let p = a.powf(s.alpha);
        -Complex64::new(p, -s.beta * sg * s.tan() * p)
    };
    base + I * (s.mu * z)
}

/// Infinitely divisible law with exponent
/// iγz + ∫ (e^{izx} - 1 - izx 1_{|x|≤1}) ν(dx).
#[derive(Debug, Clone)]
pub struct IdSpec {
    pub gamma: f64,
    pub density: Arc<dyn LevyDensity>,
    /// Largest moment index with E|ε|^η < ∞ assumed by the caller.
    pub eta: f64,
    pub tail_cut: f64,
}

impl IdSpec {
    pub fn new(gamma: f64, density: Arc<dyn LevyDensity>, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 2.0) {
            return Err(invalid(format!("moment index η={eta} outside (0, 2]")));
        }
        let tail_cut = density.default_tail_cut();
        Ok(IdSpec { gamma, density, eta, tail_cut })
    }

    /// ∫_{|x|≤1} x² ν(dx).
    pub fn inner_second_moment(&self) -> Result<f64> {
        levy::second_moment_inner(self.density.as_ref())
    }

    /// ∫_{|x|>1} |x|^η ν(dx).
    pub fn outer_moment(&self) -> Result<f64> {
        levy::moment_outer(self.density.as_ref(), self.eta)
    }

    /// Same law with γ chosen so that E ε = 0 (needs η > 1).
    pub fn centered(&self) -> Result<IdSpec> {
        if self.eta <= 1.0 {
            return Err(invalid("centering needs a finite mean (η > 1)"));
        }
        let m = levy::mean_outer(self.density.as_ref())?;
        Ok(IdSpec { gamma: -m, ..self.clone() })
    }
}

/// The ID exponent at z with an absolute error estimate.
pub fn id_exponent(s: &IdSpec, z: f64) -> Result<Estimate> {
    id_exponent_tol(s, z, 1e-11)
}

pub fn id_exponent_tol(s: &IdSpec, z: f64, tol: f64) -> Result<Estimate> {
    if z == 0.0 {
        return Ok(Estimate::ZERO);
    }
    let eval = move |x: f64| {
        if x.abs() <= 1.0 {
            expm1_i_lin(z * x)
        } else {
            levy::expm1_i(z * x)
        }
    };
    let k = Kernel {
        eval: &eval,
        terms: vec![(Complex64::new(1.0, 0.0), z)],
        power: 0,
    };
    let mut e = levy::integrate(s.density.as_ref(), &k, tol)?;
    e.value += I * (s.gamma * z);
    if e.err > 1e-9_f64.max(tol) {
        return Err(Error::Quadrature { partial_re: e.value.re, partial_im: e.value.im, residual: e.err });
    }
    Ok(e)
}

/// Lévy density constants c± of a stable law.
pub fn stable_levy_constants(s: &StableSpec) -> Result<(f64, f64)> {
    s.validate()?;
    if s.alpha == 2.0 {
        return Err(invalid("the Gaussian case has no Lévy measure"));
    }
    let total = if s.alpha == 1.0 {
        2.0 / PI
    } else {
        -1.0 / (gamma(-s.alpha) * (FRAC_PI_2 * s.alpha).cos())
    };
    Ok((0.5 * total * (1.0 + s.beta), 0.5 * total * (1.0 - s.beta)))
}

/// ID representation of a stable law. The returned IdSpec has γ = 0 and the
/// returned δ satisfies stable_exponent(z) = id_exponent(z) + iδz.
pub fn stable_to_id(s: &StableSpec) -> Result<(IdSpec, f64)> {
    let (cp, cm) = stable_levy_constants(s)?;
    let delta = if s.alpha == 1.0 {
        s.mu - 2.0 / PI * s.beta * (1.0 - EULER_GAMMA)
    } else {
        s.mu + (cp - cm) / (1.0 - s.alpha)
    };
    let density = Arc::new(StableLike { alpha: s.alpha, c_plus: cp, c_minus: cm });
    // Moments of order below α exist; α itself is excluded.
    let eta = 0.9 * s.alpha;
    Ok((IdSpec { gamma: 0.0, density, eta, tail_cut: 1e4 }, delta))
}

/// Chambers–Mallows–Stuck draw from S(α, β, μ) in the parameterization of
/// [`stable_exponent`].
pub fn sample_stable<R: RngCore + ?Sized>(s: &StableSpec, rng: &mut R) -> f64 {
    let v = PI * (uniform_open(rng) - 0.5);
    let w = -uniform_open(rng).ln();
    let a = s.alpha;
    let x = if a == 1.0 {
        let t = FRAC_PI_2 + s.beta * v;
        2.0 / PI * (t * v.tan() - s.beta * ((FRAC_PI_2 * w * v.cos()) / t).ln())
    } else {
        let zeta = s.beta * s.tan();
        let b = zeta.atan() / a;
        let scale = (1.0 + zeta * zeta).powf(0.5 / a);
        scale * (a * (v + b)).sin() / v.cos().powf(1.0 / a)
            * ((v - a * (v + b)).cos() / w).powf((1.0 - a) / a)
    };
    x + s.mu
}

/// `n` i.i.d. draws from one seeded stream.
pub fn sample_stable_n(s: &StableSpec, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sample_stable(s, &mut rng)).collect()
}

/// Uniform draw from the open interval (0, 1).
pub fn uniform_open<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Radial profile g(ξ, r) of a RAC Lévy measure.
pub trait RadialDensity: Send + Sync + fmt::Debug {
    fn g(&self, side: Side, r: f64) -> f64;

    /// Analytic continuation in r, if any.
    fn g_continued(&self, _side: Side, _r: Complex64) -> Option<Complex64> {
        None
    }

    /// Radius beyond which the mass is bounded instead of integrated, when
    /// there is no continuation.
    fn tail_cut(&self) -> f64 {
        1e4
    }
}

/// g(ξ, r) = r^{-1-α}, so that the RAC measure is stable-like.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRadial {
    pub alpha: f64,
}

impl RadialDensity for PowerRadial {
    fn g(&self, _side: Side, r: f64) -> f64 {
        r.powf(-1.0 - self.alpha)
    }

    fn g_continued(&self, _side: Side, r: Complex64) -> Option<Complex64> {
        Some(r.powf(-1.0 - self.alpha))
    }
}

/// g(ξ, r) = e^{-λr} r^{-1-α}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperedRadial {
    pub alpha: f64,
    pub lambda: f64,
}

impl RadialDensity for TemperedRadial {
    fn g(&self, _side: Side, r: f64) -> f64 {
        (-self.lambda * r).exp() * r.powf(-1.0 - self.alpha)
    }

    fn tail_cut(&self) -> f64 {
        (45.0 / self.lambda).max(1.0)
    }
}

/// ν(B) = Σ_{ξ=±1} λ(ξ) ∫_0^∞ 1_B(ξ r) g(ξ, r) dr.
#[derive(Debug, Clone)]
pub struct RacSpec {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub radial: Arc<dyn RadialDensity>,
    pub eta: f64,
}

impl RacSpec {
    pub fn lambda(&self, side: Side) -> f64 {
        match side {
            Side::Pos => self.lambda_plus,
            Side::Neg => self.lambda_minus,
        }
    }

    /// The same measure as a one-dimensional Lévy density with γ = 0.
    pub fn to_id(&self) -> Result<IdSpec> {
        IdSpec::new(0.0, Arc::new(RacDensity(self.clone())), self.eta)
    }
}

#[derive(Debug, Clone)]
struct RacDensity(RacSpec);

impl LevyDensity for RacDensity {
    fn density(&self, x: f64) -> f64 {
        let side = if x > 0.0 { Side::Pos } else { Side::Neg };
        self.0.lambda(side) * self.0.radial.g(side, x.abs())
    }

    fn continued(&self, side: Side, r: Complex64) -> Option<Complex64> {
        self.0.radial.g_continued(side, r).map(|v| v * self.0.lambda(side))
    }

    fn default_tail_cut(&self) -> f64 {
        self.0.radial.tail_cut()
    }
}

/// Either innovation family.
#[derive(Debug, Clone)]
pub enum InnovationSpec {
    Stable(StableSpec),
    Id(IdSpec),
}

impl InnovationSpec {
    /// The exponent driving summability conditions: α or η.
    pub fn index(&self) -> f64 {
        match self {
            InnovationSpec::Stable(s) => s.alpha,
            InnovationSpec::Id(s) => s.eta,
        }
    }

    pub fn exponent(&self, z: f64) -> Result<Estimate> {
        match self {
            InnovationSpec::Stable(s) => Ok(Estimate::new(stable_exponent(s, z), 0.0)),
            InnovationSpec::Id(s) => id_exponent(s, z),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum InnovationJson {
    Stable {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        mu: f64,
    },
    Id {
        eta: f64,
        #[serde(default)]
        gamma: f64,
        density: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_cut: Option<f64>,
    },
}

impl Serialize for InnovationSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match self {
            InnovationSpec::Stable(s) => InnovationJson::Stable { alpha: s.alpha, beta: s.beta, mu: s.mu },
            InnovationSpec::Id(s) => InnovationJson::Id {
                eta: s.eta,
                gamma: s.gamma,
                density: s.density.describe(),
                tail_cut: (s.tail_cut != s.density.default_tail_cut()).then_some(s.tail_cut),
            },
        };
        j.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for InnovationSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match InnovationJson::deserialize(de)? {
            InnovationJson::Stable { alpha, beta, mu } => {
                StableSpec::new(alpha, beta, mu).map(InnovationSpec::Stable).map_err(D::Error::custom)
            }
            InnovationJson::Id { eta, gamma, density, tail_cut } => {
                let d = levy::parse_density(&density).map_err(D::Error::custom)?;
                let mut s = IdSpec::new(gamma, d, eta).map_err(D::Error::custom)?;
                if let Some(t) = tail_cut {
                    s.tail_cut = t;
                }
                Ok(InnovationSpec::Id(s))
            }
        }
    }
}
