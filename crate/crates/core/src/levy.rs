//! Lévy densities and integrals of the form ∫ K(x) ν(dx).
//!
//! The real line is split per side into an inner region swept by decades
//! toward 0, a middle region of at most one radian of oscillation, and an
//! outer region. Oscillatory outer pieces are integrated along a vertical
//! contour when the density has an analytic continuation; otherwise the
//! integral stops at a cut and the remainder is bounded.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{adaptive, adaptive_log, decades, Estimate, Sweep};

const I: Complex64 = Complex64::new(0.0, 1.0);
const MAX_DECADES: usize = 400;

/// Which half-line a jump lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Pos,
    Neg,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Pos => 1.0,
            Side::Neg => -1.0,
        }
    }
}

/// Density of a Lévy measure on ℝ \ {0}.
pub trait LevyDensity: Send + Sync + Debug {
    fn density(&self, x: f64) -> f64;

    /// Analytic continuation of r ↦ density(side · r) to Re r > 0.
    fn continued(&self, _side: Side, _r: Complex64) -> Option<Complex64> {
        None
    }

    /// Cut beyond which the outer integral is bounded instead of computed,
    /// for densities without a continuation.
    fn default_tail_cut(&self) -> f64 {
        1e4
    }

    /// Short textual description, used in serialized specs.
    fn describe(&self) -> String {
        "custom".into()
    }

    /// Closed form of ∫_{|x|>1} |x|^η ν(dx), when known.
    fn outer_moment_exact(&self, _eta: f64) -> Option<f64> {
        None
    }

    /// Closed form of ∫_{|x|≤1} x² ν(dx), when known.
    fn inner_second_moment_exact(&self) -> Option<f64> {
        None
    }
}

/// ν(dx) = c₊ x^{-1-α} dx on x > 0 and c₋ |x|^{-1-α} dx on x < 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableLike {
    pub alpha: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl LevyDensity for StableLike {
    fn density(&self, x: f64) -> f64 {
        let c = if x > 0.0 { self.c_plus } else { self.c_minus };
        c * x.abs().powf(-1.0 - self.alpha)
    }

    fn continued(&self, side: Side, r: Complex64) -> Option<Complex64> {
        let c = if side == Side::Pos { self.c_plus } else { self.c_minus };
        Some(r.powf(-1.0 - self.alpha) * c)
    }

    fn describe(&self) -> String {
        format!("stable_like({},{},{})", self.alpha, self.c_plus, self.c_minus)
    }

    fn outer_moment_exact(&self, eta: f64) -> Option<f64> {
        let c = self.c_plus + self.c_minus;
        Some(if eta < self.alpha { c / (self.alpha - eta) } else { f64::INFINITY })
    }

    fn inner_second_moment_exact(&self) -> Option<f64> {
        Some((self.c_plus + self.c_minus) / (2.0 - self.alpha))
    }
}

/// Symmetric tempered density e^{-λ|x|} |x|^{-1-α}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tempered {
    pub alpha: f64,
    pub lambda: f64,
}

impl LevyDensity for Tempered {
    fn density(&self, x: f64) -> f64 {
        let a = x.abs();
        (-self.lambda * a).exp() * a.powf(-1.0 - self.alpha)
    }

    // The continuation oscillates along vertical rays, so the outer part
    // is integrated on the real line up to where e^{-λx} is negligible.
    fn default_tail_cut(&self) -> f64 {
        (45.0 / self.lambda).max(1.0)
    }

    fn describe(&self) -> String {
        format!("tempered({},{})", self.alpha, self.lambda)
    }
}

/// A finite Gaussian-shaped bump of total mass `mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussBump {
    pub center: f64,
    pub width: f64,
    pub mass: f64,
}

impl LevyDensity for GaussBump {
    fn density(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        self.mass * (-0.5 * u * u).exp() / (self.width * (2.0 * PI).sqrt())
    }

    fn default_tail_cut(&self) -> f64 {
        self.center.abs() + 40.0 * self.width
    }

    fn describe(&self) -> String {
        format!("gauss_bump({},{},{})", self.center, self.width, self.mass)
    }
}

/// Wraps an arbitrary closure. No continuation is available, so outer
/// integrals are truncated at the tail cut.
#[derive(Clone)]
pub struct FnDensity {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub tail_cut: f64,
}

impl Debug for FnDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FnDensity(tail_cut={})", self.tail_cut)
    }
}

impl LevyDensity for FnDensity {
    fn density(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn default_tail_cut(&self) -> f64 {
        self.tail_cut
    }
}

/// Parses `stable_like(a,c+,c-)`, `tempered(a,l)` or `gauss_bump(c,w,m)`.
pub fn parse_density(s: &str) -> Result<Arc<dyn LevyDensity>> {
    let s = s.trim();
    let open = s.find('(').ok_or_else(|| Error::InvalidArgument(format!("bad density '{s}'")))?;
    if !s.ends_with(')') {
        return Err(Error::InvalidArgument(format!("bad density '{s}'")));
    }
    let name = s[..open].trim();
    let args: Vec<f64> = s[open + 1..s.len() - 1]
        .split(',')
        .map(|a| a.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidArgument(format!("bad density argument in '{s}': {e}")))?;
    let need = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{name} takes {n} arguments")))
        }
    };
    match name {
        "stable_like" => {
            need(3)?;
            if !(args[0] > 0.0 && args[0] < 2.0) || args[1] < 0.0 || args[2] < 0.0 {
                return Err(Error::InvalidArgument("stable_like needs 0<α<2 and c± ≥ 0".into()));
            }
            Ok(Arc::new(StableLike { alpha: args[0], c_plus: args[1], c_minus: args[2] }))
        }
        "tempered" => {
            need(2)?;
            if !(args[0] > 0.0 && args[0] < 2.0) || args[1] <= 0.0 {
                return Err(Error::InvalidArgument("tempered needs 0<α<2 and λ>0".into()));
            }
            Ok(Arc::new(Tempered { alpha: args[0], lambda: args[1] }))
        }
        "gauss_bump" => {
            need(3)?;
            if args[1] <= 0.0 || args[2] < 0.0 {
                return Err(Error::InvalidArgument("gauss_bump needs width>0 and mass≥0".into()));
            }
            Ok(Arc::new(GaussBump { center: args[0], width: args[1], mass: args[2] }))
        }
        _ => Err(Error::InvalidArgument(format!("unknown density '{name}'"))),
    }
}

/// e^{iy} - 1 without cancellation for small y.
pub fn expm1_i(y: f64) -> Complex64 {
    let s = (0.5 * y).sin();
    Complex64::new(-2.0 * s * s, y.sin())
}

/// e^z - 1 for complex z, accurate near 0.
pub fn cexpm1(z: Complex64) -> Complex64 {
    let s = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * z.im.cos() - 2.0 * s * s, z.re.exp() * z.im.sin())
}

/// e^{iy} - 1 - iy without cancellation for small y.
pub fn expm1_i_lin(y: f64) -> Complex64 {
    let s = (0.5 * y).sin();
    let im = if y.abs() < 0.1 {
        let y2 = y * y;
        -y * y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0 * (1.0 - y2 / 72.0)))
    } else {
        y.sin() - y
    };
    Complex64::new(-2.0 * s * s, im)
}

/// Integrand K with a closed form for |x| ≥ max(1, 1/max|ω_m|):
/// K(x) = x^power Σ w_m (e^{i ω_m x} - 1).
pub struct Kernel<'a> {
    pub eval: &'a (dyn Fn(f64) -> Complex64 + Sync),
    pub terms: Vec<(Complex64, f64)>,
    pub power: i32,
}

impl Kernel<'_> {
    fn omega_max(&self) -> f64 {
        self.terms.iter().map(|t| t.1.abs()).fold(0.0, f64::max)
    }
}

/// ∫ K(x) ν(dx) over ℝ \ {0}.
pub fn integrate(nu: &dyn LevyDensity, k: &Kernel, abs_tol: f64) -> Result<Estimate> {
    let pos = half_line(nu, k, Side::Pos, 0.5 * abs_tol)?;
    let neg = half_line(nu, k, Side::Neg, 0.5 * abs_tol)?;
    Ok(pos + neg)
}

fn half_line(nu: &dyn LevyDensity, k: &Kernel, side: Side, tol: f64) -> Result<Estimate> {
    let s = side.sign();
    let w_max = k.omega_max();
    let f = |y: f64| {
        let d = nu.density(s * y);
        if d == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            (k.eval)(s * y) * d
        }
    };
    let (y_in, x_out) = if w_max > 0.0 { ((1.0 / w_max).min(1.0), (1.0 / w_max).max(1.0)) } else { (1.0, 1.0) };
    let tol = tol / 4.0;
    let mut total = decades(&f, y_in, Sweep::Down, tol, MAX_DECADES)?;
    if x_out > y_in {
        total += adaptive_log(&f, y_in, x_out, tol * 1e-2, 1e-13);
    }
    let sign_p = if k.power % 2 == 0 { 1.0 } else { s };
    let terms: Vec<(Complex64, f64)> = k.terms.iter().map(|&(w, om)| (w * sign_p, om * s)).collect();
    let has_cont = nu.continued(side, Complex64::new(x_out, 0.0)).is_some();
    if has_cont {
        for (w, om) in terms {
            if w == Complex64::new(0.0, 0.0) || om == 0.0 {
                continue;
            }
            let e = outer_term(nu, side, k.power, om, x_out, tol / (k.terms.len() as f64))?;
            total += e * w;
        }
    } else {
        let cut = nu.default_tail_cut().max(x_out);
        if cut > x_out {
            total += adaptive(&|s_: f64| {
                let y = s_.exp();
                f(y) * y
            }, x_out.ln(), cut.ln(), tol * 1e-2, 1e-13, 4000);
        }
        let mass = decades(
            &|y: f64| Complex64::new(y.powi(k.power) * nu.density(s * y), 0.0),
            cut,
            Sweep::Up,
            tol,
            MAX_DECADES,
        )?;
        let wsum: f64 = 2.0 * terms.iter().map(|t| t.0.norm()).sum::<f64>();
        total.err += wsum * (mass.value.re.abs() + mass.err);
    }
    Ok(total)
}

// ∫_X^∞ y^p (e^{iωy} - 1) ν(side·y) dy.
fn outer_term(nu: &dyn LevyDensity, side: Side, p: i32, om: f64, x: f64, tol: f64) -> Result<Estimate> {
    // y = X + iσt with σ = sgn ω, where e^{iωy} = e^{iωX} e^{-|ω|t}.
    let sigma = om.signum();
    let g = |t: f64| {
        let y = Complex64::new(x, sigma * t);
        let d = nu.continued(side, y).unwrap_or_default();
        y.powi(p) * d * cexpm1(I * om * y)
    };
    let first = adaptive(&g, 0.0, x, tol * 1e-2, 1e-13, 400);
    let rest = decades(&g, x, Sweep::Up, tol, MAX_DECADES)?;
    Ok((first + rest) * (I * sigma))
}

/// ∫_{|x|≤1} x² ν(dx).
pub fn second_moment_inner(nu: &dyn LevyDensity) -> Result<f64> {
    if let Some(m) = nu.inner_second_moment_exact() {
        return Ok(m);
    }
    let mut t = 0.0;
    for s in [1.0, -1.0] {
        let g = |y: f64| Complex64::new(y * y * nu.density(s * y), 0.0);
        t += decades(&g, 1.0, Sweep::Down, 1e-14, MAX_DECADES)?.value.re;
    }
    Ok(t)
}

/// ∫_{|x|>1} |x|^η ν(dx); +∞ when the integral diverges.
pub fn moment_outer(nu: &dyn LevyDensity, eta: f64) -> Result<f64> {
    if let Some(m) = nu.outer_moment_exact(eta) {
        return Ok(m);
    }
    let mut t = 0.0;
    for s in [1.0, -1.0] {
        let g = |y: f64| Complex64::new(y.powf(eta) * nu.density(s * y), 0.0);
        match decades(&g, 1.0, Sweep::Up, 1e-14, MAX_DECADES) {
            Ok(e) => t += e.value.re,
            Err(Error::Divergent(_)) => return Ok(f64::INFINITY),
            Err(Error::Quadrature { .. }) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    Ok(t)
}

/// ∫_{|x|>1} x ν(dx), the drift shift between the truncated and the fully
/// compensated forms.
pub fn mean_outer(nu: &dyn LevyDensity) -> Result<f64> {
    let mut t = 0.0;
    for s in [1.0, -1.0] {
        let g = |y: f64| Complex64::new(y * nu.density(s * y), 0.0);
        t += s * decades(&g, 1.0, Sweep::Up, 1e-14, MAX_DECADES)?.value.re;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_forms_are_accurate() {
        for &y in &[1e-12f64, 1e-6, 0.05, 0.3, 2.0] {
            let direct = Complex64::new(y.cos() - 1.0, y.sin());
            assert!((expm1_i(y) - direct).norm() <= 1e-15 + 1e-12 * direct.norm());
            let lin = expm1_i_lin(y);
            if y > 0.01 {
                assert!((lin - (direct - I * y)).norm() < 1e-14);
            } else {
                assert!((lin.im + y * y * y / 6.0).abs() <= 1e-3 * y * y * y);
            }
        }
    }

    #[test]
    fn parse_builtins() {
        assert!(parse_density("stable_like(0.7, 1, 0.5)").is_ok());
        assert!(parse_density("tempered(1.5,2)").is_ok());
        assert!(parse_density("gauss_bump(0,1,2)").is_ok());
        assert!(parse_density("stable_like(2.5,1,1)").is_err());
        assert!(parse_density("nope(1)").is_err());
    }

    #[test]
    fn stable_like_moments() {
        let nu = StableLike { alpha: 0.7, c_plus: 1.0, c_minus: 0.5 };
        let f = FnDensity { f: Arc::new(move |x| nu.density(x)), tail_cut: 1e4 };
        let m2 = second_moment_inner(&f).unwrap();
        assert!((m2 - 1.5 / 1.3).abs() < 1e-12, "{m2}");
        assert_eq!(second_moment_inner(&nu).unwrap(), 1.5 / 1.3);
        let m = moment_outer(&f, 0.5).unwrap();
        assert!((m - 1.5 / 0.2).abs() < 1e-9, "{m}");
        assert!(moment_outer(&f, 0.7).unwrap().is_infinite());
        assert!(moment_outer(&nu, 0.7).unwrap().is_infinite());
    }
}
