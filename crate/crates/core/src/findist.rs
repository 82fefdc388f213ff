//! Bivariate laws of (X₀, Xₙ): the discrete spectral measure for stable
//! innovations and the direction/radial Lévy decomposition for RAC
//! innovations.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{coefficients, ensure_valid, Envelope, ModelSpec};
use crate::error::{invalid, Error, Result};
use crate::innovations::{id_exponent_tol, IdSpec, RacSpec, RadialDensity, StableSpec};
use crate::levy::{LevyDensity, Side};
use crate::quad::{adaptive_log, Estimate};

/// Directions closer than this are merged.
pub const MERGE_TOL: f64 = 1e-10;

/// A point mass of the spectral measure on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub sx: f64,
    pub sy: f64,
    pub weight: f64,
}

/// Discrete spectral measure Γ and location μ of a bivariate stable law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralAtoms {
    pub alpha: f64,
    pub location: [f64; 2],
    pub atoms: Vec<Atom>,
    /// Upper bound on the total weight dropped by truncation.
    pub tail_mass: f64,
}

impl SpectralAtoms {
    /// Merges atoms whose directions lie within [`MERGE_TOL`] and drops
    /// zero weights. The result is sorted by angle.
    pub fn merged(&self) -> SpectralAtoms {
        let mut a: Vec<Atom> = self.atoms.iter().copied().filter(|x| x.weight > 0.0).collect();
        a.sort_by(|p, q| p.sy.atan2(p.sx).total_cmp(&q.sy.atan2(q.sx)));
        let mut out: Vec<Atom> = Vec::with_capacity(a.len());
        for x in a {
            match out.last_mut() {
                Some(l) if (l.sx - x.sx).hypot(l.sy - x.sy) <= MERGE_TOL => l.weight += x.weight,
                _ => out.push(x),
            }
        }
        // directions near angle π appear at both ends of the sorted list
        if out.len() > 1 {
            let (f, l) = (out[0], out[out.len() - 1]);
            if (f.sx - l.sx).hypot(f.sy - l.sy) <= MERGE_TOL {
                out[0].weight += l.weight;
                out.pop();
            }
        }
        SpectralAtoms { atoms: out, ..self.clone() }
    }

    /// CSV with header `sx,sy,weight`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("sx,sy,weight\n");
        for a in &self.atoms {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", a.sx, a.sy, a.weight));
        }
        s
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

// Default truncation: neglected Σ|c_j|^η below 1e-15 of the retained sum,
// or 10⁴ terms for long memory.
fn default_truncation(model: &ModelSpec, eta: f64) -> Result<usize> {
    if model.p() == 0 && !model.is_farima() {
        return Ok(model.q());
    }
    if model.is_farima() {
        return Ok(10_000);
    }
    let mut n = 64;
    loop {
        let st = coefficients(model, n)?;
        let head: f64 = st.values.iter().map(|c| c.abs().powf(eta)).sum();
        if st.tail_bound(eta) <= 1e-15 * head || n >= 10_000_000 {
            return Ok(n);
        }
        n *= 2;
    }
}

fn check_existence(model: &ModelSpec, index: f64) -> Result<()> {
    if model.is_farima() && index * (model.d - 1.0) >= -1.0 {
        return Err(Error::NoCausalSolution(format!(
            "FARIMA with d={} needs index·(d-1) < -1, got index {index}",
            model.d
        )));
    }
    Ok(())
}

fn tail_weight(env: &Envelope, n: usize, lag: usize, eta: f64) -> f64 {
    // (c_j² + c_{j+n}²)^{η/2} ≤ 2^{η/2} max(|c_j|, |c_{j+n}|)^η
    2f64.powf(eta / 2.0) * (env.tail_sum(n, eta) + env.tail_sum(n + lag, eta))
}

/// Spectral measure and location of (X₀, Xₙ) under S(α, β, μ) noise,
/// using c_0..c_{N+n}.
pub fn stable_spectral(model: &ModelSpec, s: &StableSpec, n: usize, truncation: Option<usize>) -> Result<SpectralAtoms> {
    s.validate()?;
    ensure_valid(model)?;
    check_existence(model, s.alpha)?;
    if s.alpha == 2.0 {
        return Err(invalid("the Gaussian case has no spectral atoms in this representation"));
    }
    let nn = match truncation {
        Some(v) => v,
        None => default_truncation(model, s.alpha)?,
    };
    let st = coefficients(model, nn + n)?;
    let c = &st.values;
    let (wp, wm) = ((1.0 + s.beta) / 2.0, (1.0 - s.beta) / 2.0);
    let mut atoms = Vec::with_capacity(2 * (nn + n + 1));
    let mut mu = [0.0; 2];
    let k = -2.0 * s.beta / PI;
    for j in 0..=nn {
        let (x, y) = (c[j], c[j + n]);
        let r = x.hypot(y);
        if r == 0.0 {
            continue;
        }
        let w = r.powf(s.alpha);
        atoms.push(Atom { sx: x / r, sy: y / r, weight: wp * w });
        atoms.push(Atom { sx: -x / r, sy: -y / r, weight: wm * w });
        if s.alpha == 1.0 {
            mu[0] += k * x * r.ln();
            mu[1] += k * y * r.ln();
        }
        mu[0] += s.mu * x;
        mu[1] += s.mu * y;
    }
    for &cj in c.iter().take(n) {
        if cj == 0.0 {
            continue;
        }
        let sg = cj.signum();
        let w = cj.abs().powf(s.alpha);
        atoms.push(Atom { sx: 0.0, sy: sg, weight: wp * w });
        atoms.push(Atom { sx: 0.0, sy: -sg, weight: wm * w });
        if s.alpha == 1.0 {
            mu[1] += k * cj * cj.abs().ln();
        }
        mu[1] += s.mu * cj;
    }
    let tail_mass = tail_weight(&st.envelope, nn, n, s.alpha);
    Ok(SpectralAtoms { alpha: s.alpha, location: mu, atoms, tail_mass }.merged())
}

/// Joint log-characteristic function at z from the spectral representation.
pub fn joint_cf_from_spectral(a: &SpectralAtoms, z: [f64; 2]) -> Complex64 {
    let al = a.alpha;
    let tan = if al == 2.0 { 0.0 } else { (PI * al / 2.0).tan() };
    let mut acc = Complex64::new(0.0, z[0] * a.location[0] + z[1] * a.location[1]);
    for x in &a.atoms {
        let p = z[0] * x.sx + z[1] * x.sy;
        if p == 0.0 {
            continue;
        }
        let m = p.abs();
        let sg = p.signum();
        acc -= if al == 1.0 {
            x.weight * m * Complex64::new(1.0, 2.0 / PI * sg * m.ln())
        } else {
            x.weight * m.powf(al) * Complex64::new(1.0, -sg * tan)
        };
    }
    acc
}

/// One direction of the RAC joint Lévy measure: mass λ(side)R^η at
/// ξ = side·v/R with radial density g(side, r/R)/R^{η+1}, where v is the
/// coefficient vector of the innovation in (X₀, Xₙ) and R = |v|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RacAtom {
    pub direction: (f64, f64),
    pub side: Side,
    pub lambda_weight: f64,
    pub scale: f64,
}

/// Lévy measure and drift of (X₀, Xₙ) under RAC noise, in the
/// truncation convention 1_{|x|≤1} of the innovation.
#[derive(Debug, Clone)]
pub struct RacJointMeasure {
    pub atoms: Vec<RacAtom>,
    pub radial: Arc<dyn RadialDensity>,
    pub eta: f64,
    pub gamma2: [f64; 2],
    lambda: [f64; 2],
}

impl RacJointMeasure {
    /// Radial density of atom k at r.
    pub fn radial_density(&self, k: usize, r: f64) -> f64 {
        let a = &self.atoms[k];
        self.radial.g(a.side, r / a.scale) / a.scale.powf(self.eta + 1.0)
    }

    /// ∫ min(1, r²) ν(dr) summed over atoms.
    pub fn total_mass(&self) -> Result<f64> {
        let mut t = 0.0;
        for (k, a) in self.atoms.iter().enumerate() {
            let f = |r: f64| Complex64::new(r.min(1.0).powi(2) * self.radial_density(k, r), 0.0);
            let inner = crate::quad::decades(&f, 1.0, crate::quad::Sweep::Down, 1e-14, 400)?;
            let outer = crate::quad::decades(&f, 1.0, crate::quad::Sweep::Up, 1e-14, 400)?;
            t += a.lambda_weight * (inner.value.re + outer.value.re);
        }
        Ok(t)
    }

    fn atom_density(&self, a: &RacAtom) -> AtomDensity {
        let side_lambda = match a.side {
            Side::Pos => self.lambda[0],
            Side::Neg => self.lambda[1],
        };
        AtomDensity { radial: self.radial.clone(), side: a.side, scale: a.scale, lambda: side_lambda }
    }

    /// Joint log-characteristic function at z.
    pub fn exponent(&self, z: [f64; 2]) -> Result<Estimate> {
        let mut acc = Estimate::new(Complex64::new(0.0, z[0] * self.gamma2[0] + z[1] * self.gamma2[1]), 0.0);
        for a in &self.atoms {
            let w = z[0] * a.direction.0 + z[1] * a.direction.1;
            if w == 0.0 {
                continue;
            }
            let spec = IdSpec { gamma: 0.0, density: Arc::new(self.atom_density(a)), eta: self.eta, tail_cut: 1e4 };
            acc += id_exponent_tol(&spec, w, 1e-13)?;
        }
        Ok(acc)
    }
}

// λ(side)R^η · g(side, x/R)/R^{η+1} on x > 0.
#[derive(Debug, Clone)]
struct AtomDensity {
    radial: Arc<dyn RadialDensity>,
    side: Side,
    scale: f64,
    lambda: f64,
}

impl LevyDensity for AtomDensity {
    fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.lambda * self.radial.g(self.side, x / self.scale) / self.scale
        }
    }

    fn continued(&self, side: Side, r: Complex64) -> Option<Complex64> {
        match side {
            Side::Neg => Some(Complex64::new(0.0, 0.0)),
            Side::Pos => self.radial.g_continued(self.side, r / self.scale).map(|v| v * self.lambda / self.scale),
        }
    }

    fn default_tail_cut(&self) -> f64 {
        self.scale * self.radial.tail_cut()
    }
}

/// Joint Lévy measure of (X₀, Xₙ) under RAC noise, using c_0..c_{N+n}.
pub fn rac_joint(model: &ModelSpec, s: &RacSpec, n: usize, truncation: Option<usize>) -> Result<RacJointMeasure> {
    ensure_valid(model)?;
    check_existence(model, s.eta)?;
    if s.lambda_plus < 0.0 || s.lambda_minus < 0.0 {
        return Err(invalid("directional weights must be nonnegative"));
    }
    let nn = match truncation {
        Some(v) => v,
        None => default_truncation(model, s.eta)?,
    };
    let c = coefficients(model, nn + n)?.values;
    let mut vecs: Vec<(f64, f64)> = (0..=nn).map(|j| (c[j], c[j + n])).collect();
    vecs.extend(c.iter().take(n).map(|&cj| (0.0, cj)));
    let mut atoms = Vec::new();
    let mut gamma2 = [0.0; 2];
    for (x, y) in vecs {
        let r = x.hypot(y);
        if r == 0.0 {
            continue;
        }
        for side in [Side::Pos, Side::Neg] {
            let lam = s.lambda(side);
            if lam == 0.0 {
                continue;
            }
            let sg = side.sign();
            let dir = (sg * x / r, sg * y / r);
            atoms.push(RacAtom { direction: dir, side, lambda_weight: lam * r.powf(s.eta), scale: r });
            // Compensator shift between 1_{|x|≤1} for the innovation and
            // 1_{r≤1} for the joint law: λ R ∫_1^{1/R} u g(u) du along ξ.
            if r != 1.0 {
                let (lo, hi) = if r < 1.0 { (1.0, 1.0 / r) } else { (1.0 / r, 1.0) };
                let g = |u: f64| Complex64::new(u * s.radial.g(side, u), 0.0);
                let e = adaptive_log(&g, lo, hi, 1e-15, 1e-13);
                if e.err > 1e-9 * e.value.norm().max(1e-300) && e.err > 1e-14 {
                    return Err(Error::Quadrature { partial_re: e.value.re, partial_im: 0.0, residual: e.err });
                }
                let sign = if r < 1.0 { 1.0 } else { -1.0 };
                let v = lam * r * sign * e.value.re;
                gamma2[0] += v * dir.0;
                gamma2[1] += v * dir.1;
            }
        }
    }
    Ok(RacJointMeasure { atoms, radial: s.radial.clone(), eta: s.eta, gamma2, lambda: [s.lambda_plus, s.lambda_minus] })
}
