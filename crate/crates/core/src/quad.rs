//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands, plus
//! log-scale decade sweeps for integrals with power-law endpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::LN_10;
use std::ops::{Add, AddAssign, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// An integral value together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub err: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: Complex64::new(0.0, 0.0), err: 0.0 };

    pub fn new(value: Complex64, err: f64) -> Self {
        Estimate { value, err }
    }
}

impl Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate::new(self.value + o.value, self.err + o.err)
    }
}

impl AddAssign for Estimate {
    fn add_assign(&mut self, o: Estimate) {
        self.value += o.value;
        self.err += o.err;
    }
}

impl Mul<Complex64> for Estimate {
    type Output = Estimate;
    fn mul(self, w: Complex64) -> Estimate {
        Estimate::new(self.value * w, self.err * w.norm())
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_957_475,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

fn qk_err(diff: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = diff;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// One 21-point Kronrod rule on [a, b].
pub fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); 21];
    for i in 0..10 {
        fv[2 * i] = f(c - h * XGK[i]);
        fv[2 * i + 1] = f(c + h * XGK[i]);
    }
    fv[20] = f(c);
    let mut rk = fv[20] * WGK[10];
    let mut rg = Complex64::new(0.0, 0.0);
    let mut abs_re = fv[20].re.abs() * WGK[10];
    let mut abs_im = fv[20].im.abs() * WGK[10];
    for i in 0..10 {
        let s = fv[2 * i] + fv[2 * i + 1];
        rk += s * WGK[i];
        if i % 2 == 1 {
            rg += s * WG[i / 2];
        }
        abs_re += WGK[i] * (fv[2 * i].re.abs() + fv[2 * i + 1].re.abs());
        abs_im += WGK[i] * (fv[2 * i].im.abs() + fv[2 * i + 1].im.abs());
    }
    let mean = rk * 0.5;
    let mut asc_re = WGK[10] * (fv[20].re - mean.re).abs();
    let mut asc_im = WGK[10] * (fv[20].im - mean.im).abs();
    for i in 0..10 {
        asc_re += WGK[i] * ((fv[2 * i].re - mean.re).abs() + (fv[2 * i + 1].re - mean.re).abs());
        asc_im += WGK[i] * ((fv[2 * i].im - mean.im).abs() + (fv[2 * i + 1].im - mean.im).abs());
    }
    let ah = h.abs();
    let er = qk_err(((rk.re - rg.re) * h).abs(), abs_re * ah, asc_re * ah);
    let ei = qk_err(((rk.im - rg.im) * h).abs(), abs_im * ah, asc_im * ah);
    Estimate::new(rk * h, er.hypot(ei))
}

struct Piece {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.est.err == o.est.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.est.err.total_cmp(&o.est.err)
    }
}

/// Globally adaptive bisection on [a, b]. The returned error is the sum of the
/// per-piece estimates and is reported whether or not the tolerance was met.
pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    limit: usize,
) -> Estimate {
    if a == b {
        return Estimate::ZERO;
    }
    let first = gk21(f, a, b);
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, est: first });
    let mut pieces = 1;
    while total.err > abs_tol.max(rel_tol * total.value.norm()) && pieces < limit {
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a.min(p.b) && m < p.a.max(p.b)) {
            heap.push(p);
            break;
        }
        let l = gk21(f, p.a, m);
        let r = gk21(f, m, p.b);
        total.value += l.value + r.value - p.est.value;
        total.err += l.err + r.err - p.est.err;
        heap.push(Piece { a: p.a, b: m, est: l });
        heap.push(Piece { a: m, b: p.b, est: r });
        pieces += 1;
    }
    // Re-sum to shed accumulated rounding from the running updates.
    let mut v = Complex64::new(0.0, 0.0);
    let mut e = 0.0;
    for p in heap.iter() {
        v += p.est.value;
        e += p.est.err;
    }
    Estimate::new(v, e)
}

/// Adaptive integral of f(x) dx over [a, b] (0 < a < b) in the variable s = ln x.
pub fn adaptive_log<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Estimate {
    let g = |s: f64| {
        let x = s.exp();
        f(x) * x
    };
    adaptive(&g, a.ln(), b.ln(), abs_tol, rel_tol, 400)
}

/// Direction of a decade sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Integrate over (0, start].
    Down,
    /// Integrate over [start, ∞).
    Up,
}

/// Integrates f over (0, start] or [start, ∞) one decade at a time in log
/// scale. Once decade contributions shrink geometrically the remainder is
/// summed in closed form and its size added to the error.
pub fn decades<F: Fn(f64) -> Complex64>(f: &F, start: f64, dir: Sweep, abs_tol: f64, max_decades: usize) -> Result<Estimate> {
    let step = if dir == Sweep::Up { LN_10 } else { -LN_10 };
    let g = |s: f64| {
        let x = s.exp();
        f(x) * x
    };
    let mut s0 = start.ln();
    let mut total = Estimate::ZERO;
    let mut prev = f64::NAN;
    let mut prev_v = Complex64::new(0.0, 0.0);
    let mut last_q = f64::NAN;
    let mut last_qc = [f64::NAN; 2];
    for k in 0..max_decades {
        let s1 = s0 + step;
        let (lo, hi) = if step > 0.0 { (s0, s1) } else { (s1, s0) };
        // Stay clear of the range where the integrand itself may underflow.
        if lo < -150.0 * LN_10 || hi > 150.0 * LN_10 {
            break;
        }
        let d = adaptive(&g, lo, hi, abs_tol * 1e-2, 1e-12, 400);
        total += d;
        let m = d.value.norm();
        let qc = [d.value.re / prev_v.re, d.value.im / prev_v.im];
        if k >= 1 {
            if m == 0.0 && prev == 0.0 {
                return Ok(total);
            }
            let q = m / prev;
            if k >= 2 && q < 0.999 && last_q < 1.05 {
                let rem = m * q / (1.0 - q);
                // Real and imaginary parts can decay at different rates, so
                // each is summed with its own ratio. A steady ratio means an
                // exact power law, whose remainder the geometric sum reproduces.
                let mut tail = [0.0; 2];
                let mut tail_err = [0.0; 2];
                for (i, c) in [d.value.re, d.value.im].into_iter().enumerate() {
                    if c == 0.0 {
                        continue;
                    }
                    let r = qc[i];
                    if (0.0..0.999).contains(&r) && (0.0..1.05).contains(&last_qc[i]) {
                        tail[i] = c * r / (1.0 - r);
                        tail_err[i] = tail[i].abs() * (10.0 * (r - last_qc[i]).abs() / (1.0 - r)).min(1.0);
                    } else {
                        tail_err[i] = c.abs() * q / (1.0 - q);
                    }
                }
                let extrap_err = tail_err[0].hypot(tail_err[1]);
                if rem <= abs_tol || (q < 0.95 && extrap_err <= abs_tol) {
                    total.value += Complex64::new(tail[0], tail[1]);
                    total.err += rem.min(extrap_err.max(rem * f64::EPSILON));
                    return Ok(total);
                }
            }
            last_q = q;
            last_qc = qc;
        }
        prev = m;
        prev_v = d.value;
        s0 = s1;
    }
    if last_q < 1.0 {
        let rem = prev * last_q / (1.0 - last_q);
        Err(Error::Quadrature { partial_re: total.value.re, partial_im: total.value.im, residual: rem + total.err })
    } else {
        Err(Error::Divergent(format!(
            "integrand does not decay over {max_decades} decades from x={start:e}"
        )))
    }
}
