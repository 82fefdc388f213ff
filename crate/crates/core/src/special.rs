//! Gamma-function helpers.

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// 1/Γ(x), equal to zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        0.0
    } else {
        1.0 / libm::tgamma(x)
    }
}

/// Euler beta function for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    (libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp()
}

// Stirling remainder ln Γ(z) - [(z - 1/2) ln z - z + ln(2π)/2], z >= 30.
fn stirling_tail(z: f64) -> f64 {
    let r = 1.0 / z;
    let r2 = r * r;
    r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))
}

/// Γ(x + d) / Γ(x + 1) for real x with x + d and x + 1 away from the poles.
pub fn gamma_ratio(x: f64, d: f64) -> f64 {
    if x >= 30.0 && x + d >= 30.0 {
        // Write both log-gammas around x so the large parts cancel exactly.
        let l = (d - 1.0) * x.ln() + (x + d - 0.5) * (d / x).ln_1p()
            - (x + 0.5) * (1.0 / x).ln_1p()
            - (d - 1.0)
            + stirling_tail(x + d)
            - stirling_tail(x + 1.0);
        l.exp()
    } else {
        let (la, sa) = libm::lgamma_r(x + d);
        let (lb, sb) = libm::lgamma_r(x + 1.0);
        (sa * sb) as f64 * (la - lb).exp()
    }
}

/// Continuous extension of the fractional-differencing weights,
/// b(x) = Γ(x + d) / (Γ(d) Γ(x + 1)).
pub fn binomial_weight(x: f64, d: f64) -> f64 {
    gamma_ratio(x, d) * recip_gamma(d)
}
