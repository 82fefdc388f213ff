use std::fmt;

use thiserror::Error;

/// A single problem found while validating a model specification.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// An AR root lies strictly inside the closed unit disk.
    ArRootInside { root: (f64, f64), modulus: f64 },
    /// An MA root lies strictly inside the closed unit disk.
    MaRootInside { root: (f64, f64), modulus: f64 },
    /// A root sits on the validation boundary |z| = 1 up to the tolerance.
    Borderline { which: &'static str, root: (f64, f64), modulus: f64 },
    /// The AR and MA polynomials share a zero.
    CommonZero { root: (f64, f64) },
    /// A coefficient or the memory parameter is not finite.
    NonFinite(&'static str),
    /// The memory parameter is outside the supported range.
    MemoryParameter(f64),
}

fn root_str(r: (f64, f64)) -> String {
    fn num(x: f64) -> String {
        let s = format!("{x:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.to_string() }
    }
    let exact = |x: f64| (x * 1e3).round() / 1e3 == x;
    let body = if r.1 == 0.0 {
        num(r.0)
    } else {
        let im = num(r.1.abs());
        format!("{}{}{}i", num(r.0), if r.1 < 0.0 { "-" } else { "+" }, im)
    };
    if exact(r.0) && exact(r.1) {
        format!("z={body}")
    } else {
        format!("z≈{body}")
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::ArRootInside { root, modulus } => {
                write!(f, "AR root inside unit disk at {} (|z|={modulus})", root_str(*root))
            }
            Diagnostic::MaRootInside { root, modulus } => {
                write!(f, "MA root inside unit disk at {} (|z|={modulus})", root_str(*root))
            }
            Diagnostic::Borderline { which, root, modulus } => write!(
                f,
                "borderline: {which} root at {} has |z|={modulus}, within tolerance of the unit circle",
                root_str(*root)
            ),
            Diagnostic::CommonZero { root } => write!(f, "common zero at {}", root_str(*root)),
            Diagnostic::NonFinite(what) => write!(f, "{what} contains a non-finite value"),
            Diagnostic::MemoryParameter(d) => write!(f, "memory parameter d={d} must satisfy d < 1"),
        }
    }
}
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {}", join(.0))]
    InvalidModel(Vec<Diagnostic>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no causal solution: {0}")]
    NoCausalSolution(String),

    #[error("boundary regime, no prediction available: {0}")]
    BoundaryRegime(String),

    #[error("tail bound {bound:e} exceeds tolerance {tol:e} with N={n_terms}; increase N (suggested N={suggested})")]
    IncreaseN { bound: f64, tol: f64, n_terms: usize, suggested: usize },

    #[error("quadrature did not converge: partial value {partial_re}{partial_im:+}i, residual estimate {residual:e}")]
    Quadrature { partial_re: f64, partial_im: f64, residual: f64 },

    #[error("divergent: {0}")]
    Divergent(String),

    #[error("argument too large for sample size: empirical characteristic function modulus {0:e} < 1e-3")]
    EmpiricalCf(f64),

    #[error("simulation truncation too short: {0}")]
    Truncation(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the inputs rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidModel(_)
                | Error::InvalidArgument(_)
                | Error::NoCausalSolution(_)
                | Error::BoundaryRegime(_)
                | Error::Json(_)
        )
    }
}

fn join(d: &[Diagnostic]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
