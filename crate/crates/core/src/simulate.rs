//! Sample paths of causal ARMA/FARIMA processes with stable innovations.
//!
//! Every replicate draws from its own ChaCha8 stream (seed, replicate id),
//! so a batch is reproducible regardless of thread count.

use std::io::{Read, Write};

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::coeffs::{asym_descriptor, coefficients, ensure_valid, Envelope, ModelSpec};
use crate::error::{invalid, Error, Result};
use crate::innovations::{sample_stable, StableSpec};

const MAGIC: &[u8; 4] = b"LVAP";
const MAX_TRUNC: usize = 10_000_000;

/// How paths are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    /// Φ(B)X = Θ(B)ε run from zero through a burn-in (ARMA only).
    Recursion,
    /// X_t = Σ_{j≤M} c_j ε_{t-j}.
    TruncatedMa,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimOptions {
    /// Defaults to recursion for ARMA and truncated MA for FARIMA.
    pub mode: Option<SimMode>,
    /// Truncation M for the MA mode; chosen from the tail bound when absent.
    pub trunc_m: Option<usize>,
    /// Largest allowed Σ_{j>M}|c_j|^α / Σ_{j≤M}|c_j|^α.
    pub tail_tol: f64,
    /// Burn-in for the recursion mode; ceil(36/λ₁) when absent.
    pub burn_in: Option<usize>,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { mode: None, trunc_m: None, tail_tol: 1e-6, burn_in: None }
    }
}

/// Simulated paths, stored column-major with one column per replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    pub len: usize,
    pub replicates: usize,
    pub data: Vec<f64>,
    pub model: ModelSpec,
    pub stable: StableSpec,
    pub mode: SimMode,
    /// Recursion burn-in, or M for the truncated MA mode.
    pub burn_in: usize,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct Header {
    rows: usize,
    cols: usize,
    dtype: String,
    order: String,
    model: ModelSpec,
    stable: StableSpec,
    mode: SimMode,
    burn_in: usize,
    seed: u64,
}

impl PathBatch {
    /// Observations of replicate `k`.
    pub fn path(&self, k: usize) -> &[f64] {
        &self.data[k * self.len..(k + 1) * self.len]
    }

    fn header(&self) -> Header {
        Header {
            rows: self.len,
            cols: self.replicates,
            dtype: "f64le".into(),
            order: "column-major".into(),
            model: self.model.clone(),
            stable: self.stable,
            mode: self.mode,
            burn_in: self.burn_in,
            seed: self.seed,
        }
    }

    /// `LVAP`, a little-endian u32 header length, a JSON header, then the data
    /// as little-endian f64 in column-major order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let h = serde_json::to_vec(&self.header())?;
        w.write_all(MAGIC)?;
        w.write_all(&(h.len() as u32).to_le_bytes())?;
        w.write_all(&h)?;
        for x in &self.data {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(invalid("not a path file: bad magic"));
        }
        let mut len = [0u8; 4];
        r.read_exact(&mut len)?;
        let mut h = vec![0u8; u32::from_le_bytes(len) as usize];
        r.read_exact(&mut h)?;
        let h: Header = serde_json::from_slice(&h)?;
        if h.dtype != "f64le" || h.order != "column-major" {
            return Err(invalid(format!("unsupported layout {} {}", h.dtype, h.order)));
        }
        let mut data = Vec::with_capacity(h.rows * h.cols);
        let mut buf = [0u8; 8];
        for _ in 0..h.rows * h.cols {
            r.read_exact(&mut buf)?;
            data.push(f64::from_le_bytes(buf));
        }
        Ok(PathBatch {
            len: h.rows,
            replicates: h.cols,
            data,
            model: h.model,
            stable: h.stable,
            mode: h.mode,
            burn_in: h.burn_in,
            seed: h.seed,
        })
    }

    /// CSV with a `t` column and one column per replicate.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for k in 0..self.replicates {
            s.push_str(&format!(",r{k}"));
        }
        s.push('\n');
        for t in 0..self.len {
            s.push_str(&t.to_string());
            for k in 0..self.replicates {
                s.push_str(&format!(",{:.16e}", self.data[k * self.len + t]));
            }
            s.push('\n');
        }
        s
    }
}

/// Generator for replicate `k` of a batch seeded with `seed`.
pub fn replicate_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn recursion_path(model: &ModelSpec, s: &StableSpec, len: usize, burn: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (phi, theta) = (&model.phi, &model.theta);
    let total = burn + len;
    let eps: Vec<f64> = (0..total).map(|_| sample_stable(s, rng)).collect();
    let mut x = vec![0.0; total];
    for t in 0..total {
        let mut v = eps[t];
        for (k, th) in theta.iter().enumerate() {
            if t > k {
                v += th * eps[t - k - 1];
            }
        }
        for (k, ph) in phi.iter().enumerate() {
            if t > k {
                v += ph * x[t - k - 1];
            }
        }
        x[t] = v;
    }
    x.split_off(burn)
}

fn ma_path(c: &[f64], s: &StableSpec, len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = c.len() - 1;
    let eps: Vec<f64> = (0..m + len).map(|_| sample_stable(s, rng)).collect();
    (0..len)
        .map(|t| c.iter().enumerate().map(|(j, cj)| cj * eps[t + m - j]).sum())
        .collect()
}

fn tail_ratio(c: &[f64], env: &Envelope, m: usize, alpha: f64) -> f64 {
    let head: f64 = c.iter().map(|x| x.abs().powf(alpha)).sum();
    env.tail_sum(m, alpha) / head
}

/// Picks or checks the MA truncation M.
pub fn choose_truncation(model: &ModelSpec, s: &StableSpec, opts: &SimOptions) -> Result<usize> {
    let alpha = s.alpha;
    if model.is_farima() && alpha * (model.d - 1.0) >= -1.0 {
        return Err(Error::NoCausalSolution(format!(
            "FARIMA with d={} needs α(d-1) < -1, got α={alpha}",
            model.d
        )));
    }
    if model.p() == 0 && !model.is_farima() {
        return Ok(opts.trunc_m.unwrap_or(0).max(model.q()));
    }
    let ok = |m: usize| -> Result<bool> {
        let st = coefficients(model, m)?;
        Ok(tail_ratio(&st.values, &st.envelope, m, alpha) < opts.tail_tol)
    };
    if let Some(m) = opts.trunc_m {
        if ok(m)? {
            return Ok(m);
        }
        let suggested = search(model, s, opts, m)?;
        return Err(Error::Truncation(format!("tail bound too large at M={m}; suggested M={suggested}")));
    }
    let start = if model.is_farima() { 10_000 } else { 64 };
    if ok(start)? {
        return Ok(start);
    }
    let m = search(model, s, opts, start)?;
    if m > MAX_TRUNC {
        return Err(Error::Truncation(format!("required M={m} exceeds the limit {MAX_TRUNC}")));
    }
    Ok(m)
}

// Smallest M passing the tail test, predicted from the envelope.
fn search(model: &ModelSpec, s: &StableSpec, opts: &SimOptions, from: usize) -> Result<usize> {
    let alpha = s.alpha;
    let st = coefficients(model, from)?;
    let head: f64 = st.values.iter().map(|x| x.abs().powf(alpha)).sum();
    let target = opts.tail_tol * head;
    match st.envelope {
        Envelope::Power { m, exponent } => {
            let e = exponent * alpha;
            // m^α M^{e+1} / (-e-1) = target
            let mm = (target * (-e - 1.0) / m.powf(alpha)).powf(1.0 / (e + 1.0));
            Ok(if mm.is_finite() && mm < usize::MAX as f64 { (mm.ceil() as usize).max(from) } else { usize::MAX })
        }
        env => {
            let mut m = from.max(1);
            while env.tail_sum(m, alpha) >= target {
                m *= 2;
                if m > MAX_TRUNC {
                    return Ok(m);
                }
            }
            Ok(m)
        }
    }
}

/// Generates `replicates` paths of length `len`.
pub fn simulate_paths(
    model: &ModelSpec,
    s: &StableSpec,
    replicates: usize,
    len: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<PathBatch> {
    s.validate()?;
    ensure_valid(model)?;
    if replicates == 0 || len == 0 {
        return Err(invalid("replicates and length must be positive"));
    }
    let mode = opts.mode.unwrap_or(if model.is_farima() { SimMode::TruncatedMa } else { SimMode::Recursion });
    let (burn, data) = match mode {
        SimMode::Recursion => {
            if model.is_farima() {
                return Err(invalid("the recursion mode applies to ARMA models only"));
            }
            let burn = opts.burn_in.unwrap_or_else(|| {
                let desc = asym_descriptor(model).expect("validated model");
                let b = if desc.lambda1.is_finite() { (36.0 / desc.lambda1).ceil() as usize } else { 0 };
                b + model.p() + model.q()
            });
            let paths = crate::par_map(0..replicates, |k| {
                let mut rng = replicate_rng(seed, k);
                recursion_path(model, s, len, burn, &mut rng)
            });
            (burn, paths)
        }
        SimMode::TruncatedMa => {
            let m = choose_truncation(model, s, opts)?;
            let c = coefficients(model, m)?.values;
            let paths = crate::par_map(0..replicates, |k| {
                let mut rng = replicate_rng(seed, k);
                ma_path(&c, s, len, &mut rng)
            });
            (m, paths)
        }
    };
    Ok(PathBatch {
        len,
        replicates,
        data: data.concat(),
        model: model.clone(),
        stable: *s,
        mode,
        burn_in: burn,
        seed,
    })
}
