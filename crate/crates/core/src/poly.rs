//! Real polynomials in ascending-coefficient form and their complex roots.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Evaluates Σ a_k z^k by Horner's rule.
pub fn eval(a: &[f64], z: Complex64) -> Complex64 {
    a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Coefficients of the k-th derivative.
pub fn derivative(a: &[f64], k: usize) -> Vec<f64> {
    let mut d = a.to_vec();
    for _ in 0..k {
        if d.len() <= 1 {
            return vec![0.0];
        }
        d = d.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect();
    }
    d
}

/// Drops trailing zero coefficients.
pub fn trim(a: &[f64]) -> &[f64] {
    let mut n = a.len();
    while n > 1 && a[n - 1] == 0.0 {
        n -= 1;
    }
    &a[..n]
}

/// All complex roots, from the eigenvalues of the companion matrix followed by
/// a few Newton steps on the original polynomial.
pub fn roots(a: &[f64]) -> Vec<Complex64> {
    let a = trim(a);
    let deg = a.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = a[deg];
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -a[i] / lead;
    }
    let da = derivative(a, 1);
    m.complex_eigenvalues()
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..8 {
                let p = eval(a, z);
                let dp = eval(&da, z);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                let cand = z - step;
                // Keep the step only when it reduces the residual.
                if eval(a, cand).norm() < p.norm() {
                    z = cand;
                } else {
                    break;
                }
            }
            if z.im.abs() <= 1e-14 * z.norm() {
                z.im = 0.0;
            }
            z
        })
        .collect()
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub root: Complex64,
    pub multiplicity: usize,
}

/// Groups roots lying within `rel` relative distance of each other.
pub fn cluster(roots: &[Complex64], rel: f64) -> Vec<RootCluster> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1e-300);
            if (roots[i] - roots[j]).norm() <= rel * scale {
                let (li, lj) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == lj {
                        *l = li;
                    }
                }
            }
        }
    }
    let mut out: Vec<RootCluster> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for i in 0..n {
        if seen.contains(&label[i]) {
            continue;
        }
        seen.push(label[i]);
        let members: Vec<Complex64> = (0..n).filter(|&k| label[k] == label[i]).map(|k| roots[k]).collect();
        let mut mean = members.iter().sum::<Complex64>() / members.len() as f64;
        if mean.im.abs() <= rel * mean.norm() {
            mean.im = 0.0;
        }
        out.push(RootCluster { root: mean, multiplicity: members.len() });
    }
    out
}
