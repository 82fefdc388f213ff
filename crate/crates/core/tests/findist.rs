use std::sync::Arc;

use levyarma::coeffs::{coefficients, ModelSpec};
use levyarma::dependence::{i_stable, DependenceOptions};
use levyarma::findist::{joint_cf_from_spectral, rac_joint, stable_spectral};
use levyarma::innovations::{id_exponent, stable_exponent, PowerRadial, RacSpec, StableSpec, TemperedRadial};
use num_complex::Complex64;

fn models() -> Vec<ModelSpec> {
    vec![ModelSpec::arma(&[], &[0.7]), ModelSpec::arma(&[0.5], &[]), ModelSpec::arma(&[-0.6], &[0.3])]
}

fn marginal(model: &ModelSpec, s: &StableSpec, z: f64) -> Complex64 {
    let c = coefficients(model, 200).unwrap().values;
    c.iter().map(|&cj| stable_exponent(s, z * cj)).sum()
}

#[test]
fn ma1_unit_theta_atoms() {
    let al = 1.5;
    let s = StableSpec::new(al, 0.0, 0.0).unwrap();
    let a = stable_spectral(&ModelSpec::arma(&[], &[1.0]), &s, 1, None).unwrap();
    assert_eq!(a.atoms.len(), 6);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for x in &a.atoms {
        if x.sx != 0.0 && x.sy != 0.0 {
            assert!((x.sx.abs() - r).abs() < 1e-15 && x.sx == x.sy);
            assert!((x.weight - 2f64.powf(al / 2.0) / 2.0).abs() < 1e-15);
        } else {
            assert!((x.weight - 0.5).abs() < 1e-15);
        }
    }
}

#[test]
fn stable_marginalization_and_identity() {
    for m in models() {
        for &(al, be) in &[(0.7, 0.0), (1.0, 0.6), (1.5, -0.4), (1.8, 1.0)] {
            let s = StableSpec::new(al, be, 0.0).unwrap();
            for n in [1usize, 2] {
                let a = stable_spectral(&m, &s, n, None).unwrap();
                for &(z1, z2) in &[(1.0, 0.5), (-0.7, 1.3), (0.2, -2.0)] {
                    let j0 = joint_cf_from_spectral(&a, [z1, 0.0]);
                    let m0 = marginal(&m, &s, z1);
                    assert!((j0 - m0).norm() < 1e-9, "{m:?} α={al} n={n}: {j0} vs {m0}");
                    let j1 = joint_cf_from_spectral(&a, [0.0, z2]);
                    let m1 = marginal(&m, &s, z2);
                    assert!((j1 - m1).norm() < 1e-9);
                    let j = joint_cf_from_spectral(&a, [z1, z2]);
                    let i = i_stable(&m, &s, n, z1, z2, &DependenceOptions::default()).unwrap();
                    assert!((j0 + j1 - j - i.value).norm() < 1e-9, "I identity {m:?} α={al} n={n}");
                }
            }
        }
    }
}

#[test]
fn rac_marginalization() {
    let rac = RacSpec { lambda_plus: 0.8, lambda_minus: 0.3, radial: Arc::new(TemperedRadial { alpha: 0.9, lambda: 1.2 }), eta: 2.0 };
    let id = rac.to_id().unwrap();
    for m in models() {
        for n in [1usize, 2] {
            let j = rac_joint(&m, &rac, n, None).unwrap();
            assert!(j.total_mass().unwrap().is_finite());
            let c = coefficients(&m, 200).unwrap().values;
            for z in [0.6, -1.4] {
                let joint = j.exponent([z, 0.0]).unwrap().value;
                let direct: Complex64 = c.iter().map(|&cj| id_exponent(&id, z * cj).unwrap().value).sum();
                assert!((joint - direct).norm() < 1e-9, "{m:?} n={n}: {joint} vs {direct}");
            }
        }
    }
}

#[test]
fn rac_white_noise_keeps_radial_density() {
    let rac = RacSpec { lambda_plus: 1.0, lambda_minus: 2.0, radial: Arc::new(PowerRadial { alpha: 1.3 }), eta: 1.2 };
    let j = rac_joint(&ModelSpec::arma(&[], &[]), &rac, 1, None).unwrap();
    assert_eq!(j.atoms.len(), 4);
    for k in 0..4 {
        assert_eq!(j.radial_density(k, 0.7), 0.7f64.powf(-2.3));
    }
    assert_eq!(j.gamma2, [0.0, 0.0]);
}
