//! Reference implementations shared by the integration tests. Nothing here
//! calls into the library's numerical code.
#![allow(dead_code)]

pub mod frozen_pswf;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre rule by Newton iteration on `P_n`.
pub fn gauss_legendre_newton(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Eigenvalues of the kernel `e^{icxy}` on `[-1, 1]` from a Nyström
/// discretization of the full complex-symmetric operator, sorted by modulus.
pub fn nystrom_eigenvalues(c: f64, n: usize) -> Vec<Complex64> {
    let (x, w) = gauss_legendre_newton(n);
    let k = DMatrix::from_fn(n, n, |i, j| {
        Complex64::from_polar(w[i].sqrt() * w[j].sqrt(), c * x[i] * x[j])
    });
    let mut ev: Vec<Complex64> = k.eigenvalues_complex();
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    ev
}

/// Complex eigenvalues of a general complex matrix.
trait ComplexEigen {
    fn eigenvalues_complex(self) -> Vec<Complex64>;
}

impl ComplexEigen for DMatrix<Complex64> {
    fn eigenvalues_complex(self) -> Vec<Complex64> {
        nalgebra::Schur::new(self).eigenvalues().expect("schur").iter().copied().collect()
    }
}

/// Distinct elements of `{α_j r_m}` counted by all-pairs comparison.
pub fn brute_force_unique(values: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &v in values {
        if out.iter().all(|u| (u - v).abs() > tol) {
            out.push(v);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Minimum total absolute error over every permutation; ties go to the
/// smaller squared error.
pub fn brute_force_matched_errors(truth: &[f64], est: &[f64]) -> Vec<f64> {
    let k = truth.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    permute(&mut perm, 0, &mut |p| {
        let l1: f64 = (0..k).map(|i| (truth[i] - est[p[i]]).abs()).sum();
        let l2: f64 = (0..k).map(|i| (truth[i] - est[p[i]]).powi(2)).sum();
        let better = match &best {
            None => true,
            Some((b1, b2, _)) => l1 < b1 - 1e-9 || (l1 <= b1 + 1e-9 && l2 < b2 - 1e-9),
        };
        if better {
            best = Some((l1, l2, p.to_vec()));
        }
    });
    let p = best.unwrap().2;
    (0..k).map(|i| (truth[i] - est[p[i]]).abs()).collect()
}

fn permute(v: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, f);
        v.swap(i, j);
    }
}

/// Per-trial RMS averaged over trials, failures counted at 90°.
pub fn reference_rmse(truth: &[f64], trials: &[Option<Vec<f64>>]) -> f64 {
    let mut total = 0.0;
    for t in trials {
        let errs = match t {
            Some(e) => brute_force_matched_errors(truth, e),
            None => vec![90.0; truth.len()],
        };
        let ms = errs.iter().map(|e| e * e).sum::<f64>() / truth.len() as f64;
        total += ms.sqrt();
    }
    total / trials.len() as f64
}

pub fn reference_success(truth: &[f64], trials: &[Option<Vec<f64>>], margin: f64) -> f64 {
    let ok = trials
        .iter()
        .filter(|t| match t {
            Some(e) => brute_force_matched_errors(truth, e).iter().all(|x| *x < margin),
            None => false,
        })
        .count();
    ok as f64 / trials.len() as f64
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Steering phase `exp(−i2π α r f)` written out directly.
pub fn phase(alpha: f64, r: f64, f: f64) -> Complex64 {
    Complex64::new((2.0 * PI * alpha * r * f).cos(), -(2.0 * PI * alpha * r * f).sin())
}
