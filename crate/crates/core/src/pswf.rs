//! Prolate spheroidal wave functions on `[-1, 1]`.
//!
//! The functions are the eigenfunctions of the finite Fourier transform
//! `(F r)(tau) = ∫_{-1}^{1} exp(i c zeta tau) r(zeta) d zeta`. They are computed
//! by expanding in normalized Legendre polynomials and diagonalizing the
//! (parity-split, tridiagonal) matrix of the commuting Sturm–Liouville operator
//! `-(1 - x^2) y'' + 2 x y' + c^2 x^2 y`.
//!
//! Eigenvalues of the integral operator follow from `λ_0 ψ_0(0) = ∫ ψ_0` and the
//! ratio recurrence
//!
//! ```text
//! λ_{n+1} = λ_n · i c X_n / (B_n + sqrt(B_n^2 + c^2 X_n^2)),
//! X_n = <x ψ_n, ψ_{n+1}>,   B_n = ψ_n(1) ψ_{n+1}(1),
//! ```
//!
//! which keeps full relative precision deep into the super-exponential decay
//! region where a direct quadrature eigensolve only resolves absolute error.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::VirtualGrid;

/// Default precision threshold for the truncation rule.
pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy)]
pub struct BasisConfig {
    /// Upper bound on `2d + 1`.
    pub max_functions: usize,
    /// Largest accepted condition number of the interpolation matrix.
    pub max_condition: f64,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self { max_functions: 401, max_condition: 1e13 }
    }
}

/// PSWF family truncated to `2d + 1` functions, with the uniform-grid
/// interpolation matrix used to build the kernel matrix of the SDP.
#[derive(Debug, Clone)]
pub struct PswfBasis {
    c: f64,
    epsilon: f64,
    d: usize,
    /// All computed eigenvalues, `|λ_0| ≥ |λ_1| ≥ …`; at least `2d + 1` of them.
    eigenvalues: Vec<Complex64>,
    /// Normalized-Legendre coefficients of ψ_l, one row per function.
    coeffs: Vec<Vec<f64>>,
    phi: DMatrix<f64>,
    phi_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    phi_inv_t: DMatrix<f64>,
    phi_condition: f64,
}

impl PswfBasis {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Truncation order; the basis holds `2d + 1` functions.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_functions(&self) -> usize {
        2 * self.d + 1
    }

    /// Eigenvalues `λ_0, …, λ_{2d}`.
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues[..self.n_functions()]
    }

    /// Every eigenvalue computed while selecting `d` (decay diagnostics).
    pub fn all_eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Legendre coefficients of ψ_l in the orthonormal basis `sqrt(k + 1/2) P_k`.
    pub fn legendre_coefficients(&self, l: usize) -> &[f64] {
        &self.coeffs[l]
    }

    /// Uniform interpolation nodes `tau_q = (q - d) / d`, `q = 0..=2d`.
    pub fn sample_grid(&self) -> Vec<f64> {
        let d = self.d as f64;
        (0..self.n_functions()).map(|q| (q as f64 - d) / d).collect()
    }

    /// ψ_l(tau) for `tau ∈ [-1, 1]`.
    pub fn eval(&self, l: usize, tau: f64) -> f64 {
        let p = normalized_legendre(self.coeffs[l].len(), tau);
        dot(&self.coeffs[l], &p)
    }

    /// ψ_0(tau), …, ψ_{2d}(tau).
    pub fn eval_all(&self, tau: f64) -> Vec<f64> {
        let n_leg = self.coeffs.first().map_or(0, Vec::len);
        let p = normalized_legendre(n_leg, tau);
        self.coeffs[..self.n_functions()].iter().map(|a| dot(a, &p)).collect()
    }

    /// Φ with `Φ[q][l] = ψ_l(tau_q)`.
    pub fn phi_matrix(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn phi_condition(&self) -> f64 {
        self.phi_condition
    }

    /// Solves `Φ x = b`.
    pub fn phi_solve(&self, b: &DVector<f64>) -> Option<DVector<f64>> {
        self.phi_lu.solve(b)
    }

    /// `Φ^{-1}` from the cached factorization.
    pub fn phi_inverse(&self) -> DMatrix<f64> {
        self.phi_lu.try_inverse().expect("Φ was checked invertible at construction")
    }

    /// Weights `w = Φ^{-T} h(tau)` so that the interpolated value of samples
    /// `y` taken on the uniform grid is `wᵀ y` (exact at the grid nodes).
    pub fn interpolation_weights(&self, tau: f64) -> DVector<f64> {
        let h = DVector::from_vec(self.eval_all(tau));
        &self.phi_inv_t * h
    }

    /// `h_qp(l) = ψ_l((r̃_q - r̃_p) / r̃_max)` with zero-based indices.
    pub fn kernel_vector(&self, grid: &VirtualGrid, q: usize, p: usize) -> Result<Vec<f64>> {
        let size = grid.len();
        if q >= size || p >= size {
            return Err(Error::IndexOutOfRange { q, p, size });
        }
        Ok(self.eval_all(grid.normalized_separation(q, p)))
    }

    /// `(l, |λ_l|)` pairs as CSV text.
    pub fn decay_csv(&self) -> String {
        let mut out = String::from("l,abs_lambda\n");
        for (l, lam) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{l},{:.17e}\n", lam.norm()));
        }
        out
    }
}

/// Computes the basis for bandwidth `c` with the default resource guards.
pub fn compute_basis(c: f64, epsilon: f64) -> Result<PswfBasis> {
    compute_basis_with(c, epsilon, BasisConfig::default())
}

pub fn compute_basis_with(c: f64, epsilon: f64, config: BasisConfig) -> Result<PswfBasis> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("bandwidth parameter c must be positive, got {c}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let d_floor = ((2.0 * c / PI).ceil() as usize).max(1);
    let mut n_funcs = 2 * d_floor + 41;
    loop {
        let (eigenvalues, coeffs) = prolate_family(c, n_funcs);
        let first_small = eigenvalues.iter().position(|l| l.norm() < epsilon);
        let Some(l_small) = first_small else {
            if n_funcs > 4 * config.max_functions {
                return Err(Error::PswfOrderCap { requested: n_funcs, cap: config.max_functions });
            }
            n_funcs *= 2;
            continue;
        };
        let d = l_small.div_ceil(2).max(d_floor);
        let n_basis = 2 * d + 1;
        if n_basis > config.max_functions {
            return Err(Error::PswfOrderCap { requested: n_basis, cap: config.max_functions });
        }
        if n_basis > n_funcs {
            n_funcs = n_basis + 20;
            continue;
        }
        return finish_basis(c, epsilon, d, eigenvalues, coeffs, config);
    }
}

fn finish_basis(
    c: f64,
    epsilon: f64,
    d: usize,
    eigenvalues: Vec<Complex64>,
    coeffs: Vec<Vec<f64>>,
    config: BasisConfig,
) -> Result<PswfBasis> {
    let n = 2 * d + 1;
    let n_leg = coeffs[0].len();
    let mut phi = DMatrix::<f64>::zeros(n, n);
    for q in 0..n {
        let tau = (q as f64 - d as f64) / d as f64;
        let p = normalized_legendre(n_leg, tau);
        for l in 0..n {
            phi[(q, l)] = dot(&coeffs[l], &p);
        }
    }
    let sv = phi.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= config.max_condition) {
        return Err(Error::SingularPhi(condition));
    }
    let phi_lu = phi.clone().lu();
    let phi_inv_t = phi_lu.try_inverse().ok_or(Error::SingularPhi(condition))?.transpose();
    Ok(PswfBasis { c, epsilon, d, eigenvalues, coeffs, phi, phi_lu, phi_inv_t, phi_condition: condition })
}

/// First `n_funcs` eigenpairs: eigenvalues of the integral operator and the
/// Legendre coefficients of ψ_0 … ψ_{n_funcs-1}, normalized with ψ_n(1) > 0.
fn prolate_family(c: f64, n_funcs: usize) -> (Vec<Complex64>, Vec<Vec<f64>>) {
    let mut n_leg = n_funcs + 2 * (c.ceil() as usize) + 60;
    n_leg += n_leg % 2;
    let c2 = c * c;

    let mut coeffs = vec![Vec::new(); n_funcs];
    for parity in 0..2usize {
        let ks: Vec<usize> = (parity..n_leg).step_by(2).collect();
        let m = ks.len();
        let mut a = DMatrix::<f64>::zeros(m, m);
        for (i, &k) in ks.iter().enumerate() {
            let kf = k as f64;
            let mut diag = kf * (kf + 1.0) + c2 * (kf + 1.0).powi(2) / ((2.0 * kf + 1.0) * (2.0 * kf + 3.0));
            if k > 0 {
                diag += c2 * kf * kf / ((2.0 * kf - 1.0) * (2.0 * kf + 1.0));
            }
            a[(i, i)] = diag;
            if i + 1 < m {
                let off = c2 * (kf + 1.0) * (kf + 2.0)
                    / ((2.0 * kf + 3.0) * ((2.0 * kf + 1.0) * (2.0 * kf + 5.0)).sqrt());
                a[(i, i + 1)] = off;
                a[(i + 1, i)] = off;
            }
        }
        let eig = a.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
        for (rank, &col) in order.iter().enumerate() {
            let n = 2 * rank + parity;
            if n >= n_funcs {
                break;
            }
            let mut full = vec![0.0; n_leg];
            for (i, &k) in ks.iter().enumerate() {
                full[k] = eig.eigenvectors[(i, col)];
            }
            // ψ_n(1) = Σ a_k sqrt(k + 1/2); underflows for small n at large c, where
            // the sign comes from ψ_n(0) (even) or ψ_n'(0) (odd) and the n zeros
            // inside (-1, 1)
            let at_one: f64 = full.iter().enumerate().map(|(k, a)| a * (k as f64 + 0.5).sqrt()).sum();
            let at_zero = origin_value(&full, parity);
            let flips = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let sign = if at_one.abs() >= at_zero.abs() { at_one } else { flips * at_zero };
            if sign < 0.0 {
                full.iter_mut().for_each(|a| *a = -*a);
            }
            coeffs[n] = full;
        }
    }

    let at_one: Vec<f64> = coeffs
        .iter()
        .map(|a| a.iter().enumerate().map(|(k, v)| v * (k as f64 + 0.5).sqrt()).sum())
        .collect();

    let mut eigenvalues = Vec::with_capacity(n_funcs);
    let p0 = normalized_legendre(n_leg, 0.0);
    let psi0_at_zero = dot(&coeffs[0], &p0);
    eigenvalues.push(Complex64::new(2f64.sqrt() * coeffs[0][0] / psi0_at_zero, 0.0));
    for n in 0..n_funcs - 1 {
        let x = x_inner(&coeffs[n], &coeffs[n + 1]);
        let b = at_one[n] * at_one[n + 1];
        let denom = b + (b * b + c2 * x * x).sqrt();
        let ratio = Complex64::new(0.0, c * x / denom);
        eigenvalues.push(eigenvalues[n] * ratio);
    }
    (eigenvalues, coeffs)
}

/// `f(0)` for even `f`, `f'(0)` for odd `f`, from normalized-Legendre coefficients.
fn origin_value(a: &[f64], parity: usize) -> f64 {
    // P_k(0) = -(k-1)/k P_{k-2}(0); P_k'(0) = k P_{k-1}(0)
    let mut p_even = 1.0;
    let mut acc = 0.0;
    for k in (0..a.len()).step_by(2) {
        if k > 0 {
            p_even *= -((k - 1) as f64) / k as f64;
        }
        let j = k + parity;
        if j < a.len() {
            let v = if parity == 0 { p_even } else { j as f64 * p_even };
            acc += a[j] * (j as f64 + 0.5).sqrt() * v;
        }
    }
    acc
}

/// `<x f, g>` for functions given by normalized-Legendre coefficients.
fn x_inner(f: &[f64], g: &[f64]) -> f64 {
    let n = f.len();
    let mut acc = 0.0;
    for k in 0..n {
        if f[k] == 0.0 {
            continue;
        }
        let kf = k as f64;
        // x P̄_k = s_k P̄_{k+1} + s_{k-1} P̄_{k-1},  s_k = (k+1)/sqrt((2k+1)(2k+3))
        if k + 1 < n {
            let s = (kf + 1.0) / ((2.0 * kf + 1.0) * (2.0 * kf + 3.0)).sqrt();
            acc += f[k] * s * g[k + 1];
        }
        if k > 0 {
            let s = kf / ((2.0 * kf - 1.0) * (2.0 * kf + 1.0)).sqrt();
            acc += f[k] * s * g[k - 1];
        }
    }
    acc
}

/// `sqrt(k + 1/2) P_k(x)` for `k = 0..n`.
pub(crate) fn normalized_legendre(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n];
    if n == 0 {
        return p;
    }
    let (mut pm1, mut pk) = (0.0, 1.0);
    for k in 0..n {
        p[k] = pk * (k as f64 + 0.5).sqrt();
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * pk - kf * pm1) / (kf + 1.0);
        pm1 = pk;
        pk = next;
    }
    p
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
