//! Independent cross-checks of computed quantities, reported by the CLI.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::anm::{build_t, compute_q, psi_of_t};
use crate::conic::SolverConfig;
use crate::error::Result;
use crate::geometry::{build_virtual_grid, chi_adjoint, chi_apply, general_steering, ArrayGeometry};
use crate::pswf::compute_basis;
use crate::recovery::{srw_doa, SrwConfig};
use crate::signal::{select_bins, synthesize, SourceScene, WidebandParams};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    /// How the reference value was obtained.
    pub method: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleCheck {
    fn new(name: &str, method: &str, value: f64, reference: f64, tolerance: f64) -> Self {
        let passed = (value - reference).abs() <= tolerance;
        Self { name: name.into(), method: method.into(), value, reference, tolerance, passed }
    }

    /// Passes when `value ≤ bound`.
    fn bound(name: &str, method: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), method: method.into(), value, reference: bound, tolerance: 0.0, passed: value <= bound }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Golub–Welsch).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        let k = i.max(j);
        if i.abs_diff(j) == 1 {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Eigenvalues of `∫₋₁¹ e^{icxy} r(y) dy` by Nyström discretization, sorted by
/// decreasing modulus. Even functions see the cosine kernel, odd ones `i` times
/// the sine kernel.
pub fn nystrom_eigenvalues(c: f64, n_points: usize) -> Vec<Complex64> {
    let (x, w) = gauss_legendre(n_points);
    let sym = |k: &dyn Fn(f64) -> f64| {
        DMatrix::from_fn(n_points, n_points, |i, j| w[i].sqrt() * k(c * x[i] * x[j]) * w[j].sqrt())
    };
    let even = SymmetricEigen::new(sym(&f64::cos)).eigenvalues;
    let odd = SymmetricEigen::new(sym(&f64::sin)).eigenvalues;
    // the even kernel also carries the odd functions with eigenvalue 0, and vice versa;
    // keep the half of each spectrum with the larger moduli
    let mut e: Vec<f64> = even.iter().copied().collect();
    let mut o: Vec<f64> = odd.iter().copied().collect();
    e.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    o.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut out: Vec<Complex64> = e[..n_points.div_ceil(2)]
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(o[..n_points / 2].iter().map(|&v| Complex64::new(0.0, v)))
        .collect();
    out.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    out
}

/// Number of distinct values in `{α_j r_m}` by pairwise comparison.
pub fn brute_force_grid_size(geometry: &ArrayGeometry, alphas: &[f64], tol: f64) -> usize {
    let vals: Vec<f64> = alphas.iter().flat_map(|a| geometry.positions().iter().map(move |r| a * r)).collect();
    (0..vals.len()).filter(|&i| (0..i).all(|j| (vals[i] - vals[j]).abs() > tol)).count()
}

fn underwater_geometry(seed: u64) -> Result<(ArrayGeometry, WidebandParams)> {
    let p = WidebandParams::underwater(10);
    let g = ArrayGeometry::random(8, p.random_aperture(8), &mut ChaCha8Rng::seed_from_u64(seed))?;
    Ok((g, p))
}

/// Runs every cross-check. `with_solver` includes the end-to-end SDP check.
pub fn run_all(with_solver: bool) -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    let quad = "Nystrom, 200-point Gauss-Legendre";

    let b = compute_basis(0.1, 1e-4)?;
    let nys = nystrom_eigenvalues(0.1, 200);
    out.push(OracleCheck::new("pswf lambda_0, c = 0.1", quad, b.eigenvalues()[0].re, nys[0].re, 1e-10));

    for c in [1.0, 10.0] {
        let b = compute_basis(c, 1e-4)?;
        let nys = nystrom_eigenvalues(c, 200);
        let mut worst: f64 = 0.0;
        for (l, lam) in b.eigenvalues().iter().enumerate() {
            // double-precision quadrature resolves |λ| down to ~1e-7 at 1e-8 relative
            if nys[l].norm() > 1e-7 {
                worst = worst.max((lam - nys[l]).norm() / nys[l].norm());
            }
        }
        out.push(OracleCheck::bound(&format!("pswf eigenvalues, c = {c}, max rel err"), quad, worst, 1e-8));
    }

    let (g, p) = underwater_geometry(1)?;
    let alphas: Vec<f64> = select_bins(&p)?.iter().map(|&f| p.alpha(f)).collect();
    let grid = build_virtual_grid(&g, &alphas, None)?;
    out.push(OracleCheck::new(
        "virtual grid size, M = 8, J = 10",
        "pairwise dedup",
        grid.len() as f64,
        brute_force_grid_size(&g, &alphas, grid.tolerance()) as f64,
        0.0,
    ));

    let basis = compute_basis(PI * grid.max_position(), 1e-4)?;
    let phi = basis.phi_matrix();
    let ident = phi * basis.phi_inverse();
    let n = phi.nrows();
    out.push(OracleCheck::bound(
        "Phi * Phi^-1 - I, max entry",
        "direct product",
        (ident - DMatrix::<f64>::identity(n, n)).amax(),
        1e-8,
    ));

    let d = basis.d();
    let mut worst: f64 = 0.0;
    for &f in &[-0.5, -0.31, 0.0, 0.12, 0.44] {
        let omega = 2.0 * PI * f * grid.max_position() / d as f64;
        let v: Vec<Complex64> = (0..=d).map(|k| Complex64::from_polar(1.0, -omega * k as f64)).collect();
        let q = compute_q(&v, &basis, &grid)?;
        let a = general_steering(&grid, f)?;
        let exact = &a * a.adjoint();
        worst = worst.max((q - exact).iter().fold(0.0, |m, z| m.max(z.norm())));
    }
    out.push(OracleCheck::bound("single-node Q vs exponential kernel", "a(f) a(f)^H", worst, 10.0 * basis.epsilon()));

    let mut min_eig = f64::INFINITY;
    let limit = basis.c() / d as f64;
    for i in 0..=10 {
        let omega = -limit + 2.0 * limit * i as f64 / 10.0;
        let z = Complex64::from_polar(1.0, -omega);
        let t = build_t(&(0..=d).map(|k| z.powu(k as u32)).collect::<Vec<_>>());
        min_eig = min_eig.min(psi_of_t(&t, basis.c(), d)?.symmetric_eigenvalues().min());
    }
    out.push(OracleCheck::bound("-min eig Psi(T) over in-band nodes", "eigendecomposition", -min_eig, 1e-8));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut rnd = |r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let z = rnd(grid.len(), 10);
    let y = rnd(8, 10);
    let lhs = (chi_apply(&grid, &z)?.adjoint() * &y).trace().re;
    let rhs = (z.adjoint() * chi_adjoint(&grid, &y)?).trace().re;
    out.push(OracleCheck::new("<chi(Z), Y> - <Z, chi*(Y)>", "inner products", lhs - rhs, 0.0, 1e-12));

    if with_solver {
        let p4 = WidebandParams::underwater(4);
        let theta = (0.2f64).asin().to_degrees();
        let snap = synthesize(&g, &SourceScene::new(vec![theta])?, &p4, 3)?;
        let cfg = SrwConfig { solver: SolverConfig::default(), ..SrwConfig::default() };
        let r = srw_doa(&g, &snap, 1, 0.0, &cfg)?;
        out.push(OracleCheck::new("end-to-end f, noiseless single source", "truth f = 0.1", r.estimate.frequencies[0], 0.1, 1e-4));
    }
    Ok(out)
}

pub fn report(checks: &[OracleCheck]) -> String {
    let mut s = String::from("check | reference | value | expected | tol | result\n");
    for c in checks {
        s.push_str(&format!(
            "{} | {} | {:.6e} | {:.6e} | {:.1e} | {}\n",
            c.name,
            c.method,
            c.value,
            c.reference,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let int = |p: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum::<f64>();
        assert!((int(0) - 2.0).abs() < 1e-13);
        assert!((int(18) - 2.0 / 19.0).abs() < 1e-13);
        assert!(int(7).abs() < 1e-13);
    }

    #[test]
    fn fast_checks_pass() {
        for c in run_all(false).unwrap() {
            assert!(c.passed, "{c:?}");
        }
    }
}
