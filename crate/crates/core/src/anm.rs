//! Atomic norm minimization over the virtual grid, posed as an SDP.
//!
//! ```text
//! minimize   ½ (trace W + Q_11)
//! subject to [[W, Zᴴ], [Z, Q(v)]] ⪰ 0
//!            ‖X - χ(Z)‖_F ≤ σ
//!            Ψ(T(v)) ⪰ 0
//! ```
//!
//! `v = (v_0, …, v_d)` are samples of the source kernel on a uniform grid of
//! `τ = n / d`; `Q(v)` interpolates them with the PSWF basis to every virtual
//! sensor separation, `T(v)` is their Hermitian Toeplitz matrix, and `Ψ`
//! restricts the spectral support of `T` to the representable band.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::SQRT_2;

use crate::conic::{self, Cone, ConicProgram, IterationRecord, Residuals, Solution, SolveStatus, SolverConfig, SparseMatrix};
use crate::error::{Error, Result};
use crate::geometry::{chi_apply, general_steering, VirtualGrid};
use crate::pswf::PswfBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AnmOptions {
    /// Restrict `W` to real symmetric matrices.
    pub real_w: bool,
    /// Add `T ⪰ 0` to the constraint set.
    pub toeplitz_psd: bool,
}

/// Hermitian Toeplitz matrix with first column `v` (so `T_{m,n} = v_{m-n}`
/// for `m ≥ n`); a single node `v_n = z^n` gives `T = u uᴴ`, `u_m = z^m`.
pub fn build_t(v: &[Complex64]) -> DMatrix<Complex64> {
    let n = v.len();
    DMatrix::from_fn(n, n, |i, j| if i >= j { v[i - j] } else { v[j - i].conj() })
}

/// `Ψ(T) = tan²(c/2d)(J₁+J₂)T(J₁+J₂)ᴴ − (J₁−J₂)T(J₁−J₂)ᴴ`, with
/// `J₁ = [I_d, 0]`, `J₂ = [0, I_d]`.
pub fn psi_of_t(t: &DMatrix<Complex64>, c: f64, d: usize) -> Result<DMatrix<Complex64>> {
    if t.nrows() != d + 1 || t.ncols() != d + 1 {
        return Err(Error::DimensionMismatch(format!("Ψ expects a {}x{} matrix", d + 1, d + 1)));
    }
    let a2 = (c / (2.0 * d as f64)).tan().powi(2);
    Ok(DMatrix::from_fn(d, d, |i, k| {
        let diag = t[(i, k)] + t[(i + 1, k + 1)];
        let cross = t[(i, k + 1)] + t[(i + 1, k)];
        (a2 - 1.0) * diag + (a2 + 1.0) * cross
    }))
}

/// Samples `[conj v_d, …, conj v_1, v_0, v_1, …, v_d]` on `τ = -1, …, 1`.
fn symmetric_stack(v: &[Complex64]) -> Vec<Complex64> {
    let d = v.len() - 1;
    (0..=2 * d)
        .map(|q| if q >= d { v[q - d] } else { v[d - q].conj() })
        .collect()
}

/// `Q_{q,p} = h_qpᵀ Φ⁻¹ [v_dᴴ … v_0 … v_d]ᵀ`.
pub fn compute_q(v: &[Complex64], basis: &PswfBasis, grid: &VirtualGrid) -> Result<DMatrix<Complex64>> {
    let d = basis.d();
    if v.len() != d + 1 {
        return Err(Error::DimensionMismatch(format!("expected {} coefficients, got {}", d + 1, v.len())));
    }
    if v[0].im.abs() > 1e-12 * v[0].norm().max(1.0) {
        return Err(Error::InvalidParameter("v_0 must be real".into()));
    }
    let stack = symmetric_stack(v);
    let n = grid.len();
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let w = basis.interpolation_weights(grid.normalized_separation(i, j));
            let val: Complex64 = w.iter().zip(&stack).map(|(w, s)| s * *w).sum();
            q[(i, j)] = val;
            q[(j, i)] = val.conj();
        }
    }
    Ok(q)
}

/// Column layout of the real decision vector.
#[derive(Debug, Clone, Copy)]
struct Layout {
    j: usize,
    m_tilde: usize,
    d: usize,
    real_w: bool,
}

impl Layout {
    fn n_w(&self) -> usize {
        if self.real_w {
            self.j * (self.j + 1) / 2
        } else {
            self.j * self.j
        }
    }

    fn n_vars(&self) -> usize {
        self.n_w() + 2 * self.m_tilde * self.j + 2 * self.d + 1
    }

    /// `(re, im)` columns of `W_{a,b}`, `a ≥ b`; `None` for structurally zero parts.
    fn w(&self, a: usize, b: usize) -> (usize, Option<usize>) {
        debug_assert!(a >= b);
        if a == b {
            return (a, None);
        }
        let jn = self.j;
        // strictly-lower entries numbered column-major
        let off = b * (2 * jn - b - 1) / 2 + (a - b - 1);
        if self.real_w {
            (jn + off, None)
        } else {
            let base = jn + 2 * off;
            (base, Some(base + 1))
        }
    }

    fn z(&self, row: usize, col: usize) -> (usize, usize) {
        let base = self.n_w() + 2 * (col * self.m_tilde + row);
        (base, base + 1)
    }

    fn v0(&self) -> usize {
        self.n_w() + 2 * self.m_tilde * self.j
    }

    /// `(re, im)` columns of `v_n`, `n ≥ 1`.
    fn v(&self, n: usize) -> (usize, usize) {
        let base = self.v0() + 1 + 2 * (n - 1);
        (base, base + 1)
    }
}

/// Sparse linear form over the real decision vector.
type Form = Vec<(usize, f64)>;

/// Real and imaginary parts of a Hermitian matrix entry as linear forms.
#[derive(Debug, Clone, Default)]
struct EntryForm {
    re: Form,
    im: Form,
}

impl EntryForm {
    fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: self.im.iter().map(|&(c, v)| (c, -v)).collect() }
    }
}

/// `Re`/`Im` of the Toeplitz sample `t(δ)`: `v_δ` for `δ ≥ 0`, `conj v_{-δ}` otherwise.
fn toeplitz_sample(layout: &Layout, delta: isize, scale: f64) -> EntryForm {
    if delta == 0 {
        return EntryForm { re: vec![(layout.v0(), scale)], im: vec![] };
    }
    let (re, im) = layout.v(delta.unsigned_abs());
    let sign = if delta > 0 { 1.0 } else { -1.0 };
    EntryForm { re: vec![(re, scale)], im: vec![(im, sign * scale)] }
}

/// Program data of the SDP together with everything needed to read the
/// optimum back as matrices.
#[derive(Debug, Clone)]
pub struct AnmProblem {
    x: DMatrix<Complex64>,
    sigma: f64,
    grid: VirtualGrid,
    basis: PswfBasis,
    options: AnmOptions,
    layout: Layout,
    program: ConicProgram,
    block_side: usize,
    /// Raw `(v_0, Re v_1, Im v_1, …)` = `v_map ·` solver columns of the v block.
    v_map: DMatrix<f64>,
    v_map_inv: DMatrix<f64>,
}

impl AnmProblem {
    pub fn assemble(
        x: &DMatrix<Complex64>,
        grid: &VirtualGrid,
        basis: &PswfBasis,
        sigma: f64,
        options: AnmOptions,
    ) -> Result<Self> {
        if x.nrows() != grid.n_sensors() || x.ncols() != grid.n_bins() {
            return Err(Error::DimensionMismatch(format!(
                "data is {}x{} but the grid expects {}x{}",
                x.nrows(),
                x.ncols(),
                grid.n_sensors(),
                grid.n_bins()
            )));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be finite and non-negative, got {sigma}")));
        }
        let expected_c = std::f64::consts::PI * grid.max_position();
        if (basis.c() - expected_c).abs() > 1e-9 * expected_c.max(1.0) {
            return Err(Error::DimensionMismatch(format!(
                "basis was built for c = {} but the grid needs c = {expected_c}",
                basis.c()
            )));
        }
        let j = grid.n_bins();
        let m_tilde = grid.len();
        let d = basis.d();
        let layout = Layout { j, m_tilde, d, real_w: options.real_w };

        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        let mut b: Vec<f64> = Vec::new();
        let mut cones: Vec<Cone> = Vec::new();

        // Q entries as forms over v, shared by the block constraint and the objective
        let q_forms = q_entry_forms(&layout, basis, grid);

        // block [[W, Zᴴ], [Z, Q]]
        let side = j + m_tilde;
        let entry = |a: usize, bb: usize| -> EntryForm {
            let (hi, lo, flip) = if a >= bb { (a, bb, false) } else { (bb, a, true) };
            let e = if hi < j {
                let (re, im) = layout.w(hi, lo);
                EntryForm { re: vec![(re, 1.0)], im: im.map(|c| vec![(c, 1.0)]).unwrap_or_default() }
            } else if lo < j {
                let (re, im) = layout.z(hi - j, lo);
                EntryForm { re: vec![(re, 1.0)], im: vec![(im, 1.0)] }
            } else {
                q_forms[tri_index(hi - j, lo - j)].clone()
            };
            if flip {
                e.conj()
            } else {
                e
            }
        };
        push_hermitian_psd(&mut triplets, &mut b, &mut cones, side, entry);

        // data fidelity
        let n_data = 2 * grid.n_sensors() * j;
        if sigma > 0.0 {
            b.push(sigma);
            cones.push(Cone::SecondOrder(n_data + 1));
        } else {
            cones.push(Cone::Zero(n_data));
        }
        let first = b.len();
        for col in 0..j {
            for m in 0..grid.n_sensors() {
                let (re, im) = layout.z(grid.index(m, col), col);
                let k = first + 2 * (col * grid.n_sensors() + m);
                triplets.push((k, re, 1.0));
                triplets.push((k + 1, im, 1.0));
                b.push(x[(m, col)].re);
                b.push(x[(m, col)].im);
            }
        }

        // Ψ(T) ⪰ 0; Ψ is Toeplitz with entries 2(a²−1)t(δ) + (a²+1)(t(δ−1) + t(δ+1))
        let a2 = (basis.c() / (2.0 * d as f64)).tan().powi(2);
        let psi_entry = |r: usize, s: usize| -> EntryForm {
            let delta = r as isize - s as isize;
            let mut out = EntryForm::default();
            for (dd, scale) in [(delta, 2.0 * (a2 - 1.0)), (delta - 1, a2 + 1.0), (delta + 1, a2 + 1.0)] {
                let f = toeplitz_sample(&layout, dd, scale);
                out.re.extend(f.re);
                out.im.extend(f.im);
            }
            out
        };
        push_hermitian_psd(&mut triplets, &mut b, &mut cones, d, psi_entry);

        if options.toeplitz_psd {
            let t_entry = |r: usize, s: usize| toeplitz_sample(&layout, r as isize - s as isize, 1.0);
            push_hermitian_psd(&mut triplets, &mut b, &mut cones, d + 1, t_entry);
        }

        // objective ½ (trace W + Q_11)
        let mut c = vec![0.0; layout.n_vars()];
        for i in 0..j {
            c[layout.w(i, i).0] += 0.5;
        }
        for &(col, w) in &q_forms[0].re {
            c[col] += 0.5 * w;
        }

        let (triplets, c, v_map) = whiten_columns(&triplets, &c, b.len(), layout.v0());
        let v_map_inv = v_map.clone().try_inverse().ok_or_else(|| Error::Solver("degenerate v block".into()))?;
        let a = SparseMatrix::from_triplets(b.len(), layout.n_vars(), &triplets)?;
        let program = ConicProgram::new(c, a, b, cones)?;
        Ok(Self {
            x: x.clone(),
            sigma,
            grid: grid.clone(),
            basis: basis.clone(),
            options,
            layout,
            program,
            block_side: side,
            v_map,
            v_map_inv,
        })
    }

    pub fn program(&self) -> &ConicProgram {
        &self.program
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.x
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn grid(&self) -> &VirtualGrid {
        &self.grid
    }

    pub fn basis(&self) -> &PswfBasis {
        &self.basis
    }

    pub fn options(&self) -> AnmOptions {
        self.options
    }

    /// `(J, M̃, d)`
    pub fn dimensions(&self) -> (usize, usize, usize) {
        (self.layout.j, self.layout.m_tilde, self.layout.d)
    }

    /// Side of the complex block `[[W, Zᴴ], [Z, Q]]`.
    pub fn block_side(&self) -> usize {
        self.block_side
    }

    pub fn dump(&self) -> String {
        let (j, m_tilde, d) = self.dimensions();
        let mut out =
            format!("# anm problem J={j} M_tilde={m_tilde} d={d} sigma={:.17e} real_w={}\n", self.sigma, self.options.real_w);
        out.push_str(&self.program.dump());
        out
    }

    pub fn solve(&self, config: &SolverConfig) -> Result<AnmSolution> {
        let sol = conic::solve(&self.program, config)?;
        if matches!(sol.status, SolveStatus::PrimalInfeasible | SolveStatus::DualInfeasible) {
            return Err(Error::Solver(format!("solver reported {:?}", sol.status)));
        }
        Ok(self.read_solution(sol))
    }

    /// Solver vector for a candidate `(W, Z, v)`; `W` is read from its lower
    /// triangle.
    pub fn variables(&self, w: &DMatrix<Complex64>, z: &DMatrix<Complex64>, v: &[Complex64]) -> Result<Vec<f64>> {
        let l = &self.layout;
        if w.shape() != (l.j, l.j) || z.shape() != (l.m_tilde, l.j) || v.len() != l.d + 1 {
            return Err(Error::DimensionMismatch("candidate does not match the problem dimensions".into()));
        }
        let mut x = vec![0.0; l.n_vars()];
        for a in 0..l.j {
            for b in 0..=a {
                let (re, im) = l.w(a, b);
                x[re] = w[(a, b)].re;
                if let Some(im) = im {
                    x[im] = w[(a, b)].im;
                }
            }
        }
        for r in 0..l.m_tilde {
            for col in 0..l.j {
                let (re, im) = l.z(r, col);
                x[re] = z[(r, col)].re;
                x[im] = z[(r, col)].im;
            }
        }
        let mut raw = DVector::zeros(2 * l.d + 1);
        raw[0] = v[0].re;
        for n in 1..=l.d {
            raw[2 * n - 1] = v[n].re;
            raw[2 * n] = v[n].im;
        }
        let y = &self.v_map_inv * raw;
        x[l.v0()..].copy_from_slice(y.as_slice());
        Ok(x)
    }

    fn read_solution(&self, sol: Solution) -> AnmSolution {
        let x = &sol.x;
        let l = &self.layout;
        let w = DMatrix::from_fn(l.j, l.j, |a, b| {
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            let (re, im) = l.w(hi, lo);
            let z = Complex64::new(x[re], im.map_or(0.0, |c| x[c]));
            if a >= b {
                z
            } else {
                z.conj()
            }
        });
        let z = DMatrix::from_fn(l.m_tilde, l.j, |r, c| {
            let (re, im) = l.z(r, c);
            Complex64::new(x[re], x[im])
        });
        let raw = &self.v_map * DVector::from_column_slice(&x[l.v0()..]);
        let mut v = vec![Complex64::new(raw[0], 0.0)];
        for n in 1..=l.d {
            v.push(Complex64::new(raw[2 * n - 1], raw[2 * n]));
        }
        let t = build_t(&v);
        let objective_value = self.program.c().iter().zip(x).map(|(c, x)| c * x).sum();
        AnmSolution {
            w,
            z,
            v,
            t,
            objective_value,
            status: sol.status,
            iterations: sol.iterations,
            residuals: sol.residuals,
            solve_seconds: sol.solve_seconds,
            log: sol.log,
        }
    }
}

/// Replaces columns `first..` of `A` by an orthonormal basis of their span,
/// `A_v = U Σ Vᵀ → U`, returning `G = V Σ⁻¹` with `x_v = G y`. The Q map's
/// interpolation weights are large and strongly correlated; an isometric
/// block keeps the operator-splitting iteration well conditioned.
fn whiten_columns(
    triplets: &[(usize, usize, f64)],
    c: &[f64],
    n_rows: usize,
    first: usize,
) -> (Vec<(usize, usize, f64)>, Vec<f64>, DMatrix<f64>) {
    let nv = c.len() - first;
    let mut rows: Vec<usize> = triplets.iter().filter(|t| t.1 >= first).map(|t| t.0).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut local = vec![usize::MAX; n_rows];
    for (i, &r) in rows.iter().enumerate() {
        local[r] = i;
    }
    let mut dense = DMatrix::<f64>::zeros(rows.len(), nv);
    let mut out = Vec::with_capacity(triplets.len());
    for &(r, col, v) in triplets {
        if col >= first {
            dense[(local[r], col - first)] += v;
        } else {
            out.push((r, col, v));
        }
    }
    let svd = dense.svd(true, true);
    let u = svd.u.expect("left vectors");
    let vt = svd.v_t.expect("right vectors");
    let smax = svd.singular_values.max();
    let inv: Vec<f64> = svd.singular_values.iter().map(|&s| 1.0 / s.max(1e-12 * smax)).collect();
    let g = DMatrix::from_fn(nv, nv, |i, k| vt[(k, i)] * inv[k]);
    for (i, &r) in rows.iter().enumerate() {
        for k in 0..nv {
            let val = u[(i, k)] * svd.singular_values[k] * inv[k];
            if val != 0.0 {
                out.push((r, first + k, val));
            }
        }
    }
    let mut c_new = c[..first].to_vec();
    let cv = DVector::from_column_slice(&c[first..]);
    c_new.extend((g.transpose() * cv).iter());
    (out, c_new, g)
}

fn tri_index(a: usize, b: usize) -> usize {
    a * (a + 1) / 2 + b
}

/// Forms of `Q_{a,b}` for `a ≥ b`, stored at `tri_index(a, b)`.
fn q_entry_forms(layout: &Layout, basis: &PswfBasis, grid: &VirtualGrid) -> Vec<EntryForm> {
    let n = grid.len();
    let d = layout.d;
    let mut forms = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        for b in 0..=a {
            let w = basis.interpolation_weights(grid.normalized_separation(a, b));
            let mut re = vec![(layout.v0(), w[d])];
            let mut im = Vec::with_capacity(d);
            for k in 1..=d {
                let (cr, ci) = layout.v(k);
                re.push((cr, w[d + k] + w[d - k]));
                im.push((ci, w[d + k] - w[d - k]));
            }
            forms.push(EntryForm { re, im });
        }
    }
    forms
}

/// Adds the real embedding of a Hermitian matrix inequality `H(x) ⪰ 0`.
fn push_hermitian_psd(
    triplets: &mut Vec<(usize, usize, f64)>,
    b: &mut Vec<f64>,
    cones: &mut Vec<Cone>,
    side: usize,
    entry: impl Fn(usize, usize) -> EntryForm,
) {
    let real_side = 2 * side;
    let offset = b.len();
    b.extend(std::iter::repeat_n(0.0, conic::psd_packed_len(real_side)));
    cones.push(Cone::Psd(real_side));
    // s = b − A x = pack([[Re H, −Im H], [Im H, Re H]])
    for col in 0..real_side {
        for row in col..real_side {
            let scale = if row == col { 1.0 } else { SQRT_2 };
            let (i, k) = (row % side, col % side);
            let e = entry(i, k);
            let (form, sign) = match (row < side, col < side) {
                (true, true) | (false, false) => (&e.re, 1.0),
                (false, true) => (&e.im, 1.0),
                (true, false) => unreachable!("lower triangle only"),
            };
            let r = offset + conic::psd_index(real_side, row, col);
            for &(var, coef) in form {
                triplets.push((r, var, -sign * scale * coef));
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnmSolution {
    pub w: DMatrix<Complex64>,
    pub z: DMatrix<Complex64>,
    /// `v_0` (real) through `v_d`.
    pub v: Vec<Complex64>,
    pub t: DMatrix<Complex64>,
    pub objective_value: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub residuals: Residuals,
    pub solve_seconds: f64,
    pub log: Vec<IterationRecord>,
}

impl AnmSolution {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Solved
    }

    pub fn iteration_log_csv(&self) -> String {
        conic::iteration_log_csv(&self.log)
    }
}

/// Solves the noiseless problem for the single atom `β a(f) cᵀ` and returns
/// the optimal objective, which should be close to `β`.
pub fn atomic_norm_upper_check(
    f: f64,
    beta: f64,
    c_vec: &[Complex64],
    grid: &VirtualGrid,
    basis: &PswfBasis,
    config: &SolverConfig,
) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter("beta must be positive".into()));
    }
    let norm = c_vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 || c_vec.len() != grid.n_bins() {
        return Err(Error::InvalidParameter("c must be a unit vector with one entry per bin".into()));
    }
    let a = general_steering(grid, f)?;
    let z = DMatrix::from_fn(grid.len(), grid.n_bins(), |r, col| a[r] * c_vec[col] * beta);
    let x = chi_apply(grid, &z)?;
    let problem = AnmProblem::assemble(&x, grid, basis, 0.0, AnmOptions::default())?;
    let sol = problem.solve(config)?;
    Ok(sol.objective_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_virtual_grid, ArrayGeometry};
    use crate::pswf::compute_basis;
    use std::f64::consts::PI;

    fn small_setup() -> (VirtualGrid, PswfBasis) {
        let g = ArrayGeometry::new(vec![0.0, 0.9, 2.3, 3.0]).unwrap();
        let grid = build_virtual_grid(&g, &[0.8, 1.0], None).unwrap();
        let basis = compute_basis(PI * grid.max_position(), 1e-4).unwrap();
        (grid, basis)
    }

    fn node_samples(f: f64, grid: &VirtualGrid, d: usize) -> Vec<Complex64> {
        let omega = 2.0 * PI * f * grid.max_position() / d as f64;
        (0..=d).map(|n| Complex64::from_polar(1.0, -omega * n as f64)).collect()
    }

    #[test]
    fn zero_coefficients_give_zero_q() {
        let (grid, basis) = small_setup();
        let v = vec![Complex64::new(0.0, 0.0); basis.d() + 1];
        assert!(compute_q(&v, &basis, &grid).unwrap().norm() == 0.0);
    }

    #[test]
    fn single_node_q_matches_the_exponential_kernel() {
        let (grid, basis) = small_setup();
        for &f in &[-0.5, -0.21, 0.0, 0.13, 0.37, 0.5] {
            let v = node_samples(f, &grid, basis.d());
            let q = compute_q(&v, &basis, &grid).unwrap();
            let mut worst: f64 = 0.0;
            for a in 0..grid.len() {
                for b in 0..grid.len() {
                    let exact = Complex64::from_polar(
                        1.0,
                        -2.0 * PI * f * (grid.positions()[a] - grid.positions()[b]),
                    );
                    worst = worst.max((q[(a, b)] - exact).norm());
                }
            }
            assert!(worst <= 10.0 * basis.epsilon(), "f = {f}: {worst}");
        }
    }

    #[test]
    fn q_is_hermitian_with_constant_diagonal() {
        let (grid, basis) = small_setup();
        let v: Vec<Complex64> = (0..=basis.d())
            .map(|n| if n == 0 { Complex64::new(1.3, 0.0) } else { Complex64::new(0.1 * n as f64, -0.05) })
            .collect();
        let q = compute_q(&v, &basis, &grid).unwrap();
        assert!((&q - q.adjoint()).norm() < 1e-12);
        for i in 0..grid.len() {
            assert!((q[(i, i)] - q[(0, 0)]).norm() < 1e-9);
        }
    }

    #[test]
    fn toeplitz_examples() {
        let t = build_t(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(t, DMatrix::identity(3, 3));
        let z = Complex64::from_polar(1.0, -0.7);
        let v: Vec<Complex64> = (0..4).map(|n| z.powu(n)).collect();
        let t = build_t(&v);
        let u = nalgebra::DVector::from_iterator(4, (0..4).map(|m| z.powu(m)));
        assert!((&t - &u * u.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn psi_is_linear_and_vanishes_at_zero() {
        let d = 4;
        let zero = DMatrix::<Complex64>::zeros(d + 1, d + 1);
        assert!(psi_of_t(&zero, 3.0, d).unwrap().norm() == 0.0);
        let t1 = build_t(&[Complex64::new(2.0, 0.0), Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4), Complex64::new(0.0, 0.1), Complex64::new(0.05, 0.0)]);
        let t2 = build_t(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, -0.6), Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.2), Complex64::new(-0.1, 0.3)]);
        let lhs = psi_of_t(&(&t1 * Complex64::new(0.7, 0.0) + &t2 * Complex64::new(-1.9, 0.0)), 3.0, d).unwrap();
        let rhs = psi_of_t(&t1, 3.0, d).unwrap() * Complex64::new(0.7, 0.0)
            + psi_of_t(&t2, 3.0, d).unwrap() * Complex64::new(-1.9, 0.0);
        assert!((lhs - rhs).norm() < 1e-12);
        assert!(psi_of_t(&zero, 3.0, d + 1).is_err());
    }

    #[test]
    fn in_band_nodes_satisfy_the_band_constraint() {
        let d = 10;
        let c = 12.0;
        let limit = c / d as f64;
        for k in 0..=20 {
            let omega = -limit + 2.0 * limit * k as f64 / 20.0;
            let z = Complex64::from_polar(1.0, -omega);
            let t = build_t(&(0..=d).map(|n| z.powu(n as u32)).collect::<Vec<_>>());
            let psi = psi_of_t(&t, c, d).unwrap();
            let min = psi.symmetric_eigenvalues().min();
            assert!(min > -1e-9, "omega = {omega}: {min}");
        }
        // just outside the band the constraint is violated
        let z = Complex64::from_polar(1.0, -(limit * 1.2));
        let t = build_t(&(0..=d).map(|n| z.powu(n as u32)).collect::<Vec<_>>());
        assert!(psi_of_t(&t, c, d).unwrap().symmetric_eigenvalues().min() < -1e-6);
    }

    #[test]
    fn assembled_program_encodes_a_feasible_atom() {
        // the true atom decomposition must satisfy every constraint: s(x) ∈ K
        let (grid, basis) = small_setup();
        let f = 0.17;
        let cv = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let a = general_steering(&grid, f).unwrap();
        let z = DMatrix::from_fn(grid.len(), 2, |r, col| a[r] * cv[col]);
        let x = chi_apply(&grid, &z).unwrap();
        let problem = AnmProblem::assemble(&x, &grid, &basis, 0.0, AnmOptions::default()).unwrap();
        let w = DMatrix::from_fn(2, 2, |i, j| cv[i].conj() * cv[j]);
        let v = node_samples(f, &grid, basis.d());
        let xv = problem.variables(&w, &z, &v).unwrap();
        let prog = problem.program();
        let mut ax = vec![0.0; prog.n_rows()];
        prog.a().mul_vec(&xv, &mut ax);
        let s: Vec<f64> = prog.b().iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut offset = 0;
        for cone in prog.cones() {
            let dim = cone.dim();
            let block = &s[offset..offset + dim];
            match cone {
                Cone::Psd(side) => {
                    let m = conic::unpack_psd(block, *side);
                    let min = m.symmetric_eigenvalues().min();
                    assert!(min > -1e-3, "psd block side {side}: {min}");
                }
                Cone::Zero(_) => assert!(block.iter().all(|v| v.abs() < 1e-12)),
                Cone::SecondOrder(_) => unreachable!(),
            }
            offset += dim;
        }
        let objective: f64 = prog.c().iter().zip(&xv).map(|(c, x)| c * x).sum();
        assert!((objective - 1.0).abs() < 1e-6, "{objective}");
    }

    #[test]
    fn assembly_validates_inputs() {
        let (grid, basis) = small_setup();
        let bad = DMatrix::<Complex64>::zeros(3, 2);
        assert!(AnmProblem::assemble(&bad, &grid, &basis, 0.0, AnmOptions::default()).is_err());
        let x = DMatrix::<Complex64>::zeros(4, 2);
        assert!(AnmProblem::assemble(&x, &grid, &basis, -1.0, AnmOptions::default()).is_err());
        let other = compute_basis(2.0, 1e-4).unwrap();
        assert!(AnmProblem::assemble(&x, &grid, &other, 0.0, AnmOptions::default()).is_err());
    }

    #[test]
    fn zero_sigma_uses_an_equality_block() {
        let (grid, basis) = small_setup();
        let x = DMatrix::<Complex64>::zeros(4, 2);
        let p = AnmProblem::assemble(&x, &grid, &basis, 0.0, AnmOptions::default()).unwrap();
        assert!(p.program().cones().contains(&Cone::Zero(16)));
        let p = AnmProblem::assemble(&x, &grid, &basis, 0.5, AnmOptions::default()).unwrap();
        assert!(p.program().cones().contains(&Cone::SecondOrder(17)));
    }

    #[test]
    fn single_bin_has_scalar_w() {
        let g = ArrayGeometry::new(vec![0.0, 1.0, 2.5]).unwrap();
        let grid = build_virtual_grid(&g, &[1.0], None).unwrap();
        let basis = compute_basis(PI * grid.max_position(), 1e-4).unwrap();
        let x = DMatrix::<Complex64>::zeros(3, 1);
        let p = AnmProblem::assemble(&x, &grid, &basis, 0.0, AnmOptions::default()).unwrap();
        assert_eq!(p.dimensions().0, 1);
        assert_eq!(p.block_side(), 4);
    }
}
