//! First-order conic solver.
//!
//! Solves
//!
//! ```text
//! minimize    cᵀx
//! subject to  A x + s = b,   s ∈ K = K_1 × … × K_p
//! ```
//!
//! where each `K_i` is a zero cone, a second-order cone `{(t, z) : ‖z‖ ≤ t}`
//! or a cone of real symmetric PSD matrices stored as a packed lower triangle
//! (column-major, off-diagonals scaled by √2 so the packing is an isometry).
//!
//! The method is Douglas–Rachford splitting applied to the homogeneous
//! self-dual embedding, with diagonal equilibration of `A`, an adaptive dual
//! step scale and over-relaxation. Every iteration costs one cached dense
//! Cholesky solve, two sparse products and one projection per cone.

use faer::linalg::solvers::Solve;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// `s = 0`
    Zero(usize),
    /// `(t, z)` with `‖z‖₂ ≤ t`; the dimension counts `t`.
    SecondOrder(usize),
    /// Real symmetric PSD matrices of the given side, packed.
    Psd(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Zero(n) | Cone::SecondOrder(n) => n,
            Cone::Psd(n) => psd_packed_len(n),
        }
    }
}

/// `n (n + 1) / 2`
pub fn psd_packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Packed position of entry `(i, j)`, `i ≥ j`, of a side-`n` symmetric matrix.
pub fn psd_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    j * (2 * n - j + 1) / 2 + (i - j)
}

/// Packs the lower triangle with √2-scaled off-diagonals.
pub fn pack_psd(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(psd_packed_len(n));
    for j in 0..n {
        out.push(m[(j, j)]);
        for i in j + 1..n {
            out.push(m[(i, j)] * std::f64::consts::SQRT_2);
        }
    }
    out
}

pub fn unpack_psd(v: &[f64], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for j in 0..n {
        m[(j, j)] = v[k];
        k += 1;
        for i in j + 1..n {
            let x = v[k] * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = x;
            m[(j, i)] = x;
            k += 1;
        }
    }
    m
}

/// Real embedding `[[Re H, -Im H], [Im H, Re H]]` of a Hermitian matrix.
pub fn realify(h: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::DimensionMismatch(format!("realify needs a square matrix, got {}x{}", n, h.ncols())));
    }
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let asym = (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if asym > 1e-12 * scale {
        return Err(Error::NotHermitian(asym));
    }
    Ok(DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    }))
}

/// Nearest PSD matrix in Frobenius norm.
pub fn project_psd(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigen("non-finite input to PSD projection".into()));
    }
    let packed = pack_psd(s);
    let mut out = packed.clone();
    let mut ws = PsdWorkspace::new(n);
    ws.project(&packed, &mut out)?;
    Ok(unpack_psd(&out, n))
}

/// Euclidean projection of `(z, t)` onto `{‖z‖ ≤ t}`.
pub fn project_soc(z: &[f64], t: f64) -> (Vec<f64>, f64) {
    let mut v = Vec::with_capacity(z.len() + 1);
    v.push(t);
    v.extend_from_slice(z);
    project_soc_in_place(&mut v);
    let t = v[0];
    (v.split_off(1), t)
}

fn project_soc_in_place(v: &mut [f64]) {
    let t = v[0];
    let norm = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= t {
        return;
    }
    if norm <= -t {
        v.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let alpha = 0.5 * (norm + t);
    v[0] = alpha;
    let k = alpha / norm;
    v[1..].iter_mut().for_each(|x| *x *= k);
}

struct PsdWorkspace {
    n: usize,
    mat: faer::Mat<f64>,
}

impl PsdWorkspace {
    fn new(n: usize) -> Self {
        Self { n, mat: faer::Mat::zeros(n, n) }
    }

    fn project(&mut self, input: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.n;
        if n == 1 {
            out[0] = input[0].max(0.0);
            return Ok(());
        }
        let mut k = 0;
        for j in 0..n {
            self.mat[(j, j)] = input[k];
            k += 1;
            for i in j + 1..n {
                let x = input[k] * std::f64::consts::FRAC_1_SQRT_2;
                self.mat[(i, j)] = x;
                self.mat[(j, i)] = x;
                k += 1;
            }
        }
        let evd = self
            .mat
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let vals = evd.S().column_vector();
        let vecs = evd.U();
        let n_pos = (0..n).filter(|&i| vals[i] > 0.0).count();
        if n_pos == 0 {
            out.iter_mut().for_each(|x| *x = 0.0);
            return Ok(());
        }
        if n_pos == n {
            out.copy_from_slice(input);
            return Ok(());
        }
        // Eigenvalues are ascending; rebuild from whichever side is smaller.
        let use_positive = n_pos <= n - n_pos;
        let cols: Vec<usize> = if use_positive { (n - n_pos..n).collect() } else { (0..n - n_pos).collect() };
        let mut factor = faer::Mat::<f64>::zeros(n, cols.len());
        for (c, &col) in cols.iter().enumerate() {
            let s = vals[col].abs().sqrt();
            for i in 0..n {
                factor[(i, c)] = vecs[(i, col)] * s;
            }
        }
        // Σ |λ| v vᵀ over the selected side
        let low_rank = &factor * factor.transpose();
        let mut k = 0;
        for j in 0..n {
            for i in j..n {
                let base = if use_positive { 0.0 } else { self.mat[(i, j)] };
                let val = if use_positive { low_rank[(i, j)] } else { base + low_rank[(i, j)] };
                out[k] = if i == j { val } else { val * std::f64::consts::SQRT_2 };
                k += 1;
            }
        }
        Ok(())
    }
}

/// Compressed sparse rows.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Duplicate entries are summed; explicit zeros are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite coefficient at ({r}, {c})")));
            }
            sorted.push((r, c, v));
        }
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows_of: Vec<usize> = Vec::with_capacity(sorted.len());
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("entry") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                rows_of.push(r);
                last = Some((r, c));
            }
        }
        // drop cancelled entries
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((c, v), r) in col_idx.into_iter().zip(values).zip(rows_of) {
            if v != 0.0 {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self { nrows, ncols, row_ptr, col_idx: keep_cols, values: keep_vals })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// `out = A x`
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            out[r] = acc;
        }
    }

    /// `out = Aᵀ y`
    pub fn mul_t_vec(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.nrows {
            let yr = y[r];
            if yr == 0.0 {
                continue;
            }
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[self.col_idx[k]] += self.values[k] * yr;
            }
        }
    }

    fn scale(&mut self, rows: &[f64], cols: &[f64]) {
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                self.values[k] *= rows[r] * cols[self.col_idx[k]];
            }
        }
    }

    /// Dense `AᵀA`.
    fn gram(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.ncols, self.ncols);
        for r in 0..self.nrows {
            let range = self.row_ptr[r]..self.row_ptr[r + 1];
            for a in range.clone() {
                let (ca, va) = (self.col_idx[a], self.values[a]);
                for b in range.clone() {
                    g[(ca, self.col_idx[b])] += va * self.values[b];
                }
            }
        }
        g
    }
}

/// `minimize cᵀx  s.t.  A x + s = b, s ∈ K`.
#[derive(Debug, Clone)]
pub struct ConicProgram {
    c: Vec<f64>,
    a: SparseMatrix,
    b: Vec<f64>,
    cones: Vec<Cone>,
}

impl ConicProgram {
    pub fn new(c: Vec<f64>, a: SparseMatrix, b: Vec<f64>, cones: Vec<Cone>) -> Result<Self> {
        let m: usize = cones.iter().map(Cone::dim).sum();
        if a.ncols() != c.len() {
            return Err(Error::DimensionMismatch(format!("A has {} columns but c has {}", a.ncols(), c.len())));
        }
        if a.nrows() != m || b.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "cones span {m} rows, A has {} and b has {}",
                a.nrows(),
                b.len()
            )));
        }
        if cones.iter().any(|k| matches!(k, Cone::SecondOrder(0) | Cone::Psd(0))) {
            return Err(Error::InvalidParameter("cones must have positive dimension".into()));
        }
        if c.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite program data".into()));
        }
        Ok(Self { c, a, b, cones })
    }

    pub fn n_variables(&self) -> usize {
        self.c.len()
    }

    pub fn n_rows(&self) -> usize {
        self.b.len()
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    /// Self-describing text dump: header, cone list, vectors, then `A` triplets.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# conic program: minimize c'x s.t. Ax + s = b, s in K");
        let _ = writeln!(out, "n_variables {}", self.n_variables());
        let _ = writeln!(out, "n_rows {}", self.n_rows());
        let _ = writeln!(out, "nnz {}", self.a.nnz());
        let _ = writeln!(out, "cones {}", self.cones.len());
        for k in &self.cones {
            match k {
                Cone::Zero(n) => writeln!(out, "zero {n}"),
                Cone::SecondOrder(n) => writeln!(out, "soc {n}"),
                Cone::Psd(n) => writeln!(out, "psd {n}"),
            }
            .ok();
        }
        let _ = writeln!(out, "c");
        for v in &self.c {
            let _ = writeln!(out, "{v:.17e}");
        }
        let _ = writeln!(out, "b");
        for v in &self.b {
            let _ = writeln!(out, "{v:.17e}");
        }
        let _ = writeln!(out, "A");
        for (r, c, v) in self.a.triplets() {
            let _ = writeln!(out, "{r} {c} {v:.17e}");
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub eps_primal: f64,
    pub eps_dual: f64,
    pub eps_gap: f64,
    /// Infeasibility certificate tolerance.
    pub eps_infeasible: f64,
    /// Over-relaxation in (0, 2).
    pub alpha: f64,
    /// Diagonal equilibration of `A`.
    pub scaling: bool,
    /// Initial dual step scale; adapted during the run when `adaptive_scale`.
    pub scale: f64,
    pub adaptive_scale: bool,
    /// Primal proximal weight.
    pub rho_x: f64,
    /// Residuals are evaluated every `check_interval` iterations.
    pub check_interval: usize,
    /// Record residuals at every check.
    pub log: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            eps_primal: 1e-6,
            eps_dual: 1e-6,
            eps_gap: 1e-6,
            eps_infeasible: 1e-7,
            alpha: 1.5,
            scaling: true,
            scale: 0.1,
            adaptive_scale: true,
            rho_x: 1e-6,
            check_interval: 10,
            log: false,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerance(mut self, eps: f64) -> Self {
        self.eps_primal = eps;
        self.eps_dual = eps;
        self.eps_gap = eps;
        self
    }

    fn validate(&self) -> Result<()> {
        let tols = [self.eps_primal, self.eps_dual, self.eps_gap, self.eps_infeasible];
        if tols.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::InvalidParameter("solver tolerances must be positive".into()));
        }
        if self.max_iterations == 0 || self.check_interval == 0 {
            return Err(Error::InvalidParameter("iteration limits must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::InvalidParameter("relaxation must lie in (0, 2)".into()));
        }
        if !(self.scale > 0.0 && self.rho_x > 0.0) {
            return Err(Error::InvalidParameter("scale and rho_x must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    /// Iteration budget exhausted; the returned point is the best iterate seen.
    MaxIterations,
    PrimalInfeasible,
    /// Unbounded objective.
    DualInfeasible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `‖A x + s - b‖∞`
    pub primal: f64,
    /// `‖Aᵀ y + c‖∞`
    pub dual: f64,
    /// `|cᵀx + bᵀy|`
    pub gap: f64,
    /// Distance of `s` from `K` plus distance of `y` from `K*`.
    pub cone: f64,
    pub primal_scale: f64,
    pub dual_scale: f64,
    pub gap_scale: f64,
}

impl Residuals {
    /// Relative test used for termination: `r ≤ eps (1 + scale)`.
    pub fn within(&self, config: &SolverConfig) -> bool {
        self.primal <= config.eps_primal * (1.0 + self.primal_scale)
            && self.dual <= config.eps_dual * (1.0 + self.dual_scale)
            && self.gap <= config.eps_gap * (1.0 + self.gap_scale)
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub residuals: Residuals,
    pub solve_seconds: f64,
    pub log: Vec<IterationRecord>,
}

impl Solution {
    /// Recomputes residuals from `(x, y, s)` alone.
    pub fn verify(&self, program: &ConicProgram) -> Residuals {
        residuals(program, &self.x, &self.y, &self.s)
    }

    pub fn iteration_log_csv(&self) -> String {
        iteration_log_csv(&self.log)
    }
}

pub fn iteration_log_csv(log: &[IterationRecord]) -> String {
    let mut out = String::from("iteration,primal_res,dual_res,gap,objective\n");
    for r in log {
        let _ = writeln!(
            out,
            "{},{:.6e},{:.6e},{:.6e},{:.12e}",
            r.iteration, r.primal_residual, r.dual_residual, r.gap, r.objective
        );
    }
    out
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residuals of an unscaled primal–dual point.
pub fn residuals(program: &ConicProgram, x: &[f64], y: &[f64], s: &[f64]) -> Residuals {
    let m = program.n_rows();
    let n = program.n_variables();
    let mut ax = vec![0.0; m];
    program.a.mul_vec(x, &mut ax);
    let pr: Vec<f64> = (0..m).map(|i| ax[i] + s[i] - program.b[i]).collect();
    let mut aty = vec![0.0; n];
    program.a.mul_t_vec(y, &mut aty);
    let dr: Vec<f64> = (0..n).map(|j| aty[j] + program.c[j]).collect();
    let cx = dot(&program.c, x);
    let by = dot(&program.b, y);
    Residuals {
        primal: inf_norm(&pr),
        dual: inf_norm(&dr),
        gap: (cx + by).abs(),
        cone: cone_distance(&program.cones, s, false) + cone_distance(&program.cones, y, true),
        primal_scale: inf_norm(&ax).max(inf_norm(s)).max(inf_norm(&program.b)),
        dual_scale: inf_norm(&aty).max(inf_norm(&program.c)),
        gap_scale: cx.abs().max(by.abs()),
    }
}

/// Euclidean distance of `v` to `K` (or `K*` when `dual`).
fn cone_distance(cones: &[Cone], v: &[f64], dual: bool) -> f64 {
    let mut proj = v.to_vec();
    let mut offset = 0;
    let mut sq = 0.0;
    for cone in cones {
        let dim = cone.dim();
        let block = &mut proj[offset..offset + dim];
        match *cone {
            Cone::Zero(_) => {
                if !dual {
                    block.iter_mut().for_each(|x| *x = 0.0);
                }
            }
            Cone::SecondOrder(_) => project_soc_in_place(block),
            Cone::Psd(side) => {
                let input = block.to_vec();
                if PsdWorkspace::new(side).project(&input, block).is_err() {
                    return f64::INFINITY;
                }
            }
        }
        sq += block.iter().zip(&v[offset..offset + dim]).map(|(p, x)| (p - x).powi(2)).sum::<f64>();
        offset += dim;
    }
    sq.sqrt()
}

struct Scaled {
    a: SparseMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    e: Vec<f64>,
    sc_b: f64,
    sc_c: f64,
}

fn equilibrate(program: &ConicProgram, enabled: bool) -> Scaled {
    let m = program.n_rows();
    let n = program.n_variables();
    let mut a = program.a.clone();
    let mut d = vec![1.0; m];
    let mut e = vec![1.0; n];
    if enabled {
        for _ in 0..15 {
            let mut row_norm = vec![0.0f64; m];
            let mut col_norm = vec![0.0f64; n];
            for (r, c, v) in a.triplets() {
                row_norm[r] = row_norm[r].max(v.abs());
                col_norm[c] = col_norm[c].max(v.abs());
            }
            // a single factor per SOC / PSD block keeps the cone invariant
            let mut offset = 0;
            for cone in &program.cones {
                let dim = cone.dim();
                if !matches!(cone, Cone::Zero(_)) {
                    let block = &mut row_norm[offset..offset + dim];
                    let mean = block.iter().sum::<f64>() / dim as f64;
                    block.iter_mut().for_each(|x| *x = mean);
                }
                offset += dim;
            }
            let dr: Vec<f64> = row_norm.iter().map(|&x| clamp_scale(1.0 / x.sqrt())).collect();
            let ec: Vec<f64> = col_norm.iter().map(|&x| clamp_scale(1.0 / x.sqrt())).collect();
            a.scale(&dr, &ec);
            d.iter_mut().zip(&dr).for_each(|(x, y)| *x *= y);
            e.iter_mut().zip(&ec).for_each(|(x, y)| *x *= y);
        }
        for v in d.iter_mut().chain(e.iter_mut()) {
            *v = v.clamp(1e-6, 1e6);
        }
        // recompute from the clamped totals
        a = program.a.clone();
        a.scale(&d, &e);
    }
    let b: Vec<f64> = program.b.iter().zip(&d).map(|(b, d)| b * d).collect();
    let c: Vec<f64> = program.c.iter().zip(&e).map(|(c, e)| c * e).collect();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nc = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sc_b = if enabled { 1.0 / nb.max(1e-4).min(1e4) } else { 1.0 };
    let sc_c = if enabled { 1.0 / nc.max(1e-4).min(1e4) } else { 1.0 };
    let b = b.into_iter().map(|x| x * sc_b).collect();
    let c = c.into_iter().map(|x| x * sc_c).collect();
    Scaled { a, b, c, d, e, sc_b, sc_c }
}

fn clamp_scale(x: f64) -> f64 {
    if x.is_finite() {
        x.clamp(1e-4, 1e4)
    } else {
        1.0
    }
}

/// Cholesky factorization of an SPD matrix, split into the connected
/// components of its sparsity graph.
struct BlockLlt {
    scalars: Vec<(usize, f64)>,
    blocks: Vec<(Vec<usize>, faer::linalg::solvers::Llt<f64>)>,
}

impl BlockLlt {
    fn new(k: &DMatrix<f64>) -> Result<Self> {
        let n = k.nrows();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for j in 0..n {
            for i in j + 1..n {
                if k[(i, j)] != 0.0 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            members.entry(root).or_default().push(i);
        }
        let mut out = Self { scalars: Vec::new(), blocks: Vec::new() };
        for idx in members.into_values() {
            if idx.len() == 1 {
                let d = k[(idx[0], idx[0])];
                if !(d > 0.0) {
                    return Err(Error::Solver("KKT factorization: non-positive pivot".into()));
                }
                out.scalars.push((idx[0], 1.0 / d));
                continue;
            }
            let sub = faer::Mat::<f64>::from_fn(idx.len(), idx.len(), |i, j| k[(idx[i], idx[j])]);
            let llt = sub.llt(faer::Side::Lower).map_err(|e| Error::Solver(format!("KKT factorization: {e:?}")))?;
            out.blocks.push((idx, llt));
        }
        Ok(out)
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        for &(i, inv) in &self.scalars {
            x[i] *= inv;
        }
        for (idx, llt) in &self.blocks {
            let mut rhs = faer::Mat::<f64>::from_fn(idx.len(), 1, |i, _| x[idx[i]]);
            llt.solve_in_place(&mut rhs);
            for (i, &r) in idx.iter().enumerate() {
                x[r] = rhs[(i, 0)];
            }
        }
    }
}

/// Cached factorization of `ρ_x I + Aᵀ R_y⁻¹ A` for the current scale.
struct LinearSystem {
    llt: BlockLlt,
    /// `R_y` diagonal
    ry: Vec<f64>,
    rho_x: f64,
    /// `(R̂ + M̂)⁻¹ h`
    g: Vec<f64>,
    /// `1 + hᵀ g`
    denom: f64,
}

impl LinearSystem {
    fn new(scaled: &Scaled, ry: Vec<f64>, rho_x: f64) -> Result<Self> {
        let n = scaled.c.len();
        // (ρ_x I + Aᵀ R_y⁻¹ A)
        let mut weighted = scaled.a.clone();
        let inv_sqrt: Vec<f64> = ry.iter().map(|r| 1.0 / r.sqrt()).collect();
        weighted.scale(&inv_sqrt, &vec![1.0; n]);
        let mut k = weighted.gram();
        for i in 0..n {
            k[(i, i)] += rho_x;
        }
        let llt = BlockLlt::new(&k)?;
        let mut sys = Self { llt, ry, rho_x, g: Vec::new(), denom: 1.0 };
        let mut h = scaled.c.clone();
        h.extend_from_slice(&scaled.b);
        // (R̂ + M̂) g = h, without the R̂ weighting of the right-hand side
        let g = sys.solve_raw(&scaled.a, &h[..n], &h[n..]);
        sys.denom = 1.0 + dot(&h, &g);
        sys.g = g;
        Ok(sys)
    }

    /// Solves `[[ρ_x I, Aᵀ], [-A, R_y]] [x; y] = [rx; ry]`.
    fn solve_raw(&self, a: &SparseMatrix, rx: &[f64], ry_rhs: &[f64]) -> Vec<f64> {
        let n = rx.len();
        let m = ry_rhs.len();
        // x = (ρ_x I + Aᵀ R⁻¹ A)⁻¹ (rx - Aᵀ R⁻¹ ry)
        let scaled_ry: Vec<f64> = ry_rhs.iter().zip(&self.ry).map(|(v, r)| v / r).collect();
        let mut at = vec![0.0; n];
        a.mul_t_vec(&scaled_ry, &mut at);
        let mut x: Vec<f64> = (0..n).map(|i| rx[i] - at[i]).collect();
        self.llt.solve_in_place(&mut x);
        // y = R⁻¹ (ry + A x)
        let mut ax = vec![0.0; m];
        a.mul_vec(&x, &mut ax);
        let mut out = x;
        out.extend((0..m).map(|i| (ry_rhs[i] + ax[i]) / self.ry[i]));
        out
    }
}

fn dual_weights(cones: &[Cone], scale: f64) -> Vec<f64> {
    let mut ry = Vec::new();
    for cone in cones {
        let w = match cone {
            Cone::Zero(_) => 1.0 / (1000.0 * scale),
            _ => 1.0 / scale,
        };
        ry.extend(std::iter::repeat_n(w, cone.dim()));
    }
    ry
}

/// Projects `v` (the `y` block) onto `K*`.
fn project_dual_cone(cones: &[Cone], ws: &mut [Option<PsdWorkspace>], v: &mut [f64], buf: &mut Vec<f64>) -> Result<()> {
    let mut offset = 0;
    for (cone, w) in cones.iter().zip(ws.iter_mut()) {
        let dim = cone.dim();
        let block = &mut v[offset..offset + dim];
        match cone {
            Cone::Zero(_) => {}
            Cone::SecondOrder(_) => project_soc_in_place(block),
            Cone::Psd(_) => {
                buf.clear();
                buf.extend_from_slice(block);
                w.as_mut().expect("workspace").project(buf, block)?;
            }
        }
        offset += dim;
    }
    Ok(())
}

/// Runs the solver. Malformed configurations are errors; infeasibility and
/// non-convergence are reported through [`SolveStatus`].
pub fn solve(program: &ConicProgram, config: &SolverConfig) -> Result<Solution> {
    config.validate()?;
    let start = Instant::now();
    let n = program.n_variables();
    let m = program.n_rows();
    let scaled = equilibrate(program, config.scaling);
    let cones = &program.cones;
    let mut psd_ws: Vec<Option<PsdWorkspace>> =
        cones.iter().map(|k| if let Cone::Psd(s) = k { Some(PsdWorkspace::new(*s)) } else { None }).collect();

    let mut scale = config.scale;
    let mut sys = LinearSystem::new(&scaled, dual_weights(cones, scale), config.rho_x)?;

    let total = n + m + 1;
    let mut w = vec![0.0; total];
    w[total - 1] = 1.0;
    let mut u_tilde = vec![0.0; total];
    let mut u = vec![0.0; total];
    let mut rhs_x = vec![0.0; n];
    let mut rhs_y = vec![0.0; m];
    let mut proj_buf = Vec::new();
    let mut h = scaled.c.clone();
    h.extend_from_slice(&scaled.b);

    let mut best: Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>, Residuals)> = None;
    let mut log = Vec::new();
    let mut last_scale_update = 0usize;
    let mut pending_scale: Option<f64> = None;
    let mut ratio_log_sum = 0.0;
    let mut ratio_count = 0usize;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;

    let mut result_point: Option<(Vec<f64>, Vec<f64>, Vec<f64>, Residuals)> = None;

    for k in 0..config.max_iterations {
        iterations = k + 1;
        // ũ = (R + M)⁻¹ R w
        for i in 0..n {
            rhs_x[i] = sys.rho_x * w[i];
        }
        for i in 0..m {
            rhs_y[i] = sys.ry[i] * w[n + i];
        }
        let p = sys.solve_raw(&scaled.a, &rhs_x, &rhs_y);
        let w_tau = w[total - 1];
        let tau = (w_tau + dot(&h, &p)) / sys.denom;
        for i in 0..n + m {
            u_tilde[i] = p[i] - tau * sys.g[i];
        }
        u_tilde[total - 1] = tau;

        // u = Π_C(2ũ - w)
        for i in 0..total {
            u[i] = 2.0 * u_tilde[i] - w[i];
        }
        project_dual_cone(cones, &mut psd_ws, &mut u[n..n + m], &mut proj_buf)?;
        u[total - 1] = u[total - 1].max(0.0);

        let check = (k + 1) % config.check_interval == 0 || k + 1 == config.max_iterations;
        if check {
            // v = R (u + w - 2ũ)
            let mut v_y = vec![0.0; m];
            for i in 0..m {
                v_y[i] = sys.ry[i] * (u[n + i] + w[n + i] - 2.0 * u_tilde[n + i]);
            }
            let kappa = u[total - 1] + w[total - 1] - 2.0 * u_tilde[total - 1];
            let tau_u = u[total - 1];

            if tau_u > 1e-12 * kappa.max(1.0) || tau_u > 1e-12 {
                let (x, y, s) = unscale(&scaled, &u[..n], &u[n..n + m], &v_y, tau_u);
                let res = residuals(program, &x, &y, &s);
                let obj = dot(&program.c, &x);
                if config.log {
                    log.push(IterationRecord {
                        iteration: k + 1,
                        primal_residual: res.primal,
                        dual_residual: res.dual,
                        gap: res.gap,
                        objective: obj,
                    });
                }
                let merit = (res.primal / (1.0 + res.primal_scale))
                    .max(res.dual / (1.0 + res.dual_scale))
                    .max(res.gap / (1.0 + res.gap_scale));
                if res.within(config) {
                    status = SolveStatus::Solved;
                    result_point = Some((x, y, s, res));
                    break;
                }
                if best.as_ref().is_none_or(|b| merit < b.0) {
                    best = Some((merit, x, y, s, res));
                }

                if config.adaptive_scale {
                    // the ratio swings right after a change, so average its log over the window
                    let pr = res.primal / (1.0 + res.primal_scale);
                    let dr = res.dual / (1.0 + res.dual_scale);
                    let log_ratio = (pr.max(1e-300) / dr.max(1e-300)).ln();
                    if log_ratio.is_finite() {
                        ratio_log_sum += log_ratio;
                        ratio_count += 1;
                    }
                    if k + 1 - last_scale_update >= 100 && ratio_count > 0 {
                        let ratio = (0.5 * ratio_log_sum / ratio_count as f64).exp();
                        if !(0.2..=5.0).contains(&ratio) {
                            let new_scale = (scale * ratio).clamp(1e-6, 1e6);
                            if new_scale != scale {
                                pending_scale = Some(new_scale);
                            }
                        }
                    }
                }
            } else if let Some(cert) = certificate(program, &scaled, &u[..n], &u[n..n + m], &v_y, config) {
                status = cert.0;
                result_point = Some((cert.1, cert.2, cert.3, cert.4));
                break;
            }
        }

        // w ← w + α (u - ũ)
        for i in 0..total {
            w[i] += config.alpha * (u[i] - u_tilde[i]);
        }

        if let Some(new_scale) = pending_scale.take() {
            // R (w - u) estimates M u, which does not depend on R; keep it fixed
            let new_ry = dual_weights(cones, new_scale);
            for i in 0..m {
                w[n + i] = u[n + i] + sys.ry[i] / new_ry[i] * (w[n + i] - u[n + i]);
            }
            scale = new_scale;
            sys = LinearSystem::new(&scaled, new_ry, config.rho_x)?;
            last_scale_update = k + 1;
            ratio_log_sum = 0.0;
            ratio_count = 0;
        }
    }

    let (x, y, s, res) = match result_point {
        Some(p) => p,
        None => match best {
            Some((_, x, y, s, r)) => (x, y, s, r),
            None => {
                let x = vec![0.0; n];
                let y = vec![0.0; m];
                let s = vec![0.0; m];
                let r = residuals(program, &x, &y, &s);
                (x, y, s, r)
            }
        },
    };
    Ok(Solution {
        status,
        primal_objective: dot(&program.c, &x),
        dual_objective: -dot(&program.b, &y),
        x,
        y,
        s,
        iterations,
        residuals: res,
        solve_seconds: start.elapsed().as_secs_f64(),
        log,
    })
}

fn unscale(scaled: &Scaled, ux: &[f64], uy: &[f64], vy: &[f64], tau: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let x = ux.iter().zip(&scaled.e).map(|(x, e)| x * e / (scaled.sc_b * tau)).collect();
    let y = uy.iter().zip(&scaled.d).map(|(y, d)| y * d / (scaled.sc_c * tau)).collect();
    let s = vy.iter().zip(&scaled.d).map(|(s, d)| s / (d * scaled.sc_b * tau)).collect();
    (x, y, s)
}

type Certificate = (SolveStatus, Vec<f64>, Vec<f64>, Vec<f64>, Residuals);

/// Checks the homogeneous iterate for infeasibility / unboundedness rays.
fn certificate(
    program: &ConicProgram,
    scaled: &Scaled,
    ux: &[f64],
    uy: &[f64],
    vy: &[f64],
    config: &SolverConfig,
) -> Option<Certificate> {
    let n = program.n_variables();
    let m = program.n_rows();
    let (x, y, s) = unscale(scaled, ux, uy, vy, 1.0);
    let by = dot(&program.b, &y);
    if by < 0.0 {
        let mut aty = vec![0.0; n];
        program.a.mul_t_vec(&y, &mut aty);
        if inf_norm(&aty) / -by < config.eps_infeasible {
            let y: Vec<f64> = y.iter().map(|v| v / -by).collect();
            let res = residuals(program, &vec![0.0; n], &y, &vec![0.0; m]);
            return Some((SolveStatus::PrimalInfeasible, vec![0.0; n], y, vec![0.0; m], res));
        }
    }
    let cx = dot(&program.c, &x);
    if cx < 0.0 {
        let mut ax = vec![0.0; m];
        program.a.mul_vec(&x, &mut ax);
        let r: Vec<f64> = ax.iter().zip(&s).map(|(a, s)| a + s).collect();
        if inf_norm(&r) / -cx < config.eps_infeasible {
            let x: Vec<f64> = x.iter().map(|v| v / -cx).collect();
            let s: Vec<f64> = s.iter().map(|v| v / -cx).collect();
            let res = residuals(program, &x, &vec![0.0; m], &s);
            return Some((SolveStatus::DualInfeasible, x, vec![0.0; m], s, res));
        }
    }
    None
}
