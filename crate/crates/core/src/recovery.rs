//! Frequency recovery from the optimal Toeplitz matrix and the end-to-end
//! gridless wideband estimator.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::anm::{AnmOptions, AnmProblem, AnmSolution};
use crate::conic::SolverConfig;
use crate::error::{Error, Result};
use crate::geometry::{build_virtual_grid, ArrayGeometry, VirtualGrid};
use crate::pswf::{compute_basis, PswfBasis, DEFAULT_EPSILON};
use crate::signal::BinnedSnapshot;

/// `λ_{K+1}/λ_K` at or above this marks `T` as not clearly rank `K`.
pub const RANK_RATIO_GUARD: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct DoaEstimate {
    pub frequencies: Vec<f64>,
    pub thetas_deg: Vec<f64>,
    pub powers: Vec<f64>,
}

impl DoaEstimate {
    /// Sorts by angle.
    pub fn new(frequencies: Vec<f64>, powers: Vec<f64>) -> Result<Self> {
        if frequencies.len() != powers.len() {
            return Err(Error::DimensionMismatch("one power per frequency is required".into()));
        }
        let mut pairs: Vec<(f64, f64)> = frequencies.into_iter().zip(powers).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let thetas_deg = pairs.iter().map(|p| freq_to_theta(p.0)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            frequencies: pairs.iter().map(|p| p.0).collect(),
            thetas_deg,
            powers: pairs.into_iter().map(|p| p.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.thetas_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas_deg.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct NodeExtraction {
    /// Unit-modulus nodes.
    pub nodes: Vec<Complex64>,
    /// Moduli before renormalization.
    pub raw_moduli: Vec<f64>,
    /// Eigenvalues of `T`, descending.
    pub eigenvalues: Vec<f64>,
    /// `λ_{K+1}/λ_K`, or 0 when `K = d + 1`.
    pub rank_ratio: f64,
    pub rank_warning: bool,
}

/// Matrix pencil on the dominant `K`-dimensional eigenspace of `T`.
pub fn extract_nodes(t: &DMatrix<Complex64>, k: usize) -> Result<NodeExtraction> {
    let n = t.nrows();
    if t.ncols() != n || n < 2 {
        return Err(Error::DimensionMismatch("T must be square with side at least 2".into()));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("K = {k} must be in 1..={}", n - 1)));
    }
    let asym = (t - t.adjoint()).norm();
    if asym > 1e-8 * t.norm().max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    let herm = (t + t.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let rank_ratio = if eigenvalues[k - 1] > 0.0 {
        eigenvalues[k].max(0.0) / eigenvalues[k - 1]
    } else {
        f64::INFINITY
    };

    let u = DMatrix::from_fn(n, k, |r, c| eig.eigenvectors[(r, order[c])]);
    let u1 = u.rows(0, n - 1).into_owned();
    let u2 = u.rows(1, n - 1).into_owned();
    let pencil = u1
        .svd(true, true)
        .solve(&u2, 1e-14)
        .map_err(|e| Error::Eigen(format!("matrix pencil least squares: {e}")))?;
    let nodes_raw = Schur::new(pencil)
        .eigenvalues()
        .ok_or_else(|| Error::Eigen("pencil eigenvalues did not converge".into()))?;
    let raw_moduli: Vec<f64> = nodes_raw.iter().map(|z| z.norm()).collect();
    let nodes = nodes_raw
        .iter()
        .map(|z| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) })
        .collect();
    Ok(NodeExtraction {
        nodes,
        raw_moduli,
        eigenvalues,
        rank_ratio,
        rank_warning: !(rank_ratio < RANK_RATIO_GUARD),
    })
}

/// Least-squares amplitudes `p` with `T e_1 ≈ Σ p_k u(z_k)`.
pub fn vandermonde_powers(t: &DMatrix<Complex64>, nodes: &[Complex64]) -> Result<Vec<f64>> {
    let n = t.nrows();
    let v = DMatrix::from_fn(n, nodes.len(), |m, k| nodes[k].powu(m as u32));
    let rhs = DVector::from_iterator(n, t.column(0).iter().copied());
    let p = v
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Eigen(format!("Vandermonde least squares: {e}")))?;
    Ok(p.iter().map(|z| z.re).collect())
}

/// Frequencies `-arg(z) d / (2π r̃_max)`, clipped to `[-1/2, 1/2]`, and
/// whether any needed clipping.
pub fn nodes_to_frequencies(nodes: &[Complex64], grid: &VirtualGrid, basis: &PswfBasis) -> (Vec<f64>, bool) {
    nodes_to_frequencies_raw(nodes, grid.max_position(), basis.d())
}

fn nodes_to_frequencies_raw(nodes: &[Complex64], r_max: f64, d: usize) -> (Vec<f64>, bool) {
    let scale = d as f64 / (2.0 * PI * r_max);
    let mut aliased = false;
    let f = nodes
        .iter()
        .map(|z| {
            let f = -z.arg() * scale;
            if f.abs() > 0.5 {
                aliased = true;
            }
            f.clamp(-0.5, 0.5)
        })
        .collect();
    (f, aliased)
}

/// `θ = arcsin(2f)` in degrees.
pub fn freq_to_theta(f: f64) -> Result<f64> {
    if !(f.abs() <= 0.5) {
        return Err(Error::FrequencyOutOfRange(f));
    }
    Ok((2.0 * f).asin().to_degrees())
}

#[derive(Debug, Clone)]
pub struct SrwConfig {
    pub epsilon: f64,
    pub options: AnmOptions,
    pub solver: SolverConfig,
    /// Multiplies the noise bound handed to the SDP.
    pub eta: f64,
    pub dedup_tolerance: Option<f64>,
}

impl Default for SrwConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            options: AnmOptions::default(),
            solver: SolverConfig::default(),
            eta: 1.0,
            dedup_tolerance: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SrwResult {
    pub estimate: DoaEstimate,
    pub solution: AnmSolution,
    pub extraction: NodeExtraction,
    pub aliased: bool,
    pub d: usize,
    pub m_tilde: usize,
}

impl SrwResult {
    pub fn warnings(&self) -> bool {
        self.extraction.rank_warning || self.aliased || !self.solution.converged()
    }
}

/// Virtual grid and PSWF basis for a snapshot's bins.
pub fn prepare(
    geometry: &ArrayGeometry,
    snapshot: &BinnedSnapshot,
    config: &SrwConfig,
) -> Result<(VirtualGrid, PswfBasis)> {
    let grid = build_virtual_grid(geometry, &snapshot.alphas, config.dedup_tolerance)?;
    let basis = compute_basis(PI * grid.max_position(), config.epsilon)?;
    Ok((grid, basis))
}

/// Solves the wideband atomic norm problem for `snapshot` with noise bound
/// `σ` and returns `K` directions.
pub fn srw_doa(
    geometry: &ArrayGeometry,
    snapshot: &BinnedSnapshot,
    k: usize,
    sigma: f64,
    config: &SrwConfig,
) -> Result<SrwResult> {
    let (grid, basis) = prepare(geometry, snapshot, config)?;
    srw_doa_with(&grid, &basis, snapshot, k, sigma, config)
}

/// [`srw_doa`] with a precomputed grid and basis.
pub fn srw_doa_with(
    grid: &VirtualGrid,
    basis: &PswfBasis,
    snapshot: &BinnedSnapshot,
    k: usize,
    sigma: f64,
    config: &SrwConfig,
) -> Result<SrwResult> {
    if !(config.eta > 0.0) {
        return Err(Error::InvalidParameter("eta must be positive".into()));
    }
    let problem = AnmProblem::assemble(&snapshot.x, grid, basis, config.eta * sigma, config.options)?;
    let solution = problem.solve(&config.solver)?;
    let extraction = extract_nodes(&solution.t, k)?;
    let (frequencies, aliased) = nodes_to_frequencies(&extraction.nodes, grid, basis);
    let powers = vandermonde_powers(&solution.t, &extraction.nodes)?;
    let estimate = DoaEstimate::new(frequencies, powers)?;
    Ok(SrwResult { estimate, solution, extraction, aliased, d: basis.d(), m_tilde: grid.len() })
}
