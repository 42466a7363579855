//! Subspace baselines on a segmented time record: incoherent per-bin MUSIC
//! averaging (ISSM) and rotational signal subspace focusing (RSS).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{spatial_frequency, ArrayGeometry};
use crate::recovery::DoaEstimate;
use crate::signal::{select_bins, WidebandParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentConfig {
    pub n_segments: usize,
    pub segment_len: usize,
    /// Degrees.
    pub grid_step: f64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self { n_segments: 16, segment_len: 64, grid_step: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSpectrum {
    pub angles_deg: Vec<f64>,
    pub values: Vec<f64>,
}

impl SpatialSpectrum {
    /// `K` largest local maxima, refined by a parabola through the peak and
    /// its neighbours; missing peaks are filled with the largest remaining
    /// grid points.
    pub fn peaks(&self, k: usize) -> Vec<(f64, f64)> {
        let v = &self.values;
        let n = v.len();
        let mut cand: Vec<usize> = (0..n)
            .filter(|&i| {
                let left = i == 0 || v[i] > v[i - 1];
                let right = i + 1 == n || v[i] >= v[i + 1];
                left && right
            })
            .collect();
        cand.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
        cand.truncate(k);
        if cand.len() < k {
            let mut rest: Vec<usize> = (0..n).filter(|i| !cand.contains(i)).collect();
            rest.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
            cand.extend(rest.into_iter().take(k - cand.len()));
        }
        cand.into_iter()
            .map(|i| {
                if i == 0 || i + 1 == n {
                    return (self.angles_deg[i], v[i]);
                }
                let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
                let denom = a - 2.0 * b + c;
                let shift = if denom < 0.0 { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) } else { 0.0 };
                let step = self.angles_deg[i + 1] - self.angles_deg[i];
                (self.angles_deg[i] + shift * step, b - 0.25 * (a - c) * shift)
            })
            .collect()
    }

    fn estimate(&self, k: usize) -> Result<DoaEstimate> {
        let peaks = self.peaks(k);
        DoaEstimate::new(peaks.iter().map(|p| spatial_frequency(p.0)).collect(), peaks.iter().map(|p| p.1).collect())
    }
}

/// Per-bin sample covariances over overlapping segments.
#[derive(Debug, Clone)]
pub struct BinCovariances {
    pub frequencies: Vec<f64>,
    pub covariances: Vec<DMatrix<Complex64>>,
    pub n_snapshots: usize,
}

/// Segments `record` (`M × N`), takes each segment's DFT bins nearest the
/// selected bin frequencies (deduplicated) and averages their outer products.
pub fn bin_covariances(record: &DMatrix<Complex64>, params: &WidebandParams, cfg: &SegmentConfig) -> Result<BinCovariances> {
    let (m, n) = record.shape();
    let len = cfg.segment_len;
    let s = cfg.n_segments;
    if len == 0 || len > n || s == 0 {
        return Err(Error::InvalidParameter(format!("cannot cut {s} segments of {len} samples from {n}")));
    }
    if s < m {
        return Err(Error::InsufficientSnapshots(format!("{s} segments for {m} sensors")));
    }
    let hop = if s > 1 { (n - len) / (s - 1) } else { 0 };
    let width = params.sample_rate / len as f64;
    let mut bins: Vec<usize> = select_bins(params)?.iter().map(|f| (f / width).round() as usize).collect();
    bins.dedup();
    let fft = FftPlanner::new().plan_fft_forward(len);
    let mut cov = vec![DMatrix::<Complex64>::zeros(m, m); bins.len()];
    let mut spectra = vec![vec![Complex64::new(0.0, 0.0); len]; m];
    for seg in 0..s {
        let start = seg * hop;
        for (i, row) in spectra.iter_mut().enumerate() {
            for t in 0..len {
                row[t] = record[(i, start + t)];
            }
            fft.process(row);
        }
        for (b, &k) in bins.iter().enumerate() {
            let x = DVector::from_iterator(m, spectra.iter().map(|row| row[k]));
            cov[b] += &x * x.adjoint();
        }
    }
    for c in &mut cov {
        *c /= Complex64::new(s as f64, 0.0);
    }
    Ok(BinCovariances {
        frequencies: bins.iter().map(|&k| k as f64 * width).collect(),
        covariances: cov,
        n_snapshots: s,
    })
}

fn steering(geometry: &ArrayGeometry, alpha: f64, theta_deg: f64) -> DVector<Complex64> {
    let f = spatial_frequency(theta_deg);
    DVector::from_iterator(
        geometry.len(),
        geometry.positions().iter().map(|r| Complex64::from_polar(1.0, -2.0 * PI * alpha * r * f)),
    )
}

/// Noise subspace (the `M − K` smallest eigenvectors).
fn noise_subspace(cov: &DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
    let m = cov.nrows();
    let eig = cov.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    DMatrix::from_fn(m, m - k, |r, c| eig.eigenvectors[(r, order[c])])
}

fn angle_grid(step: f64) -> Vec<f64> {
    let n = (180.0 / step).round() as usize;
    (0..=n).map(|i| -90.0 + i as f64 * step).collect()
}

/// MUSIC pseudo-spectrum `1 / ‖E_nᴴ a(θ)‖²` of one covariance.
pub fn music_spectrum(cov: &DMatrix<Complex64>, geometry: &ArrayGeometry, alpha: f64, k: usize, angles: &[f64]) -> Vec<f64> {
    let en = noise_subspace(cov, k);
    let en_h = en.adjoint();
    angles
        .iter()
        .map(|&t| {
            let p = &en_h * steering(geometry, alpha, t);
            1.0 / p.norm_squared().max(1e-300)
        })
        .collect()
}

fn check_k(k: usize, m: usize) -> Result<()> {
    if k == 0 || k >= m {
        return Err(Error::InvalidParameter(format!("K = {k} must be in 1..{m}")));
    }
    Ok(())
}

/// Incoherent average of per-bin MUSIC spectra.
pub fn issm_spectrum(
    record: &DMatrix<Complex64>,
    geometry: &ArrayGeometry,
    params: &WidebandParams,
    k: usize,
    cfg: &SegmentConfig,
) -> Result<SpatialSpectrum> {
    check_k(k, geometry.len())?;
    if record.nrows() != geometry.len() {
        return Err(Error::DimensionMismatch("record rows must match the sensor count".into()));
    }
    let covs = bin_covariances(record, params, cfg)?;
    let angles = angle_grid(cfg.grid_step);
    let mut values = vec![0.0; angles.len()];
    for (f, cov) in covs.frequencies.iter().zip(&covs.covariances) {
        let spec = music_spectrum(cov, geometry, params.alpha(*f), k, &angles);
        values.iter_mut().zip(spec).for_each(|(v, s)| *v += s);
    }
    let nb = covs.frequencies.len() as f64;
    values.iter_mut().for_each(|v| *v /= nb);
    Ok(SpatialSpectrum { angles_deg: angles, values })
}

pub fn issm_music(
    record: &DMatrix<Complex64>,
    geometry: &ArrayGeometry,
    params: &WidebandParams,
    k: usize,
    cfg: &SegmentConfig,
) -> Result<DoaEstimate> {
    issm_spectrum(record, geometry, params, k, cfg)?.estimate(k)
}

/// Unitary `T` minimizing `‖A_ref − T A‖_F`.
pub fn focusing_matrix(a: &DMatrix<Complex64>, a_ref: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if a.shape() != a_ref.shape() {
        return Err(Error::DimensionMismatch("steering matrices must share a shape".into()));
    }
    let svd = (a * a_ref.adjoint()).svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Eigen("focusing SVD".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Eigen("focusing SVD".into()))?;
    Ok(v_t.adjoint() * u.adjoint())
}

fn steering_matrix(geometry: &ArrayGeometry, alpha: f64, thetas: &[f64]) -> DMatrix<Complex64> {
    let cols: Vec<DVector<Complex64>> = thetas.iter().map(|&t| steering(geometry, alpha, t)).collect();
    DMatrix::from_columns(&cols)
}

/// Focused covariance at the bin nearest the center frequency, followed by MUSIC.
pub fn rss_spectrum(
    record: &DMatrix<Complex64>,
    geometry: &ArrayGeometry,
    params: &WidebandParams,
    k: usize,
    initial_thetas: &[f64],
    cfg: &SegmentConfig,
) -> Result<SpatialSpectrum> {
    check_k(k, geometry.len())?;
    if initial_thetas.len() < k {
        return Err(Error::InvalidParameter(format!("{} initial directions for K = {k}", initial_thetas.len())));
    }
    if initial_thetas.iter().any(|t| !(t.abs() < 90.0)) {
        return Err(Error::InvalidParameter("initial directions must lie in (-90°, 90°)".into()));
    }
    if record.nrows() != geometry.len() {
        return Err(Error::DimensionMismatch("record rows must match the sensor count".into()));
    }
    let covs = bin_covariances(record, params, cfg)?;
    let reference = covs
        .frequencies
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - params.center_frequency).abs().total_cmp(&(b.1 - params.center_frequency).abs()))
        .map(|(i, _)| i)
        .expect("at least one bin");
    let f_ref = covs.frequencies[reference];
    let a_ref = steering_matrix(geometry, params.alpha(f_ref), initial_thetas);
    let sv = a_ref.clone().svd(false, false).singular_values;
    if sv.min() <= 1e-8 * sv.max() {
        return Err(Error::InvalidParameter("initial directions give a rank-deficient steering matrix".into()));
    }
    let m = geometry.len();
    let mut focused = DMatrix::<Complex64>::zeros(m, m);
    for (i, (f, cov)) in covs.frequencies.iter().zip(&covs.covariances).enumerate() {
        if i == reference {
            focused += cov;
            continue;
        }
        let t = focusing_matrix(&steering_matrix(geometry, params.alpha(*f), initial_thetas), &a_ref)?;
        focused += &t * cov * t.adjoint();
    }
    let angles = angle_grid(cfg.grid_step);
    let values = music_spectrum(&focused, geometry, params.alpha(f_ref), k, &angles);
    Ok(SpatialSpectrum { angles_deg: angles, values })
}

pub fn rss_estimate(
    record: &DMatrix<Complex64>,
    geometry: &ArrayGeometry,
    params: &WidebandParams,
    k: usize,
    initial_thetas: &[f64],
    cfg: &SegmentConfig,
) -> Result<DoaEstimate> {
    rss_spectrum(record, geometry, params, k, initial_thetas, cfg)?.estimate(k)
}
