//! Array geometry, per-bin steering vectors, the virtual grid of scaled sensor
//! positions and the selection map χ between virtual-grid and per-bin data.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative merge tolerance for `α_j r_m` values, scaled by the largest one.
pub const DEFAULT_RELATIVE_DEDUP: f64 = 1e-9;

/// Sensor positions of a linear array, in meters from the reference sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<f64>,
}

impl ArrayGeometry {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidParameter("an array needs at least two sensors".into()));
        }
        if positions[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "reference sensor must sit at 0, got {}",
                positions[0]
            )));
        }
        if positions.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter("sensor positions must be finite".into()));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("sensor positions must be strictly increasing".into()));
        }
        Ok(Self { positions })
    }

    /// Uniform linear array with `m` sensors and spacing `spacing`.
    pub fn uniform(m: usize, spacing: f64) -> Result<Self> {
        Self::new((0..m).map(|i| i as f64 * spacing).collect())
    }

    /// `m` sensors with the first at 0, the last at `aperture`, and the
    /// interior positions drawn uniformly from `(0, aperture)`.
    pub fn random<R: Rng + ?Sized>(m: usize, aperture: f64, rng: &mut R) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter("an array needs at least two sensors".into()));
        }
        if !(aperture > 0.0) {
            return Err(Error::InvalidParameter(format!("aperture must be positive, got {aperture}")));
        }
        let mut interior: Vec<f64> = (0..m - 2).map(|_| rng.random::<f64>() * aperture).collect();
        interior.sort_by(f64::total_cmp);
        let mut positions = Vec::with_capacity(m);
        positions.push(0.0);
        positions.extend(interior);
        positions.push(aperture);
        Self::new(positions)
    }

    /// Parses one position per line; the first entry must be 0.
    pub fn parse(text: &str) -> Result<Self> {
        let mut positions = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let r: f64 = line
                .parse()
                .map_err(|_| Error::Parse { line: i + 1, msg: format!("not a number: {line:?}") })?;
            if positions.is_empty() && r != 0.0 {
                return Err(Error::Parse { line: i + 1, msg: "first sensor position must be 0".into() });
            }
            positions.push(r);
        }
        Self::new(positions)
    }

    pub fn to_text(&self) -> String {
        self.positions.iter().map(|r| format!("{r:.17e}\n")).collect()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn aperture(&self) -> f64 {
        *self.positions.last().expect("non-empty")
    }
}

/// `f = sin(theta) / 2`.
pub fn spatial_frequency(theta_deg: f64) -> f64 {
    0.5 * theta_deg.to_radians().sin()
}

fn check_frequency(f: f64) -> Result<()> {
    if !(-0.5..=0.5).contains(&f) {
        return Err(Error::FrequencyOutOfRange(f));
    }
    Ok(())
}

/// Steering vector of bin `alpha = 2 / wavelength`: `exp(-i 2π α r_m f)`.
pub fn bin_steering(geometry: &ArrayGeometry, alpha: f64, f: f64) -> Result<DVector<Complex64>> {
    check_frequency(f)?;
    Ok(DVector::from_iterator(
        geometry.len(),
        geometry.positions.iter().map(|r| Complex64::from_polar(1.0, -2.0 * PI * alpha * r * f)),
    ))
}

/// Sorted, deduplicated set of scaled positions `α_j r_m` plus the map from
/// each `(m, j)` to its virtual-grid row.
#[derive(Debug, Clone)]
pub struct VirtualGrid {
    positions: Vec<f64>,
    /// `index_map[j * n_sensors + m]`
    index_map: Vec<usize>,
    n_sensors: usize,
    n_bins: usize,
    tolerance: f64,
}

impl VirtualGrid {
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// M̃
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn n_sensors(&self) -> usize {
        self.n_sensors
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_position(&self) -> f64 {
        *self.positions.last().expect("non-empty grid")
    }

    /// Virtual-grid row holding `α_j r_m`.
    pub fn index(&self, m: usize, j: usize) -> usize {
        self.index_map[j * self.n_sensors + m]
    }

    /// `(r̃_q - r̃_p) / r̃_max`, clamped to `[-1, 1]`.
    pub fn normalized_separation(&self, q: usize, p: usize) -> f64 {
        let rmax = self.max_position();
        if rmax == 0.0 {
            return 0.0;
        }
        ((self.positions[q] - self.positions[p]) / rmax).clamp(-1.0, 1.0)
    }
}

/// Builds the virtual grid; `tol = None` uses `1e-9 · max(α_j r_m)`.
pub fn build_virtual_grid(geometry: &ArrayGeometry, alphas: &[f64], tol: Option<f64>) -> Result<VirtualGrid> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("at least one bin is required".into()));
    }
    if alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidParameter("bin scalars alpha must be positive".into()));
    }
    let m = geometry.len();
    let n_bins = alphas.len();
    let mut scaled: Vec<(f64, usize)> = Vec::with_capacity(m * n_bins);
    for (j, &alpha) in alphas.iter().enumerate() {
        for (i, &r) in geometry.positions.iter().enumerate() {
            scaled.push((alpha * r, j * m + i));
        }
    }
    let largest = scaled.iter().map(|s| s.0).fold(0.0, f64::max);
    let tolerance = tol.unwrap_or(DEFAULT_RELATIVE_DEDUP * largest);
    scaled.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut positions: Vec<f64> = Vec::new();
    let mut index_map = vec![0usize; m * n_bins];
    for (value, slot) in scaled {
        match positions.last() {
            Some(&last) if value - last <= tolerance => {}
            _ => positions.push(value),
        }
        index_map[slot] = positions.len() - 1;
    }
    Ok(VirtualGrid { positions, index_map, n_sensors: m, n_bins, tolerance })
}

/// General steering vector on the virtual grid: `exp(-i 2π r̃ f)`.
pub fn general_steering(grid: &VirtualGrid, f: f64) -> Result<DVector<Complex64>> {
    check_frequency(f)?;
    Ok(DVector::from_iterator(
        grid.len(),
        grid.positions.iter().map(|r| Complex64::from_polar(1.0, -2.0 * PI * r * f)),
    ))
}

/// χ: picks, for every bin `j`, the virtual-grid rows of that bin's sensors.
pub fn chi_apply(grid: &VirtualGrid, z: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if z.nrows() != grid.len() || z.ncols() != grid.n_bins {
        return Err(Error::DimensionMismatch(format!(
            "chi expects {}x{}, got {}x{}",
            grid.len(),
            grid.n_bins,
            z.nrows(),
            z.ncols()
        )));
    }
    Ok(DMatrix::from_fn(grid.n_sensors, grid.n_bins, |m, j| z[(grid.index(m, j), j)]))
}

/// Adjoint of χ under `Re trace(Aᴴ B)`: scatters each entry back to its row.
pub fn chi_adjoint(grid: &VirtualGrid, y: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if y.nrows() != grid.n_sensors || y.ncols() != grid.n_bins {
        return Err(Error::DimensionMismatch(format!(
            "chi adjoint expects {}x{}, got {}x{}",
            grid.n_sensors,
            grid.n_bins,
            y.nrows(),
            y.ncols()
        )));
    }
    let mut out = DMatrix::zeros(grid.len(), grid.n_bins);
    for j in 0..grid.n_bins {
        for m in 0..grid.n_sensors {
            out[(grid.index(m, j), j)] += y[(m, j)];
        }
    }
    Ok(out)
}
