//! Wideband source synthesis, DFT bin selection and calibrated noise.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::geometry::{spatial_frequency, ArrayGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidebandParams {
    /// m/s
    pub propagation_speed: f64,
    /// Hz
    pub center_frequency: f64,
    /// Hz
    pub bandwidth: f64,
    /// Hz
    pub sample_rate: f64,
    pub n_samples: usize,
    pub n_bins: usize,
}

impl WidebandParams {
    /// Underwater scenario: 1500 m/s, 500 Hz ± 83.5 Hz, 2 kHz sampling, 512 samples.
    pub fn underwater(n_bins: usize) -> Self {
        Self {
            propagation_speed: 1500.0,
            center_frequency: 500.0,
            bandwidth: 167.0,
            sample_rate: 2000.0,
            n_samples: 512,
            n_bins,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("propagation speed", self.propagation_speed),
            ("center frequency", self.center_frequency),
            ("bandwidth", self.bandwidth),
            ("sample rate", self.sample_rate),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.center_frequency - self.bandwidth / 2.0 <= 0.0 {
            return Err(Error::InvalidParameter("band must lie above 0 Hz".into()));
        }
        if self.center_frequency + self.bandwidth / 2.0 > self.sample_rate / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "band edge {} Hz exceeds Nyquist {} Hz",
                self.center_frequency + self.bandwidth / 2.0,
                self.sample_rate / 2.0
            )));
        }
        if self.n_bins == 0 {
            return Err(Error::InvalidParameter("at least one bin is required".into()));
        }
        if self.n_samples < self.n_bins {
            return Err(Error::InvalidParameter("n_samples must be at least n_bins".into()));
        }
        Ok(())
    }

    pub fn bin_width(&self) -> f64 {
        self.sample_rate / self.n_samples as f64
    }

    /// DFT indices whose frequency lies inside the band.
    pub fn in_band_bins(&self) -> RangeInclusive<usize> {
        let lo = ((self.center_frequency - self.bandwidth / 2.0) / self.bin_width()).ceil() as usize;
        let hi = ((self.center_frequency + self.bandwidth / 2.0) / self.bin_width()).floor() as usize;
        lo..=hi
    }

    pub fn center_wavelength(&self) -> f64 {
        self.propagation_speed / self.center_frequency
    }

    /// `α = 2/γ = 2 f / speed`.
    pub fn alpha(&self, frequency: f64) -> f64 {
        2.0 * frequency / self.propagation_speed
    }

    /// Aperture of the random arrays, `M γ_c / 2`.
    pub fn random_aperture(&self, m: usize) -> f64 {
        m as f64 * self.center_wavelength() / 2.0
    }
}

/// DFT indices of the selected bins: `J` points spread evenly over the in-band
/// bins, or the bin nearest the center when `J = 1`.
pub fn select_bin_indices(params: &WidebandParams) -> Result<Vec<usize>> {
    params.validate()?;
    let band = params.in_band_bins();
    let available = band.clone().count();
    let j = params.n_bins;
    if available < j || available == 0 {
        return Err(Error::BandTooNarrow { available, requested: j });
    }
    if j == 1 {
        let k = (params.center_frequency / params.bin_width()).round() as usize;
        return Ok(vec![k.clamp(*band.start(), *band.end())]);
    }
    Ok((0..j).map(|i| band.start() + (2 * i + 1) * available / (2 * j)).collect())
}

/// Frequencies (Hz) of the selected bins.
pub fn select_bins(params: &WidebandParams) -> Result<Vec<f64>> {
    Ok(select_bin_indices(params)?.into_iter().map(|k| k as f64 * params.bin_width()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceScene {
    thetas_deg: Vec<f64>,
    powers: Vec<f64>,
}

impl SourceScene {
    /// Unit-power sources.
    pub fn new(thetas_deg: Vec<f64>) -> Result<Self> {
        let powers = vec![1.0; thetas_deg.len()];
        Self::with_powers(thetas_deg, powers)
    }

    pub fn with_powers(thetas_deg: Vec<f64>, powers: Vec<f64>) -> Result<Self> {
        if thetas_deg.is_empty() {
            return Err(Error::InvalidParameter("a scene needs at least one source".into()));
        }
        if powers.len() != thetas_deg.len() {
            return Err(Error::DimensionMismatch("one power per source is required".into()));
        }
        if let Some(t) = thetas_deg.iter().find(|t| !(t.abs() < 90.0)) {
            return Err(Error::InvalidParameter(format!("direction {t}° must lie in (-90°, 90°)")));
        }
        if let Some(p) = powers.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidParameter(format!("source power must be positive, got {p}")));
        }
        for (i, a) in thetas_deg.iter().enumerate() {
            if thetas_deg[..i].contains(a) {
                return Err(Error::InvalidParameter(format!("direction {a}° appears twice")));
            }
        }
        Ok(Self { thetas_deg, powers })
    }

    pub fn thetas_deg(&self) -> &[f64] {
        &self.thetas_deg
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn len(&self) -> usize {
        self.thetas_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas_deg.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSnapshot {
    /// `M × J`
    pub x: DMatrix<Complex64>,
    pub alphas: Vec<f64>,
    pub bin_frequencies: Vec<f64>,
}

impl BinnedSnapshot {
    pub fn n_sensors(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_bins(&self) -> usize {
        self.x.ncols()
    }
}

/// Circular complex Gaussian with `E|z|² = variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Full `M × N` DFT of the array record; only in-band bins carry signal.
#[derive(Debug, Clone)]
pub struct ArraySpectrum {
    params: WidebandParams,
    bins: Vec<usize>,
    spectrum: DMatrix<Complex64>,
}

/// Draws the source spectra (`S_{k,j}`, i.i.d. over in-band bins) and
/// propagates them to every sensor.
pub fn synthesize_spectrum(
    geometry: &ArrayGeometry,
    scene: &SourceScene,
    params: &WidebandParams,
    seed: u64,
) -> Result<ArraySpectrum> {
    let bins = select_bin_indices(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n_samples;
    let mut spectrum = DMatrix::zeros(geometry.len(), n);
    for (&theta, &power) in scene.thetas_deg().iter().zip(scene.powers()) {
        let f = spatial_frequency(theta);
        for k in params.in_band_bins() {
            let s = complex_gaussian(&mut rng, power);
            let alpha = params.alpha(k as f64 * params.bin_width());
            for (m, &r) in geometry.positions().iter().enumerate() {
                spectrum[(m, k)] += s * Complex64::from_polar(1.0, -2.0 * PI * alpha * r * f);
            }
        }
    }
    Ok(ArraySpectrum { params: *params, bins, spectrum })
}

impl ArraySpectrum {
    pub fn params(&self) -> &WidebandParams {
        &self.params
    }

    /// Selected DFT indices, one per snapshot column.
    pub fn bins(&self) -> &[usize] {
        &self.bins
    }

    pub fn spectrum(&self) -> &DMatrix<Complex64> {
        &self.spectrum
    }

    pub fn snapshot(&self) -> BinnedSnapshot {
        let width = self.params.bin_width();
        let freqs: Vec<f64> = self.bins.iter().map(|&k| k as f64 * width).collect();
        let x = DMatrix::from_fn(self.spectrum.nrows(), self.bins.len(), |m, j| self.spectrum[(m, self.bins[j])]);
        BinnedSnapshot { x, alphas: freqs.iter().map(|&f| self.params.alpha(f)).collect(), bin_frequencies: freqs }
    }

    /// Adds `CN(0, σ_n²)` to every DFT bin, so the selected bins see the same
    /// noise as [`apply_noise`] and the time record sees white noise of
    /// variance `σ_n² / N`.
    pub fn with_noise(&self, sigma_n: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        let var = sigma_n * sigma_n;
        // bins drawn in snapshot order first, so the selected-bin noise matches apply_noise
        let m = self.spectrum.nrows();
        for j in 0..self.bins.len() {
            for i in 0..m {
                out.spectrum[(i, self.bins[j])] += complex_gaussian(&mut rng, var);
            }
        }
        for k in 0..self.params.n_samples {
            if self.bins.contains(&k) {
                continue;
            }
            for i in 0..m {
                out.spectrum[(i, k)] += complex_gaussian(&mut rng, var);
            }
        }
        out
    }

    /// Complex (analytic) time record, `M × N`, whose unnormalized DFT is the spectrum.
    pub fn time_record(&self) -> DMatrix<Complex64> {
        let n = self.params.n_samples;
        let fft = FftPlanner::new().plan_fft_inverse(n);
        let mut out = DMatrix::zeros(self.spectrum.nrows(), n);
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for m in 0..self.spectrum.nrows() {
            for k in 0..n {
                buf[k] = self.spectrum[(m, k)];
            }
            fft.process(&mut buf);
            for t in 0..n {
                out[(m, t)] = buf[t] / n as f64;
            }
        }
        out
    }
}

/// Noiseless per-bin snapshot `X_{m,j} = Σ_k S_{k,j} exp(−i2π α_j r_m f_k)`.
pub fn synthesize(
    geometry: &ArrayGeometry,
    scene: &SourceScene,
    params: &WidebandParams,
    seed: u64,
) -> Result<BinnedSnapshot> {
    Ok(synthesize_spectrum(geometry, scene, params, seed)?.snapshot())
}

/// Per-entry noise standard deviation for the given SNR.
pub fn noise_std(clean: &DMatrix<Complex64>, snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    let snr = 10f64.powf(snr_db / 10.0);
    let entries = (clean.nrows() * clean.ncols()) as f64;
    (clean.norm_squared() / (entries * snr)).sqrt()
}

/// Adds `CN(0, σ_n²)` noise with `‖X‖_F² / (M J σ_n²) = SNR`; returns the
/// noisy snapshot and the Frobenius bound `σ_n √(M J)`.
pub fn apply_noise(snapshot: &BinnedSnapshot, snr_db: f64, seed: u64) -> (BinnedSnapshot, f64) {
    let sigma_n = noise_std(&snapshot.x, snr_db);
    let mut out = snapshot.clone();
    if sigma_n > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let var = sigma_n * sigma_n;
        for j in 0..out.x.ncols() {
            for m in 0..out.x.nrows() {
                out.x[(m, j)] += complex_gaussian(&mut rng, var);
            }
        }
    }
    let entries = (snapshot.x.nrows() * snapshot.x.ncols()) as f64;
    (out, sigma_n * entries.sqrt())
}

/// `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key = value, got {raw:?}") })?;
        let key = k.trim().to_string();
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Parse { line: i + 1, msg: format!("duplicate key {key}") });
        }
    }
    Ok(out)
}

pub(crate) fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse {key} = {value:?}")))
}

pub(crate) fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|s| parse_value(key, s.trim())).collect()
}

/// Scenario keys; `n_sensors` (default 8) and `geometry_file` are optional.
pub const SCENARIO_KEYS: &[&str] = &[
    "speed_mps",
    "center_hz",
    "bandwidth_hz",
    "fs_hz",
    "n_samples",
    "n_bins",
    "thetas_deg",
    "seed",
    "n_sensors",
    "geometry_file",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: WidebandParams,
    pub scene: SourceScene,
    pub seed: u64,
    pub n_sensors: usize,
    pub geometry_file: Option<String>,
}

impl Scenario {
    /// Builds a scenario from parsed keys, falling back to the underwater
    /// defaults for missing parameters.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut params = WidebandParams::underwater(10);
        let mut scene = None;
        let mut seed = 0;
        let mut n_sensors = 8;
        let mut geometry_file = None;
        for (k, v) in map {
            match k.as_str() {
                "speed_mps" => params.propagation_speed = parse_value(k, v)?,
                "center_hz" => params.center_frequency = parse_value(k, v)?,
                "bandwidth_hz" => params.bandwidth = parse_value(k, v)?,
                "fs_hz" => params.sample_rate = parse_value(k, v)?,
                "n_samples" => params.n_samples = parse_value(k, v)?,
                "n_bins" => params.n_bins = parse_value(k, v)?,
                "thetas_deg" => scene = Some(SourceScene::new(parse_list(k, v)?)?),
                "seed" => seed = parse_value(k, v)?,
                "n_sensors" => n_sensors = parse_value(k, v)?,
                "geometry_file" => geometry_file = Some(v.clone()),
                _ => {}
            }
        }
        params.validate()?;
        let scene = scene.ok_or_else(|| Error::InvalidParameter("thetas_deg is required".into()))?;
        Ok(Self { params, scene, seed, n_sensors, geometry_file })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        if let Some(k) = map.keys().find(|k| !SCENARIO_KEYS.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!("unknown scenario key {k}")));
        }
        Self::from_map(&map)
    }

    /// The geometry file if one is named, else a random array seeded from `seed`.
    pub fn geometry(&self) -> Result<ArrayGeometry> {
        match &self.geometry_file {
            Some(path) => ArrayGeometry::parse(&std::fs::read_to_string(path)?),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                ArrayGeometry::random(self.n_sensors, self.params.random_aperture(self.n_sensors), &mut rng)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bin_is_the_center() {
        assert_eq!(select_bins(&WidebandParams::underwater(1)).unwrap(), vec![500.0]);
    }

    #[test]
    fn ten_bins_fill_the_band() {
        let p = WidebandParams::underwater(10);
        let f = select_bins(&p).unwrap();
        assert_eq!(f.len(), 10);
        for w in f.windows(2) {
            assert!(w[1] > w[0]);
        }
        for &x in &f {
            assert!((416.5..=583.5).contains(&x));
            assert_eq!((x / p.bin_width()).fract(), 0.0);
        }
    }

    #[test]
    fn too_many_bins_is_an_error() {
        let p = WidebandParams::underwater(44);
        assert!(matches!(select_bins(&p), Err(Error::BandTooNarrow { available: 43, requested: 44 })));
        assert_eq!(select_bins(&WidebandParams::underwater(43)).unwrap().len(), 43);
    }

    #[test]
    fn broadside_source_gives_identical_rows() {
        let g = ArrayGeometry::new(vec![0.0, 1.3, 2.0, 5.5]).unwrap();
        let s = synthesize(&g, &SourceScene::new(vec![0.0]).unwrap(), &WidebandParams::underwater(4), 3).unwrap();
        for m in 1..4 {
            assert_eq!(s.x.row(m), s.x.row(0));
        }
    }

    #[test]
    fn synthesis_is_deterministic() {
        let g = ArrayGeometry::uniform(4, 1.5).unwrap();
        let scene = SourceScene::new(vec![-10.0, 20.0]).unwrap();
        let p = WidebandParams::underwater(5);
        assert_eq!(synthesize(&g, &scene, &p, 9).unwrap(), synthesize(&g, &scene, &p, 9).unwrap());
        assert_ne!(synthesize(&g, &scene, &p, 9).unwrap(), synthesize(&g, &scene, &p, 10).unwrap());
    }

    #[test]
    fn rejects_endfire_and_bad_bands() {
        assert!(SourceScene::new(vec![90.0]).is_err());
        assert!(SourceScene::new(vec![-90.0]).is_err());
        assert!(SourceScene::new(vec![]).is_err());
        assert!(SourceScene::new(vec![5.0, 5.0]).is_err());
        let mut p = WidebandParams::underwater(4);
        p.sample_rate = 1000.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn noise_arithmetic() {
        let x = DMatrix::from_element(2, 5, Complex64::new(10f64.sqrt(), 0.0));
        let snap = BinnedSnapshot { x, alphas: vec![1.0; 5], bin_frequencies: vec![1.0; 5] };
        assert!((snap.x.norm_squared() - 100.0).abs() < 1e-12);
        let (noisy, sigma) = apply_noise(&snap, 10.0, 1);
        assert!((sigma - 10f64.sqrt()).abs() < 1e-12);
        assert_ne!(noisy, snap);
        let (same, sigma) = apply_noise(&snap, f64::INFINITY, 1);
        assert_eq!(same, snap);
        assert_eq!(sigma, 0.0);
        assert_eq!(apply_noise(&snap, 10.0, 4).0, apply_noise(&snap, 10.0, 4).0);
    }

    #[test]
    fn empirical_noise_power() {
        let x = DMatrix::from_element(100, 100, Complex64::new(1.0, 0.0));
        let snap = BinnedSnapshot { x: x.clone(), alphas: vec![1.0; 100], bin_frequencies: vec![1.0; 100] };
        let (noisy, _) = apply_noise(&snap, 3.0, 77);
        let sigma_n2 = 10f64.powf(-0.3);
        let emp = (noisy.x - x).norm_squared() / 1e4;
        assert!((emp / sigma_n2 - 1.0).abs() < 0.05, "{emp}");
    }

    #[test]
    fn time_record_round_trips_through_the_dft() {
        let g = ArrayGeometry::uniform(3, 1.0).unwrap();
        let spec = synthesize_spectrum(&g, &SourceScene::new(vec![12.0]).unwrap(), &WidebandParams::underwater(3), 5)
            .unwrap()
            .with_noise(0.1, 6);
        let rec = spec.time_record();
        let n = 512;
        let k = spec.bins()[1];
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..n {
            acc += rec[(2, t)] * Complex64::from_polar(1.0, -2.0 * PI * (k * t) as f64 / n as f64);
        }
        assert!((acc - spec.spectrum()[(2, k)]).norm() < 1e-9);
    }

    #[test]
    fn scenario_file() {
        let text = "speed_mps = 1500\ncenter_hz = 500\nbandwidth_hz = 167\nfs_hz = 2000\n\
                    n_samples = 512\nn_bins = 4 # comment\nthetas_deg = -5, 40\nseed = 11\n";
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.params, WidebandParams::underwater(4));
        assert_eq!(s.scene.thetas_deg(), &[-5.0, 40.0]);
        assert_eq!(s.seed, 11);
        let g = s.geometry().unwrap();
        assert_eq!(g.len(), 8);
        assert!((g.aperture() - 12.0).abs() < 1e-12);
        assert!(Scenario::parse("speedmps = 3\nthetas_deg = 1").is_err());
        assert!(Scenario::parse("seed = 1").is_err());
        assert!(Scenario::parse("seed 1").is_err());
    }
}
