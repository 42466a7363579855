//! Monte Carlo sweeps over SNR, source separation and bin count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::baselines::{issm_music, rss_estimate, SegmentConfig};
use crate::conic::SolverConfig;
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::recovery::{srw_doa, SrwConfig};
use crate::signal::{
    noise_std, parse_key_values, parse_list, parse_value, synthesize_spectrum, Scenario, SourceScene, WidebandParams,
    SCENARIO_KEYS,
};

/// Error assigned to every source of a failed trial, degrees.
pub const FAILURE_ERROR_DEG: f64 = 90.0;

pub const CSV_HEADER: &str = "sweep_value, method, n_trials, rmse_deg, success_prob, mean_solve_s";

/// Minimum-cost perfect assignment on a square cost matrix; `out[row] = col`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // potentials and matching, 1-based with a virtual column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        out[p[j] - 1] = j - 1;
    }
    out
}

/// Absolute errors `|θ_k − θ̂_{π(k)}|` under the assignment minimizing their sum.
///
/// On a line that minimizer is rarely unique. Solving on squared error picks
/// the monotone matching, which is one of the minimizers and the unique
/// minimizer of the squared sum, so RMSE does not depend on tie-breaking.
pub fn matched_errors(truth: &[f64], estimates: &[f64]) -> Result<Vec<f64>> {
    if truth.len() != estimates.len() {
        return Err(Error::EstimateCount { expected: truth.len(), got: estimates.len() });
    }
    let cost: Vec<Vec<f64>> = truth.iter().map(|t| estimates.iter().map(|e| (t - e).powi(2)).collect()).collect();
    let perm = hungarian(&cost);
    Ok(truth.iter().zip(&perm).map(|(t, &j)| (t - estimates[j]).abs()).collect())
}

/// Outcome of one method on one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Estimates(Vec<f64>),
    Failed(String),
}

impl TrialOutcome {
    pub fn errors(&self, truth: &[f64]) -> Result<Vec<f64>> {
        match self {
            TrialOutcome::Estimates(e) => matched_errors(truth, e),
            TrialOutcome::Failed(_) => Ok(vec![FAILURE_ERROR_DEG; truth.len()]),
        }
    }
}

fn per_trial_errors(truth: &[f64], trials: &[TrialOutcome]) -> Result<Vec<Vec<f64>>> {
    trials.iter().map(|t| t.errors(truth)).collect()
}

/// Mean over trials of the per-trial root-mean-square error (degrees).
pub fn rmse(truth: &[f64], trials: &[TrialOutcome]) -> Result<f64> {
    let errs = per_trial_errors(truth, trials)?;
    if errs.is_empty() {
        return Err(Error::InvalidParameter("no trials".into()));
    }
    let k = truth.len() as f64;
    Ok(errs.iter().map(|e| (e.iter().map(|x| x * x).sum::<f64>() / k).sqrt()).sum::<f64>() / errs.len() as f64)
}

/// Root of the squared error pooled over trials and sources.
pub fn rmse_pooled(truth: &[f64], trials: &[TrialOutcome]) -> Result<f64> {
    let errs = per_trial_errors(truth, trials)?;
    if errs.is_empty() {
        return Err(Error::InvalidParameter("no trials".into()));
    }
    let total: f64 = errs.iter().flatten().map(|x| x * x).sum();
    Ok((total / (errs.len() * truth.len()) as f64).sqrt())
}

/// Fraction of trials in which every matched error is below `margin_deg`.
pub fn success_probability(truth: &[f64], trials: &[TrialOutcome], margin_deg: f64) -> Result<f64> {
    let errs = per_trial_errors(truth, trials)?;
    if errs.is_empty() {
        return Err(Error::InvalidParameter("no trials".into()));
    }
    let ok = trials
        .iter()
        .zip(&errs)
        .filter(|(t, e)| matches!(t, TrialOutcome::Estimates(_)) && e.iter().all(|x| *x < margin_deg))
        .count();
    Ok(ok as f64 / errs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    SrwDoa,
    Issm,
    Rss,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::SrwDoa => "srw-doa",
            Method::Issm => "issm",
            Method::Rss => "rss",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "srw-doa" => Ok(Method::SrwDoa),
            "issm" => Ok(Method::Issm),
            "rss" => Ok(Method::Rss),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    SnrDb,
    /// Second source at `θ_1 + Δθ`.
    Separation,
    Bins,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::Separation => "delta_theta_deg",
            SweepVariable::Bins => "n_bins",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "snr" | "snr_db" => Ok(SweepVariable::SnrDb),
            "separation" | "delta_theta" | "delta_theta_deg" => Ok(SweepVariable::Separation),
            "bins" | "n_bins" | "j" => Ok(SweepVariable::Bins),
            other => Err(Error::InvalidParameter(format!("unknown sweep variable {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmseMode {
    PerTrial,
    Pooled,
}

/// Keys accepted on top of the scenario keys.
pub const EXPERIMENT_KEYS: &[&str] = &[
    "sweep_variable",
    "sweep_values",
    "methods",
    "n_trials",
    "base_seed",
    "margin_deg",
    "snr_db",
    "solver_eps",
    "max_iterations",
    "rmse_mode",
    "rss_init_error_deg",
    "eta",
    "output_dir",
];

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub methods: Vec<Method>,
    pub sweep_variable: SweepVariable,
    pub sweep_values: Vec<f64>,
    pub n_trials: usize,
    pub base_seed: u64,
    pub margin_deg: f64,
    /// SNR when it is not the swept variable.
    pub snr_db: f64,
    pub solver: SolverConfig,
    pub eta: f64,
    pub rmse_mode: RmseMode,
    pub rss_init_error_deg: f64,
    pub segments: SegmentConfig,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Sweep setup with 20 trials, 5° margin, SNR 10 dB and a 10⁻⁵ solver
    /// tolerance.
    pub fn new(scenario: Scenario, sweep_variable: SweepVariable, sweep_values: Vec<f64>) -> Self {
        Self {
            scenario,
            methods: vec![Method::SrwDoa, Method::Issm, Method::Rss],
            sweep_variable,
            sweep_values,
            n_trials: 20,
            base_seed: 0,
            margin_deg: 5.0,
            snr_db: 10.0,
            solver: SolverConfig::default().with_tolerance(1e-5),
            eta: 1.0,
            rmse_mode: RmseMode::PerTrial,
            rss_init_error_deg: 2.0,
            segments: SegmentConfig::default(),
            output_dir: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        if let Some(k) = map
            .keys()
            .find(|k| !SCENARIO_KEYS.contains(&k.as_str()) && !EXPERIMENT_KEYS.contains(&k.as_str()))
        {
            return Err(Error::InvalidParameter(format!("unknown config key {k}")));
        }
        let scenario = Scenario::from_map(&map)?;
        let get = |k: &str| map.get(k).ok_or_else(|| Error::InvalidParameter(format!("{k} is required")));
        let mut cfg = Self::new(
            scenario,
            SweepVariable::parse(get("sweep_variable")?)?,
            parse_list("sweep_values", get("sweep_values")?)?,
        );
        for (k, v) in &map {
            match k.as_str() {
                "methods" => cfg.methods = v.split(',').map(Method::parse).collect::<Result<_>>()?,
                "n_trials" => cfg.n_trials = parse_value(k, v)?,
                "base_seed" => cfg.base_seed = parse_value(k, v)?,
                "margin_deg" => cfg.margin_deg = parse_value(k, v)?,
                "snr_db" => cfg.snr_db = parse_value(k, v)?,
                "solver_eps" => cfg.solver = cfg.solver.clone().with_tolerance(parse_value(k, v)?),
                "max_iterations" => cfg.solver.max_iterations = parse_value(k, v)?,
                "eta" => cfg.eta = parse_value(k, v)?,
                "rss_init_error_deg" => cfg.rss_init_error_deg = parse_value(k, v)?,
                "rmse_mode" => {
                    cfg.rmse_mode = match v.as_str() {
                        "per_trial" => RmseMode::PerTrial,
                        "pooled" => RmseMode::Pooled,
                        other => return Err(Error::InvalidParameter(format!("unknown rmse_mode {other:?}"))),
                    }
                }
                "output_dir" => cfg.output_dir = Some(PathBuf::from(v)),
                _ => {}
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::InvalidParameter("n_trials must be at least 1".into()));
        }
        if !(self.margin_deg > 0.0) {
            return Err(Error::InvalidParameter("margin_deg must be positive".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::InvalidParameter("sweep_values must not be empty".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("at least one method is required".into()));
        }
        if self.sweep_variable == SweepVariable::Bins
            && self.sweep_values.iter().any(|v| !(*v >= 1.0 && v.fract() == 0.0))
        {
            return Err(Error::InvalidParameter("bin counts must be positive integers".into()));
        }
        Ok(())
    }

    /// Parameters and scene at one sweep point.
    pub fn point(&self, value: f64) -> Result<(WidebandParams, SourceScene, f64)> {
        let mut params = self.scenario.params;
        let mut scene = self.scenario.scene.clone();
        let mut snr = self.snr_db;
        match self.sweep_variable {
            SweepVariable::SnrDb => snr = value,
            SweepVariable::Separation => {
                let first = scene.thetas_deg()[0];
                scene = SourceScene::new(vec![first, first + value])?;
            }
            SweepVariable::Bins => params.n_bins = value as usize,
        }
        params.validate()?;
        Ok((params, scene, snr))
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(base: u64, sweep_index: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ sweep_index as u64) ^ trial as u64)
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub sweep_index: usize,
    pub trial: usize,
    pub method: Method,
    pub outcome: TrialOutcome,
    pub seconds: f64,
}

/// One Monte Carlo trial for every configured method.
pub fn run_trial(cfg: &ExperimentConfig, sweep_index: usize, trial: usize) -> Result<Vec<TrialRecord>> {
    let (params, scene, snr) = cfg.point(cfg.sweep_values[sweep_index])?;
    let seed = trial_seed(cfg.base_seed, sweep_index, trial);
    let sub = |i: u64| splitmix64(seed ^ i.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    let geometry = match &cfg.scenario.geometry_file {
        Some(_) => cfg.scenario.geometry()?,
        None => {
            let m = cfg.scenario.n_sensors;
            ArrayGeometry::random(m, params.random_aperture(m), &mut ChaCha8Rng::seed_from_u64(sub(1)))?
        }
    };
    let spectrum = synthesize_spectrum(&geometry, &scene, &params, sub(2))?;
    let sigma_n = noise_std(&spectrum.snapshot().x, snr);
    let noisy = spectrum.with_noise(sigma_n, sub(3));
    let snapshot = noisy.snapshot();
    let sigma = sigma_n * ((snapshot.n_sensors() * snapshot.n_bins()) as f64).sqrt();
    let record = noisy.time_record();
    let k = scene.len();
    let truth = scene.thetas_deg();

    let mut out = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let start = Instant::now();
        let result = match method {
            Method::SrwDoa => {
                let srw = SrwConfig { solver: cfg.solver.clone(), eta: cfg.eta, ..SrwConfig::default() };
                srw_doa(&geometry, &snapshot, k, sigma, &srw).map(|r| r.estimate)
            }
            Method::Issm => issm_music(&record, &geometry, &params, k, &cfg.segments),
            Method::Rss => {
                let mut rng = ChaCha8Rng::seed_from_u64(sub(4));
                let e = cfg.rss_init_error_deg;
                let init: Vec<f64> = truth
                    .iter()
                    .map(|t| (t + if e > 0.0 { rng.random_range(-e..=e) } else { 0.0 }).clamp(-89.9, 89.9))
                    .collect();
                rss_estimate(&record, &geometry, &params, k, &init, &cfg.segments)
            }
        };
        let outcome = match result {
            Ok(e) if e.len() == k && e.thetas_deg.iter().all(|t| t.is_finite()) => TrialOutcome::Estimates(e.thetas_deg),
            Ok(e) => TrialOutcome::Failed(format!("{} estimates", e.len())),
            Err(e) => TrialOutcome::Failed(e.to_string()),
        };
        out.push(TrialRecord { sweep_index, trial, method, outcome, seconds: start.elapsed().as_secs_f64() });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub sweep_value: f64,
    pub method: Method,
    pub n_trials: usize,
    pub rmse_deg: f64,
    pub success_prob: f64,
    pub mean_solve_s: f64,
}

#[derive(Debug, Clone)]
pub struct MetricsSummary {
    pub sweep_variable: SweepVariable,
    pub rows: Vec<MetricsRow>,
    pub records: Vec<TrialRecord>,
}

impl MetricsSummary {
    pub fn row(&self, sweep_value: f64, method: Method) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| r.sweep_value == sweep_value && r.method == method)
    }

    /// Rows of one method in sweep order.
    pub fn series(&self, method: Method) -> Vec<&MetricsRow> {
        self.rows.iter().filter(|r| r.method == method).collect()
    }

    /// Summary CSV; timing is excluded so that identical configs give identical files.
    pub fn to_csv(&self) -> String {
        self.csv(false)
    }

    /// Summary CSV with measured solve times.
    pub fn to_csv_with_timing(&self) -> String {
        self.csv(true)
    }

    fn csv(&self, timing: bool) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            let t = if timing { format!("{:.6}", r.mean_solve_s) } else { "nan".into() };
            let _ = writeln!(
                out,
                "{}, {}, {}, {:.10}, {:.6}, {}",
                r.sweep_value,
                r.method.name(),
                r.n_trials,
                r.rmse_deg,
                r.success_prob,
                t
            );
        }
        out
    }

    /// Success-probability and RMSE curves as `(name, csv)`, one column per method.
    pub fn figure_csvs(&self) -> [(String, String); 2] {
        let (succ, err) = match self.sweep_variable {
            SweepVariable::SnrDb => ("fig1", "fig2"),
            SweepVariable::Separation => ("fig3", "fig4"),
            SweepVariable::Bins => ("fig5", "fig6"),
        };
        let mut methods: Vec<Method> = self.rows.iter().map(|r| r.method).collect();
        methods.sort();
        methods.dedup();
        let mut values: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !values.contains(&r.sweep_value) {
                values.push(r.sweep_value);
            }
        }
        let table = |f: &dyn Fn(&MetricsRow) -> f64| {
            let mut out = String::from(self.sweep_variable.name());
            for m in &methods {
                out.push(',');
                out.push_str(m.name());
            }
            out.push('\n');
            for &v in &values {
                let _ = write!(out, "{v}");
                for &m in &methods {
                    let _ = write!(out, ",{}", self.row(v, m).map_or(f64::NAN, f));
                }
                out.push('\n');
            }
            out
        };
        [
            (format!("{succ}_success.csv"), table(&|r| r.success_prob)),
            (format!("{err}_rmse.csv"), table(&|r| r.rmse_deg)),
        ]
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("metrics.csv"), self.to_csv_with_timing())?;
        for (name, body) in self.figure_csvs() {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

/// Runs all trials on the rayon pool and aggregates them in (sweep, trial) order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<MetricsSummary> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> =
        (0..cfg.sweep_values.len()).flat_map(|s| (0..cfg.n_trials).map(move |t| (s, t))).collect();
    let results: Vec<Result<Vec<TrialRecord>>> = jobs.par_iter().map(|&(s, t)| run_trial(cfg, s, t)).collect();
    let mut records = Vec::with_capacity(jobs.len() * cfg.methods.len());
    for r in results {
        records.extend(r?);
    }
    records.sort_by_key(|r| (r.sweep_index, r.method, r.trial));

    let mut grouped: BTreeMap<(usize, Method), Vec<&TrialRecord>> = BTreeMap::new();
    for r in &records {
        grouped.entry((r.sweep_index, r.method)).or_default().push(r);
    }
    let mut rows = Vec::new();
    for (s, &value) in cfg.sweep_values.iter().enumerate() {
        let (_, scene, _) = cfg.point(value)?;
        let truth = scene.thetas_deg();
        for &method in &cfg.methods {
            let group = &grouped[&(s, method)];
            let outcomes: Vec<TrialOutcome> = group.iter().map(|r| r.outcome.clone()).collect();
            let rmse_deg = match cfg.rmse_mode {
                RmseMode::PerTrial => rmse(truth, &outcomes)?,
                RmseMode::Pooled => rmse_pooled(truth, &outcomes)?,
            };
            rows.push(MetricsRow {
                sweep_value: value,
                method,
                n_trials: group.len(),
                rmse_deg,
                success_prob: success_probability(truth, &outcomes, cfg.margin_deg)?,
                mean_solve_s: group.iter().map(|r| r.seconds).sum::<f64>() / group.len() as f64,
            });
        }
    }
    let summary = MetricsSummary { sweep_variable: cfg.sweep_variable, rows, records };
    if let Some(dir) = &cfg.output_dir {
        summary.write(dir)?;
    }
    Ok(summary)
}
