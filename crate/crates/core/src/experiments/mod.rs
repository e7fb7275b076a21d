//! Monte-Carlo power studies.
//!
//! Trial `i` of every study draws its alternative sample from stream
//! `(seed, Trial, i)` (and, for two-sample methods, its null sample from
//! `(seed, TrialSecond, i)`), so adding trials never changes earlier ones.
//! Reference models for one-sample methods are built once per `(null, n)`
//! from the same seed and shared across cells.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Sampler};
use crate::error::{Error, Result};
use crate::gof::{
    classical, one_sample_test, prepare_reference_with, two_sample_test_with, KsMultivariateModel, Pipeline,
    PrepareConfig, ReferenceModel, TwoSampleConfig,
};
use crate::par;
use crate::rng::{stream, stream_key, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// One-sample TopoTest.
    TopoTest,
    /// One-sample Kolmogorov–Smirnov (d = 1).
    Ks,
    /// One-sample Cramér–von Mises (d = 1).
    Cvm,
    /// Orthant-based Kolmogorov–Smirnov (d = 2, 3).
    KsMultivariate,
    /// Two-sample permutation TopoTest.
    TopoTest2,
    /// Two-sample Kolmogorov–Smirnov (d = 1).
    Ks2,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::TopoTest, Method::Ks, Method::Cvm, Method::KsMultivariate, Method::TopoTest2, Method::Ks2];

    pub fn name(self) -> &'static str {
        match self {
            Method::TopoTest => "topotest",
            Method::Ks => "ks",
            Method::Cvm => "cvm",
            Method::KsMultivariate => "ks_multivariate",
            Method::TopoTest2 => "topotest2",
            Method::Ks2 => "ks2",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?}")))
    }
}

/// Calibration effort shared by all cells of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    /// `M`: null samples averaged into the mean curve.
    pub mean_samples: usize,
    /// `m`: null samples calibrating one-sample thresholds.
    pub calibration_samples: usize,
    /// Relabellings per two-sample TopoTest.
    pub permutations: usize,
    /// `None` picks the default filtration for the dimension.
    pub pipeline: Option<Pipeline>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig { mean_samples: 1000, calibration_samples: 1000, permutations: 500, pipeline: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCell {
    pub null_spec: DistributionSpec,
    pub alt_spec: DistributionSpec,
    pub n: usize,
    #[serde(rename = "K")]
    pub trials: usize,
    pub alpha: f64,
    pub method: Method,
    pub power: f64,
    pub ci_halfwidth: f64,
}

impl PowerCell {
    fn new(null: &DistributionSpec, alt: &DistributionSpec, n: usize, alpha: f64, method: Method, rejections: &[bool]) -> Self {
        let k = rejections.len();
        let power = rejections.iter().filter(|&&r| r).count() as f64 / k as f64;
        PowerCell {
            null_spec: null.clone(),
            alt_spec: alt.clone(),
            n,
            trials: k,
            alpha,
            method,
            power,
            ci_halfwidth: 1.96 * (power * (1.0 - power) / k as f64).sqrt(),
        }
    }
}

enum Prepared {
    Topo(Arc<ReferenceModel>),
    KsMulti(Arc<KsMultivariateModel>),
}

type ModelKey = (Method, String, usize, u64);

/// Reference models keyed by `(method, null, n, alpha)`.
#[derive(Default)]
pub struct ModelCache {
    models: Mutex<HashMap<ModelKey, Arc<Prepared>>>,
}

impl ModelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.models.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, method: Method, null: &DistributionSpec, n: usize, alpha: f64, seed: u64, cfg: &StudyConfig) -> Result<Arc<Prepared>> {
        let key = (method, null.to_string(), n, alpha.to_bits() ^ seed.rotate_left(17));
        if let Some(p) = self.models.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let prepared = Arc::new(match method {
            Method::TopoTest => {
                let mut pc = PrepareConfig::new(null.clone(), n, cfg.mean_samples, cfg.calibration_samples, alpha, seed);
                if let Some(p) = &cfg.pipeline {
                    pc.pipeline = p.clone();
                }
                Prepared::Topo(Arc::new(prepare_reference_with(&pc)?))
            }
            Method::KsMultivariate => Prepared::KsMulti(Arc::new(KsMultivariateModel::prepare(
                null,
                n,
                cfg.calibration_samples,
                alpha,
                seed,
            )?)),
            _ => unreachable!("method {method} needs no reference model"),
        });
        Ok(self.models.lock().unwrap().entry(key).or_insert(prepared).clone())
    }
}

/// Rejection outcome of every trial, in trial order.
#[allow(clippy::too_many_arguments)]
pub fn trial_outcomes(
    null: &DistributionSpec,
    alt: &DistributionSpec,
    n: usize,
    trials: usize,
    alpha: f64,
    method: Method,
    seed: u64,
    cfg: &StudyConfig,
    cache: &ModelCache,
) -> Result<Vec<bool>> {
    if null.dim() != alt.dim() {
        return Err(Error::DimensionMismatch { expected: null.dim(), got: alt.dim() });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    let dim = null.dim();
    let univariate = || if dim == 1 { Ok(()) } else { Err(Error::NotUnivariate) };
    let alt_sampler = Sampler::new(alt)?;
    let null_sampler = Sampler::new(null)?;
    let draw_alt = |i: usize| alt_sampler.sample(n, &mut stream(seed, Domain::Trial, i as u64));
    let draw_null = |i: usize| null_sampler.sample(n, &mut stream(seed, Domain::TrialSecond, i as u64));

    match method {
        Method::TopoTest | Method::KsMultivariate => {
            let prepared = cache.get(method, null, n, alpha, seed, cfg)?;
            par::try_map_indexed(trials, |i| {
                let x = draw_alt(i)?;
                Ok(match &*prepared {
                    Prepared::Topo(model) => one_sample_test(&x, model, alpha)?.reject,
                    Prepared::KsMulti(model) => model.test(&x, alpha)?.reject,
                })
            })
        }
        Method::Ks | Method::Cvm => {
            univariate()?;
            let cdf = |t: f64| null.cdf(t).unwrap_or(f64::NAN);
            par::try_map_indexed(trials, |i| {
                let x = draw_alt(i)?;
                let r = if method == Method::Ks {
                    classical::ks_one_sample_1d(&x, &cdf, alpha)?
                } else {
                    classical::cvm_one_sample_1d(&x, &cdf, alpha)?
                };
                Ok(r.reject)
            })
        }
        Method::Ks2 => {
            univariate()?;
            par::try_map_indexed(trials, |i| Ok(classical::ks_two_sample_1d(&draw_alt(i)?, &draw_null(i)?, alpha)?.reject))
        }
        Method::TopoTest2 => par::try_map_indexed(trials, |i| {
            let tc = TwoSampleConfig {
                permutations: cfg.permutations,
                alpha,
                seed: stream_key(seed, Domain::Permutation, i as u64),
                conservative: false,
                pipeline: cfg.pipeline.clone(),
            };
            Ok(two_sample_test_with(&draw_alt(i)?, &draw_null(i)?, &tc)?.reject)
        }),
    }
}

/// Fraction of `trials` alternative samples on which `method` rejects.
pub fn estimate_power(
    null: &DistributionSpec,
    alt: &DistributionSpec,
    n: usize,
    trials: usize,
    alpha: f64,
    method: Method,
    seed: u64,
) -> Result<PowerCell> {
    estimate_power_with(null, alt, n, trials, alpha, method, seed, &StudyConfig::default(), &ModelCache::new())
}

#[allow(clippy::too_many_arguments)]
pub fn estimate_power_with(
    null: &DistributionSpec,
    alt: &DistributionSpec,
    n: usize,
    trials: usize,
    alpha: f64,
    method: Method,
    seed: u64,
    cfg: &StudyConfig,
    cache: &ModelCache,
) -> Result<PowerCell> {
    let outcomes = trial_outcomes(null, alt, n, trials, alpha, method, seed, cfg, cache)?;
    Ok(PowerCell::new(null, alt, n, alpha, method, &outcomes))
}

/// Every `(null, alt)` pair of `specs` under every method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerMatrix {
    pub specs: Vec<DistributionSpec>,
    pub methods: Vec<Method>,
    pub n: usize,
    #[serde(rename = "K")]
    pub trials: usize,
    pub alpha: f64,
    /// Ordered by method, then null, then alternative.
    pub cells: Vec<PowerCell>,
}

#[allow(clippy::too_many_arguments)]
pub fn power_matrix(
    specs: &[DistributionSpec],
    n: usize,
    trials: usize,
    alpha: f64,
    methods: &[Method],
    seed: u64,
    cfg: &StudyConfig,
    cache: &ModelCache,
) -> Result<PowerMatrix> {
    let mut cells = Vec::with_capacity(methods.len() * specs.len() * specs.len());
    for &method in methods {
        for null in specs {
            for alt in specs {
                cells.push(estimate_power_with(null, alt, n, trials, alpha, method, seed, cfg, cache)?);
            }
        }
    }
    Ok(PowerMatrix { specs: specs.to_vec(), methods: methods.to_vec(), n, trials, alpha, cells })
}

impl PowerMatrix {
    pub fn power(&self, method: Method, null: usize, alt: usize) -> Option<f64> {
        let k = self.methods.iter().position(|&m| m == method)?;
        let s = self.specs.len();
        self.cells.get(k * s * s + null * s + alt).map(|c| c.power)
    }

    /// Mean power over off-diagonal cells.
    pub fn average_power(&self, method: Method) -> Option<f64> {
        let s = self.specs.len();
        if s < 2 {
            return None;
        }
        let mut total = 0.0;
        for i in 0..s {
            for j in 0..s {
                if i != j {
                    total += self.power(method, i, j)?;
                }
            }
        }
        Some(total / (s * (s - 1)) as f64)
    }

    /// Columns `null, alt, n, K, method, power, ci`.
    pub fn to_long_csv(&self) -> Result<String> {
        cells_to_csv(&self.cells)
    }

    /// Heatmap layout: one row per null, one column per alternative. With
    /// `minus`, entries are differences `power(method) - power(minus)`.
    pub fn to_matrix_csv(&self, method: Method, minus: Option<Method>) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let label = match minus {
            Some(m) => format!("{method}-{m}"),
            None => method.to_string(),
        };
        let mut header = vec![format!("{label}: null\\alt")];
        header.extend(self.specs.iter().map(|s| s.to_string()));
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.specs.len() {
            let mut row = vec![self.specs[i].to_string()];
            for j in 0..self.specs.len() {
                let missing = || Error::InvalidConfig(format!("method {method} not in matrix"));
                let mut v = self.power(method, i, j).ok_or_else(missing)?;
                if let Some(m) = minus {
                    v -= self.power(m, i, j).ok_or_else(|| Error::InvalidConfig(format!("method {m} not in matrix")))?;
                }
                row.push(format!("{v}"));
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        finish(w)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Long-format CSV of power cells.
pub fn cells_to_csv(cells: &[PowerCell]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["null", "alt", "n", "K", "method", "power", "ci"]).map_err(csv_err)?;
    for c in cells {
        w.write_record([
            c.null_spec.to_string(),
            c.alt_spec.to_string(),
            c.n.to_string(),
            c.trials.to_string(),
            c.method.to_string(),
            format!("{}", c.power),
            format!("{}", c.ci_halfwidth),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// Power at each sample size in `n_list` (ascending), per method.
#[allow(clippy::too_many_arguments)]
pub fn power_vs_n(
    null: &DistributionSpec,
    alt: &DistributionSpec,
    n_list: &[usize],
    trials: usize,
    alpha: f64,
    methods: &[Method],
    seed: u64,
    cfg: &StudyConfig,
) -> Result<Vec<PowerCell>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("sample sizes must be strictly ascending".into()));
    }
    let cache = ModelCache::new();
    let mut out = Vec::new();
    for &method in methods {
        for &n in n_list {
            out.push(estimate_power_with(null, alt, n, trials, alpha, method, seed, cfg, &cache)?);
        }
    }
    Ok(out)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for &k in &idx[i..=j] {
                r[k] = (i + j) as f64 / 2.0 + 1.0;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

/// Calibration statistics `Δ_i` for each sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDistribution {
    pub n: usize,
    /// Sorted ascending.
    pub stats: Vec<f64>,
}

impl NullDistribution {
    pub fn quantile(&self, q: f64) -> f64 {
        let k = ((q * self.stats.len() as f64).ceil() as usize).clamp(1, self.stats.len());
        self.stats[k - 1]
    }
}

/// The `m` calibration statistics of a reference model (with `M = m`) at
/// every `n` in `n_list`.
pub fn null_statistic_distribution(
    null: &DistributionSpec,
    n_list: &[usize],
    m: usize,
    seed: u64,
    pipeline: Option<&Pipeline>,
) -> Result<Vec<NullDistribution>> {
    if m < 500 {
        return Err(Error::InvalidConfig("at least 500 calibration samples are required".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            let mut pc = PrepareConfig::new(null.clone(), n, m, m, 0.05, seed);
            if let Some(p) = pipeline {
                pc.pipeline = p.clone();
            }
            Ok(NullDistribution { n, stats: prepare_reference_with(&pc)?.null_stats })
        })
        .collect()
}

/// Columns `n, index, delta`.
pub fn null_distribution_csv(dists: &[NullDistribution]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["n", "index", "delta"]).map_err(csv_err)?;
    for d in dists {
        for (i, v) in d.stats.iter().enumerate() {
            w.write_record([d.n.to_string(), i.to_string(), format!("{v:?}")]).map_err(csv_err)?;
        }
    }
    finish(w)
}

/// Everything needed to rerun a study byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    /// Stream families as `(name, domain id)`; stream `i` of a family is
    /// keyed by `(seed, domain id, i)`.
    pub streams: Vec<(String, u64)>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, parameters: serde_json::Value) -> Self {
        let streams = [
            ("sample", Domain::Sample),
            ("mean_curve", Domain::MeanCurve),
            ("calibration", Domain::Calibration),
            ("permutation", Domain::Permutation),
            ("trial", Domain::Trial),
            ("ks_reference", Domain::KsReference),
            ("ks_calibration", Domain::KsCalibration),
            ("trial_second", Domain::TrialSecond),
            ("insertion", Domain::Insertion),
        ]
        .into_iter()
        .map(|(name, d)| (name.to_string(), d as u64))
        .collect();
        RunManifest {
            schema: "ecc-gof-manifest-v1".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            streams,
            parameters,
            outputs: vec![],
        }
    }
}
