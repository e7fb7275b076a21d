//! One-sample and two-sample TopoTests, plus classical baselines.
//!
//! One-sample: an ECC of the `n^(1/d)`-rescaled sample is compared with the
//! mean ECC of `M` null samples, `Δ = sup_r |χ(r) - χ̄(r)| / √n`, and
//! calibrated against `m` further null draws of `Δ`.
//!
//! Two-sample: `D = sup_r |χ_X(r)/|X| - χ_Y(r)/|Y||`, calibrated by
//! relabelling the pooled sample `K` times.

pub mod classical;
mod multivariate;
mod two_sample;

use serde::{Deserialize, Serialize};

pub use multivariate::{ks_multivariate, KsMultivariateModel, KS_REFERENCE_SIZE};
pub use two_sample::{two_sample_test, two_sample_test_with, TwoSampleConfig};

use crate::distributions::{apply_transform, DistributionSpec, Sampler, TransformSpec};
use crate::ecc::{mean_curve, sample_curve, sup_distance_argmax, StepCurve};
use crate::error::{Error, Result};
use crate::geometry::{ComplexKind, PointCloud};
use crate::par;
use crate::rng::{stream, Domain};

pub const MODEL_SCHEMA: &str = "ecc-gof-model-v1";
pub const REPORT_SCHEMA: &str = "ecc-gof-report-v1";

/// Outcome of any test in this crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub schema: String,
    pub method: String,
    pub statistic: f64,
    /// Rejection threshold for the statistic, when the test has one.
    pub threshold: Option<f64>,
    pub p_value: f64,
    pub reject: bool,
    /// Radius (TopoTests) or location (KS) where the supremum is attained.
    pub argmax: Option<f64>,
    pub alpha: f64,
    /// Sample sizes involved.
    pub sizes: Vec<usize>,
    /// Set when the p-value comes from an asymptotic approximation.
    pub approximate: bool,
}

impl TestReport {
    pub(crate) fn new(method: &str, statistic: f64, p_value: f64, reject: bool, alpha: f64) -> Self {
        TestReport {
            schema: REPORT_SCHEMA.into(),
            method: method.into(),
            statistic,
            threshold: None,
            p_value: p_value.clamp(0.0, 1.0),
            reject,
            argmax: None,
            alpha,
            sizes: vec![],
            approximate: false,
        }
    }
}

/// How samples become curves: an optional coordinate transform, then
/// rescaling by `n^(1/d)`, then a filtration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub complex: ComplexKind,
    #[serde(default)]
    pub transform: TransformSpec,
}

impl Pipeline {
    pub fn for_dim(dim: usize) -> Self {
        Pipeline { complex: ComplexKind::default_for(dim), transform: TransformSpec::Identity }
    }

    pub fn curve(&self, cloud: &PointCloud) -> Result<StepCurve> {
        match self.transform {
            TransformSpec::Identity => sample_curve(cloud, self.complex),
            _ => sample_curve(&apply_transform(&self.transform, cloud)?, self.complex),
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// 1-based rank `k = floor((1 - alpha) m) + 1` (capped at `m`) of the
/// calibration statistic used as threshold: the smallest order statistic
/// with fewer than `alpha m` calibration values strictly above it.
pub fn threshold_rank(alpha: f64, m: usize) -> usize {
    let x = (1.0 - alpha) * m as f64;
    let nearest = x.round();
    let floor = if (x - nearest).abs() <= 1e-9 * m as f64 { nearest } else { x.floor() };
    (floor as usize + 1).min(m)
}

/// Threshold from sorted calibration statistics.
pub fn threshold_from_sorted(sorted: &[f64], alpha: f64) -> f64 {
    sorted[threshold_rank(alpha, sorted.len()) - 1]
}

/// Fraction of sorted values strictly greater than `x`.
pub(crate) fn upper_fraction(sorted: &[f64], x: f64) -> f64 {
    (sorted.len() - sorted.partition_point(|&v| v <= x)) as f64 / sorted.len() as f64
}

/// Calibrated null artifacts for one `(null, n)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceModel {
    pub schema: String,
    pub null_name: String,
    pub n: usize,
    pub dim: usize,
    pub mean_ecc: StepCurve,
    /// Sorted ascending.
    pub null_stats: Vec<f64>,
    pub threshold: f64,
    pub alpha: f64,
    #[serde(rename = "M")]
    pub mean_samples: usize,
    #[serde(rename = "m")]
    pub calibration_samples: usize,
    pub seed: u64,
    pub pipeline: Pipeline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrepareConfig {
    pub null: DistributionSpec,
    pub n: usize,
    pub mean_samples: usize,
    pub calibration_samples: usize,
    pub alpha: f64,
    pub seed: u64,
    pub pipeline: Pipeline,
}

impl PrepareConfig {
    pub fn new(null: DistributionSpec, n: usize, mean_samples: usize, calibration_samples: usize, alpha: f64, seed: u64) -> Self {
        let pipeline = Pipeline::for_dim(null.dim());
        PrepareConfig { null, n, mean_samples, calibration_samples, alpha, seed, pipeline }
    }
}

/// Builds a reference model with the default pipeline for the null's
/// dimension.
pub fn prepare_reference(
    null: &DistributionSpec,
    n: usize,
    mean_samples: usize,
    calibration_samples: usize,
    alpha: f64,
    seed: u64,
) -> Result<ReferenceModel> {
    prepare_reference_with(&PrepareConfig::new(null.clone(), n, mean_samples, calibration_samples, alpha, seed))
}

pub fn prepare_reference_with(cfg: &PrepareConfig) -> Result<ReferenceModel> {
    check_alpha(cfg.alpha)?;
    if cfg.mean_samples < 100 || cfg.calibration_samples < 100 {
        return Err(Error::InvalidConfig("M and m must both be at least 100".into()));
    }
    let dim = cfg.null.dim();
    if cfg.pipeline.complex == ComplexKind::Alpha && dim >= 2 && cfg.n < dim + 2 {
        return Err(Error::InvalidConfig(format!("alpha complexes in dimension {dim} need n >= {}", dim + 2)));
    }
    cfg.pipeline.transform.validate(dim)?;
    let sampler = Sampler::new(&cfg.null)?;
    let draw_curve = |domain: Domain, i: usize| -> Result<StepCurve> {
        let x = sampler.sample(cfg.n, &mut stream(cfg.seed, domain, i as u64))?;
        cfg.pipeline.curve(&x)
    };
    let curves = par::try_map_indexed(cfg.mean_samples, |i| draw_curve(Domain::MeanCurve, i))?;
    let mean_ecc = mean_curve(&curves)?;
    drop(curves);
    let root_n = (cfg.n as f64).sqrt();
    let mut null_stats = par::try_map_indexed(cfg.calibration_samples, |i| {
        Ok(sup_distance_argmax(&draw_curve(Domain::Calibration, i)?, &mean_ecc).0 / root_n)
    })?;
    null_stats.sort_by(f64::total_cmp);
    Ok(ReferenceModel {
        schema: MODEL_SCHEMA.into(),
        null_name: cfg.null.to_string(),
        n: cfg.n,
        dim,
        threshold: threshold_from_sorted(&null_stats, cfg.alpha),
        mean_ecc,
        null_stats,
        alpha: cfg.alpha,
        mean_samples: cfg.mean_samples,
        calibration_samples: cfg.calibration_samples,
        seed: cfg.seed,
        pipeline: cfg.pipeline.clone(),
    })
}

impl ReferenceModel {
    pub fn null(&self) -> Result<DistributionSpec> {
        self.null_name.parse()
    }

    /// Rejection threshold at a level other than the model's own.
    pub fn threshold_at(&self, alpha: f64) -> f64 {
        if alpha == self.alpha {
            self.threshold
        } else {
            threshold_from_sorted(&self.null_stats, alpha)
        }
    }

    /// `Δ` for a sample, and the radius where it is attained.
    pub fn statistic(&self, x: &PointCloud) -> Result<(f64, f64)> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.dim() });
        }
        if x.len() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, got: x.len() });
        }
        let (d, at) = sup_distance_argmax(&self.pipeline.curve(x)?, &self.mean_ecc);
        Ok((d / (self.n as f64).sqrt(), at))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: ReferenceModel = serde_json::from_str(s)?;
        if model.schema != MODEL_SCHEMA {
            return Err(Error::InvalidConfig(format!("unsupported model schema {:?}", model.schema)));
        }
        if model.null_stats.len() != model.calibration_samples || model.null_stats.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidConfig("model calibration statistics are inconsistent".into()));
        }
        Ok(model)
    }
}

/// One-sample TopoTest of `x` against a prepared null.
pub fn one_sample_test(x: &PointCloud, model: &ReferenceModel, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let (stat, at) = model.statistic(x)?;
    let threshold = model.threshold_at(alpha);
    let mut report = TestReport::new("topotest", stat, upper_fraction(&model.null_stats, stat), stat > threshold, alpha);
    report.threshold = Some(threshold);
    report.argmax = Some(at);
    report.sizes = vec![x.len()];
    Ok(report)
}
