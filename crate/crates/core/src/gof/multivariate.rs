//! Fasano–Franceschini style Kolmogorov–Smirnov test in two and three
//! dimensions, with null orthant probabilities estimated from a reference
//! sample and critical values calibrated by simulation.

use serde::{Deserialize, Serialize};

use super::{check_alpha, threshold_from_sorted, upper_fraction, TestReport};
use crate::distributions::{DistributionSpec, Sampler};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::par;
use crate::rng::{stream, Domain};

/// Size of the reference sample standing in for the null distribution.
pub const KS_REFERENCE_SIZE: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsMultivariateModel {
    pub null_name: String,
    pub n: usize,
    pub dim: usize,
    pub reference: PointCloud,
    /// Sorted ascending.
    pub null_stats: Vec<f64>,
    pub threshold: f64,
    pub alpha: f64,
    pub seed: u64,
}

/// Largest gap between empirical and reference orthant fractions, over
/// every sample point as origin and every orthant around it.
pub fn orthant_statistic(x: &PointCloud, reference: &PointCloud) -> f64 {
    let d = x.dim();
    let orthants = 1usize << d;
    let code = |p: &[f64], o: &[f64]| (0..d).fold(0usize, |c, k| c | (usize::from(p[k] > o[k]) << k));
    let (n, r) = (x.len() as f64, reference.len() as f64);
    let mut best = 0.0f64;
    let mut cx = vec![0u32; orthants];
    let mut cr = vec![0u32; orthants];
    for o in x.iter() {
        cx.iter_mut().for_each(|c| *c = 0);
        cr.iter_mut().for_each(|c| *c = 0);
        for p in x.iter() {
            cx[code(p, o)] += 1;
        }
        for p in reference.iter() {
            cr[code(p, o)] += 1;
        }
        for q in 0..orthants {
            best = best.max((cx[q] as f64 / n - cr[q] as f64 / r).abs());
        }
    }
    best
}

impl KsMultivariateModel {
    pub fn prepare(null: &DistributionSpec, n: usize, calibration_samples: usize, alpha: f64, seed: u64) -> Result<Self> {
        check_alpha(alpha)?;
        let dim = null.dim();
        if !(2..=3).contains(&dim) {
            return Err(Error::DimensionUnsupported(dim));
        }
        if calibration_samples < 100 {
            return Err(Error::InvalidConfig("at least 100 calibration samples are required".into()));
        }
        let sampler = Sampler::new(null)?;
        let reference = sampler.sample(KS_REFERENCE_SIZE, &mut stream(seed, Domain::KsReference, 0))?;
        let mut null_stats = par::try_map_indexed(calibration_samples, |i| {
            let x = sampler.sample(n, &mut stream(seed, Domain::KsCalibration, i as u64))?;
            Ok(orthant_statistic(&x, &reference))
        })?;
        null_stats.sort_by(f64::total_cmp);
        Ok(KsMultivariateModel {
            null_name: null.to_string(),
            n,
            dim,
            threshold: threshold_from_sorted(&null_stats, alpha),
            reference,
            null_stats,
            alpha,
            seed,
        })
    }

    pub fn test(&self, x: &PointCloud, alpha: f64) -> Result<TestReport> {
        check_alpha(alpha)?;
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.dim() });
        }
        if x.len() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, got: x.len() });
        }
        let stat = orthant_statistic(x, &self.reference);
        let threshold = if alpha == self.alpha { self.threshold } else { threshold_from_sorted(&self.null_stats, alpha) };
        let mut report =
            TestReport::new("ks_multivariate", stat, upper_fraction(&self.null_stats, stat), stat > threshold, alpha);
        report.threshold = Some(threshold);
        report.sizes = vec![x.len()];
        Ok(report)
    }
}

/// Calibrates against `null` with `calibration_samples` draws and tests `x`.
pub fn ks_multivariate(
    x: &PointCloud,
    null: &DistributionSpec,
    calibration_samples: usize,
    alpha: f64,
    seed: u64,
) -> Result<TestReport> {
    if !(2..=3).contains(&x.dim()) {
        return Err(Error::DimensionUnsupported(x.dim()));
    }
    KsMultivariateModel::prepare(null, x.len(), calibration_samples, alpha, seed)?.test(x, alpha)
}
