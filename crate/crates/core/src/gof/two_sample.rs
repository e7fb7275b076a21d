use rand::seq::SliceRandom;

use super::{check_alpha, Pipeline, TestReport};
use crate::ecc::{normalize_curve, sup_distance_argmax};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::par;
use crate::rng::{stream, Domain};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleConfig {
    pub permutations: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Use `(c + 1) / (K + 1)` instead of `c / K`.
    pub conservative: bool,
    /// `None` picks the default pipeline for the data dimension.
    pub pipeline: Option<Pipeline>,
}

impl TwoSampleConfig {
    pub fn new(permutations: usize, alpha: f64, seed: u64) -> Self {
        TwoSampleConfig { permutations, alpha, seed, conservative: false, pipeline: None }
    }
}

/// Permutation TopoTest of `x` against `y`.
pub fn two_sample_test(x: &PointCloud, y: &PointCloud, permutations: usize, alpha: f64, seed: u64) -> Result<TestReport> {
    two_sample_test_with(x, y, &TwoSampleConfig::new(permutations, alpha, seed))
}

pub fn two_sample_test_with(x: &PointCloud, y: &PointCloud, cfg: &TwoSampleConfig) -> Result<TestReport> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    check_alpha(cfg.alpha)?;
    if cfg.permutations < 100 {
        return Err(Error::InvalidConfig("at least 100 permutations are required".into()));
    }
    let pipeline = cfg.pipeline.clone().unwrap_or_else(|| Pipeline::for_dim(x.dim()));
    let distance = |a: &PointCloud, b: &PointCloud| -> Result<(f64, f64)> {
        let ca = normalize_curve(&pipeline.curve(a)?, a.len())?;
        let cb = normalize_curve(&pipeline.curve(b)?, b.len())?;
        Ok(sup_distance_argmax(&ca, &cb))
    };
    let (stat, at) = distance(x, y)?;

    let pooled = x.concat(y)?;
    let m = x.len();
    let exceed = par::try_map_indexed(cfg.permutations, |p| {
        let mut idx: Vec<usize> = (0..pooled.len()).collect();
        idx.shuffle(&mut stream(cfg.seed, Domain::Permutation, p as u64));
        let (a, b) = (pooled.select(&idx[..m])?, pooled.select(&idx[m..])?);
        Ok(distance(&a, &b)?.0 > stat)
    })?;
    let count = exceed.iter().filter(|&&e| e).count() as f64;
    let k = cfg.permutations as f64;
    let p_value = if cfg.conservative { (count + 1.0) / (k + 1.0) } else { count / k };
    let mut report = TestReport::new("topotest2", stat, p_value, p_value <= cfg.alpha, cfg.alpha);
    report.argmax = Some(at);
    report.sizes = vec![x.len(), y.len()];
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample, DistributionSpec};

    #[test]
    fn identical_samples_do_not_reject() {
        let x = sample(&DistributionSpec::iid(DistributionSpec::Uniform { a: 0.0, b: 1.0 }, 2), 30, 3).unwrap();
        let r = two_sample_test(&x, &x, 100, 0.05, 7).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
        assert!(r.p_value > 0.9);
    }

    #[test]
    fn statistic_is_symmetric() {
        let x = sample(&DistributionSpec::standard_normal(), 40, 1).unwrap();
        let y = sample(&DistributionSpec::Laplace { loc: 0.0, scale: 1.0 }, 25, 2).unwrap();
        let a = two_sample_test(&x, &y, 100, 0.05, 3).unwrap();
        let b = two_sample_test(&y, &x, 100, 0.05, 3).unwrap();
        assert_eq!(a.statistic, b.statistic);
        let mut cfg = TwoSampleConfig::new(100, 0.05, 3);
        cfg.conservative = true;
        let c = two_sample_test_with(&x, &y, &cfg).unwrap();
        assert_eq!(c.p_value, (a.p_value * 100.0 + 1.0) / 101.0);
    }

    #[test]
    fn input_checks() {
        let x = sample(&DistributionSpec::standard_normal(), 10, 1).unwrap();
        let y = sample(&DistributionSpec::mg(2, 0.0), 10, 1).unwrap();
        assert!(matches!(two_sample_test(&x, &y, 100, 0.05, 0), Err(Error::DimensionMismatch { .. })));
        assert!(two_sample_test(&x, &x, 10, 0.05, 0).is_err());
    }
}
