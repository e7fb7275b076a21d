//! Distribution families used as nulls and alternatives, with seeded
//! samplers, univariate CDFs and the support transforms for unbounded data.
//!
//! `Normal { mu, sigma }` takes a standard deviation. The cosine family has
//! density `1 - cos(2πx)` on `[0, 1]` (a raised cosine, zero at both ends).

mod grammar;
mod sampler;
mod transform;

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub use sampler::Sampler;
pub use transform::{apply_transform, gamma_for_sd, TransformSpec};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::rng::{stream, Domain};

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    Normal { mu: f64, sigma: f64 },
    Uniform { a: f64, b: f64 },
    Beta { a: f64, b: f64 },
    Cosine,
    StudentT { nu: f64 },
    Cauchy { loc: f64, scale: f64 },
    Laplace { loc: f64, scale: f64 },
    Logistic { loc: f64, scale: f64 },
    /// Independent coordinates.
    Product(Vec<DistributionSpec>),
    /// `(weight, component)` pairs; weights sum to one.
    Mixture(Vec<(f64, DistributionSpec)>),
    MultivariateNormal { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    /// Density `heights[i]` on `[breakpoints[i], breakpoints[i + 1])`.
    PiecewiseDensity { breakpoints: Vec<f64>, heights: Vec<f64> },
}

use DistributionSpec as D;

impl DistributionSpec {
    pub fn standard_normal() -> Self {
        D::Normal { mu: 0.0, sigma: 1.0 }
    }

    /// `d` independent copies of `spec`.
    pub fn iid(spec: DistributionSpec, d: usize) -> Self {
        D::Product(vec![spec; d])
    }

    /// Centered normal with unit variances and every correlation equal to `a`.
    pub fn mg(d: usize, a: f64) -> Self {
        let cov = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { a }).collect()).collect();
        D::MultivariateNormal { mean: vec![0.0; d], cov }
    }

    pub fn dim(&self) -> usize {
        match self {
            D::Product(f) => f.iter().map(|s| s.dim()).sum(),
            D::Mixture(c) => c.first().map_or(0, |(_, s)| s.dim()),
            D::MultivariateNormal { mean, .. } => mean.len(),
            _ => 1,
        }
    }

    /// Checks every parameter constraint, recursively.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            D::Normal { mu, sigma } if !(finite(&[*mu, *sigma]) && *sigma > 0.0) => {
                bad(format!("normal needs finite mu and sigma > 0, got ({mu}, {sigma})"))
            }
            D::Uniform { a, b } if !(finite(&[*a, *b]) && a < b) => bad(format!("uniform needs a < b, got ({a}, {b})")),
            D::Beta { a, b } if !(finite(&[*a, *b]) && *a > 0.0 && *b > 0.0) => {
                bad(format!("beta needs positive shapes, got ({a}, {b})"))
            }
            D::StudentT { nu } if !(nu.is_finite() && *nu > 0.0) => bad(format!("t needs nu > 0, got {nu}")),
            D::Cauchy { loc, scale } | D::Laplace { loc, scale } | D::Logistic { loc, scale }
                if !(finite(&[*loc, *scale]) && *scale > 0.0) =>
            {
                bad(format!("location-scale family needs scale > 0, got ({loc}, {scale})"))
            }
            D::Product(f) => {
                if f.is_empty() {
                    return bad("empty product".into());
                }
                f.iter().try_for_each(|s| s.validate())
            }
            D::Mixture(c) => {
                if c.is_empty() {
                    return bad("empty mixture".into());
                }
                let d = c[0].1.dim();
                for (w, s) in c {
                    if !(w.is_finite() && *w > 0.0) {
                        return bad(format!("mixture weight {w} is not positive"));
                    }
                    if s.dim() != d {
                        return bad("mixture components differ in dimension".into());
                    }
                    s.validate()?;
                }
                let total: f64 = c.iter().map(|(w, _)| w).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return bad(format!("mixture weights sum to {total}"));
                }
                Ok(())
            }
            D::MultivariateNormal { mean, cov } => {
                let d = mean.len();
                if d == 0 || cov.len() != d || cov.iter().any(|r| r.len() != d) {
                    return bad("mvn covariance must be d x d for a length-d mean".into());
                }
                if !finite(mean) || cov.iter().any(|r| !finite(r)) {
                    return bad("mvn parameters must be finite".into());
                }
                for i in 0..d {
                    for j in 0..i {
                        let tol = 1e-12 * cov[i][j].abs().max(cov[j][i].abs()).max(1.0);
                        if (cov[i][j] - cov[j][i]).abs() > tol {
                            return bad("mvn covariance is not symmetric".into());
                        }
                    }
                }
                sampler::cholesky(cov).map(|_| ())
            }
            D::PiecewiseDensity { breakpoints, heights } => {
                if breakpoints.len() < 2 || heights.len() + 1 != breakpoints.len() {
                    return bad("piecewise density needs k + 1 breakpoints for k heights".into());
                }
                if !finite(breakpoints) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("piecewise breakpoints must be finite and increasing".into());
                }
                if heights.iter().any(|h| !(h.is_finite() && *h >= 0.0)) {
                    return bad("piecewise heights must be non-negative".into());
                }
                let mass = piecewise_mass(breakpoints, heights, |_| true);
                if (mass - 1.0).abs() > 1e-12 {
                    return bad(format!("piecewise density integrates to {mass}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// One univariate spec per coordinate.
    pub fn marginals(&self) -> Result<Vec<DistributionSpec>> {
        match self {
            D::Product(f) => Ok(f.iter().map(|s| s.marginals()).collect::<Result<Vec<_>>>()?.concat()),
            D::MultivariateNormal { mean, cov } => Ok(mean
                .iter()
                .enumerate()
                .map(|(i, &mu)| D::Normal { mu, sigma: cov[i][i].sqrt() })
                .collect()),
            D::Mixture(c) => {
                let per: Vec<Vec<DistributionSpec>> = c.iter().map(|(_, s)| s.marginals()).collect::<Result<_>>()?;
                Ok((0..self.dim())
                    .map(|k| {
                        let comps: Vec<(f64, DistributionSpec)> =
                            c.iter().zip(&per).map(|((w, _), m)| (*w, m[k].clone())).collect();
                        if comps.len() == 1 {
                            comps[0].1.clone()
                        } else {
                            D::Mixture(comps)
                        }
                    })
                    .collect())
            }
            _ => Ok(vec![self.clone()]),
        }
    }

    /// Cumulative distribution function of a univariate spec.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::NotUnivariate);
        }
        if x.is_nan() {
            return Err(Error::InvalidConfig("cdf at NaN".into()));
        }
        Ok(match self {
            D::Normal { mu, sigma } => normal_cdf((x - mu) / sigma),
            D::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            D::Beta { a, b } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    statrs::function::beta::beta_reg(*a, *b, x)
                }
            }
            D::Cosine => cosine_cdf(x),
            D::StudentT { nu } => {
                let t = StudentsT::new(0.0, 1.0, *nu).map_err(|e| Error::InvalidSpec(e.to_string()))?;
                t.cdf(x)
            }
            D::Cauchy { loc, scale } => 0.5 + ((x - loc) / scale).atan() / PI,
            D::Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            D::Logistic { loc, scale } => {
                let z = (x - loc) / scale;
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            }
            D::Product(f) => f[0].cdf(x)?,
            D::Mixture(c) => {
                let mut acc = 0.0;
                for (w, s) in c {
                    acc += w * s.cdf(x)?;
                }
                acc.clamp(0.0, 1.0)
            }
            D::MultivariateNormal { mean, cov } => normal_cdf((x - mean[0]) / cov[0][0].sqrt()),
            D::PiecewiseDensity { breakpoints, heights } => {
                let mut acc = 0.0;
                for (w, h) in breakpoints.windows(2).zip(heights) {
                    if x <= w[0] {
                        break;
                    }
                    acc += h * (x.min(w[1]) - w[0]);
                }
                acc.clamp(0.0, 1.0)
            }
        })
    }

    /// Mass of the super-level set `{f >= t}` of a piecewise density.
    pub fn superlevel_mass(&self, t: f64) -> Result<f64> {
        match self {
            D::PiecewiseDensity { breakpoints, heights } => Ok(piecewise_mass(breakpoints, heights, |h| h >= t)),
            _ => Err(Error::InvalidSpec(format!("super-level masses need a piecewise density, got {self}"))),
        }
    }
}

fn piecewise_mass(breakpoints: &[f64], heights: &[f64], keep: impl Fn(f64) -> bool) -> f64 {
    breakpoints.windows(2).zip(heights).filter(|(_, &h)| keep(h)).map(|(w, h)| h * (w[1] - w[0])).sum()
}

pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

pub(crate) fn cosine_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x - (2.0 * PI * x).sin() / (2.0 * PI)
    }
}

impl std::str::FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        grammar::parse(s)
    }
}

impl Serialize for DistributionSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DistributionSpec {
    fn deserialize<De: Deserializer<'de>>(d: De) -> std::result::Result<Self, De::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `n` i.i.d. draws, reproducible per `(spec, n, seed)`.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<PointCloud> {
    Sampler::new(spec)?.sample(n, &mut stream(seed, Domain::Sample, 0))
}

/// The Euler-equivalent pair `(F, G)`: densities `1/4` on `(0,2)` and `1/2`
/// on `(2,3)`, and `1/4, 1/2, 1/4` on `(0,1), (1,2), (2,3)`.
pub fn counterexample_pair() -> (DistributionSpec, DistributionSpec) {
    (
        D::PiecewiseDensity { breakpoints: vec![0.0, 2.0, 3.0], heights: vec![0.25, 0.5] },
        D::PiecewiseDensity { breakpoints: vec![0.0, 1.0, 2.0, 3.0], heights: vec![0.25, 0.5, 0.25] },
    )
}
