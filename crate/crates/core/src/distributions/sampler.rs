use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, RngExt};
use rand_distr::{Beta, ChiSquared, Distribution, Open01, StandardNormal};

use super::{cosine_cdf, DistributionSpec as D};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// A validated spec with its derived tables (Cholesky factors, cumulative
/// weights) computed once.
#[derive(Debug, Clone)]
pub struct Sampler {
    spec: D,
    node: Node,
    dim: usize,
}

#[derive(Debug, Clone)]
enum Node {
    Normal(f64, f64),
    Uniform(f64, f64),
    Beta(Beta<f64>),
    Cosine,
    StudentT(f64, ChiSquared<f64>),
    Cauchy(f64, f64),
    Laplace(f64, f64),
    Logistic(f64, f64),
    Product(Vec<Node>),
    Mixture { cumulative: Vec<f64>, components: Vec<Node> },
    Mvn { mean: Vec<f64>, lower: Vec<f64> },
    Piecewise { breakpoints: Vec<f64>, heights: Vec<f64>, cumulative: Vec<f64> },
}

pub(crate) fn cholesky(cov: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = cov.len();
    let m = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
    let chol = m.cholesky().ok_or_else(|| Error::InvalidSpec("mvn covariance is not positive definite".into()))?;
    let l = chol.l();
    Ok((0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| l[(i, j)]).collect())
}

impl Sampler {
    pub fn new(spec: &D) -> Result<Self> {
        spec.validate()?;
        Ok(Sampler { spec: spec.clone(), node: Node::build(spec)?, dim: spec.dim() })
    }

    pub fn spec(&self) -> &D {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n` i.i.d. points drawn from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<PointCloud> {
        if n == 0 {
            return Err(Error::InvalidConfig("sample size must be positive".into()));
        }
        let mut coords = Vec::with_capacity(n * self.dim);
        for _ in 0..n {
            self.node.draw(rng, &mut coords);
        }
        PointCloud::from_flat(self.dim, coords)
    }
}

impl Node {
    fn build(spec: &D) -> Result<Node> {
        let err = |e: rand_distr::BetaError| Error::InvalidSpec(e.to_string());
        Ok(match spec {
            D::Normal { mu, sigma } => Node::Normal(*mu, *sigma),
            D::Uniform { a, b } => Node::Uniform(*a, *b),
            D::Beta { a, b } => Node::Beta(Beta::new(*a, *b).map_err(err)?),
            D::Cosine => Node::Cosine,
            D::StudentT { nu } => {
                Node::StudentT(*nu, ChiSquared::new(*nu).map_err(|e| Error::InvalidSpec(e.to_string()))?)
            }
            D::Cauchy { loc, scale } => Node::Cauchy(*loc, *scale),
            D::Laplace { loc, scale } => Node::Laplace(*loc, *scale),
            D::Logistic { loc, scale } => Node::Logistic(*loc, *scale),
            D::Product(f) => Node::Product(f.iter().map(Node::build).collect::<Result<_>>()?),
            D::Mixture(c) => {
                let mut acc = 0.0;
                let cumulative = c
                    .iter()
                    .map(|(w, _)| {
                        acc += w;
                        acc
                    })
                    .collect();
                Node::Mixture { cumulative, components: c.iter().map(|(_, s)| Node::build(s)).collect::<Result<_>>()? }
            }
            D::MultivariateNormal { mean, cov } => Node::Mvn { mean: mean.clone(), lower: cholesky(cov)? },
            D::PiecewiseDensity { breakpoints, heights } => {
                let mut acc = 0.0;
                let cumulative = breakpoints
                    .windows(2)
                    .zip(heights)
                    .map(|(w, h)| {
                        acc += h * (w[1] - w[0]);
                        acc
                    })
                    .collect();
                Node::Piecewise { breakpoints: breakpoints.clone(), heights: heights.clone(), cumulative }
            }
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        let x = match self {
            Node::Normal(mu, sigma) => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
            Node::Uniform(a, b) => a + (b - a) * rng.random::<f64>(),
            Node::Beta(beta) => beta.sample(rng),
            Node::Cosine => cosine_quantile(rng.random::<f64>()),
            Node::StudentT(nu, chi) => {
                let z: f64 = StandardNormal.sample(rng);
                z / (chi.sample(rng) / nu).sqrt()
            }
            Node::Cauchy(loc, scale) => {
                let u: f64 = Open01.sample(rng);
                loc + scale * (PI * (u - 0.5)).tan()
            }
            Node::Laplace(loc, scale) => {
                let u: f64 = Open01.sample(rng);
                let v = u - 0.5;
                loc - scale * v.signum() * (1.0 - 2.0 * v.abs()).ln()
            }
            Node::Logistic(loc, scale) => {
                let u: f64 = Open01.sample(rng);
                loc + scale * (u / (1.0 - u)).ln()
            }
            Node::Product(f) => {
                for node in f {
                    node.draw(rng, out);
                }
                return;
            }
            Node::Mixture { cumulative, components } => {
                let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                let k = cumulative.partition_point(|&c| c <= u).min(components.len() - 1);
                components[k].draw(rng, out);
                return;
            }
            Node::Mvn { mean, lower } => {
                let d = mean.len();
                let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                for i in 0..d {
                    out.push(mean[i] + (0..=i).map(|j| lower[i * d + j] * z[j]).sum::<f64>());
                }
                return;
            }
            Node::Piecewise { breakpoints, heights, cumulative } => {
                let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                let mut k = cumulative.partition_point(|&c| c <= u).min(heights.len() - 1);
                while heights[k] == 0.0 && k + 1 < heights.len() {
                    k += 1;
                }
                let below = if k == 0 { 0.0 } else { cumulative[k - 1] };
                let x = breakpoints[k] + (u - below) / heights[k];
                x.clamp(breakpoints[k], breakpoints[k + 1])
            }
        };
        out.push(x);
    }
}

/// Inverse of the raised-cosine CDF by bisection.
fn cosine_quantile(u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if cosine_cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
