use serde::{Deserialize, Serialize};

use super::DistributionSpec;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Coordinatewise maps applied to samples before building complexes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformSpec {
    #[default]
    Identity,
    /// `x_k -> arctan(gamma_k x_k)`; a single gamma applies to every axis.
    ArctanRescale { gamma: Vec<f64> },
    /// `x_k -> F_k(x_k)` with one univariate marginal per axis.
    CopulaPit { marginals: Vec<DistributionSpec> },
}

impl TransformSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            TransformSpec::Identity => Ok(()),
            TransformSpec::ArctanRescale { gamma } => {
                if gamma.len() != 1 && gamma.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: gamma.len() });
                }
                if gamma.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
                    return Err(Error::InvalidConfig("arctan gamma must be positive".into()));
                }
                Ok(())
            }
            TransformSpec::CopulaPit { marginals } => {
                if marginals.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: marginals.len() });
                }
                marginals.iter().try_for_each(|m| {
                    if m.dim() != 1 {
                        return Err(Error::NotUnivariate);
                    }
                    m.validate()
                })
            }
        }
    }
}

/// Scale for [`TransformSpec::ArctanRescale`] that sends ten standard
/// deviations to 2, the edge of the nearly linear part of `arctan`.
pub fn gamma_for_sd(sd: f64) -> f64 {
    2.0 / (10.0 * sd)
}

pub fn apply_transform(t: &TransformSpec, cloud: &PointCloud) -> Result<PointCloud> {
    t.validate(cloud.dim())?;
    match t {
        TransformSpec::Identity => Ok(cloud.clone()),
        TransformSpec::ArctanRescale { gamma } => {
            cloud.map_coords(|k, x| (gamma[if gamma.len() == 1 { 0 } else { k }] * x).atan())
        }
        TransformSpec::CopulaPit { marginals } => {
            cloud.map_coords(|k, x| marginals[k].cdf(x).expect("validated univariate marginal"))
        }
    }
}
