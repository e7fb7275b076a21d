//! Point clouds and filtered simplicial complexes built on them.
//!
//! Filtration values are ball radii `r` (not squared radii): a simplex of the
//! alpha or Čech complex is present at scale `r` when the radius-`r` balls
//! around its vertices (clipped to Voronoi cells for alpha) share a point,
//! and a Vietoris–Rips simplex is present once its diameter is at most `2r`.

mod alpha;
mod cech;
mod circum;
mod cloud;
mod delaunay;
mod miniball;
mod predicates;
mod rips;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

pub use alpha::{alpha_filtration, alpha_from_triangulation};
pub use cech::{cech_filtration_bruteforce, CECH_MAX_POINTS};
pub use circum::circumball;
pub use cloud::PointCloud;
pub use delaunay::{delaunay, Triangulation};
pub use miniball::{miniball, Ball};
pub use rips::{rips_filtration, rips_filtration_with, RipsConfig};

use crate::error::{Error, Result};

/// Geometric tolerance for radius comparisons.
pub const EPS_GEOM: f64 = 1e-9;

/// Ascending vertex indices into a [`PointCloud`].
pub type Simplex = SmallVec<[u32; 4]>;

/// Simplices with the radius at which each enters the filtration.
///
/// Cells are sorted by radius, then dimension, then vertex list, so every
/// face precedes its cofaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredComplex {
    cells: Vec<(Simplex, f64)>,
    maxdim: usize,
}

impl FilteredComplex {
    /// Sorts the cells into filtration order. No validation is done here;
    /// see [`FilteredComplex::validate`].
    pub fn new(mut cells: Vec<(Simplex, f64)>) -> Self {
        cells.sort_by(|(a, ra), (b, rb)| ra.total_cmp(rb).then(a.len().cmp(&b.len())).then_with(|| a.cmp(b)));
        let maxdim = cells.iter().map(|(s, _)| s.len() - 1).max().unwrap_or(0);
        FilteredComplex { cells, maxdim }
    }

    pub fn cells(&self) -> &[(Simplex, f64)] {
        &self.cells
    }

    pub fn maxdim(&self) -> usize {
        self.maxdim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.cells.iter().filter(|(s, _)| s.len() == 1).count()
    }

    /// Simplex counts by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.maxdim + 1];
        for (s, _) in &self.cells {
            f[s.len() - 1] += 1;
        }
        f
    }

    /// Radius of a simplex, if present.
    pub fn radius_of(&self, simplex: &[u32]) -> Option<f64> {
        self.cells.iter().find(|(s, _)| s.as_slice() == simplex).map(|&(_, r)| r)
    }

    /// Checks sortedness of vertex lists, vertex radii, closure under faces
    /// and radius monotonicity.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let index: HashMap<&[u32], f64> = self.cells.iter().map(|(s, r)| (s.as_slice(), *r)).collect();
        if index.len() != self.cells.len() {
            return bad("repeated simplex".into());
        }
        for (s, r) in &self.cells {
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("simplex {s:?} is not strictly increasing"));
            }
            if !(r.is_finite() && *r >= 0.0) {
                return bad(format!("simplex {s:?} has radius {r}"));
            }
            if s.len() == 1 {
                if *r != 0.0 {
                    return bad(format!("vertex {} has radius {r}", s[0]));
                }
                continue;
            }
            for skip in 0..s.len() {
                let face: Simplex = s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                match index.get(face.as_slice()) {
                    None => return bad(format!("face {face:?} of {s:?} missing")),
                    Some(&rf) if rf > *r => {
                        return bad(format!("face {face:?} enters at {rf} after {s:?} at {r}"));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Which filtration to build on a cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKind {
    Alpha,
    Rips { maxdim: usize },
    Cech,
}

impl ComplexKind {
    /// Alpha where available, Vietoris–Rips up to `dim + 1` beyond.
    pub fn default_for(dim: usize) -> Self {
        if dim <= 3 {
            ComplexKind::Alpha
        } else {
            ComplexKind::Rips { maxdim: dim + 1 }
        }
    }

    pub fn build(&self, cloud: &PointCloud) -> Result<FilteredComplex> {
        match *self {
            ComplexKind::Alpha => alpha_filtration(cloud),
            ComplexKind::Rips { maxdim } => rips_filtration(cloud, maxdim),
            ComplexKind::Cech => cech_filtration_bruteforce(cloud),
        }
    }
}

impl std::fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComplexKind::Alpha => f.write_str("alpha"),
            ComplexKind::Rips { maxdim } => write!(f, "rips:{maxdim}"),
            ComplexKind::Cech => f.write_str("cech"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use smallvec::smallvec;

    #[test]
    fn validate_catches_problems() {
        let ok = FilteredComplex::new(vec![
            (smallvec![0, 1], 1.0),
            (smallvec![0], 0.0),
            (smallvec![1], 0.0),
        ]);
        ok.validate().unwrap();
        assert_eq!(ok.cells()[2].0.as_slice(), &[0, 1]);
        assert_eq!(ok.f_vector(), vec![2, 1]);

        let missing = FilteredComplex::new(vec![(smallvec![0, 1], 1.0), (smallvec![0], 0.0)]);
        assert!(missing.validate().is_err());
        let non_monotone = FilteredComplex::new(vec![
            (smallvec![0], 0.0),
            (smallvec![1], 0.0),
            (smallvec![2], 0.0),
            (smallvec![0, 1], 2.0),
            (smallvec![0, 2], 1.0),
            (smallvec![1, 2], 1.0),
            (smallvec![0, 1, 2], 1.5),
        ]);
        assert!(non_monotone.validate().is_err());
        let vertex_late = FilteredComplex::new(vec![(smallvec![0], 0.5)]);
        assert!(vertex_late.validate().is_err());
    }
}
