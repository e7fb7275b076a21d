//! Vietoris–Rips filtrations by ordered clique expansion.

use super::circum::dist2;
use super::{FilteredComplex, PointCloud, Simplex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RipsConfig {
    /// Highest simplex dimension produced.
    pub maxdim: usize,
    /// Edges longer than `2 * max_radius` are left out.
    pub max_radius: f64,
    /// Hard cap on the number of simplices.
    pub budget: usize,
    /// Log a warning when `C(n, maxdim + 1)` exceeds this.
    pub warn_above: f64,
}

impl RipsConfig {
    pub fn new(maxdim: usize) -> Self {
        RipsConfig { maxdim, max_radius: f64::INFINITY, budget: 20_000_000, warn_above: 1e6 }
    }
}

/// Full Vietoris–Rips filtration up to dimension `maxdim`.
///
/// Truncating at `maxdim` below `n - 1` changes the final Euler
/// characteristic, so pick it deliberately.
pub fn rips_filtration(cloud: &PointCloud, maxdim: usize) -> Result<FilteredComplex> {
    rips_filtration_with(cloud, &RipsConfig::new(maxdim))
}

pub fn rips_filtration_with(cloud: &PointCloud, cfg: &RipsConfig) -> Result<FilteredComplex> {
    let n = cloud.len();
    let top = binomial(n, cfg.maxdim + 1);
    if top > cfg.warn_above {
        log::warn!("Vietoris–Rips with n = {n}, maxdim = {} may create ~{top:.3e} top simplices", cfg.maxdim);
    }
    let mut half = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let h = 0.5 * dist2(cloud.point(i), cloud.point(j)).sqrt();
            half[i * n + j] = h;
            half[j * n + i] = h;
        }
    }
    let mut cells: Vec<(Simplex, f64)> = Vec::new();
    let mut stack: Vec<u32> = Vec::with_capacity(cfg.maxdim + 1);
    for v in 0..n as u32 {
        stack.push(v);
        expand(&half, n, cfg, &mut stack, 0.0, &mut cells)?;
        stack.pop();
    }
    Ok(FilteredComplex::new(cells))
}

fn expand(
    half: &[f64],
    n: usize,
    cfg: &RipsConfig,
    stack: &mut Vec<u32>,
    radius: f64,
    out: &mut Vec<(Simplex, f64)>,
) -> Result<()> {
    if out.len() >= cfg.budget {
        return Err(Error::BudgetExceeded(cfg.budget));
    }
    out.push((stack.iter().copied().collect(), radius));
    if stack.len() > cfg.maxdim {
        return Ok(());
    }
    let last = *stack.last().unwrap() as usize;
    for u in last + 1..n {
        let mut r = radius;
        let mut ok = true;
        for &w in stack.iter() {
            let h = half[w as usize * n + u];
            if h > cfg.max_radius {
                ok = false;
                break;
            }
            r = r.max(h);
        }
        if ok {
            stack.push(u as u32);
            expand(half, n, cfg, stack, r, out)?;
            stack.pop();
        }
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_and_triangle_radii() {
        let fc = rips_filtration(&PointCloud::from_values(vec![0.0, 2.0]).unwrap(), 1).unwrap();
        assert_eq!(fc.radius_of(&[0, 1]), Some(1.0));
        let s = 2.0;
        let c = PointCloud::new(vec![vec![0.0, 0.0], vec![s, 0.0], vec![1.0, 3f64.sqrt()]]).unwrap();
        let fc = rips_filtration(&c, 2).unwrap();
        fc.validate().unwrap();
        assert!((fc.radius_of(&[0, 1, 2]).unwrap() - s / 2.0).abs() < 1e-12);
    }

    #[test]
    fn complete_simplex_counts() {
        let c = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let fc = rips_filtration(&c, 3).unwrap();
        assert_eq!(fc.f_vector(), vec![4, 6, 4, 1]);
        assert_eq!(fc.len(), 15);
        fc.validate().unwrap();
    }

    #[test]
    fn budget_and_radius_cap() {
        let c = PointCloud::from_values((0..12).map(f64::from).collect()).unwrap();
        let cfg = RipsConfig { budget: 100, ..RipsConfig::new(4) };
        assert_eq!(rips_filtration_with(&c, &cfg), Err(Error::BudgetExceeded(100)));
        let cfg = RipsConfig { max_radius: 0.5, ..RipsConfig::new(4) };
        // only consecutive integers are joined
        assert_eq!(rips_filtration_with(&c, &cfg).unwrap().f_vector(), vec![12, 11]);
    }
}
