//! Brute-force Čech filtration, for small clouds only.

use super::{miniball, FilteredComplex, PointCloud, Simplex};
use crate::error::{Error, Result};

/// Largest cloud accepted by [`cech_filtration_bruteforce`].
pub const CECH_MAX_POINTS: usize = 20;

/// Every non-empty subset of the cloud, entering at its miniball radius.
pub fn cech_filtration_bruteforce(cloud: &PointCloud) -> Result<FilteredComplex> {
    let n = cloud.len();
    if n > CECH_MAX_POINTS {
        return Err(Error::TooLarge { max: CECH_MAX_POINTS, got: n });
    }
    let mut cells = Vec::with_capacity((1usize << n) - 1);
    for mask in 1u32..(1u32 << n) {
        let simplex: Simplex = (0..n as u32).filter(|&i| mask & (1 << i) != 0).collect();
        let radius = if simplex.len() == 1 {
            0.0
        } else {
            let pts: Vec<&[f64]> = simplex.iter().map(|&i| cloud.point(i as usize)).collect();
            miniball(&pts).radius
        };
        cells.push((simplex, radius));
    }
    Ok(FilteredComplex::new(cells))
}
