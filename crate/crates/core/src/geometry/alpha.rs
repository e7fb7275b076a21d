//! Alpha filtrations via Gabriel propagation over the Delaunay complex.

use std::collections::HashMap;

use smallvec::smallvec;

use super::circum::{circumball, dist2};
use super::{delaunay, FilteredComplex, PointCloud, Simplex, Triangulation};
use crate::error::{Error, Result};

/// Alpha filtration of a cloud in one, two or three dimensions.
///
/// Each Delaunay simplex enters at the smallest radius `r` for which the
/// radius-`r` balls clipped to the Voronoi cells of its vertices have a
/// common point. Repeated points become separate vertices joined to their
/// first copy by an edge at radius 0.
pub fn alpha_filtration(cloud: &PointCloud) -> Result<FilteredComplex> {
    match cloud.dim() {
        1 => Ok(alpha_1d(cloud)),
        2 | 3 => Ok(alpha_from_triangulation(&delaunay(cloud)?)),
        d => Err(Error::DimensionUnsupported(d)),
    }
}

fn alpha_1d(cloud: &PointCloud) -> FilteredComplex {
    let x = cloud.coords();
    let mut order: Vec<u32> = (0..x.len() as u32).collect();
    order.sort_by(|&a, &b| x[a as usize].total_cmp(&x[b as usize]).then(a.cmp(&b)));
    let mut cells: Vec<(Simplex, f64)> = order.iter().map(|&i| (smallvec![i], 0.0)).collect();
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        let r = 0.5 * (x[b as usize] - x[a as usize]);
        cells.push((smallvec![a.min(b), a.max(b)], r));
    }
    FilteredComplex::new(cells)
}

/// Alpha values for all faces of a Delaunay triangulation.
pub fn alpha_from_triangulation(tri: &Triangulation) -> FilteredComplex {
    let cloud = tri.cloud();
    let top = cloud.dim();
    let pts = |s: &[u32]| -> Vec<&[f64]> { s.iter().map(|&i| cloud.point(i as usize)).collect() };

    let mut out: Vec<(Simplex, f64)> = Vec::new();
    let mut level: Vec<Simplex> = tri.cells().to_vec();
    let mut values: Vec<f64> = level
        .iter()
        .map(|c| circumball(&pts(c)).map_or(f64::INFINITY, |(_, r2)| r2.sqrt()))
        .collect();

    for _ in (1..top).rev() {
        let mut index: HashMap<Simplex, usize> = HashMap::with_capacity(level.len() * 2);
        let mut faces: Vec<Simplex> = Vec::new();
        let mut balls: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut attached: Vec<bool> = Vec::new();
        let mut coface_min: Vec<f64> = Vec::new();
        for (tau, &val) in level.iter().zip(&values) {
            for skip in 0..tau.len() {
                let sigma: Simplex =
                    tau.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                let id = *index.entry(sigma.clone()).or_insert_with(|| {
                    let ball = circumball(&pts(&sigma)).expect("Delaunay face is degenerate");
                    faces.push(sigma);
                    balls.push(ball);
                    attached.push(false);
                    coface_min.push(f64::INFINITY);
                    faces.len() - 1
                });
                coface_min[id] = coface_min[id].min(val);
                if !attached[id] {
                    let (c, r2) = &balls[id];
                    let opposite = cloud.point(tau[skip] as usize);
                    attached[id] = dist2(c, opposite) < r2 * (1.0 - 1e-12);
                }
            }
        }
        out.extend(level.into_iter().zip(values));
        values = (0..faces.len())
            .map(|i| if attached[i] { coface_min[i] } else { balls[i].1.sqrt() })
            .collect();
        level = faces;
    }
    out.extend(level.into_iter().zip(values));
    out.extend((0..cloud.len() as u32).map(|i| (smallvec![i], 0.0)));
    out.extend(tri.duplicates().iter().map(|&(d, r)| (smallvec![d.min(r), d.max(r)], 0.0)));
    FilteredComplex::new(out)
}
