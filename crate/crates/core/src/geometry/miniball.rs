//! Smallest enclosing balls (Welzl's algorithm).

use serde::{Deserialize, Serialize};

use super::circum::{circumball, dist2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        dist2(&self.center, p).sqrt() <= self.radius * (1.0 + 1e-12) + 1e-12
    }
}

/// Smallest ball containing every point. Points must share one dimension
/// and the slice must be non-empty.
pub fn miniball(points: &[&[f64]]) -> Ball {
    assert!(!points.is_empty(), "miniball of an empty set");
    let dim = points[0].len();
    let mut support = Vec::with_capacity(dim + 1);
    welzl(points, points.len(), &mut support, dim)
}

fn welzl<'a>(points: &[&'a [f64]], k: usize, support: &mut Vec<&'a [f64]>, dim: usize) -> Ball {
    if k == 0 || support.len() == dim + 1 {
        return ball_through(support, dim);
    }
    let p = points[k - 1];
    let ball = welzl(points, k - 1, support, dim);
    if ball.contains(p) {
        return ball;
    }
    support.push(p);
    let ball = welzl(points, k - 1, support, dim);
    support.pop();
    ball
}

fn ball_through(support: &[&[f64]], dim: usize) -> Ball {
    if support.is_empty() {
        return Ball { center: vec![0.0; dim], radius: -1.0 };
    }
    match circumball(support) {
        Some((center, r2)) => Ball { center, radius: r2.sqrt() },
        None => {
            // numerically dependent support: span its farthest pair
            let mut best = (0, 0, -1.0);
            for i in 0..support.len() {
                for j in i + 1..support.len() {
                    let d = dist2(support[i], support[j]);
                    if d > best.2 {
                        best = (i, j, d);
                    }
                }
            }
            let (c, r2) = circumball(&[support[best.0], support[best.1]]).expect("two points");
            Ball { center: c, radius: r2.sqrt() }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let b = miniball(&[&[1.0, 2.0]]);
        assert_eq!(b.center, vec![1.0, 2.0]);
        assert_eq!(b.radius, 0.0);
        let b = miniball(&[&[0.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(b.center, vec![1.0, 0.0]);
        assert_eq!(b.radius, 1.0);
    }

    #[test]
    fn acute_triangle_uses_circumcircle() {
        let b = miniball(&[&[0.0, 0.0], &[2.0, 0.0], &[1.0, 10.0]]);
        // center (1, y) equidistant: 1 + y^2 = (10 - y)^2
        let y: f64 = 99.0 / 20.0;
        let r = (1.0 + y * y).sqrt();
        assert!((b.radius - r).abs() < 1e-12);
        assert!((b.radius - 5.05).abs() < 1e-12);
        assert!((b.center[1] - y).abs() < 1e-12);
    }

    #[test]
    fn obtuse_triangle_uses_long_edge() {
        let b = miniball(&[&[0.0, 0.0], &[4.0, 0.0], &[2.0, 1.0]]);
        assert!((b.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn contains_every_point() {
        let pts: Vec<Vec<f64>> =
            (0..40).map(|i| vec![(i as f64 * 0.7).sin() * 3.0, (i as f64 * 1.3).cos(), (i as f64 * 0.37).sin()]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let b = miniball(&refs);
        for p in &refs {
            assert!(dist2(&b.center, p).sqrt() <= b.radius + 1e-9);
        }
        // no smaller ball around the same center works
        let worst = refs.iter().map(|p| dist2(&b.center, p).sqrt()).fold(0.0, f64::max);
        assert!((worst - b.radius).abs() < 1e-9);
    }
}
