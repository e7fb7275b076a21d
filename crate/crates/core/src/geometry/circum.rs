//! Smallest circumscribing spheres of affinely independent point sets.

/// Center and squared radius of the smallest sphere through all of
/// `points` (the circumsphere within their affine hull).
///
/// Returns `None` when the points are affinely dependent to working
/// precision.
pub fn circumball(points: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = points[0];
    let dim = p0.len();
    let k = points.len() - 1;
    if k == 0 {
        return Some((p0.to_vec(), 0.0));
    }
    if k == 1 {
        let c: Vec<f64> = p0.iter().zip(points[1]).map(|(a, b)| 0.5 * (a + b)).collect();
        return Some((c.clone(), dist2(&c, p0)));
    }
    // center = p0 + sum_j lambda_j (p_j - p0) with G lambda = b / 2
    let u: Vec<Vec<f64>> = points[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let mut g = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in i..k {
            let d = dot(&u[i], &u[j]);
            g[i][j] = d;
            g[j][i] = d;
        }
        g[i][k] = 0.5 * dot(&u[i], &u[i]);
    }
    let lambda = solve(g)?;
    let mut c = p0.to_vec();
    for (l, ui) in lambda.iter().zip(&u) {
        for a in 0..dim {
            c[a] += l * ui[a];
        }
    }
    let r2 = points.iter().map(|p| dist2(&c, p)).fold(0.0, f64::max);
    Some((c, r2))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Gaussian elimination with partial pivoting on an augmented `k x (k+1)`
/// system.
fn solve(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = m.len();
    let scale = m.iter().map(|r| r[..k].iter().fold(0.0f64, |a, v| a.max(v.abs()))).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() <= scale * 1e-13 {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for c in col..=k {
                    m[row][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| m[row][c] * x[c]).sum();
        x[row] = (m[row][k] - s) / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilateral_triangle() {
        let s = 2.0;
        let h = s * 3f64.sqrt() / 2.0;
        let (c, r2) = circumball(&[&[0.0, 0.0], &[s, 0.0], &[1.0, h]]).unwrap();
        assert!((r2.sqrt() - s / 3f64.sqrt()).abs() < 1e-12);
        assert!((c[1] - h / 3.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_in_space_and_tetrahedron() {
        // right angle at the origin: hypotenuse is a diameter
        let (c, r2) = circumball(&[&[0.0, 0.0, 5.0], &[2.0, 0.0, 5.0], &[0.0, 2.0, 5.0]]).unwrap();
        assert!((r2 - 2.0).abs() < 1e-12);
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12 && (c[2] - 5.0).abs() < 1e-12);
        // corner of the unit cube: sphere through 4 cube corners has radius sqrt(3)/2
        let (_, r2) = circumball(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        assert!((r2 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn degenerate_points() {
        assert!(circumball(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]]).is_none());
    }
}
