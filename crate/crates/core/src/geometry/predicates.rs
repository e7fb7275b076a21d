//! Orientation and in-sphere predicates for the Delaunay engine.
//!
//! Signs come from Shewchuk's adaptive exact predicates (`robust` crate).
//! Exact co-spherical ties are broken by symbolic perturbation: point `i`
//! has its paraboloid lift raised by `eps^(n - i)`, so the highest original
//! index carries the largest perturbation. The perturbed sign is the sign of
//! the first non-vanishing lift cofactor in decreasing index order.

use robust::{Coord, Coord3D};

pub type P3 = [f64; 3];

#[inline]
fn c2(p: &P3) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

#[inline]
fn c3(p: &P3) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

#[inline]
fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Orientation sign of a simplex given as `dim + 1` points (`dim` in {2, 3}).
///
/// Positive for counter-clockwise triangles, and for tetrahedra in
/// Shewchuk's convention (`d` below the counter-clockwise plane `a, b, c`).
#[inline]
pub fn orient(dim: usize, p: &[&P3]) -> i8 {
    match dim {
        2 => sign(robust::orient2d(c2(p[0]), c2(p[1]), c2(p[2]))),
        3 => sign(robust::orient3d(c3(p[0]), c3(p[1]), c3(p[2]), c3(p[3]))),
        _ => unreachable!("orientation only defined for dim 2 and 3"),
    }
}

/// Unperturbed in-sphere sign of `q` against the positively oriented cell `p`.
#[inline]
pub fn insphere_exact(dim: usize, p: &[&P3], q: &P3) -> i8 {
    match dim {
        2 => sign(robust::incircle(c2(p[0]), c2(p[1]), c2(p[2]), c2(q))),
        3 => sign(robust::insphere(c3(p[0]), c3(p[1]), c3(p[2]), c3(p[3]), c3(q))),
        _ => unreachable!(),
    }
}

/// In-sphere sign with index-order symbolic perturbation; never zero for a
/// non-degenerate cell and a point distinct from its vertices.
///
/// `ids` are the original indices of the cell vertices followed by the query.
pub fn insphere_perturbed(dim: usize, p: &[&P3], q: &P3, ids: &[u32]) -> i8 {
    let s = insphere_exact(dim, p, q);
    if s != 0 {
        return s;
    }
    let n = dim + 2;
    debug_assert_eq!(ids.len(), n);
    let mut rows: [&P3; 5] = [q; 5];
    rows[..dim + 1].copy_from_slice(&p[..dim + 1]);
    rows[dim + 1] = q;

    let mut order: [usize; 5] = [0, 1, 2, 3, 4];
    let order = &mut order[..n];
    order.sort_unstable_by(|&a, &b| ids[b].cmp(&ids[a]));
    for &row in order.iter() {
        // cofactor of the lift entry in row `row` of the (n x n) lifted
        // determinant: (-1)^(row + dim) * orient(rows without `row`)
        let mut minor: [&P3; 4] = [q; 4];
        let mut k = 0;
        for (j, r) in rows[..n].iter().enumerate() {
            if j != row {
                minor[k] = r;
                k += 1;
            }
        }
        let o = orient(dim, &minor[..dim + 1]);
        if o != 0 {
            return if (row + dim).is_multiple_of(2) { o } else { -o };
        }
    }
    0
}

/// True when three points in R^3 are collinear (exact).
pub fn collinear3(a: &P3, b: &P3, c: &P3) -> bool {
    let proj = |i: usize, j: usize| {
        robust::orient2d(
            Coord { x: a[i], y: a[j] },
            Coord { x: b[i], y: b[j] },
            Coord { x: c[i], y: c[j] },
        ) == 0.0
    };
    proj(0, 1) && proj(1, 2) && proj(0, 2)
}
