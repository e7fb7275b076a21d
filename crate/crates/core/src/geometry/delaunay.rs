//! Incremental Bowyer–Watson Delaunay triangulation in two and three
//! dimensions.
//!
//! The convex hull is closed off with "ghost" cells that share a single
//! vertex at infinity, so no bounding super-simplex is needed. Points are
//! inserted in a seeded shuffled order; each insertion walks to a conflicting
//! cell, grows the conflict cavity and re-stars it from the new point.
//! The output cell list is canonical (sorted vertices, sorted cells), and
//! with exact predicates plus index-order perturbation it does not depend on
//! the insertion order.

use rand::seq::SliceRandom;

use super::predicates::{collinear3, insphere_exact, insphere_perturbed, orient, P3};
use super::{PointCloud, Simplex};
use crate::error::{Error, Result};
use crate::rng::{stream, Domain};

const INF: u32 = u32::MAX;
const INSERTION_SEED: u64 = 0x5EED_DE1A_u64;

/// Delaunay triangulation of the distinct points of a cloud.
#[derive(Debug, Clone)]
pub struct Triangulation {
    cloud: PointCloud,
    cells: Vec<Simplex>,
    /// `(duplicate, representative)` for points that coincide exactly with
    /// an earlier point; duplicates are not vertices of any cell.
    duplicates: Vec<(u32, u32)>,
}

impl Triangulation {
    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    /// Maximal cells, each with `dim + 1` ascending vertex indices, sorted.
    pub fn cells(&self) -> &[Simplex] {
        &self.cells
    }

    pub fn duplicates(&self) -> &[(u32, u32)] {
        &self.duplicates
    }

    /// Points strictly inside the circumsphere of some cell, as
    /// `(cell index, point index)`. Empty for a valid triangulation.
    pub fn delaunay_violations(&self) -> Vec<(usize, usize)> {
        let dim = self.cloud.dim();
        let pts = lift(&self.cloud);
        let mut out = Vec::new();
        for (ci, cell) in self.cells.iter().enumerate() {
            let mut v: Vec<&P3> = cell.iter().map(|&i| &pts[i as usize]).collect();
            if orient(dim, &v) < 0 {
                v.swap(0, 1);
            }
            for (pi, p) in pts.iter().enumerate() {
                if cell.contains(&(pi as u32)) {
                    continue;
                }
                if insphere_exact(dim, &v, p) > 0 {
                    out.push((ci, pi));
                }
            }
        }
        out
    }
}

fn lift(cloud: &PointCloud) -> Vec<P3> {
    cloud
        .iter()
        .map(|p| {
            let mut q = [0.0; 3];
            q[..p.len()].copy_from_slice(p);
            q
        })
        .collect()
}

/// Delaunay triangulation of a 2D or 3D cloud.
pub fn delaunay(cloud: &PointCloud) -> Result<Triangulation> {
    let dim = cloud.dim();
    if !(2..=3).contains(&dim) {
        return Err(Error::DimensionUnsupported(dim));
    }
    let pts = lift(cloud);

    // exact duplicates are set aside
    let mut order: Vec<u32> = (0..pts.len() as u32).collect();
    order.sort_by(|&a, &b| {
        pts[a as usize]
            .iter()
            .zip(&pts[b as usize])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut duplicates = Vec::new();
    let mut unique = Vec::with_capacity(pts.len());
    let mut rep = order[0];
    unique.push(rep);
    for &i in &order[1..] {
        if pts[i as usize] == pts[rep as usize] {
            duplicates.push((i, rep));
        } else {
            rep = i;
            unique.push(i);
        }
    }
    duplicates.sort_unstable();
    unique.sort_unstable();

    let mut rng = stream(INSERTION_SEED, Domain::Insertion, unique.len() as u64);
    unique.shuffle(&mut rng);

    let mut cells = match dim {
        2 => BowyerWatson::<3>::run(&pts, unique)?,
        _ => BowyerWatson::<4>::run(&pts, unique)?,
    };
    cells.sort_unstable();
    Ok(Triangulation {
        cloud: cloud.clone(),
        cells: cells.into_iter().map(|c| c.into_iter().collect()).collect(),
        duplicates,
    })
}

#[derive(Debug, Clone, Copy)]
struct Cell<const N: usize> {
    v: [u32; N],
    nb: [u32; N],
    alive: bool,
}

struct BowyerWatson<'a, const N: usize> {
    pts: &'a [P3],
    cells: Vec<Cell<N>>,
    free: Vec<u32>,
    in_cavity: Vec<u32>,
    rejected: Vec<u32>,
    stamp: u32,
    hint: u32,
}

struct NewCell<const N: usize> {
    v: [u32; N],
    apex: usize,
    outside: u32,
    outside_slot: usize,
}

impl<'a, const N: usize> BowyerWatson<'a, N> {
    const DIM: usize = N - 1;

    fn run(pts: &'a [P3], order: Vec<u32>) -> Result<Vec<Vec<u32>>> {
        let dim = Self::DIM;
        let seed = Self::initial_simplex(pts, &order).ok_or_else(|| {
            Error::DegenerateInput(format!("all points lie in a common affine subspace of dimension < {dim}"))
        })?;
        let mut bw = BowyerWatson {
            pts,
            cells: Vec::with_capacity(order.len() * 2 * dim + 8),
            free: Vec::new(),
            in_cavity: Vec::new(),
            rejected: Vec::new(),
            stamp: 0,
            hint: 0,
        };
        bw.init(seed);
        for &q in &order {
            if !seed.contains(&q) {
                bw.insert(q);
            }
        }
        Ok(bw
            .cells
            .iter()
            .filter(|c| c.alive && !c.v.contains(&INF))
            .map(|c| {
                let mut v = c.v.to_vec();
                v.sort_unstable();
                v
            })
            .collect())
    }

    fn initial_simplex(pts: &[P3], order: &[u32]) -> Option<[u32; N]> {
        let mut chosen = [INF; N];
        let mut k = 0;
        for &i in order {
            let p = &pts[i as usize];
            let ok = match k {
                0 | 1 => true,
                2 => {
                    let (a, b) = (&pts[chosen[0] as usize], &pts[chosen[1] as usize]);
                    if Self::DIM == 2 {
                        orient(2, &[a, b, p]) != 0
                    } else {
                        !collinear3(a, b, p)
                    }
                }
                _ => {
                    let q: Vec<&P3> = chosen[..3].iter().map(|&c| &pts[c as usize]).collect();
                    orient(3, &[q[0], q[1], q[2], p]) != 0
                }
            };
            if ok {
                chosen[k] = i;
                k += 1;
                if k == N {
                    return Some(chosen);
                }
            }
        }
        None
    }

    fn point(&self, i: u32) -> &'a P3 {
        &self.pts[i as usize]
    }

    fn orient_with(&self, v: &[u32; N], slot: usize, q: u32) -> i8 {
        let mut p: [&P3; N] = [self.point(q); N];
        for (k, &x) in v.iter().enumerate() {
            if k != slot {
                p[k] = self.point(x);
            }
        }
        orient(Self::DIM, &p)
    }

    fn finite_conflict(&self, c: u32, q: u32) -> bool {
        let cell = &self.cells[c as usize];
        let p: [&P3; N] = std::array::from_fn(|k| self.point(cell.v[k]));
        let mut ids = [0u32; 5];
        ids[..N].copy_from_slice(&cell.v);
        ids[N] = q;
        insphere_perturbed(Self::DIM, &p, self.point(q), &ids[..N + 1]) > 0
    }

    fn in_conflict(&self, c: u32, q: u32) -> bool {
        let cell = &self.cells[c as usize];
        match cell.v.iter().position(|&x| x == INF) {
            None => self.finite_conflict(c, q),
            Some(k) => match self.orient_with(&cell.v, k, q) {
                1 => true,
                -1 => false,
                _ => self.finite_conflict(cell.nb[k], q),
            },
        }
    }

    fn alloc(&mut self, cell: Cell<N>) -> u32 {
        match self.free.pop() {
            Some(id) => {
                self.cells[id as usize] = cell;
                id
            }
            None => {
                self.cells.push(cell);
                self.in_cavity.push(0);
                self.rejected.push(0);
                (self.cells.len() - 1) as u32
            }
        }
    }

    fn init(&mut self, seed: [u32; N]) {
        let mut v = seed;
        let p: [&P3; N] = std::array::from_fn(|k| self.point(v[k]));
        if orient(Self::DIM, &p) < 0 {
            v.swap(0, 1);
        }
        let mut all = vec![v];
        for i in 0..N {
            let mut g = v;
            g[i] = INF;
            // flip so that substituting an outside point for INF is positive
            let (a, b) = if i == 0 { (1, 2) } else if i == 1 { (0, 2) } else { (0, 1) };
            g.swap(a, b);
            all.push(g);
        }
        let ids: Vec<u32> =
            all.into_iter().map(|v| self.alloc(Cell { v, nb: [INF; N], alive: true })).collect();
        self.link(&ids);
        self.hint = ids[0];
    }

    /// Pairs up the facets of the given cells that are still unlinked.
    fn link(&mut self, ids: &[u32]) {
        let mut facets: Vec<([u32; 3], u32, usize)> = Vec::with_capacity(ids.len() * N);
        for &c in ids {
            let cell = &self.cells[c as usize];
            for k in 0..N {
                if cell.nb[k] != INF {
                    continue;
                }
                let mut key = [0u32; 3];
                let mut j = 0;
                for (s, &x) in cell.v.iter().enumerate() {
                    if s != k {
                        key[j] = x;
                        j += 1;
                    }
                }
                key[..N - 1].sort_unstable();
                facets.push((key, c, k));
            }
        }
        facets.sort_unstable();
        for pair in facets.chunks(2) {
            debug_assert!(pair.len() == 2 && pair[0].0 == pair[1].0, "unmatched facet");
            if let [(_, a, ka), (_, b, kb)] = *pair {
                self.cells[a as usize].nb[ka] = b;
                self.cells[b as usize].nb[kb] = a;
            }
        }
    }

    fn locate(&self, q: u32) -> u32 {
        let mut c = self.hint;
        if !self.cells[c as usize].alive {
            c = self.cells.iter().position(|c| c.alive).expect("no live cell") as u32;
        }
        let limit = 4 * self.cells.len() + 16;
        let mut steps = 0usize;
        'walk: while steps < limit {
            let cell = &self.cells[c as usize];
            if cell.v.contains(&INF) {
                if self.in_conflict(c, q) {
                    return c;
                }
                break;
            }
            for t in 0..N {
                let i = (t + steps) % N;
                if self.orient_with(&cell.v, i, q) < 0 {
                    c = cell.nb[i];
                    steps += 1;
                    continue 'walk;
                }
            }
            return c;
        }
        (0..self.cells.len() as u32)
            .find(|&c| self.cells[c as usize].alive && self.in_conflict(c, q))
            .expect("point conflicts with no cell")
    }

    fn insert(&mut self, q: u32) {
        self.stamp += 1;
        let stamp = self.stamp;
        let start = self.locate(q);
        debug_assert!(self.in_conflict(start, q));

        let mut cavity = vec![start];
        self.in_cavity[start as usize] = stamp;
        let mut fresh: Vec<NewCell<N>> = Vec::new();
        let mut next = 0;
        while next < cavity.len() {
            let c = cavity[next];
            next += 1;
            for i in 0..N {
                let nbc = self.cells[c as usize].nb[i];
                if self.in_cavity[nbc as usize] == stamp {
                    continue;
                }
                if self.rejected[nbc as usize] != stamp {
                    if self.in_conflict(nbc, q) {
                        self.in_cavity[nbc as usize] = stamp;
                        cavity.push(nbc);
                        continue;
                    }
                    self.rejected[nbc as usize] = stamp;
                }
                let outside = &self.cells[nbc as usize];
                let outside_slot = outside.nb.iter().position(|&x| x == c).expect("broken adjacency");
                let mut v = self.cells[c as usize].v;
                v[i] = q;
                fresh.push(NewCell { v, apex: i, outside: nbc, outside_slot });
            }
        }

        for &c in &cavity {
            self.cells[c as usize].alive = false;
            self.free.push(c);
        }
        let mut ids = Vec::with_capacity(fresh.len());
        for f in &fresh {
            let mut nb = [INF; N];
            nb[f.apex] = f.outside;
            let id = self.alloc(Cell { v: f.v, nb, alive: true });
            self.cells[f.outside as usize].nb[f.outside_slot] = id;
            if !f.v.contains(&INF) {
                self.hint = id;
            }
            ids.push(id);
        }
        self.link(&ids);
    }
}
