//! Unit-hypercube geometry: the torus metric, m-ball volume/radius
//! conversion and a uniform grid index for radius queries.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the unit hypercube `[0,1)^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("a point needs at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(Error::invalid(format!("coordinate {c} outside [0,1)")));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Flat storage for a sequence of points of equal dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, n: usize) -> Self {
        let mut s = Self::new(dim);
        s.coords.reserve(n * dim);
        s
    }

    /// `n` independent uniform points.
    pub fn uniform<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> Self {
        let mut s = Self::with_capacity(dim, n);
        for _ in 0..n * dim {
            s.coords.push(rng.random::<f64>());
        }
        s
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut s = Self::with_capacity(dim, points.len());
        for p in points {
            s.push(p)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::invalid(format!(
                "point has dimension {}, expected {}",
                p.len(),
                self.dim
            )));
        }
        if let Some(c) = p.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(Error::invalid(format!("coordinate {c} outside [0,1)")));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point(&self, i: usize) -> Point {
        Point(self.get(i).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> PointSet {
        PointSet {
            dim: self.dim,
            coords: self.coords[..n * self.dim].to_vec(),
        }
    }
}

/// Distance used by random geometric graphs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricMode {
    #[default]
    Torus,
    EuclideanSquare,
}

impl MetricMode {
    #[inline]
    pub fn distance(self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            MetricMode::Torus => torus_dist(p, q),
            MetricMode::EuclideanSquare => euclidean_dist(p, q),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetricMode::Torus => "torus",
            MetricMode::EuclideanSquare => "euclidean-square",
        }
    }
}

impl std::str::FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(MetricMode::Torus),
            "euclidean-square" | "euclidean" => Ok(MetricMode::EuclideanSquare),
            other => Err(Error::invalid(format!("unknown metric mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for MetricMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[inline]
fn wrap_delta(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// Squared torus distance; no dimension check.
#[inline]
pub fn torus_dist_sq(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| {
            let d = wrap_delta(a, b);
            d * d
        })
        .sum()
}

#[inline]
pub fn torus_dist(p: &[f64], q: &[f64]) -> f64 {
    torus_dist_sq(p, q).sqrt()
}

#[inline]
pub fn euclidean_dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Torus distance between two points of the unit hypercube.
pub fn torus_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(torus_dist(p, q))
}

/// Volume of the unit m-ball, `π^{m/2} / Γ(m/2 + 1)`.
pub fn unit_ball_volume(m: usize) -> f64 {
    // c_0 = 1, c_1 = 2, c_m = c_{m-2} · 2π / m
    let mut c = if m.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if m.is_multiple_of(2) { 2 } else { 3 };
    while k <= m {
        c *= 2.0 * PI / k as f64;
        k += 2;
    }
    c
}

pub fn ball_volume(radius: f64, m: usize) -> f64 {
    unit_ball_volume(m) * radius.powi(m as i32)
}

/// Radius of the m-ball with the given volume.
pub fn ball_radius_from_volume(vol: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if vol.is_nan() || vol < 0.0 {
        return Err(Error::invalid(format!("negative volume {vol}")));
    }
    Ok(radius_of_volume(vol, m))
}

/// Unchecked form of [`ball_radius_from_volume`]; used on hot paths where
/// the volume is known to be non-negative.
#[inline]
pub(crate) fn radius_of_volume(vol: f64, m: usize) -> f64 {
    match m {
        1 => vol / 2.0,
        2 => (vol / PI).sqrt(),
        _ => (vol / unit_ball_volume(m)).powf(1.0 / m as f64),
    }
}

/// Cell coordinate of `x` on a grid with `g` cells per axis.
#[inline]
pub(crate) fn cell_coord(x: f64, g: usize) -> usize {
    ((x * g as f64) as usize).min(g - 1)
}

/// All offset vectors in `{-reach..=reach}^m`.
pub(crate) fn stencil(m: usize, reach: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(m)];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-reach..=reach).map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect();
    }
    out
}

/// Uniform grid over the unit torus, bucketing point ids by cell.
///
/// With fewer than three cells per axis the wraparound stencil degenerates;
/// the index then keeps no cells and every query scans all points.
#[derive(Clone, Debug)]
pub struct SpatialIndex {
    dim: usize,
    cells_per_axis: usize,
    cell_size: f64,
    cells: Vec<Vec<u32>>,
    len: usize,
}

impl SpatialIndex {
    /// Build an index whose cells are at least `cell_size` wide.
    pub fn build(points: &PointSet, cell_size: f64) -> Result<Self> {
        if cell_size.is_nan() || cell_size <= 0.0 {
            return Err(Error::invalid("cell size must be positive"));
        }
        let dim = points.dim();
        let g = (1.0 / cell_size).floor();
        let g = if g >= 3.0 { g as usize } else { 0 };
        let total = if g == 0 { 0 } else { g.checked_pow(dim as u32).unwrap_or(usize::MAX) };
        // Grids whose cell count dwarfs the point count only waste memory.
        let (g, total) = if total > points.len().max(1) * 64 + 4096 {
            let g = ((points.len().max(1) * 64 + 4096) as f64).powf(1.0 / dim as f64) as usize;
            if g >= 3 {
                (g, g.pow(dim as u32))
            } else {
                (0, 0)
            }
        } else {
            (g, total)
        };
        let mut cells = vec![Vec::new(); total];
        if g > 0 {
            for (i, p) in points.iter().enumerate() {
                cells[Self::flat_cell(p, g)].push(i as u32);
            }
        }
        Ok(Self {
            dim,
            cells_per_axis: g,
            cell_size: if g > 0 { 1.0 / g as f64 } else { 1.0 },
            cells,
            len: points.len(),
        })
    }

    fn flat_cell(p: &[f64], g: usize) -> usize {
        p.iter().fold(0, |acc, &x| acc * g + cell_coord(x, g))
    }

    /// Effective cell width (1 when the index scans brute force).
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// Number of cells per axis; 0 means brute-force mode.
    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    /// Ids of the points within torus distance `radius` of `center`, sorted.
    pub fn query_ball(&self, points: &PointSet, center: &[f64], radius: f64) -> Vec<u32> {
        self.query_with(points, center, radius, MetricMode::Torus)
    }

    /// Like [`query_ball`](Self::query_ball) under an arbitrary metric mode.
    /// The grid wraps, and Euclidean distance dominates torus distance, so
    /// the torus candidate set covers both.
    pub fn query_with(
        &self,
        points: &PointSet,
        center: &[f64],
        radius: f64,
        mode: MetricMode,
    ) -> Vec<u32> {
        debug_assert_eq!(points.len(), self.len);
        let g = self.cells_per_axis;
        let reach = if g == 0 {
            i64::MAX
        } else {
            (radius / self.cell_size).ceil().max(1.0) as i64
        };
        let mut out = Vec::new();
        if g == 0 || 2 * reach + 1 >= g as i64 {
            for (i, p) in points.iter().enumerate() {
                if mode.distance(p, center) <= radius {
                    out.push(i as u32);
                }
            }
            return out;
        }
        let base: Vec<i64> = center.iter().map(|&x| cell_coord(x, g) as i64).collect();
        for off in stencil(self.dim, reach) {
            let idx = base.iter().zip(&off).fold(0usize, |acc, (&b, &o)| {
                acc * g + (b + o).rem_euclid(g as i64) as usize
            });
            for &id in &self.cells[idx] {
                if mode.distance(points.get(id as usize), center) <= radius {
                    out.push(id);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All unordered pairs `(i, j)`, `i < j`, within `radius`; sorted.
    pub fn pairs_within(&self, points: &PointSet, radius: f64, mode: MetricMode) -> Vec<(u32, u32)> {
        let mut edges = Vec::new();
        for (i, p) in points.iter().enumerate() {
            for j in self.query_with(points, p, radius, mode) {
                if j as usize > i {
                    edges.push((i as u32, j));
                }
            }
        }
        edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torus_distance_examples() {
        assert_eq!(torus_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        let d = torus_distance(&[0.05, 0.0], &[0.95, 0.0]).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        let d = torus_distance(&[0.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(torus_distance(&[0.1], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn ball_radius_examples() {
        assert_eq!(ball_radius_from_volume(0.0, 3).unwrap(), 0.0);
        assert!((ball_radius_from_volume(0.01 * PI, 2).unwrap() - 0.1).abs() < 1e-12);
        assert!((ball_radius_from_volume(0.2, 1).unwrap() - 0.1).abs() < 1e-12);
        assert!(ball_radius_from_volume(-0.1, 2).is_err());
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn point_rejects_out_of_range() {
        assert!(Point::new(vec![0.2, 1.0]).is_err());
        assert!(Point::new(vec![-0.1]).is_err());
        assert_eq!(Point::new(vec![0.0, 0.5]).unwrap().dim(), 2);
    }

    #[test]
    fn query_ball_examples() {
        let center = [0.5, 0.5];
        let pts = PointSet::from_points(
            2,
            &[vec![0.55, 0.5], vec![0.5, 0.6], vec![0.3, 0.5], vec![0.9, 0.9]],
        )
        .unwrap();
        let idx = SpatialIndex::build(&pts, 0.1).unwrap();
        assert_eq!(idx.query_ball(&pts, &center, 0.1), vec![0, 1]);

        let empty = idx.query_ball(&pts, &center, 0.0);
        assert!(empty.is_empty());

        // across the seam
        let pts = PointSet::from_points(2, &[vec![0.98, 0.5], vec![0.5, 0.5]]).unwrap();
        let idx = SpatialIndex::build(&pts, 0.1).unwrap();
        assert_eq!(idx.query_ball(&pts, &[0.03, 0.5], 0.1), vec![0]);
    }

    #[test]
    fn query_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts = PointSet::uniform(2, 10_000, &mut rng);
        let idx = SpatialIndex::build(&pts, 0.02).unwrap();
        for _ in 0..1000 {
            let c = [rng.random::<f64>(), rng.random::<f64>()];
            let r = rng.random::<f64>() * 0.08;
            let brute: Vec<u32> = (0..pts.len() as u32)
                .filter(|&i| torus_dist(pts.get(i as usize), &c) <= r)
                .collect();
            assert_eq!(idx.query_ball(&pts, &c, r), brute);
        }
    }

    #[test]
    fn coarse_grid_falls_back_to_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = PointSet::uniform(3, 200, &mut rng);
        let idx = SpatialIndex::build(&pts, 0.4).unwrap();
        assert_eq!(idx.cells_per_axis(), 0);
        let c = [0.1, 0.2, 0.3];
        let brute: Vec<u32> = (0..200)
            .filter(|&i| torus_dist(pts.get(i as usize), &c) <= 0.3)
            .collect();
        assert_eq!(idx.query_ball(&pts, &c, 0.3), brute);
    }
}
