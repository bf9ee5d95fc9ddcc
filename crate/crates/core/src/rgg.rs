//! Random geometric graphs and the proximity snapshots `R_t` of an SPA
//! graph: the first `t` vertices joined when within `r_t = √(A2/(tπ))`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{radius_of_volume, MetricMode, PointSet, SpatialIndex};
use crate::graph::UndirectedGraph;
use crate::rng::{Domain, StreamFamily};
use crate::spa::SpaGraph;

/// Where a geometric graph came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RggOrigin {
    /// Fresh uniform points drawn from `seed`.
    Standalone { seed: u64 },
    /// The first `t` vertices of an SPA graph.
    Snapshot,
    /// Caller-supplied points.
    Fixture,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RggSnapshot {
    /// Vertex count; vertices are `0..t`.
    pub t: usize,
    pub r: f64,
    pub metric: MetricMode,
    pub origin: RggOrigin,
    pub positions: PointSet,
    /// Unordered pairs `(u, v)`, `u < v`, sorted lexicographically.
    pub edges: Vec<(u32, u32)>,
}

impl RggSnapshot {
    /// Build from explicit positions.
    pub fn from_points(positions: PointSet, r: f64, metric: MetricMode) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("radius {r} must be positive")));
        }
        let edges = proximity_edges(&positions, r, metric);
        Ok(Self {
            t: positions.len(),
            r,
            metric,
            origin: RggOrigin::Fixture,
            positions,
            edges,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.t
    }

    /// `M = π·t·r²`, the expected degree scale.
    pub fn density(&self) -> f64 {
        PI * self.t as f64 * self.r * self.r
    }

    pub fn graph(&self) -> UndirectedGraph {
        UndirectedGraph::from_edges(self.t, self.edges.iter().copied()).expect("valid proximity edges")
    }

    pub fn distance(&self, u: u32, v: u32) -> f64 {
        self.metric.distance(self.positions.get(u as usize), self.positions.get(v as usize))
    }
}

fn proximity_edges(points: &PointSet, r: f64, metric: MetricMode) -> Vec<(u32, u32)> {
    let index = SpatialIndex::build(points, r).expect("positive radius");
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            index
                .query_with(points, points.get(i), r, metric)
                .into_iter()
                .filter(|&j| j as usize > i)
                .map(|j| (i as u32, j))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Radius giving mean degree about `density` for `n` points: `√(density/(πn))`.
pub fn radius_for_density(density: f64, n: usize) -> f64 {
    radius_of_volume(density / n as f64, 2)
}

/// `N` uniform points on the unit square, all pairs within `r` joined.
pub fn generate_rgg(n: usize, r: f64, metric: MetricMode, seed: u64) -> Result<RggSnapshot> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let mut rng = StreamFamily::new(seed, Domain::RggPoints).stream(0);
    let positions = PointSet::uniform(2, n, &mut rng);
    let mut g = RggSnapshot::from_points(positions, r, metric)?;
    g.origin = RggOrigin::Standalone { seed };
    Ok(g)
}

/// `r_t = √(A2/(tπ))`, computed through the same volume-to-radius path as
/// the SPA generator so that snapshot edges are exactly SPA edges.
pub fn snapshot_radius(a2: f64, t: usize) -> f64 {
    radius_of_volume(a2 / t as f64, 2)
}

/// The snapshot `R_t` of a two-dimensional SPA graph under the torus metric.
pub fn snapshot(g: &SpaGraph, t: usize) -> Result<RggSnapshot> {
    let params = g.params();
    if params.m != 2 {
        return Err(Error::UnsupportedDimension(params.m));
    }
    if t == 0 || t > params.n {
        return Err(Error::invalid(format!("snapshot size {t} outside 1..={}", params.n)));
    }
    let positions = g.positions().prefix(t);
    let mut s = RggSnapshot::from_points(positions, snapshot_radius(params.a2, t), MetricMode::Torus)?;
    s.origin = RggOrigin::Snapshot;
    Ok(s)
}

/// Sizes `n, ⌊n/2⌋, ⌊n/4⌋, …`, stopping at the first size `≤ ln n` (or 1).
pub fn hierarchy_sizes(n: usize) -> Vec<usize> {
    let cutoff = (n as f64).ln();
    let mut out = Vec::new();
    let mut t = n;
    loop {
        out.push(t);
        if t as f64 <= cutoff || t <= 1 {
            break;
        }
        t /= 2;
    }
    out
}

/// Snapshots at every size of [`hierarchy_sizes`].
pub fn snapshot_hierarchy(g: &SpaGraph) -> Result<Vec<RggSnapshot>> {
    if g.params().m != 2 {
        return Err(Error::UnsupportedDimension(g.params().m));
    }
    hierarchy_sizes(g.num_vertices()).into_iter().map(|t| snapshot(g, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spa::{generate, SpaParams};

    #[test]
    fn single_vertex_has_no_edges() {
        let g = generate_rgg(1, 0.3, MetricMode::Torus, 1).unwrap();
        assert!(g.edges.is_empty());
    }

    #[test]
    fn forced_pair() {
        let pts = PointSet::from_points(2, &[vec![0.1, 0.5], vec![0.15, 0.5]]).unwrap();
        let g = RggSnapshot::from_points(pts, 0.1, MetricMode::Torus).unwrap();
        assert_eq!(g.edges, vec![(0, 1)]);
    }

    #[test]
    fn euclidean_mode_ignores_the_seam() {
        let pts = PointSet::from_points(2, &[vec![0.02, 0.5], vec![0.97, 0.5]]).unwrap();
        let torus = RggSnapshot::from_points(pts.clone(), 0.1, MetricMode::Torus).unwrap();
        let square = RggSnapshot::from_points(pts, 0.1, MetricMode::EuclideanSquare).unwrap();
        assert_eq!(torus.edges.len(), 1);
        assert!(square.edges.is_empty());
    }

    #[test]
    fn snapshot_radius_examples() {
        assert!((snapshot_radius(PI, 100) - 0.1).abs() < 1e-15);
        assert!((snapshot_radius(PI, 400) - 0.05).abs() < 1e-15);
        for t in [1usize, 3, 17, 1000, 65536] {
            let r1 = snapshot_radius(7.5, t);
            let r2 = snapshot_radius(7.5, 2 * t);
            assert!((r2 - r1 / 2f64.sqrt()).abs() <= 1e-12 * r1);
            // r² · t is the constant A2/π
            let c1 = r1 * r1 * t as f64;
            let c2 = r2 * r2 * (2 * t) as f64;
            assert!((c1 - c2).abs() <= 1e-12 * c1);
        }
    }

    #[test]
    fn hierarchy_sizes_examples() {
        assert_eq!(hierarchy_sizes(16), vec![16, 8, 4, 2]);
        assert_eq!(hierarchy_sizes(2), vec![2, 1]);
        assert_eq!(hierarchy_sizes(1), vec![1]);
    }

    #[test]
    fn snapshot_errors() {
        let g = generate(&SpaParams { m: 3, a1: 0.5, a2: 1.0, p: 1.0, n: 10, seed: 0 }).unwrap();
        assert!(matches!(snapshot(&g, 5), Err(Error::UnsupportedDimension(3))));
        let g = generate(&SpaParams { m: 2, a1: 0.5, a2: 1.0, p: 1.0, n: 10, seed: 0 }).unwrap();
        assert!(snapshot(&g, 11).is_err());
        assert_eq!(snapshot(&g, 10).unwrap().t, 10);
    }

    #[test]
    fn snapshots_are_subgraphs_when_p_is_one() {
        let g = generate(&SpaParams { m: 2, a1: 0.5, a2: 8.0, p: 1.0, n: 1500, seed: 4 }).unwrap();
        let und = g.undirected();
        for s in snapshot_hierarchy(&g).unwrap() {
            for &(i, j) in &s.edges {
                assert!(und.neighbours(j).binary_search(&i).is_ok(), "t={} edge ({i},{j})", s.t);
            }
        }
    }
}
