//! Components, subsquare occupancy, slab crossings and distance stretch on
//! two-dimensional geometric graphs.

use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{cell_coord, PointSet};
use crate::graph::{bfs_into, Topology, UNREACHED};
use crate::rgg::RggSnapshot;
use crate::rng::{Domain, StreamFamily};

/// Union–find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentLabeling {
    /// Component label per vertex; labels are numbered by smallest member.
    pub labels: Vec<u32>,
    /// Size of each label.
    pub sizes: Vec<usize>,
    /// Largest component size divided by the vertex count.
    pub giant_fraction: f64,
}

impl ComponentLabeling {
    /// Label of a largest component (the smallest such label).
    pub fn giant_label(&self) -> Option<u32> {
        let max = *self.sizes.iter().max()?;
        self.sizes.iter().position(|&s| s == max).map(|l| l as u32)
    }

    /// Members of component `label`, ascending.
    pub fn members(&self, label: u32) -> Vec<u32> {
        (0..self.labels.len() as u32).filter(|&v| self.labels[v as usize] == label).collect()
    }

    pub fn num_components(&self) -> usize {
        self.sizes.len()
    }

    /// Number of unordered pairs of distinct connected vertices.
    pub fn connected_pairs(&self) -> u64 {
        self.sizes.iter().map(|&s| (s as u64) * (s as u64).saturating_sub(1) / 2).sum()
    }
}

pub fn connected_components<G: Topology>(g: &G) -> ComponentLabeling {
    let n = g.num_vertices();
    let mut dsu = DisjointSets::new(n);
    for v in 0..n as u32 {
        g.for_each_neighbour(v, |w| {
            if w > v {
                dsu.union(v, w);
            }
        });
    }
    let mut root_label = vec![u32::MAX; n];
    let mut labels = vec![0u32; n];
    let mut sizes = Vec::new();
    for v in 0..n as u32 {
        let r = dsu.find(v) as usize;
        if root_label[r] == u32::MAX {
            root_label[r] = sizes.len() as u32;
            sizes.push(0);
        }
        labels[v as usize] = root_label[r];
        sizes[root_label[r] as usize] += 1;
    }
    let giant = sizes.iter().copied().max().unwrap_or(0);
    ComponentLabeling {
        labels,
        sizes,
        giant_fraction: if n == 0 { 0.0 } else { giant as f64 / n as f64 },
    }
}

/// Occupancy of a `g × g` subdivision of the unit square; each cell
/// remembers its lowest vertex id.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    pub cells_per_axis: usize,
    lowest: Vec<u32>,
}

impl OccupancyGrid {
    pub fn from_points(points: &PointSet, cells_per_axis: usize) -> Self {
        let g = cells_per_axis;
        let mut lowest = vec![u32::MAX; g * g];
        for (i, p) in points.iter().enumerate() {
            let c = cell_coord(p[1], g) * g + cell_coord(p[0], g);
            lowest[c] = lowest[c].min(i as u32);
        }
        Self { cells_per_axis: g, lowest }
    }

    /// Lowest vertex id in cell (column `x`, row `y`), if occupied.
    pub fn vertex(&self, x: usize, y: usize) -> Option<u32> {
        let v = self.lowest[y * self.cells_per_axis + x];
        (v != u32::MAX).then_some(v)
    }

    pub fn is_occupied(&self, x: usize, y: usize) -> bool {
        self.vertex(x, y).is_some()
    }

    pub fn occupied_count(&self) -> usize {
        self.lowest.iter().filter(|&&v| v != u32::MAX).count()
    }
}

/// Subdivide into `⌈5/r⌉²` subsquares (side `≤ r/5`) and mark occupancy.
pub fn subsquare_occupancy(snapshot: &RggSnapshot) -> Result<OccupancyGrid> {
    if snapshot.positions.dim() != 2 {
        return Err(Error::UnsupportedDimension(snapshot.positions.dim()));
    }
    let g = (5.0 / snapshot.r).ceil().max(1.0) as usize;
    Ok(OccupancyGrid::from_points(&snapshot.positions, g))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlabCrossing {
    pub crossed: bool,
    /// Vertex path, one vertex per subsquare of the crossing.
    pub path: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingReport {
    /// Nominal slab width `W = M·r·ln N`.
    pub w: f64,
    pub num_slabs: usize,
    /// Width actually used, `1/num_slabs`.
    pub slab_width: f64,
    pub subsquares_per_axis: usize,
    pub horizontal: Vec<SlabCrossing>,
    pub vertical: Vec<SlabCrossing>,
    pub spanning_label: Option<u32>,
}

impl CrossingReport {
    pub fn all_crossed(&self) -> bool {
        self.horizontal.iter().chain(&self.vertical).all(|c| c.crossed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Breadth-first flood over occupied cells of a `width × height` window,
/// from column 0 to column `width - 1`. `occupied(col, row)` addresses the
/// window. Returns the cell path, column-major start to end.
fn flood_crossing(
    width: usize,
    height: usize,
    occupied: impl Fn(usize, usize) -> bool,
) -> Option<Vec<(usize, usize)>> {
    let idx = |c: usize, r: usize| r * width + c;
    let mut prev = vec![usize::MAX; width * height];
    let mut seen = vec![false; width * height];
    let mut queue = VecDeque::new();
    for r in 0..height {
        if occupied(0, r) {
            seen[idx(0, r)] = true;
            queue.push_back((0, r));
        }
    }
    while let Some((c, r)) = queue.pop_front() {
        if c == width - 1 {
            let mut path = vec![(c, r)];
            let mut cur = idx(c, r);
            while prev[cur] != usize::MAX {
                cur = prev[cur];
                path.push((cur % width, cur / width));
            }
            path.reverse();
            return Some(path);
        }
        let mut step = |nc: usize, nr: usize| {
            let k = idx(nc, nr);
            if !seen[k] && occupied(nc, nr) {
                seen[k] = true;
                prev[k] = idx(c, r);
                queue.push_back((nc, nr));
            }
        };
        if c + 1 < width {
            step(c + 1, r);
        }
        if c > 0 {
            step(c - 1, r);
        }
        if r + 1 < height {
            step(c, r + 1);
        }
        if r > 0 {
            step(c, r - 1);
        }
    }
    None
}

/// Search every horizontal slab for a left-to-right crossing and every
/// vertical slab for a top-to-bottom crossing, on the unit square without
/// wraparound.
pub fn find_crossings(snapshot: &RggSnapshot) -> Result<CrossingReport> {
    if snapshot.positions.dim() != 2 {
        return Err(Error::UnsupportedDimension(snapshot.positions.dim()));
    }
    let n = snapshot.num_vertices();
    if n < 3 {
        return Err(Error::invalid(format!("crossings need N >= 3, got {n}")));
    }
    let r = snapshot.r;
    let w = snapshot.density() * r * (n as f64).ln();
    let num_slabs = ((1.0 / w).floor() as usize).max(1);
    let slab_width = 1.0 / num_slabs as f64;
    let per_slab = (5.0 * slab_width / r).ceil();
    if per_slab < 5.0 {
        return Err(Error::DegenerateGeometry(format!(
            "radius {r} leaves only {per_slab} subsquares per slab side"
        )));
    }
    let per_slab = per_slab as usize;
    let g = per_slab * num_slabs;
    let grid = OccupancyGrid::from_points(&snapshot.positions, g);

    let to_vertices = |cells: Vec<(usize, usize)>| -> Vec<u32> {
        cells.into_iter().map(|(x, y)| grid.vertex(x, y).expect("occupied")).collect()
    };
    let crossing = |cells: Option<Vec<(usize, usize)>>| match cells {
        Some(c) => SlabCrossing { crossed: true, path: to_vertices(c) },
        None => SlabCrossing { crossed: false, path: Vec::new() },
    };

    let mut horizontal = Vec::with_capacity(num_slabs);
    let mut vertical = Vec::with_capacity(num_slabs);
    for s in 0..num_slabs {
        let row0 = s * per_slab;
        let h = flood_crossing(g, per_slab, |c, r| grid.is_occupied(c, row0 + r))
            .map(|p| p.into_iter().map(|(c, r)| (c, row0 + r)).collect());
        horizontal.push(crossing(h));
        let col0 = s * per_slab;
        // transpose: window column = grid row
        let v = flood_crossing(g, per_slab, |c, r| grid.is_occupied(col0 + r, c))
            .map(|p| p.into_iter().map(|(c, r)| (col0 + r, c)).collect());
        vertical.push(crossing(v));
    }

    let mut report = CrossingReport {
        w,
        num_slabs,
        slab_width,
        subsquares_per_axis: g,
        horizontal,
        vertical,
        spanning_label: None,
    };
    if report.all_crossed() {
        let labels = connected_components(&snapshot.graph()).labels;
        let first = labels[report.horizontal[0].path[0] as usize];
        let shared = report
            .horizontal
            .iter()
            .chain(&report.vertical)
            .flat_map(|c| &c.path)
            .all(|&v| labels[v as usize] == first);
        if shared {
            report.spanning_label = Some(first);
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StretchSample {
    pub u: u32,
    pub v: u32,
    /// Distance under the snapshot's metric.
    pub d_e: f64,
    /// Hop distance.
    pub d_graph: u32,
}

impl StretchSample {
    /// `d_graph · r / d_E`.
    pub fn ratio(&self, r: f64) -> f64 {
        self.d_graph as f64 * r / self.d_e
    }
}

/// Sample `num_pairs` uniformly random connected pairs and record their
/// metric and hop distances. Returns an empty list when no connected pair
/// exists.
pub fn distance_stretch(
    snapshot: &RggSnapshot,
    labeling: &ComponentLabeling,
    num_pairs: usize,
    seed: u64,
) -> Result<Vec<StretchSample>> {
    if num_pairs == 0 {
        return Err(Error::invalid("num_pairs must be at least 1"));
    }
    let n = snapshot.num_vertices();
    if labeling.labels.len() != n {
        return Err(Error::invalid("labeling does not match the snapshot"));
    }
    if labeling.connected_pairs() == 0 {
        return Ok(Vec::new());
    }
    // ordered pairs: component chosen with weight s(s-1), then two distinct members
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); labeling.sizes.len()];
    for (v, &l) in labeling.labels.iter().enumerate() {
        members[l as usize].push(v as u32);
    }
    let mut cumulative = Vec::with_capacity(members.len());
    let mut total = 0u64;
    for m in &members {
        let s = m.len() as u64;
        total += s * s.saturating_sub(1);
        cumulative.push(total);
    }
    let mut rng = StreamFamily::new(seed, Domain::PairSampling).stream(0);
    let mut pairs = Vec::with_capacity(num_pairs);
    for _ in 0..num_pairs {
        let x = rng.random_range(0..total);
        let comp = &members[cumulative.partition_point(|&c| c <= x)];
        let i = rng.random_range(0..comp.len());
        let mut j = rng.random_range(0..comp.len() - 1);
        if j >= i {
            j += 1;
        }
        pairs.push((comp[i], comp[j]));
    }
    let graph = snapshot.graph();
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&k| pairs[k].0);
    let mut out = vec![None; pairs.len()];
    let (mut dist, mut queue) = (Vec::new(), Vec::new());
    let mut current = u32::MAX;
    for k in order {
        let (u, v) = pairs[k];
        if u != current {
            bfs_into(&graph, u, &mut dist, &mut queue);
            current = u;
        }
        debug_assert_ne!(dist[v as usize], UNREACHED);
        out[k] = Some(StretchSample {
            u,
            v,
            d_e: snapshot.distance(u, v),
            d_graph: dist[v as usize],
        });
    }
    Ok(out.into_iter().map(|s| s.expect("filled")).collect())
}

/// Empirical stretch `η̂ = max d_graph·r/d_E` over samples with
/// `d_E ≥ Γ̂·ln N/(rN)`.
pub fn empirical_stretch(samples: &[StretchSample], r: f64, n: usize, gamma_hat: f64) -> Option<f64> {
    let min_d = gamma_hat * (n as f64).ln() / (r * n as f64);
    samples
        .iter()
        .filter(|s| s.d_e >= min_d && s.d_e > 0.0)
        .map(|s| s.ratio(r))
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricMode;
    use crate::graph::UndirectedGraph;

    #[test]
    fn components_of_trivial_graphs() {
        let empty = UndirectedGraph::empty(5);
        let c = connected_components(&empty);
        assert_eq!(c.num_components(), 5);
        assert!((c.giant_fraction - 0.2).abs() < 1e-15);

        let cycle = UndirectedGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let c = connected_components(&cycle);
        assert_eq!(c.num_components(), 1);
        assert_eq!(c.giant_fraction, 1.0);
    }

    #[test]
    fn labels_partition_by_connectivity() {
        let g = UndirectedGraph::from_edges(6, [(0, 3), (3, 5), (1, 2)]).unwrap();
        let c = connected_components(&g);
        assert_eq!(c.labels, vec![0, 1, 1, 0, 2, 0]);
        assert_eq!(c.sizes, vec![3, 2, 1]);
        assert_eq!(c.giant_label(), Some(0));
        assert_eq!(c.connected_pairs(), 3 + 1);
    }

    #[test]
    fn occupancy_examples() {
        let empty = RggSnapshot::from_points(PointSet::new(2), 0.5, MetricMode::Torus).unwrap();
        assert_eq!(subsquare_occupancy(&empty).unwrap().occupied_count(), 0);

        let one = RggSnapshot::from_points(PointSet::from_points(2, &[vec![0.5, 0.5]]).unwrap(), 0.5, MetricMode::Torus)
            .unwrap();
        let grid = subsquare_occupancy(&one).unwrap();
        assert_eq!(grid.cells_per_axis, 10);
        assert_eq!(grid.occupied_count(), 1);
        assert!(grid.is_occupied(5, 5));
    }

    fn row_fixture(r: f64, y: f64) -> RggSnapshot {
        let k = (5.0 / r).ceil() as usize;
        let pts: Vec<Vec<f64>> = (0..k).map(|i| vec![i as f64 * r / 5.0 + r / 10.0, y]).collect();
        RggSnapshot::from_points(PointSet::from_points(2, &pts).unwrap(), r, MetricMode::EuclideanSquare).unwrap()
    }

    #[test]
    fn row_of_points_crosses() {
        let s = row_fixture(0.1, 0.5);
        let rep = find_crossings(&s).unwrap();
        assert_eq!(rep.num_slabs, 1);
        assert!(rep.horizontal[0].crossed);
        assert_eq!(rep.horizontal[0].path.len(), 50);
        assert!(!rep.vertical[0].crossed);
        assert_eq!(rep.spanning_label, None);
        for w in rep.horizontal[0].path.windows(2) {
            assert!(s.distance(w[0], w[1]) < s.r / 2.0);
        }
    }

    #[test]
    fn confined_points_never_cross() {
        let pts: Vec<Vec<f64>> = (0..400).map(|i| vec![(i % 20) as f64 * 0.02, (i / 20) as f64 * 0.05]).collect();
        let s = RggSnapshot::from_points(PointSet::from_points(2, &pts).unwrap(), 0.1, MetricMode::Torus).unwrap();
        let rep = find_crossings(&s).unwrap();
        assert!(rep.horizontal.iter().all(|c| !c.crossed));
    }

    #[test]
    fn crossing_errors() {
        let s = row_fixture(0.5, 0.5);
        let two = RggSnapshot::from_points(s.positions.prefix(2), 0.5, MetricMode::Torus).unwrap();
        assert!(find_crossings(&two).is_err());
        let big = RggSnapshot::from_points(s.positions.clone(), 1.5, MetricMode::Torus).unwrap();
        assert!(matches!(find_crossings(&big), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn stretch_on_a_single_edge() {
        let pts = PointSet::from_points(2, &[vec![0.2, 0.2], vec![0.25, 0.2], vec![0.8, 0.8]]).unwrap();
        let s = RggSnapshot::from_points(pts, 0.1, MetricMode::Torus).unwrap();
        let labels = connected_components(&s.graph());
        let samples = distance_stretch(&s, &labels, 10, 1).unwrap();
        assert_eq!(samples.len(), 10);
        for smp in &samples {
            assert!(smp.u != 2 && smp.v != 2);
            assert_eq!(smp.d_graph, 1);
            assert!((smp.d_e - 0.05).abs() < 1e-12);
            assert!(smp.ratio(s.r) >= 1.0);
        }
        assert!((empirical_stretch(&samples, 0.1, 3, 0.0).unwrap() - 2.0).abs() < 1e-9);

        let lonely = RggSnapshot::from_points(s.positions.prefix(1), 0.1, MetricMode::Torus).unwrap();
        let labels = connected_components(&lonely.graph());
        assert!(distance_stretch(&lonely, &labels, 5, 1).unwrap().is_empty());
    }
}
