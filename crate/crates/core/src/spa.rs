//! The spatial preferred attachment process on the unit torus.
//!
//! Vertex `i` (0-based) is born at step `i + 1`. When vertex `v_t` arrives it
//! links to every earlier vertex `u` whose sphere of influence contains it,
//! each independently with probability `p`. The sphere of `u` at step `t`
//! has volume `(A1·deg⁻(u,t) + A2)/t`, where `deg⁻(u,t)` counts the in-edges
//! gained before step `t`; a volume of at least 1 covers the whole torus.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cell_coord, radius_of_volume, stencil, torus_dist_sq, PointSet};
use crate::graph::UndirectedGraph;
use crate::rng::{Domain, StreamFamily};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaParams {
    pub m: usize,
    pub a1: f64,
    pub a2: f64,
    pub p: f64,
    pub n: usize,
    pub seed: u64,
}

impl SpaParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("dimension m must be positive"));
        }
        if !(0.0..1.0).contains(&self.a1) {
            return Err(Error::invalid(format!("A1 = {} must lie in [0,1)", self.a1)));
        }
        if !(self.a2 > 0.0 && self.a2.is_finite()) {
            return Err(Error::invalid(format!("A2 = {} must be positive", self.a2)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::invalid(format!("p = {} must lie in (0,1]", self.p)));
        }
        if self.n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if self.n >= u32::MAX as usize {
            return Err(Error::invalid("n exceeds the 32-bit vertex id range"));
        }
        Ok(())
    }

    /// `p·A1`, the exponent governing degree growth.
    pub fn a(&self) -> f64 {
        self.p * self.a1
    }
}

/// Sphere-of-influence volume `min(1, (A1·indeg + A2)/t)`.
pub fn influence_volume(indeg: u32, t: u32, params: &SpaParams) -> f64 {
    raw_volume(indeg, t, params.a1, params.a2).min(1.0)
}

#[inline]
fn raw_volume(indeg: u32, t: u32, a1: f64, a2: f64) -> f64 {
    (a1 * indeg as f64 + a2) / t as f64
}

/// A sphere of influence: the whole torus, or a ball of the given radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sphere {
    Whole,
    Ball(f64),
}

impl Sphere {
    pub fn of(indeg: u32, t: u32, params: &SpaParams) -> Sphere {
        Self::from_parts(indeg, t, params.a1, params.a2, params.m)
    }

    #[inline]
    fn from_parts(indeg: u32, t: u32, a1: f64, a2: f64, m: usize) -> Sphere {
        let vol = raw_volume(indeg, t, a1, a2);
        if vol >= 1.0 {
            Sphere::Whole
        } else {
            Sphere::Ball(radius_of_volume(vol, m))
        }
    }

    #[inline]
    pub fn contains_at_distance(self, d: f64) -> bool {
        match self {
            Sphere::Whole => true,
            Sphere::Ball(r) => d <= r,
        }
    }

    #[inline]
    fn contains_sq(self, d2: f64) -> bool {
        match self {
            Sphere::Whole => true,
            Sphere::Ball(r) => d2.sqrt() <= r,
        }
    }

    fn radius(self) -> f64 {
        match self {
            Sphere::Whole => f64::INFINITY,
            Sphere::Ball(r) => r,
        }
    }
}

/// A directed link `child → parent` created at step `step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaEdge {
    pub child: u32,
    pub parent: u32,
    pub step: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaGraph {
    params: SpaParams,
    positions: PointSet,
    edges: Vec<SpaEdge>,
    in_log: Vec<Vec<u32>>,
    out_degree: Vec<u32>,
}

impl SpaGraph {
    /// Assemble a graph from stored parts, checking the structural
    /// invariants of the process.
    pub fn from_parts(params: SpaParams, positions: PointSet, mut edges: Vec<SpaEdge>) -> Result<Self> {
        params.validate()?;
        if positions.len() != params.n || positions.dim() != params.m {
            return Err(Error::invalid(format!(
                "expected {} points of dimension {}, got {} of dimension {}",
                params.n,
                params.m,
                positions.len(),
                positions.dim()
            )));
        }
        edges.sort_by_key(|e| (e.step, e.parent));
        let mut in_log = vec![Vec::new(); params.n];
        let mut out_degree = vec![0u32; params.n];
        for (k, e) in edges.iter().enumerate() {
            if e.child as usize >= params.n || e.step != e.child + 1 {
                return Err(Error::invalid(format!(
                    "edge ({}, {}, {}) is not created at its child's birth step",
                    e.child, e.parent, e.step
                )));
            }
            if e.parent >= e.child {
                return Err(Error::invalid(format!("edge ({}, {}) points to a younger vertex", e.child, e.parent)));
            }
            if k > 0 && edges[k - 1] == *e {
                return Err(Error::invalid(format!("duplicate edge ({}, {})", e.child, e.parent)));
            }
            in_log[e.parent as usize].push(e.step);
            out_degree[e.child as usize] += 1;
        }
        Ok(Self {
            params,
            positions,
            edges,
            in_log,
            out_degree,
        })
    }

    pub fn params(&self) -> &SpaParams {
        &self.params
    }

    pub fn positions(&self) -> &PointSet {
        &self.positions
    }

    pub fn edges(&self) -> &[SpaEdge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.params.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn birth_step(&self, v: u32) -> u32 {
        v + 1
    }

    /// Steps at which `v` gained an in-edge, ascending.
    pub fn in_degree_log(&self, v: u32) -> &[u32] {
        &self.in_log[v as usize]
    }

    /// `deg⁻(v, t)`: in-edges created at steps `≤ t`.
    pub fn in_degree_at(&self, v: u32, t: u32) -> u32 {
        self.in_log[v as usize].partition_point(|&s| s <= t) as u32
    }

    pub fn in_degree(&self, v: u32) -> u32 {
        self.in_log[v as usize].len() as u32
    }

    pub fn out_degree(&self, v: u32) -> u32 {
        self.out_degree[v as usize]
    }

    /// Total degree at step `t` (out-edges all appear at the birth step).
    pub fn degree_at(&self, v: u32, t: u32) -> u32 {
        let out = if self.birth_step(v) <= t { self.out_degree(v) } else { 0 };
        self.in_degree_at(v, t) + out
    }

    /// The undirected underlying graph (orientations dropped).
    pub fn undirected(&self) -> UndirectedGraph {
        UndirectedGraph::from_edges(self.params.n, self.edges.iter().map(|e| (e.child, e.parent)))
            .expect("SPA edges are valid by construction")
    }

    /// Sphere of influence of `v` as seen by the vertex born at step `t`.
    pub fn sphere_at(&self, v: u32, t: u32) -> Sphere {
        Sphere::of(self.in_degree_at(v, t - 1), t, &self.params)
    }
}

/// Where a vertex currently sits in the [`GrowthIndex`].
#[derive(Clone, Copy, Debug)]
enum Slot {
    Cell { level: u8, cell: u32 },
    Flat,
}

#[derive(Debug)]
struct Level {
    g: usize,
    width: f64,
    cells: Vec<Vec<u32>>,
}

/// Multi-scale grid over growing spheres of influence.
///
/// Level `ℓ` has cells at least `base·2^ℓ` wide and holds vertices whose
/// current sphere radius fits in one cell, so a 3^m stencil around a new
/// point finds every sphere that can contain it. Spheres too large for any
/// level (including whole-torus spheres) live in a flat list that is
/// scanned entirely. Radii only shrink with time, so a vertex moves only
/// when its in-degree grows; the grid is rebuilt whenever the radius of a
/// fresh vertex halves.
#[derive(Debug)]
struct GrowthIndex {
    dim: usize,
    base: f64,
    levels: Vec<Level>,
    flat: Vec<u32>,
    slots: Vec<Slot>,
    stencil: Vec<Vec<i64>>,
}

impl GrowthIndex {
    fn new(dim: usize, capacity: usize) -> Self {
        Self {
            dim,
            base: f64::INFINITY,
            levels: Vec::new(),
            flat: Vec::new(),
            slots: Vec::with_capacity(capacity),
            stencil: stencil(dim, 1),
        }
    }

    fn cell_of(&self, level: usize, x: &[f64]) -> u32 {
        let g = self.levels[level].g;
        x.iter().fold(0usize, |acc, &c| acc * g + cell_coord(c, g)) as u32
    }

    fn place(&mut self, id: u32, radius: f64, pos: &[f64]) {
        let level = self.levels.iter().position(|l| radius <= l.width);
        let slot = match level {
            Some(l) => {
                let cell = self.cell_of(l, pos);
                self.levels[l].cells[cell as usize].push(id);
                Slot::Cell { level: l as u8, cell }
            }
            None => {
                self.flat.push(id);
                Slot::Flat
            }
        };
        if id as usize == self.slots.len() {
            self.slots.push(slot);
        } else {
            self.slots[id as usize] = slot;
        }
    }

    fn rebuild(&mut self, base: f64, n_points: usize, radius_of: impl Fn(u32) -> f64, positions: &PointSet) {
        self.base = base;
        self.levels.clear();
        self.flat.clear();
        // cap the finest grid at a few cells per expected point
        let cap = ((8 * n_points.max(64)) as f64).powf(1.0 / self.dim as f64).floor();
        let mut g = (1.0 / base).floor().min(cap);
        while g >= 3.0 {
            let gi = g as usize;
            self.levels.push(Level {
                g: gi,
                width: 1.0 / g,
                cells: vec![Vec::new(); gi.pow(self.dim as u32)],
            });
            g = (g / 2.0).floor();
        }
        let n = self.slots.len();
        self.slots.clear();
        for id in 0..n as u32 {
            self.place(id, radius_of(id), positions.get(id as usize));
        }
    }

    fn update(&mut self, id: u32, radius: f64, pos: &[f64]) {
        match self.slots[id as usize] {
            Slot::Flat => {}
            Slot::Cell { level, cell } => {
                if radius <= self.levels[level as usize].width {
                    return;
                }
                let list = &mut self.levels[level as usize].cells[cell as usize];
                let k = list.iter().position(|&x| x == id).expect("indexed vertex present");
                list.swap_remove(k);
                self.place(id, radius, pos);
            }
        }
    }

    fn candidates(&self, x: &[f64], out: &mut Vec<u32>) {
        out.clear();
        out.extend_from_slice(&self.flat);
        for level in &self.levels {
            let g = level.g as i64;
            let base: Vec<i64> = x.iter().map(|&c| cell_coord(c, level.g) as i64).collect();
            for off in &self.stencil {
                let idx = base
                    .iter()
                    .zip(off)
                    .fold(0usize, |acc, (&b, &o)| acc * level.g + (b + o).rem_euclid(g) as usize);
                out.extend_from_slice(&level.cells[idx]);
            }
        }
        out.sort_unstable();
    }
}

/// Run the SPA process for `params.n` steps.
pub fn generate(params: &SpaParams) -> Result<SpaGraph> {
    params.validate()?;
    let SpaParams { m, a1, a2, p, n, seed } = *params;
    let family = StreamFamily::new(seed, Domain::SpaStep);

    let mut positions = PointSet::with_capacity(m, n);
    let mut edges = Vec::new();
    let mut indeg = vec![0u32; n];
    let mut in_log: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut out_degree = vec![0u32; n];

    let mut index = GrowthIndex::new(m, n);
    let mut cands = Vec::new();
    let mut parents = Vec::new();
    let mut x = vec![0.0; m];

    let fresh_radius = |t: u32| Sphere::from_parts(0, t, a1, a2, m).radius();

    for t in 1..=n as u32 {
        let mut rng = family.stream(t as u64);
        for c in x.iter_mut() {
            *c = rng.random::<f64>();
        }

        let r0 = fresh_radius(t);
        if r0.is_finite() && r0 <= index.base / 2.0 {
            let deg = &indeg;
            index.rebuild(
                r0,
                n,
                |u| Sphere::from_parts(deg[u as usize], t, a1, a2, m).radius(),
                &positions,
            );
        }

        index.candidates(&x, &mut cands);
        parents.clear();
        for &u in &cands {
            let sphere = Sphere::from_parts(indeg[u as usize], t, a1, a2, m);
            if sphere.contains_sq(torus_dist_sq(&x, positions.get(u as usize))) {
                // one coin per covering parent, in increasing parent id
                let coin: f64 = rng.random();
                if coin < p {
                    parents.push(u);
                }
            }
        }

        let child = t - 1;
        positions.push(&x)?;
        for &u in &parents {
            edges.push(SpaEdge { child, parent: u, step: t });
            indeg[u as usize] += 1;
            in_log[u as usize].push(t);
            let r = Sphere::from_parts(indeg[u as usize], t + 1, a1, a2, m).radius();
            index.update(u, r, positions.get(u as usize));
        }
        out_degree[child as usize] = parents.len() as u32;
        index.place(child, fresh_radius(t + 1), positions.get(child as usize));
    }

    Ok(SpaGraph {
        params: params.clone(),
        positions,
        edges,
        in_log,
        out_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::torus_dist;

    fn params(n: usize, a1: f64, a2: f64, p: f64, seed: u64) -> SpaParams {
        SpaParams { m: 2, a1, a2, p, n, seed }
    }

    /// Straight transcription of the process, scanning every earlier vertex.
    fn generate_by_scan(params: &SpaParams) -> Vec<SpaEdge> {
        let fam = StreamFamily::new(params.seed, Domain::SpaStep);
        let mut pos: Vec<Vec<f64>> = Vec::new();
        let mut indeg = vec![0u32; params.n];
        let mut edges = Vec::new();
        for t in 1..=params.n as u32 {
            let mut rng = fam.stream(t as u64);
            let x: Vec<f64> = (0..params.m).map(|_| rng.random::<f64>()).collect();
            let mut new = Vec::new();
            for (u, q) in pos.iter().enumerate() {
                let vol = (params.a1 * indeg[u] as f64 + params.a2) / t as f64;
                let inside = vol >= 1.0 || torus_dist(&x, q) <= radius_of_volume(vol, params.m);
                if inside && rng.random::<f64>() < params.p {
                    new.push(u as u32);
                }
            }
            for u in new {
                indeg[u as usize] += 1;
                edges.push(SpaEdge { child: t - 1, parent: u, step: t });
            }
            pos.push(x);
        }
        edges
    }

    #[test]
    fn influence_volume_examples() {
        let p = params(10, 0.5, 2.0, 1.0, 0);
        assert_eq!(influence_volume(0, 1, &p), 1.0);
        let p = params(10, 0.5, 1.0, 1.0, 0);
        assert!((influence_volume(4, 30, &p) - 0.1).abs() < 1e-15);
        let p = params(10, 0.9, 1.0, 1.0, 0);
        assert!((influence_volume(0, 1000, &p) - 0.001).abs() < 1e-15);
    }

    #[test]
    fn single_vertex() {
        let g = generate(&params(1, 0.5, 1.0, 1.0, 3)).unwrap();
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(generate(&params(10, 1.0, 1.0, 1.0, 0)).is_err());
        assert!(generate(&params(10, 0.5, 0.0, 1.0, 0)).is_err());
        assert!(generate(&params(10, 0.5, 1.0, 0.0, 0)).is_err());
        assert!(generate(&params(0, 0.5, 1.0, 1.0, 0)).is_err());
    }

    #[test]
    fn index_agrees_with_full_scan() {
        for (seed, a1, a2, p) in [(1, 0.5, 20.0, 1.0), (2, 0.9, 1.0, 0.7), (3, 0.0, 5.0, 0.5), (4, 0.3, 0.2, 1.0)] {
            let prm = params(3000, a1, a2, p, seed);
            let g = generate(&prm).unwrap();
            assert_eq!(g.edges(), generate_by_scan(&prm).as_slice(), "seed {seed}");
        }
        for m in [1, 3] {
            let prm = SpaParams { m, a1: 0.6, a2: 3.0, p: 1.0, n: 2000, seed: 9 };
            assert_eq!(generate(&prm).unwrap().edges(), generate_by_scan(&prm).as_slice(), "m {m}");
        }
    }

    #[test]
    fn replay_invariants() {
        let g = generate(&params(4000, 0.6, 4.0, 0.8, 17)).unwrap();
        let mut indeg_sum = 0;
        for e in g.edges() {
            assert_eq!(e.step, e.child + 1);
            assert!(e.parent < e.child);
            let sphere = g.sphere_at(e.parent, e.step);
            let d = torus_dist(g.positions().get(e.child as usize), g.positions().get(e.parent as usize));
            assert!(sphere.contains_at_distance(d));
        }
        for v in 0..g.num_vertices() as u32 {
            assert_eq!(g.in_degree_at(v, g.birth_step(v)), 0);
            let log = g.in_degree_log(v);
            assert!(log.windows(2).all(|w| w[0] < w[1]));
            indeg_sum += g.in_degree(v) as usize;
        }
        let out_sum: usize = (0..g.num_vertices() as u32).map(|v| g.out_degree(v) as usize).sum();
        assert_eq!(indeg_sum, g.num_edges());
        assert_eq!(out_sum, g.num_edges());
    }

    #[test]
    fn close_pairs_always_link_when_p_is_one() {
        let g = generate(&params(3000, 0.4, 3.0, 1.0, 5)).unwrap();
        let und = g.undirected();
        let pos = g.positions();
        for j in 1..g.num_vertices() {
            let r = radius_of_volume(3.0 / (j + 1) as f64, 2);
            for i in 0..j {
                if torus_dist(pos.get(i), pos.get(j)) <= r {
                    assert!(und.neighbours(j as u32).contains(&(i as u32)));
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let prm = params(2000, 0.5, 2.0, 0.5, 42);
        assert_eq!(generate(&prm).unwrap(), generate(&prm).unwrap());
    }
}
