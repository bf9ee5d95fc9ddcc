//! Undirected graph views used by the traversal-based analyses.

use crate::error::{Error, Result};

/// Read-only neighbourhood access. Neighbour order is fixed, so uniform
/// neighbour choice by index is reproducible.
pub trait Topology {
    fn num_vertices(&self) -> usize;
    fn degree(&self, v: u32) -> usize;
    /// The `k`-th neighbour of `v`, `k < degree(v)`.
    fn neighbour(&self, v: u32, k: usize) -> u32;

    fn for_each_neighbour<F: FnMut(u32)>(&self, v: u32, mut f: F) {
        for k in 0..self.degree(v) {
            f(self.neighbour(v, k));
        }
    }
}

/// Compressed adjacency of a simple undirected graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UndirectedGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl UndirectedGraph {
    /// Build from an edge list. Parallel edges collapse; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let edges: Vec<(u32, u32)> = edges.into_iter().collect();
        let mut deg = vec![0usize; n];
        for &(u, v) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for &(u, v) in &edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        // sort and dedupe each list, then compact
        let mut out_offsets = Vec::with_capacity(n + 1);
        out_offsets.push(0);
        let mut out_targets = Vec::with_capacity(targets.len());
        for v in 0..n {
            let list = &mut targets[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            let mut last = None;
            for &w in list.iter() {
                if last != Some(w) {
                    out_targets.push(w);
                    last = Some(w);
                }
            }
            out_offsets.push(out_targets.len());
        }
        Ok(Self {
            offsets: out_offsets,
            targets: out_targets,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    #[inline]
    pub fn neighbours(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Unordered edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_vertices() as u32)
            .flat_map(move |u| self.neighbours(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Subgraph induced by `vertices` (relabelled `0..vertices.len()` in
    /// the given order).
    pub fn induced(&self, vertices: &[u32]) -> UndirectedGraph {
        let mut map = vec![u32::MAX; self.num_vertices()];
        for (i, &v) in vertices.iter().enumerate() {
            map[v as usize] = i as u32;
        }
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for &v in vertices {
            let mut list: Vec<u32> = self
                .neighbours(v)
                .iter()
                .map(|&w| map[w as usize])
                .filter(|&w| w != u32::MAX)
                .collect();
            list.sort_unstable();
            targets.extend(list);
            offsets.push(targets.len());
        }
        UndirectedGraph { offsets, targets }
    }
}

impl Topology for UndirectedGraph {
    #[inline]
    fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    fn degree(&self, v: u32) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    #[inline]
    fn neighbour(&self, v: u32, k: usize) -> u32 {
        self.targets[self.offsets[v as usize] + k]
    }

    #[inline]
    fn for_each_neighbour<F: FnMut(u32)>(&self, v: u32, mut f: F) {
        for &w in self.neighbours(v) {
            f(w);
        }
    }
}

/// The complete graph `K_n`, without materialised adjacency.
#[derive(Clone, Copy, Debug)]
pub struct CompleteGraph {
    pub n: usize,
}

impl Topology for CompleteGraph {
    fn num_vertices(&self) -> usize {
        self.n
    }

    fn degree(&self, _v: u32) -> usize {
        self.n.saturating_sub(1)
    }

    #[inline]
    fn neighbour(&self, v: u32, k: usize) -> u32 {
        if (k as u32) < v {
            k as u32
        } else {
            k as u32 + 1
        }
    }
}

/// Sentinel distance for unreachable vertices.
pub const UNREACHED: u32 = u32::MAX;

/// Breadth-first distances from `src` into `dist` (resized and reset).
/// Returns the number of vertices reached, including `src`.
pub fn bfs_into<G: Topology>(g: &G, src: u32, dist: &mut Vec<u32>, queue: &mut Vec<u32>) -> usize {
    dist.clear();
    dist.resize(g.num_vertices(), UNREACHED);
    queue.clear();
    dist[src as usize] = 0;
    queue.push(src);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        let dv = dist[v as usize] + 1;
        g.for_each_neighbour(v, |w| {
            if dist[w as usize] == UNREACHED {
                dist[w as usize] = dv;
                queue.push(w);
            }
        });
    }
    queue.len()
}

pub fn bfs_distances<G: Topology>(g: &G, src: u32) -> Vec<u32> {
    let mut dist = Vec::new();
    let mut queue = Vec::new();
    bfs_into(g, src, &mut dist, &mut queue);
    dist
}

/// Vertices reachable from `src`, in BFS order.
pub fn component_of<G: Topology>(g: &G, src: u32) -> Vec<u32> {
    let mut dist = Vec::new();
    let mut queue = Vec::new();
    bfs_into(g, src, &mut dist, &mut queue);
    queue
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_and_dedupe() {
        let g = UndirectedGraph::from_edges(4, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.neighbours(1), &[0, 2]);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert!(UndirectedGraph::from_edges(2, [(1, 1)]).is_err());
        assert!(UndirectedGraph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn bfs_on_path_and_complete() {
        let g = UndirectedGraph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(bfs_distances(&g, 0), vec![0, 1, 2, UNREACHED]);
        let k = CompleteGraph { n: 5 };
        assert_eq!(bfs_distances(&k, 3), vec![1, 1, 1, 0, 1]);
        let nb: Vec<u32> = (0..4).map(|i| k.neighbour(2, i)).collect();
        assert_eq!(nb, vec![0, 1, 3, 4]);
    }

    #[test]
    fn induced_subgraph() {
        let g = UndirectedGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let h = g.induced(&[3, 2, 4]);
        assert_eq!(h.neighbours(0), &[1, 2]);
        assert_eq!(h.num_edges(), 2);
    }
}
