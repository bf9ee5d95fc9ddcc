//! Synchronous push and push&pull rumour spreading.
//!
//! In round `k` every vertex informed before the round pushes to a uniform
//! random neighbour; under push&pull every uninformed vertex also contacts a
//! uniform random neighbour and learns the rumour if that neighbour was
//! informed at the start of the round. Each vertex's choice in round `k`
//! comes from its own substream `(seed, k, vertex)`, so the trace does not
//! depend on processing order. Vertices whose choice cannot change anything
//! (informed vertices with no uninformed neighbour, uninformed vertices with
//! no informed neighbour) are skipped without affecting the outcome.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{torus_dist, PointSet};
use crate::graph::{component_of, Topology};
use crate::rng::{Domain, StreamFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Push,
    PushPull,
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "push" => Ok(Protocol::Push),
            "push-pull" | "push-and-pull" | "pushpull" => Ok(Protocol::PushPull),
            other => Err(Error::invalid(format!("unknown protocol `{other}`"))),
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Protocol::Push => "push",
            Protocol::PushPull => "push-pull",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub protocol: Protocol,
    pub source: u32,
    pub max_rounds: usize,
    pub seed: u64,
    /// Stop early once this many vertices are informed.
    pub stop_when_informed: Option<usize>,
}

impl ProtocolConfig {
    pub fn new(protocol: Protocol, source: u32, seed: u64) -> Self {
        Self {
            protocol,
            source,
            max_rounds: 1_000_000,
            seed,
            stop_when_informed: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Via {
    Push,
    Pull,
}

impl Via {
    pub fn as_str(self) -> &'static str {
        match self {
            Via::Push => "push",
            Via::Pull => "pull",
        }
    }
}

/// The contact that informed `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Transmission {
    pub from: u32,
    pub to: u32,
    pub via: Via,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RoundRecord {
    /// Newly informed vertices, ascending.
    pub newly_informed: Vec<u32>,
    /// One transmission per newly informed vertex, same order.
    pub transmissions: Vec<Transmission>,
    /// Transmissions over edges longer than the configured threshold.
    pub long_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RumourTrace {
    pub source: u32,
    pub protocol: Protocol,
    /// Size of the source's component.
    pub component_size: usize,
    /// `rounds[k]` describes round `k + 1`.
    pub rounds: Vec<RoundRecord>,
    /// `informed_count_per_round[k]` is the count after `k` rounds.
    pub informed_count_per_round: Vec<usize>,
    /// Rounds until the whole component is informed, if that happened.
    pub spread_time: Option<usize>,
    pub long_threshold: Option<f64>,
    /// `None` when no positions / threshold were supplied.
    pub long_edge_transmissions: Option<usize>,
}

impl RumourTrace {
    pub fn informed_count(&self) -> usize {
        *self.informed_count_per_round.last().expect("round 0 recorded")
    }

    /// All informed vertices, in order of informing.
    pub fn informed(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(self.source).chain(self.rounds.iter().flat_map(|r| r.newly_informed.iter().copied()))
    }

    /// First round after which at least `count` vertices are informed.
    pub fn rounds_to_inform(&self, count: usize) -> Option<usize> {
        self.informed_count_per_round.iter().position(|&c| c >= count)
    }

    /// Long-edge transmissions in rounds `1..=t`.
    pub fn long_edges_through(&self, t: usize) -> Option<usize> {
        self.long_edge_transmissions?;
        Some(self.rounds.iter().take(t).map(|r| r.long_edges).sum())
    }
}

/// Bookkeeping that lets a round visit only vertices whose choice matters.
struct SpreadState {
    informed: Vec<bool>,
    uninformed_nbrs: Vec<u32>,
    /// Informed vertices, pruned lazily once saturated.
    pushers: Vec<u32>,
    /// Uninformed vertices with an informed neighbour, pruned lazily.
    frontier: Vec<u32>,
    in_frontier: Vec<bool>,
}

impl SpreadState {
    fn new<G: Topology>(g: &G) -> Self {
        let n = g.num_vertices();
        Self {
            informed: vec![false; n],
            uninformed_nbrs: (0..n as u32).map(|v| g.degree(v) as u32).collect(),
            pushers: Vec::new(),
            frontier: Vec::new(),
            in_frontier: vec![false; n],
        }
    }

    fn inform<G: Topology>(&mut self, g: &G, v: u32) {
        self.informed[v as usize] = true;
        g.for_each_neighbour(v, |w| {
            self.uninformed_nbrs[w as usize] -= 1;
            if !self.informed[w as usize] && !self.in_frontier[w as usize] {
                self.in_frontier[w as usize] = true;
                self.frontier.push(w);
            }
        });
        self.pushers.push(v);
    }
}

/// Simulate the protocol on the undirected graph `g`.
pub fn run<G: Topology>(
    g: &G,
    cfg: &ProtocolConfig,
    positions: Option<&PointSet>,
    long_threshold: Option<f64>,
) -> Result<RumourTrace> {
    let n = g.num_vertices();
    if cfg.source as usize >= n {
        return Err(Error::invalid(format!("source {} is not a vertex (n = {n})", cfg.source)));
    }
    if let Some(p) = positions {
        if p.len() != n {
            return Err(Error::invalid("positions do not match the graph"));
        }
    }
    let measure = match (positions, long_threshold) {
        (Some(p), Some(l)) => Some((p, l)),
        _ => None,
    };

    let component_size = component_of(g, cfg.source).len();
    let family = StreamFamily::new(cfg.seed, Domain::Rumour);

    let mut state = SpreadState::new(g);
    state.inform(g, cfg.source);

    let mut trace = RumourTrace {
        source: cfg.source,
        protocol: cfg.protocol,
        component_size,
        rounds: Vec::new(),
        informed_count_per_round: vec![1],
        spread_time: None,
        long_threshold,
        long_edge_transmissions: measure.map(|_| 0),
    };

    let mut informed_count = 1usize;
    let target = cfg.stop_when_informed.unwrap_or(usize::MAX);
    if component_size == 1 {
        trace.spread_time = Some(0);
        return Ok(trace);
    }

    let mut pending: Vec<Transmission> = Vec::new();
    for round in 1..=cfg.max_rounds {
        pending.clear();
        let k = round as u32;
        let SpreadState { informed, uninformed_nbrs, pushers, frontier, in_frontier } = &mut state;
        pushers.retain(|&v| uninformed_nbrs[v as usize] > 0);
        for &v in pushers.iter() {
            let mut rng = family.stream2(k, v);
            let w = g.neighbour(v, rng.random_range(0..g.degree(v)));
            if !informed[w as usize] {
                pending.push(Transmission { from: v, to: w, via: Via::Push });
            }
        }
        frontier.retain(|&w| {
            let keep = !informed[w as usize];
            in_frontier[w as usize] = keep;
            keep
        });
        if cfg.protocol == Protocol::PushPull {
            for &w in frontier.iter() {
                let mut rng = family.stream2(k, w);
                let u = g.neighbour(w, rng.random_range(0..g.degree(w)));
                if informed[u as usize] {
                    pending.push(Transmission { from: u, to: w, via: Via::Pull });
                }
            }
        }

        // one transmission per newly informed vertex: smallest sender, push first
        pending.sort_unstable_by_key(|t| (t.to, t.from, t.via == Via::Pull));
        pending.dedup_by_key(|t| t.to);

        let mut record = RoundRecord::default();
        for t in &pending {
            record.newly_informed.push(t.to);
            record.transmissions.push(*t);
            if let Some((pos, l)) = measure {
                if torus_dist(pos.get(t.from as usize), pos.get(t.to as usize)) > l {
                    record.long_edges += 1;
                }
            }
        }
        for t in &pending {
            state.inform(g, t.to);
        }
        informed_count += pending.len();
        if let Some(total) = trace.long_edge_transmissions.as_mut() {
            *total += record.long_edges;
        }
        trace.rounds.push(record);
        trace.informed_count_per_round.push(informed_count);

        if informed_count == component_size {
            trace.spread_time = Some(round);
            break;
        }
        if informed_count >= target {
            break;
        }
    }
    Ok(trace)
}

/// Largest torus distance from the source to an informed vertex.
pub fn containment_radius(trace: &RumourTrace, positions: &PointSet, source: u32) -> f64 {
    let s = positions.get(source as usize);
    trace
        .informed()
        .map(|v| torus_dist(positions.get(v as usize), s))
        .fold(0.0, f64::max)
}

/// Containment radius after each round: entry `k` covers rounds `1..=k`.
pub fn containment_by_round(trace: &RumourTrace, positions: &PointSet) -> Vec<f64> {
    let s = positions.get(trace.source as usize);
    let mut out = Vec::with_capacity(trace.rounds.len() + 1);
    let mut cur = 0.0f64;
    out.push(cur);
    for r in &trace.rounds {
        for &v in &r.newly_informed {
            cur = cur.max(torus_dist(positions.get(v as usize), s));
        }
        out.push(cur);
    }
    out
}

/// Rounds `T ≥ 1` at which no long edge has fired yet but the informed
/// region already reaches past `T·L` from the source.
pub fn containment_violations(trace: &RumourTrace, positions: &PointSet, l: f64) -> Vec<usize> {
    let radius = containment_by_round(trace, positions);
    let mut long = 0;
    let mut out = Vec::new();
    for (k, r) in trace.rounds.iter().enumerate() {
        long += r.long_edges;
        let t = k + 1;
        if long == 0 && radius[t] > t as f64 * l {
            out.push(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_distances, CompleteGraph, UndirectedGraph};

    fn star(leaves: u32) -> UndirectedGraph {
        UndirectedGraph::from_edges(leaves as usize + 1, (1..=leaves).map(|l| (0, l))).unwrap()
    }

    #[test]
    fn path_of_three_push_pull() {
        let g = UndirectedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        for seed in 0..20 {
            let t = run(&g, &ProtocolConfig::new(Protocol::PushPull, 1, seed), None, None).unwrap();
            assert_eq!(t.spread_time, Some(1));
        }
    }

    #[test]
    fn star_from_leaf_push_pull() {
        let g = star(4);
        for seed in 0..20 {
            let t = run(&g, &ProtocolConfig::new(Protocol::PushPull, 3, seed), None, None).unwrap();
            assert_eq!(t.spread_time, Some(2));
            assert_eq!(t.rounds[0].newly_informed, vec![0]);
            assert_eq!(t.rounds[0].transmissions[0].via, Via::Push);
        }
    }

    #[test]
    fn star_from_centre_push_needs_four_rounds_at_least() {
        // the centre informs at most one leaf per round
        let g = star(4);
        for seed in 0..50 {
            let t = run(&g, &ProtocolConfig::new(Protocol::Push, 0, seed), None, None).unwrap();
            assert!(t.spread_time.unwrap() >= 4);
            assert!(t.informed_count_per_round.windows(2).all(|w| w[1] - w[0] <= 1));
        }
    }

    #[test]
    fn isolated_source() {
        let g = UndirectedGraph::empty(3);
        let t = run(&g, &ProtocolConfig::new(Protocol::PushPull, 2, 0), None, None).unwrap();
        assert_eq!(t.spread_time, Some(0));
        assert_eq!(t.informed().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn unknown_source_rejected() {
        let g = UndirectedGraph::empty(3);
        assert!(run(&g, &ProtocolConfig::new(Protocol::Push, 3, 0), None, None).is_err());
    }

    #[test]
    fn max_rounds_exhaustion_leaves_spread_time_unset() {
        let g = UndirectedGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let mut cfg = ProtocolConfig::new(Protocol::PushPull, 0, 1);
        cfg.max_rounds = 2;
        let t = run(&g, &cfg, None, None).unwrap();
        assert_eq!(t.spread_time, None);
        assert_eq!(t.rounds.len(), 2);
        assert!(t.informed_count() <= 3);
    }

    #[test]
    fn containment_examples() {
        let pos = PointSet::from_points(2, &[vec![0.1, 0.1], vec![0.4, 0.1]]).unwrap();
        let g = UndirectedGraph::empty(2);
        let t = run(&g, &ProtocolConfig::new(Protocol::Push, 0, 0), Some(&pos), Some(0.2)).unwrap();
        assert_eq!(containment_radius(&t, &pos, 0), 0.0);

        let g = UndirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let t = run(&g, &ProtocolConfig::new(Protocol::Push, 0, 0), Some(&pos), Some(0.2)).unwrap();
        assert!((containment_radius(&t, &pos, 0) - 0.3).abs() < 1e-12);
        assert_eq!(t.long_edge_transmissions, Some(1));
        let t = run(&g, &ProtocolConfig::new(Protocol::Push, 0, 0), None, None).unwrap();
        assert_eq!(t.long_edge_transmissions, None);
    }

    #[test]
    fn containment_law_violations() {
        // 0 - 1 - 2 along a line, short edges of length 0.1
        let pos = PointSet::from_points(2, &[vec![0.1, 0.5], vec![0.2, 0.5], vec![0.3, 0.5]]).unwrap();
        let g = UndirectedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let t = run(&g, &ProtocolConfig::new(Protocol::PushPull, 0, 0), Some(&pos), Some(0.5)).unwrap();
        assert!(containment_violations(&t, &pos, 0.1 + 1e-12).is_empty());
        assert_eq!(containment_violations(&t, &pos, 0.05), vec![1, 2]);
    }

    #[test]
    fn complete_graph_spreads_fast() {
        let g = CompleteGraph { n: 1024 };
        let t = run(&g, &ProtocolConfig::new(Protocol::PushPull, 0, 3), None, None).unwrap();
        assert!(t.spread_time.unwrap() <= 30);
    }

    #[test]
    fn trace_invariants_on_random_graph() {
        let rgg = crate::rgg::generate_rgg(500, 0.08, crate::geometry::MetricMode::Torus, 9).unwrap();
        let g = rgg.graph();
        let source = 0;
        let dist = bfs_distances(&g, source);
        for protocol in [Protocol::Push, Protocol::PushPull] {
            let t = run(&g, &ProtocolConfig::new(protocol, source, 5), None, None).unwrap();
            assert_eq!(t, run(&g, &ProtocolConfig::new(protocol, source, 5), None, None).unwrap());
            assert!(t.informed_count_per_round.windows(2).all(|w| w[0] <= w[1]));
            if protocol == Protocol::Push {
                assert!(t.informed_count_per_round.windows(2).all(|w| w[1] <= 2 * w[0]));
            }
            let mut known = vec![false; 500];
            known[source as usize] = true;
            for (k, r) in t.rounds.iter().enumerate() {
                for tr in &r.transmissions {
                    assert!(known[tr.from as usize]);
                    assert!(g.neighbours(tr.from).contains(&tr.to));
                    assert!(dist[tr.to as usize] as usize <= k + 1);
                }
                for &v in &r.newly_informed {
                    known[v as usize] = true;
                }
            }
            if t.spread_time.is_some() {
                assert_eq!(t.informed_count(), t.component_size);
            }
        }
    }
}
