//! Distance and degree statistics of SPA graphs, and the exponent calculus
//! behind the slow-spreading bound.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::torus_dist;
use crate::graph::{bfs_into, Topology, UNREACHED};
use crate::rng::{Domain, StreamFamily};
use crate::spa::SpaGraph;

/// Which vertex pairs the effective diameter is computed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiameterSampler {
    /// Every pair; graphs with at most [`EXACT_LIMIT`] vertices.
    Exact,
    /// `num_pairs` uniform ordered pairs of distinct vertices.
    Pairs { num_pairs: usize, seed: u64 },
    /// All pairs starting at `num_sources` uniformly chosen sources.
    Sources { num_sources: usize, seed: u64 },
}

pub const EXACT_LIMIT: usize = 2000;

/// Counts of connected pairs by hop distance (`hist[d]`, `d ≥ 1`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistanceHistogram(pub Vec<u64>);

impl DistanceHistogram {
    fn add(&mut self, d: u32) {
        let d = d as usize;
        if self.0.len() <= d {
            self.0.resize(d + 1, 0);
        }
        self.0[d] += 1;
    }

    fn merge(mut self, other: DistanceHistogram) -> DistanceHistogram {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Smallest `d` such that at least `fraction` of the pairs are within `d`.
    pub fn quantile(&self, fraction: f64) -> u32 {
        let total = self.total();
        if total == 0 {
            return 0;
        }
        let need = fraction * total as f64 - 1e-9;
        let mut cum = 0u64;
        for (d, &c) in self.0.iter().enumerate() {
            cum += c;
            if cum as f64 >= need {
                return d as u32;
            }
        }
        (self.0.len() - 1) as u32
    }
}

fn histogram_from_sources<G: Topology + Sync>(g: &G, sources: &[u32]) -> DistanceHistogram {
    sources
        .par_chunks(16)
        .map(|chunk| {
            let (mut dist, mut queue) = (Vec::new(), Vec::new());
            let mut h = DistanceHistogram::default();
            for &s in chunk {
                bfs_into(g, s, &mut dist, &mut queue);
                for &v in &queue[1..] {
                    h.add(dist[v as usize]);
                }
            }
            h
        })
        .reduce(DistanceHistogram::default, DistanceHistogram::merge)
}

/// Hop-distance histogram over the pairs selected by `sampler`.
pub fn distance_histogram<G: Topology + Sync>(g: &G, sampler: DiameterSampler) -> Result<DistanceHistogram> {
    let n = g.num_vertices();
    if n < 2 {
        return Ok(DistanceHistogram::default());
    }
    match sampler {
        DiameterSampler::Exact => {
            if n > EXACT_LIMIT {
                return Err(Error::invalid(format!(
                    "exact effective diameter is limited to {EXACT_LIMIT} vertices, got {n}"
                )));
            }
            let sources: Vec<u32> = (0..n as u32).collect();
            Ok(histogram_from_sources(g, &sources))
        }
        DiameterSampler::Sources { num_sources, seed } => {
            let mut rng = StreamFamily::new(seed, Domain::PairSampling).stream(1);
            let mut sources: Vec<u32> = sample(&mut rng, n, num_sources.min(n))
                .into_iter()
                .map(|v| v as u32)
                .collect();
            sources.sort_unstable();
            Ok(histogram_from_sources(g, &sources))
        }
        DiameterSampler::Pairs { num_pairs, seed } => {
            let mut rng = StreamFamily::new(seed, Domain::PairSampling).stream(2);
            let mut pairs: Vec<(u32, u32)> = (0..num_pairs)
                .map(|_| {
                    let s = rng.random_range(0..n as u32);
                    let mut t = rng.random_range(0..n as u32 - 1);
                    if t >= s {
                        t += 1;
                    }
                    (s, t)
                })
                .collect();
            pairs.sort_unstable();
            let groups: Vec<&[(u32, u32)]> = pairs.chunk_by(|a, b| a.0 == b.0).collect();
            Ok(groups
                .par_chunks(16)
                .map(|chunk| {
                    let (mut dist, mut queue) = (Vec::new(), Vec::new());
                    let mut h = DistanceHistogram::default();
                    for group in chunk {
                        bfs_into(g, group[0].0, &mut dist, &mut queue);
                        for &(_, t) in *group {
                            if dist[t as usize] != UNREACHED {
                                h.add(dist[t as usize]);
                            }
                        }
                    }
                    h
                })
                .reduce(DistanceHistogram::default, DistanceHistogram::merge))
        }
    }
}

/// Smallest `d` such that at least `fraction` of the connected (sampled)
/// pairs lie within hop distance `d`; 0 when there are no connected pairs.
pub fn effective_diameter<G: Topology + Sync>(g: &G, fraction: f64, sampler: DiameterSampler) -> Result<u32> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("fraction {fraction} outside (0,1]")));
    }
    Ok(distance_histogram(g, sampler)?.quantile(fraction))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OldVertexStats {
    pub vertex: u32,
    pub degree_at_tau: u32,
    pub degree_final: u32,
    /// `deg(v,τ)/deg(v,n)`, 0 when the final degree is 0.
    pub ratio: f64,
    /// Share of the final incident edges that are long.
    pub long_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeClassification {
    /// Old/new cutoff `τ = n^β` on birth steps.
    pub tau: f64,
    /// Long/short cutoff `L = n^{-η}` on endpoint distance.
    pub long_threshold: f64,
    pub old_long: usize,
    pub old_short: usize,
    pub new_long: usize,
    pub new_short: usize,
    /// Whether `η·m < β(1 − pA1)` holds for the chosen exponents.
    pub short_edge_condition: bool,
    pub old_vertices: Vec<OldVertexStats>,
}

impl EdgeClassification {
    pub fn total(&self) -> usize {
        self.old_long + self.old_short + self.new_long + self.new_short
    }
}

fn old_vertex_count(tau: f64, n: usize) -> usize {
    (tau.floor() as usize).min(n)
}

fn old_vertex_stats(g: &SpaGraph, tau: f64, long_threshold: f64) -> Vec<OldVertexStats> {
    let n = g.num_vertices();
    let old = old_vertex_count(tau, n);
    let mut long_incident = vec![0u32; old];
    for e in g.edges() {
        let d = torus_dist(g.positions().get(e.child as usize), g.positions().get(e.parent as usize));
        if d > long_threshold {
            for v in [e.child, e.parent] {
                if (v as usize) < old {
                    long_incident[v as usize] += 1;
                }
            }
        }
    }
    let tau_step = tau.floor() as u32;
    (0..old as u32)
        .map(|v| {
            let at_tau = g.degree_at(v, tau_step);
            let fin = g.degree_at(v, n as u32);
            let frac = |x: u32| if fin == 0 { 0.0 } else { x as f64 / fin as f64 };
            OldVertexStats {
                vertex: v,
                degree_at_tau: at_tau,
                degree_final: fin,
                ratio: frac(at_tau),
                long_fraction: frac(long_incident[v as usize]),
            }
        })
        .collect()
}

/// Split edges into old/new (birth step vs `n^β`) and long/short (endpoint
/// distance vs `n^{-η}`).
pub fn classify_edges(g: &SpaGraph, beta: f64, eta: f64) -> Result<EdgeClassification> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid(format!("beta = {beta} outside (0,1)")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta = {eta} outside (0,1)")));
    }
    let n = g.num_vertices() as f64;
    let params = g.params();
    let tau = n.powf(beta);
    let long_threshold = n.powf(-eta);
    let mut c = EdgeClassification {
        tau,
        long_threshold,
        old_long: 0,
        old_short: 0,
        new_long: 0,
        new_short: 0,
        short_edge_condition: eta * (params.m as f64) < beta * (1.0 - params.a()),
        old_vertices: old_vertex_stats(g, tau, long_threshold),
    };
    for e in g.edges() {
        let d = torus_dist(g.positions().get(e.child as usize), g.positions().get(e.parent as usize));
        let old = e.step as f64 <= tau;
        let long = d > long_threshold;
        match (old, long) {
            (true, true) => c.old_long += 1,
            (true, false) => c.old_short += 1,
            (false, true) => c.new_long += 1,
            (false, false) => c.new_short += 1,
        }
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioCheck {
    /// `n^ε (y·ln n / n)^{pA1}` with `y = n^γ`.
    pub bound: f64,
    pub old_vertices: usize,
    pub violations: Vec<OldVertexStats>,
}

/// Old vertices whose degree ratio `deg(v,τ)/deg(v,n)` reaches the bound
/// `n^ε (y·ln n / n)^{pA1}`.
pub fn old_vertex_ratio_check(g: &SpaGraph, beta: f64, gamma: f64, epsilon: f64) -> Result<RatioCheck> {
    let a = g.params().a();
    let mut failed = Vec::new();
    if !(beta > 0.0 && beta < 1.0) {
        failed.push(format!("0 < beta < 1 (beta = {beta})"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        failed.push(format!("0 < epsilon < 1 (epsilon = {epsilon})"));
    }
    if a <= 0.0 {
        failed.push("p*A1 > 0".to_string());
    }
    let upper = 1.0 - epsilon / a;
    if !(gamma > beta && gamma < upper) {
        failed.push(format!("beta < gamma < 1 - epsilon/(p*A1) ({beta} < {gamma} < {upper})"));
    }
    if beta >= (gamma - beta) * a / 2.0 || beta.is_nan() {
        failed.push(format!(
            "beta < (gamma - beta)*p*A1/2 ({beta} < {})",
            (gamma - beta) * a / 2.0
        ));
    }
    if !failed.is_empty() {
        return Err(Error::invalid(format!("parameter constraints violated: {}", failed.join("; "))));
    }
    let n = g.num_vertices() as f64;
    let y = n.powf(gamma);
    let bound = n.powf(epsilon) * (y * n.ln() / n).powf(a);
    let tau = n.powf(beta);
    let stats = old_vertex_stats(g, tau, f64::INFINITY);
    Ok(RatioCheck {
        bound,
        old_vertices: stats.len(),
        violations: stats.into_iter().filter(|s| s.ratio >= bound).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingStats {
    pub r: u32,
    pub min_deg: u32,
    /// `2^{pA1}`.
    pub target: f64,
    pub vertices: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// `(vertex, deg⁻(v,2R)/deg⁻(v,R))`, ascending by vertex.
    pub ratios: Vec<(u32, f64)>,
}

/// Ratios `deg⁻(v,2R)/deg⁻(v,R)` over vertices with `deg⁻(v,R) ≥ min_deg`.
/// `Ok(None)` when no vertex qualifies.
pub fn degree_doubling_stats(g: &SpaGraph, r: u32, min_deg: u32) -> Result<Option<DoublingStats>> {
    let n = g.num_vertices() as u64;
    if r == 0 || 2 * r as u64 > n {
        return Err(Error::invalid(format!("R = {r} must satisfy 1 <= R <= n/2 (n = {n})")));
    }
    let min_deg = min_deg.max(1);
    let ratios: Vec<(u32, f64)> = (0..r)
        .filter_map(|v| {
            let d = g.in_degree_at(v, r);
            (d >= min_deg).then(|| (v, g.in_degree_at(v, 2 * r) as f64 / d as f64))
        })
        .collect();
    if ratios.is_empty() {
        return Ok(None);
    }
    let mut sorted: Vec<f64> = ratios.iter().map(|x| x.1).collect();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 {
        sorted[k / 2]
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0
    };
    Ok(Some(DoublingStats {
        r,
        min_deg,
        target: 2f64.powf(g.params().a()),
        vertices: k,
        mean: sorted.iter().sum::<f64>() / k as f64,
        median,
        min: sorted[0],
        max: sorted[k - 1],
        ratios,
    }))
}

/// `max_{i,t} deg⁻(v_i,t) / ((t/i)^{pA1} ln n)` over birth steps `i` and
/// steps `t ≥ i`. The maximum over `t` sits at an in-degree increment.
pub fn trajectory_statistic(g: &SpaGraph) -> f64 {
    let n = g.num_vertices();
    if n < 2 {
        return 0.0;
    }
    let a = g.params().a();
    let ln_n = (n as f64).ln();
    (0..n as u32)
        .map(|v| {
            let i = g.birth_step(v) as f64;
            g.in_degree_log(v)
                .iter()
                .enumerate()
                .map(|(k, &t)| (k + 1) as f64 / ((t as f64 / i).powf(a) * ln_n))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryCheck {
    pub statistic: f64,
    pub limit: f64,
    pub within: bool,
}

/// Compare [`trajectory_statistic`] against `c·n^{f_exponent}`.
pub fn trajectory_bound_check(g: &SpaGraph, c: f64, f_exponent: f64) -> TrajectoryCheck {
    let statistic = trajectory_statistic(g);
    let limit = c * (g.num_vertices() as f64).powf(f_exponent);
    TrajectoryCheck {
        statistic,
        limit,
        within: statistic <= limit,
    }
}

pub fn max_outdegree(g: &SpaGraph) -> u32 {
    (0..g.num_vertices() as u32).map(|v| g.out_degree(v)).max().unwrap_or(0)
}

/// Which of the four exponent inequalities hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintFlags {
    /// `η·m < β(1 − a)`: new edges are short.
    pub short_new_edges: bool,
    /// `β < γ < 1 − ε/a`.
    pub y_range: bool,
    /// `β < (γ − β)·a/2`.
    pub old_vertex_ratio: bool,
    /// `α + β + (ε − a) + γ·a < 0`.
    pub round_budget: bool,
}

impl ConstraintFlags {
    pub fn all(&self) -> bool {
        self.short_new_edges && self.y_range && self.old_vertex_ratio && self.round_budget
    }
}

/// Exponents for the slow push&pull bound. Quantities are exponents of `n`:
/// `τ = n^tau_exp`, `y = n^y_exp`, `L = n^l_exp`, `T = n^t_exp`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremParams {
    pub a: f64,
    pub m: usize,
    /// `K = (3 + a)m + 1 − a`.
    pub k: f64,
    /// `a(1 − a)/K`; any round exponent below it is admissible.
    pub alpha_max: f64,
    pub delta: f64,
    pub tau_exp: f64,
    pub y_exp: f64,
    pub l_exp: f64,
    pub t_exp: f64,
    pub epsilon: f64,
    pub constraints: ConstraintFlags,
    /// All four constraints hold.
    pub valid: bool,
}

impl TheoremParams {
    /// `L = n^{l_exp}` for a concrete `n`.
    pub fn long_threshold(&self, n: usize) -> f64 {
        (n as f64).powf(self.l_exp)
    }

    pub fn rounds(&self, n: usize) -> f64 {
        (n as f64).powf(self.t_exp)
    }
}

pub fn theorem_params(a: f64, m: usize, delta: Option<f64>) -> Result<TheoremParams> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::invalid(format!("a = {a} outside (0,1)")));
    }
    if m == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let mf = m as f64;
    let k = (3.0 + a) * mf + 1.0 - a;
    let alpha_max = a * (1.0 - a) / k;
    let delta = delta.unwrap_or(alpha_max / 2.0);
    if !(delta > 0.0 && delta < alpha_max) {
        return Err(Error::invalid(format!("delta = {delta} outside (0, {alpha_max})")));
    }
    let tau_exp = mf * a / k;
    let y_exp = mf * (2.0 + a) / k + delta;
    let l_exp = -alpha_max + delta / 2.0;
    let t_exp = alpha_max - delta;
    let epsilon = (a * mf / k).min(delta * (1.0 + a)) / 2.0;

    let (beta, gamma, eta, alpha) = (tau_exp, y_exp, -l_exp, t_exp);
    let constraints = ConstraintFlags {
        short_new_edges: eta * mf < beta * (1.0 - a),
        y_range: beta < gamma && gamma < 1.0 - epsilon / a,
        old_vertex_ratio: beta < (gamma - beta) * a / 2.0,
        round_budget: alpha + beta + (epsilon - a) + gamma * a < 0.0,
    };
    Ok(TheoremParams {
        a,
        m,
        k,
        alpha_max,
        delta,
        tau_exp,
        y_exp,
        l_exp,
        t_exp,
        epsilon,
        valid: constraints.all(),
        constraints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CompleteGraph, UndirectedGraph};
    use crate::spa::{generate, SpaEdge, SpaParams};
    use crate::geometry::PointSet;

    fn cycle(n: u32) -> UndirectedGraph {
        UndirectedGraph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn effective_diameter_examples() {
        let k10 = CompleteGraph { n: 10 };
        assert_eq!(effective_diameter(&k10, 0.9, DiameterSampler::Exact).unwrap(), 1);
        assert_eq!(effective_diameter(&cycle(5), 0.9, DiameterSampler::Exact).unwrap(), 2);
        let two = UndirectedGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(effective_diameter(&two, 0.9, DiameterSampler::Exact).unwrap(), 1);
        assert_eq!(effective_diameter(&UndirectedGraph::empty(1), 0.9, DiameterSampler::Exact).unwrap(), 0);
        assert_eq!(effective_diameter(&UndirectedGraph::empty(4), 0.9, DiameterSampler::Exact).unwrap(), 0);
        assert!(effective_diameter(&cycle(5), 0.0, DiameterSampler::Exact).is_err());
        assert!(effective_diameter(&cycle(2001), 0.9, DiameterSampler::Exact).is_err());
    }

    #[test]
    fn sampled_modes_cover_the_same_distribution() {
        let g = cycle(200);
        let exact = effective_diameter(&g, 0.9, DiameterSampler::Exact).unwrap();
        let pairs = effective_diameter(&g, 0.9, DiameterSampler::Pairs { num_pairs: 10_000, seed: 1 }).unwrap();
        let sources = effective_diameter(&g, 0.9, DiameterSampler::Sources { num_sources: 50, seed: 1 }).unwrap();
        assert_eq!(exact, 90);
        assert!(pairs.abs_diff(exact) <= 1);
        assert_eq!(sources, exact);
    }

    fn tiny_graph() -> SpaGraph {
        // vertices 0..4; edges at steps 2, 3, 5
        let params = SpaParams { m: 2, a1: 0.5, a2: 1.0, p: 1.0, n: 5, seed: 0 };
        let pos = PointSet::from_points(
            2,
            &[vec![0.1, 0.1], vec![0.15, 0.1], vec![0.1, 0.4], vec![0.9, 0.9], vec![0.12, 0.1]],
        )
        .unwrap();
        let edges = vec![
            SpaEdge { child: 1, parent: 0, step: 2 },
            SpaEdge { child: 2, parent: 0, step: 3 },
            SpaEdge { child: 4, parent: 0, step: 5 },
            SpaEdge { child: 4, parent: 1, step: 5 },
        ];
        SpaGraph::from_parts(params, pos, edges).unwrap()
    }

    #[test]
    fn classification_by_birth_and_length() {
        let g = tiny_graph();
        // τ = 5^β; pick β so that τ ≈ 3.0
        let beta = 3f64.ln() / 5f64.ln() + 1e-12;
        // L = 0.1
        let eta = 10f64.ln() / 5f64.ln();
        let eta = eta.min(0.999_999);
        let c = classify_edges(&g, beta, eta).unwrap();
        assert!((c.tau - 3.0).abs() < 1e-9);
        assert_eq!(c.total(), 4);
        // step 2 (len .05) old short, step 3 (len .3) old long, step 5 edges new short
        let long_thr = c.long_threshold;
        assert!(long_thr > 0.05 && long_thr < 0.3);
        assert_eq!((c.old_short, c.old_long, c.new_short, c.new_long), (1, 1, 2, 0));
        assert_eq!(c.old_vertices.len(), 3);
        let v0 = &c.old_vertices[0];
        assert_eq!((v0.degree_at_tau, v0.degree_final), (2, 3));
        assert!((v0.long_fraction - 1.0 / 3.0).abs() < 1e-12);
        assert!(c.old_vertices.iter().all(|s| s.ratio <= 1.0));
        assert!(classify_edges(&g, 1.0, 0.5).is_err());
    }

    #[test]
    fn ratio_check_constraints() {
        let g = tiny_graph();
        let err = old_vertex_ratio_check(&g, 0.5, 0.4, 0.01).unwrap_err().to_string();
        assert!(err.contains("beta < gamma"), "{err}");
        let ok = old_vertex_ratio_check(&g, 0.1, 0.6, 0.01).unwrap();
        // vertex 3 has no edges: ratio 0, never a violation
        assert!(ok.violations.iter().all(|v| v.degree_at_tau > 0));
    }

    #[test]
    fn doubling_and_outdegree() {
        let g = tiny_graph();
        let s = degree_doubling_stats(&g, 2, 1).unwrap().unwrap();
        assert_eq!(s.vertices, 1);
        assert_eq!(s.ratios, vec![(0, 2.0)]);
        assert!(degree_doubling_stats(&g, 2, 5).unwrap().is_none());
        assert!(degree_doubling_stats(&g, 3, 1).is_err());
        assert_eq!(max_outdegree(&g), 2);
        let one = generate(&SpaParams { m: 2, a1: 0.5, a2: 1.0, p: 1.0, n: 1, seed: 0 }).unwrap();
        assert_eq!(max_outdegree(&one), 0);
        assert_eq!(trajectory_statistic(&one), 0.0);
    }

    #[test]
    fn doubling_target_limits() {
        let g = generate(&SpaParams { m: 2, a1: 0.5, a2: 1.0, p: 1.0, n: 400, seed: 2 }).unwrap();
        assert!((degree_doubling_stats(&g, 100, 1).unwrap().unwrap().target - 2f64.sqrt()).abs() < 1e-12);
        let g = generate(&SpaParams { m: 2, a1: 1e-9, a2: 1.0, p: 1.0, n: 400, seed: 2 }).unwrap();
        let s = degree_doubling_stats(&g, 100, 1).unwrap().unwrap();
        assert!((s.target - 1.0).abs() < 1e-8);
    }

    #[test]
    fn trajectory_statistic_by_hand() {
        let g = tiny_graph();
        // v0 (i=1): increments at t=2,3,5 -> k/((t)^.5 ln 5); max at k=3,t=5 or k=1,t=2
        let ln5 = 5f64.ln();
        let expect = [1.0 / (2f64.sqrt() * ln5), 2.0 / (3f64.sqrt() * ln5), 3.0 / (5f64.sqrt() * ln5), 1.0 / ((5.0f64 / 2.0).sqrt() * ln5)]
            .into_iter()
            .fold(0.0, f64::max);
        assert!((trajectory_statistic(&g) - expect).abs() < 1e-12);
        let chk = trajectory_bound_check(&g, 1.0, 0.0);
        assert!(chk.within);
    }

    #[test]
    fn theorem_params_examples() {
        let p = theorem_params(0.5, 2, None).unwrap();
        assert!((p.k - 7.5).abs() < 1e-12);
        assert!((p.alpha_max - 1.0 / 30.0).abs() < 1e-12);
        let p = theorem_params(0.5, 2, Some(1.0 / 60.0)).unwrap();
        assert!((p.tau_exp - 1.0 / 7.5).abs() < 1e-12);
        assert!((p.t_exp - 1.0 / 60.0).abs() < 1e-12);
        assert!(theorem_params(1.0, 2, None).is_err());
        assert!(theorem_params(0.5, 2, Some(0.1)).is_err());
        let big_m = theorem_params(0.5, 200, None).unwrap();
        assert!(big_m.alpha_max < 1e-3);
    }

    #[test]
    fn round_budget_fails_above_one_third() {
        // α + β + ε − a + γa reduces to ε − δ(1 − a); with ε = δ(1 + a)/2 this is
        // negative only for a < 1/3
        let p = theorem_params(0.5, 2, None).unwrap();
        assert!(p.constraints.short_new_edges && p.constraints.y_range && p.constraints.old_vertex_ratio);
        assert!(!p.constraints.round_budget);
        assert!(!p.valid);
        let q = theorem_params(0.2, 2, None).unwrap();
        assert!(q.valid);
    }
}
