//! Preset experiment sweeps over sizes and seeds, with per-run output
//! directories, an aggregate summary and configurable assertions.

use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Config, GraphKind, SourceChoice};
use crate::error::{Error, Result};
use crate::graph::{CompleteGraph, Topology, UndirectedGraph};
use crate::io;
use crate::metrics::{classify_edges, degree_doubling_stats, effective_diameter, max_outdegree, theorem_params, trajectory_statistic};
use crate::percolation::{connected_components, find_crossings};
use crate::rgg::generate_rgg;
use crate::rng::{Domain, StreamFamily};
use crate::rumour::{containment_violations, run, Protocol, ProtocolConfig, RumourTrace};
use crate::spa::generate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Diameter,
    Rumour,
    Percolation,
    DegreeLaws,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Diameter => "diameter",
            Preset::Rumour => "rumour",
            Preset::Percolation => "percolation",
            Preset::DegreeLaws => "degree-laws",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diameter" => Ok(Preset::Diameter),
            "rumour" => Ok(Preset::Rumour),
            "percolation" => Ok(Preset::Percolation),
            "degree-laws" => Ok(Preset::DegreeLaws),
            _ => Err(Error::invalid(format!("unknown preset {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiameterRow {
    pub n: usize,
    pub seed: u64,
    pub edges: usize,
    pub giant_size: usize,
    pub giant_fraction: f64,
    pub effective_diameter: u32,
    /// `ln² n`.
    pub log2n: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RumourRow {
    pub graph: String,
    pub n: usize,
    pub seed: u64,
    pub protocol: Protocol,
    pub source: u32,
    pub component_size: usize,
    pub giant_size: usize,
    pub spread_time: Option<usize>,
    /// Rounds until half the giant component is informed; empty when the
    /// source lies outside it.
    pub rounds_to_half: Option<usize>,
    pub informed_count: usize,
    pub long_threshold: Option<f64>,
    pub long_edge_transmissions: Option<usize>,
    pub containment_violations: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PercolationRow {
    pub n: usize,
    pub density: f64,
    pub seed: u64,
    pub radius: f64,
    pub edges: usize,
    pub num_components: usize,
    pub giant_fraction: f64,
    pub all_crossed: Option<bool>,
    pub spanning: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeRow {
    pub n: usize,
    pub seed: u64,
    pub edges: usize,
    pub max_outdegree: u32,
    pub old_long: usize,
    pub old_short: usize,
    pub new_long: usize,
    pub new_short: usize,
    pub doubling_r: Option<u32>,
    pub doubling_vertices: usize,
    pub doubling_mean: Option<f64>,
    pub doubling_target: f64,
    pub trajectory_statistic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Rows {
    Diameter(Vec<DiameterRow>),
    Rumour(Vec<RumourRow>),
    Percolation(Vec<PercolationRow>),
    DegreeLaws(Vec<DegreeRow>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quantiles {
    pub count: usize,
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
}

impl Quantiles {
    /// `None` for an empty sample.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Quantiles> {
        let mut v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let k = v.len();
        let rank = |q: f64| v[((q * k as f64).ceil() as usize).clamp(1, k) - 1];
        let median = if k % 2 == 1 { v[k / 2] } else { (v[k / 2 - 1] + v[k / 2]) / 2.0 };
        Some(Quantiles { count: k, median, q10: rank(0.1), q90: rank(0.9) })
    }
}

/// One aggregate line: a group key and named statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Group {
    pub key: String,
    pub n: usize,
    pub stats: Vec<(String, Option<Quantiles>)>,
}

impl Group {
    pub fn stat(&self, name: &str) -> Option<Quantiles> {
        self.stats.iter().find(|s| s.0 == name).and_then(|s| s.1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentOutcome {
    pub preset: Preset,
    pub rows: Rows,
    pub groups: Vec<Group>,
    /// Fitted exponent of median rounds-to-half against `n`, per protocol.
    pub slopes: Vec<(Protocol, Option<f64>)>,
    pub assertions: Vec<AssertionOutcome>,
}

impl ExperimentOutcome {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn sizes(cfg: &Config, default: usize) -> Vec<usize> {
    if cfg.run.sizes.is_empty() {
        vec![default]
    } else {
        cfg.run.sizes.clone()
    }
}

fn run_dir(out: Option<&Path>, preset: Preset, n: usize, seed: u64) -> Result<Option<PathBuf>> {
    let Some(out) = out else { return Ok(None) };
    let dir = out.join(format!("{}_{n}_{seed}", preset.as_str()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(Some(dir))
}

/// The record a single run can be reproduced from.
fn run_record(cfg: &Config, n: usize, seed: u64) -> Config {
    let mut c = cfg.clone();
    c.run.seeds = vec![seed];
    c.run.sizes = vec![n];
    c
}

fn write_run<R: Serialize>(dir: &Path, cfg: &Config, n: usize, seed: u64, rows: &[R]) -> Result<()> {
    let path = dir.join("config.toml");
    std::fs::write(&path, run_record(cfg, n, seed).to_toml()).map_err(|e| Error::io(&path, e))?;
    write_csv(&dir.join("metrics.csv"), rows)
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let file = io::create(path)?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn jobs(sizes: &[usize], seeds: &[u64]) -> Vec<(usize, u64)> {
    sizes.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect()
}

fn par_jobs<T: Send>(
    jobs: &[(usize, u64)],
    progress: bool,
    label: &str,
    f: impl Fn(usize, u64) -> Result<Vec<T>> + Sync,
) -> Result<Vec<T>> {
    let parts: Vec<Vec<T>> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let r = f(n, seed);
            if progress {
                eprintln!("[{label}] n={n} seed={seed} done");
            }
            r
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Run a preset. With `out` set, each run writes `<out>/<preset>_<n>_<seed>/`
/// and the sweep writes `<preset>_runs.csv` and `<preset>_summary.json`.
pub fn run_experiment(preset: Preset, cfg: &Config, out: Option<&Path>, progress: bool) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    if let Some(out) = out {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    }
    let outcome = match preset {
        Preset::Diameter => diameter(cfg, out, progress)?,
        Preset::Rumour => rumour(cfg, out, progress)?,
        Preset::Percolation => percolation(cfg, out, progress)?,
        Preset::DegreeLaws => degree_laws(cfg, out, progress)?,
    };
    if let Some(out) = out {
        let name = preset.as_str();
        match &outcome.rows {
            Rows::Diameter(r) => write_csv(&out.join(format!("{name}_runs.csv")), r)?,
            Rows::Rumour(r) => write_csv(&out.join(format!("{name}_runs.csv")), r)?,
            Rows::Percolation(r) => write_csv(&out.join(format!("{name}_runs.csv")), r)?,
            Rows::DegreeLaws(r) => write_csv(&out.join(format!("{name}_runs.csv")), r)?,
        }
        #[derive(Serialize)]
        struct Summary<'a> {
            config: &'a Config,
            #[serde(flatten)]
            outcome: &'a ExperimentOutcome,
            passed: bool,
        }
        io::save_json(
            &out.join(format!("{name}_summary.json")),
            &Summary { config: cfg, outcome: &outcome, passed: outcome.passed() },
        )?;
    }
    Ok(outcome)
}

fn check(name: &str, passed: bool, detail: String) -> AssertionOutcome {
    AssertionOutcome { name: name.to_string(), passed, detail }
}

fn share(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

fn group_by_n<R>(rows: &[R], n_of: impl Fn(&R) -> usize) -> Vec<(usize, Vec<&R>)> {
    let mut out: Vec<(usize, Vec<&R>)> = Vec::new();
    for r in rows {
        let n = n_of(r);
        match out.iter_mut().find(|g| g.0 == n) {
            Some(g) => g.1.push(r),
            None => out.push((n, vec![r])),
        }
    }
    out
}

fn diameter(cfg: &Config, out: Option<&Path>, progress: bool) -> Result<ExperimentOutcome> {
    let rows = par_jobs(&jobs(&sizes(cfg, cfg.model.n), &cfg.run.seeds), progress, "diameter", |n, seed| {
        let spa = generate(&cfg.spa_params(n, seed))?;
        let g = spa.undirected();
        let comps = connected_components(&g);
        let giant = comps.giant_label().map(|l| comps.members(l)).unwrap_or_default();
        let sub = g.induced(&giant);
        let d = effective_diameter(&sub, cfg.metrics.fraction, cfg.sampler(giant.len(), seed)?)?;
        let log2n = (n as f64).ln().powi(2);
        let row = DiameterRow {
            n,
            seed,
            edges: g.num_edges(),
            giant_size: giant.len(),
            giant_fraction: comps.giant_fraction,
            effective_diameter: d,
            log2n,
            ratio: d as f64 / log2n.max(f64::MIN_POSITIVE),
        };
        if let Some(dir) = run_dir(out, Preset::Diameter, n, seed)? {
            write_run(&dir, cfg, n, seed, std::slice::from_ref(&row))?;
            if cfg.run.write_graphs {
                io::save_spa(&dir.join("graph.spa"), &spa)?;
            }
        }
        Ok(vec![row])
    })?;

    let groups: Vec<Group> = group_by_n(&rows, |r| r.n)
        .into_iter()
        .map(|(n, rs)| Group {
            key: format!("n={n}"),
            n,
            stats: vec![
                ("giant_fraction".into(), Quantiles::of(rs.iter().map(|r| r.giant_fraction))),
                ("effective_diameter".into(), Quantiles::of(rs.iter().map(|r| r.effective_diameter as f64))),
                ("ratio".into(), Quantiles::of(rs.iter().map(|r| r.ratio))),
            ],
        })
        .collect();

    let a = &cfg.assertions;
    let mut assertions = Vec::new();
    if let Some(c) = a.max_diam_log2 {
        let worst = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        assertions.push(check(
            "max-diam-log2",
            worst <= c,
            format!("largest effdiam/ln^2 n = {worst:.4}, bound {c}"),
        ));
    }
    if let Some(g) = a.max_ratio_growth {
        let medians: Vec<f64> = groups.iter().filter_map(|gr| gr.stat("ratio")).map(|q| q.median).collect();
        let growth = match medians.first() {
            Some(&first) if first > 0.0 => medians.iter().map(|m| m / first - 1.0).fold(0.0, f64::max),
            _ => 0.0,
        };
        assertions.push(check(
            "max-ratio-growth",
            growth <= g,
            format!("median ratio growth over the sweep {growth:.4}, allowed {g}"),
        ));
    }
    Ok(ExperimentOutcome { preset: Preset::Diameter, rows: Rows::Diameter(rows), groups, slopes: Vec::new(), assertions })
}

enum RumourGraph {
    Sparse(UndirectedGraph),
    Complete(CompleteGraph),
}

fn fixture(kind: GraphKind, n: usize) -> Result<RumourGraph> {
    let n32 = n as u32;
    let g = match kind {
        GraphKind::Path(_) => UndirectedGraph::from_edges(n, (1..n32).map(|i| (i - 1, i)))?,
        GraphKind::Cycle(_) if n >= 3 => UndirectedGraph::from_edges(n, (0..n32).map(|i| (i, (i + 1) % n32)))?,
        GraphKind::Cycle(_) => return Err(Error::invalid("a cycle needs at least 3 vertices")),
        GraphKind::Star(_) => UndirectedGraph::from_edges(n, (1..n32).map(|i| (0, i)))?,
        GraphKind::Complete(_) => return Ok(RumourGraph::Complete(CompleteGraph { n })),
        GraphKind::Spa | GraphKind::Rgg => unreachable!("not a fixture"),
    };
    Ok(RumourGraph::Sparse(g))
}

fn giant_size<G: Topology>(g: &G) -> usize {
    let c = connected_components(g);
    c.giant_label().map_or(0, |l| c.sizes[l as usize])
}

fn rumour(cfg: &Config, out: Option<&Path>, progress: bool) -> Result<ExperimentOutcome> {
    let kind = cfg.graph_kind()?;
    let source_choice = cfg.source()?;
    let sweep = match kind {
        GraphKind::Spa => sizes(cfg, cfg.model.n),
        GraphKind::Rgg => sizes(cfg, cfg.rgg.rgg_n),
        GraphKind::Path(Some(k)) | GraphKind::Cycle(Some(k)) | GraphKind::Star(Some(k)) | GraphKind::Complete(Some(k)) => {
            vec![k]
        }
        _ => sizes(cfg, cfg.model.n),
    };
    let rows = par_jobs(&jobs(&sweep, &cfg.run.seeds), progress, "rumour", |n, seed| {
        let dir = run_dir(out, Preset::Rumour, n, seed)?;
        // graph, positions with their long-edge threshold
        let (graph, positions, threshold) = match kind {
            GraphKind::Spa => {
                let spa = generate(&cfg.spa_params(n, seed))?;
                if let (Some(d), true) = (&dir, cfg.run.write_graphs) {
                    io::save_spa(&d.join("graph.spa"), &spa)?;
                }
                let p = spa.params();
                let l = theorem_params(p.a(), p.m, cfg.metrics.delta).ok().map(|t| t.long_threshold(n));
                (RumourGraph::Sparse(spa.undirected()), Some(spa.positions().clone()), l)
            }
            GraphKind::Rgg => {
                let r = cfg.rgg_radius(n, cfg.rgg.density);
                let g = generate_rgg(n, r, cfg.rgg.metric, seed)?;
                if let (Some(d), true) = (&dir, cfg.run.write_graphs) {
                    io::save_rgg(&d.join("graph.rgg"), &g)?;
                }
                (RumourGraph::Sparse(g.graph()), Some(g.positions), None)
            }
            k => (fixture(k, n)?, None, None),
        };
        let source = match source_choice {
            SourceChoice::Vertex(v) => v,
            SourceChoice::Uniform => StreamFamily::new(seed, Domain::SourceChoice)
                .stream(0)
                .random_range(0..n as u32),
        };
        let giant = match &graph {
            RumourGraph::Sparse(g) => giant_size(g),
            RumourGraph::Complete(g) => g.n,
        };
        let label = cfg.protocol.graph.clone();
        let mut rows = Vec::new();
        for &protocol in &cfg.protocol.protocols {
            let mut pc = ProtocolConfig::new(protocol, source, seed);
            pc.max_rounds = cfg.protocol.max_rounds;
            let trace = match &graph {
                RumourGraph::Sparse(g) => run(g, &pc, positions.as_ref(), threshold)?,
                RumourGraph::Complete(g) => run(g, &pc, None, None)?,
            };
            let violations = match (&positions, threshold) {
                (Some(p), Some(l)) => Some(containment_violations(&trace, p, l).len()),
                _ => None,
            };
            let in_giant = trace.component_size == giant;
            rows.push(RumourRow {
                graph: label.clone(),
                n,
                seed,
                protocol,
                source,
                component_size: trace.component_size,
                giant_size: giant,
                spread_time: trace.spread_time,
                rounds_to_half: if in_giant { trace.rounds_to_inform(giant.div_ceil(2)) } else { None },
                informed_count: trace.informed_count(),
                long_threshold: trace.long_threshold,
                long_edge_transmissions: trace.long_edge_transmissions,
                containment_violations: violations,
            });
            if let Some(d) = &dir {
                write_trace(d, &trace, protocol, positions.as_ref(), cfg.run.events)?;
            }
        }
        if let Some(d) = &dir {
            write_run(d, cfg, n, seed, &rows)?;
        }
        Ok(rows)
    })?;

    let mut groups = Vec::new();
    let mut slopes = Vec::new();
    for &protocol in &cfg.protocol.protocols {
        let mine: Vec<&RumourRow> = rows.iter().filter(|r| r.protocol == protocol).collect();
        let mut points = Vec::new();
        for (n, rs) in group_by_n(&mine, |r| r.n) {
            let half = Quantiles::of(rs.iter().filter_map(|r| r.rounds_to_half).map(|x| x as f64));
            if let Some(q) = half {
                points.push((n as f64, q.median));
            }
            groups.push(Group {
                key: format!("{protocol} n={n}"),
                n,
                stats: vec![
                    ("rounds_to_half".into(), half),
                    ("spread_time".into(), Quantiles::of(rs.iter().filter_map(|r| r.spread_time).map(|x| x as f64))),
                    ("giant_fraction".into(), Quantiles::of(rs.iter().map(|r| r.giant_size as f64 / n as f64))),
                ],
            });
        }
        slopes.push((protocol, log_log_slope(&points)));
    }

    let a = &cfg.assertions;
    let mut assertions = Vec::new();
    if let Some(limit) = a.max_spread_time {
        let bad = rows.iter().filter(|r| r.spread_time.is_none_or(|t| t > limit)).count();
        assertions.push(check("max-spread-time", bad == 0, format!("{bad} runs exceed {limit} rounds")));
    }
    if let Some(c) = a.max_spread_time_log2 {
        let bad = rows
            .iter()
            .filter(|r| r.spread_time.is_none_or(|t| t as f64 > c * (r.n as f64).log2()))
            .count();
        assertions.push(check("max-spread-time-log2", bad == 0, format!("{bad} runs exceed {c}*log2 n rounds")));
    }
    if let Some(min) = a.min_half_slope {
        for (protocol, s) in &slopes {
            let ok = s.is_some_and(|s| s >= min);
            let shown = s.map_or("undefined".to_string(), |s| format!("{s:.4}"));
            assertions.push(check(
                &format!("min-half-slope {protocol}"),
                ok,
                format!("fitted exponent {shown}, required {min}"),
            ));
        }
    }
    if a.containment_law == Some(true) {
        let measured: Vec<&RumourRow> = rows.iter().filter(|r| r.containment_violations.is_some()).collect();
        let bad: usize = measured.iter().filter_map(|r| r.containment_violations).sum();
        assertions.push(check(
            "containment-law",
            bad == 0 && !measured.is_empty(),
            format!("{bad} violating rounds over {} measured runs", measured.len()),
        ));
    }
    Ok(ExperimentOutcome { preset: Preset::Rumour, rows: Rows::Rumour(rows), groups, slopes, assertions })
}

fn write_trace(
    dir: &Path,
    trace: &RumourTrace,
    protocol: Protocol,
    positions: Option<&crate::geometry::PointSet>,
    events: bool,
) -> Result<()> {
    io::save_with(&dir.join(format!("trace_{protocol}.csv")), |w| io::write_trace_csv(trace, w))?;
    if events {
        let pos = positions.map(|p| (p, crate::geometry::MetricMode::Torus));
        io::save_with(&dir.join(format!("events_{protocol}.csv")), |w| io::write_event_log(trace, pos, w))?;
    }
    Ok(())
}

fn percolation(cfg: &Config, out: Option<&Path>, progress: bool) -> Result<ExperimentOutcome> {
    let rows = par_jobs(&jobs(&sizes(cfg, cfg.rgg.rgg_n), &cfg.run.seeds), progress, "percolation", |n, seed| {
        let dir = run_dir(out, Preset::Percolation, n, seed)?;
        let mut rows = Vec::new();
        for &density in &cfg.rgg.densities {
            let radius = cfg.rgg_radius(n, density);
            let snap = generate_rgg(n, radius, cfg.rgg.metric, seed)?;
            let comps = connected_components(&snap.graph());
            let crossing = if cfg.metrics.crossings {
                match find_crossings(&snap) {
                    Ok(c) => Some(c),
                    Err(Error::DegenerateGeometry(_)) => None,
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            if let (Some(d), true) = (&dir, cfg.run.write_graphs) {
                io::save_rgg(&d.join(format!("graph_{density}.rgg")), &snap)?;
            }
            if let (Some(d), Some(c)) = (&dir, &crossing) {
                let path = d.join(format!("crossings_{density}.json"));
                std::fs::write(&path, c.to_json()).map_err(|e| Error::io(&path, e))?;
            }
            rows.push(PercolationRow {
                n,
                density,
                seed,
                radius,
                edges: snap.edges.len(),
                num_components: comps.num_components(),
                giant_fraction: comps.giant_fraction,
                all_crossed: crossing.as_ref().map(|c| c.all_crossed()),
                spanning: crossing.as_ref().map(|c| c.spanning_label.is_some()),
            });
        }
        if let Some(d) = &dir {
            write_run(d, cfg, n, seed, &rows)?;
        }
        Ok(rows)
    })?;

    let mut groups = Vec::new();
    for &density in &cfg.rgg.densities {
        let mine: Vec<&PercolationRow> = rows.iter().filter(|r| r.density == density).collect();
        for (n, rs) in group_by_n(&mine, |r| r.n) {
            groups.push(Group {
                key: format!("density={density} n={n}"),
                n,
                stats: vec![
                    ("giant_fraction".into(), Quantiles::of(rs.iter().map(|r| r.giant_fraction))),
                    (
                        "crossed".into(),
                        Quantiles::of(rs.iter().filter_map(|r| r.all_crossed).map(|b| b as u8 as f64)),
                    ),
                ],
            });
        }
    }

    let a = &cfg.assertions;
    let mut assertions = Vec::new();
    if let Some(split) = a.giant_split {
        let median_at = |d: f64| Quantiles::of(rows.iter().filter(|r| r.density == d).map(|r| r.giant_fraction));
        let lo = cfg.rgg.densities.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cfg.rgg.densities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mlo, mhi) = (median_at(lo).map_or(f64::NAN, |q| q.median), median_at(hi).map_or(f64::NAN, |q| q.median));
        assertions.push(check(
            "giant-split",
            lo < hi && mlo < split && mhi > split,
            format!("median giant fraction {mlo:.4} at density {lo}, {mhi:.4} at density {hi}"),
        ));
    }
    if let Some(min) = a.min_giant {
        let need = a.min_giant_pass.unwrap_or(1.0);
        let hits = rows.iter().filter(|r| r.giant_fraction >= min).count();
        let s = share(hits, rows.len());
        assertions.push(check(
            "min-giant",
            s >= need,
            format!("{hits}/{} runs with giant fraction >= {min}, required share {need}", rows.len()),
        ));
    }
    Ok(ExperimentOutcome { preset: Preset::Percolation, rows: Rows::Percolation(rows), groups, slopes: Vec::new(), assertions })
}

fn degree_laws(cfg: &Config, out: Option<&Path>, progress: bool) -> Result<ExperimentOutcome> {
    let m = &cfg.metrics;
    let rows = par_jobs(&jobs(&sizes(cfg, cfg.model.n), &cfg.run.seeds), progress, "degree-laws", |n, seed| {
        let spa = generate(&cfg.spa_params(n, seed))?;
        let c = classify_edges(&spa, m.beta, m.eta)?;
        let r = m.doubling_r.unwrap_or((n / 4) as u32);
        let doubling = if r >= 1 && 2 * r as usize <= n {
            degree_doubling_stats(&spa, r, m.min_deg)?
        } else {
            None
        };
        let row = DegreeRow {
            n,
            seed,
            edges: spa.num_edges(),
            max_outdegree: max_outdegree(&spa),
            old_long: c.old_long,
            old_short: c.old_short,
            new_long: c.new_long,
            new_short: c.new_short,
            doubling_r: (r >= 1 && 2 * r as usize <= n).then_some(r),
            doubling_vertices: doubling.as_ref().map_or(0, |d| d.vertices),
            doubling_mean: doubling.as_ref().map(|d| d.mean),
            doubling_target: 2f64.powf(spa.params().a()),
            trajectory_statistic: trajectory_statistic(&spa),
        };
        if let Some(dir) = run_dir(out, Preset::DegreeLaws, n, seed)? {
            write_run(&dir, cfg, n, seed, std::slice::from_ref(&row))?;
            if cfg.run.write_graphs {
                io::save_spa(&dir.join("graph.spa"), &spa)?;
            }
        }
        Ok(vec![row])
    })?;

    let groups = group_by_n(&rows, |r| r.n)
        .into_iter()
        .map(|(n, rs)| Group {
            key: format!("n={n}"),
            n,
            stats: vec![
                ("new_long".into(), Quantiles::of(rs.iter().map(|r| r.new_long as f64))),
                ("doubling_mean".into(), Quantiles::of(rs.iter().filter_map(|r| r.doubling_mean))),
                ("max_outdegree".into(), Quantiles::of(rs.iter().map(|r| r.max_outdegree as f64))),
                ("trajectory_statistic".into(), Quantiles::of(rs.iter().map(|r| r.trajectory_statistic))),
            ],
        })
        .collect();

    let a = &cfg.assertions;
    let mut assertions = Vec::new();
    if let Some(need) = a.new_long_pass {
        let hits = rows.iter().filter(|r| r.new_long == 0).count();
        assertions.push(check(
            "new-long-pass",
            share(hits, rows.len()) >= need,
            format!("{hits}/{} runs without new long edges, required share {need}", rows.len()),
        ));
    }
    if let Some(tol) = a.doubling_tol {
        let need = a.doubling_pass.unwrap_or(1.0);
        let hits = rows
            .iter()
            .filter(|r| r.doubling_mean.is_some_and(|mu| (mu - r.doubling_target).abs() <= tol * r.doubling_target))
            .count();
        assertions.push(check(
            "doubling-tol",
            share(hits, rows.len()) >= need,
            format!("{hits}/{} runs with doubling mean within {tol} of target, required share {need}", rows.len()),
        ));
    }
    Ok(ExperimentOutcome { preset: Preset::DegreeLaws, rows: Rows::DegreeLaws(rows), groups, slopes: Vec::new(), assertions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Config {
        Config::from_toml(text, &[]).unwrap()
    }

    #[test]
    fn quantiles_and_slope() {
        let q = Quantiles::of([3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!((q.median, q.q10, q.q90), (2.5, 1.0, 4.0));
        assert!(Quantiles::of([]).is_none());
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 4.0].iter().map(|&x| (x, x.powf(0.3))).collect();
        assert!((log_log_slope(&pts).unwrap() - 0.3).abs() < 1e-12);
        assert!(log_log_slope(&pts[..1]).is_none());
    }

    #[test]
    fn rumour_on_cycle_fixture() {
        let c = cfg(
            "[protocol]\ngraph = \"cycle:5\"\nsource = \"0\"\nprotocols = [\"push\", \"push-pull\"]\n[run]\nseeds = [1, 2, 3]\n[assert]\nmax-spread-time = 5\n",
        );
        let o = run_experiment(Preset::Rumour, &c, None, false).unwrap();
        assert!(o.passed(), "{:?}", o.assertions);
        let Rows::Rumour(rows) = &o.rows else { panic!() };
        assert_eq!(rows.len(), 6);
    }

    #[test]
    fn complete_graph_contrast() {
        let c = cfg("[protocol]\ngraph = \"complete:4096\"\n[run]\nseeds = [1, 2]\n[assert]\nmax-spread-time-log2 = 3.0\n");
        let o = run_experiment(Preset::Rumour, &c, None, false).unwrap();
        assert!(o.passed(), "{:?}", o.assertions);
    }

    #[test]
    fn failing_assertion_is_reported() {
        let c = cfg("[protocol]\ngraph = \"path:10\"\nsource = \"0\"\n[assert]\nmax-spread-time = 2\n");
        let o = run_experiment(Preset::Rumour, &c, None, false).unwrap();
        assert!(!o.passed());
    }

    #[test]
    fn small_presets_run_and_write() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg("[model]\nn = 300\na2 = 5\n[rgg]\nrgg-n = 400\n[run]\nseeds = [1, 2]\nwrite-graphs = true\nevents = true\n[metrics]\ncrossings = true\n");
        for p in [Preset::Diameter, Preset::Rumour, Preset::Percolation, Preset::DegreeLaws] {
            let o = run_experiment(p, &c, Some(dir.path()), false).unwrap();
            assert!(o.passed());
            assert!(dir.path().join(format!("{}_summary.json", p.as_str())).exists());
        }
        let run = dir.path().join("rumour_300_1");
        for f in ["config.toml", "metrics.csv", "graph.spa", "trace_push-pull.csv", "events_push-pull.csv"] {
            assert!(run.join(f).exists(), "{f}");
        }
        let rec = std::fs::read_to_string(run.join("config.toml")).unwrap();
        let back = Config::from_toml(&rec, &[]).unwrap();
        assert_eq!(back.run.seeds, vec![1]);
        assert_eq!(back.run.sizes, vec![300]);
    }
}
