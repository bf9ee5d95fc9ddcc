//! Experiment configuration: a TOML file with sections whose keys are
//! unique across sections, so every key doubles as a command-line flag.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::MetricMode;
use crate::metrics::DiameterSampler;
use crate::rumour::Protocol;
use crate::spa::SpaParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    Str,
    Bool,
    IntList,
    FloatList,
    StrList,
}

pub struct KeySpec {
    pub section: &'static str,
    pub key: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

macro_rules! keys {
    ($($section:literal $key:literal $kind:ident $help:literal;)*) => {
        pub const KEYS: &[KeySpec] = &[$(KeySpec { section: $section, key: $key, kind: Kind::$kind, help: $help }),*];
    };
}

keys! {
    "model" "m" Int "dimension of the torus";
    "model" "a1" Float "influence-region slope A1";
    "model" "a2" Float "influence-region intercept A2";
    "model" "p" Float "link probability";
    "model" "n" Int "number of vertices";
    "rgg" "rgg-n" Int "number of points of a standalone geometric graph";
    "rgg" "density" Float "mean-degree scale pi*N*r^2 (sets the radius)";
    "rgg" "radius" Float "connection radius (overrides density)";
    "rgg" "metric" Str "torus | euclidean-square";
    "rgg" "densities" FloatList "density sweep for the percolation preset";
    "protocol" "protocols" StrList "push | push-pull";
    "protocol" "source" Str "uniform or a vertex id";
    "protocol" "max-rounds" Int "round cap";
    "protocol" "graph" Str "spa | rgg | path | cycle | star | complete, optionally kind:size";
    "run" "seeds" IntList "seed list";
    "run" "sizes" IntList "size sweep (defaults to n or rgg-n)";
    "run" "out-dir" Str "output directory";
    "run" "write-graphs" Bool "write graph files into run directories";
    "run" "events" Bool "write per-transmission event logs";
    "metrics" "fraction" Float "effective-diameter pair fraction";
    "metrics" "sampler" Str "auto | exact | pairs | sources";
    "metrics" "num-pairs" Int "pairs for the pairs sampler";
    "metrics" "num-sources" Int "BFS sources for the sources sampler";
    "metrics" "beta" Float "old/new cutoff exponent";
    "metrics" "eta" Float "long/short cutoff exponent";
    "metrics" "delta" Float "round exponent slack (defaults to alpha_max/2)";
    "metrics" "doubling-r" Int "R for the degree-doubling ratio (defaults to n/4)";
    "metrics" "min-deg" Int "minimum in-degree at R for the doubling ratio";
    "metrics" "crossings" Bool "run the slab-crossing search in the percolation preset";
    "assert" "max-diam-log2" Float "bound c in effective diameter <= c*ln^2 n";
    "assert" "max-ratio-growth" Float "allowed relative growth of effdiam/ln^2 n over the sweep";
    "assert" "max-spread-time" Int "absolute spread-time bound";
    "assert" "max-spread-time-log2" Float "bound c in spread time <= c*log2 n";
    "assert" "min-half-slope" Float "minimum fitted exponent of rounds to inform half the giant";
    "assert" "containment-law" Bool "informed region stays within T*L while no long edge fired";
    "assert" "giant-split" Float "lowest density median below, highest above this fraction";
    "assert" "min-giant" Float "giant fraction target per run";
    "assert" "min-giant-pass" Float "share of runs reaching min-giant";
    "assert" "new-long-pass" Float "share of runs with no new long edge";
    "assert" "doubling-tol" Float "relative tolerance of the doubling mean around 2^(pA1)";
    "assert" "doubling-pass" Float "share of runs within doubling-tol";
}

pub fn key_spec(key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.key == key)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ModelSection {
    pub m: usize,
    pub a1: f64,
    pub a2: f64,
    pub p: f64,
    pub n: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { m: 2, a1: 0.5, a2: 20.0, p: 1.0, n: 4096 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RggSection {
    pub rgg_n: usize,
    pub density: f64,
    pub radius: Option<f64>,
    pub metric: MetricMode,
    pub densities: Vec<f64>,
}

impl Default for RggSection {
    fn default() -> Self {
        Self {
            rgg_n: 20_000,
            density: 10.0,
            radius: None,
            metric: MetricMode::Torus,
            densities: vec![2.0, 8.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ProtocolSection {
    pub protocols: Vec<Protocol>,
    pub source: String,
    pub max_rounds: usize,
    pub graph: String,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            protocols: vec![Protocol::PushPull],
            source: "uniform".into(),
            max_rounds: 1_000_000,
            graph: "spa".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunSection {
    pub seeds: Vec<u64>,
    pub sizes: Vec<usize>,
    pub out_dir: PathBuf,
    pub write_graphs: bool,
    pub events: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seeds: vec![1],
            sizes: Vec::new(),
            out_dir: "out".into(),
            write_graphs: false,
            events: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct MetricsSection {
    pub fraction: f64,
    pub sampler: String,
    pub num_pairs: usize,
    pub num_sources: usize,
    pub beta: f64,
    pub eta: f64,
    pub delta: Option<f64>,
    pub doubling_r: Option<u32>,
    pub min_deg: u32,
    pub crossings: bool,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self {
            fraction: 0.9,
            sampler: "auto".into(),
            num_pairs: 10_000,
            num_sources: 64,
            beta: 0.5,
            eta: 0.1,
            delta: None,
            doubling_r: None,
            min_deg: 50,
            crossings: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AssertSection {
    pub max_diam_log2: Option<f64>,
    pub max_ratio_growth: Option<f64>,
    pub max_spread_time: Option<usize>,
    pub max_spread_time_log2: Option<f64>,
    pub min_half_slope: Option<f64>,
    pub containment_law: Option<bool>,
    pub giant_split: Option<f64>,
    pub min_giant: Option<f64>,
    pub min_giant_pass: Option<f64>,
    pub new_long_pass: Option<f64>,
    pub doubling_tol: Option<f64>,
    pub doubling_pass: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub model: ModelSection,
    pub rgg: RggSection,
    pub protocol: ProtocolSection,
    pub run: RunSection,
    pub metrics: MetricsSection,
    #[serde(rename = "assert")]
    pub assertions: AssertSection,
}

/// Graph family a rumour run spreads on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Spa,
    Rgg,
    Path(Option<usize>),
    Cycle(Option<usize>),
    Star(Option<usize>),
    Complete(Option<usize>),
}

impl std::str::FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, size) = match s.split_once(':') {
            Some((a, b)) => {
                let k: usize = b.parse().map_err(|_| Error::invalid(format!("bad graph size in {s:?}")))?;
                (a, Some(k))
            }
            None => (s, None),
        };
        match (name, size) {
            ("spa", None) => Ok(GraphKind::Spa),
            ("rgg", None) => Ok(GraphKind::Rgg),
            ("path", k) => Ok(GraphKind::Path(k)),
            ("cycle", k) => Ok(GraphKind::Cycle(k)),
            ("star", k) => Ok(GraphKind::Star(k)),
            ("complete", k) => Ok(GraphKind::Complete(k)),
            _ => Err(Error::invalid(format!("unknown graph {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceChoice {
    Uniform,
    Vertex(u32),
}

impl Config {
    /// Parse a TOML document and apply `overrides` (key, raw value) on top.
    pub fn from_toml(text: &str, overrides: &[(String, String)]) -> Result<Config> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Parse {
                line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
                msg: e.message().to_string(),
            })?;
        for (key, raw) in overrides {
            let spec = key_spec(key).ok_or_else(|| Error::invalid(format!("unknown key {key:?}")))?;
            let section = table
                .entry(spec.section)
                .or_insert_with(|| toml::Value::Table(Default::default()));
            let toml::Value::Table(section) = section else {
                return Err(Error::invalid(format!("[{}] is not a section", spec.section)));
            };
            section.insert(key.clone(), override_value(spec, raw)?);
        }
        let cfg: Config = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::invalid(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn spa_params(&self, n: usize, seed: u64) -> SpaParams {
        let m = &self.model;
        SpaParams { m: m.m, a1: m.a1, a2: m.a2, p: m.p, n, seed }
    }

    pub fn graph_kind(&self) -> Result<GraphKind> {
        self.protocol.graph.parse()
    }

    pub fn source(&self) -> Result<SourceChoice> {
        match self.protocol.source.as_str() {
            "uniform" => Ok(SourceChoice::Uniform),
            s => s
                .parse()
                .map(SourceChoice::Vertex)
                .map_err(|_| Error::invalid(format!("source must be `uniform` or a vertex id, got {s:?}"))),
        }
    }

    pub fn rgg_radius(&self, n: usize, density: f64) -> f64 {
        self.rgg
            .radius
            .unwrap_or_else(|| crate::rgg::radius_for_density(density, n))
    }

    /// The sampler for a graph with `n` vertices.
    pub fn sampler(&self, n: usize, seed: u64) -> Result<DiameterSampler> {
        let m = &self.metrics;
        Ok(match m.sampler.as_str() {
            "exact" => DiameterSampler::Exact,
            "pairs" => DiameterSampler::Pairs { num_pairs: m.num_pairs, seed },
            "sources" => DiameterSampler::Sources { num_sources: m.num_sources, seed },
            "auto" if n <= crate::metrics::EXACT_LIMIT => DiameterSampler::Exact,
            "auto" => DiameterSampler::Sources { num_sources: m.num_sources, seed },
            s => return Err(Error::invalid(format!("unknown sampler {s:?}"))),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.run.seeds.is_empty() {
            return Err(Error::invalid("seed list is empty"));
        }
        self.spa_params(self.model.n.max(1), 0).validate()?;
        if self.run.sizes.contains(&0) || self.rgg.rgg_n == 0 {
            return Err(Error::invalid("sizes must be positive"));
        }
        if let Some(r) = self.rgg.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid(format!("radius {r} must be positive")));
            }
        }
        if self.rgg.densities.iter().chain([&self.rgg.density]).any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::invalid("densities must be positive"));
        }
        if self.protocol.protocols.is_empty() {
            return Err(Error::invalid("protocol list is empty"));
        }
        if !(self.metrics.fraction > 0.0 && self.metrics.fraction <= 1.0) {
            return Err(Error::invalid("fraction must lie in (0,1]"));
        }
        self.graph_kind()?;
        self.source()?;
        self.sampler(1, 0)?;
        Ok(())
    }
}

fn scalar(kind: Kind, raw: &str) -> Result<toml::Value> {
    let bad = || Error::invalid(format!("cannot parse {raw:?} as {kind:?}"));
    Ok(match kind {
        Kind::Int | Kind::IntList => toml::Value::Integer(raw.trim().parse().map_err(|_| bad())?),
        Kind::Float | Kind::FloatList => toml::Value::Float(raw.trim().parse().map_err(|_| bad())?),
        Kind::Bool => toml::Value::Boolean(raw.trim().parse().map_err(|_| bad())?),
        Kind::Str | Kind::StrList => toml::Value::String(raw.trim().to_string()),
    })
}

/// Typed TOML value for a command-line override; lists are comma-separated.
pub fn override_value(spec: &KeySpec, raw: &str) -> Result<toml::Value> {
    match spec.kind {
        Kind::IntList | Kind::FloatList | Kind::StrList => Ok(toml::Value::Array(
            raw.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| scalar(spec.kind, s))
                .collect::<Result<_>>()?,
        )),
        k => scalar(k, raw),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_match_sections() {
        let cfg = Config::default();
        let value = toml::Value::try_from(&cfg).unwrap();
        for k in KEYS {
            let section = value.get(k.section).unwrap_or_else(|| panic!("section {}", k.section));
            // optional keys are omitted when unset
            let optional = matches!(k.key, "radius" | "delta" | "doubling-r") || k.section == "assert";
            assert!(optional || section.get(k.key).is_some(), "{}", k.key);
        }
        let mut names: Vec<_> = KEYS.iter().map(|k| k.key).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), KEYS.len());
    }

    #[test]
    fn file_and_overrides() {
        let text = "[model]\nn = 100\na2 = 3\n[run]\nseeds = [4, 5]\n";
        let cfg = Config::from_toml(text, &[("seeds".into(), "7".into()), ("protocols".into(), "push,push-pull".into())]).unwrap();
        assert_eq!(cfg.model.n, 100);
        assert_eq!(cfg.model.a2, 3.0);
        assert_eq!(cfg.run.seeds, vec![7]);
        assert_eq!(cfg.protocol.protocols, vec![Protocol::Push, Protocol::PushPull]);
        let back = Config::from_toml(&cfg.to_toml(), &[]).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Config::from_toml("[model]\nbogus = 1\n", &[]).is_err());
        assert!(Config::from_toml("[run]\nseeds = []\n", &[]).is_err());
        assert!(Config::from_toml("[model]\np = 2\n", &[]).is_err());
        assert!(Config::from_toml("", &[("nope".into(), "1".into())]).is_err());
        assert!(Config::from_toml("", &[("n".into(), "x".into())]).is_err());
        assert!(Config::from_toml("", &[("graph".into(), "torus".into())]).is_err());
        assert!(matches!(Config::from_toml("[model\n", &[]), Err(Error::Parse { .. })));
    }

    #[test]
    fn graph_kinds() {
        assert_eq!("cycle:5".parse::<GraphKind>().unwrap(), GraphKind::Cycle(Some(5)));
        assert_eq!("complete".parse::<GraphKind>().unwrap(), GraphKind::Complete(None));
        assert!("spa:4".parse::<GraphKind>().is_err());
    }
}
