use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use spa_core::config::{Config, Kind, SourceChoice, KEYS};
use spa_core::experiment::{run_experiment, write_csv, Preset};
use spa_core::graph::{Topology, UndirectedGraph};
use spa_core::io;
use spa_core::metrics::{classify_edges, effective_diameter, theorem_params};
use spa_core::percolation::{connected_components, find_crossings};
use spa_core::rgg::{generate_rgg, RggSnapshot};
use spa_core::rumour::{run, ProtocolConfig};
use spa_core::spa::{generate, SpaGraph};
use spa_core::{Error, Result};

/// Spatial preferred attachment graphs: generation, geometric snapshots,
/// percolation, rumour spreading and experiment sweeps.
///
/// Every config key is also a flag of the same name; flags win over the file.
#[derive(Parser)]
#[command(name = "spa", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for single-run commands (default: first of `seeds`).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Input {
    /// Graph file to analyse instead of generating one from the config.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an SPA graph file.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a standalone random geometric graph file.
    Rgg {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Slab-crossing search on a geometric graph; writes a JSON report.
    Crossings {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
    },
    /// Connected components; writes `component,size` rows.
    Components {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one rumour protocol; writes the per-round trace.
    Rumour {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
        /// Per-transmission event log.
        #[arg(long = "events-out")]
        events_out: Option<PathBuf>,
    },
    /// Effective diameter of a graph.
    Effdiam {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: Input,
    },
    /// Old/new and long/short edge classification of an SPA graph.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: Input,
        /// Per-old-vertex degree table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exponents of the slow-spreading bound for the configured model.
    Params {
        #[command(flatten)]
        common: Common,
    },
    /// Run a preset sweep: diameter, rumour, percolation or degree-laws.
    Experiment {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

const SUBCOMMANDS: &[&str] = &[
    "generate",
    "rgg",
    "crossings",
    "components",
    "rumour",
    "effdiam",
    "classify",
    "params",
    "experiment",
];

fn key_args() -> Vec<Arg> {
    KEYS.iter()
        .map(|k| {
            let value = match k.kind {
                Kind::Int => "INT",
                Kind::Float => "REAL",
                Kind::Str => "STR",
                Kind::Bool => "BOOL",
                Kind::IntList => "INT,..",
                Kind::FloatList => "REAL,..",
                Kind::StrList => "STR,..",
            };
            Arg::new(k.key)
                .long(k.key)
                .value_name(value)
                .help(format!("[{}] {}", k.section, k.help))
                .help_heading("Config keys")
        })
        .collect()
}

fn overrides(m: &ArgMatches) -> Vec<(String, String)> {
    KEYS.iter()
        .filter_map(|k| m.get_one::<String>(k.key).map(|v| (k.key.to_string(), v.clone())))
        .collect()
}

fn load_config(common: &Common, overrides: &[(String, String)]) -> Result<Config> {
    let text = match &common.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| io_err(p, e))?,
        None => String::new(),
    };
    Config::from_toml(&text, overrides)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source: e }
}

fn seed_of(common: &Common, cfg: &Config) -> u64 {
    common.seed.unwrap_or(cfg.run.seeds[0])
}

enum Loaded {
    Spa(SpaGraph),
    Rgg(RggSnapshot),
}

impl Loaded {
    fn graph(&self) -> UndirectedGraph {
        match self {
            Loaded::Spa(g) => g.undirected(),
            Loaded::Rgg(g) => g.graph(),
        }
    }

    fn positions(&self) -> &spa_core::geometry::PointSet {
        match self {
            Loaded::Spa(g) => g.positions(),
            Loaded::Rgg(g) => &g.positions,
        }
    }
}

fn load_graph(path: &Path) -> Result<Loaded> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = BufReader::new(file);
    let head = r.fill_buf().map_err(|e| io_err(path, e))?;
    if head.starts_with(b"spa ") {
        io::read_spa(r).map(Loaded::Spa)
    } else if head.starts_with(b"rgg ") {
        io::read_rgg(r).map(Loaded::Rgg)
    } else {
        Err(Error::Parse { line: 1, msg: format!("{} is neither an spa nor an rgg file", path.display()) })
    }
}

fn spa_input(input: &Input, cfg: &Config, seed: u64) -> Result<SpaGraph> {
    match &input.input {
        Some(p) => match load_graph(p)? {
            Loaded::Spa(g) => Ok(g),
            Loaded::Rgg(_) => Err(Error::InvalidArgument(format!("{} is not an spa file", p.display()))),
        },
        None => generate(&cfg.spa_params(cfg.model.n, seed)),
    }
}

fn rgg_from_config(cfg: &Config, seed: u64) -> Result<RggSnapshot> {
    let n = cfg.rgg.rgg_n;
    generate_rgg(n, cfg.rgg_radius(n, cfg.rgg.density), cfg.rgg.metric, seed)
}

/// Graph for analysis commands: the input file, else the graph named by `graph`.
fn any_input(input: &Input, cfg: &Config, seed: u64) -> Result<Loaded> {
    match &input.input {
        Some(p) => load_graph(p),
        None if cfg.protocol.graph == "rgg" => rgg_from_config(cfg, seed).map(Loaded::Rgg),
        None => generate(&cfg.spa_params(cfg.model.n, seed)).map(Loaded::Spa),
    }
}

fn stdout_line(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}");
}

fn execute(cli: Cli, ov: &[(String, String)]) -> Result<bool> {
    match cli.cmd {
        Cmd::Generate { common, out } => {
            let cfg = load_config(&common, ov)?;
            let g = generate(&cfg.spa_params(cfg.model.n, seed_of(&common, &cfg)))?;
            io::save_spa(&out, &g)?;
            let max_degree = g.undirected().max_degree();
            stdout_line(&format!("n={} edges={} max_degree={max_degree}", g.num_vertices(), g.num_edges()));
        }
        Cmd::Rgg { common, out } => {
            let cfg = load_config(&common, ov)?;
            let g = rgg_from_config(&cfg, seed_of(&common, &cfg))?;
            io::save_rgg(&out, &g)?;
            let max_degree = g.graph().max_degree();
            stdout_line(&format!("n={} r={} edges={} max_degree={max_degree}", g.t, io::fmt_real(g.r), g.edges.len()));
        }
        Cmd::Crossings { common, input, out } => {
            let cfg = load_config(&common, ov)?;
            let seed = seed_of(&common, &cfg);
            let snap = match &input.input {
                Some(p) => match load_graph(p)? {
                    Loaded::Rgg(g) => g,
                    Loaded::Spa(_) => return Err(Error::InvalidArgument(format!("{} is not an rgg file", p.display()))),
                },
                None => rgg_from_config(&cfg, seed)?,
            };
            let report = find_crossings(&snap)?;
            std::fs::write(&out, report.to_json() + "\n").map_err(|e| io_err(&out, e))?;
            stdout_line(&format!(
                "slabs={} all_crossed={} spanning={}",
                report.num_slabs,
                report.all_crossed(),
                report.spanning_label.is_some()
            ));
        }
        Cmd::Components { common, input, out } => {
            let cfg = load_config(&common, ov)?;
            let g = any_input(&input, &cfg, seed_of(&common, &cfg))?.graph();
            let c = connected_components(&g);
            if let Some(out) = out {
                let mut sizes: Vec<(usize, u32)> = c.sizes.iter().map(|&s| s as u32).enumerate().collect();
                sizes.sort_by_key(|&(l, s)| (std::cmp::Reverse(s), l));
                let rows: Vec<Vec<String>> = sizes.iter().map(|(l, s)| vec![l.to_string(), s.to_string()]).collect();
                io::save_csv(&out, &["component", "size"], &rows)?;
            }
            stdout_line(&format!(
                "n={} components={} giant_fraction={}",
                g.num_vertices(),
                c.num_components(),
                io::fmt_real(c.giant_fraction)
            ));
        }
        Cmd::Rumour { common, input, out, events_out } => {
            let cfg = load_config(&common, ov)?;
            let seed = seed_of(&common, &cfg);
            let loaded = any_input(&input, &cfg, seed)?;
            let g = loaded.graph();
            let source = match cfg.source()? {
                SourceChoice::Vertex(v) => v,
                SourceChoice::Uniform => {
                    use rand::Rng;
                    spa_core::rng::StreamFamily::new(seed, spa_core::rng::Domain::SourceChoice)
                        .stream(0)
                        .random_range(0..g.num_vertices() as u32)
                }
            };
            let threshold = match &loaded {
                Loaded::Spa(s) => theorem_params(s.params().a(), s.params().m, cfg.metrics.delta)
                    .ok()
                    .map(|t| t.long_threshold(s.num_vertices())),
                Loaded::Rgg(_) => None,
            };
            let mut pc = ProtocolConfig::new(cfg.protocol.protocols[0], source, seed);
            pc.max_rounds = cfg.protocol.max_rounds;
            let trace = run(&g, &pc, Some(loaded.positions()), threshold)?;
            io::save_with(&out, |w| io::write_trace_csv(&trace, w))?;
            if let Some(ev) = events_out {
                let metric = match &loaded {
                    Loaded::Spa(_) => spa_core::geometry::MetricMode::Torus,
                    Loaded::Rgg(r) => r.metric,
                };
                io::save_with(&ev, |w| io::write_event_log(&trace, Some((loaded.positions(), metric)), w))?;
            }
            let spread = trace.spread_time.map_or("none".to_string(), |t| t.to_string());
            stdout_line(&format!(
                "protocol={} source={source} component={} informed={} spread_time={spread}",
                pc.protocol,
                trace.component_size,
                trace.informed_count()
            ));
        }
        Cmd::Effdiam { common, input } => {
            let cfg = load_config(&common, ov)?;
            let seed = seed_of(&common, &cfg);
            let g = any_input(&input, &cfg, seed)?.graph();
            let d = effective_diameter(&g, cfg.metrics.fraction, cfg.sampler(g.num_vertices(), seed)?)?;
            stdout_line(&format!("effective_diameter={d}"));
        }
        Cmd::Classify { common, input, out } => {
            let cfg = load_config(&common, ov)?;
            let g = spa_input(&input, &cfg, seed_of(&common, &cfg))?;
            let c = classify_edges(&g, cfg.metrics.beta, cfg.metrics.eta)?;
            if let Some(out) = out {
                write_csv(&out, &c.old_vertices)?;
            }
            stdout_line(&format!(
                "old_long={} old_short={} new_long={} new_short={} short_edge_condition={}",
                c.old_long, c.old_short, c.new_long, c.new_short, c.short_edge_condition
            ));
        }
        Cmd::Params { common } => {
            let cfg = load_config(&common, ov)?;
            let p = theorem_params(cfg.model.p * cfg.model.a1, cfg.model.m, cfg.metrics.delta)?;
            stdout_line(&serde_json::to_string_pretty(&p).expect("params serialise"));
        }
        Cmd::Experiment { name, common } => {
            let preset: Preset = name.parse()?;
            let cfg = load_config(&common, ov)?;
            let outcome = run_experiment(preset, &cfg, Some(&cfg.run.out_dir), true)?;
            for a in &outcome.assertions {
                stdout_line(&format!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail));
            }
            return Ok(outcome.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let mut cmd = Cli::command();
    for name in SUBCOMMANDS {
        cmd = cmd.mut_subcommand(name, |s| s.args(key_args()));
    }
    let matches = cmd.get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let ov = matches.subcommand().map(|(_, m)| overrides(m)).unwrap_or_default();
    match execute(cli, &ov) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => 3,
                _ => 2,
            })
        }
    }
}
