//! Line-based graph files, trace tables and JSON output.
//!
//! Reals are written with 17 significant digits so they parse back to the
//! same `f64`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{MetricMode, PointSet};
use crate::rgg::{RggOrigin, RggSnapshot};
use crate::rumour::RumourTrace;
use crate::spa::{SpaEdge, SpaGraph, SpaParams};

const VERSION: &str = "1";

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_vertices<W: Write>(w: &mut W, pts: &PointSet) -> std::io::Result<()> {
    for (i, p) in pts.iter().enumerate() {
        write!(w, "v {i}")?;
        for c in p {
            write!(w, " {}", fmt_real(*c))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_spa<W: Write>(g: &SpaGraph, w: &mut W) -> std::io::Result<()> {
    let p = g.params();
    writeln!(
        w,
        "spa {VERSION} {} {} {} {} {} {}",
        p.m,
        fmt_real(p.a1),
        fmt_real(p.a2),
        fmt_real(p.p),
        p.n,
        p.seed
    )?;
    write_vertices(w, g.positions())?;
    for e in g.edges() {
        writeln!(w, "e {} {} {}", e.child, e.parent, e.step)?;
    }
    Ok(())
}

pub fn write_rgg<W: Write>(g: &RggSnapshot, w: &mut W) -> std::io::Result<()> {
    let seed = match g.origin {
        RggOrigin::Standalone { seed } => seed.to_string(),
        RggOrigin::Snapshot => "snapshot".to_string(),
        RggOrigin::Fixture => "-".to_string(),
    };
    writeln!(w, "rgg {VERSION} {} {} {} {seed}", g.t, fmt_real(g.r), g.metric)?;
    write_vertices(w, &g.positions)?;
    for (u, v) in &g.edges {
        writeln!(w, "e {u} {v}")?;
    }
    Ok(())
}

/// Tokenised lines with 1-based numbers, blank lines skipped.
struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self { inner: r.lines(), line: 0 }
    }

    fn next_line(&mut self) -> Result<Option<(usize, String)>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l.map_err(|e| parse_err(self.line, e.to_string()))?;
            if !l.trim().is_empty() {
                return Ok(Some((self.line, l)));
            }
        }
        Ok(None)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what}: {tok:?}")))
}

fn expect_end<'a>(mut toks: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match toks.next() {
        Some(t) => Err(parse_err(line, format!("unexpected trailing token {t:?}"))),
        None => Ok(()),
    }
}

fn read_header<R: BufRead>(lines: &mut Lines<R>, kind: &str) -> Result<(usize, Vec<String>)> {
    let (ln, l) = lines.next_line()?.ok_or_else(|| parse_err(1, "empty file"))?;
    let mut toks = l.split_whitespace();
    if toks.next() != Some(kind) {
        return Err(parse_err(ln, format!("expected `{kind}` header")));
    }
    let version = toks.next().unwrap_or("");
    if version != VERSION {
        return Err(parse_err(ln, format!("unsupported version {version:?}")));
    }
    Ok((ln, toks.map(str::to_string).collect()))
}

/// Read `n` vertex lines, then hand every following line to `on_edge`.
fn read_body<R: BufRead>(
    lines: &mut Lines<R>,
    dim: usize,
    n: usize,
    mut on_edge: impl FnMut(usize, &str) -> Result<()>,
) -> Result<PointSet> {
    let mut pts = PointSet::with_capacity(dim, n);
    let mut coords = Vec::with_capacity(dim);
    for i in 0..n {
        let (ln, l) = lines
            .next_line()?
            .ok_or_else(|| parse_err(lines.line, format!("expected {n} vertex lines, found {i}")))?;
        let mut toks = l.split_whitespace();
        if toks.next() != Some("v") {
            return Err(parse_err(ln, "expected vertex line"));
        }
        let id: usize = field(toks.next(), ln, "vertex id")?;
        if id != i {
            return Err(parse_err(ln, format!("vertex id {id} out of order, expected {i}")));
        }
        coords.clear();
        for k in 0..dim {
            coords.push(field::<f64>(toks.next(), ln, &format!("coordinate {}", k + 1))?);
        }
        expect_end(toks, ln)?;
        pts.push(&coords).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    while let Some((ln, l)) = lines.next_line()? {
        let rest = l
            .strip_prefix("e ")
            .ok_or_else(|| parse_err(ln, "expected edge line"))?;
        on_edge(ln, rest)?;
    }
    Ok(pts)
}

pub fn read_spa<R: BufRead>(r: R) -> Result<SpaGraph> {
    let mut lines = Lines::new(r);
    let (ln, h) = read_header(&mut lines, "spa")?;
    if h.len() != 6 {
        return Err(parse_err(ln, "header needs m A1 A2 p n seed"));
    }
    let params = SpaParams {
        m: field(Some(&h[0]), ln, "m")?,
        a1: field(Some(&h[1]), ln, "A1")?,
        a2: field(Some(&h[2]), ln, "A2")?,
        p: field(Some(&h[3]), ln, "p")?,
        n: field(Some(&h[4]), ln, "n")?,
        seed: field(Some(&h[5]), ln, "seed")?,
    };
    params.validate().map_err(|e| parse_err(ln, e.to_string()))?;
    let mut edges = Vec::new();
    let pts = read_body(&mut lines, params.m, params.n, |ln, rest| {
        let mut toks = rest.split_whitespace();
        edges.push(SpaEdge {
            child: field(toks.next(), ln, "child")?,
            parent: field(toks.next(), ln, "parent")?,
            step: field(toks.next(), ln, "birth step")?,
        });
        expect_end(toks, ln)
    })?;
    SpaGraph::from_parts(params, pts, edges)
}

pub fn read_rgg<R: BufRead>(r: R) -> Result<RggSnapshot> {
    let mut lines = Lines::new(r);
    let (ln, h) = read_header(&mut lines, "rgg")?;
    if h.len() != 4 {
        return Err(parse_err(ln, "header needs N r metric seed"));
    }
    let n: usize = field(Some(&h[0]), ln, "N")?;
    let r: f64 = field(Some(&h[1]), ln, "r")?;
    let metric: MetricMode = field(Some(&h[2]), ln, "metric")?;
    let origin = match h[3].as_str() {
        "snapshot" => RggOrigin::Snapshot,
        "-" => RggOrigin::Fixture,
        s => RggOrigin::Standalone {
            seed: field(Some(s), ln, "seed")?,
        },
    };
    if !(r > 0.0 && r.is_finite()) {
        return Err(parse_err(ln, format!("radius {r} must be positive")));
    }
    let mut edges = Vec::new();
    let pts = read_body(&mut lines, 2, n, |ln, rest| {
        let mut toks = rest.split_whitespace();
        let u: u32 = field(toks.next(), ln, "endpoint")?;
        let v: u32 = field(toks.next(), ln, "endpoint")?;
        expect_end(toks, ln)?;
        if u >= v || v as usize >= n {
            return Err(parse_err(ln, format!("edge ({u}, {v}) must satisfy u < v < N")));
        }
        edges.push((u, v));
        Ok(())
    })?;
    edges.sort_unstable();
    edges.dedup();
    Ok(RggSnapshot {
        t: n,
        r,
        metric,
        origin,
        positions: pts,
        edges,
    })
}

/// Per-round table: `round,informed_count,new_count,long_edge_transmissions`,
/// starting at round 0. The last column is `NA` when no threshold was set.
pub fn write_trace_csv<W: Write>(trace: &RumourTrace, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "round,informed_count,new_count,long_edge_transmissions")?;
    let measured = trace.long_edge_transmissions.is_some();
    for (k, &count) in trace.informed_count_per_round.iter().enumerate() {
        let (new, long) = match k {
            0 => (1, 0),
            _ => {
                let r = &trace.rounds[k - 1];
                (r.newly_informed.len(), r.long_edges)
            }
        };
        if measured {
            writeln!(w, "{k},{count},{new},{long}")?;
        } else {
            writeln!(w, "{k},{count},{new},NA")?;
        }
    }
    Ok(())
}

/// One line per transmission: `round,from,to,via,edge_length`.
pub fn write_event_log<W: Write>(
    trace: &RumourTrace,
    positions: Option<(&PointSet, MetricMode)>,
    w: &mut W,
) -> std::io::Result<()> {
    writeln!(w, "round,from,to,via,edge_length")?;
    for (k, r) in trace.rounds.iter().enumerate() {
        for t in &r.transmissions {
            let len = match positions {
                Some((pts, metric)) => fmt_real(metric.distance(pts.get(t.from as usize), pts.get(t.to as usize))),
                None => "NA".to_string(),
            };
            writeln!(w, "{},{},{},{},{len}", k + 1, t.from, t.to, t.via.as_str())?;
        }
    }
    Ok(())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Write a file through `f`, attaching the path to any I/O error.
pub fn save_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn save_spa(path: &Path, g: &SpaGraph) -> Result<()> {
    save_with(path, |w| write_spa(g, w))
}

pub fn load_spa(path: &Path) -> Result<SpaGraph> {
    read_spa(open(path)?)
}

pub fn save_rgg(path: &Path, g: &RggSnapshot) -> Result<()> {
    save_with(path, |w| write_rgg(g, w))
}

pub fn load_rgg(path: &Path) -> Result<RggSnapshot> {
    read_rgg(open(path)?)
}

pub fn save_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    save_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
        writeln!(w)
    })
}

/// Write `rows` under a one-line `header`; cells are joined with commas.
pub fn save_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    save_with(path, |w| {
        writeln!(w, "{}", header.join(","))?;
        for r in rows {
            writeln!(w, "{}", r.join(","))?;
        }
        Ok(())
    })
}
