//! C interface to spa-core.
//!
//! Graphs are passed around as opaque `SpaHandle` pointers created by
//! `spa_generate` or `spa_read` and released with `spa_free`. Every fallible
//! call returns a `SpaStatus`; the message of the last failure on the
//! calling thread is available from `spa_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use spa_core::graph::UndirectedGraph;
use spa_core::metrics::{effective_diameter, DiameterSampler};
use spa_core::percolation::connected_components;
use spa_core::rumour::{self, Protocol, ProtocolConfig};
use spa_core::spa::{generate, SpaGraph, SpaParams};
use spa_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedDimension = 3,
    DegenerateGeometry = 4,
    ParseError = 5,
    IoError = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaProtocol {
    Push = 0,
    PushPull = 1,
}

/// Model parameters; `n` vertices in `[0,1)^m`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SpaModelParams {
    pub m: usize,
    pub a1: f64,
    pub a2: f64,
    pub p: f64,
    pub n: usize,
    pub seed: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SpaRumourResult {
    pub component_size: usize,
    pub informed: usize,
    /// Rounds to inform the source's component, -1 if the round cap hit first.
    pub spread_time: i64,
}

/// Opaque graph handle.
pub struct SpaHandle {
    graph: SpaGraph,
    undirected: UndirectedGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpaStatus {
    match e {
        Error::InvalidArgument(_) => SpaStatus::InvalidArgument,
        Error::UnsupportedDimension(_) => SpaStatus::UnsupportedDimension,
        Error::DegenerateGeometry(_) => SpaStatus::DegenerateGeometry,
        Error::Parse { .. } => SpaStatus::ParseError,
        Error::Io { .. } => SpaStatus::IoError,
    }
}

/// Run `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (SpaStatus, String)>) -> SpaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpaStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SpaStatus::Panic
        }
    }
}

fn lift(e: Error) -> (SpaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SpaStatus, String) {
    (SpaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, (SpaStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| (SpaStatus::InvalidArgument, "path is not valid UTF-8".to_string()))?;
    Ok(PathBuf::from(s))
}

fn into_handle(graph: SpaGraph) -> *mut SpaHandle {
    let undirected = graph.undirected();
    Box::into_raw(Box::new(SpaHandle { graph, undirected }))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn spa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Generate a graph. On success `*out` owns a new handle.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn spa_generate(params: *const SpaModelParams, out: *mut *mut SpaHandle) -> SpaStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let g = generate(&SpaParams { m: p.m, a1: p.a1, a2: p.a2, p: p.p, n: p.n, seed: p.seed }).map_err(lift)?;
        *out = into_handle(g);
        Ok(())
    })
}

/// Read an spa graph file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spa_read(path: *const c_char, out: *mut *mut SpaHandle) -> SpaStatus {
    guard(|| {
        let path = path_arg(path)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = into_handle(spa_core::io::load_spa(&path).map_err(lift)?);
        Ok(())
    })
}

/// Write an spa graph file.
///
/// # Safety
/// `g` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn spa_write(g: *const SpaHandle, path: *const c_char) -> SpaStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let path = path_arg(path)?;
        spa_core::io::save_spa(&path, &g.graph).map_err(lift)
    })
}

/// Release a handle. NULL is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spa_free(g: *mut SpaHandle) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, 0 for NULL.
///
/// # Safety
/// `g` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn spa_num_vertices(g: *const SpaHandle) -> usize {
    g.as_ref().map_or(0, |g| g.graph.num_vertices())
}

/// Directed edge count, 0 for NULL.
///
/// # Safety
/// `g` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn spa_num_edges(g: *const SpaHandle) -> usize {
    g.as_ref().map_or(0, |g| g.graph.num_edges())
}

/// Copy up to `cap` edges as (child, parent, birth step) triples into
/// `buf` (3 entries per edge); `*written` receives the edge count copied.
///
/// # Safety
/// `buf` must hold `3 * cap` values; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn spa_edges(g: *const SpaHandle, buf: *mut u32, cap: usize, written: *mut usize) -> SpaStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let written = written.as_mut().ok_or_else(|| null("written"))?;
        let k = cap.min(g.graph.num_edges());
        if k > 0 && buf.is_null() {
            return Err(null("buf"));
        }
        for (i, e) in g.graph.edges()[..k].iter().enumerate() {
            *buf.add(3 * i) = e.child;
            *buf.add(3 * i + 1) = e.parent;
            *buf.add(3 * i + 2) = e.step;
        }
        *written = k;
        Ok(())
    })
}

/// Share of vertices in a largest component of the undirected graph.
///
/// # Safety
/// `g` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn spa_giant_fraction(g: *const SpaHandle, out: *mut f64) -> SpaStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = connected_components(&g.undirected).giant_fraction;
        Ok(())
    })
}

/// Effective diameter over connected pairs. `num_pairs = 0` selects the
/// exact computation (small graphs only).
///
/// # Safety
/// `g` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn spa_effective_diameter(
    g: *const SpaHandle,
    fraction: f64,
    num_pairs: usize,
    seed: u64,
    out: *mut u32,
) -> SpaStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let sampler = match num_pairs {
            0 => DiameterSampler::Exact,
            k => DiameterSampler::Pairs { num_pairs: k, seed },
        };
        *out = effective_diameter(&g.undirected, fraction, sampler).map_err(lift)?;
        Ok(())
    })
}

/// Run a rumour protocol from `source`. `max_rounds = 0` keeps the default cap.
///
/// # Safety
/// `g` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn spa_rumour(
    g: *const SpaHandle,
    protocol: SpaProtocol,
    source: u32,
    seed: u64,
    max_rounds: usize,
    out: *mut SpaRumourResult,
) -> SpaStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let protocol = match protocol {
            SpaProtocol::Push => Protocol::Push,
            SpaProtocol::PushPull => Protocol::PushPull,
        };
        let mut cfg = ProtocolConfig::new(protocol, source, seed);
        if max_rounds > 0 {
            cfg.max_rounds = max_rounds;
        }
        let t = rumour::run(&g.undirected, &cfg, None, None).map_err(lift)?;
        *out = SpaRumourResult {
            component_size: t.component_size,
            informed: t.informed_count(),
            spread_time: t.spread_time.map_or(-1, |s| s as i64),
        };
        Ok(())
    })
}
