//! C interface to the augflow solvers.
//!
//! Objects cross the boundary as opaque handles created by `af_*_new` style
//! calls and released with the matching `af_*_free`. Every fallible call
//! returns an [`AfStatus`]; on failure the message is available from
//! [`af_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use augflow::predict::oracle_scores;
use augflow::{min_cut, warm_start_solve, EdgeScores, Flow, FlowNetwork, StrategyKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed input: bad network, bad text, out-of-range values.
    InvalidInput = 2,
    /// Well-formed input that breaks a solver contract, such as guided
    /// search without scores or scores of the wrong length.
    Contract = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfStrategy {
    Dfs = 0,
    Bfs = 1,
    AdjustedBfs = 2,
    Guided = 3,
}

fn strategy_kind(code: u32) -> Option<StrategyKind> {
    Some(match code {
        c if c == AfStrategy::Dfs as u32 => StrategyKind::Dfs,
        c if c == AfStrategy::Bfs as u32 => StrategyKind::Bfs,
        c if c == AfStrategy::AdjustedBfs as u32 => StrategyKind::AdjustedBfs,
        c if c == AfStrategy::Guided as u32 => StrategyKind::Guided,
        _ => return None,
    })
}

pub struct AfNetwork(FlowNetwork);

pub struct AfScores(EdgeScores);

pub struct AfSolution {
    flow: Flow,
    value: i64,
    augmentations: usize,
    repair_iterations: usize,
    source_side: Vec<bool>,
    cut_edges: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

struct Failure(AfStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(AfStatus::NullPointer, format!("{what} is null"))
    }
    fn input(msg: impl ToString) -> Self {
        Failure(AfStatus::InvalidInput, msg.to_string())
    }
    fn contract(msg: impl ToString) -> Self {
        Failure(AfStatus::Contract, msg.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            AfStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message for the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn af_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a network from parallel edge arrays of length `edge_count`.
///
/// # Safety
/// Each array must hold `edge_count` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn af_network_new(
    vertex_count: usize,
    tails: *const usize,
    heads: *const usize,
    capacities: *const i64,
    edge_count: usize,
    source: usize,
    sink: usize,
    out: *mut *mut AfNetwork,
) -> AfStatus {
    guard(|| {
        let tails = slice(tails, edge_count, "tails")?;
        let heads = slice(heads, edge_count, "heads")?;
        let caps = slice(capacities, edge_count, "capacities")?;
        let edges: Vec<_> = (0..edge_count)
            .map(|i| (tails[i], heads[i], caps[i]))
            .collect();
        let net = FlowNetwork::new(vertex_count, &edges, source, sink).map_err(Failure::input)?;
        put(out, AfNetwork(net))
    })
}

/// Parses the plain-text network format (`n m s t` then `u v cap` lines).
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn af_network_parse(
    text: *const c_char,
    out: *mut *mut AfNetwork,
) -> AfStatus {
    guard(|| {
        if text.is_null() {
            return Err(Failure::null("text"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(Failure::input)?;
        let net = FlowNetwork::parse(text).map_err(Failure::input)?;
        put(out, AfNetwork(net))
    })
}

/// # Safety
/// `net` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn af_network_free(net: *mut AfNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn af_network_vertex_count(net: *const AfNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.vertex_count())
}

/// # Safety
/// `net` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn af_network_edge_count(net: *const AfNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.edge_count())
}

/// Wraps `len` per-edge scores, each in `[0, 1]`.
///
/// # Safety
/// `values` must hold `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn af_scores_new(
    values: *const f64,
    len: usize,
    out: *mut *mut AfScores,
) -> AfStatus {
    guard(|| {
        let values = slice(values, len, "values")?;
        let scores = EdgeScores::new(values.to_vec()).map_err(Failure::input)?;
        put(out, AfScores(scores))
    })
}

/// Exact scores derived from the network's own minimum cut.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn af_scores_oracle(
    net: *const AfNetwork,
    out: *mut *mut AfScores,
) -> AfStatus {
    guard(|| {
        let net = handle(net, "net")?;
        put(out, AfScores(oracle_scores(&net.0)))
    })
}

/// # Safety
/// `scores` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn af_scores_free(scores: *mut AfScores) {
    if !scores.is_null() {
        drop(Box::from_raw(scores));
    }
}

/// Solves max flow. `strategy` is an `AfStrategy` value; `scores` may be
/// null unless it is guided.
/// `warm_start` may be null for a cold start; otherwise it holds one
/// predicted flow per edge, which is clipped and repaired before solving.
///
/// # Safety
/// Handles must be live or null as documented; `warm_start` must hold
/// `warm_len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn af_solve(
    net: *const AfNetwork,
    strategy: u32,
    scores: *const AfScores,
    warm_start: *const f64,
    warm_len: usize,
    out: *mut *mut AfSolution,
) -> AfStatus {
    guard(|| {
        let net = &handle(net, "net")?.0;
        let scores = scores.as_ref().map(|s| &s.0);
        let kind = strategy_kind(strategy)
            .ok_or_else(|| Failure::input(format!("unknown strategy {strategy}")))?;
        let strategy = kind
            .with_scores(scores)
            .ok_or_else(|| Failure::contract("strategy guided requires scores"))?;
        let raw = if warm_start.is_null() {
            vec![0.0; net.edge_count()]
        } else {
            if warm_len != net.edge_count() {
                return Err(Failure::contract(format!(
                    "warm start has {warm_len} entries, network has {} edges",
                    net.edge_count()
                )));
            }
            slice(warm_start, warm_len, "warm_start")?.to_vec()
        };
        let (flow, stats) = warm_start_solve(net, &raw, strategy).map_err(Failure::contract)?;
        let cut = min_cut(net, &flow).map_err(Failure::contract)?;
        put(
            out,
            AfSolution {
                value: stats.total_flow,
                augmentations: stats.augmentations,
                repair_iterations: stats.repair_iterations,
                source_side: cut.source_side,
                cut_edges: cut.cut_edges,
                flow,
            },
        )
    })
}

/// # Safety
/// `sol` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn af_solution_free(sol: *mut AfSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn af_solution_value(sol: *const AfSolution) -> i64 {
    sol.as_ref().map_or(0, |s| s.value)
}

/// # Safety
/// `sol` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn af_solution_augmentations(sol: *const AfSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.augmentations)
}

/// # Safety
/// `sol` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn af_solution_repair_iterations(sol: *const AfSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.repair_iterations)
}

/// Number of edges crossing the minimum cut.
///
/// # Safety
/// `sol` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn af_solution_cut_size(sol: *const AfSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.cut_edges.len())
}

/// Copies the per-edge flow into `buf`, which must have room for every edge.
///
/// # Safety
/// `sol` must be a live handle; `buf` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn af_solution_flow(
    sol: *const AfSolution,
    buf: *mut i64,
    len: usize,
) -> AfStatus {
    guard(|| {
        let sol = handle(sol, "sol")?;
        copy_out(sol.flow.values(), buf, len)
    })
}

/// Copies the ids of the cut edges, ascending, into `buf`.
///
/// # Safety
/// `sol` must be a live handle; `buf` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn af_solution_cut_edges(
    sol: *const AfSolution,
    buf: *mut usize,
    len: usize,
) -> AfStatus {
    guard(|| {
        let sol = handle(sol, "sol")?;
        copy_out(&sol.cut_edges, buf, len)
    })
}

/// Writes 1 for each vertex on the source side of the cut and 0 otherwise.
///
/// # Safety
/// `sol` must be a live handle; `buf` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn af_solution_source_side(
    sol: *const AfSolution,
    buf: *mut u8,
    len: usize,
) -> AfStatus {
    guard(|| {
        let sol = handle(sol, "sol")?;
        let sides: Vec<u8> = sol.source_side.iter().map(|&b| b as u8).collect();
        copy_out(&sides, buf, len)
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, len: usize) -> Result<(), Failure> {
    if len < src.len() {
        return Err(Failure::input(format!(
            "buffer holds {len} but {} are needed",
            src.len()
        )));
    }
    if src.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(Failure::null("buf"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}
