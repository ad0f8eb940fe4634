//! C ABI for the flg library.
//!
//! Graphs and digraphs are opaque handles created by `*_new` or `*_parse`
//! and released with the matching `*_free`. Every fallible call returns an
//! [`FlgStatus`]; on failure [`flg_last_error`] describes what went wrong.
//! Node and arc indices are 0-based here, unlike the text formats.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use flg::coloring::color_trianglefree_fl;
use flg::intersect::intersection_graph;
use flg::optimize::max_stable_set;
use flg::preimage::{has_preimage, Decision};
use flg::recognize::{recognize, Recognition};
use flg::{Digraph, FlgError, UGraph};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlgStatus {
    Ok = 0,
    /// The question asked has answer "no" (not an FL graph, no preimage).
    No = 1,
    NullArgument = 2,
    InvalidArgument = 3,
    Parse = 4,
    Triangle = 5,
    BudgetExhausted = 6,
    BufferTooSmall = 7,
    Internal = 8,
    Panic = 9,
}

/// Undirected graph handle.
pub struct FlgGraph(UGraph);

/// Digraph handle.
pub struct FlgDigraph(Digraph);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &FlgError) -> FlgStatus {
    match e {
        FlgError::Parse { .. } => FlgStatus::Parse,
        FlgError::Triangle(_) => FlgStatus::Triangle,
        FlgError::BudgetExhausted(_) => FlgStatus::BudgetExhausted,
        FlgError::Internal(_) => FlgStatus::Internal,
        _ => FlgStatus::InvalidArgument,
    }
}

fn fail(e: FlgError) -> FlgStatus {
    set_error(e.to_string());
    status_of(&e)
}

/// Runs `f`, turning panics into [`FlgStatus::Panic`].
fn guard(f: impl FnOnce() -> FlgStatus) -> FlgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside flg");
            FlgStatus::Panic
        }
    }
}

unsafe fn text_arg<'a>(text: *const c_char) -> Result<&'a str, FlgStatus> {
    if text.is_null() {
        set_error("null text");
        return Err(FlgStatus::NullArgument);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("text is not UTF-8");
        FlgStatus::Parse
    })
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(concat!("null argument `", stringify!($p), "`"));
            return FlgStatus::NullArgument;
        })+
    };
}

/// Message of the last failure on this thread. Valid until the next call
/// into the library from the same thread.
#[no_mangle]
pub extern "C" fn flg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by the library.
///
/// # Safety
/// `s` must come from a `*_to_text` call, or be null.
#[no_mangle]
pub unsafe extern "C" fn flg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn to_c_string(s: String, out: *mut *mut c_char) -> FlgStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            FlgStatus::Ok
        }
        Err(_) => {
            set_error("text contains a NUL byte");
            FlgStatus::Internal
        }
    }
}

/// Empty graph on `n` nodes.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_graph_new(n: usize, out: *mut *mut FlgGraph) -> FlgStatus {
    non_null!(out);
    guard(|| {
        *out = Box::into_raw(Box::new(FlgGraph(UGraph::new(n))));
        FlgStatus::Ok
    })
}

/// Parses the `p ugr` text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_graph_parse(text: *const c_char, out: *mut *mut FlgGraph) -> FlgStatus {
    non_null!(out);
    guard(|| {
        let text = match text_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match UGraph::parse(text) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(FlgGraph(g)));
                FlgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `g` must come from this library and not be used afterwards; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn flg_graph_free(g: *mut FlgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn flg_graph_add_edge(g: *mut FlgGraph, u: usize, v: usize) -> FlgStatus {
    non_null!(g);
    guard(|| match (*g).0.add_edge(u, v) {
        Ok(()) => FlgStatus::Ok,
        Err(e) => fail(e),
    })
}

/// # Safety
/// `g` must be a live graph handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn flg_graph_node_count(g: *const FlgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.node_count())
}

/// # Safety
/// `g` must be a live graph handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn flg_graph_edge_count(g: *const FlgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn flg_graph_has_edge(g: *const FlgGraph, u: usize, v: usize) -> bool {
    g.as_ref().is_some_and(|g| u < g.0.node_count() && v < g.0.node_count() && g.0.has_edge(u, v))
}

/// Serializes to the `p ugr` format; free the result with [`flg_string_free`].
///
/// # Safety
/// `g` must be a live graph handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_graph_to_text(g: *const FlgGraph, out: *mut *mut c_char) -> FlgStatus {
    non_null!(g, out);
    guard(|| to_c_string((*g).0.to_text(), out))
}

/// Empty digraph on `n` nodes.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_digraph_new(n: usize, out: *mut *mut FlgDigraph) -> FlgStatus {
    non_null!(out);
    guard(|| {
        *out = Box::into_raw(Box::new(FlgDigraph(Digraph::new(n))));
        FlgStatus::Ok
    })
}

/// Parses the `p dgr` text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_digraph_parse(text: *const c_char, out: *mut *mut FlgDigraph) -> FlgStatus {
    non_null!(out);
    guard(|| {
        let text = match text_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Digraph::parse(text) {
            Ok(d) => {
                *out = Box::into_raw(Box::new(FlgDigraph(d)));
                FlgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `d` must come from this library and not be used afterwards; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn flg_digraph_free(d: *mut FlgDigraph) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Appends an arc; its index is written to `index` when non-null.
///
/// # Safety
/// `d` must be a live digraph handle; `index` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_digraph_add_arc(
    d: *mut FlgDigraph,
    tail: usize,
    head: usize,
    index: *mut usize,
) -> FlgStatus {
    non_null!(d);
    guard(|| match (*d).0.add_arc(tail, head) {
        Ok(a) => {
            if !index.is_null() {
                *index = a;
            }
            FlgStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// # Safety
/// `d` must be a live digraph handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn flg_digraph_node_count(d: *const FlgDigraph) -> usize {
    d.as_ref().map_or(0, |d| d.0.node_count())
}

/// # Safety
/// `d` must be a live digraph handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn flg_digraph_arc_count(d: *const FlgDigraph) -> usize {
    d.as_ref().map_or(0, |d| d.0.arc_count())
}

/// # Safety
/// `d` must be a live digraph handle; `tail` and `head` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_digraph_arc(
    d: *const FlgDigraph,
    arc: usize,
    tail: *mut usize,
    head: *mut usize,
) -> FlgStatus {
    non_null!(d, tail, head);
    let d = &(*d).0;
    if arc >= d.arc_count() {
        set_error(format!("arc {arc} out of range ({} arcs)", d.arc_count()));
        return FlgStatus::InvalidArgument;
    }
    let a = d.arc(arc);
    *tail = a.tail;
    *head = a.head;
    FlgStatus::Ok
}

/// Serializes to the `p dgr` format; free the result with [`flg_string_free`].
///
/// # Safety
/// `d` must be a live digraph handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_digraph_to_text(d: *const FlgDigraph, out: *mut *mut c_char) -> FlgStatus {
    non_null!(d, out);
    guard(|| to_c_string((*d).0.to_text(), out))
}

/// Intersection graph; node `i` of the result is arc `i` of `d`.
///
/// # Safety
/// `d` must be a live digraph handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_intersection_graph(d: *const FlgDigraph, out: *mut *mut FlgGraph) -> FlgStatus {
    non_null!(d, out);
    guard(|| match intersection_graph(&(*d).0) {
        Ok((g, _)) => {
            *out = Box::into_raw(Box::new(FlgGraph(g)));
            FlgStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Recognizes a triangle-free FL graph. On [`FlgStatus::Ok`] `*out` holds a
/// preimage whose arc `i` is node `i` of `g`; [`FlgStatus::No`] means `g` is
/// not an FL graph and `*out` is left untouched.
///
/// # Safety
/// `g` must be a live graph handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_recognize(g: *const FlgGraph, out: *mut *mut FlgDigraph) -> FlgStatus {
    non_null!(g, out);
    guard(|| match recognize(&(*g).0) {
        Ok(Recognition::Accepted(d, _)) => {
            *out = Box::into_raw(Box::new(FlgDigraph(d)));
            FlgStatus::Ok
        }
        Ok(Recognition::Refused(r)) => {
            set_error(format!("component {:?} has {} independent cycles", r.component, r.cycles));
            FlgStatus::No
        }
        Err(e) => fail(e),
    })
}

/// Exhaustive preimage test for any small graph, bounded by `max_steps`.
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn flg_has_preimage(g: *const FlgGraph, max_steps: u64) -> FlgStatus {
    non_null!(g);
    guard(|| match has_preimage(&(*g).0, max_steps) {
        Decision::Yes(..) => FlgStatus::Ok,
        Decision::No => FlgStatus::No,
        Decision::Unknown { .. } => {
            set_error(format!("no decision within {max_steps} steps"));
            FlgStatus::BudgetExhausted
        }
    })
}

/// Colours a triangle-free FL graph with at most three colours. `colors`
/// must hold `flg_graph_node_count(g)` entries; the number of colours used is
/// written to `count` when non-null.
///
/// # Safety
/// `g` must be a live graph handle; `colors` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn flg_color(
    g: *const FlgGraph,
    colors: *mut usize,
    len: usize,
    count: *mut usize,
) -> FlgStatus {
    non_null!(g, colors);
    guard(|| {
        let g = &(*g).0;
        if len < g.node_count() {
            set_error(format!("need {} slots, got {len}", g.node_count()));
            return FlgStatus::BufferTooSmall;
        }
        match color_trianglefree_fl(g) {
            Ok(c) => {
                std::slice::from_raw_parts_mut(colors, len)[..c.colors.len()].copy_from_slice(&c.colors);
                if !count.is_null() {
                    *count = c.count();
                }
                FlgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Maximum weight stable set. `in_set` gets 1 for chosen nodes and 0
/// otherwise; the weight is written as `num / den`.
///
/// # Safety
/// `g` must be a live graph handle; `in_set` valid for `len` writes;
/// `num` and `den` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn flg_max_stable_set(
    g: *const FlgGraph,
    in_set: *mut u8,
    len: usize,
    num: *mut i64,
    den: *mut i64,
) -> FlgStatus {
    non_null!(g, in_set, num, den);
    guard(|| {
        let g = &(*g).0;
        if len < g.node_count() {
            set_error(format!("need {} slots, got {len}", g.node_count()));
            return FlgStatus::BufferTooSmall;
        }
        match max_stable_set(g) {
            Ok(s) => {
                let slots = std::slice::from_raw_parts_mut(in_set, len);
                slots.fill(0);
                for &v in &s.nodes {
                    slots[v] = 1;
                }
                *num = *s.weight.numer();
                *den = *s.weight.denom();
                FlgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
