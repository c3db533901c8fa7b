//! C ABI for `wapgraph`.
//!
//! Graphs and classes are opaque heap handles released with their `_free` function. Every
//! fallible call returns a [`WgStatus`]; on failure the message is available from
//! [`wg_last_error`] on the same thread. Strings returned to the caller are released with
//! [`wg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wapgraph::amalgamation::{find_amalgam, AmalgamationProblem};
use wapgraph::cert::{Envelope, Payload};
use wapgraph::constructions::{c4_nonwap_gadgets, wap_witness};
use wapgraph::{io, Error, ForbiddenClass, Graph};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    Graph6 = 4,
    UnknownClass = 5,
    OrderBound = 6,
    Precondition = 7,
    BoundExceeded = 8,
    SchemaVersion = 9,
    Io = 10,
    Internal = 11,
    Panic = 12,
}

/// Opaque graph handle.
pub struct WgGraph {
    inner: Graph,
}

/// Opaque class handle.
pub struct WgClass {
    inner: ForbiddenClass,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> WgStatus {
    match e {
        Error::InvalidParameter(_) | Error::MalformedMap(_) => WgStatus::InvalidArgument,
        Error::Graph6(_) => WgStatus::Graph6,
        Error::UnknownClass(_) => WgStatus::UnknownClass,
        Error::OrderBound { .. } => WgStatus::OrderBound,
        Error::Precondition(_) => WgStatus::Precondition,
        Error::BoundExceeded(_) => WgStatus::BoundExceeded,
        Error::SchemaVersion { .. } => WgStatus::SchemaVersion,
        Error::Io(_) => WgStatus::Io,
        Error::Json(_) => WgStatus::InvalidArgument,
        Error::Internal(_) => WgStatus::Internal,
    }
}

struct Fail(WgStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            WgStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside wapgraph");
            WgStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(WgStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(WgStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(WgStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(WgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail(WgStatus::Internal, "string holds a NUL byte".into()))
}

fn graph_handle(g: Graph) -> *mut WgGraph {
    Box::into_raw(Box::new(WgGraph { inner: g }))
}

/// Message of the last failed call on this thread; empty after a success. Valid until the
/// next call on this thread.
#[no_mangle]
pub extern "C" fn wg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn wg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Edgeless graph on `n` vertices.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_graph_new(n: usize, out_graph: *mut *mut WgGraph) -> WgStatus {
    guard(|| {
        let slot = out(out_graph, "out")?;
        *slot = graph_handle(Graph::try_empty(n)?);
        Ok(())
    })
}

/// # Safety
/// `s` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_graph_from_graph6(s: *const c_char, out_graph: *mut *mut WgGraph) -> WgStatus {
    guard(|| {
        let slot = out(out_graph, "out")?;
        *slot = graph_handle(io::from_graph6(text(s, "graph6 string")?.trim())?);
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wg_graph_free(g: *mut WgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `order` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_graph_order(g: *const WgGraph, order: *mut usize) -> WgStatus {
    guard(|| {
        *out(order, "order")? = deref(g, "graph")?.inner.order();
        Ok(())
    })
}

fn check_vertex(g: &Graph, v: usize) -> Result<(), Fail> {
    if v >= g.order() {
        return Err(Fail(WgStatus::InvalidArgument, format!("vertex {v} out of range for order {}", g.order())));
    }
    Ok(())
}

/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wg_graph_add_edge(g: *mut WgGraph, u: usize, v: usize) -> WgStatus {
    guard(|| {
        let g = &mut out(g, "graph")?.inner;
        check_vertex(g, u)?;
        check_vertex(g, v)?;
        if u == v {
            return Err(Fail(WgStatus::InvalidArgument, "loops are not allowed".into()));
        }
        g.add_edge(u, v);
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_graph_has_edge(g: *const WgGraph, u: usize, v: usize, result: *mut bool) -> WgStatus {
    guard(|| {
        let g = &deref(g, "graph")?.inner;
        check_vertex(g, u)?;
        check_vertex(g, v)?;
        *out(result, "result")? = g.has_edge(u, v);
        Ok(())
    })
}

/// graph6 encoding; release with [`wg_string_free`].
///
/// # Safety
/// `g` must be a live handle and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_graph_to_graph6(g: *const WgGraph, result: *mut *mut c_char) -> WgStatus {
    guard(|| {
        let s = io::to_graph6(&deref(g, "graph")?.inner);
        *out(result, "result")? = c_string(s)?;
        Ok(())
    })
}

/// Parses a class identifier such as `c4free`, `windmill` or `cocycles:5`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_class_parse(spec: *const c_char, out_class: *mut *mut WgClass) -> WgStatus {
    guard(|| {
        let slot = out(out_class, "out")?;
        let k = ForbiddenClass::parse(text(spec, "class identifier")?)?;
        *slot = Box::into_raw(Box::new(WgClass { inner: k }));
        Ok(())
    })
}

/// # Safety
/// `k` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wg_class_free(k: *mut WgClass) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// # Safety
/// Handles must be live and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_class_member(k: *const WgClass, g: *const WgGraph, result: *mut bool) -> WgStatus {
    guard(|| {
        let member = deref(k, "class")?.inner.member(&deref(g, "graph")?.inner);
        *out(result, "result")? = member;
        Ok(())
    })
}

/// Searches for an amalgam of `left` and `right` over `base`, which both contain on their
/// first labels. On success `*amalgam` is a new handle, or null when no amalgam exists in the
/// class.
///
/// # Safety
/// Handles must be live and `amalgam` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_find_amalgam(
    k: *const WgClass,
    base: *const WgGraph,
    left: *const WgGraph,
    right: *const WgGraph,
    allow_cross_edges: bool,
    amalgam: *mut *mut WgGraph,
) -> WgStatus {
    guard(|| {
        let slot = out(amalgam, "amalgam")?;
        let k = &deref(k, "class")?.inner;
        let p = AmalgamationProblem::over_prefix(
            &deref(base, "base")?.inner,
            &deref(left, "left")?.inner,
            &deref(right, "right")?.inner,
        )?;
        *slot = match find_amalgam(&p, k, allow_cross_edges)? {
            Some(a) => graph_handle(a.result),
            None => ptr::null_mut(),
        };
        Ok(())
    })
}

/// The windmill witness for `base`.
///
/// # Safety
/// `base` must be a live handle and `witness` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_windmill_witness(base: *const WgGraph, witness: *mut *mut WgGraph) -> WgStatus {
    guard(|| {
        let slot = out(witness, "witness")?;
        *slot = graph_handle(wap_witness(&deref(base, "base")?.inner)?);
        Ok(())
    })
}

/// The C4 gadget bundle for `witness` as certificate JSON; release with [`wg_string_free`].
///
/// # Safety
/// `witness` must be a live handle and `json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_c4_gadget_json(witness: *const WgGraph, json: *mut *mut c_char) -> WgStatus {
    guard(|| {
        let slot = out(json, "json")?;
        let g = c4_nonwap_gadgets(&deref(witness, "witness")?.inner)?;
        *slot = c_string(Envelope::new(Payload::C4Gadget(g)).to_json()?)?;
        Ok(())
    })
}

/// Re-verifies a certificate bundle given as JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `ok` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_replay_json(json: *const c_char, ok: *mut bool) -> WgStatus {
    guard(|| {
        let slot = out(ok, "ok")?;
        *slot = Envelope::from_json(text(json, "certificate")?)?.replay()?;
        Ok(())
    })
}
