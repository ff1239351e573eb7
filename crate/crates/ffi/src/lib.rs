//! C interface to `kappa_roll`.
//!
//! Every function returns a [`KrStatus`]. Results come back through out
//! pointers. On failure, [`kr_last_error`] gives a message for the calling
//! thread. Handles are opaque and must be released with their `_free` function.
//! Strings returned by the library must be released with [`kr_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kappa_roll::classify::{find_essential_pairs, SweepOptions};
use kappa_roll::curve::Loop;
use kappa_roll::decompose::{decompose_with, DecomposeError, DecomposeOptions, Decomposition, RegionKind};
use kappa_roll::io::{parse_loop, render_svg, to_json, write_loop, IoError, Metadata, Overlay};
use kappa_roll::rolling::{classify_domain, Method, RollingOptions, Side};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Input text was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input text was malformed or did not match the loop schema.
    Parse = 3,
    /// The loop failed validation.
    InvalidLoop = 4,
    /// An analysis could not reach a consistent answer.
    Analysis = 5,
    /// An index or enum value was out of range.
    OutOfRange = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrSide {
    Internal = 0,
    External = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrMethod {
    Direct = 0,
    Terminal = 1,
    Both = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrRegionKind {
    Rolling = 0,
    Excluded = 1,
    Neck = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct KrVerdict {
    pub internal: bool,
    pub external: bool,
    pub rolling: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KrRegionInfo {
    pub kind: KrRegionKind,
    pub unbounded: bool,
    /// NaN when `unbounded`.
    pub area: f64,
    pub replacement_count: usize,
    pub boundary_pieces: usize,
}

/// A validated loop.
pub struct KrLoop(Loop);

/// The region decomposition of one side of a loop.
pub struct KrDecomposition(Decomposition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(KrStatus, String);

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let status = match e {
            IoError::Validation { .. } => KrStatus::InvalidLoop,
            _ => KrStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

impl From<DecomposeError> for Failure {
    fn from(e: DecomposeError) -> Self {
        let status = match e {
            DecomposeError::Curve(_) => KrStatus::InvalidLoop,
            _ => KrStatus::Analysis,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(KrStatus::NullArgument, format!("`{what}` is null"))
}

/// Runs `f`, converting failures and panics to a status and the last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> KrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KrStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {msg}"));
            KrStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(null("text"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| Failure(KrStatus::InvalidUtf8, e.to_string()))
}

fn into_c_string(s: String) -> *mut c_char {
    // Output is JSON or SVG, neither of which contains NUL.
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn side(s: KrSide) -> Side {
    match s {
        KrSide::Internal => Side::Internal,
        KrSide::External => Side::External,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn kr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a loop from its JSON text.
#[no_mangle]
pub unsafe extern "C" fn kr_loop_parse(text: *const c_char, out: *mut *mut KrLoop) -> KrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let l = parse_loop(read_str(text)?)?;
        out.write(Box::into_raw(Box::new(KrLoop(l))));
        Ok(())
    })
}

/// Serializes a loop to JSON. Free the result with `kr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn kr_loop_to_json(l: *const KrLoop, out: *mut *mut c_char) -> KrStatus {
    guard(|| {
        let l = deref(l, "loop")?;
        write_out(out, into_c_string(write_loop(&l.0, Metadata::default())), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn kr_loop_free(l: *mut KrLoop) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

#[no_mangle]
pub unsafe extern "C" fn kr_loop_piece_count(l: *const KrLoop, out: *mut usize) -> KrStatus {
    guard(|| write_out(out, deref(l, "loop")?.0.pieces().len(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn kr_loop_length(l: *const KrLoop, out: *mut f64) -> KrStatus {
    guard(|| write_out(out, deref(l, "loop")?.0.length(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn kr_loop_kappa(l: *const KrLoop, out: *mut f64) -> KrStatus {
    guard(|| write_out(out, deref(l, "loop")?.0.kappa(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn kr_loop_is_convex(l: *const KrLoop, out: *mut bool) -> KrStatus {
    guard(|| write_out(out, deref(l, "loop")?.0.is_convex(), "out"))
}

/// Point at arc length `t`, taken modulo the loop length.
#[no_mangle]
pub unsafe extern "C" fn kr_loop_point_at(l: *const KrLoop, t: f64, x: *mut f64, y: *mut f64) -> KrStatus {
    guard(|| {
        let p = deref(l, "loop")?.0.point_at(t);
        write_out(x, p.x, "x")?;
        write_out(y, p.y, "y")
    })
}

/// Rolling verdicts for both sides.
#[no_mangle]
pub unsafe extern "C" fn kr_classify(l: *const KrLoop, method: KrMethod, out: *mut KrVerdict) -> KrStatus {
    guard(|| {
        let l = deref(l, "loop")?;
        let method = match method {
            KrMethod::Direct => Method::Direct,
            KrMethod::Terminal => Method::TerminalCriterion,
            KrMethod::Both => Method::Both,
        };
        let report = classify_domain(&l.0, method, &RollingOptions::default())
            .map_err(|e| Failure(KrStatus::Analysis, e.to_string()))?;
        let verdict = KrVerdict {
            internal: report.internal,
            external: report.external,
            rolling: report.rolling,
        };
        write_out(out, verdict, "out")
    })
}

/// Number of essential terminal pairs found by a sweep of `sweep_n` samples.
#[no_mangle]
pub unsafe extern "C" fn kr_essential_pair_count(l: *const KrLoop, sweep_n: usize, out: *mut usize) -> KrStatus {
    guard(|| {
        let l = deref(l, "loop")?;
        if sweep_n < 8 {
            return Err(Failure(KrStatus::OutOfRange, format!("sweep_n {sweep_n} below 8")));
        }
        let pairs = find_essential_pairs(&l.0, &SweepOptions { n: sweep_n });
        write_out(out, pairs.len(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn kr_decompose(l: *const KrLoop, s: KrSide, out: *mut *mut KrDecomposition) -> KrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let l = deref(l, "loop")?;
        let d = decompose_with(&l.0, side(s), &DecomposeOptions::default())?;
        out.write(Box::into_raw(Box::new(KrDecomposition(d))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn kr_decomposition_free(d: *mut KrDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

#[no_mangle]
pub unsafe extern "C" fn kr_decomposition_region_count(d: *const KrDecomposition, out: *mut usize) -> KrStatus {
    guard(|| write_out(out, deref(d, "decomposition")?.0.regions.len(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn kr_decomposition_region(
    d: *const KrDecomposition,
    index: usize,
    out: *mut KrRegionInfo,
) -> KrStatus {
    guard(|| {
        let d = deref(d, "decomposition")?;
        let region = d.0.regions.get(index).ok_or_else(|| {
            let n = d.0.regions.len();
            Failure(KrStatus::OutOfRange, format!("region {index} of {n}"))
        })?;
        let info = KrRegionInfo {
            kind: match region.kind {
                RegionKind::Rolling => KrRegionKind::Rolling,
                RegionKind::Excluded => KrRegionKind::Excluded,
                RegionKind::Neck => KrRegionKind::Neck,
            },
            unbounded: region.unbounded,
            area: region.area().unwrap_or(f64::NAN),
            replacement_count: region.replacement_count(),
            boundary_pieces: region.boundary.len(),
        };
        write_out(out, info, "out")
    })
}

/// Decomposition as JSON. Free the result with `kr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn kr_decomposition_to_json(d: *const KrDecomposition, out: *mut *mut c_char) -> KrStatus {
    guard(|| write_out(out, into_c_string(to_json(&deref(d, "decomposition")?.0)), "out"))
}

/// SVG drawing of a loop, with a decomposition overlay when `d` is not null.
/// Free the result with `kr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn kr_render_svg(l: *const KrLoop, d: *const KrDecomposition, out: *mut *mut c_char) -> KrStatus {
    guard(|| {
        let l = deref(l, "loop")?;
        let overlays: Vec<Overlay> = d
            .as_ref()
            .map(|d| Overlay::Decomposition(d.0.clone()))
            .into_iter()
            .collect();
        write_out(out, into_c_string(render_svg(&l.0, &overlays)), "out")
    })
}
