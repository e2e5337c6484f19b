//! C ABI over the `pndp` engine.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Strings returned by this library
//! must be released with [`pndp_string_free`]. Every fallible function
//! returns a [`PndpStatus`] and records a message retrievable with
//! [`pndp_last_error`] on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pndp::cli::{catalog_ids, catalog_source, parse_manifest, run, run_catalog, CatalogError, RunOptions, RunReport};
use pndp::symexpr::{Binding, EvalError, Expr};

/// Result codes. `Ok` is zero; everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PndpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    DomainError = 4,
    UnboundSymbol = 5,
    UnknownExample = 6,
    InvalidManifest = 7,
    Panic = 8,
}

/// A symbolic expression.
pub struct PndpExpr(Expr);

/// The report of one manifest run.
pub struct PndpReport(RunReport);

/// Overrides for a run. A null pointer means "use the manifest's values".
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PndpRunOptions {
    pub has_seed: bool,
    pub seed: u64,
    /// Zero keeps the manifest's sample count.
    pub samples: usize,
    /// Non-positive keeps the manifest's residual tolerance.
    pub tol: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: PndpStatus, msg: impl Into<String>) -> PndpStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> PndpStatus) -> PndpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(PndpStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `p` must be null or a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, PndpStatus> {
    if p.is_null() {
        return Err(fail(PndpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(PndpStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn to_c(s: String) -> *mut c_char {
    let mut bytes = s.into_bytes();
    bytes.retain(|&b| b != 0);
    CString::new(bytes).expect("interior NULs removed").into_raw()
}

fn eval_status(e: &EvalError) -> PndpStatus {
    match e {
        EvalError::Domain(_) => PndpStatus::DomainError,
        EvalError::UnboundSymbol(_) => PndpStatus::UnboundSymbol,
    }
}

/// Message of the last error on this thread; empty when none occurred.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pndp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn pndp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses prefix text such as `(* 2 (sin x))`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pndp_expr_parse(text: *const c_char, out: *mut *mut PndpExpr) -> PndpStatus {
    guard(|| {
        if out.is_null() {
            return fail(PndpStatus::NullPointer, "out is null");
        }
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Expr::parse(text) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(PndpExpr(e)));
                PndpStatus::Ok
            }
            Err(e) => fail(PndpStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `expr` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pndp_expr_free(expr: *mut PndpExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Prefix text of `expr`, or null when `expr` is null.
///
/// # Safety
/// `expr` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pndp_expr_to_string(expr: *const PndpExpr) -> *mut c_char {
    match expr.as_ref() {
        Some(e) => to_c(e.0.to_string()),
        None => {
            set_error("expr is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `expr` must be a live handle, `symbol` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pndp_expr_differentiate(
    expr: *const PndpExpr,
    symbol: *const c_char,
    out: *mut *mut PndpExpr,
) -> PndpStatus {
    guard(|| {
        let (Some(e), false) = (expr.as_ref(), out.is_null()) else {
            return fail(PndpStatus::NullPointer, "expr or out is null");
        };
        let s = match read_str(symbol, "symbol") {
            Ok(s) => s,
            Err(st) => return st,
        };
        *out = Box::into_raw(Box::new(PndpExpr(e.0.differentiate(s))));
        PndpStatus::Ok
    })
}

/// # Safety
/// `expr` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pndp_expr_simplify(expr: *const PndpExpr, out: *mut *mut PndpExpr) -> PndpStatus {
    guard(|| {
        let (Some(e), false) = (expr.as_ref(), out.is_null()) else {
            return fail(PndpStatus::NullPointer, "expr or out is null");
        };
        *out = Box::into_raw(Box::new(PndpExpr(e.0.simplify())));
        PndpStatus::Ok
    })
}

/// Evaluates `expr` with `names[i] = values[i]` for `i < len`.
///
/// # Safety
/// `names` and `values` must point to `len` elements (either may be null
/// when `len` is zero) and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pndp_expr_evaluate(
    expr: *const PndpExpr,
    names: *const *const c_char,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> PndpStatus {
    guard(|| {
        let (Some(e), false) = (expr.as_ref(), out.is_null()) else {
            return fail(PndpStatus::NullPointer, "expr or out is null");
        };
        if len > 0 && (names.is_null() || values.is_null()) {
            return fail(PndpStatus::NullPointer, "names or values is null");
        }
        let mut b = Binding::new();
        for i in 0..len {
            let name = match read_str(*names.add(i), "name") {
                Ok(n) => n,
                Err(s) => return s,
            };
            b.set(name, *values.add(i));
        }
        match e.0.evaluate(&b) {
            Ok(v) => {
                *out = v;
                PndpStatus::Ok
            }
            Err(err) => fail(eval_status(&err), err.to_string()),
        }
    })
}

/// Newline-separated catalog ids.
#[no_mangle]
pub extern "C" fn pndp_catalog_list() -> *mut c_char {
    to_c(catalog_ids().collect::<Vec<_>>().join("\n"))
}

/// TOML source of a catalog entry.
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pndp_catalog_export(id: *const c_char, out: *mut *mut c_char) -> PndpStatus {
    guard(|| {
        if out.is_null() {
            return fail(PndpStatus::NullPointer, "out is null");
        }
        let id = match read_str(id, "id") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match catalog_source(id) {
            Ok(text) => {
                *out = to_c(text.to_string());
                PndpStatus::Ok
            }
            Err(e) => fail(PndpStatus::UnknownExample, e.to_string()),
        }
    })
}

unsafe fn options(opts: *const PndpRunOptions) -> RunOptions {
    match opts.as_ref() {
        None => RunOptions::default(),
        Some(o) => RunOptions {
            seed: o.has_seed.then_some(o.seed),
            samples: (o.samples > 0).then_some(o.samples),
            tol: (o.tol > 0.0).then_some(o.tol),
        },
    }
}

/// Runs a catalog entry.
///
/// # Safety
/// `id` must be a NUL-terminated string, `opts` null or valid, and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pndp_run_catalog(
    id: *const c_char,
    opts: *const PndpRunOptions,
    out: *mut *mut PndpReport,
) -> PndpStatus {
    guard(|| {
        if out.is_null() {
            return fail(PndpStatus::NullPointer, "out is null");
        }
        let id = match read_str(id, "id") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match run_catalog(id, &options(opts)) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(PndpReport(r)));
                PndpStatus::Ok
            }
            Err(e @ CatalogError::UnknownExample(_)) => fail(PndpStatus::UnknownExample, e.to_string()),
            Err(e) => fail(PndpStatus::InvalidManifest, e.to_string()),
        }
    })
}

/// Runs a manifest given as TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string, `opts` null or valid, and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pndp_run_manifest(
    text: *const c_char,
    opts: *const PndpRunOptions,
    out: *mut *mut PndpReport,
) -> PndpStatus {
    guard(|| {
        if out.is_null() {
            return fail(PndpStatus::NullPointer, "out is null");
        }
        let text = match read_str(text, "text") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_manifest(text) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(PndpReport(run(&m, &options(opts)))));
                PndpStatus::Ok
            }
            Err(e) => fail(PndpStatus::InvalidManifest, e.to_string()),
        }
    })
}

/// Exit status of a report: 0 iff every check passed, -1 for null.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pndp_report_status(report: *const PndpReport) -> i32 {
    report.as_ref().map_or(-1, |r| r.0.status)
}

/// JSON rendering of a report, or null when `report` is null.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pndp_report_json(report: *const PndpReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => to_c(r.0.to_json()),
        None => {
            set_error("report is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `report` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pndp_report_free(report: *mut PndpReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
