//! C interface to robsat.
//!
//! Instances are loaded from the JSON instance format into an opaque
//! `RobsatInstance` handle. Every function returns a `RobsatStatus`; on
//! failure `robsat_last_error` gives a message for the calling thread.
//! Strings returned through `out` parameters are owned by the caller and
//! must be released with `robsat_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use robsat::io::Instance;
use robsat::robsat::{decide_robsat_with, robustness_with, RobVerdict, RobustnessResult};
use robsat::{CriticalValue, DeciderOptions, Error, Norm};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RobsatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    Internal = 5,
    Panic = 6,
}

/// Outcome of a robust satisfiability query.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RobsatVerdict {
    RobustYes = 0,
    RobustNo = 1,
    Unknown = 2,
}

/// Opaque handle to a parsed instance.
pub struct RobsatInstance {
    inner: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> RobsatStatus {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::MissingValue(_) | Error::Dimension(_) => RobsatStatus::ParseError,
        Error::Invariant(_) => RobsatStatus::Internal,
        _ => RobsatStatus::InvalidArgument,
    }
}

fn guard<F>(f: F) -> RobsatStatus
where
    F: FnOnce() -> Result<(), (RobsatStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RobsatStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RobsatStatus::Panic
        }
    }
}

fn fail(e: Error) -> (RobsatStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (RobsatStatus, String)> {
    if p.is_null() {
        return Err((RobsatStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (RobsatStatus::InvalidUtf8, "string argument is not UTF-8".into()))
}

unsafe fn instance<'a>(p: *const RobsatInstance) -> Result<&'a RobsatInstance, (RobsatStatus, String)> {
    p.as_ref().ok_or_else(|| (RobsatStatus::NullPointer, "null instance".into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (RobsatStatus, String)> {
    if out.is_null() {
        return Err((RobsatStatus::NullPointer, "null output pointer".into()));
    }
    let c = CString::new(s).map_err(|_| (RobsatStatus::Internal, "interior NUL in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn options(assume_hopf: bool) -> DeciderOptions {
    DeciderOptions { assume_hopf }
}

/// Message describing the last failure on this thread, or NULL. Valid until
/// the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn robsat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn robsat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an instance from JSON text.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn robsat_instance_from_json(json: *const c_char, out: *mut *mut RobsatInstance) -> RobsatStatus {
    guard(|| {
        if out.is_null() {
            return Err((RobsatStatus::NullPointer, "null output pointer".into()));
        }
        let text = read_str(json)?;
        let inner = Instance::from_json(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(RobsatInstance { inner }));
        Ok(())
    })
}

/// Releases an instance. Passing NULL is a no-op.
///
/// # Safety
/// `inst` must come from `robsat_instance_from_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn robsat_instance_free(inst: *mut RobsatInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Overrides the norm (`"l1"`, `"l2"` or `"linf"`).
///
/// # Safety
/// `inst` must be a live handle and `norm` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn robsat_instance_set_norm(inst: *mut RobsatInstance, norm: *const c_char) -> RobsatStatus {
    guard(|| {
        let inst = inst.as_mut().ok_or_else(|| (RobsatStatus::NullPointer, "null instance".into()))?;
        inst.inner.norm = Norm::parse(read_str(norm)?).map_err(fail)?;
        Ok(())
    })
}

/// Number of vertices of the instance's complex.
///
/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn robsat_instance_num_vertices(inst: *const RobsatInstance, out: *mut usize) -> RobsatStatus {
    guard(|| {
        let inst = instance(inst)?;
        if out.is_null() {
            return Err((RobsatStatus::NullPointer, "null output pointer".into()));
        }
        *out = inst.inner.f.complex().num_vertices();
        Ok(())
    })
}

/// Decides robust satisfiability at `alpha` (`"p/q"` or `"sqrt:p/q"`); NULL
/// uses the instance's own alpha.
///
/// # Safety
/// `inst` must be a live handle, `alpha` NULL or a valid string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn robsat_decide(
    inst: *const RobsatInstance,
    alpha: *const c_char,
    assume_hopf: bool,
    out: *mut RobsatVerdict,
) -> RobsatStatus {
    guard(|| {
        let inst = instance(inst)?;
        if out.is_null() {
            return Err((RobsatStatus::NullPointer, "null output pointer".into()));
        }
        let alpha = if alpha.is_null() {
            inst.inner.alpha.clone().ok_or_else(|| (RobsatStatus::InvalidArgument, "instance has no alpha".into()))?
        } else {
            CriticalValue::parse(read_str(alpha)?).map_err(fail)?
        };
        let d = decide_robsat_with(&inst.inner.f, &alpha, inst.inner.norm, options(assume_hopf)).map_err(fail)?;
        *out = match d.verdict {
            RobVerdict::RobustYes => RobsatVerdict::RobustYes,
            RobVerdict::RobustNo(_) => RobsatVerdict::RobustNo,
            RobVerdict::Unknown => RobsatVerdict::Unknown,
        };
        Ok(())
    })
}

/// Computes the robustness value as a JSON document, e.g.
/// `{"kind":"value","value":"1"}`.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn robsat_robustness_json(inst: *const RobsatInstance, assume_hopf: bool, out: *mut *mut c_char) -> RobsatStatus {
    guard(|| {
        let inst = instance(inst)?;
        let (r, _) = robustness_with(&inst.inner.f, inst.inner.norm, options(assume_hopf)).map_err(fail)?;
        let doc = match r {
            RobustnessResult::Unsatisfiable => serde_json::json!({ "kind": "unsatisfiable" }),
            RobustnessResult::Value(v) => serde_json::json!({ "kind": "value", "value": v.to_json() }),
            RobustnessResult::Interval(lo, hi) => serde_json::json!({ "kind": "interval", "lo": lo.to_json(), "hi": hi.to_json() }),
        };
        write_string(out, doc.to_string())
    })
}

/// Critical values of `|f|` as a JSON array.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn robsat_critical_values_json(inst: *const RobsatInstance, out: *mut *mut c_char) -> RobsatStatus {
    guard(|| {
        let inst = instance(inst)?;
        let values: Vec<_> = inst.inner.f.critical_values(inst.inner.norm).iter().map(CriticalValue::to_json).collect();
        write_string(out, serde_json::Value::Array(values).to_string())
    })
}

/// Releases a string returned by this library. Passing NULL is a no-op.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn robsat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
