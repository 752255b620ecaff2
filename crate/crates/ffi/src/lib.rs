//! C interface to `pwdyn`.
//!
//! Maps live behind opaque `PwdynMap` handles. Every fallible call returns a
//! `PwdynStatus`; the message of the last failure on the calling thread is
//! available from `pwdyn_last_error`. Rationals cross the boundary as
//! `p/q` strings, structured results as JSON strings. Strings returned by the
//! library must be released with `pwdyn_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pwdyn::codes::{is_regular, Answer};
use pwdyn::harness::{run_suite, GeneratorConfig, SuiteConfig};
use pwdyn::rational::parse_rational;
use pwdyn::stability::classify_point_detail;
use pwdyn::taxonomy::{count_bound, taxonomy};
use pwdyn::{Error, PiecewiseMap, Rational, Side};
use serde_json::json;

/// Opaque handle to a validated piecewise affine map.
pub struct PwdynMap {
    inner: PiecewiseMap,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PwdynStatus {
    Ok = 0,
    NullArgument = 1,
    /// Map text or a rational failed to parse, or an argument is out of range.
    InvalidInput = 2,
    /// The value is undefined, as at a discontinuity.
    Undefined = 3,
    /// A piece, power or denominator limit was reached.
    LimitReached = 4,
    /// The question does not apply to this input.
    Precondition = 5,
    /// A checked theorem failed; the message names the clause.
    Violation = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PwdynAnswer {
    No = 0,
    Yes = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PwdynSide {
    Minus = 0,
    Plus = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PwdynStatus {
    match e {
        Error::Syntax { .. }
        | Error::ZeroSlope { .. }
        | Error::Coverage(_)
        | Error::ImageEscapes(_)
        | Error::EmptyInterval
        | Error::OutOfDomain(_)
        | Error::NoSide { .. }
        | Error::IntervalMismatch
        | Error::Invalid(_) => PwdynStatus::InvalidInput,
        Error::PieceLimit(_) | Error::PowerLimit { .. } | Error::VariantLimit { .. } | Error::RejectionBudget(_) => {
            PwdynStatus::LimitReached
        }
        Error::HitsDiscontinuity(_) => PwdynStatus::Undefined,
        Error::Violation(_) => PwdynStatus::Violation,
        _ => PwdynStatus::Precondition,
    }
}

/// Runs `body`, recording errors and turning panics into a status.
fn guard(body: impl FnOnce() -> Result<(), (PwdynStatus, String)>) -> PwdynStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            PwdynStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PwdynStatus::Panic
        }
    }
}

fn fail(e: Error) -> (PwdynStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PwdynStatus, String) {
    (PwdynStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (PwdynStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (PwdynStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn rational_arg(p: *const c_char, what: &str) -> Result<Rational, (PwdynStatus, String)> {
    let s = text_arg(p, what)?;
    parse_rational(s).ok_or_else(|| (PwdynStatus::InvalidInput, format!("{what}: not a rational: {s}")))
}

unsafe fn map_arg<'a>(p: *const PwdynMap, what: &str) -> Result<&'a PiecewiseMap, (PwdynStatus, String)> {
    p.as_ref().map(|m| &m.inner).ok_or_else(|| null(what))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (PwdynStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| (PwdynStatus::Panic, "interior nul".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_map(out: *mut *mut PwdynMap, m: PiecewiseMap) -> Result<(), (PwdynStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(PwdynMap { inner: m }));
    Ok(())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pwdyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pwdyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses map file text into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_map_parse(text: *const c_char, out: *mut *mut PwdynMap) -> PwdynStatus {
    guard(|| {
        let t = text_arg(text, "text")?;
        let m = pwdyn::map::parse_map(t).map_err(fail)?;
        put_map(out, m)
    })
}

/// # Safety
/// `map` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_map_free(map: *mut PwdynMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Normalized map file text.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_map_to_text(map: *const PwdynMap, out: *mut *mut c_char) -> PwdynStatus {
    guard(|| put_string(out, map_arg(map, "map")?.to_text()))
}

/// Number of pieces after merging collinear neighbours.
///
/// # Safety
/// `map` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_map_piece_count(map: *const PwdynMap) -> usize {
    map.as_ref().map_or(0, |m| m.inner.pieces().len())
}

/// Value at `x`, `Undefined` at a discontinuity.
///
/// # Safety
/// `map` must be a live handle, `x` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_map_eval(map: *const PwdynMap, x: *const c_char, out: *mut *mut c_char) -> PwdynStatus {
    guard(|| {
        let f = map_arg(map, "map")?;
        let x = rational_arg(x, "x")?;
        match f.eval(&x).map_err(fail)? {
            Some(y) => put_string(out, y.to_string()),
            None => Err((PwdynStatus::Undefined, format!("{x} is a discontinuity"))),
        }
    })
}

/// One-sided limit at `x`.
///
/// # Safety
/// As for `pwdyn_map_eval`.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_map_lateral_limit(
    map: *const PwdynMap,
    x: *const c_char,
    side: PwdynSide,
    out: *mut *mut c_char,
) -> PwdynStatus {
    guard(|| {
        let f = map_arg(map, "map")?;
        let x = rational_arg(x, "x")?;
        let side = match side {
            PwdynSide::Minus => Side::Minus,
            PwdynSide::Plus => Side::Plus,
        };
        put_string(out, f.lateral_limit(&x, side).map_err(fail)?.to_string())
    })
}

/// `{"S": [...], "T": [...], "D": [...]}`.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_map_special_points(map: *const PwdynMap, out: *mut *mut c_char) -> PwdynStatus {
    guard(|| {
        let sp = map_arg(map, "map")?.special_points();
        let list = |s: &std::collections::BTreeSet<Rational>| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        put_string(out, json!({ "S": list(&sp.s), "T": list(&sp.t), "D": list(&sp.d) }).to_string())
    })
}

/// The composition `outer(inner(x))` as a new handle.
///
/// # Safety
/// `outer` and `inner` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_map_compose(
    outer: *const PwdynMap,
    inner: *const PwdynMap,
    out: *mut *mut PwdynMap,
) -> PwdynStatus {
    guard(|| {
        let (f, g) = (map_arg(outer, "outer")?, map_arg(inner, "inner")?);
        put_map(out, f.compose(g).map_err(fail)?)
    })
}

/// The `n`-th iterate as a new handle.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_map_iterate(map: *const PwdynMap, n: usize, out: *mut *mut PwdynMap) -> PwdynStatus {
    guard(|| {
        let f = map_arg(map, "map")?;
        put_map(out, f.iterate(n).map_err(fail)?)
    })
}

/// Stability of a confined point as JSON: class plus per-side verdicts.
///
/// # Safety
/// `map` must be a live handle, `x` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_classify(map: *const PwdynMap, x: *const c_char, out: *mut *mut c_char) -> PwdynStatus {
    guard(|| {
        let f = map_arg(map, "map")?;
        let x = rational_arg(x, "x")?;
        let p = classify_point_detail(f, &x).map_err(fail)?;
        let sides: Vec<_> = p
            .sides
            .iter()
            .map(|s| json!({ "side": s.side.name(), "product": s.cycle_product.to_string() }))
            .collect();
        put_string(out, json!({ "x": x.to_string(), "class": p.class.name(), "sides": sides }).to_string())
    })
}

/// Taxonomy of the continuous periodic orbit through `x` (period at most `horizon`).
///
/// # Safety
/// `map` must be a live handle, `x` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_taxonomy(
    map: *const PwdynMap,
    x: *const c_char,
    horizon: usize,
    out: *mut *mut c_char,
) -> PwdynStatus {
    guard(|| {
        let f = map_arg(map, "map")?;
        let x = rational_arg(x, "x")?;
        let orbit = pwdyn::orbit::PeriodicOrbit::continuous_through(f, &x, horizon)
            .ok_or_else(|| (PwdynStatus::Precondition, format!("{x} is not a continuous periodic point")))?;
        let t = taxonomy(f, &orbit).map_err(fail)?;
        let orbit: Vec<String> = t.orbit.points.iter().map(|p| p.to_string()).collect();
        put_string(
            out,
            json!({
                "orbit": orbit, "critical": t.critical, "trapped": t.trapped, "free": t.free,
                "exceptional_types": t.exceptional_types, "boundary_case": t.boundary_case,
            })
            .to_string(),
        )
    })
}

/// Orbit-count bound at `horizon`; `holds` receives whether the bound holds.
///
/// # Safety
/// `map` must be a live handle; `holds` and `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_count_bound(
    map: *const PwdynMap,
    horizon: usize,
    holds: *mut bool,
    out: *mut *mut c_char,
) -> PwdynStatus {
    guard(|| {
        let f = map_arg(map, "map")?;
        let r = count_bound(f, horizon).map_err(fail)?;
        if let Some(h) = holds.as_mut() {
            *h = r.holds;
        }
        if out.is_null() {
            Ok(())
        } else {
            put_string(out, r.to_string())
        }
    })
}

/// Whether the special point `w` is regular, deciding within `cap` steps.
///
/// # Safety
/// `map` must be a live handle, `w` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_is_regular(
    map: *const PwdynMap,
    w: *const c_char,
    cap: usize,
    out: *mut PwdynAnswer,
) -> PwdynStatus {
    guard(|| {
        let f = map_arg(map, "map")?;
        let w = rational_arg(w, "w")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match is_regular(f, &w, cap).map_err(fail)?.verdict.value {
            Answer::Yes => PwdynAnswer::Yes,
            Answer::No => PwdynAnswer::No,
            Answer::Unknown => PwdynAnswer::Unknown,
        };
        Ok(())
    })
}

/// Runs the property suite; `names` is a comma-separated list or null for all.
/// `ok` receives whether every property passed; `out` the JSON report without timings.
///
/// # Safety
/// `names` must be null or NUL-terminated; `ok` and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pwdyn_run_suite(
    seed: u64,
    scale: f64,
    names: *const c_char,
    ok: *mut bool,
    out: *mut *mut c_char,
) -> PwdynStatus {
    guard(|| {
        let names = if names.is_null() { "" } else { text_arg(names, "names")? };
        let which: Vec<&str> = names.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if scale.is_nan() || scale <= 0.0 {
            return Err((PwdynStatus::InvalidInput, "scale must be positive".into()));
        }
        let cfg = SuiteConfig {
            generator: GeneratorConfig { seed, ..GeneratorConfig::default() },
            scale,
            shrink: true,
        };
        let r = run_suite(&cfg, &which).map_err(fail)?;
        let ok = ok.as_mut().ok_or_else(|| null("ok"))?;
        *ok = r.ok();
        put_string(out, r.to_json(false))
    })
}
