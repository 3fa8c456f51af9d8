//! C ABI over `dgsymp`.
//!
//! Presentations are opaque [`DgsympAlgebra`] handles. Reports come back as
//! JSON strings owned by the caller and released with
//! [`dgsymp_string_free`]. Every call returns a [`DgsympStatus`]; on failure
//! [`dgsymp_last_error`] describes the cause for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use dgsymp::cohom::SliceSpec;
use dgsymp::darboux::{darboux_pipeline, DarbouxConfig};
use dgsymp::derham::{DeRham, DeRhamElement};
use dgsymp::dgmod::{calibrate, DualityContext};
use dgsymp::error::Error;
use dgsymp::gca::{parse_poly, parse_presentation, SemifreeCdga};
use dgsymp::report::SCHEMA_VERSION;
use dgsymp::shifted::{form_map, shifted_cotangent, twisted_standard_form, verify_symplectic};
use dgsymp::witt::{parse_witness, SymmetricComplex};
use serde_json::json;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgsympStatus {
    Ok = 0,
    /// The computation ran and a check failed.
    CheckFailed = 1,
    /// Input text did not parse.
    ParseError = 2,
    /// The input was rejected (precondition, degree or validity error).
    Invalid = 3,
    /// A required pointer was null or a string was not UTF-8.
    BadArgument = 4,
    /// Internal panic; the handle arguments are left untouched.
    Panic = 5,
}

/// Truncation bounds for cohomology and forms.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct DgsympTruncation {
    pub window_lo: i32,
    pub window_hi: i32,
    pub max_polydeg: u32,
    pub max_weight: i64,
    pub max_wedge: u32,
}

impl DgsympTruncation {
    fn spec(&self) -> SliceSpec {
        SliceSpec::new((self.window_lo, self.window_hi), self.max_polydeg).with_max_weight(self.max_weight)
    }
}

/// A semifree cdga presentation.
pub struct DgsympAlgebra(SemifreeCdga);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(DgsympStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::UnknownGenerator(_) | Error::DuplicateGenerator(_) => DgsympStatus::ParseError,
            _ => DgsympStatus::Invalid,
        };
        Fail(code, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<DgsympStatus, Fail>) -> DgsympStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            if s == DgsympStatus::Ok {
                set_error("");
            }
            s
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            DgsympStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(DgsympStatus::BadArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(DgsympStatus::BadArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const DgsympAlgebra) -> Result<&'a SemifreeCdga, Fail> {
    p.as_ref().map(|a| &a.0).ok_or_else(|| Fail(DgsympStatus::BadArgument, "algebra handle is null".into()))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(DgsympStatus::BadArgument, "output pointer is null".into()));
    }
    *out = CString::new(s).map_err(|_| Fail(DgsympStatus::Invalid, "output contains a nul byte".into()))?.into_raw();
    Ok(())
}

fn context(d: i32) -> Result<DualityContext, Fail> {
    if d < 1 {
        return Err(Fail(DgsympStatus::BadArgument, format!("d must be positive, got {d}")));
    }
    Ok(calibrate(d)?)
}

fn report(command: &str, pass: bool, payload: serde_json::Value) -> String {
    let mut v = json!({ "schema_version": SCHEMA_VERSION, "command": command, "pass": pass });
    if let (Some(o), serde_json::Value::Object(p)) = (v.as_object_mut(), payload) {
        o.extend(p);
    }
    v.to_string()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn dgsymp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Version tag of the JSON reports (static string).
#[no_mangle]
pub extern "C" fn dgsymp_schema_version() -> *const c_char {
    static V: OnceLock<CString> = OnceLock::new();
    V.get_or_init(|| CString::new(SCHEMA_VERSION).expect("no nul")).as_ptr()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dgsymp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a presentation; on success `*out` owns a new handle.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgsymp_algebra_parse(src: *const c_char, out: *mut *mut DgsympAlgebra) -> DgsympStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(DgsympStatus::BadArgument, "output pointer is null".into()));
        }
        let a = parse_presentation(text(src, "presentation")?)?;
        *out = Box::into_raw(Box::new(DgsympAlgebra(a)));
        Ok(DgsympStatus::Ok)
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `a` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dgsymp_algebra_free(a: *mut DgsympAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of generators, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgsymp_algebra_generator_count(a: *const DgsympAlgebra) -> usize {
    a.as_ref().map_or(0, |a| a.0.len())
}

/// Canonical text of the presentation.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgsymp_algebra_to_text(a: *const DgsympAlgebra, out: *mut *mut c_char) -> DgsympStatus {
    guard(|| {
        put_string(out, handle(a)?.to_text())?;
        Ok(DgsympStatus::Ok)
    })
}

/// `T*[d]` of the base, twisted by `potential` when it is non-null; `*out`
/// receives the total space.
///
/// # Safety
/// `base` must be a live handle, `potential` null or a nul-terminated
/// string, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgsymp_shifted_cotangent(
    base: *const DgsympAlgebra,
    d: i32,
    potential: *const c_char,
    out: *mut *mut DgsympAlgebra,
) -> DgsympStatus {
    guard(|| {
        let b = handle(base)?;
        let ctx = context(d)?;
        if out.is_null() {
            return Err(Fail(DgsympStatus::BadArgument, "output pointer is null".into()));
        }
        let a = if potential.is_null() {
            shifted_cotangent(b, ctx)?.algebra
        } else {
            let f = parse_poly(b.ring(), text(potential, "potential")?)?;
            twisted_standard_form(b, ctx, &f)?.algebra().clone()
        };
        *out = Box::into_raw(Box::new(DgsympAlgebra(a)));
        Ok(DgsympStatus::Ok)
    })
}

/// Check that `omega` is a `d`-shifted symplectic form. `*report` receives
/// the JSON report whenever the checks ran, pass or fail.
///
/// # Safety
/// `a` must be a live handle, `omega` a nul-terminated string and `report`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgsymp_verify_symplectic(
    a: *const DgsympAlgebra,
    omega: *const c_char,
    d: i32,
    trunc: DgsympTruncation,
    report_out: *mut *mut c_char,
) -> DgsympStatus {
    guard(|| {
        let a = handle(a)?;
        let dr = DeRham::new(a)?;
        let w = DeRhamElement::new(dr.parse_form(text(omega, "omega")?)?, 2, trunc.max_wedge);
        let r = verify_symplectic(&dr, &w, context(d)?, &trunc.spec())?;
        let pass = r.passed();
        put_string(report_out, report("verify-symplectic", pass, json!({ "omega": dr.form_text(&w.form), "report": r })))?;
        Ok(if pass { DgsympStatus::Ok } else { DgsympStatus::CheckFailed })
    })
}

/// Darboux normal form. `witness` uses the witness file grammar.
///
/// # Safety
/// `a` must be a live handle, `omega` and `witness` nul-terminated strings
/// and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgsymp_darboux(
    a: *const DgsympAlgebra,
    omega: *const c_char,
    d: i32,
    witness: *const c_char,
    trunc: DgsympTruncation,
    report_out: *mut *mut c_char,
) -> DgsympStatus {
    guard(|| {
        let a = handle(a)?;
        let ctx = context(d)?;
        let dr = DeRham::new(a)?;
        let w = DeRhamElement::new(dr.parse_form(text(omega, "omega")?)?, 2, trunc.max_wedge);
        let phi = form_map(&dr, &dr.component(&w.form, 2), d)?;
        let sym = SymmetricComplex::new(phi.target.clone(), phi, ctx)?;
        let wit = parse_witness(text(witness, "witness")?, &sym)?;
        let cfg = DarbouxConfig { spec: trunc.spec(), cap: trunc.max_polydeg, max_wedge: trunc.max_wedge };
        let r = darboux_pipeline(a, &w, ctx, &wit, &cfg)?;
        let pass = r.report.passed();
        put_string(report_out, report("darboux", pass, r.to_json()))?;
        Ok(if pass { DgsympStatus::Ok } else { DgsympStatus::CheckFailed })
    })
}
