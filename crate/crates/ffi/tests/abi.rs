use std::ffi::{c_char, CStr, CString};
use std::ptr;

use dgsymp_ffi::*;

fn trunc() -> DgsympTruncation {
    DgsympTruncation { window_lo: -4, window_hi: 1, max_polydeg: 4, max_weight: 6, max_wedge: 3 }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(dgsymp_last_error()) }.to_string_lossy().into_owned()
}

fn parse(text: &str) -> *mut DgsympAlgebra {
    let src = CString::new(text).unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { dgsymp_algebra_parse(src.as_ptr(), &mut a) }, DgsympStatus::Ok);
    a
}

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { dgsymp_string_free(s) };
    out
}

#[test]
fn parse_print_and_free() {
    let a = parse("field Q; gen x : 0; gen y : -1; D y = x^2;");
    assert_eq!(unsafe { dgsymp_algebra_generator_count(a) }, 2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dgsymp_algebra_to_text(a, &mut s) }, DgsympStatus::Ok);
    assert_eq!(take(s), "field Q;\ngen x : 0;\ngen y : -1;\nD y = x^2;\n");
    unsafe { dgsymp_algebra_free(a) };
}

#[test]
fn parse_errors_set_the_message() {
    let src = CString::new("field Q; gen y : -1; D y = x^2; gen x : 0;").unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { dgsymp_algebra_parse(src.as_ptr(), &mut a) }, DgsympStatus::ParseError);
    assert!(a.is_null());
    assert!(last_error().contains("forward reference"));
}

#[test]
fn null_arguments_are_rejected() {
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { dgsymp_algebra_parse(ptr::null(), &mut a) }, DgsympStatus::BadArgument);
    assert_eq!(unsafe { dgsymp_algebra_generator_count(ptr::null()) }, 0);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dgsymp_algebra_to_text(ptr::null(), &mut s) }, DgsympStatus::BadArgument);
    unsafe { dgsymp_algebra_free(ptr::null_mut()) };
    unsafe { dgsymp_string_free(ptr::null_mut()) };
}

#[test]
fn cotangent_bundle_is_symplectic() {
    let b = parse("field Q; gen x : 0 weight 1; gen z : -1 weight 2; D z = x^2;");
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { dgsymp_shifted_cotangent(b, 1, ptr::null(), &mut t) }, DgsympStatus::Ok);
    assert_eq!(unsafe { dgsymp_algebra_generator_count(t) }, 4);
    let omega = CString::new("d(x)^d(y) + d(z)^d(y_z)").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { dgsymp_verify_symplectic(t, omega.as_ptr(), 1, trunc(), &mut r) }, DgsympStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(r)).unwrap();
    assert_eq!(v["pass"], true);
    let zero = CString::new("0").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { dgsymp_verify_symplectic(t, zero.as_ptr(), 1, trunc(), &mut r) }, DgsympStatus::CheckFailed);
    take(r);
    unsafe {
        dgsymp_algebra_free(t);
        dgsymp_algebra_free(b);
    }
}

#[test]
fn darboux_through_the_abi() {
    let a = parse("field Q; gen x : 0; gen y : -1; D y = x^2;");
    let omega = CString::new("d(y)^d(x)").unwrap();
    let witness = CString::new("witness { lagrangian d(x); }").unwrap();
    let mut r = ptr::null_mut();
    let status = unsafe { dgsymp_darboux(a, omega.as_ptr(), 1, witness.as_ptr(), trunc(), &mut r) };
    assert_eq!(status, DgsympStatus::Ok, "{}", last_error());
    let v: serde_json::Value = serde_json::from_str(&take(r)).unwrap();
    assert_eq!(v["f"], "1/3*x^3");
    assert_eq!(v["schema_version"], unsafe { CStr::from_ptr(dgsymp_schema_version()) }.to_str().unwrap());
    let bad = CString::new("x*d(y)^d(x)").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { dgsymp_darboux(a, bad.as_ptr(), 1, witness.as_ptr(), trunc(), &mut r) }, DgsympStatus::Invalid);
    assert!(!last_error().is_empty());
    unsafe { dgsymp_algebra_free(a) };
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dgsymp.h")).unwrap();
    for name in ["dgsymp_algebra_parse", "dgsymp_darboux", "dgsymp_last_error", "typedef struct DgsympAlgebra DgsympAlgebra"] {
        assert!(h.contains(name), "{name}");
    }
}
