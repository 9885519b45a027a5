use std::ffi::{c_char, CStr, CString};
use std::ptr;

use lucas_atoms_ffi::*;

unsafe fn take_string(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    la_string_free(s);
    out
}

unsafe fn poly_text(poly: *const LaPoly) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(la_poly_to_string(poly, &mut s), LaStatus::Ok);
    take_string(s)
}

fn last_error() -> Option<String> {
    let p = la_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned())
}

#[test]
fn atoms_through_handles() {
    unsafe {
        for route in [LA_ROUTE_SYMMETRIC, LA_ROUTE_DIVISION, LA_ROUTE_REDUCTION, LA_ROUTE_CHECKED] {
            let mut p = ptr::null_mut();
            assert_eq!(la_atom(8, route, &mut p), LaStatus::Ok);
            assert_eq!(poly_text(p), "s^4 + 4*s^2*t + 2*t^2");
            la_poly_free(p);
        }
        let mut p6 = ptr::null_mut();
        assert_eq!(la_atom(6, LA_ROUTE_CHECKED, &mut p6), LaStatus::Ok);
        let mut value = ptr::null_mut();
        assert_eq!(la_poly_eval(p6, 1, 1, &mut value), LaStatus::Ok);
        assert_eq!(take_string(value), "4");
        la_poly_free(p6);
    }
}

#[test]
fn lucas_quotient_round_trip() {
    unsafe {
        let (mut u8_, mut u4, mut q, mut p8, mut back) =
            (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(la_lucas_poly(8, &mut u8_), LaStatus::Ok);
        assert_eq!(la_lucas_poly(4, &mut u4), LaStatus::Ok);
        assert_eq!(la_poly_exact_div_in_s(u8_, u4, &mut q), LaStatus::Ok);
        assert_eq!(la_atom(8, LA_ROUTE_SYMMETRIC, &mut p8), LaStatus::Ok);
        let mut equal = false;
        assert_eq!(la_poly_equal(q, p8, &mut equal), LaStatus::Ok);
        assert!(equal);
        assert_eq!(la_poly_mul(q, u4, &mut back), LaStatus::Ok);
        assert_eq!(la_poly_equal(back, u8_, &mut equal), LaStatus::Ok);
        assert!(equal);

        let mut w = ptr::null_mut();
        assert_eq!(la_companion_poly(3, &mut w), LaStatus::Ok);
        assert_eq!(poly_text(w), "s^3 + 3*s*t");
        let mut junk = ptr::null_mut();
        assert_eq!(la_poly_exact_div_in_s(w, u4, &mut junk), LaStatus::DomainError);
        assert!(junk.is_null());
        assert!(last_error().unwrap().contains("inexact"));

        for h in [u8_, u4, q, p8, back, w] {
            la_poly_free(h);
        }
    }
}

#[test]
fn valuations_and_rank() {
    unsafe {
        let mut v = 0u64;
        for method in [LA_METHOD_CLOSED, LA_METHOD_MOBIUS, LA_METHOD_ORACLE] {
            assert_eq!(la_vp_atom(2, 2, 2, 8, method, &mut v), LaStatus::Ok);
            assert_eq!(v, 3);
        }
        assert_eq!(la_vp_atom(4, 1, 1, 6, LA_METHOD_CLOSED, &mut v), LaStatus::DomainError);
        assert_eq!(la_vp_atom(2, 1, 1, 6, 9, &mut v), LaStatus::InvalidArgument);
        assert_eq!(la_vp_atom(3, 1, -1, 3, LA_METHOD_ORACLE, &mut v), LaStatus::DomainError);

        let (mut rho, mut defined) = (0u64, false);
        assert_eq!(la_rank_of_appearance(7, 1, 1, &mut rho, &mut defined), LaStatus::Ok);
        assert!(defined);
        assert_eq!(rho, 8);
        assert_eq!(la_rank_of_appearance(3, 1, 3, &mut rho, &mut defined), LaStatus::Ok);
        assert!(!defined);
        assert!(last_error().is_none());
    }
}

#[test]
fn errors_and_null_pointers() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(la_atom(0, LA_ROUTE_SYMMETRIC, &mut p), LaStatus::DomainError);
        assert!(last_error().unwrap().contains("positive"));
        assert_eq!(la_atom(5, 17, &mut p), LaStatus::InvalidArgument);
        assert_eq!(la_atom(5, LA_ROUTE_SYMMETRIC, ptr::null_mut()), LaStatus::NullPointer);
        assert_eq!(la_poly_to_string(ptr::null(), &mut ptr::null_mut()), LaStatus::NullPointer);
        la_poly_free(ptr::null_mut());
        la_string_free(ptr::null_mut());
    }
}

#[test]
fn cli_in_process() {
    let args: Vec<CString> = ["lucas-atoms", "val", "--p", "2", "--s", "1", "--t", "1", "--n", "6", "--method", "all"]
        .iter()
        .map(|a| CString::new(*a).unwrap())
        .collect();
    let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    unsafe {
        let (mut out, mut err, mut code) = (ptr::null_mut(), ptr::null_mut(), -1);
        assert_eq!(la_run(argv.len(), argv.as_ptr(), &mut out, &mut err, &mut code), LaStatus::Ok);
        assert_eq!(code, 0);
        assert_eq!(take_string(out), "closed=2 mobius=2 oracle=2\n");
        assert_eq!(take_string(err), "");

        let bad = [CString::new("lucas-atoms").unwrap(), CString::new("nope").unwrap()];
        let argv: Vec<*const c_char> = bad.iter().map(|a| a.as_ptr()).collect();
        assert_eq!(la_run(2, argv.as_ptr(), &mut out, &mut err, &mut code), LaStatus::Ok);
        assert_eq!(code, 2);
        la_string_free(out);
        assert!(take_string(err).starts_with("error:"));
    }
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/lucas_atoms.h");
    for name in [
        "typedef struct LaPoly LaPoly",
        "LA_STATUS_OK = 0",
        "LA_STATUS_PANIC = 5",
        "LaStatus la_atom(uint64_t n, uint32_t route, LaPoly **out)",
        "la_poly_free",
        "la_vp_atom",
        "la_rank_of_appearance",
        "la_run",
        "const char *la_last_error(void)",
        "la_string_free",
        "#define LA_ROUTE_CHECKED 3",
    ] {
        assert!(header.contains(name), "header lacks `{name}`");
    }
}
