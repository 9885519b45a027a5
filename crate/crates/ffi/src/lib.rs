//! C ABI for `lucas-atoms`.
//!
//! Polynomials cross the boundary as opaque `LaPoly` handles owned by the
//! caller and released with `la_poly_free`. Strings returned through out
//! parameters are NUL-terminated, owned by the caller and released with
//! `la_string_free`. Every function returns an `LaStatus`; on failure
//! `la_last_error` describes the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lucas_atoms::atoms::{atom, AtomRoute, RouteChoice};
use lucas_atoms::exactpoly::BiPoly;
use lucas_atoms::lucasfam::{companion_poly, lucas_poly, LucasParams};
use lucas_atoms::valuations::{rank_of_appearance, vp_atom_closed, vp_atom_mobius, vp_atom_oracle};
use lucas_atoms::Error;

/// Outcome of every `la_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaStatus {
    Ok = 0,
    /// The input is outside the mathematical domain (for example a
    /// composite modulus or a vanishing value).
    DomainError = 1,
    /// An enumeration code or string argument was not recognized.
    InvalidArgument = 2,
    /// Two independent computations disagreed; this is a library bug.
    InternalError = 3,
    NullPointer = 4,
    Panic = 5,
}

pub const LA_ROUTE_SYMMETRIC: u32 = 0;
pub const LA_ROUTE_DIVISION: u32 = 1;
pub const LA_ROUTE_REDUCTION: u32 = 2;
pub const LA_ROUTE_CHECKED: u32 = 3;

pub const LA_METHOD_CLOSED: u32 = 0;
pub const LA_METHOD_MOBIUS: u32 = 1;
pub const LA_METHOD_ORACLE: u32 = 2;

/// Opaque bivariate polynomial in `s` and `t`.
pub struct LaPoly {
    inner: BiPoly,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: LaStatus,
    message: String,
}

impl Failure {
    fn new(status: LaStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_internal() {
            LaStatus::InternalError
        } else {
            LaStatus::DomainError
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("NULs removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LaStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error(None);
            LaStatus::Ok
        }
        Ok(Err(f)) => {
            set_last_error(Some(f.message));
            f.status
        }
        Err(_) => {
            set_last_error(Some("panic inside lucas-atoms".into()));
            LaStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::new(LaStatus::NullPointer, format!("{name} is null")));
    }
    Ok(())
}

unsafe fn write_poly(out: *mut *mut LaPoly, poly: BiPoly) -> Result<(), Failure> {
    non_null(out, "out")?;
    *out = Box::into_raw(Box::new(LaPoly { inner: poly }));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    non_null(out, "out")?;
    *out = CString::new(s)
        .map_err(|_| Failure::new(LaStatus::InternalError, "string contains NUL"))?
        .into_raw();
    Ok(())
}

unsafe fn poly_ref<'a>(p: *const LaPoly, name: &str) -> Result<&'a BiPoly, Failure> {
    non_null(p, name)?;
    Ok(&(*p).inner)
}

/// Atom `P_n` by the given `LA_ROUTE_*`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn la_atom(n: u64, route: u32, out: *mut *mut LaPoly) -> LaStatus {
    guard(|| {
        let choice = match route {
            LA_ROUTE_SYMMETRIC => RouteChoice::Only(AtomRoute::Symmetric),
            LA_ROUTE_DIVISION => RouteChoice::Only(AtomRoute::Division),
            LA_ROUTE_REDUCTION => RouteChoice::Only(AtomRoute::Reduction),
            LA_ROUTE_CHECKED => RouteChoice::Checked,
            other => return Err(Failure::new(LaStatus::InvalidArgument, format!("unknown route {other}"))),
        };
        non_null(out, "out")?;
        let poly = atom(n, choice)?;
        write_poly(out, (*poly).clone())
    })
}

/// Lucas polynomial `U_n`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn la_lucas_poly(n: u64, out: *mut *mut LaPoly) -> LaStatus {
    guard(|| write_poly(out, lucas_poly(n)))
}

/// Companion polynomial `W_n`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn la_companion_poly(n: u64, out: *mut *mut LaPoly) -> LaStatus {
    guard(|| write_poly(out, companion_poly(n)))
}

/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn la_poly_mul(a: *const LaPoly, b: *const LaPoly, out: *mut *mut LaPoly) -> LaStatus {
    guard(|| {
        let product = poly_ref(a, "a")? * poly_ref(b, "b")?;
        write_poly(out, product)
    })
}

/// Exact quotient `a / b`, with `b` monic in `s`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn la_poly_exact_div_in_s(
    a: *const LaPoly,
    b: *const LaPoly,
    out: *mut *mut LaPoly,
) -> LaStatus {
    guard(|| {
        let q = poly_ref(a, "a")?.exact_div_in_s(poly_ref(b, "b")?)?;
        write_poly(out, q)
    })
}

/// Canonical text, e.g. `s^4 + 4*s^2*t + 2*t^2`.
///
/// # Safety
/// `poly` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn la_poly_to_string(poly: *const LaPoly, out: *mut *mut c_char) -> LaStatus {
    guard(|| write_string(out, poly_ref(poly, "poly")?.to_string()))
}

/// Value at `(s, t)` as a decimal string.
///
/// # Safety
/// `poly` must be a live handle; `out_decimal` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn la_poly_eval(
    poly: *const LaPoly,
    s: i64,
    t: i64,
    out_decimal: *mut *mut c_char,
) -> LaStatus {
    guard(|| {
        let params = LucasParams::new(s, t);
        let value = poly_ref(poly, "poly")?.eval(&params.s, &params.t);
        write_string(out_decimal, value.to_string())
    })
}

/// Whether two polynomials are identical.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn la_poly_equal(a: *const LaPoly, b: *const LaPoly, out: *mut bool) -> LaStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = poly_ref(a, "a")? == poly_ref(b, "b")?;
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `poly` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn la_poly_free(poly: *mut LaPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// `v_p(P_n(s, t))` by the given `LA_METHOD_*`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn la_vp_atom(p: u64, s: i64, t: i64, n: u64, method: u32, out: *mut u64) -> LaStatus {
    guard(|| {
        let f = match method {
            LA_METHOD_CLOSED => vp_atom_closed,
            LA_METHOD_MOBIUS => vp_atom_mobius,
            LA_METHOD_ORACLE => vp_atom_oracle,
            other => return Err(Failure::new(LaStatus::InvalidArgument, format!("unknown method {other}"))),
        };
        non_null(out, "out")?;
        *out = f(p, &LucasParams::new(s, t), n)?;
        Ok(())
    })
}

/// Rank of appearance of `p` in `U(s, t)`. When `p` divides no term,
/// `*out_defined` is false and `*out_rho` is 0.
///
/// # Safety
/// `out_rho` and `out_defined` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn la_rank_of_appearance(
    p: u64,
    s: i64,
    t: i64,
    out_rho: *mut u64,
    out_defined: *mut bool,
) -> LaStatus {
    guard(|| {
        non_null(out_rho, "out_rho")?;
        non_null(out_defined, "out_defined")?;
        let rank = rank_of_appearance(p, &LucasParams::new(s, t))?;
        *out_rho = rank.rho.unwrap_or(0);
        *out_defined = rank.rho.is_some();
        Ok(())
    })
}

/// Runs the command-line interface in process. `argv[0]` is the program
/// name. Captured output is returned through `out_stdout` and `out_stderr`
/// and the CLI exit code through `out_exit`.
///
/// # Safety
/// `argv` must point to `argc` valid NUL-terminated strings; the out
/// pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn la_run(
    argc: usize,
    argv: *const *const c_char,
    out_stdout: *mut *mut c_char,
    out_stderr: *mut *mut c_char,
    out_exit: *mut i32,
) -> LaStatus {
    guard(|| {
        non_null(out_stdout, "out_stdout")?;
        non_null(out_stderr, "out_stderr")?;
        non_null(out_exit, "out_exit")?;
        if argc > 0 {
            non_null(argv, "argv")?;
        }
        let mut args = Vec::with_capacity(argc);
        for i in 0..argc {
            let arg = *argv.add(i);
            non_null(arg, "argv entry")?;
            let text = CStr::from_ptr(arg)
                .to_str()
                .map_err(|_| Failure::new(LaStatus::InvalidArgument, format!("argv[{i}] is not UTF-8")))?;
            args.push(text.to_owned());
        }
        let mut stdout = Vec::new();
        let mut stderr = Vec::new();
        let code = lucas_atoms::cli::run(args, &mut stdout, &mut stderr);
        let text = |bytes: Vec<u8>| String::from_utf8_lossy(&bytes).into_owned();
        write_string(out_stdout, text(stdout))?;
        write_string(out_stderr, text(stderr))?;
        *out_exit = code;
        Ok(())
    })
}

/// Description of the last failure on this thread, or null after a
/// success. Valid until the next `la_*` call on the same thread.
#[no_mangle]
pub extern "C" fn la_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn la_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
