//! C ABI over `rnd-core`.
//!
//! Instances cross the boundary as opaque `RndInstance` handles; every
//! other value is a NUL-terminated UTF-8 JSON string owned by the library
//! and released with `rnd_string_free`. Each call returns an `RndStatus`;
//! on failure `rnd_last_error` describes the most recent error on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rnd_core::cli::{solve_instance, Problem, SolveOptions};
use rnd_core::gadgets::{gen_gamma, gen_two_path, parse_dimacs};
use rnd_core::model::{validate, Instance};
use rnd_core::{Error, Rational};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RndStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Malformed = 3,
    Parse = 4,
    Json = 5,
    Precondition = 6,
    Infeasible = 7,
    Unbounded = 8,
    Budget = 9,
    Io = 10,
    Panic = 11,
}

/// Opaque instance handle.
pub struct RndInstance {
    inner: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(RndStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Malformed(_) => RndStatus::Malformed,
            Error::Parse { .. } => RndStatus::Parse,
            Error::Json(_) => RndStatus::Json,
            Error::Io(_) => RndStatus::Io,
            Error::Precondition(_) => RndStatus::Precondition,
            Error::Infeasible(_) => RndStatus::Infeasible,
            Error::Unbounded(_) => RndStatus::Unbounded,
            Error::DimensionCap { .. } | Error::Budget(_) | Error::IterationLimit { .. } => RndStatus::Budget,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|l| *l.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RndStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            RndStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RndStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(RndStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RndStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_ptr<'a, T>(p: *mut *mut T, what: &str) -> Result<&'a mut *mut T, Failure> {
    let out = p
        .as_mut()
        .ok_or_else(|| Failure(RndStatus::NullPointer, format!("{what} is null")))?;
    *out = ptr::null_mut();
    Ok(out)
}

fn rational(s: &str) -> Result<Rational, Failure> {
    s.parse::<Rational>()
        .map_err(|e| Failure(RndStatus::Parse, format!("bad rational `{s}`: {e}")))
}

fn give_string(s: String, out: &mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(RndStatus::Malformed, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn give_instance(inst: Instance, out: &mut *mut RndInstance) {
    *out = Box::into_raw(Box::new(RndInstance { inner: inst }));
}

unsafe fn instance<'a>(p: *const RndInstance) -> Result<&'a Instance, Failure> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(RndStatus::NullPointer, "instance is null".into()))
}

/// Message of the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rnd_last_error() -> *const c_char {
    LAST_ERROR.with(|l| l.borrow().as_ptr())
}

/// Parses and validates an instance from JSON.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rnd_instance_from_json(json: *const c_char, out: *mut *mut RndInstance) -> RndStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let inst = Instance::from_json(text(json, "json")?)?;
        let problems = validate(&inst);
        if !problems.is_empty() {
            return Err(Failure(RndStatus::Malformed, problems.join("; ")));
        }
        give_instance(inst, out);
        Ok(())
    })
}

/// # Safety
/// `inst` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rnd_instance_to_json(inst: *const RndInstance, out: *mut *mut c_char) -> RndStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        give_string(instance(inst)?.to_json(), out)
    })
}

/// Builds the recursive gadget from DIMACS text.
///
/// # Safety
/// `cnf` and `rho` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rnd_gen_gamma(
    cnf: *const c_char,
    rho: *const c_char,
    gamma: u32,
    out: *mut *mut RndInstance,
) -> RndStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let phi = parse_dimacs(text(cnf, "cnf")?)?;
        let inst = gen_gamma(&phi, &rational(text(rho, "rho")?)?, gamma)?;
        give_instance(inst, out);
        Ok(())
    })
}

/// Builds the two-path gadget from DIMACS text.
///
/// # Safety
/// `cnf` and `rho` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rnd_gen_two_path(
    cnf: *const c_char,
    rho: *const c_char,
    out: *mut *mut RndInstance,
) -> RndStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let phi = parse_dimacs(text(cnf, "cnf")?)?;
        let inst = gen_two_path(&phi, &rational(text(rho, "rho")?)?)?;
        give_instance(inst, out);
        Ok(())
    })
}

/// Solves `problem` (`cong-dyn`, `cong-static`, `cong-lagrange`, `lin-dyn`,
/// `lin-static`, `cong-one-path`) and writes the result JSON.
/// `options` is null or a JSON object with optional `lambda`, `alpha` and
/// `max_iters`.
///
/// # Safety
/// `inst` must come from this library; strings must be NUL-terminated;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rnd_solve(
    inst: *const RndInstance,
    problem: *const c_char,
    options: *const c_char,
    out: *mut *mut c_char,
) -> RndStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let inst = instance(inst)?;
        let problem: Problem = text(problem, "problem")?.parse()?;
        let opts = if options.is_null() {
            SolveOptions::default()
        } else {
            serde_json::from_str(text(options, "options")?).map_err(Error::from)?
        };
        let value = solve_instance(inst, problem, &opts)?;
        give_string(value.to_string(), out)
    })
}

/// # Safety
/// `inst` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn rnd_instance_free(inst: *mut RndInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn rnd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
