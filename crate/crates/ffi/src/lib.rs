//! C interface to the solver. Objects are opaque handles released with their `_free`
//! function; every call returns a `BurgersStatus`, and the message for the last failure on the
//! calling thread is available from `burgers_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use burgers_core::analytic::special;
use burgers_core::bench::{self, RunConfig, RunReport};
use burgers_core::cfd6::{self, ClosureCoefficient, Parity};
use burgers_core::pim::Propagator;
use burgers_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BurgersStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    Numerical = 4,
    Config = 5,
    Io = 6,
    Panic = 7,
}

/// Generator selector for `burgers_propagator_new`.
pub const BURGERS_KIND_PERIODIC: c_int = 0;
pub const BURGERS_KIND_CLOSURE: c_int = 1;
pub const BURGERS_KIND_REFLECT_EVEN: c_int = 2;
pub const BURGERS_KIND_REFLECT_ODD: c_int = 3;
pub const BURGERS_KIND_CLOSURE_INTERIOR: c_int = 4;

/// One-step propagator `exp(H tau)` for a single axis.
pub struct BurgersPropagator {
    inner: Propagator,
}

/// Result of one configured run.
pub struct BurgersReport {
    inner: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BurgersStatus {
    match e {
        Error::Stage { source, .. } => status_of(source),
        Error::Dimension(_) | Error::Size(_) => BurgersStatus::Dimension,
        Error::Domain(_) | Error::UnknownExample(_) => BurgersStatus::InvalidArgument,
        Error::Config(_) | Error::Json(_) => BurgersStatus::Config,
        Error::Io(_) => BurgersStatus::Io,
        _ => BurgersStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (BurgersStatus, String)>) -> BurgersStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BurgersStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BurgersStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (BurgersStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BurgersStatus, String) {
    (BurgersStatus::NullPointer, format!("{what} is null"))
}

/// Copies the last error message on this thread into `buf` (NUL terminated, truncated to
/// `len`). Returns the full message length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn burgers_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds the step propagator of an `n`-node generator of the given kind.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn burgers_propagator_new(
    n: usize,
    h: f64,
    omega: f64,
    tau: f64,
    bisection_order: u32,
    kind: c_int,
    out: *mut *mut BurgersPropagator,
) -> BurgersStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let gen = match kind {
            BURGERS_KIND_PERIODIC => {
                cfd6::assemble_periodic(n, h).and_then(|op| cfd6::form_generator(&op, omega))
            }
            BURGERS_KIND_CLOSURE => {
                cfd6::assemble_closure(n, h).and_then(|op| cfd6::form_generator(&op, omega))
            }
            BURGERS_KIND_REFLECT_EVEN => cfd6::reflect_generator(n, h, omega, Parity::Even),
            BURGERS_KIND_REFLECT_ODD => cfd6::reflect_generator(n, h, omega, Parity::Odd),
            BURGERS_KIND_CLOSURE_INTERIOR => {
                cfd6::closure_interior_generator(n, h, omega, ClosureCoefficient::Derived)
            }
            other => {
                return Err((
                    BurgersStatus::InvalidArgument,
                    format!("unknown generator kind {other}"),
                ))
            }
        }
        .map_err(core_err)?;
        let inner =
            Propagator::from_matrix(&gen.h_matrix, tau, bisection_order).map_err(core_err)?;
        *out = Box::into_raw(Box::new(BurgersPropagator { inner }));
        Ok(())
    })
}

/// Number of nodes the propagator acts on, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn burgers_propagator_dim(p: *const BurgersPropagator) -> usize {
    p.as_ref().map_or(0, |p| p.inner.dim())
}

/// `output = T * input` for vectors of length `len`, which must equal the propagator size.
/// `input` and `output` may alias.
///
/// # Safety
/// `p` must be a live handle; `input` and `output` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn burgers_propagator_apply(
    p: *const BurgersPropagator,
    input: *const f64,
    output: *mut f64,
    len: usize,
) -> BurgersStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("propagator"))?;
        if input.is_null() || output.is_null() {
            return Err(null("vector"));
        }
        if len != p.inner.dim() {
            return Err((
                BurgersStatus::Dimension,
                format!("vector length {len}, propagator size {}", p.inner.dim()),
            ));
        }
        let v = std::slice::from_raw_parts(input, len).to_vec();
        let r = p.inner.apply(&v).map_err(core_err)?;
        std::slice::from_raw_parts_mut(output, len).copy_from_slice(&r);
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn burgers_propagator_free(p: *mut BurgersPropagator) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the example described by a JSON configuration (absent keys take that example's
/// defaults).
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn burgers_run(
    config_json: *const c_char,
    out: *mut *mut BurgersReport,
) -> BurgersStatus {
    guard(|| {
        if config_json.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(config_json).to_str().map_err(|e| {
            (
                BurgersStatus::InvalidArgument,
                format!("config is not UTF-8: {e}"),
            )
        })?;
        let cfg = RunConfig::from_json(text).map_err(core_err)?;
        let inner = bench::run_example(&cfg).map_err(core_err)?;
        *out = Box::into_raw(Box::new(BurgersReport { inner }));
        Ok(())
    })
}

/// Velocity L-infinity error at the last sample time.
///
/// # Safety
/// `r` must be a live handle and `linf` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn burgers_report_linf(
    r: *const BurgersReport,
    linf: *mut f64,
) -> BurgersStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        if linf.is_null() {
            return Err(null("linf"));
        }
        *linf = r.inner.final_linf();
        Ok(())
    })
}

/// 1 if every configured assertion passed, 0 otherwise (or for a null handle).
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn burgers_report_passed(r: *const BurgersReport) -> c_int {
    r.as_ref().map_or(0, |r| r.inner.passed as c_int)
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn burgers_report_free(r: *mut BurgersReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Modified Bessel function of the first kind, `I_n(x)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn burgers_bessel_i(n: u32, x: f64, out: *mut f64) -> BurgersStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = special::bessel_i(n, x).map_err(core_err)?;
        Ok(())
    })
}
