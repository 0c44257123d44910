//! C ABI for the `beurling` library.
//!
//! Every fallible entry point returns a [`BgStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can
//! be read with [`bg_last_error`]. Systems and tables are opaque handles
//! owned by the caller and released with their `_free` functions.
//!
//! Rationals cross the boundary as [`BgRational`] (`num / den`, `den > 0`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use beurling::analytic;
use beurling::counting::{self, ClassCountQuery, Mode};
use beurling::measures;
use beurling::prime_systems::{classical_primes, PrimeSystem};
use beurling::semigroup::{self, EnumerateOptions, SemigroupTable, DEFAULT_MEM_CAP};
use beurling::{BeurlingError, Rational};
use num_complex::Complex64;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    NullPointer = 1,
    Invalid = 2,
    OutOfRange = 3,
    EmptySystem = 4,
    Resource = 5,
    Overflow = 6,
    Diagnostic = 7,
    Io = 8,
    Panic = 9,
}

/// Selects Ω (`BG_MODE_TOTAL`) or ω (`BG_MODE_DISTINCT`).
pub const BG_MODE_TOTAL: u32 = 0;
pub const BG_MODE_DISTINCT: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BgRational {
    pub num: u64,
    pub den: u64,
}

/// Opaque prime system handle.
pub struct BgSystem(PrimeSystem);

/// Opaque enumerated semigroup handle.
pub struct BgTable(SemigroupTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(BgStatus, String);

impl From<BeurlingError> for Failure {
    fn from(e: BeurlingError) -> Self {
        let status = match e {
            BeurlingError::EmptySystem(_) => BgStatus::EmptySystem,
            BeurlingError::OutOfRange { .. } => BgStatus::OutOfRange,
            BeurlingError::Invalid(_) => BgStatus::Invalid,
            BeurlingError::Resource { .. } => BgStatus::Resource,
            BeurlingError::Overflow(_) => BgStatus::Overflow,
            BeurlingError::Diagnostic(_) => BgStatus::Diagnostic,
            BeurlingError::Io(_) => BgStatus::Io,
            BeurlingError::Json(_) => BgStatus::Invalid,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(BgStatus::Invalid, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            BgStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(BgStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(BgStatus::NullPointer, format!("{what} is NULL")));
    }
    out.write(value);
    Ok(())
}

fn to_rational(r: BgRational) -> Result<Rational, Failure> {
    if r.den == 0 {
        return Err(invalid(format!(
            "rational {}/0 has a zero denominator",
            r.num
        )));
    }
    Ok(Rational::new(r.num as u128, r.den as u128))
}

fn to_mode(mode: u32) -> Result<Mode, Failure> {
    match mode {
        BG_MODE_TOTAL => Ok(Mode::Total),
        BG_MODE_DISTINCT => Ok(Mode::Distinct),
        m => Err(invalid(format!(
            "mode {m} is neither BG_MODE_TOTAL nor BG_MODE_DISTINCT"
        ))),
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Classical primes up to `limit`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_system_classical(
    limit: BgRational,
    out: *mut *mut BgSystem,
) -> BgStatus {
    guard(|| {
        let system = classical_primes(&to_rational(limit)?)?;
        write(out, boxed(BgSystem(system)), "out")
    })
}

/// Builds a system from the JSON spec format used by the command line tool.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_system_from_json(
    json: *const c_char,
    out: *mut *mut BgSystem,
) -> BgStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure(BgStatus::NullPointer, "json is NULL".into()));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| invalid(format!("json is not UTF-8: {e}")))?;
        let system = PrimeSystem::from_json_str(text)?;
        write(out, boxed(BgSystem(system)), "out")
    })
}

/// # Safety
/// `system` must be NULL or a handle from a `bg_system_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_system_free(system: *mut BgSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of primes, with multiplicity.
///
/// # Safety
/// `system` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_system_len(system: *const BgSystem, out: *mut usize) -> BgStatus {
    guard(|| write(out, deref(system, "system")?.0.len(), "out"))
}

/// `pi(x)`.
///
/// # Safety
/// `system` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_system_pi_count(
    system: *const BgSystem,
    x: BgRational,
    out: *mut u64,
) -> BgStatus {
    guard(|| {
        let n = deref(system, "system")?.0.pi_count(&to_rational(x)?)?;
        write(out, n, "out")
    })
}

/// Writes the density constant when the system has a closed form for it;
/// `*known` is set to 0 otherwise and `*out` is left untouched.
///
/// # Safety
/// `system` must be a live handle; `out` and `known` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_system_known_density(
    system: *const BgSystem,
    out: *mut f64,
    known: *mut i32,
) -> BgStatus {
    guard(|| {
        let density = deref(system, "system")?.0.known_density();
        write(known, i32::from(density.is_some()), "known")?;
        match density {
            Some(a) => write(out, a, "out"),
            None => Ok(()),
        }
    })
}

/// Enumerates every generalized integer up to `x_max`. `mem_cap = 0` uses
/// the library default.
///
/// # Safety
/// `system` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_table_enumerate(
    system: *const BgSystem,
    x_max: BgRational,
    mem_cap: u64,
    out: *mut *mut BgTable,
) -> BgStatus {
    guard(|| {
        let system = &deref(system, "system")?.0;
        let mem_cap = if mem_cap == 0 {
            DEFAULT_MEM_CAP
        } else {
            mem_cap
        };
        let table =
            semigroup::enumerate_with(system, &to_rational(x_max)?, EnumerateOptions { mem_cap })?;
        write(out, boxed(BgTable(table)), "out")
    })
}

/// # Safety
/// `table` must be NULL or a handle from [`bg_table_enumerate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_table_free(table: *mut BgTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of enumerated elements, including 1.
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_table_len(table: *const BgTable, out: *mut usize) -> BgStatus {
    guard(|| write(out, deref(table, "table")?.0.len(), "out"))
}

/// `N(x)`.
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_table_n_count(
    table: *const BgTable,
    x: BgRational,
    out: *mut u64,
) -> BgStatus {
    guard(|| {
        let n = deref(table, "table")?.0.n_count(&to_rational(x)?)?;
        write(out, n, "out")
    })
}

/// `S_{K,c}(x)`.
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_table_s_count(
    table: *const BgTable,
    k: u32,
    c: u32,
    mode: u32,
    x: BgRational,
    out: *mut u64,
) -> BgStatus {
    guard(|| {
        let table = &deref(table, "table")?.0;
        let query = ClassCountQuery::new(k, c, to_mode(mode)?)?;
        write(
            out,
            counting::s_count(table, &query, &to_rational(x)?)?,
            "out",
        )
    })
}

/// `F_q(x)` as real and imaginary parts.
///
/// # Safety
/// `table` must be a live handle; `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_table_f_q(
    table: *const BgTable,
    q: u32,
    k: u32,
    mode: u32,
    x: BgRational,
    re: *mut f64,
    im: *mut f64,
) -> BgStatus {
    guard(|| {
        let table = &deref(table, "table")?.0;
        let v = counting::f_q_sum(table, q, k, to_mode(mode)?, &to_rational(x)?)?;
        write(re, v.re, "re")?;
        write(im, v.im, "im")
    })
}

/// Truncated zeta `sum_{n <= x} n^(-s)` at `s = sigma + i t`.
///
/// # Safety
/// `table` must be a live handle; `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_zeta_truncated(
    table: *const BgTable,
    sigma: f64,
    t: f64,
    x: BgRational,
    re: *mut f64,
    im: *mut f64,
) -> BgStatus {
    guard(|| {
        let table = &deref(table, "table")?.0;
        let v = analytic::zeta_truncated(table, Complex64::new(sigma, t), &to_rational(x)?)?;
        write(re, v.value.re, "re")?;
        write(im, v.value.im, "im")
    })
}

/// `(sigma - 1) zeta_x(sigma)` with the integral tail added.
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_density_control(
    table: *const BgTable,
    sigma: f64,
    x: BgRational,
    out: *mut f64,
) -> BgStatus {
    guard(|| {
        let table = &deref(table, "table")?.0;
        write(
            out,
            analytic::density_control(table, sigma, &to_rational(x)?)?,
            "out",
        )
    })
}

/// Largest atom discrepancy between `exp*(w dPi)` and the enumerated `dF_q`.
///
/// # Safety
/// `system` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bg_verify_fq_reconstruction(
    system: *const BgSystem,
    q: u32,
    k: u32,
    mode: u32,
    x_max: BgRational,
    out: *mut f64,
) -> BgStatus {
    guard(|| {
        let system = &deref(system, "system")?.0;
        let r =
            measures::verify_fq_reconstruction(system, q, k, to_mode(mode)?, &to_rational(x_max)?)?;
        write(out, r.max_discrepancy, "out")
    })
}

/// `M - 1 - M cos(x) + cos(K x)`.
#[no_mangle]
pub extern "C" fn bg_trig_lhs(x: f64, k: u32, m: f64) -> f64 {
    analytic::trig_lhs(x, k, m)
}
