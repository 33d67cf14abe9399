//! C interface to `tapmech`.
//!
//! Every fallible function returns a [`TapStatus`]; on failure the message is
//! available from [`tap_last_error`] on the same thread. Handles are opaque and
//! must be released with their `_free` function. Strings returned through out
//! parameters are owned by the caller and released with [`tap_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tapmech::mechanisms::{
    optimal_allocation, random_serial_dictatorship, rsd_expected_cost, serial_dictatorship, OptimalConfig,
    RsdMode,
};
use tapmech::{AgentOrder, Allocation, Instance, TapError};

/// Result codes of the C interface.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Infeasible = 5,
    BudgetExhausted = 6,
    TooLarge = 7,
    Io = 8,
    Panic = 99,
}

/// A parsed problem instance.
pub struct TapInstance {
    inner: Instance,
}

/// The outcome of a mechanism on an instance.
pub struct TapAllocation {
    inner: Allocation,
    instance: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &TapError) -> TapStatus {
    match err {
        TapError::Parse { .. } => TapStatus::Parse,
        TapError::Infeasible { .. }
        | TapError::Unreachable(_)
        | TapError::NoFeasibleAssignment
        | TapError::EmptyReactionSet(_) => TapStatus::Infeasible,
        TapError::BudgetExhausted(_) => TapStatus::BudgetExhausted,
        TapError::TooManyOrderings { .. } => TapStatus::TooLarge,
        TapError::Io(_) => TapStatus::Io,
        _ => TapStatus::InvalidInput,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), TapStatus>) -> TapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TapStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            TapStatus::Panic
        }
    }
}

fn fail(err: TapError) -> TapStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> TapStatus {
    set_error(format!("null pointer: {what}"));
    TapStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, TapStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        TapStatus::InvalidUtf8
    })
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, TapStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, TapStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn tap_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance from `tap 1` text.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tap_instance_parse(text: *const c_char, out: *mut *mut TapInstance) -> TapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inner = Instance::parse(str_arg(text, "text")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(TapInstance { inner }));
        Ok(())
    })
}

/// Reads an instance file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tap_instance_read(path: *const c_char, out: *mut *mut TapInstance) -> TapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inner = Instance::read(str_arg(path, "path")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(TapInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `inst` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tap_instance_free(inst: *mut TapInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of agents, or 0 for a NULL handle.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tap_instance_agent_count(inst: *const TapInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.agent_count())
}

/// Serialises the instance; free the result with [`tap_string_free`].
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tap_instance_to_text(inst: *const TapInstance, out: *mut *mut c_char) -> TapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(handle(inst, "inst")?.inner.to_text());
        Ok(())
    })
}

unsafe fn store(
    inst: &TapInstance,
    out: &mut *mut TapAllocation,
    result: tapmech::Result<Allocation>,
) -> Result<(), TapStatus> {
    let inner = result.map_err(fail)?;
    *out = Box::into_raw(Box::new(TapAllocation { inner, instance: inst.inner.clone() }));
    Ok(())
}

/// Serial dictatorship. `order` holds agent indices (0-based, a permutation
/// of length `len`); pass NULL for the natural order.
///
/// # Safety
/// `order` must be NULL or point to `len` readable values.
#[no_mangle]
pub unsafe extern "C" fn tap_serial_dictatorship(
    inst: *const TapInstance,
    order: *const usize,
    len: usize,
    out: *mut *mut TapAllocation,
) -> TapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inst = handle(inst, "inst")?;
        let n = inst.inner.agent_count();
        let order = if order.is_null() {
            AgentOrder::natural(n)
        } else {
            let slice = std::slice::from_raw_parts(order, len);
            AgentOrder::new(slice.to_vec(), n).map_err(fail)?
        };
        store(inst, out, serial_dictatorship(&inst.inner, &order))
    })
}

/// Serial dictatorship on a uniformly random order drawn from `seed`.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tap_random_serial_dictatorship(
    inst: *const TapInstance,
    seed: u64,
    out: *mut *mut TapAllocation,
) -> TapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inst = handle(inst, "inst")?;
        store(inst, out, random_serial_dictatorship(&inst.inner, seed))
    })
}

/// Minimum-cost feasible allocation. `node_budget` of 0 selects the default.
/// `certified` (optional) receives whether optimality was proven.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable; `certified` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn tap_optimal_allocation(
    inst: *const TapInstance,
    node_budget: u64,
    out: *mut *mut TapAllocation,
    certified: *mut bool,
) -> TapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inst = handle(inst, "inst")?;
        let mut config = OptimalConfig::default();
        if node_budget > 0 {
            config.node_budget = node_budget;
        }
        let outcome = optimal_allocation(&inst.inner, config).map_err(fail)?;
        if let Some(c) = certified.as_mut() {
            *c = outcome.certified;
        }
        store(inst, out, Ok(outcome.allocation))
    })
}

/// Expected social cost of random serial dictatorship: exact when `samples`
/// is 0, otherwise a Monte-Carlo estimate over `samples` orders.
///
/// # Safety
/// `inst` must be a live handle; `mean` must be writable; `stderr_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn tap_rsd_expected_cost(
    inst: *const TapInstance,
    samples: u32,
    seed: u64,
    mean: *mut f64,
    stderr_out: *mut f64,
) -> TapStatus {
    guard(|| {
        let inst = handle(inst, "inst")?;
        let mean = out_arg(mean, "mean")?;
        let mode = match samples {
            0 => RsdMode::Exact,
            trials => RsdMode::MonteCarlo { trials, seed },
        };
        let e = rsd_expected_cost(&inst.inner, mode).map_err(fail)?;
        *mean = e.mean;
        if let Some(s) = stderr_out.as_mut() {
            *s = e.stderr;
        }
        Ok(())
    })
}

/// # Safety
/// `alloc` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tap_allocation_free(alloc: *mut TapAllocation) {
    if !alloc.is_null() {
        drop(Box::from_raw(alloc));
    }
}

/// Social cost (sum of reaction costs); infinite if some agent has none.
///
/// # Safety
/// `alloc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tap_allocation_social_cost(alloc: *const TapAllocation, out: *mut f64) -> TapStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(alloc, "alloc")?.inner.social_cost();
        Ok(())
    })
}

/// Reaction cost of agent `agent` (0-based index).
///
/// # Safety
/// `alloc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tap_allocation_agent_cost(
    alloc: *const TapAllocation,
    agent: usize,
    out: *mut f64,
) -> TapStatus {
    guard(|| {
        let alloc = handle(alloc, "alloc")?;
        let out = out_arg(out, "out")?;
        let costs = alloc.inner.costs();
        match costs.get(agent) {
            Some(&c) => {
                *out = c;
                Ok(())
            }
            None => Err(fail(TapError::InvalidArgument(format!(
                "agent index {agent} out of range ({} agents)",
                costs.len()
            )))),
        }
    })
}

/// Serialises the allocation; free the result with [`tap_string_free`].
///
/// # Safety
/// `alloc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tap_allocation_to_text(
    alloc: *const TapAllocation,
    out: *mut *mut c_char,
) -> TapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let alloc = handle(alloc, "alloc")?;
        *out = into_c_string(alloc.inner.to_text(&alloc.instance));
        Ok(())
    })
}
