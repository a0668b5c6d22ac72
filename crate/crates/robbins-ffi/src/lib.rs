//! C ABI over the robbins crate. Every function returns an [`RbStatus`];
//! results come back through out-pointers. Policies are opaque handles
//! created from the same string ids the CLI accepts.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use robbins::memoryless::ThresholdVector;
use robbins::oracle::QuadConfig;
use robbins::policy::Policy;
use robbins::{exact, memoryless, montecarlo, noinfo, oracle, registry, Error};

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbStatus {
    Ok = 0,
    InvalidInput = 1,
    NoConvergence = 2,
    NullPointer = 3,
    Panic = 4,
}

/// Opaque stopping policy handle.
pub struct RbPolicy {
    inner: Box<dyn Policy + Send + Sync>,
}

/// Monte Carlo estimate of a policy's expected rank.
#[repr(C)]
pub struct RbSimResult {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

fn status_of(err: &Error) -> RbStatus {
    match err {
        Error::InvalidInput(_) => RbStatus::InvalidInput,
        Error::NoConvergence { .. } => RbStatus::NoConvergence,
    }
}

fn guarded(f: impl FnOnce() -> RbStatus) -> RbStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(RbStatus::Panic)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> RbStatus {
    if out.is_null() {
        return RbStatus::NullPointer;
    }
    out.write(value);
    RbStatus::Ok
}

/// Builds a policy from a registry id such as "exact4" or "memoryless:10".
///
/// # Safety
/// `id` must be a valid NUL-terminated string and `out` a valid pointer.
/// The returned handle must be released with [`rb_policy_free`].
#[no_mangle]
pub unsafe extern "C" fn rb_policy_new(id: *const c_char, out: *mut *mut RbPolicy) -> RbStatus {
    if id.is_null() || out.is_null() {
        return RbStatus::NullPointer;
    }
    let Ok(id) = CStr::from_ptr(id).to_str() else {
        return RbStatus::InvalidInput;
    };
    guarded(|| match registry::build_policy(id) {
        Ok(registered) => {
            let handle = Box::new(RbPolicy {
                inner: registered.policy,
            });
            write_out(out, Box::into_raw(handle))
        }
        Err(e) => status_of(&e),
    })
}

/// Releases a handle from [`rb_policy_new`]. NULL is a no-op.
///
/// # Safety
/// `policy` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rb_policy_free(policy: *mut RbPolicy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

/// Number of observations the policy plays over.
///
/// # Safety
/// `policy` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rb_policy_horizon(policy: *const RbPolicy, out: *mut usize) -> RbStatus {
    let Some(policy) = policy.as_ref() else {
        return RbStatus::NullPointer;
    };
    write_out(out, policy.inner.horizon())
}

/// Acceptance threshold at `step` (1-based) given the `history_len`
/// already-rejected values in `history`.
///
/// # Safety
/// `policy` must be a live handle; `history` must point to `history_len`
/// doubles (may be NULL when `history_len` is 0); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rb_policy_threshold(
    policy: *const RbPolicy,
    step: usize,
    history: *const f64,
    history_len: usize,
    out: *mut f64,
) -> RbStatus {
    let Some(policy) = policy.as_ref() else {
        return RbStatus::NullPointer;
    };
    if history.is_null() && history_len > 0 {
        return RbStatus::NullPointer;
    }
    let history = if history_len == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(history, history_len)
    };
    if step < 1 || step > policy.inner.horizon() || history_len != step - 1 {
        return RbStatus::InvalidInput;
    }
    guarded(|| write_out(out, policy.inner.threshold(step, history)))
}

/// Deterministic Monte Carlo estimate of the policy's expected rank.
///
/// # Safety
/// `policy` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rb_simulate(
    policy: *const RbPolicy,
    trials: u64,
    seed: u64,
    out: *mut RbSimResult,
) -> RbStatus {
    let Some(policy) = policy.as_ref() else {
        return RbStatus::NullPointer;
    };
    guarded(
        || match montecarlo::evaluate(policy.inner.as_ref(), "ffi", trials, seed) {
            Ok(r) => write_out(
                out,
                RbSimResult {
                    mean: r.mean,
                    std_error: r.stderr,
                    trials: r.trials,
                    seed: r.seed,
                },
            ),
            Err(e) => status_of(&e),
        },
    )
}

/// Expected rank of a memoryless threshold vector (`thresholds[n-1]`
/// must be 1, entries nondecreasing in (0, 1]).
///
/// # Safety
/// `thresholds` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rb_expected_rank(
    thresholds: *const f64,
    n: usize,
    out: *mut f64,
) -> RbStatus {
    if thresholds.is_null() {
        return RbStatus::NullPointer;
    }
    let a = std::slice::from_raw_parts(thresholds, n).to_vec();
    guarded(|| match ThresholdVector::new(a) {
        Ok(tv) => write_out(out, memoryless::expected_rank(&tv)),
        Err(e) => status_of(&e),
    })
}

/// Optimal memoryless thresholds and value for horizon `n`; writes the
/// thresholds into the caller's length-`n` buffer.
///
/// # Safety
/// `thresholds_out` must point to `n` writable doubles; `value_out` must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn rb_optimize(
    n: usize,
    tol: f64,
    thresholds_out: *mut f64,
    value_out: *mut f64,
) -> RbStatus {
    if thresholds_out.is_null() || value_out.is_null() {
        return RbStatus::NullPointer;
    }
    guarded(|| match memoryless::optimize(n, tol) {
        Ok((tv, value)) => {
            let buf = std::slice::from_raw_parts_mut(thresholds_out, n);
            buf.copy_from_slice(tv.thresholds());
            write_out(value_out, value)
        }
        Err(e) => status_of(&e),
    })
}

/// Optimal value v(n) from the backward-induction oracle (n in 2..=5).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rb_value_v(n: usize, out: *mut f64) -> RbStatus {
    guarded(|| match oracle::value_v(n, &QuadConfig::default()) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    })
}

/// No-information benchmark W(n).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rb_w_value(n: usize, out: *mut f64) -> RbStatus {
    guarded(|| match noinfo::w_value(n) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    })
}

/// Step-2 threshold h2(x1) of the exact horizon-4 policy.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rb_h2(x1: f64, out: *mut f64) -> RbStatus {
    guarded(|| match exact::h2(x1) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    })
}

/// Step-3 threshold h3(x1, x2) of the exact horizon-4 policy.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rb_h3(x1: f64, x2: f64, out: *mut f64) -> RbStatus {
    guarded(|| match exact::h3(x1, x2) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    })
}

/// Minimizer-region label for the step-3 threshold; writes a pointer to
/// a static NUL-terminated string ("A1".."B3").
///
/// # Safety
/// `out` must be a valid pointer. The returned string must not be freed.
#[no_mangle]
pub unsafe extern "C" fn rb_classify_region(
    x1: f64,
    x2: f64,
    out: *mut *const c_char,
) -> RbStatus {
    guarded(|| match exact::classify_region(x1, x2) {
        Ok(region) => {
            let label: &'static [u8] = match region.label() {
                "A1" => b"A1\0",
                "A2" => b"A2\0",
                "B1" => b"B1\0",
                "B2" => b"B2\0",
                _ => b"B3\0",
            };
            write_out(out, label.as_ptr() as *const c_char)
        }
        Err(e) => status_of(&e),
    })
}
