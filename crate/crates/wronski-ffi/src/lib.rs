//! C ABI over the core library: opaque handles, integer status codes, and
//! JSON-in/JSON-out entry points.
//!
//! Conventions shared by every function here:
//!
//! - Fallible calls return a [`WronskiStatus`]; [`WronskiStatus::Ok`] is zero,
//!   so C callers can treat any nonzero return as failure.
//! - On failure a thread-local message is recorded; fetch it with
//!   [`wronski_last_error`]. The pointer stays valid until the next failing
//!   call on the same thread.
//! - Strings handed back through `out` parameters are NUL-terminated UTF-8
//!   JSON allocated by this library; release them with
//!   [`wronski_string_free`]. Opaque space handles are released with
//!   [`wronski_space_free`]. Passing null to either free function is a no-op.
//!
//! The generated header lives at `include/wronski.h` and is refreshed on every
//! build of this crate.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wronski::bethe::{FormKind, TensorSpace};
use wronski::config::RunConfig;
use wronski::inverse::{GroupSpec, InverseProblem};
use wronski::poly::C64;
use wronski::quasiexp::{Mode, QuasiExpSpace};
use wronski::report;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WronskiStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An input document did not match the expected JSON shape.
    ParseError = 3,
    /// The computation itself reported an error.
    ComputeError = 4,
}

/// Opaque handle around a parsed quasi-exponential space.
pub struct WronskiSpace {
    inner: QuasiExpSpace,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: WronskiStatus, msg: impl Into<Vec<u8>>) -> WronskiStatus {
    let text = CString::new(msg).unwrap_or_else(|nul| {
        let mut bytes = nul.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("interior NUL bytes were just removed")
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
    status
}

/// Converts a caught-panic-or-error result into a status, writing the JSON
/// payload through `out` on success.
unsafe fn emit(
    out: *mut *mut c_char,
    result: std::thread::Result<Result<String, String>>,
) -> WronskiStatus {
    match result {
        Ok(Ok(json)) => match CString::new(json) {
            Ok(text) => {
                unsafe { *out = text.into_raw() };
                WronskiStatus::Ok
            }
            Err(_) => fail(WronskiStatus::ComputeError, "output contained a NUL byte"),
        },
        Ok(Err(msg)) => fail(WronskiStatus::ComputeError, msg),
        Err(_) => fail(WronskiStatus::ComputeError, "internal panic"),
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, WronskiStatus> {
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|e| fail(WronskiStatus::InvalidUtf8, e.to_string()))
}

/// Returns the message recorded by the most recent failing call on this
/// thread, or an empty string if nothing has failed yet.
///
/// The pointer is owned by the library and must not be freed; the next
/// failing call on the same thread invalidates it.
#[no_mangle]
pub extern "C" fn wronski_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string allocated by this library.
///
/// # Safety
/// `s` must be null or a pointer previously written through an `out`
/// parameter of this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wronski_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses a quasi-exponential space from its JSON description: `{"mode":
/// "multiplicative" | "exponent", "members": [{"base": [re, im], "poly":
/// [[re, im], ...]}, ...]}`, the same document the `wronski wronskian`
/// command reads. On success `*out` owns the new handle.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` must be valid for
/// a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn wronski_space_from_json(
    json: *const c_char,
    out: *mut *mut WronskiSpace,
) -> WronskiStatus {
    if json.is_null() || out.is_null() {
        return fail(WronskiStatus::NullArgument, "json and out must be non-null");
    }
    let text = match unsafe { read_str(json) } {
        Ok(t) => t,
        Err(status) => return status,
    };
    match serde_json::from_str::<QuasiExpSpace>(text) {
        Ok(space) => {
            unsafe { *out = Box::into_raw(Box::new(WronskiSpace { inner: space })) };
            WronskiStatus::Ok
        }
        Err(e) => fail(WronskiStatus::ParseError, e.to_string()),
    }
}

/// Releases a space handle.
///
/// # Safety
/// `space` must be null or a handle from [`wronski_space_from_json`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn wronski_space_free(space: *mut WronskiSpace) {
    if !space.is_null() {
        drop(unsafe { Box::from_raw(space) });
    }
}

/// Number of member functions in the space, or zero for a null handle.
///
/// # Safety
/// `space` must be null or a live handle from [`wronski_space_from_json`].
#[no_mangle]
pub unsafe extern "C" fn wronski_space_dimension(space: *const WronskiSpace) -> usize {
    if space.is_null() {
        return 0;
    }
    unsafe { &*space }.inner.dimension()
}

unsafe fn space_report<F>(
    space: *const WronskiSpace,
    out: *mut *mut c_char,
    compute: F,
) -> WronskiStatus
where
    F: FnOnce(&QuasiExpSpace) -> Result<String, String>,
{
    if space.is_null() || out.is_null() {
        return fail(WronskiStatus::NullArgument, "space and out must be non-null");
    }
    let inner = &unsafe { &*space }.inner;
    let result = catch_unwind(AssertUnwindSafe(|| compute(inner)));
    unsafe { emit(out, result) }
}

/// Evaluates the discrete Wronskian with the given step and writes the
/// factored result (`kappa`, `monic`, `prefactor`) as JSON to `*out`.
/// Multiplicative-mode spaces require `step == 1`.
///
/// # Safety
/// `space` must be a live handle from [`wronski_space_from_json`] and `out`
/// must be valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn wronski_discrete_wronskian(
    space: *const WronskiSpace,
    step: f64,
    out: *mut *mut c_char,
) -> WronskiStatus {
    unsafe {
        space_report(space, out, |s| {
            let value = s.discrete_wronskian(step).map_err(|e| e.to_string())?;
            report::json_string(&value).map_err(|e| e.to_string())
        })
    }
}

/// Evaluates the differential Wronskian (exponent-mode spaces only) and
/// writes the factored result as JSON to `*out`.
///
/// # Safety
/// `space` must be a live handle from [`wronski_space_from_json`] and `out`
/// must be valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn wronski_differential_wronskian(
    space: *const WronskiSpace,
    out: *mut *mut c_char,
) -> WronskiStatus {
    unsafe {
        space_report(space, out, |s| {
            let value = s.wronskian().map_err(|e| e.to_string())?;
            report::json_string(&value).map_err(|e| e.to_string())
        })
    }
}

#[derive(serde::Deserialize)]
struct ProblemSpec {
    mode: Mode,
    targets: Vec<[f64; 2]>,
    groups: Vec<GroupSpec>,
}

/// Recovers all spaces with the prescribed group structure whose Wronskian
/// has the target roots, writing the solution set as JSON to `*out`.
///
/// `problem_json` has the shape `{"mode": ..., "targets": [[re, im], ...],
/// "groups": [{"param": ..., "degrees": [...]}, ...]}`. `seed` drives the
/// random starts, `tol` is the residual acceptance threshold, and `starts`
/// bounds how many starts are attempted.
///
/// # Safety
/// `problem_json` must point to a NUL-terminated string and `out` must be
/// valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn wronski_solve_inverse(
    problem_json: *const c_char,
    seed: u64,
    tol: f64,
    starts: usize,
    out: *mut *mut c_char,
) -> WronskiStatus {
    if problem_json.is_null() || out.is_null() {
        return fail(
            WronskiStatus::NullArgument,
            "problem_json and out must be non-null",
        );
    }
    let text = match unsafe { read_str(problem_json) } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let spec: ProblemSpec = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => return fail(WronskiStatus::ParseError, e.to_string()),
    };
    let targets = spec.targets.iter().map(|t| C64::new(t[0], t[1])).collect();
    let problem = match InverseProblem::new(spec.mode, targets, spec.groups) {
        Ok(p) => p,
        Err(e) => return fail(WronskiStatus::ComputeError, e.to_string()),
    };
    let cfg = RunConfig {
        seed,
        tol,
        starts,
        jobs: None,
    };
    let result = catch_unwind(AssertUnwindSafe(|| {
        report::json_string(&problem.solve_inverse(&cfg)).map_err(|e| e.to_string())
    }));
    unsafe { emit(out, result) }
}

#[derive(serde::Serialize)]
struct BetheSummary {
    local_dim: usize,
    sites: usize,
    dim: usize,
    twist_block: Option<usize>,
    residue_residual: f64,
    commutation_residual: f64,
    symmetry_residual: f64,
    form: FormKind,
    symmetry_defect: f64,
    min_eig: f64,
    positive_definite: bool,
}

/// Builds the `sites`-fold tensor space with local dimension `local_dim`,
/// evaluation points `z`, and deformation parameters `q`; checks the residue,
/// commutation, and symmetry identities of its connection operators; and
/// certifies the bilinear form. A negative `twist` selects the untwisted
/// form, while `twist >= 0` selects the sign-corrected twist that splits the
/// first `twist` sites from the rest. The combined report is written as JSON
/// to `*out`.
///
/// # Safety
/// `z` must point to `z_len` readable doubles, `q` to `q_len` readable
/// doubles, and `out` must be valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn wronski_bethe_check(
    local_dim: usize,
    sites: usize,
    z: *const f64,
    z_len: usize,
    q: *const f64,
    q_len: usize,
    twist: isize,
    out: *mut *mut c_char,
) -> WronskiStatus {
    if z.is_null() || q.is_null() || out.is_null() {
        return fail(WronskiStatus::NullArgument, "z, q, and out must be non-null");
    }
    let z = unsafe { std::slice::from_raw_parts(z, z_len) }.to_vec();
    let q = unsafe { std::slice::from_raw_parts(q, q_len) }.to_vec();
    let result = catch_unwind(AssertUnwindSafe(move || -> Result<String, String> {
        let space = TensorSpace::new(local_dim, sites, z, q).map_err(|e| e.to_string())?;
        let res = space.identity_residuals().map_err(|e| e.to_string())?;
        let g_op = if twist < 0 {
            space.identity_op()
        } else {
            space.signed_twist_g(twist as usize).map_err(|e| e.to_string())?
        };
        let cert = space.certify_form(&g_op).map_err(|e| e.to_string())?;
        let summary = BetheSummary {
            local_dim,
            sites,
            dim: space.dim(),
            twist_block: (twist >= 0).then_some(twist as usize),
            residue_residual: res.residue,
            commutation_residual: res.commutation,
            symmetry_residual: res.symmetry,
            form: cert.kind,
            symmetry_defect: cert.symmetry_defect,
            min_eig: cert.min_eigenvalue,
            positive_definite: cert.positive_definite,
        };
        report::json_string(&summary).map_err(|e| e.to_string())
    }));
    unsafe { emit(out, result) }
}
