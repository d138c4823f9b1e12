//! C ABI over the `stekrob` solver.
//!
//! Handles are opaque and owned by the caller: every `*_new`/`*_from_*` or
//! `stekrob_solve` result must be released with the matching `*_free`.
//! Functions return a [`StekrobStatus`]; on failure the message is available
//! from [`stekrob_last_error`] on the same thread. Status values equal the
//! `stekrob` CLI exit codes where both exist.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stekrob::assembly::{assemble_pair, OperatorPair};
use stekrob::cli::CliError;
use stekrob::config::ProblemSpec;
use stekrob::eigensolver::{solve_pencil, Spectrum};
use stekrob::problem::Problem;
use stekrob::reference;
use stekrob::verify::run_battery;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StekrobStatus {
    Ok = 0,
    /// Assumption check failed (admissibility of the weights).
    Assumption = 2,
    /// Factorization or eigensolver failure.
    Solver = 3,
    /// Config could not be parsed or validated.
    Config = 4,
    /// At least one verification check failed.
    Verification = 5,
    /// Null pointer, bad UTF-8, index out of range or short buffer.
    InvalidArgument = 6,
    /// Internal panic caught at the boundary.
    Panic = 7,
}

/// Parsed problem: config plus mesh and weights.
pub struct StekrobProblem {
    spec: ProblemSpec,
    problem: Problem,
}

/// Solved eigenpairs for one problem.
pub struct StekrobSpectrum {
    pair: OperatorPair,
    spectrum: Spectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn fail(status: StekrobStatus, msg: impl Into<String>) -> StekrobStatus {
    set_error(msg);
    status
}

fn from_cli(e: CliError) -> StekrobStatus {
    let status = match e.exit_code() {
        2 => StekrobStatus::Assumption,
        3 => StekrobStatus::Solver,
        5 => StekrobStatus::Verification,
        _ => StekrobStatus::Config,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> StekrobStatus) -> StekrobStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == StekrobStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(StekrobStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, StekrobStatus> {
    if p.is_null() {
        return Err(fail(StekrobStatus::InvalidArgument, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(StekrobStatus::InvalidArgument, "string is not UTF-8"))
}

/// Message for the last failing call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn stekrob_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stekrob_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a JSON problem config. Relative mesh paths resolve against the
/// working directory.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stekrob_problem_from_json(json: *const c_char, out: *mut *mut StekrobProblem) -> StekrobStatus {
    guarded(|| {
        if out.is_null() {
            return fail(StekrobStatus::InvalidArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let built = ProblemSpec::from_json(text).and_then(|spec| Ok((spec.problem()?, spec)));
        match built {
            Ok((problem, spec)) => {
                *out = Box::into_raw(Box::new(StekrobProblem { spec, problem }));
                StekrobStatus::Ok
            }
            Err(e) => from_cli(e.into()),
        }
    })
}

/// # Safety
/// `problem` must come from [`stekrob_problem_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn stekrob_problem_free(problem: *mut StekrobProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of unknowns (`nodes · k`), or 0 for a null handle.
///
/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn stekrob_problem_dofs(problem: *const StekrobProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.problem.dofs())
}

/// Components per node, or 0 for a null handle.
///
/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn stekrob_problem_k(problem: *const StekrobProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.problem.k())
}

/// Assembles (behind the assumption gate) and solves for up to `n_eigs`
/// pairs; `n_eigs = 0` uses the config value.
///
/// # Safety
/// `problem` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stekrob_solve(
    problem: *const StekrobProblem,
    n_eigs: usize,
    out: *mut *mut StekrobSpectrum,
) -> StekrobStatus {
    guarded(|| {
        if out.is_null() {
            return fail(StekrobStatus::InvalidArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(p) = problem.as_ref() else {
            return fail(StekrobStatus::InvalidArgument, "null problem handle");
        };
        let count = if n_eigs == 0 { p.spec.n_eigs } else { n_eigs };
        let pair = match assemble_pair(&p.problem) {
            Ok((pair, _)) => pair,
            Err(e) => return from_cli(e.into()),
        };
        match solve_pencil(&pair, count, &p.spec.solve_options()) {
            Ok(spectrum) => {
                *out = Box::into_raw(Box::new(StekrobSpectrum { pair, spectrum }));
                StekrobStatus::Ok
            }
            Err(e) => from_cli(e.into()),
        }
    })
}

/// # Safety
/// `spectrum` must come from [`stekrob_solve`] or be null.
#[no_mangle]
pub unsafe extern "C" fn stekrob_spectrum_free(spectrum: *mut StekrobSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of returned eigenpairs, or 0 for a null handle.
///
/// # Safety
/// `spectrum` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn stekrob_spectrum_len(spectrum: *const StekrobSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.spectrum.len())
}

/// Number of deflated (weight-null) directions.
///
/// # Safety
/// `spectrum` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn stekrob_spectrum_kernel_dim(spectrum: *const StekrobSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.spectrum.kernel_dim)
}

/// Length of each eigenvector.
///
/// # Safety
/// `spectrum` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn stekrob_spectrum_dim(spectrum: *const StekrobSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.pair.dim())
}

unsafe fn copy_out(values: &[f64], out: *mut f64, len: usize) -> StekrobStatus {
    if out.is_null() {
        return fail(StekrobStatus::InvalidArgument, "null output buffer");
    }
    if len < values.len() {
        return fail(StekrobStatus::InvalidArgument, format!("buffer holds {len}, need {}", values.len()));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    StekrobStatus::Ok
}

/// Copies the ascending eigenvalues into `out` (capacity `len`).
///
/// # Safety
/// `spectrum` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn stekrob_spectrum_eigenvalues(
    spectrum: *const StekrobSpectrum,
    out: *mut f64,
    len: usize,
) -> StekrobStatus {
    guarded(|| match spectrum.as_ref() {
        Some(s) => copy_out(&s.spectrum.mus, out, len),
        None => fail(StekrobStatus::InvalidArgument, "null spectrum handle"),
    })
}

/// Copies the relative residuals into `out` (capacity `len`).
///
/// # Safety
/// `spectrum` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn stekrob_spectrum_residuals(
    spectrum: *const StekrobSpectrum,
    out: *mut f64,
    len: usize,
) -> StekrobStatus {
    guarded(|| match spectrum.as_ref() {
        Some(s) => copy_out(&s.spectrum.residuals, out, len),
        None => fail(StekrobStatus::InvalidArgument, "null spectrum handle"),
    })
}

/// Copies eigenvector `index` (0-based, node-major `node·k + component`).
///
/// # Safety
/// `spectrum` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn stekrob_spectrum_eigenvector(
    spectrum: *const StekrobSpectrum,
    index: usize,
    out: *mut f64,
    len: usize,
) -> StekrobStatus {
    guarded(|| {
        let Some(s) = spectrum.as_ref() else {
            return fail(StekrobStatus::InvalidArgument, "null spectrum handle");
        };
        if index >= s.spectrum.len() {
            return fail(
                StekrobStatus::InvalidArgument,
                format!("eigenvector {index} out of range for {} pairs", s.spectrum.len()),
            );
        }
        copy_out(&s.spectrum.vector(index), out, len)
    })
}

/// Runs the full verification battery. On `Ok` or `Verification`, `*out_json`
/// receives the report as JSON, to be released with [`stekrob_string_free`].
///
/// # Safety
/// `problem` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stekrob_verify(problem: *const StekrobProblem, out_json: *mut *mut c_char) -> StekrobStatus {
    guarded(|| {
        if out_json.is_null() {
            return fail(StekrobStatus::InvalidArgument, "null output pointer");
        }
        *out_json = ptr::null_mut();
        let Some(p) = problem.as_ref() else {
            return fail(StekrobStatus::InvalidArgument, "null problem handle");
        };
        let report = match run_battery(&p.problem, &p.spec.battery_settings()) {
            Ok(r) => r,
            Err(e) => return from_cli(e.into()),
        };
        let json = serde_json::to_string(&report).expect("report serializes");
        *out_json = CString::new(json).expect("json has no NUL").into_raw();
        if report.all_acceptable() {
            StekrobStatus::Ok
        } else {
            fail(StekrobStatus::Verification, format!("{} check(s) failed", report.failures().len()))
        }
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn stekrob_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Modified Bessel function `I_n(x)`.
#[no_mangle]
pub extern "C" fn stekrob_bessel_i(n: u32, x: f64) -> f64 {
    reference::bessel_i(n, x)
}

/// Exact Steklov eigenvalue of mode `n` on the unit disk (`A = 1`).
#[no_mangle]
pub extern "C" fn stekrob_disk_steklov_exact(n: u32) -> f64 {
    reference::disk_steklov_exact(n)
}

/// First `count` Robin eigenvalues of the unit square, with multiplicity.
///
/// # Safety
/// `out` must hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn stekrob_robin_square_spectrum(sigma: f64, count: usize, out: *mut f64) -> StekrobStatus {
    guarded(|| match reference::robin_square_spectrum(sigma, count) {
        Ok(values) => copy_out(&values, out, count),
        Err(e) => fail(StekrobStatus::InvalidArgument, e.to_string()),
    })
}
