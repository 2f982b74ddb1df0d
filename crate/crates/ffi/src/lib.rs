//! C ABI over `mdf-core`.
//!
//! Matrices cross the boundary as row-major arrays of interleaved
//! `(re, im)` doubles, so an `n x n` matrix occupies `2 n^2` doubles.
//! Superoperators are `n^2 x n^2` in the state's eigenbasis, with pair
//! index `a * n + b`. Every fallible call returns an [`MdfStatus`]; the
//! message of the last failure on the calling thread is available from
//! [`mdf_last_error_message`].

use mdf_core::dirichlet::{dirichlet_operator, DirichletSpec, Engine};
use mdf_core::kernel::KernelFunction;
use mdf_core::linalg::CMat;
use mdf_core::lindblad::{induced_operator, LindbladSpec};
use mdf_core::modular::sigma;
use mdf_core::runner::run_scenario;
use mdf_core::scenario::Scenario;
use mdf_core::semigroup::spectral_gap;
use mdf_core::standard_form::{DensityMatrix, StandardForm};
use mdf_core::superop::SuperOperator;
use mdf_core::MdfError;
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MdfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimMismatch = 3,
    NotAState = 4,
    NotFaithful = 5,
    NotJReal = 6,
    NoConvergence = 7,
    Overflow = 8,
    QuadratureNotConverged = 9,
    NotAdmissible = 10,
    BalanceViolated = 11,
    NotSelfAdjoint = 12,
    EngineDisagreement = 13,
    DimensionTooLarge = 14,
    BufferTooSmall = 15,
    Panic = 16,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MdfKernel {
    F0 = 0,
    /// Uses the `scale` argument.
    Cauchy = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MdfEngine {
    ExactSpectral = 0,
    Quadrature = 1,
}

/// Opaque handle to a faithful state and its standard form.
pub struct MdfStandardForm {
    inner: StandardForm,
}

/// Opaque handle to a superoperator.
pub struct MdfSuperOperator {
    inner: SuperOperator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

impl From<&MdfError> for MdfStatus {
    fn from(e: &MdfError) -> Self {
        match e {
            MdfError::DimMismatch { .. } => Self::DimMismatch,
            MdfError::NotAState(_) => Self::NotAState,
            MdfError::NotFaithful { .. } => Self::NotFaithful,
            MdfError::NotJReal { .. } => Self::NotJReal,
            MdfError::NoConvergence { .. } => Self::NoConvergence,
            MdfError::Overflow { .. } => Self::Overflow,
            MdfError::QuadratureNotConverged(_) => Self::QuadratureNotConverged,
            MdfError::NotAdmissible(_) => Self::NotAdmissible,
            MdfError::BalanceViolated { .. } => Self::BalanceViolated,
            MdfError::NotSelfAdjoint { .. } => Self::NotSelfAdjoint,
            MdfError::EngineDisagreement { .. } => Self::EngineDisagreement,
            MdfError::DimensionTooLarge { .. } => Self::DimensionTooLarge,
            MdfError::InvalidInput(_) => Self::InvalidInput,
        }
    }
}

struct Failure(MdfStatus, String);

impl From<MdfError> for Failure {
    fn from(e: MdfError) -> Self {
        Failure(MdfStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MdfStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, records any failure and converts panics to a status.
fn guard<F: FnOnce() -> Result<(), Failure>>(body: F) -> MdfStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MdfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            MdfStatus::Panic
        }
    }
}

/// # Safety
/// `data` must point to `2 n^2` readable doubles.
unsafe fn read_matrix(data: *const f64, n: usize, what: &str) -> Result<CMat, Failure> {
    if data.is_null() {
        return Err(null(what));
    }
    let len = n
        .checked_mul(n)
        .and_then(|m| m.checked_mul(2))
        .ok_or_else(|| Failure(MdfStatus::InvalidInput, format!("dimension {n} overflows")))?;
    let raw = std::slice::from_raw_parts(data, len);
    Ok(CMat::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        Complex64::new(raw[k], raw[k + 1])
    }))
}

/// # Safety
/// `out` must point to `2 * m.len()` writable doubles.
unsafe fn write_matrix(m: &CMat, out: *mut f64) {
    let (rows, cols) = m.shape();
    let dst = std::slice::from_raw_parts_mut(out, 2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let k = 2 * (i * cols + j);
            dst[k] = m[(i, j)].re;
            dst[k + 1] = m[(i, j)].im;
        }
    }
}

fn kernel_from(kind: MdfKernel, scale: f64) -> Result<KernelFunction, Failure> {
    Ok(match kind {
        MdfKernel::F0 => KernelFunction::F0,
        MdfKernel::Cauchy => KernelFunction::cauchy(scale)?,
    })
}

fn boxed<T>(value: T, out: *mut *mut T) {
    // SAFETY: callers check `out` for null before building `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Builds the standard form of the density matrix `rho` (`n x n`).
///
/// # Safety
/// `rho` must point to `2 n^2` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdf_standard_form_new(n: usize, rho: *const f64, out: *mut *mut MdfStandardForm) -> MdfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if n == 0 {
            return Err(Failure(MdfStatus::InvalidInput, "dimension must be positive".into()));
        }
        let m = read_matrix(rho, n, "rho")?;
        let inner = StandardForm::new(DensityMatrix::new(m)?)?;
        boxed(MdfStandardForm { inner }, out);
        Ok(())
    })
}

/// Standard form of the normalized trace `I / n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdf_standard_form_tracial(n: usize, out: *mut *mut MdfStandardForm) -> MdfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = StandardForm::new(DensityMatrix::tracial(n)?)?;
        boxed(MdfStandardForm { inner }, out);
        Ok(())
    })
}

/// Dimension `n` of the algebra, or 0 for a null handle.
///
/// # Safety
/// `sf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mdf_standard_form_dim(sf: *const MdfStandardForm) -> usize {
    sf.as_ref().map_or(0, |s| s.inner.dim())
}

/// # Safety
/// `sf` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mdf_standard_form_free(sf: *mut MdfStandardForm) {
    if !sf.is_null() {
        drop(Box::from_raw(sf));
    }
}

/// Dirichlet operator `H` of the coefficient `x` and kernel.
///
/// `scale` is read only for [`MdfKernel::Cauchy`].
///
/// # Safety
/// `sf` must be live, `x` must point to `2 n^2` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdf_dirichlet_operator(
    sf: *const MdfStandardForm,
    x: *const f64,
    kernel: MdfKernel,
    scale: f64,
    engine: MdfEngine,
    out: *mut *mut MdfSuperOperator,
) -> MdfStatus {
    guard(|| {
        let sf = &sf.as_ref().ok_or_else(|| null("sf"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let x = read_matrix(x, sf.dim(), "x")?;
        let engine = match engine {
            MdfEngine::ExactSpectral => Engine::ExactSpectral,
            MdfEngine::Quadrature => Engine::Quadrature,
        };
        let spec = DirichletSpec::new(x, kernel_from(kernel, scale)?, engine)?;
        let inner = dirichlet_operator(&spec, sf)?;
        boxed(MdfSuperOperator { inner }, out);
        Ok(())
    })
}

/// Operator `H = i0 L i0^{-1}` induced by the Lindblad generator with jump
/// operators `ys` (`count` matrices stored back to back).
///
/// A null `q` selects the canonical drift built from the coefficients
/// `x_k = sigma_{i/4}(y_k)`.
///
/// # Safety
/// `ys` must point to `count * 2 n^2` doubles, `q` must be null or point to
/// `2 n^2` doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdf_induced_operator(
    sf: *const MdfStandardForm,
    ys: *const f64,
    count: usize,
    q: *const f64,
    out: *mut *mut MdfSuperOperator,
) -> MdfStatus {
    guard(|| {
        let sf = &sf.as_ref().ok_or_else(|| null("sf"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        if ys.is_null() {
            return Err(null("ys"));
        }
        let n = sf.dim();
        let ys = (0..count)
            .map(|k| read_matrix(ys.add(k * 2 * n * n), n, "ys"))
            .collect::<Result<Vec<_>, _>>()?;
        let spec = if q.is_null() {
            let xs = ys
                .iter()
                .map(|y| sigma(sf, y, Complex64::new(0.0, 0.25)))
                .collect::<Result<Vec<_>, _>>()?;
            LindbladSpec::from_coefficients(sf, xs, None)?
        } else {
            LindbladSpec::new(sf, ys, read_matrix(q, n, "q")?)?
        };
        let inner = induced_operator(&spec, sf)?;
        boxed(MdfSuperOperator { inner }, out);
        Ok(())
    })
}

/// Algebra dimension `n` the operator acts on (its matrix is `n^2 x n^2`),
/// or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mdf_superop_dim(op: *const MdfSuperOperator) -> usize {
    op.as_ref().map_or(0, |o| o.inner.n())
}

/// Copies the eigenbasis matrix into `out`, which holds `len` doubles
/// (at least `2 n^4`).
///
/// # Safety
/// `op` must be live and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mdf_superop_copy_matrix(op: *const MdfSuperOperator, out: *mut f64, len: usize) -> MdfStatus {
    guard(|| {
        let op = &op.as_ref().ok_or_else(|| null("op"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = op.matrix();
        let need = 2 * m.nrows() * m.ncols();
        if len < need {
            return Err(Failure(
                MdfStatus::BufferTooSmall,
                format!("need {need} doubles, got {len}"),
            ));
        }
        write_matrix(m, out);
        Ok(())
    })
}

/// Applies `op` to the matrix `x` given in the input basis; writes `2 n^2`
/// doubles to `out`.
///
/// # Safety
/// Handles must be live, `x` and `out` must each hold `2 n^2` doubles.
#[no_mangle]
pub unsafe extern "C" fn mdf_superop_apply(
    sf: *const MdfStandardForm,
    op: *const MdfSuperOperator,
    x: *const f64,
    out: *mut f64,
) -> MdfStatus {
    guard(|| {
        let sf = &sf.as_ref().ok_or_else(|| null("sf"))?.inner;
        let op = &op.as_ref().ok_or_else(|| null("op"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let x = read_matrix(x, sf.dim(), "x")?;
        let y = sf.apply_map(op, &x)?;
        write_matrix(&y, out);
        Ok(())
    })
}

/// Smallest positive eigenvalue (NaN when the operator is zero) and the
/// kernel dimension of a self-adjoint operator.
///
/// # Safety
/// `op` must be live; `gap` and `kernel_dim` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdf_spectral_gap(
    op: *const MdfSuperOperator,
    gap: *mut f64,
    kernel_dim: *mut usize,
) -> MdfStatus {
    guard(|| {
        let op = &op.as_ref().ok_or_else(|| null("op"))?.inner;
        if gap.is_null() || kernel_dim.is_null() {
            return Err(null("gap/kernel_dim"));
        }
        let g = spectral_gap(op)?;
        *gap = g.gap.unwrap_or(f64::NAN);
        *kernel_dim = g.kernel_dim;
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mdf_superop_free(op: *mut MdfSuperOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Runs every suite of a scenario given as JSON text.
///
/// A negative `seed` keeps the scenario's own seed. On success `report_out`
/// receives the JSON report (free it with [`mdf_string_free`]) and `passed`
/// whether every suite passed.
///
/// # Safety
/// `json` must be a NUL-terminated string; `report_out` and `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdf_run_scenario_json(
    json: *const c_char,
    seed: i64,
    report_out: *mut *mut c_char,
    passed: *mut bool,
) -> MdfStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if report_out.is_null() || passed.is_null() {
            return Err(null("report_out/passed"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(MdfStatus::InvalidInput, format!("scenario is not UTF-8: {e}")))?;
        let scenario = Scenario::from_json(text)?;
        let seed = u64::try_from(seed).ok();
        let report = run_scenario(&scenario, seed, None)?;
        let body =
            serde_json::to_string_pretty(&report).map_err(|e| Failure(MdfStatus::InvalidInput, e.to_string()))?;
        *passed = report.passed;
        *report_out = CString::new(body).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mdf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn mdf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mdf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
