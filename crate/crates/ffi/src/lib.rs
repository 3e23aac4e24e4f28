//! C ABI for `opcontrast`.
//!
//! Objects are opaque heap handles created by `oc_*_new`/`oc_*_from_*` and
//! released with the matching `oc_*_free`. Every fallible call returns an
//! [`OcStatus`]; on failure a description is available from
//! [`oc_last_error_message`] on the same thread. Panics never cross the
//! boundary and are reported as [`OcStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use opcontrast::blocks::{delta_central_detail, delta_prime};
use opcontrast::contrast::{
    cone_member, delta, delta2, delta_inverse_formula, delta_power2, delta_product, delta_scan,
};
use opcontrast::image::michelson_contrast;
use opcontrast::text::{parse_hermitian, LoadError};
use opcontrast::{
    BlockOperator, CentralSearchConfig, ContrastPath, ContrastReport, Error, HermitianMatrix, RectMatrix,
    ScanConfig,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotHermitian = 3,
    NotPositive = 4,
    Singular = 5,
    DimensionMismatch = 6,
    Parse = 7,
    NonConvergence = 8,
    ZeroOperator = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcContrastPath {
    Spectral = 0,
    InverseFormula = 1,
    Scan = 2,
}

/// Contrast value with the spectral data it was computed from.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcContrastResult {
    pub value: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Minimizing scale; meaningful only when `has_optimal_scale` is true.
    pub optimal_scale: f64,
    pub has_optimal_scale: bool,
    pub singular: bool,
    pub path: OcContrastPath,
}

/// Hermitian matrix handle.
pub struct OcMatrix(HermitianMatrix);

/// Real rectangular matrix handle.
pub struct OcRectMatrix(RectMatrix);

/// Block operator under construction; blocks are appended with
/// [`oc_blocks_push`].
pub struct OcBlockOperator(Vec<HermitianMatrix>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(OcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotHermitian { .. } => OcStatus::NotHermitian,
            Error::NotPositive { .. } => OcStatus::NotPositive,
            Error::SingularMatrix { .. } => OcStatus::Singular,
            Error::DimensionMismatch { .. } | Error::ShapeMismatch { .. } | Error::StructureMismatch(_) => {
                OcStatus::DimensionMismatch
            }
            Error::NonConvergence { .. } | Error::EigenNonConvergence { .. } => OcStatus::NonConvergence,
            Error::ZeroOperator => OcStatus::ZeroOperator,
            Error::EmptyMatrix
            | Error::BadLength { .. }
            | Error::NonFinite { .. }
            | Error::InvalidArgument(_)
            | Error::EmptyInput => OcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Syntax(t) => Failure(OcStatus::Parse, t.to_string()),
            LoadError::Matrix(m) => m.into(),
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(OcStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            OcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            OcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn checked_len(a: usize, b: usize) -> Result<usize, Failure> {
    a.checked_mul(b)
        .ok_or_else(|| Failure(OcStatus::InvalidArgument, "dimension overflow".into()))
}

fn to_result(r: &ContrastReport) -> OcContrastResult {
    OcContrastResult {
        value: r.value,
        lambda_min: r.bounds.lo,
        lambda_max: r.bounds.hi,
        optimal_scale: r.optimal_scale.unwrap_or(0.0),
        has_optimal_scale: r.optimal_scale.is_some(),
        singular: r.singular,
        path: match r.path {
            ContrastPath::Spectral => OcContrastPath::Spectral,
            ContrastPath::InverseFormula => OcContrastPath::InverseFormula,
            ContrastPath::Scan => OcContrastPath::Scan,
        },
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn oc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null after a
/// successful call. Valid until the next `oc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn oc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a real symmetric matrix from `dim*dim` row-major entries.
///
/// # Safety
/// `data` must point to `dim*dim` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_matrix_from_real(dim: usize, data: *const f64, out: *mut *mut OcMatrix) -> OcStatus {
    guard(|| {
        let n = checked_len(dim, dim)?;
        let m = HermitianMatrix::from_real(dim, slice(data, n, "data")?.to_vec())?;
        write_out(out, Box::into_raw(Box::new(OcMatrix(m))))
    })
}

/// Builds a complex Hermitian matrix from row-major real and imaginary parts.
///
/// # Safety
/// `re` and `im` must each point to `dim*dim` readable doubles and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_matrix_from_complex(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut OcMatrix,
) -> OcStatus {
    guard(|| {
        let n = checked_len(dim, dim)?;
        let m = HermitianMatrix::from_complex(dim, slice(re, n, "re")?.to_vec(), slice(im, n, "im")?.to_vec())?;
        write_out(out, Box::into_raw(Box::new(OcMatrix(m))))
    })
}

/// Parses a matrix in the text file format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_matrix_from_text(text: *const c_char, out: *mut *mut OcMatrix) -> OcStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let src = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(OcStatus::Parse, format!("invalid UTF-8 at byte offset {}", e.valid_up_to())))?;
        let m = parse_hermitian(src)?;
        write_out(out, Box::into_raw(Box::new(OcMatrix(m))))
    })
}

/// # Safety
/// `m` must be null or a handle from an `oc_matrix_from_*` call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oc_matrix_free(m: *mut OcMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the matrix, 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oc_matrix_dim(m: *const OcMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_delta(m: *const OcMatrix, out: *mut OcContrastResult) -> OcStatus {
    guard(|| {
        let r = delta(&deref(m, "matrix")?.0)?;
        write_out(out, to_result(&r))
    })
}

/// Contrast by direct minimization over the scale, with default settings.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_delta_scan(m: *const OcMatrix, out: *mut OcContrastResult) -> OcStatus {
    guard(|| {
        let r = delta_scan(&deref(m, "matrix")?.0, &ScanConfig::default())?;
        write_out(out, to_result(&r))
    })
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_delta_inverse_formula(m: *const OcMatrix, out: *mut f64) -> OcStatus {
    guard(|| write_out(out, delta_inverse_formula(&deref(m, "matrix")?.0)?))
}

/// # Safety
/// `x`, `y` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_delta_product(x: *const OcMatrix, y: *const OcMatrix, out: *mut f64) -> OcStatus {
    guard(|| write_out(out, delta_product(&deref(x, "x")?.0, &deref(y, "y")?.0)?))
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_delta_power2(m: *const OcMatrix, out: *mut f64) -> OcStatus {
    guard(|| write_out(out, delta_power2(&deref(m, "matrix")?.0)?))
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_cone_member(m: *const OcMatrix, c: f64, slack: f64, out: *mut bool) -> OcStatus {
    guard(|| write_out(out, cone_member(&deref(m, "matrix")?.0, c, slack)?))
}

/// Builds a real `rows x cols` matrix from row-major entries.
///
/// # Safety
/// `data` must point to `rows*cols` readable doubles and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn oc_rect_from_real(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut OcRectMatrix,
) -> OcStatus {
    guard(|| {
        let n = checked_len(rows, cols)?;
        let m = RectMatrix::new(rows, cols, slice(data, n, "data")?.to_vec())?;
        write_out(out, Box::into_raw(Box::new(OcRectMatrix(m))))
    })
}

/// # Safety
/// `m` must be null or a handle from [`oc_rect_from_real`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oc_rect_free(m: *mut OcRectMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Contrast of the squared singular values.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_delta2(m: *const OcRectMatrix, out: *mut f64) -> OcStatus {
    guard(|| write_out(out, delta2(&deref(m, "matrix")?.0)?))
}

/// Michelson contrast of `len` nonnegative samples.
///
/// # Safety
/// `samples` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_michelson(samples: *const f64, len: usize, out: *mut f64) -> OcStatus {
    guard(|| write_out(out, michelson_contrast(slice(samples, len, "samples")?)?))
}

/// Empty block operator.
#[no_mangle]
pub extern "C" fn oc_blocks_new() -> *mut OcBlockOperator {
    Box::into_raw(Box::new(OcBlockOperator(Vec::new())))
}

/// # Safety
/// `b` must be null or a handle from [`oc_blocks_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oc_blocks_free(b: *mut OcBlockOperator) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Appends a copy of `m` as the next block. The block must be PSD.
///
/// # Safety
/// `b` and `m` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn oc_blocks_push(b: *mut OcBlockOperator, m: *const OcMatrix) -> OcStatus {
    guard(|| {
        let m = deref(m, "matrix")?.0.clone();
        BlockOperator::new(vec![m.clone()])?;
        b.as_mut().ok_or_else(|| null("block operator"))?.0.push(m);
        Ok(())
    })
}

/// Number of blocks, 0 for a null handle.
///
/// # Safety
/// `b` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oc_blocks_len(b: *const OcBlockOperator) -> usize {
    b.as_ref().map_or(0, |b| b.0.len())
}

unsafe fn block_operator(b: *const OcBlockOperator) -> Result<BlockOperator, Failure> {
    Ok(BlockOperator::new(deref(b, "block operator")?.0.clone())?)
}

/// Largest blockwise contrast.
///
/// # Safety
/// `b` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_blocks_delta_prime(b: *const OcBlockOperator, out: *mut f64) -> OcStatus {
    guard(|| write_out(out, delta_prime(&block_operator(b)?)?))
}

/// Contrast relative to the center, with default search settings. `scale`
/// may be null; it receives the minimizing scale, or 0 when every block is
/// zero.
///
/// # Safety
/// `b` must be a live handle, `out` writable, `scale` null or writable.
#[no_mangle]
pub unsafe extern "C" fn oc_blocks_delta_central(
    b: *const OcBlockOperator,
    out: *mut f64,
    scale: *mut f64,
) -> OcStatus {
    guard(|| {
        let r = delta_central_detail(&block_operator(b)?, &CentralSearchConfig::default())?;
        if !scale.is_null() {
            scale.write(r.scale.unwrap_or(0.0));
        }
        write_out(out, r.value)
    })
}
