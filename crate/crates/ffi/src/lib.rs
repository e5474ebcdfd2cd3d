//! C interface to the gmm-expansion estimators.
//!
//! Every function returns a [`GmxStatus`]; results go through out-pointers.
//! On failure the message for the calling thread is available from
//! [`gmx_last_error`]. Models are opaque [`GmxModel`] handles owned by the
//! caller and released with [`gmx_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gmm_expansion::learners::{
    build_grid, em_fit, fit_incremental, fit_one_iteration, EmConfig, OneIterationMode,
};
use gmm_expansion::metrics::{ipe, partition_for};
use gmm_expansion::{Error, GridGmm, ModelFile};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmxStatus {
    Ok = 0,
    InvalidParameter = 1,
    InvalidInput = 2,
    DegenerateRange = 3,
    NoMass = 4,
    NumericalUnderflow = 5,
    Parse = 6,
    Io = 7,
    Json = 8,
    NullPointer = 9,
    BufferTooSmall = 10,
    Unsupported = 11,
    Panic = 12,
}

/// Opaque model handle.
pub struct GmxModel {
    inner: ModelFile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(GmxStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidParameter(_) => GmxStatus::InvalidParameter,
            Error::InvalidInput(_) => GmxStatus::InvalidInput,
            Error::DegenerateRange { .. } => GmxStatus::DegenerateRange,
            Error::NoMass => GmxStatus::NoMass,
            Error::NumericalUnderflow(_) => GmxStatus::NumericalUnderflow,
            Error::Parse { .. } => GmxStatus::Parse,
            Error::Io(_) => GmxStatus::Io,
            Error::Json(_) => GmxStatus::Json,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: GmxStatus, msg: &str) -> Failure {
    Failure(status, msg.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GmxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GmxStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GmxStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(m: *const GmxModel) -> Result<&'a ModelFile, Failure> {
    m.as_ref()
        .map(|m| &m.inner)
        .ok_or_else(|| fail(GmxStatus::NullPointer, "model handle is null"))
}

unsafe fn grid_ref<'a>(m: *const GmxModel) -> Result<&'a GridGmm, Failure> {
    match model_ref(m)? {
        ModelFile::Grid(g) => Ok(g),
        _ => Err(fail(GmxStatus::Unsupported, "operation needs a grid model")),
    }
}

unsafe fn slice<'a>(data: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(fail(GmxStatus::NullPointer, "data pointer is null"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(GmxStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_model(out: *mut *mut GmxModel, inner: ModelFile) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(GmxStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(GmxModel { inner }));
    Ok(())
}

/// Copies `values` into `buf` if it holds `cap` elements; `out_len` always
/// receives the required length.
unsafe fn copy_out(
    values: &[f64],
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> Result<(), Failure> {
    write(out_len, values.len())?;
    if buf.is_null() || cap < values.len() {
        return Err(fail(
            GmxStatus::BufferTooSmall,
            &format!("buffer needs {} elements", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gmx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gmx_model_from_json(
    json: *const c_char,
    out: *mut *mut GmxModel,
) -> GmxStatus {
    guard(|| {
        if json.is_null() {
            return Err(fail(GmxStatus::NullPointer, "json is null"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| fail(GmxStatus::InvalidInput, "json is not UTF-8"))?;
        write_model(out, ModelFile::from_json(text)?)
    })
}

/// The returned string must be released with [`gmx_string_free`].
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gmx_model_to_json(
    model: *const GmxModel,
    out: *mut *mut c_char,
) -> GmxStatus {
    guard(|| {
        let text = model_ref(model)?.to_json()?;
        let c = CString::new(text).map_err(|_| fail(GmxStatus::Json, "json contains NUL"))?;
        write(out, c.into_raw())
    })
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn gmx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `model` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn gmx_model_free(model: *mut GmxModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gmx_model_dim(model: *const GmxModel, out: *mut usize) -> GmxStatus {
    guard(|| write(out, model_ref(model)?.dim()))
}

/// Component weights. Call with a null `buf` to learn the length.
///
/// # Safety
/// `buf` must hold `cap` doubles; `model` and `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gmx_model_weights(
    model: *const GmxModel,
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> GmxStatus {
    guard(|| {
        let weights: Vec<f64> = match model_ref(model)? {
            ModelFile::Grid(g) => g.weights().to_vec(),
            ModelFile::Free(f) => f.weights(),
            ModelFile::Target(t) => t.components().iter().map(|c| c.weight).collect(),
            ModelFile::Target2d(t) => t.components().iter().map(|c| c.weight).collect(),
        };
        copy_out(&weights, buf, cap, out_len)
    })
}

/// Density at a point of `dim` coordinates.
///
/// # Safety
/// `x` must hold `dim` doubles; `model` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gmx_model_pdf(
    model: *const GmxModel,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> GmxStatus {
    guard(|| {
        let m = model_ref(model)?;
        write(out, m.pdf(slice(x, dim)?)?)
    })
}

/// Probability of the interval `(a, b]` under a one-dimensional model.
///
/// # Safety
/// `model` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gmx_interval_prob(
    model: *const GmxModel,
    a: f64,
    b: f64,
    out: *mut f64,
) -> GmxStatus {
    guard(|| {
        let p = model_ref(model)?
            .as_interval_probability()
            .ok_or_else(|| fail(GmxStatus::Unsupported, "model is not one-dimensional"))?;
        write(out, p.interval_prob(a, b)?)
    })
}

/// Draws `n` points (row-major, `n * dim` values) into `buf`.
///
/// # Safety
/// `buf` must hold `cap` doubles; `model` and `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gmx_model_sample(
    model: *const GmxModel,
    n: usize,
    seed: u64,
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> GmxStatus {
    guard(|| {
        let m = model_ref(model)?;
        let need = n * m.dim();
        if buf.is_null() || cap < need {
            write(out_len, need)?;
            return Err(fail(
                GmxStatus::BufferTooSmall,
                &format!("buffer needs {need} elements"),
            ));
        }
        copy_out(&m.sample(n, seed)?, buf, cap, out_len)
    })
}

/// Uniform-weight grid scaffold over the range of one-dimensional data.
///
/// # Safety
/// `data` must hold `len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gmx_grid_build(
    data: *const f64,
    len: usize,
    units: usize,
    t: f64,
    out: *mut *mut GmxModel,
) -> GmxStatus {
    guard(|| write_model(out, build_grid(slice(data, len)?, units, t)?.into()))
}

/// Single-pass weight fit on a grid scaffold. Nonzero `exact` keeps the
/// prior term in the update.
///
/// # Safety
/// `scaffold` must be a live grid handle, `data` must hold `len` doubles
/// (`len / dim` points), and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gmx_fit_one_iteration(
    scaffold: *const GmxModel,
    data: *const f64,
    len: usize,
    exact: c_int,
    out: *mut *mut GmxModel,
) -> GmxStatus {
    guard(|| {
        let mode = if exact != 0 {
            OneIterationMode::Exact
        } else {
            OneIterationMode::Approximate
        };
        let fitted = fit_one_iteration(grid_ref(scaffold)?, slice(data, len)?, mode)?;
        write_model(out, fitted.into())
    })
}

/// Streaming fit on a one-dimensional grid scaffold. A non-positive or NaN
/// `d` selects the default window.
///
/// # Safety
/// As for [`gmx_fit_one_iteration`].
#[no_mangle]
pub unsafe extern "C" fn gmx_fit_incremental(
    scaffold: *const GmxModel,
    data: *const f64,
    len: usize,
    d: f64,
    out: *mut *mut GmxModel,
) -> GmxStatus {
    guard(|| {
        let d = (d > 0.0).then_some(d);
        let fitted = fit_incremental(grid_ref(scaffold)?, slice(data, len)?, d)?;
        write_model(out, fitted.into())
    })
}

/// EM with `k` free components started from an even grid. `tol = 0` runs
/// exactly `iters` iterations.
///
/// # Safety
/// `data` must hold `len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gmx_em_fit(
    data: *const f64,
    len: usize,
    k: usize,
    iters: usize,
    tol: f64,
    out: *mut *mut GmxModel,
) -> GmxStatus {
    guard(|| {
        let mut cfg = EmConfig::new(k, iters);
        cfg.tol = tol;
        let (model, _) = em_fit(slice(data, len)?, &cfg)?;
        write_model(out, model.into())
    })
}

/// Integrated probability error between two one-dimensional models over
/// `bins` equal bins spanning both supports.
///
/// # Safety
/// `f`, `g` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gmx_ipe(
    f: *const GmxModel,
    g: *const GmxModel,
    bins: usize,
    out: *mut f64,
) -> GmxStatus {
    guard(|| {
        let view = |m: *const GmxModel| -> Result<_, Failure> {
            model_ref(m)?
                .as_interval_probability()
                .ok_or_else(|| fail(GmxStatus::Unsupported, "model is not one-dimensional"))
        };
        let (f, g) = (view(f)?, view(g)?);
        let partition = partition_for(&f, &g, bins)?;
        write(out, ipe(&f, &g, &partition)?.value)
    })
}
