//! C ABI over `dynsync`.
//!
//! Every entry point returns a [`DsStatus`]. On failure the message is kept
//! per thread and can be read with [`ds_last_error`]. Handles are opaque and
//! must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dynsync::cli::ObservableName;
use dynsync::dynamics::{evolve_dense, Observable, TimeGrid, TimeSeries};
use dynsync::liouville::{build_superoperator, spectrum, ModeClass, SpectralDecomposition};
use dynsync::models::{product_state, HubbardParams, LindbladModel, ModelParams, SpinChainParams};
use dynsync::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Schema = 3,
    DenseCapExceeded = 4,
    Numerical = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsModeClass {
    Zero = 0,
    Imaginary = 1,
    Decaying = 2,
}

impl From<DsModeClass> for ModeClass {
    fn from(c: DsModeClass) -> Self {
        match c {
            DsModeClass::Zero => ModeClass::Zero,
            DsModeClass::Imaginary => ModeClass::Imaginary,
            DsModeClass::Decaying => ModeClass::Decaying,
        }
    }
}

/// A built Lindblad model.
pub struct DsModel {
    params: ModelParams,
    model: LindbladModel,
}

/// Liouvillian eigenvalues with their classification.
pub struct DsSpectrum {
    inner: SpectralDecomposition,
}

/// Observable columns sampled on a uniform grid.
pub struct DsTimeSeries {
    series: TimeSeries,
    labels: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(DsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::DenseCapExceeded { .. } => DsStatus::DenseCapExceeded,
            Error::Schema(_) | Error::Json(_) => DsStatus::Schema,
            Error::SiteOutOfRange { .. } => DsStatus::OutOfRange,
            Error::Eigensolver(_)
            | Error::Numerical(_)
            | Error::Positivity { .. }
            | Error::TraceDrift { .. }
            | Error::NormUnderflow { .. } => DsStatus::Numerical,
            _ => DsStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DsStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            DsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(DsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn finish_model(params: ModelParams, out: &mut *mut DsModel) -> Result<(), Fail> {
    let model = params.build()?;
    *out = Box::into_raw(Box::new(DsModel { params, model }));
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Spin-1 chain with per-site fields `omegas[0..n_sites]` and unit hopping.
///
/// # Safety
/// `omegas` must point to `n_sites` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_model_spin1_new(
    n_sites: usize,
    omegas: *const f64,
    anisotropy: f64,
    dephasing_rate: f64,
    out: *mut *mut DsModel,
) -> DsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let omegas = slice_arg(omegas, n_sites, "omegas")?.to_vec();
        let p = SpinChainParams { n_sites, omegas, hopping: 1.0, anisotropy, dephasing_rate };
        finish_model(ModelParams::Spin1(p), out)
    })
}

/// Hubbard chain with unit tunneling.
///
/// # Safety
/// `omegas` and `chem_potentials` must point to `n_sites` doubles each and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_model_hubbard_new(
    n_sites: usize,
    interaction: f64,
    omegas: *const f64,
    chem_potentials: *const f64,
    dephasing_rate: f64,
    out: *mut *mut DsModel,
) -> DsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = HubbardParams {
            n_sites,
            tunneling: 1.0,
            interaction,
            omegas: slice_arg(omegas, n_sites, "omegas")?.to_vec(),
            chem_potentials: slice_arg(chem_potentials, n_sites, "chem_potentials")?.to_vec(),
            dephasing_rate,
        };
        finish_model(ModelParams::Hubbard(p), out)
    })
}

/// Model from a JSON record such as
/// `{"kind":"spin1","n_sites":2,"omegas":[1,1],"anisotropy":0.5,"dephasing_rate":1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_model_from_json(json: *const c_char, out: *mut *mut DsModel) -> DsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(json, "json")?;
        let params: ModelParams = serde_json::from_str(text).map_err(|e| Fail(DsStatus::Schema, e.to_string()))?;
        finish_model(params, out)
    })
}

/// # Safety
/// `model` must be null or a handle from a `ds_model_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn ds_model_free(model: *mut DsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_model_hilbert_dim(model: *const DsModel, out: *mut usize) -> DsStatus {
    guard(|| {
        let m = handle(model, "model")?;
        *out_arg(out, "out")? = m.model.space().total_dim();
        Ok(())
    })
}

/// Full Liouvillian spectrum.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_compute(model: *const DsModel, out: *mut *mut DsSpectrum) -> DsStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let out = out_arg(out, "out")?;
        let inner = spectrum(&build_superoperator(&m.model))?.without_left_modes();
        *out = Box::into_raw(Box::new(DsSpectrum { inner }));
        Ok(())
    })
}

/// # Safety
/// `spec` must be null or a handle from [`ds_spectrum_compute`].
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_free(spec: *mut DsSpectrum) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_len(spec: *const DsSpectrum, out: *mut usize) -> DsStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(spec, "spectrum")?.inner.len();
        Ok(())
    })
}

/// Real and imaginary part of eigenvalue `index`.
///
/// # Safety
/// `spec` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_eigenvalue(
    spec: *const DsSpectrum,
    index: usize,
    re: *mut f64,
    im: *mut f64,
) -> DsStatus {
    guard(|| {
        let s = &handle(spec, "spectrum")?.inner;
        let re = out_arg(re, "re")?;
        let im = out_arg(im, "im")?;
        let v = s
            .eigenvalues
            .get(index)
            .ok_or_else(|| Fail(DsStatus::OutOfRange, format!("eigenvalue index {index} out of range {}", s.len())))?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Number of eigenvalues in `class`.
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_count(spec: *const DsSpectrum, class: DsModeClass, out: *mut usize) -> DsStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(spec, "spectrum")?.inner.count(class.into());
        Ok(())
    })
}

/// Dense evolution from the product state named by `labels` (one per site,
/// e.g. `"up"`, `"0"`, `"down"` for spin 1), recording `observable` on every
/// site over `n_steps` steps of `[0, t_end]`.
///
/// # Safety
/// `labels` must point to `n_labels` NUL-terminated strings, `observable` must
/// be NUL-terminated, `model` live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_evolve_dense(
    model: *const DsModel,
    labels: *const *const c_char,
    n_labels: usize,
    t_end: f64,
    n_steps: usize,
    observable: *const c_char,
    out: *mut *mut DsTimeSeries,
) -> DsStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let out = out_arg(out, "out")?;
        let raw = slice_arg(labels, n_labels, "labels")?;
        let labels = raw.iter().map(|&p| str_arg(p, "label")).collect::<Result<Vec<_>, _>>()?;
        let name = str_arg(observable, "observable")?;
        let obs: ObservableName = serde_json::from_value(serde_json::Value::String(name.into()))
            .map_err(|_| Fail(DsStatus::InvalidArgument, format!("unknown observable {name:?}")))?;

        let kind = m.params.local_kind();
        let n = m.params.n_sites();
        let rho0 = product_state(kind, &labels)?.projector();
        let observables = (0..n)
            .map(|j| Ok(Observable::new(format!("{}_{j}", obs.as_str()), obs.operator(kind, n, j)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let grid = TimeGrid::new(0.0, t_end, n_steps)?;
        let series = evolve_dense(&m.model, &rho0, &grid, &observables)?.series;
        let labels = series.labels.iter().map(|l| CString::new(l.as_str()).unwrap_or_default()).collect();
        *out = Box::into_raw(Box::new(DsTimeSeries { series, labels }));
        Ok(())
    })
}

/// # Safety
/// `ts` must be null or a handle from [`ds_evolve_dense`].
#[no_mangle]
pub unsafe extern "C" fn ds_timeseries_free(ts: *mut DsTimeSeries) {
    if !ts.is_null() {
        drop(Box::from_raw(ts));
    }
}

/// Number of time samples.
///
/// # Safety
/// `ts` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_timeseries_len(ts: *const DsTimeSeries, out: *mut usize) -> DsStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(ts, "timeseries")?.series.grid.len();
        Ok(())
    })
}

/// # Safety
/// `ts` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_timeseries_n_columns(ts: *const DsTimeSeries, out: *mut usize) -> DsStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(ts, "timeseries")?.series.labels.len();
        Ok(())
    })
}

/// Copies the sample times into `buf`, which holds `cap` doubles.
///
/// # Safety
/// `buf` must be writable for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ds_timeseries_times(ts: *const DsTimeSeries, buf: *mut f64, cap: usize) -> DsStatus {
    guard(|| {
        let t = handle(ts, "timeseries")?.series.times();
        copy_out(&t, buf, cap)
    })
}

/// Copies column `index` into `buf`, which holds `cap` doubles.
///
/// # Safety
/// `buf` must be writable for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ds_timeseries_column(
    ts: *const DsTimeSeries,
    index: usize,
    buf: *mut f64,
    cap: usize,
) -> DsStatus {
    guard(|| {
        let s = &handle(ts, "timeseries")?.series;
        let col = s
            .values
            .get(index)
            .ok_or_else(|| Fail(DsStatus::OutOfRange, format!("column {index} out of range {}", s.values.len())))?;
        copy_out(col, buf, cap)
    })
}

/// Label of column `index`; the pointer lives as long as `ts`.
///
/// # Safety
/// `ts` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_timeseries_label(ts: *const DsTimeSeries, index: usize, out: *mut *const c_char) -> DsStatus {
    guard(|| {
        let t = handle(ts, "timeseries")?;
        let out = out_arg(out, "out")?;
        let l = t
            .labels
            .get(index)
            .ok_or_else(|| Fail(DsStatus::OutOfRange, format!("column {index} out of range {}", t.labels.len())))?;
        *out = l.as_ptr();
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize) -> Result<(), Fail> {
    if cap < src.len() {
        return Err(Fail(DsStatus::OutOfRange, format!("buffer holds {cap}, need {}", src.len())));
    }
    if src.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}
