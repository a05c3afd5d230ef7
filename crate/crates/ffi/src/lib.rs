//! C ABI over `glassyjc`.
//!
//! Every fallible call returns a [`GjcStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be copied out
//! with [`gjc_last_error_message`]. Handles are opaque and must be released with
//! their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use glassyjc::coupled::{self, CoupledParams, Interaction};
use glassyjc::disorder::{DisorderKind, DisorderSpec, Estimator, QuenchEstimate, QuenchPlan};
use glassyjc::doublejc::{self, DoubleJcConfig, Family};
use glassyjc::entanglement::{concurrence_general, TwoQubitDensity};
use glassyjc::series::TimeSeries;
use glassyjc::singlejc::{self, SingleJcConfig};
use glassyjc::{Error, C64};
use nalgebra::Matrix4;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GjcStatus {
    Ok = 0,
    Validation = 1,
    Config = 2,
    Numerical = 3,
    Io = 4,
    NullPointer = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GjcKind {
    Gaussian = 0,
    Uniform = 1,
    Discrete = 2,
    Cauchy = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GjcEstimator {
    /// Mean for finite-variance kinds, median for Cauchy.
    Auto = 0,
    Mean = 1,
    Median = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GjcFamily {
    Psi = 0,
    Phi = 1,
}

/// Disorder law; a strength of zero means clean.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GjcDisorder {
    pub kind: GjcKind,
    pub strength: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GjcPlan {
    pub samples: u64,
    pub estimator: GjcEstimator,
    pub seed: u64,
    pub bootstrap_resamples: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GjcEstimate {
    pub value: f64,
    pub spread: f64,
}

/// Single-atom model with a fixed photon distribution.
pub struct GjcSingleJc(SingleJcConfig);

/// Coupled two-atom model parameters.
pub struct GjcCoupled(CoupledParams);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GjcStatus {
    match err {
        Error::Validation(_) => GjcStatus::Validation,
        Error::Config(_) => GjcStatus::Config,
        Error::Numerical { .. } => GjcStatus::Numerical,
        Error::Io(_) => GjcStatus::Io,
    }
}

#[derive(Debug)]
enum Fail {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GjcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GjcStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            GjcStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            GjcStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn kind(k: GjcKind) -> DisorderKind {
    match k {
        GjcKind::Gaussian => DisorderKind::Gaussian,
        GjcKind::Uniform => DisorderKind::Uniform,
        GjcKind::Discrete => DisorderKind::Discrete,
        GjcKind::Cauchy => DisorderKind::Cauchy,
    }
}

fn spec(d: GjcDisorder) -> Result<DisorderSpec, Fail> {
    Ok(DisorderSpec::new(kind(d.kind), d.strength)?)
}

fn plan(p: GjcPlan, specs: &[DisorderSpec]) -> Result<QuenchPlan, Fail> {
    let estimator = match p.estimator {
        GjcEstimator::Mean => Estimator::Mean,
        GjcEstimator::Median => Estimator::Median,
        GjcEstimator::Auto => {
            if specs.iter().any(|s| s.kind() == DisorderKind::Cauchy) {
                Estimator::Median
            } else {
                Estimator::Mean
            }
        }
    };
    let plan = QuenchPlan {
        samples: p.samples as usize,
        estimator,
        master_seed: p.seed,
        bootstrap_resamples: p.bootstrap_resamples as usize,
        ..QuenchPlan::default()
    };
    plan.validate_for(specs)?;
    Ok(plan)
}

fn family(f: GjcFamily) -> Family {
    match f {
        GjcFamily::Psi => Family::Psi,
        GjcFamily::Phi => Family::Phi,
    }
}

fn estimate(e: QuenchEstimate) -> GjcEstimate {
    GjcEstimate {
        value: e.estimate,
        spread: e.spread,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gjc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (always
/// NUL-terminated when `len > 0`) and returns the full message length, or 0
/// when there is none.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn gjc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates a single-atom model with a Gaussian photon distribution.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gjc_single_new(
    nbar: f64,
    dn: f64,
    g: f64,
    out_handle: *mut *mut GjcSingleJc,
) -> GjcStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let photons = singlejc::photon_weights(nbar, dn)?;
        let cfg = SingleJcConfig::new(g, photons)?;
        *slot = Box::into_raw(Box::new(GjcSingleJc(cfg)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`gjc_single_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gjc_single_free(h: *mut GjcSingleJc) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gjc_single_revival_period(h: *const GjcSingleJc, out_value: *mut f64) -> GjcStatus {
    guard(|| {
        let h = handle(h, "handle")?;
        *out(out_value, "out_value")? = singlejc::revival_period(&h.0);
        Ok(())
    })
}

/// Closed-form quenched inversion; Cauchy disorder yields `Config`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gjc_single_inversion(
    h: *const GjcSingleJc,
    disorder: GjcDisorder,
    t: f64,
    out_value: *mut f64,
) -> GjcStatus {
    guard(|| {
        let h = handle(h, "handle")?;
        let slot = out(out_value, "out_value")?;
        let s = spec(disorder)?;
        *slot = singlejc::inversion_closed_form(&h.0, &s, t)
            .ok_or_else(|| Error::Config("cauchy disorder has no closed form".into()))?;
        Ok(())
    })
}

/// Sampled quenched inversion.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gjc_single_inversion_quenched(
    h: *const GjcSingleJc,
    disorder: GjcDisorder,
    plan_: GjcPlan,
    t: f64,
    out_estimate: *mut GjcEstimate,
) -> GjcStatus {
    guard(|| {
        let h = handle(h, "handle")?;
        let slot = out(out_estimate, "out_estimate")?;
        let s = spec(disorder)?;
        let p = plan(plan_, &[s])?;
        *slot = estimate(singlejc::inversion_quenched_mc(&h.0, &s, &p, t)?);
        Ok(())
    })
}

/// Quenched atom-photon entanglement in ebits.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gjc_single_entanglement(
    h: *const GjcSingleJc,
    disorder: GjcDisorder,
    plan_: GjcPlan,
    t: f64,
    out_estimate: *mut GjcEstimate,
) -> GjcStatus {
    guard(|| {
        let h = handle(h, "handle")?;
        let slot = out(out_estimate, "out_estimate")?;
        let s = spec(disorder)?;
        *slot = if s.is_degenerate() {
            GjcEstimate {
                value: singlejc::ap_entanglement_clean(&h.0, t)?,
                spread: 0.0,
            }
        } else {
            let p = plan(plan_, &[s])?;
            estimate(singlejc::ap_entanglement_quenched(&h.0, &s, &p, t)?)
        };
        Ok(())
    })
}

/// Concurrence of one double-JC realization with coupling shifts `delta_a`, `delta_b`.
///
/// # Safety
/// `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gjc_double_concurrence(
    alpha: f64,
    g_a: f64,
    g_b: f64,
    fam: GjcFamily,
    delta_a: f64,
    delta_b: f64,
    t: f64,
    out_value: *mut f64,
) -> GjcStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        let cfg = DoubleJcConfig::new(alpha, g_a, g_b, family(fam))?;
        *slot = doublejc::concurrence_realization(&cfg, delta_a, delta_b, t);
        Ok(())
    })
}

/// Quenched double-JC concurrence at time `t`.
///
/// # Safety
/// `out_estimate` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gjc_double_concurrence_quenched(
    alpha: f64,
    g_a: f64,
    g_b: f64,
    fam: GjcFamily,
    disorder_a: GjcDisorder,
    disorder_b: GjcDisorder,
    plan_: GjcPlan,
    t: f64,
    out_estimate: *mut GjcEstimate,
) -> GjcStatus {
    guard(|| {
        let slot = out(out_estimate, "out_estimate")?;
        let cfg = DoubleJcConfig::new(alpha, g_a, g_b, family(fam))?;
        let (a, b) = (spec(disorder_a)?, spec(disorder_b)?);
        let p = plan(plan_, &[a, b])?;
        *slot = estimate(doublejc::concurrence_quenched(&cfg, &a, &b, &p, t)?);
        Ok(())
    })
}

/// Concurrence of a general two-qubit density matrix given row-major real
/// and imaginary parts (16 entries each).
///
/// # Safety
/// `re` and `im` must point to 16 doubles each.
#[no_mangle]
pub unsafe extern "C" fn gjc_concurrence_general(
    re: *const f64,
    im: *const f64,
    out_value: *mut f64,
) -> GjcStatus {
    guard(|| {
        let re = slice(re, 16, "re")?;
        let im = slice(im, 16, "im")?;
        let slot = out(out_value, "out_value")?;
        let m = nalgebra_matrix(re, im);
        *slot = concurrence_general(&TwoQubitDensity::new(m)?)?;
        Ok(())
    })
}

fn nalgebra_matrix(re: &[f64], im: &[f64]) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| C64::new(re[4 * i + j], im[4 * i + j]))
}

/// Creates a coupled model. `interaction` is 0 for Ising (`p1` = Jz, `p2`
/// ignored) or 1 for XY (`p1` = J, `p2` = gamma).
///
/// # Safety
/// `out_handle` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gjc_coupled_new(
    interaction: u32,
    p1: f64,
    p2: f64,
    g: f64,
    omega: f64,
    out_handle: *mut *mut GjcCoupled,
) -> GjcStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let interaction = match interaction {
            0 => Interaction::Ising { jz: p1 },
            1 => Interaction::Xy { j: p1, gamma: p2 },
            n => return Err(Error::Config(format!("unknown interaction code {n}")).into()),
        };
        let params = CoupledParams { g, omega, interaction };
        params.validate()?;
        *slot = Box::into_raw(Box::new(GjcCoupled(params)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`gjc_coupled_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gjc_coupled_free(h: *mut GjcCoupled) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Concurrence series of one coupled realization at `n` times.
///
/// # Safety
/// `times` and `out_values` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn gjc_coupled_concurrence(
    h: *const GjcCoupled,
    alpha: f64,
    delta_a: f64,
    delta_b: f64,
    times: *const f64,
    n: usize,
    out_values: *mut f64,
) -> GjcStatus {
    guard(|| {
        let h = handle(h, "handle")?;
        let times = slice(times, n, "times")?;
        if n > 0 && out_values.is_null() {
            return Err(Fail::Null("out_values"));
        }
        let v = coupled::coupled_concurrence_series(&h.0, alpha, delta_a, delta_b, times)?;
        if n > 0 {
            std::slice::from_raw_parts_mut(out_values, n).copy_from_slice(&v);
        }
        Ok(())
    })
}

/// Counts sudden-death intervals in a sampled concurrence series.
///
/// # Safety
/// `times` and `values` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn gjc_esd_count(
    times: *const f64,
    values: *const f64,
    n: usize,
    eps: f64,
    min_gap: f64,
    out_count: *mut usize,
) -> GjcStatus {
    guard(|| {
        let t = slice(times, n, "times")?;
        let v = slice(values, n, "values")?;
        let slot = out(out_count, "out_count")?;
        let series = TimeSeries::exact(t.to_vec(), v.to_vec())?;
        *slot = doublejc::detect_esd(&series, eps, min_gap)?.death_intervals.len();
        Ok(())
    })
}
