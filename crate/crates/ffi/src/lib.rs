//! C ABI for `orlicz-approx`.
//!
//! Objects cross the boundary as opaque handles created by `oa_*_new` and
//! released by the matching `oa_*_free`. Every fallible call returns an
//! [`OaStatus`]; on failure the message is available from [`oa_last_error`]
//! on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use orlicz_approx::bestapprox::best_approx;
use orlicz_approx::config::Experiment;
use orlicz_approx::psi::{psi_beta, psi_derivative, psi_integral, PsiPair, PsiSequence};
use orlicz_approx::smoothness::{modulus, ModulusQuery};
use orlicz_approx::theorems::{self, Verdict};
use orlicz_approx::weights::{ap_constant, ApVerdict, IntervalFamily};
use orlicz_approx::{
    Error, FunctionFamily, OrliczSpace, PeriodicFunction, UniformGrid, Weight, YoungFunction,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Hypothesis = 4,
    Numeric = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Verdict of a theorem run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OaVerdict {
    Bounded = 0,
    Growing = 1,
    Inconclusive = 2,
}

/// Opaque weighted Orlicz space.
pub struct OaSpace(OrliczSpace);

/// Opaque trigonometric polynomial.
pub struct OaFunction(PeriodicFunction);

/// Opaque ψ pair.
pub struct OaPsi(PsiPair);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Status(OaStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn status_of(e: &Error) -> OaStatus {
    match e {
        _ if e.is_hypothesis_failure() => OaStatus::Hypothesis,
        Error::Config { .. } | Error::Json(_) => OaStatus::Config,
        Error::InvalidArgument(_)
        | Error::InvalidStep(_)
        | Error::InvalidModulus(_)
        | Error::InvalidExponent(_) => OaStatus::InvalidArgument,
        _ => OaStatus::Numeric,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OaStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic in orlicz-approx");
            OaStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(OaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(OaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failure on this thread; empty if none. Owned by the
/// library and valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn oa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds `L_{M,ω}` from family strings such as `"power 2"` and `"const"`.
/// `grid_points = 0` selects the default grid.
///
/// # Safety
/// `young` and `weight` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_space_new(
    young: *const c_char,
    weight: *const c_char,
    grid_points: usize,
    out: *mut *mut OaSpace,
) -> OaStatus {
    guard(|| {
        let y = YoungFunction::from_str(text(young, "young")?)?;
        let w = Weight::from_str(text(weight, "weight")?)?;
        let grid = if grid_points == 0 {
            UniformGrid::default()
        } else {
            UniformGrid::new(grid_points)
        };
        let sp = OrliczSpace::new(y, w, grid)?;
        write(out, boxed(OaSpace(sp)), "out")
    })
}

/// # Safety
/// `sp` must come from [`oa_space_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn oa_space_free(sp: *mut OaSpace) {
    if !sp.is_null() {
        drop(Box::from_raw(sp));
    }
}

/// Polynomial `a0_half + Σ a[k−1] cos kx + b[k−1] sin kx`, `k = 1..=degree`.
///
/// # Safety
/// `a` and `b` must point to `degree` doubles each (may be null when `degree = 0`).
#[no_mangle]
pub unsafe extern "C" fn oa_function_new(
    a0_half: f64,
    a: *const f64,
    b: *const f64,
    degree: usize,
    out: *mut *mut OaFunction,
) -> OaStatus {
    guard(|| {
        let coeffs = if degree == 0 {
            Vec::new()
        } else {
            if a.is_null() || b.is_null() {
                return Err(null("coefficients"));
            }
            let a = std::slice::from_raw_parts(a, degree);
            let b = std::slice::from_raw_parts(b, degree);
            a.iter().copied().zip(b.iter().copied()).collect()
        };
        write(out, boxed(OaFunction(PeriodicFunction::new(a0_half, coeffs))), "out")
    })
}

/// Named family such as `"harmonic 3"` or `"poly-decay 2 8"`.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_function_from_family(
    family: *const c_char,
    out: *mut *mut OaFunction,
) -> OaStatus {
    guard(|| {
        let fam = FunctionFamily::from_str(text(family, "family")?)?;
        write(out, boxed(OaFunction(fam.build())), "out")
    })
}

/// Stored degree of `f`; 0 for a null handle.
///
/// # Safety
/// `f` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn oa_function_degree(f: *const OaFunction) -> usize {
    f.as_ref().map_or(0, |f| f.0.degree())
}

/// Copies `a0_half` and up to `cap` coefficient pairs out of `f`.
///
/// # Safety
/// `a` and `b` must have room for `cap` doubles; `a0_half` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_function_coeffs(
    f: *const OaFunction,
    a0_half: *mut f64,
    a: *mut f64,
    b: *mut f64,
    cap: usize,
) -> OaStatus {
    guard(|| {
        let f = &handle(f, "function")?.0;
        write(a0_half, f.a0_half, "a0_half")?;
        let n = cap.min(f.degree());
        if n > 0 && (a.is_null() || b.is_null()) {
            return Err(null("coefficient buffer"));
        }
        for (k, &(x, y)) in f.coeffs.iter().take(n).enumerate() {
            a.add(k).write(x);
            b.add(k).write(y);
        }
        Ok(())
    })
}

/// # Safety
/// `f` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn oa_function_free(f: *mut OaFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// ψ pair from a family such as `"power 2"` and the shift `beta`.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_psi_new(
    family: *const c_char,
    beta: f64,
    out: *mut *mut OaPsi,
) -> OaStatus {
    guard(|| {
        if !beta.is_finite() {
            return Err(Fail::Status(OaStatus::InvalidArgument, "beta must be finite".into()));
        }
        let seq = PsiSequence::from_str(text(family, "family")?)?;
        write(out, boxed(OaPsi(psi_beta(seq, beta))), "out")
    })
}

/// # Safety
/// `psi` must come from [`oa_psi_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn oa_psi_free(psi: *mut OaPsi) {
    if !psi.is_null() {
        drop(Box::from_raw(psi));
    }
}

/// Luxemburg norm of `f`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_luxemburg_norm(
    sp: *const OaSpace,
    f: *const OaFunction,
    out: *mut f64,
) -> OaStatus {
    guard(|| {
        let v = handle(sp, "space")?.0.luxemburg_norm(&handle(f, "function")?.0)?;
        write(out, v, "out")
    })
}

/// Amemiya (Orlicz) norm of `f`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_orlicz_norm(
    sp: *const OaSpace,
    f: *const OaFunction,
    out: *mut f64,
) -> OaStatus {
    guard(|| {
        let v = handle(sp, "space")?.0.orlicz_norm(&handle(f, "function")?.0)?;
        write(out, v, "out")
    })
}

/// `E_n(f)`; `minimizer` may be null, otherwise receives a new handle.
///
/// # Safety
/// Handles must be live; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_best_approx(
    sp: *const OaSpace,
    f: *const OaFunction,
    n: usize,
    value: *mut f64,
    minimizer: *mut *mut OaFunction,
) -> OaStatus {
    guard(|| {
        let r = best_approx(&handle(sp, "space")?.0, &handle(f, "function")?.0, n)?;
        write(value, r.value, "value")?;
        if !minimizer.is_null() {
            minimizer.write(boxed(OaFunction(r.minimizer)));
        }
        Ok(())
    })
}

/// ψ-derivative of `f` as a new handle.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_psi_derivative(
    f: *const OaFunction,
    psi: *const OaPsi,
    out: *mut *mut OaFunction,
) -> OaStatus {
    guard(|| {
        let d = psi_derivative(&handle(f, "function")?.0, &handle(psi, "psi")?.0)?;
        write(out, boxed(OaFunction(d)), "out")
    })
}

/// ψ-integral of `f` with constant term `a0`, as a new handle.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_psi_integral(
    f: *const OaFunction,
    psi: *const OaPsi,
    a0: f64,
    out: *mut *mut OaFunction,
) -> OaStatus {
    guard(|| {
        let g = psi_integral(&handle(f, "function")?.0, &handle(psi, "psi")?.0, a0);
        write(out, boxed(OaFunction(g)), "out")
    })
}

/// Modulus of smoothness `Ω_r(f; δ)`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_modulus(
    sp: *const OaSpace,
    f: *const OaFunction,
    r: usize,
    delta: f64,
    out: *mut f64,
) -> OaStatus {
    guard(|| {
        let q = ModulusQuery::new(r, delta)?;
        let v = modulus(&handle(sp, "space")?.0, &handle(f, "function")?.0, &q)?;
        write(out, v, "out")
    })
}

/// `A_p` constant estimate of a weight; `in_ap` is set when it stabilizes.
///
/// # Safety
/// `weight` must be a NUL-terminated string; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_ap_constant(
    weight: *const c_char,
    p: f64,
    seed: u64,
    constant: *mut f64,
    in_ap: *mut bool,
) -> OaStatus {
    guard(|| {
        let w = Weight::from_str(text(weight, "weight")?)?;
        let family = IntervalFamily {
            seed,
            ..IntervalFamily::default()
        };
        let rep = ap_constant(&w, p, &family)?;
        write(constant, rep.constant_estimate, "constant")?;
        write(in_ap, rep.verdict == ApVerdict::InAp, "in_ap")
    })
}

/// Runs the experiment in `config_json`. `report_json` may be null; otherwise
/// it receives the JSON report, to be released with [`oa_string_free`].
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oa_verify(
    config_json: *const c_char,
    verdict: *mut OaVerdict,
    report_json: *mut *mut c_char,
) -> OaStatus {
    guard(|| {
        let exp = Experiment::from_json(text(config_json, "config_json")?)?;
        let rep = theorems::run(&exp)?;
        let v = match rep.verdict {
            Verdict::Bounded => OaVerdict::Bounded,
            Verdict::Growing => OaVerdict::Growing,
            Verdict::Inconclusive => OaVerdict::Inconclusive,
        };
        write(verdict, v, "verdict")?;
        if !report_json.is_null() {
            let s = CString::new(theorems::to_json(&rep)?).unwrap_or_default();
            report_json.write(s.into_raw());
        }
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn oa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
