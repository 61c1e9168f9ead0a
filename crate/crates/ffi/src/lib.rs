//! C interface.
//!
//! Every function returns a [`PmcStatus`] and writes results through out
//! pointers. Joints are passed as opaque [`PmcJoint`] handles created by a
//! constructor and released with [`pmc_joint_free`]. Leakage values are in
//! nats; an unbounded value is written as `+INFINITY`. After a non-zero
//! status, [`pmc_last_error`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pmc_core::bounds::{ldp_to_pmc, pmc_to_pml, pml_to_pmc};
use pmc_core::io::parse_mechanism;
use pmc_core::leakage::{pmc, pml, LevelReport};
use pmc_core::mechanisms::{
    extremal_mechanism, gaussian_pmc_bounds, gaussian_pmc_uniform, laplace_mean_sup_pmc,
    randomized_response, GaussianPerturb, InputLaw, LaplaceMean,
};
use pmc_core::{Channel, Error, Joint, Nats, Pmf};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    OutsideRegime = 3,
    UndefinedOutcome = 4,
    Numerical = 5,
    Parse = 6,
    Internal = 7,
}

/// Opaque finite joint distribution.
pub struct PmcJoint(Joint<f64>);

/// Aggregate leakage levels of a joint, in nats.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmcLevels {
    pub pml: f64,
    pub pmc: f64,
    pub lip: f64,
    pub alip_lower: f64,
    pub alip_upper: f64,
    pub ldp: f64,
    pub max_cost_leakage: f64,
    pub max_realizable_cost: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &Error) -> PmcStatus {
    match err {
        Error::OutsideHighPrivacy { .. } => PmcStatus::OutsideRegime,
        Error::UndefinedOutcome { .. } | Error::IndexOutOfRange { .. } => PmcStatus::UndefinedOutcome,
        Error::QuadratureFailure(_) | Error::SearchFailure(_) | Error::BudgetExceeded(_) => {
            PmcStatus::Numerical
        }
        Error::Parse { .. } => PmcStatus::Parse,
        _ => PmcStatus::InvalidInput,
    }
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), (PmcStatus, String)>) -> PmcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            PmcStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PmcStatus::Internal
        }
    }
}

trait Fallible<T> {
    fn status(self) -> Result<T, (PmcStatus, String)>;
}

impl<T> Fallible<T> for pmc_core::Result<T> {
    fn status(self) -> Result<T, (PmcStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (PmcStatus, String) {
    (PmcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], (PmcStatus, String)> {
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn joint<'a>(handle: *const PmcJoint) -> Result<&'a Joint<f64>, (PmcStatus, String)> {
    handle.as_ref().map(|h| &h.0).ok_or_else(|| null("joint"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (PmcStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn publish(out: *mut *mut PmcJoint, j: Joint<f64>) -> Result<(), (PmcStatus, String)> {
    write(out, Box::into_raw(Box::new(PmcJoint(j))), "out")
}

fn nats(v: &Nats) -> f64 {
    v.to_f64()
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pmc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a joint from a prior of length `n_x` and a row-major channel of
/// `n_x * n_y` entries.
///
/// # Safety
/// `prior` and `channel` must point to the stated number of doubles.
#[no_mangle]
pub unsafe extern "C" fn pmc_joint_new(
    prior: *const f64,
    n_x: usize,
    channel: *const f64,
    n_y: usize,
    out: *mut *mut PmcJoint,
) -> PmcStatus {
    guard(|| {
        let p = slice(prior, n_x, "prior")?;
        let c = slice(channel, n_x.saturating_mul(n_y), "channel")?;
        if n_y == 0 {
            return Err((PmcStatus::InvalidInput, "channel has no outputs".into()));
        }
        let rows = c.chunks(n_y).map(<[f64]>::to_vec).collect();
        let j = Joint::new(Pmf::new(p.to_vec()).status()?, Channel::new(rows).status()?).status()?;
        publish(out, j)
    })
}

/// Builds a joint from a finite mechanism document (explicit channel,
/// randomized response or extremal family).
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pmc_joint_from_json(json: *const c_char, out: *mut *mut PmcJoint) -> PmcStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (PmcStatus::Parse, e.to_string()))?;
        let j = parse_mechanism::<f64>(text).status()?.into_finite().status()?;
        publish(out, j)
    })
}

/// # Safety
/// `handle` must come from a constructor in this library and not be freed
/// twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pmc_joint_free(handle: *mut PmcJoint) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live joint.
#[no_mangle]
pub unsafe extern "C" fn pmc_joint_outputs(handle: *const PmcJoint, out: *mut usize) -> PmcStatus {
    guard(|| write(out, joint(handle)?.n_outputs(), "out"))
}

/// Pointwise maximal cost of outcome `y`.
///
/// # Safety
/// `handle` must be a live joint.
#[no_mangle]
pub unsafe extern "C" fn pmc_joint_pmc(handle: *const PmcJoint, y: usize, out: *mut f64) -> PmcStatus {
    guard(|| write(out, nats(&pmc(joint(handle)?, y).status()?), "out"))
}

/// Pointwise maximal leakage of outcome `y`.
///
/// # Safety
/// `handle` must be a live joint.
#[no_mangle]
pub unsafe extern "C" fn pmc_joint_pml(handle: *const PmcJoint, y: usize, out: *mut f64) -> PmcStatus {
    guard(|| write(out, nats(&pml(joint(handle)?, y).status()?), "out"))
}

/// # Safety
/// `handle` must be a live joint.
#[no_mangle]
pub unsafe extern "C" fn pmc_joint_levels(handle: *const PmcJoint, out: *mut PmcLevels) -> PmcStatus {
    guard(|| {
        let r = LevelReport::new(joint(handle)?);
        let levels = PmcLevels {
            pml: nats(&r.pml),
            pmc: nats(&r.pmc),
            lip: nats(&r.lip),
            alip_lower: nats(&r.alip[0]),
            alip_upper: nats(&r.alip[1]),
            ldp: nats(&r.ldp),
            max_cost_leakage: nats(&r.max_cost_leakage),
            max_realizable_cost: nats(&r.max_realizable_cost),
        };
        write(out, levels, "out")
    })
}

/// # Safety
/// Out pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmc_pml_to_pmc(eps_u: f64, p_min: f64, out: *mut f64) -> PmcStatus {
    guard(|| { write(out, nats(&pml_to_pmc(eps_u, p_min).status()?), "out") })
}

/// # Safety
/// Out pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmc_pmc_to_pml(eps_l: f64, p_min: f64, out: *mut f64) -> PmcStatus {
    guard(|| { write(out, pmc_to_pml(eps_l, p_min).status()?, "out") })
}

/// # Safety
/// Out pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmc_ldp_to_pmc(eps: f64, p_min: f64, out: *mut f64) -> PmcStatus {
    guard(|| { write(out, nats(&ldp_to_pmc(eps, p_min).status()?), "out") })
}

/// Randomized response on `n` symbols with parameter `eps`, under `prior`.
///
/// # Safety
/// `prior` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn pmc_randomized_response(
    prior: *const f64,
    n: usize,
    eps: f64,
    out: *mut *mut PmcJoint,
) -> PmcStatus {
    guard(|| {
        let p = Pmf::new(slice(prior, n, "prior")?.to_vec()).status()?;
        publish(out, Joint::new(p, randomized_response(n, eps).status()?).status()?)
    })
}

/// PML-optimal mechanism for `prior` at level `eps_u`.
///
/// # Safety
/// `prior` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn pmc_extremal_mechanism(
    prior: *const f64,
    n: usize,
    eps_u: f64,
    out: *mut *mut PmcJoint,
) -> PmcStatus {
    guard(|| {
        let p = Pmf::new(slice(prior, n, "prior")?.to_vec()).status()?;
        let ch = extremal_mechanism(&p, eps_u).status()?;
        publish(out, Joint::new(p, ch).status()?)
    })
}

/// Supremum of the PMC of a Laplace-noised mean of `n` samples uniform on
/// `[lo, hi]` with noise scale `b`.
///
/// # Safety
/// Out pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmc_laplace_sup_pmc(lo: f64, hi: f64, n: usize, b: f64, out: *mut f64) -> PmcStatus {
    guard(|| {
        let m = LaplaceMean::new(InputLaw::uniform(lo, hi).status()?, n, b).status()?;
        write(out, laplace_mean_sup_pmc(&m).status()?, "out")
    })
}

/// PMC at `y` of `X + N(0, sigma^2)` with `X` uniform on `[-amplitude, amplitude]`.
///
/// # Safety
/// Out pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmc_gaussian_pmc(amplitude: f64, sigma: f64, y: f64, out: *mut f64) -> PmcStatus {
    guard(|| {
        let m = GaussianPerturb::uniform(amplitude, sigma).status()?;
        write(out, gaussian_pmc_uniform(&m, y).status()?, "out")
    })
}

/// Closed-form lower and upper bounds on the Gaussian PMC at `y`.
///
/// # Safety
/// Out pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmc_gaussian_pmc_bounds(
    amplitude: f64,
    sigma: f64,
    y: f64,
    lower: *mut f64,
    upper: *mut f64,
) -> PmcStatus {
    guard(|| {
        let m = GaussianPerturb::uniform(amplitude, sigma).status()?;
        let (lo, hi) = gaussian_pmc_bounds(&m, y);
        write(lower, lo, "lower")?;
        write(upper, hi, "upper")
    })
}

/// Level report of a finite mechanism document, as a JSON string owned by
/// the caller and released with [`pmc_string_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pmc_analyze_json(json: *const c_char, out: *mut *mut c_char) -> PmcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mut handle = ptr::null_mut();
        let status = pmc_joint_from_json(json, &mut handle);
        if status != PmcStatus::Ok {
            let message = CStr::from_ptr(pmc_last_error()).to_string_lossy().into_owned();
            return Err((status, message));
        }
        let j = Box::from_raw(handle);
        let text = serde_json::to_string(&LevelReport::new(&j.0))
            .map_err(|e| (PmcStatus::Internal, e.to_string()))?;
        let c = CString::new(text).map_err(|e| (PmcStatus::Internal, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pmc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
