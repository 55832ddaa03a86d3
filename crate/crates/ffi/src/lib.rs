//! C ABI over `qwalk`.
//!
//! Fields cross the boundary as opaque `QwField` handles owned by the caller
//! and released with `qw_field_free`. Every entry point returns a `QwStatus`;
//! on failure `qw_last_error` gives a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qwalk::harness::{dispersive_ratio, homogeneous_ratio, AdmissiblePair, RatioRecord};
use qwalk::multiplier::{fractional_weight, littlewood_paley};
use qwalk::spectral::{dispersion, dispersion_derivatives, spectral_evolve};
use qwalk::walk::evolve;
use qwalk::{field_norm, make_state, Error, Exponent, SpinorField, StateKind, WalkParams};

/// Result codes shared by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidField = 3,
    TimeGrid = 4,
    Singularity = 5,
    DegenerateSymbol = 6,
    Shape = 7,
    AnnihilatorInverse = 8,
    NotAdmissible = 9,
    DegenerateInput = 10,
    BufferTooSmall = 11,
    Other = 98,
    Panic = 99,
}

impl From<&Error> for QwStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::ZeroTime | Error::Config(_) => {
                QwStatus::InvalidParameter
            }
            Error::InvalidField(_) => QwStatus::InvalidField,
            Error::TimeGrid { .. } => QwStatus::TimeGrid,
            Error::Singularity { .. } => QwStatus::Singularity,
            Error::DegenerateSymbol { .. } => QwStatus::DegenerateSymbol,
            Error::Shape(_) => QwStatus::Shape,
            Error::AnnihilatorInverse => QwStatus::AnnihilatorInverse,
            Error::NotAdmissible { .. } => QwStatus::NotAdmissible,
            Error::DegenerateInput(_) => QwStatus::DegenerateInput,
            _ => QwStatus::Other,
        }
    }
}

/// Opaque spinor field on the ring.
pub struct QwField(SpinorField);

/// p′, p″, p‴ of the dispersion relation.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QwDerivatives {
    pub first: f64,
    pub second: f64,
    pub third: f64,
}

/// One measured ratio. Absent values are NaN; an infinite exponent is INFINITY.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QwRatioRecord {
    pub delta: f64,
    pub mass: f64,
    pub lambda: f64,
    pub t_or_horizon: f64,
    pub p: f64,
    pub q: f64,
    pub ptilde: f64,
    pub qtilde: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub wrap_ok: bool,
    pub seed: u64,
}

fn exp_f64(e: Option<Exponent>) -> f64 {
    e.map(|e| e.as_f64()).unwrap_or(f64::NAN)
}

impl From<&RatioRecord> for QwRatioRecord {
    fn from(r: &RatioRecord) -> Self {
        Self {
            delta: r.delta,
            mass: r.mass,
            lambda: r.lambda.unwrap_or(f64::NAN),
            t_or_horizon: r.t_or_horizon,
            p: exp_f64(r.p),
            q: exp_f64(r.q),
            ptilde: exp_f64(r.ptilde),
            qtilde: exp_f64(r.qtilde),
            lhs: r.lhs,
            rhs: r.rhs,
            ratio: r.ratio,
            wrap_ok: r.wrap_ok,
            seed: r.seed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(QwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(QwStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QwStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QwStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            QwStatus::Panic
        }
    }
}

unsafe fn field_ref<'a>(f: *const QwField) -> Result<&'a SpinorField, Failure> {
    f.as_ref().map(|h| &h.0).ok_or_else(|| null("field"))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn give_field(out: *mut *mut QwField, f: SpinorField) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(Box::into_raw(Box::new(QwField(f))));
    Ok(())
}

fn exponent(v: f64) -> Result<Exponent, Failure> {
    if v == f64::INFINITY {
        Ok(Exponent::Infinite)
    } else {
        Ok(Exponent::finite(v)?)
    }
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// (1, 0) at lattice index `site` on a ring of `sites` points.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qw_field_new_impulse(
    delta: f64,
    mass: f64,
    sites: usize,
    site: i64,
    out: *mut *mut QwField,
) -> QwStatus {
    guard(|| {
        let u = make_state(
            StateKind::Impulse { site },
            WalkParams::new(delta, mass)?,
            sites,
        )?;
        give_field(out, u)
    })
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qw_field_new_gaussian(
    delta: f64,
    mass: f64,
    sites: usize,
    width: f64,
    carrier: f64,
    out: *mut *mut QwField,
) -> QwStatus {
    guard(|| {
        let u = make_state(
            StateKind::Gaussian { width, carrier },
            WalkParams::new(delta, mass)?,
            sites,
        )?;
        give_field(out, u)
    })
}

/// Seeded uniform entries on |j| <= radius; a negative radius fills the ring.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qw_field_new_random(
    delta: f64,
    mass: f64,
    sites: usize,
    seed: u64,
    radius: i64,
    out: *mut *mut QwField,
) -> QwStatus {
    guard(|| {
        let radius = usize::try_from(radius).ok();
        let u = make_state(
            StateKind::Random { seed, radius },
            WalkParams::new(delta, mass)?,
            sites,
        )?;
        give_field(out, u)
    })
}

/// Field from `4 * sites` doubles laid out per storage index as
/// (re u₁, im u₁, re u₂, im u₂); storage index i holds site i - sites/2.
///
/// # Safety
/// `values` must point to `4 * sites` readable doubles and `out` be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qw_field_from_values(
    delta: f64,
    mass: f64,
    sites: usize,
    values: *const f64,
    out: *mut *mut QwField,
) -> QwStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let raw = std::slice::from_raw_parts(values, 4 * sites);
        let spinors = raw
            .chunks_exact(4)
            .map(|c| [Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3])])
            .collect();
        give_field(
            out,
            SpinorField::from_values(WalkParams::new(delta, mass)?, spinors)?,
        )
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `f` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qw_field_free(f: *mut QwField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of ring sites, 0 for NULL.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qw_field_sites(f: *const QwField) -> usize {
    f.as_ref().map_or(0, |h| h.0.sites())
}

/// Copies the field into `4 * sites` doubles (layout as in `qw_field_from_values`).
///
/// # Safety
/// `f` must be a live handle and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qw_field_values(f: *const QwField, out: *mut f64, len: usize) -> QwStatus {
    guard(|| {
        let u = field_ref(f)?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        let need = 4 * u.sites();
        if len < need {
            return Err(Failure(
                QwStatus::BufferTooSmall,
                format!("need {need} doubles, got {len}"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (c, v) in dst.chunks_exact_mut(4).zip(u.values()) {
            c.copy_from_slice(&[v[0].re, v[0].im, v[1].re, v[1].im]);
        }
        Ok(())
    })
}

/// U(t)u by stepping; `wrap_ok` (may be NULL) receives the wrap-guard verdict.
///
/// # Safety
/// `f` must be a live handle, `out` valid for one pointer write, `wrap_ok` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qw_evolve(
    f: *const QwField,
    t: f64,
    out: *mut *mut QwField,
    wrap_ok: *mut bool,
) -> QwStatus {
    guard(|| {
        let ev = evolve(field_ref(f)?, t)?;
        if !wrap_ok.is_null() {
            wrap_ok.write(ev.wrap_guard_ok);
        }
        give_field(out, ev.field)
    })
}

/// U(t)u through the Fourier symbol; negative t allowed.
///
/// # Safety
/// `f` must be a live handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qw_spectral_evolve(
    f: *const QwField,
    t: f64,
    out: *mut *mut QwField,
) -> QwStatus {
    guard(|| give_field(out, spectral_evolve(field_ref(f)?, t)?))
}

/// l^p_δ norm; pass INFINITY for the sup norm.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_field_norm(f: *const QwField, p: f64, out: *mut f64) -> QwStatus {
    guard(|| write_out(out, field_norm(field_ref(f)?, exponent(p)?)?))
}

/// P_λu.
///
/// # Safety
/// `f` must be a live handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qw_littlewood_paley(
    f: *const QwField,
    lambda: f64,
    out: *mut *mut QwField,
) -> QwStatus {
    guard(|| give_field(out, littlewood_paley(field_ref(f)?, lambda)?.field))
}

/// |D|^a⟨D⟩^b u.
///
/// # Safety
/// `f` must be a live handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qw_fractional_weight(
    f: *const QwField,
    a: f64,
    b: f64,
    out: *mut *mut QwField,
) -> QwStatus {
    guard(|| give_field(out, fractional_weight(field_ref(f)?, a, b)?))
}

/// p_δ(ξ).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_dispersion(xi: f64, delta: f64, mass: f64, out: *mut f64) -> QwStatus {
    guard(|| write_out(out, dispersion(xi, WalkParams::new(delta, mass)?)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qw_dispersion_derivatives(
    xi: f64,
    delta: f64,
    mass: f64,
    out: *mut QwDerivatives,
) -> QwStatus {
    guard(|| {
        let d = dispersion_derivatives(xi, WalkParams::new(delta, mass)?)?;
        write_out(
            out,
            QwDerivatives {
                first: d.first,
                second: d.second,
                third: d.third,
            },
        )
    })
}

/// ‖U(t)P_λu‖_∞ / (λ^{1/3}⟨λ⟩t^{-1/3}‖u‖₁).
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_dispersive_ratio(
    f: *const QwField,
    lambda: f64,
    t: f64,
    out: *mut QwRatioRecord,
) -> QwStatus {
    guard(|| {
        write_out(
            out,
            QwRatioRecord::from(&dispersive_ratio(field_ref(f)?, lambda, t)?),
        )
    })
}

/// Homogeneous Strichartz ratio for a discrete admissible pair over [0, horizon].
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_homogeneous_ratio(
    f: *const QwField,
    p: f64,
    q: f64,
    horizon: f64,
    out: *mut QwRatioRecord,
) -> QwStatus {
    guard(|| {
        let pair = AdmissiblePair::discrete(exponent(p)?, exponent(q)?)?;
        write_out(
            out,
            QwRatioRecord::from(&homogeneous_ratio(field_ref(f)?, pair, horizon)?),
        )
    })
}
