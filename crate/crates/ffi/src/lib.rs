//! C interface to `lemwedge`.
//!
//! Objects are opaque handles created by `*_new` and released by `*_free`.
//! Every fallible call returns a [`LwStatus`]; outputs are written through
//! pointers only on `LW_STATUS_OK` unless a function says otherwise.  Panics are
//! caught at the boundary and reported as `LW_STATUS_PANIC`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lemwedge::farfield::FarField;
use lemwedge::reconstruct::SpectralSolution;
use lemwedge::residues::CoefficientSource;
use lemwedge::{Error, WedgeConfig};
use num_complex::Complex64;

/// Status codes; one per error kind of the library plus interface errors.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwStatus {
    Ok = 0,
    NullPointer = 1,
    IndexOutOfRange = 2,
    Panic = 3,
    PoleAtLattice = 10,
    NotOnCubic = 11,
    NoConvergence = 12,
    DivisionNearZero = 13,
    BranchPoint = 14,
    UniformizationPole = 15,
    UnitModulusRoot = 16,
    DegenerateEps = 17,
    DoubleRoot = 18,
    ZeroOrbitDerivative = 19,
    SingularModeMatrix = 20,
    ShiftSingularity = 21,
    EvaluationAtPole = 22,
    IncidentPole = 23,
    NearPoleDirection = 24,
    ExtrapolationUnstable = 25,
    InvalidConfig = 26,
    NonFiniteOutput = 27,
}

impl From<&Error> for LwStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::PoleAtLattice { .. } => LwStatus::PoleAtLattice,
            Error::NotOnCubic { .. } => LwStatus::NotOnCubic,
            Error::NoConvergence { .. } => LwStatus::NoConvergence,
            Error::DivisionNearZero { .. } => LwStatus::DivisionNearZero,
            Error::BranchPoint { .. } => LwStatus::BranchPoint,
            Error::UniformizationPole { .. } => LwStatus::UniformizationPole,
            Error::UnitModulusRoot { .. } => LwStatus::UnitModulusRoot,
            Error::DegenerateEps { .. } => LwStatus::DegenerateEps,
            Error::DoubleRoot { .. } => LwStatus::DoubleRoot,
            Error::ZeroOrbitDerivative { .. } => LwStatus::ZeroOrbitDerivative,
            Error::SingularModeMatrix { .. } => LwStatus::SingularModeMatrix,
            Error::ShiftSingularity { .. } => LwStatus::ShiftSingularity,
            Error::EvaluationAtPole { .. } => LwStatus::EvaluationAtPole,
            Error::IncidentPole { .. } => LwStatus::IncidentPole,
            Error::NearPoleDirection { .. } => LwStatus::NearPoleDirection,
            Error::ExtrapolationUnstable { .. } => LwStatus::ExtrapolationUnstable,
            Error::InvalidConfig(_) => LwStatus::InvalidConfig,
            Error::NonFiniteOutput(_) => LwStatus::NonFiniteOutput,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LwComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for LwComplex {
    fn from(z: Complex64) -> Self {
        LwComplex { re: z.re, im: z.im }
    }
}

impl From<LwComplex> for Complex64 {
    fn from(z: LwComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Pole point and coefficients of one scattered label.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LwResidue {
    pub m: u8,
    pub sigma: i8,
    pub eps_w: i8,
    pub t: LwComplex,
    pub y: LwComplex,
    pub u: LwComplex,
    pub r_i: LwComplex,
    pub alpha: LwComplex,
    pub beta: LwComplex,
    pub c: LwComplex,
    pub d: LwComplex,
}

/// Opaque spectral solution for one (θ_i, ε, k₀).
pub struct LwSolution {
    inner: SpectralSolution,
}

/// Opaque far-field evaluator for one (θ_i, k₀).
pub struct LwFarField {
    inner: FarField,
}

fn guard(f: impl FnOnce() -> LwStatus) -> LwStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(LwStatus::Panic)
}

fn config(theta_i: f64, eps: f64, k0: f64) -> WedgeConfig {
    WedgeConfig::new(theta_i, eps).with_k0(k0)
}

/// Builds the solution; `use_modes` nonzero takes the coefficients from the
/// mode systems instead of the closed-form tables.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn lw_solution_new(
    theta_i: f64,
    eps: f64,
    k0: f64,
    use_modes: i32,
    out: *mut *mut LwSolution,
) -> LwStatus {
    if out.is_null() {
        return LwStatus::NullPointer;
    }
    guard(|| {
        let source = if use_modes != 0 {
            CoefficientSource::Modes
        } else {
            CoefficientSource::Tables
        };
        match SpectralSolution::with_source(&config(theta_i, eps, k0), source) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(LwSolution { inner }));
                LwStatus::Ok
            }
            Err(e) => (&e).into(),
        }
    })
}

/// # Safety
/// `sol` must be null or a handle from [`lw_solution_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lw_solution_free(sol: *mut LwSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

unsafe fn eval_with(
    sol: *const LwSolution,
    out: *mut LwComplex,
    f: impl FnOnce(&SpectralSolution) -> lemwedge::Result<Complex64>,
) -> LwStatus {
    if sol.is_null() || out.is_null() {
        return LwStatus::NullPointer;
    }
    guard(|| match f(&(*sol).inner) {
        Ok(z) => {
            *out = z.into();
            LwStatus::Ok
        }
        Err(e) => (&e).into(),
    })
}

/// Q_scat at a spectral point ζ.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lw_q_scat(
    sol: *const LwSolution,
    zeta: LwComplex,
    out: *mut LwComplex,
) -> LwStatus {
    eval_with(sol, out, |s| s.q_scat_zeta(zeta.into()))
}

/// Q_scat at a torus point u, used as given.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lw_q_scat_u(
    sol: *const LwSolution,
    u: LwComplex,
    out: *mut LwComplex,
) -> LwStatus {
    eval_with(sol, out, |s| s.q_scat_u(u.into()))
}

/// Q_total = 1/(ζ − ζ_i) + Q_scat.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lw_q_total(
    sol: *const LwSolution,
    zeta: LwComplex,
    out: *mut LwComplex,
) -> LwStatus {
    eval_with(sol, out, |s| s.q_total(zeta.into()))
}

/// Number of scattered labels (15); 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lw_residue_count(sol: *const LwSolution) -> usize {
    if sol.is_null() {
        0
    } else {
        (*sol).inner.records.len()
    }
}

/// Pole data of the `index`-th scattered label in label order.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lw_residue(
    sol: *const LwSolution,
    index: usize,
    out: *mut LwResidue,
) -> LwStatus {
    if sol.is_null() || out.is_null() {
        return LwStatus::NullPointer;
    }
    let s = &(*sol).inner;
    let (Some(p), Some(r)) = (s.poles.get(index), s.records.get(index)) else {
        return LwStatus::IndexOutOfRange;
    };
    *out = LwResidue {
        m: p.label.m,
        sigma: p.label.sigma,
        eps_w: p.label.eps_w,
        t: p.t().into(),
        y: p.y().into(),
        u: p.u.u.into(),
        r_i: r.r_i.into(),
        alpha: r.alpha.into(),
        beta: r.beta.into(),
        c: r.c.into(),
        d: r.d.into(),
    };
    LwStatus::Ok
}

/// R(u₀), the constant removed to fix the gauge.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lw_gauge_constant(sol: *const LwSolution, out: *mut LwComplex) -> LwStatus {
    eval_with(sol, out, |s| Ok(s.gauge_constant))
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn lw_far_field_new(
    theta_i: f64,
    k0: f64,
    out: *mut *mut LwFarField,
) -> LwStatus {
    if out.is_null() {
        return LwStatus::NullPointer;
    }
    guard(|| match FarField::new(&config(theta_i, 1e-3, k0)) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(LwFarField { inner }));
            LwStatus::Ok
        }
        Err(e) => (&e).into(),
    })
}

/// # Safety
/// `ff` must be null or a handle from [`lw_far_field_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lw_far_field_free(ff: *mut LwFarField) {
    if !ff.is_null() {
        drop(Box::from_raw(ff));
    }
}

/// D(θ, θ_i) and its extrapolation residual.  Returns
/// `LW_STATUS_EXTRAPOLATION_UNSTABLE` when the residual exceeds 10·tol_eval; `out`
/// and `residual` are still written in that case.
///
/// # Safety
/// `ff` must be a live handle; `out` and `residual` valid for one write
/// (`residual` may be null).
#[no_mangle]
pub unsafe extern "C" fn lw_diffraction_coefficient(
    ff: *const LwFarField,
    theta: f64,
    out: *mut LwComplex,
    residual: *mut f64,
) -> LwStatus {
    if ff.is_null() || out.is_null() {
        return LwStatus::NullPointer;
    }
    guard(|| {
        let f = &(*ff).inner;
        match f.d_with_residual(theta) {
            Ok((d, res)) => {
                *out = d.into();
                if !residual.is_null() {
                    *residual = res;
                }
                if res > 10.0 * f.cfg.tolerances.tol_eval {
                    LwStatus::ExtrapolationUnstable
                } else {
                    LwStatus::Ok
                }
            }
            Err(e) => (&e).into(),
        }
    })
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn lw_status_name(status: LwStatus) -> *const c_char {
    let s: &'static CStr = match status {
        LwStatus::Ok => c"Ok",
        LwStatus::NullPointer => c"NullPointer",
        LwStatus::IndexOutOfRange => c"IndexOutOfRange",
        LwStatus::Panic => c"Panic",
        LwStatus::PoleAtLattice => c"PoleAtLattice",
        LwStatus::NotOnCubic => c"NotOnCubic",
        LwStatus::NoConvergence => c"NoConvergence",
        LwStatus::DivisionNearZero => c"DivisionNearZero",
        LwStatus::BranchPoint => c"BranchPoint",
        LwStatus::UniformizationPole => c"UniformizationPole",
        LwStatus::UnitModulusRoot => c"UnitModulusRoot",
        LwStatus::DegenerateEps => c"DegenerateEps",
        LwStatus::DoubleRoot => c"DoubleRoot",
        LwStatus::ZeroOrbitDerivative => c"ZeroOrbitDerivative",
        LwStatus::SingularModeMatrix => c"SingularModeMatrix",
        LwStatus::ShiftSingularity => c"ShiftSingularity",
        LwStatus::EvaluationAtPole => c"EvaluationAtPole",
        LwStatus::IncidentPole => c"IncidentPole",
        LwStatus::NearPoleDirection => c"NearPoleDirection",
        LwStatus::ExtrapolationUnstable => c"ExtrapolationUnstable",
        LwStatus::InvalidConfig => c"InvalidConfig",
        LwStatus::NonFiniteOutput => c"NonFiniteOutput",
    };
    s.as_ptr()
}
