//! C ABI over `multipath-core`.
//!
//! Every fallible function returns an [`MpStatus`] and writes its result
//! through an out pointer. On failure a message is stored per thread and
//! can be read with [`mp_last_error_message`]. States are opaque handles
//! released with the matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use multipath::bounds::{
    approx_bound_nonlinear, symmetric_bound_linear, symmetric_bound_nonlinear, theta_to_g, ultimate_bound,
    PotentialSpec,
};
use multipath::farfield::{fit_components, FringeModel, QuadratureGrid};
use multipath::fock::{bh_ground_state, FockState};
use multipath::gutzwiller::{make_gaussian_product, GutzwillerProduct};
use multipath::verify::{verify, Scope};
use multipath::Error;

/// Status codes. `MP_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpStatus {
    Ok = 0,
    InvalidArgument = 1,
    BasisTooLarge = 2,
    DegeneratePotential = 3,
    UndefinedSqueezing = 4,
    EigenNoConvergence = 5,
    TruncationShift = 6,
    NegativeDensity = 7,
    QuadratureNoConvergence = 8,
    NoFringeSignal = 9,
    DarkFringe = 10,
    NullPointer = 11,
    Panic = 12,
}

impl From<&Error> for MpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument { .. } => MpStatus::InvalidArgument,
            Error::BasisTooLarge { .. } => MpStatus::BasisTooLarge,
            Error::DegeneratePotential => MpStatus::DegeneratePotential,
            Error::UndefinedSqueezing => MpStatus::UndefinedSqueezing,
            Error::EigenNoConvergence { .. } => MpStatus::EigenNoConvergence,
            Error::TruncationShift { .. } => MpStatus::TruncationShift,
            Error::NegativeDensity { .. } => MpStatus::NegativeDensity,
            Error::QuadratureNoConvergence { .. } => MpStatus::QuadratureNoConvergence,
            Error::NoFringeSignal => MpStatus::NoFringeSignal,
            Error::DarkFringe => MpStatus::DarkFringe,
        }
    }
}

/// Site-resolved moments of a product state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MpSiteMoments {
    /// `⟨â⟩`
    pub a1: f64,
    /// `⟨â²⟩`
    pub a2: f64,
    /// `⟨n̂⟩`
    pub n1: f64,
    /// `⟨n̂²⟩`
    pub n2: f64,
    pub var_n: f64,
}

/// Quadrature settings; start from [`mp_grid_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MpGrid {
    pub nodes_1d: usize,
    pub nodes_2d: usize,
    pub tolerance: f64,
}

/// Fit-estimator pieces for a product state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MpFit {
    pub f1: f64,
    pub c: f64,
    pub i1: f64,
    pub i2: f64,
    /// `(F₁ + C)/(m F₁²)`.
    pub variance_theta: f64,
    /// Non-zero when `F₁ + C < 0`, i.e. the estimate is not physical.
    pub invalid: i32,
}

/// Opaque site-factorized product state.
pub struct MpProduct(GutzwillerProduct);

/// Opaque fixed-particle-number Fock state.
pub struct MpFockState(FockState);

pub const MP_SCOPE_QFI: u32 = 1;
pub const MP_SCOPE_TWOWELL: u32 = 2;
pub const MP_SCOPE_NONLINEAR: u32 = 4;
pub const MP_SCOPE_G2: u32 = 8;
pub const MP_HBAR_NATURAL: u32 = 0;
pub const MP_HBAR_SI: u32 = 1;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard<F>(body: F) -> MpStatus
where
    F: FnOnce() -> Result<(), MpStatus>,
{
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MpStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_owned())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_error(format!("internal panic: {msg}"));
            MpStatus::Panic
        }
    }
}

fn fail(e: Error) -> MpStatus {
    let status = MpStatus::from(&e);
    set_error(e.to_string());
    status
}

fn null(name: &str) -> MpStatus {
    set_error(format!("null pointer passed for `{name}`"));
    MpStatus::NullPointer
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), MpStatus> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn to_u32(n: u64, name: &'static str) -> Result<u32, MpStatus> {
    u32::try_from(n).map_err(|_| {
        fail(Error::InvalidArgument {
            name,
            reason: "out of range".into(),
        })
    })
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, MpStatus> {
    p.as_ref().ok_or_else(|| null(name))
}

/// Copies the calling thread's last error message into `buf` (always
/// NUL-terminated when `len > 0`) and returns the full message length in
/// bytes, excluding the terminator. Pass `len = 0` to query the length.
#[no_mangle]
pub unsafe extern "C" fn mp_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static, NUL-terminated library version.
#[no_mangle]
pub extern "C" fn mp_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

#[no_mangle]
pub unsafe extern "C" fn mp_ultimate_bound(
    particles: u64,
    sites: usize,
    exponent: f64,
    repetitions: u32,
    out: *mut f64,
) -> MpStatus {
    guard(|| {
        let n = to_u32(particles, "N")?;
        let v = ultimate_bound(n, sites, exponent, repetitions).map_err(fail)?;
        write(out, v, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_symmetric_bound_linear(
    sites: usize,
    entanglement: f64,
    repetitions: u32,
    out: *mut f64,
) -> MpStatus {
    guard(|| {
        write(
            out,
            symmetric_bound_linear(sites, entanglement, repetitions).map_err(fail)?,
            "out",
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_symmetric_bound_nonlinear(
    sites: usize,
    exponent: f64,
    entanglement: f64,
    repetitions: u32,
    out: *mut f64,
) -> MpStatus {
    guard(|| {
        let v = symmetric_bound_nonlinear(sites, exponent, entanglement, repetitions).map_err(fail)?;
        write(out, v, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_approx_bound_nonlinear(
    sites: usize,
    exponent: f64,
    entanglement: f64,
    repetitions: u32,
    out: *mut f64,
) -> MpStatus {
    guard(|| {
        let v = approx_bound_nonlinear(sites, exponent, entanglement, repetitions).map_err(fail)?;
        write(out, v, "out")
    })
}

/// `Δ²g` from `Δ²θ` for a potential `g·x^j`; `hbar` is one of the
/// `MP_HBAR_*` constants.
#[no_mangle]
pub unsafe extern "C" fn mp_theta_to_g(
    variance_theta: f64,
    exponent: f64,
    spacing: f64,
    duration: f64,
    hbar: u32,
    out: *mut f64,
) -> MpStatus {
    guard(|| {
        let hbar = match hbar {
            MP_HBAR_NATURAL => multipath::bounds::HbarUnits::Natural,
            MP_HBAR_SI => multipath::bounds::HbarUnits::Si,
            _ => {
                return Err(fail(Error::InvalidArgument {
                    name: "hbar",
                    reason: "expected MP_HBAR_NATURAL or MP_HBAR_SI".into(),
                }))
            }
        };
        let spec = PotentialSpec::new(exponent, 1.0, spacing, duration).map_err(fail)?;
        write(
            out,
            theta_to_g(variance_theta, &spec, hbar.value()).map_err(fail)?,
            "out",
        )
    })
}

#[no_mangle]
pub extern "C" fn mp_grid_default() -> MpGrid {
    let g = QuadratureGrid::default();
    MpGrid {
        nodes_1d: g.nodes_1d,
        nodes_2d: g.nodes_2d,
        tolerance: g.tolerance,
    }
}

fn grid_from(grid: &MpGrid) -> Result<QuadratureGrid, MpStatus> {
    let mut g = QuadratureGrid::new(grid.nodes_1d, grid.nodes_2d).map_err(fail)?;
    if !(grid.tolerance.is_finite() && grid.tolerance > 0.0) {
        return Err(fail(Error::InvalidArgument {
            name: "tolerance",
            reason: "must be positive".into(),
        }));
    }
    g.tolerance = grid.tolerance;
    Ok(g)
}

unsafe fn box_out<T>(out: *mut *mut T, value: T) -> Result<(), MpStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Gaussian occupation profile with mean `mean_n` and width `sigma` on
/// each of `sites` sites.
#[no_mangle]
pub unsafe extern "C" fn mp_product_gaussian(
    sites: usize,
    mean_n: f64,
    sigma: f64,
    out: *mut *mut MpProduct,
) -> MpStatus {
    guard(|| {
        box_out(
            out,
            MpProduct(make_gaussian_product(sites, mean_n, sigma).map_err(fail)?),
        )
    })
}

/// Product state from real on-site amplitudes `c_0 … c_{len−1}`
/// (normalized on input).
#[no_mangle]
pub unsafe extern "C" fn mp_product_from_amplitudes(
    sites: usize,
    amplitudes: *const f64,
    len: usize,
    out: *mut *mut MpProduct,
) -> MpStatus {
    guard(|| {
        if amplitudes.is_null() {
            return Err(null("amplitudes"));
        }
        let c = std::slice::from_raw_parts(amplitudes, len).to_vec();
        box_out(
            out,
            MpProduct(GutzwillerProduct::from_amplitudes(sites, c).map_err(fail)?),
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_product_free(state: *mut MpProduct) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

#[no_mangle]
pub unsafe extern "C" fn mp_product_moments(state: *const MpProduct, out: *mut MpSiteMoments) -> MpStatus {
    guard(|| {
        let m = borrow(state, "state")?.0.moments();
        write(
            out,
            MpSiteMoments {
                a1: m.a1,
                a2: m.a2,
                n1: m.n1,
                n2: m.n2,
                var_n: m.var_n,
            },
            "out",
        )
    })
}

/// Phase squeezing `ξ²` of the product state.
#[no_mangle]
pub unsafe extern "C" fn mp_product_squeezing(state: *const MpProduct, out: *mut f64) -> MpStatus {
    guard(|| {
        let xi2 = borrow(state, "state")?.0.moments().pair_squeezing().map_err(fail)?;
        write(out, xi2, "out")
    })
}

/// Fit-estimator sensitivity from the far-field fringe of a product state.
#[no_mangle]
pub unsafe extern "C" fn mp_fit_sensitivity(
    state: *const MpProduct,
    grid: *const MpGrid,
    repetitions: u32,
    out: *mut MpFit,
) -> MpStatus {
    guard(|| {
        let product = &borrow(state, "state")?.0;
        let grid = grid_from(borrow(grid, "grid")?)?;
        if repetitions == 0 {
            return Err(fail(Error::InvalidArgument {
                name: "m",
                reason: "at least one repetition".into(),
            }));
        }
        let model = FringeModel::from_product(product).map_err(fail)?;
        let parts = fit_components(&model, &grid).map_err(fail)?;
        let m = f64::from(repetitions);
        write(
            out,
            MpFit {
                f1: parts.f1,
                c: parts.c,
                i1: parts.i1,
                i2: parts.i2,
                variance_theta: parts.variance_theta / m,
                invalid: i32::from(parts.f1 + parts.c < 0.0),
            },
            "out",
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_state_superfluid(particles: u32, sites: usize, out: *mut *mut MpFockState) -> MpStatus {
    guard(|| box_out(out, MpFockState(FockState::superfluid(particles, sites).map_err(fail)?)))
}

/// Site-symmetric NOON state: all particles on one site, superposed over
/// the choice of site.
#[no_mangle]
pub unsafe extern "C" fn mp_state_noon(particles: u32, sites: usize, out: *mut *mut MpFockState) -> MpStatus {
    guard(|| {
        box_out(
            out,
            MpFockState(FockState::noon_symmetric(particles, sites).map_err(fail)?),
        )
    })
}

/// Ground state of the two-site Bose-Hubbard model `−E_J·Jx + U·Jz²`.
#[no_mangle]
pub unsafe extern "C" fn mp_state_bose_hubbard(
    particles: u32,
    josephson: f64,
    interaction: f64,
    out: *mut *mut MpFockState,
) -> MpStatus {
    guard(|| {
        let gs = bh_ground_state(particles, josephson, interaction).map_err(fail)?;
        box_out(out, MpFockState(gs.state))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mp_state_free(state: *mut MpFockState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Quantum Fisher information `4Var(ĥ_j)` of a pure state.
#[no_mangle]
pub unsafe extern "C" fn mp_state_qfi(state: *const MpFockState, exponent: f64, out: *mut f64) -> MpStatus {
    guard(|| {
        let qfi = borrow(state, "state")?.0.qfi_brute(exponent).map_err(fail)?;
        write(out, qfi, "out")
    })
}

/// Runs the oracle suites selected by `scopes` (a bit mask of
/// `MP_SCOPE_*`, zero for all) and writes 1 to `passed` if every check held.
#[no_mangle]
pub unsafe extern "C" fn mp_verify(scopes: u32, passed: *mut i32) -> MpStatus {
    guard(|| {
        if scopes & !(MP_SCOPE_QFI | MP_SCOPE_TWOWELL | MP_SCOPE_NONLINEAR | MP_SCOPE_G2) != 0 {
            return Err(fail(Error::InvalidArgument {
                name: "scopes",
                reason: format!("unknown bits in {scopes:#x}"),
            }));
        }
        let selected: Vec<Scope> = [
            (MP_SCOPE_QFI, Scope::Qfi),
            (MP_SCOPE_TWOWELL, Scope::Twowell),
            (MP_SCOPE_NONLINEAR, Scope::Nonlinear),
            (MP_SCOPE_G2, Scope::G2),
        ]
        .into_iter()
        .filter(|(bit, _)| scopes == 0 || scopes & bit != 0)
        .map(|(_, s)| s)
        .collect();
        let report = verify(&selected, &QuadratureGrid::default()).map_err(fail)?;
        write(passed, i32::from(report.passed), "passed")
    })
}
