//! C ABI over `ring_crystal`.
//!
//! Every fallible function returns an [`RcStatus`]; on failure a
//! description is kept per thread and can be copied out with
//! [`rc_last_error_message`]. Solver results live behind opaque handles
//! that the caller releases with the matching `_free` function. Panics are
//! caught at the boundary and reported as [`RcStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ring_crystal::analytic::asymptotic_delta_energy;
use ring_crystal::elliptic::{self, EllipticModulus};
use ring_crystal::harness::{self, HarnessConfig, SweepRecord, SweepTable};
use ring_crystal::solver::{imaginary_time_ground_state, SolverConfig, StationaryState};
use ring_crystal::{Error, HalfFluxAnalytic, RingProblem};

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    /// An argument is outside the function's domain.
    Domain = 2,
    /// A complete integral diverges (`k = 1`).
    Divergent = 3,
    /// An iteration hit its cap without converging.
    NoConvergence = 4,
    /// A precondition between arguments was violated.
    Contract = 5,
    /// The numerics blew up (divergence, instability, lost normalization).
    Numerical = 6,
    NoBracket = 7,
    Io = 8,
    InvalidUtf8 = 9,
    /// A caller buffer is too small; nothing was written.
    BufferTooSmall = 10,
    Panic = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> RcStatus {
    match err {
        Error::Domain { .. } => RcStatus::Domain,
        Error::Divergent => RcStatus::Divergent,
        Error::RootSolve { .. } => RcStatus::NoConvergence,
        Error::Contract(_) => RcStatus::Contract,
        Error::Divergence { .. }
        | Error::Instability { .. }
        | Error::ContrastCollapse { .. }
        | Error::Normalization { .. } => RcStatus::Numerical,
        Error::NoBracket(_) => RcStatus::NoBracket,
        Error::Io { .. } | Error::Csv(_) | Error::Json(_) => RcStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), RcStatus>) -> RcStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RcStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RcStatus::Panic
        }
    }
}

trait IntoStatus<T> {
    fn status(self) -> Result<T, RcStatus>;
}

impl<T> IntoStatus<T> for ring_crystal::Result<T> {
    fn status(self) -> Result<T, RcStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

fn null_check<T>(p: *const T, name: &str) -> Result<(), RcStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(RcStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Copies the calling thread's last error message into `buf` as a
/// NUL-terminated string, truncating to `len - 1` bytes. Returns the full
/// message length (without the terminator); an empty message means the last
/// call succeeded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Complete elliptic integral of the first kind, modulus `k` in `[0, 1)`.
///
/// # Safety
/// `out` must be null or point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn rc_elliptic_k(k: f64, out: *mut f64) -> RcStatus {
    guard(|| {
        null_check(out, "out")?;
        let v = elliptic::complete_k(EllipticModulus::from_k(k).status()?).status()?;
        *out = v;
        Ok(())
    })
}

/// Complete elliptic integral of the second kind, modulus `k` in `[0, 1]`.
///
/// # Safety
/// `out` must be null or point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn rc_elliptic_e(k: f64, out: *mut f64) -> RcStatus {
    guard(|| {
        null_check(out, "out")?;
        *out = elliptic::complete_e(EllipticModulus::from_k(k).status()?);
        Ok(())
    })
}

/// Jacobi `cn`, `sn`, `dn` at argument `u` and modulus `k`.
///
/// # Safety
/// Each output must be null or point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn rc_jacobi(u: f64, k: f64, cn: *mut f64, sn: *mut f64, dn: *mut f64) -> RcStatus {
    guard(|| {
        null_check(cn, "cn")?;
        null_check(sn, "sn")?;
        null_check(dn, "dn")?;
        let j = elliptic::jacobi_cn_sn_dn(u, EllipticModulus::from_k(k).status()?).status()?;
        *cn = j.cn;
        *sn = j.sn;
        *dn = j.dn;
        Ok(())
    })
}

/// Closed-form half-flux state at one coupling.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcHalfFlux {
    pub lambda: f64,
    pub k: f64,
    pub big_k: f64,
    pub big_e: f64,
    pub mu: f64,
    pub eps: f64,
}

/// Solves the half-flux modulus equation for `lambda > 0`.
///
/// # Safety
/// `out` must be null or point to a writable `RcHalfFlux`.
#[no_mangle]
pub unsafe extern "C" fn rc_half_flux(lambda: f64, out: *mut RcHalfFlux) -> RcStatus {
    guard(|| {
        null_check(out, "out")?;
        let a = HalfFluxAnalytic::for_coupling(lambda).status()?;
        *out = RcHalfFlux {
            lambda,
            k: a.modulus.k(),
            big_k: a.big_k,
            big_e: a.big_e,
            mu: a.mu,
            eps: a.eps,
        };
        Ok(())
    })
}

/// The strong-coupling law `−3[1 − cos 2πα] λ² e^{−πλ}`.
#[no_mangle]
pub extern "C" fn rc_asymptotic_delta_energy(lambda: f64, alpha: f64) -> f64 {
    asymptotic_delta_energy(lambda, alpha)
}

/// Solver settings; mirrors the library's `SolverConfig`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RcSolverConfig {
    pub n_points: usize,
    pub dtau: f64,
    pub dt: f64,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub energy_tol: f64,
    pub split_tol: f64,
    pub seed: u64,
    pub noise_amplitude: f64,
}

impl From<SolverConfig> for RcSolverConfig {
    fn from(c: SolverConfig) -> Self {
        Self {
            n_points: c.n_points,
            dtau: c.dtau,
            dt: c.dt,
            max_iters: c.max_iters,
            residual_tol: c.residual_tol,
            energy_tol: c.energy_tol,
            split_tol: c.split_tol,
            seed: c.seed,
            noise_amplitude: c.noise_amplitude,
        }
    }
}

impl From<RcSolverConfig> for SolverConfig {
    fn from(c: RcSolverConfig) -> Self {
        Self {
            n_points: c.n_points,
            dtau: c.dtau,
            dt: c.dt,
            max_iters: c.max_iters,
            residual_tol: c.residual_tol,
            energy_tol: c.energy_tol,
            split_tol: c.split_tol,
            seed: c.seed,
            noise_amplitude: c.noise_amplitude,
        }
    }
}

/// Fills `out` with the default solver settings.
///
/// # Safety
/// `out` must be null or point to a writable `RcSolverConfig`.
#[no_mangle]
pub unsafe extern "C" fn rc_solver_config_default(out: *mut RcSolverConfig) -> RcStatus {
    guard(|| {
        null_check(out, "out")?;
        *out = SolverConfig::default().into();
        Ok(())
    })
}

/// Opaque ground state.
pub struct RcStationaryState {
    inner: StationaryState,
}

/// Runs the imaginary-time ground-state search. A null `config` means the
/// defaults. On success `*out` owns a new handle; release it with
/// [`rc_stationary_state_free`].
///
/// # Safety
/// `config` must be null or point to a valid `RcSolverConfig`; `out` must
/// point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_ground_state(
    lambda: f64,
    alpha: f64,
    config: *const RcSolverConfig,
    out: *mut *mut RcStationaryState,
) -> RcStatus {
    guard(|| {
        null_check(out, "out")?;
        *out = ptr::null_mut();
        let cfg: SolverConfig = if config.is_null() {
            SolverConfig::default()
        } else {
            (*config).into()
        };
        let problem = RingProblem::new(lambda, alpha).status()?;
        let state = imaginary_time_ground_state(&problem, &cfg).status()?;
        *out = Box::into_raw(Box::new(RcStationaryState { inner: state }));
        Ok(())
    })
}

/// Scalar summary of a stationary state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcStateSummary {
    pub eps: f64,
    pub mu: f64,
    pub residual: f64,
    pub iterations: usize,
    pub n_points: usize,
    pub converged: bool,
}

/// # Safety
/// `state` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rc_stationary_state_summary(
    state: *const RcStationaryState,
    out: *mut RcStateSummary,
) -> RcStatus {
    guard(|| {
        null_check(state, "state")?;
        null_check(out, "out")?;
        let s = &(*state).inner;
        *out = RcStateSummary {
            eps: s.eps,
            mu: s.mu,
            residual: s.residual,
            iterations: s.iterations,
            n_points: s.field.grid().n_points(),
            converged: s.converged,
        };
        Ok(())
    })
}

/// Copies `|ψ_j|²` into `buf`, which must hold `n_points` values.
///
/// # Safety
/// `state` must be a live handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rc_stationary_state_density(
    state: *const RcStationaryState,
    buf: *mut f64,
    len: usize,
) -> RcStatus {
    guard(|| {
        null_check(state, "state")?;
        null_check(buf, "buf")?;
        let rho = (*state).inner.field.density();
        if len < rho.len() {
            set_error(format!("buffer holds {len} values, need {}", rho.len()));
            return Err(RcStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(rho.as_ptr(), buf, rho.len());
        Ok(())
    })
}

/// Releases a state handle. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_stationary_state_free(state: *mut RcStationaryState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Opaque flux-sweep table.
pub struct RcSweepTable {
    inner: SweepTable,
}

/// One table row. Absent optional values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcSweepRecord {
    pub lambda: f64,
    pub alpha: f64,
    pub eps_numeric: f64,
    pub eps_uniform_best: f64,
    pub eps_wilczek: f64,
    pub eps_analytic_half_flux: f64,
    pub delta_eps: f64,
    pub delta_eps_asymptotic: f64,
    pub residual: f64,
    pub converged: bool,
    pub n_points: usize,
}

impl From<&SweepRecord> for RcSweepRecord {
    fn from(r: &SweepRecord) -> Self {
        Self {
            lambda: r.lambda,
            alpha: r.alpha,
            eps_numeric: r.eps_numeric,
            eps_uniform_best: r.eps_uniform_best,
            eps_wilczek: r.eps_wilczek.unwrap_or(f64::NAN),
            eps_analytic_half_flux: r.eps_analytic_half_flux.unwrap_or(f64::NAN),
            delta_eps: r.delta_eps.unwrap_or(f64::NAN),
            delta_eps_asymptotic: r.delta_eps_asymptotic,
            residual: r.residual,
            converged: r.converged,
            n_points: r.n_points,
        }
    }
}

/// Ground states at `lambda` for `n_alphas` fluxes within `[−1, 3/2]`,
/// on up to `jobs` threads (`0` = all cores).
///
/// # Safety
/// `alphas` must point to `n_alphas` doubles; `config` must be null or
/// valid; `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_flux_sweep(
    lambda: f64,
    alphas: *const f64,
    n_alphas: usize,
    config: *const RcSolverConfig,
    jobs: usize,
    out: *mut *mut RcSweepTable,
) -> RcStatus {
    guard(|| {
        null_check(out, "out")?;
        *out = ptr::null_mut();
        null_check(alphas, "alphas")?;
        let alphas = std::slice::from_raw_parts(alphas, n_alphas);
        let solver: SolverConfig = if config.is_null() {
            SolverConfig::default()
        } else {
            (*config).into()
        };
        let hc = HarnessConfig {
            solver,
            jobs: (jobs > 0).then_some(jobs),
            record_timing: false,
        };
        let report = harness::flux_sweep(lambda, alphas, &hc).status()?;
        *out = Box::into_raw(Box::new(RcSweepTable { inner: report.table }));
        Ok(())
    })
}

/// Number of rows; zero for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_sweep_table_len(table: *const RcSweepTable) -> usize {
    if table.is_null() {
        0
    } else {
        (*table).inner.records.len()
    }
}

/// # Safety
/// `table` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rc_sweep_table_record(
    table: *const RcSweepTable,
    index: usize,
    out: *mut RcSweepRecord,
) -> RcStatus {
    guard(|| {
        null_check(table, "table")?;
        null_check(out, "out")?;
        let records = &(*table).inner.records;
        let r = records.get(index).ok_or_else(|| {
            set_error(format!("index {index} out of range for {} records", records.len()));
            RcStatus::Domain
        })?;
        *out = r.into();
        Ok(())
    })
}

/// Writes the table as CSV to the UTF-8 path `path`.
///
/// # Safety
/// `table` must be a live handle; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rc_sweep_table_write_csv(table: *const RcSweepTable, path: *const c_char) -> RcStatus {
    guard(|| {
        null_check(table, "table")?;
        null_check(path, "path")?;
        let path = CStr::from_ptr(path).to_str().map_err(|e| {
            set_error(format!("path is not UTF-8: {e}"));
            RcStatus::InvalidUtf8
        })?;
        (*table).inner.write_csv(Path::new(path)).status()
    })
}

/// Releases a table handle. Null is ignored.
///
/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_sweep_table_free(table: *mut RcSweepTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}
