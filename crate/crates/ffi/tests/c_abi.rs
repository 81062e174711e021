use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ring_crystal_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe {
        rc_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn elliptic_values() {
    let mut k = 0.0;
    let mut e = 0.0;
    unsafe {
        assert_eq!(rc_elliptic_k(0.0, &mut k), RcStatus::Ok);
        assert_eq!(rc_elliptic_e(0.0, &mut e), RcStatus::Ok);
    }
    assert!((k - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert!((e - std::f64::consts::FRAC_PI_2).abs() < 1e-15);

    let (mut cn, mut sn, mut dn) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { rc_jacobi(0.7, 0.8, &mut cn, &mut sn, &mut dn) }, RcStatus::Ok);
    assert!((cn * cn + sn * sn - 1.0).abs() < 1e-14);
    assert!((dn * dn + 0.64 * sn * sn - 1.0).abs() < 1e-14);
}

#[test]
fn errors_are_reported() {
    let mut v = 0.0;
    assert_eq!(unsafe { rc_elliptic_k(1.0, &mut v) }, RcStatus::Divergent);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { rc_elliptic_k(1.5, &mut v) }, RcStatus::Domain);
    assert!(last_error().contains('k'));
    assert_eq!(unsafe { rc_elliptic_k(0.5, ptr::null_mut()) }, RcStatus::NullPointer);
    assert_eq!(unsafe { rc_elliptic_k(0.5, &mut v) }, RcStatus::Ok);
    assert_eq!(last_error(), "");
}

#[test]
fn error_message_truncates() {
    let mut v = 0.0;
    unsafe { rc_elliptic_k(2.0, &mut v) };
    let full = unsafe { rc_last_error_message(ptr::null_mut(), 0) };
    let mut buf = [0 as c_char; 4];
    let n = unsafe { rc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(n, full);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes().len(), 3);
}

#[test]
fn half_flux_record() {
    let mut a = RcHalfFlux::default();
    assert_eq!(unsafe { rc_half_flux(5.0, &mut a) }, RcStatus::Ok);
    assert!((a.eps - -1.041662899350692).abs() < 1e-12);
    assert!(a.k > 0.99 && a.k < 1.0);
    assert_eq!(unsafe { rc_half_flux(-1.0, &mut a) }, RcStatus::Domain);
    assert!(rc_asymptotic_delta_energy(5.0, 0.5) < 0.0);
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(rc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn ground_state_handle() {
    let mut cfg = unsafe { std::mem::zeroed::<RcSolverConfig>() };
    assert_eq!(unsafe { rc_solver_config_default(&mut cfg) }, RcStatus::Ok);
    assert_eq!(cfg.n_points, 256);
    cfg.n_points = 128;

    let mut h = ptr::null_mut();
    assert_eq!(unsafe { rc_ground_state(5.0, 0.5, &cfg, &mut h) }, RcStatus::Ok);
    assert!(!h.is_null());

    let mut s = RcStateSummary::default();
    assert_eq!(unsafe { rc_stationary_state_summary(h, &mut s) }, RcStatus::Ok);
    assert!(s.converged);
    assert_eq!(s.n_points, 128);
    assert!((s.eps - -1.041662899350692).abs() < 1e-8);

    let mut small = vec![0.0; 10];
    assert_eq!(
        unsafe { rc_stationary_state_density(h, small.as_mut_ptr(), small.len()) },
        RcStatus::BufferTooSmall
    );
    let mut rho = vec![0.0; 128];
    assert_eq!(unsafe { rc_stationary_state_density(h, rho.as_mut_ptr(), rho.len()) }, RcStatus::Ok);
    let mass: f64 = rho.iter().sum::<f64>() * std::f64::consts::TAU / 128.0;
    assert!((mass - 1.0).abs() < 1e-10);

    unsafe {
        rc_stationary_state_free(h);
        rc_stationary_state_free(ptr::null_mut());
    }
}

#[test]
fn ground_state_rejects_bad_config() {
    let mut cfg = unsafe { std::mem::zeroed::<RcSolverConfig>() };
    unsafe { rc_solver_config_default(&mut cfg) };
    cfg.n_points = 3;
    let mut h = ptr::null_mut();
    assert_ne!(unsafe { rc_ground_state(5.0, 0.0, &cfg, &mut h) }, RcStatus::Ok);
    assert!(h.is_null());
}

#[test]
fn sweep_table_handle() {
    let mut cfg = unsafe { std::mem::zeroed::<RcSolverConfig>() };
    unsafe { rc_solver_config_default(&mut cfg) };
    cfg.n_points = 128;
    let alphas = [0.25, 0.5];
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { rc_flux_sweep(5.0, alphas.as_ptr(), alphas.len(), &cfg, 1, &mut t) },
        RcStatus::Ok,
        "{}",
        last_error()
    );
    let n = unsafe { rc_sweep_table_len(t) };
    assert_eq!(n, alphas.len());

    let mut r = RcSweepRecord::default();
    let mut seen_half = false;
    for i in 0..n {
        assert_eq!(unsafe { rc_sweep_table_record(t, i, &mut r) }, RcStatus::Ok);
        assert!(r.converged);
        assert!(!r.delta_eps.is_nan());
        if r.alpha == 0.5 {
            seen_half = true;
            assert!((r.eps_numeric - r.eps_analytic_half_flux).abs() < 1e-8);
        } else {
            assert!(r.eps_analytic_half_flux.is_nan());
        }
    }
    assert!(seen_half);
    assert_eq!(unsafe { rc_sweep_table_record(t, n, &mut r) }, RcStatus::Domain);

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("sweep.csv").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { rc_sweep_table_write_csv(t, path.as_ptr()) }, RcStatus::Ok);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), n + 1);

    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { rc_sweep_table_write_csv(t, bad.as_ptr().cast()) },
        RcStatus::InvalidUtf8
    );

    unsafe { rc_sweep_table_free(t) };
    assert_eq!(unsafe { rc_sweep_table_len(ptr::null()) }, 0);
}

#[test]
fn header_declares_exports() {
    let header = include_str!("../include/ring_crystal.h");
    for name in [
        "rc_last_error_message",
        "rc_ground_state",
        "rc_stationary_state_free",
        "rc_flux_sweep",
        "rc_sweep_table_free",
        "RC_STATUS_PANIC",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
