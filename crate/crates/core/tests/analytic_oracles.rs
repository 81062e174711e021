mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use ring_crystal::analytic::{half_flux_energy, half_flux_mu, half_flux_state, solve_modulus};
use ring_crystal::elliptic::{complete_e, complete_k};
use ring_crystal::harness::profile::align_peak_to_pi;
use ring_crystal::solver::{energy_and_mu, imaginary_time_ground_state, residual_norm};
use ring_crystal::{Frame, RingGrid, RingProblem, SolverConfig, WaveField};

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn modulus_equation_over_couplings() {
    for lambda in log_grid(0.1, 12.0, 25) {
        let m = solve_modulus(lambda).unwrap();
        let kk = common::complete_k_kc(m.kc());
        let lhs = (common::complete_e_kc(m.kc()) - m.kc2() * kk) * kk;
        assert!(
            (lhs - FRAC_PI_2 * lambda).abs() <= 1e-10 * FRAC_PI_2 * lambda,
            "lambda={lambda}: {lhs} vs {}",
            FRAC_PI_2 * lambda
        );
    }
}

#[test]
fn sampled_state_self_consistent() {
    for lambda in log_grid(0.1, 12.0, 15) {
        let n = if lambda > 8.0 { 1024 } else { 256 };
        let (a, field) = half_flux_state(lambda, n).unwrap();
        let h = 2.0 * PI / n as f64;
        let rho = field.density();
        let norm: f64 = rho.iter().sum::<f64>() * h;
        assert!((norm - 1.0).abs() <= 1e-10, "lambda={lambda}: norm {norm}");
        let quartic: f64 = rho.iter().map(|r| r * r).sum::<f64>() * h;
        let gap = a.eps - a.mu - 0.5 * lambda * quartic;
        assert!(gap.abs() <= 1e-8, "lambda={lambda}: identity gap {gap}");
        assert_eq!(half_flux_energy(&a), a.eps);
        assert_eq!(half_flux_mu(&a), a.mu);
    }
}

#[test]
fn mu_closed_form() {
    for lambda in [0.5, 2.0, 5.0, 9.0] {
        let m = solve_modulus(lambda).unwrap();
        let kk = complete_k(m).unwrap();
        let (a, _) = half_flux_state(lambda, 1024).unwrap();
        let mu = kk * kk / (PI * PI) * (0.5 - m.k2());
        assert!((a.mu - mu).abs() <= 1e-13 * mu.abs().max(1.0));
        assert!((a.big_e - complete_e(m)).abs() <= 1e-14);
    }
}

#[test]
fn half_flux_state_is_stationary() {
    for lambda in [1.0, 5.0] {
        let (_, twisted) = half_flux_state(lambda, 256).unwrap();
        let grid = twisted.grid();
        let lab = WaveField::from_fn(grid, Frame::Lab, |phi| {
            let j = (phi / grid.spacing()).round() as usize;
            twisted.amplitudes()[j] * num_complex::Complex64::from_polar(1.0, 0.5 * phi)
        });
        let problem = RingProblem::new(lambda, 0.5).unwrap();
        assert!(residual_norm(&lab, &problem).unwrap() < 1e-10, "lambda={lambda}");
    }
}

#[test]
fn zero_flux_solver_matches_dn_lump() {
    let lambda = 5.0;
    let n = 256;
    let dn = common::dn_lump(lambda, n);
    let grid = RingGrid::new(n).unwrap();
    let oracle = WaveField::new(grid, dn.iter().map(|&x| x.into()).collect(), Frame::Lab).unwrap();
    let problem = RingProblem::new(lambda, 0.0).unwrap();
    let (eps_oracle, _) = energy_and_mu(&oracle, &problem).unwrap();
    assert!(residual_norm(&oracle, &problem).unwrap() < 1e-9);

    let s = imaginary_time_ground_state(&problem, &SolverConfig::default()).unwrap();
    assert!(s.converged);
    assert!((s.eps - eps_oracle).abs() <= 1e-9, "{} vs {}", s.eps, eps_oracle);

    let aligned = align_peak_to_pi(&s.field).unwrap().density();
    let diff = (0..n)
        .map(|j| (aligned[j] - dn[(j + n / 2) % n].powi(2)).abs())
        .fold(0.0, f64::max);
    assert!(diff <= 1e-6, "sup density gap {diff}");
}
