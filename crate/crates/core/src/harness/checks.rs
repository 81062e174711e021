//! Single-point diagnostics: closed-form self-consistency, ground-state
//! cross-checks, and stationarity of the half-flux state in real time.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::analytic::{canonical_alpha, half_flux_state, uniform_branch_best, RingProblem};
use crate::error::Result;
use crate::field::{Frame, RingGrid, WaveField};
use crate::solver::{energy_and_mu, gauge_transform, real_time_evolve, residual_norm};

use super::profile::{align_peak_to_pi, lump_shape, LumpShape};
use super::{solve_point, Check, HarnessConfig};

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticCheckReport {
    pub lambda: f64,
    pub n_points: usize,
    pub k: f64,
    pub big_k: f64,
    pub big_e: f64,
    pub mu: f64,
    pub eps: f64,
    /// `|[E − kc²K]K − πλ/2| / (πλ/2)`.
    pub modulus_residual_rel: f64,
    pub norm: f64,
    /// `∫|ψ̃|⁴` by grid quadrature of the sampled state.
    pub quartic_quadrature: f64,
    pub quartic_closed_form: f64,
    /// `ε − μ − (λ/2)∫|ψ̃|⁴` with the quadrature moment.
    pub identity_gap: f64,
    /// `ε` of the sampled field from the spectral energy functional.
    pub eps_spectral: f64,
    pub checks: Vec<Check>,
}

/// Self-consistency of the closed-form half-flux state at one coupling.
pub fn analytic_check(lambda: f64, n_points: usize) -> Result<AnalyticCheckReport> {
    let grid = RingGrid::new(n_points)?;
    let a = crate::analytic::HalfFluxAnalytic::for_coupling(lambda)?;
    let field = a.field(grid)?;
    let norm = field.norm_sqr();
    let quartic_quadrature = grid.integrate(field.density().iter().map(|r| r * r));
    let identity_gap = a.eps - a.mu - 0.5 * lambda * quartic_quadrature;
    let modulus_residual_rel = a.modulus_residual().abs() / (FRAC_PI_2 * lambda);

    let mut normalized = field.clone();
    normalized.normalize()?;
    let (eps_spectral, _) = energy_and_mu(&normalized, &RingProblem::new(lambda, 0.5)?)?;

    let checks = vec![
        Check::new(
            "modulus equation",
            modulus_residual_rel <= 1e-12,
            format!("relative residual {modulus_residual_rel:.3e}, required <= 1e-12"),
        ),
        Check::new(
            "unit norm",
            (norm - 1.0).abs() <= 1e-10,
            format!("norm - 1 = {:.3e}, required within 1e-10", norm - 1.0),
        ),
        Check::new(
            "energy identity",
            identity_gap.abs() <= 1e-8,
            format!("eps - mu - (lambda/2) int|psi|^4 = {identity_gap:.3e}, required within 1e-8"),
        ),
        Check::new(
            "spectral energy",
            (eps_spectral - a.eps).abs() <= 1e-8,
            format!(
                "eps from the sampled field {eps_spectral:.15} vs closed form {:.15}, required within 1e-8",
                a.eps
            ),
        ),
    ];
    Ok(AnalyticCheckReport {
        lambda,
        n_points,
        k: a.modulus.k(),
        big_k: a.big_k,
        big_e: a.big_e,
        mu: a.mu,
        eps: a.eps,
        modulus_residual_rel,
        norm,
        quartic_quadrature,
        quartic_closed_form: a.quartic_moment(),
        identity_gap,
        eps_spectral,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundStateReport {
    pub lambda: f64,
    pub alpha: f64,
    pub n_points: usize,
    pub eps: f64,
    pub mu: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub contrast: f64,
    pub shape: LumpShape,
    pub eps_uniform_best: f64,
    /// Closed-form energy at half flux.
    pub eps_analytic: Option<f64>,
    /// Density with its maximum moved to `φ = π`.
    pub profile: Vec<(f64, f64)>,
    /// Closed-form `|ψ̃|²` at half flux, peaked at `φ = π`.
    pub analytic_profile: Option<Vec<(f64, f64)>>,
    pub checks: Vec<Check>,
}

/// Solves one point and compares it with whatever closed form applies.
pub fn ground_state_report(lambda: f64, alpha: f64, hc: &HarnessConfig) -> Result<GroundStateReport> {
    let s = solve_point(lambda, alpha, &hc.solver)?;
    let st = &s.state;
    let grid = st.field.grid();
    let aligned = align_peak_to_pi(&st.field)?;
    let profile: Vec<(f64, f64)> = grid.nodes().zip(aligned.density()).collect();

    let mut checks = vec![Check::new(
        "converged",
        st.converged,
        format!("residual {:.3e} after {} iterations", st.residual, st.iterations),
    )];

    let (eps_analytic, analytic_profile) = if canonical_alpha(alpha) == 0.5 && lambda > 0.0 {
        let (a, field) = half_flux_state(lambda, grid.n_points())?;
        // |cn|² peaks at φ = 0; shift by half a turn
        let half = grid.n_points() / 2;
        let rho = field.density();
        let shifted: Vec<(f64, f64)> = grid
            .nodes()
            .enumerate()
            .map(|(j, phi)| (phi, rho[(j + half) % grid.n_points()]))
            .collect();
        let diff = profile
            .iter()
            .zip(&shifted)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max);
        checks.push(Check::new(
            "energy matches closed form",
            (st.eps - a.eps).abs() <= 1e-8,
            format!("eps {:.15} vs closed form {:.15}, required within 1e-8", st.eps, a.eps),
        ));
        checks.push(Check::new(
            "profile matches closed form",
            diff <= 1e-6,
            format!("sup |rho - |cn|^2| after alignment = {diff:.3e}, required <= 1e-6"),
        ));
        (Some(a.eps), Some(shifted))
    } else {
        (None, None)
    };

    Ok(GroundStateReport {
        lambda,
        alpha,
        n_points: grid.n_points(),
        eps: st.eps,
        mu: st.mu,
        residual: st.residual,
        iterations: st.iterations,
        converged: st.converged,
        contrast: st.density_contrast(),
        shape: lump_shape(&st.field),
        eps_uniform_best: uniform_branch_best(lambda, alpha).1,
        eps_analytic,
        profile,
        analytic_profile,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub lambda: f64,
    pub t_final: f64,
    /// `‖(H − μ)ψ‖` of the sampled closed-form state.
    pub initial_residual: f64,
    pub max_density_drift: f64,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
    pub checks: Vec<Check>,
}

/// Evolves the closed-form half-flux state in real time and measures how
/// far its density moves.
pub fn half_flux_stationarity(lambda: f64, t_final: f64, hc: &HarnessConfig) -> Result<StationarityReport> {
    let (_, twisted) = half_flux_state(lambda, hc.solver.n_points)?;
    let mut lab: WaveField = gauge_transform(&twisted, 0.5, Frame::Lab)?;
    lab.normalize()?;
    let problem = RingProblem::new(lambda, 0.5)?;
    let initial_residual = residual_norm(&lab, &problem)?;
    let traj = real_time_evolve(&lab, &problem, t_final, &hc.solver, None)?;
    let drift = traj.max_density_drift();
    let norm = traj.max_norm_drift();
    let energy = traj.max_energy_drift();
    let checks = vec![
        Check::new(
            "density stationary",
            drift < 1e-6,
            format!("sup |rho(t) - rho(0)| = {drift:.3e} over t <= {t_final}, required < 1e-6"),
        ),
        Check::new(
            "norm conserved",
            norm <= 1e-10,
            format!("max |N(t) - N(0)| = {norm:.3e}, required <= 1e-10"),
        ),
        Check::new(
            "energy conserved",
            energy <= 1e-8,
            format!("max |eps(t) - eps(0)| = {energy:.3e}, required <= 1e-8"),
        ),
    ];
    Ok(StationarityReport {
        lambda,
        t_final,
        initial_residual,
        max_density_drift: drift,
        max_norm_drift: norm,
        max_energy_drift: energy,
        checks,
    })
}
