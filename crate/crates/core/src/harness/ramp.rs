//! Spinning up a zero-flux lump by ramping the flux.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::analytic::RingProblem;
use crate::error::{Error, Result};
use crate::solver::{
    linear_ramp, real_time_evolve_sampled, Scheme, CENTROID_CONTRAST_MIN,
};

use super::profile::fit_line;
use super::{solve_point, Check, HarnessConfig};

/// Length of every ramp run.
pub const RAMP_T_FINAL: f64 = 10.0;

/// Time window of the angular-velocity fit.
pub const RAMP_FIT_WINDOW: (f64, f64) = (5.0, 10.0);

/// Spacing of the recorded time series.
const SAMPLE_INTERVAL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RampSample {
    pub t: f64,
    pub alpha: f64,
    /// Unwrapped centroid angle.
    pub centroid: f64,
    pub angular_momentum: f64,
    pub kinetic_angular_momentum: f64,
    pub contrast: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RampReport {
    pub lambda: f64,
    pub alpha_final: f64,
    pub t_ramp: f64,
    /// Fitted `dθ/dt` of the centroid over [`RAMP_FIT_WINDOW`].
    pub omega_fit: f64,
    /// Mean kinetic angular momentum `⟨−i∂_φ − α⟩` over the fit window.
    pub kinetic_angular_momentum: f64,
    pub initial_residual: f64,
    pub samples: Vec<RampSample>,
    pub checks: Vec<Check>,
}

/// Starts from the zero-flux ground state, ramps the flux linearly to
/// `alpha_final` over `t_ramp`, and follows the lump to `t = 10`.
///
/// Under `½(−i∂ − α)²` the canonical momentum is conserved while the flux
/// changes, so the lump ends up moving with `ω = −α_final`: the magnitude
/// is the flux, the direction opposes it.
pub fn flux_ramp_experiment(
    lambda: f64,
    alpha_final: f64,
    t_ramp: f64,
    hc: &HarnessConfig,
) -> Result<RampReport> {
    if !(lambda > FRAC_PI_2) {
        return Err(Error::domain("lambda", lambda, "lambda > pi/2 so a lump exists"));
    }
    if !(alpha_final.abs() <= 0.5) {
        return Err(Error::domain("alpha_final", alpha_final, "|alpha_final| <= 1/2"));
    }
    if !(t_ramp.is_finite() && (0.0..=RAMP_FIT_WINDOW.0).contains(&t_ramp)) {
        return Err(Error::domain("t_ramp", t_ramp, "ramp finished before the fit window"));
    }

    let start = solve_point(lambda, 0.0, &hc.solver)?;
    if !start.state.converged {
        return Err(Error::Contract(format!(
            "zero-flux ground state at lambda={lambda} did not converge (residual {:.3e})",
            start.state.residual
        )));
    }
    let problem = RingProblem::new(lambda, alpha_final)?;
    let ramp = linear_ramp(0.0, alpha_final, t_ramp);
    let every = ((SAMPLE_INTERVAL / hc.solver.dt).round() as usize).max(1);
    let traj = real_time_evolve_sampled(
        &start.state.field,
        &problem,
        RAMP_T_FINAL,
        &hc.solver,
        Some(&ramp),
        Scheme::default(),
        every,
    )?;

    if let Some(s) = traj
        .samples
        .iter()
        .find(|s| s.observables.contrast < CENTROID_CONTRAST_MIN)
    {
        return Err(Error::ContrastCollapse {
            time: s.t,
            contrast: s.observables.contrast,
        });
    }

    let unwrapped = traj.unwrapped_centroid();
    let samples: Vec<RampSample> = traj
        .samples
        .iter()
        .zip(&unwrapped)
        .map(|(s, &(_, theta))| RampSample {
            t: s.t,
            alpha: s.alpha,
            centroid: theta,
            angular_momentum: s.observables.angular_momentum,
            kinetic_angular_momentum: s.observables.kinetic_angular_momentum,
            contrast: s.observables.contrast,
        })
        .collect();
    let window: Vec<&RampSample> = samples
        .iter()
        .filter(|s| s.t >= RAMP_FIT_WINDOW.0 - 1e-9 && s.t <= RAMP_FIT_WINDOW.1 + 1e-9)
        .collect();
    let points: Vec<(f64, f64)> = window.iter().map(|s| (s.t, s.centroid)).collect();
    let omega_fit = fit_line(&points)
        .ok_or_else(|| Error::Contract("too few samples in the fit window".into()))?
        .slope;
    let kinetic = window.iter().map(|s| s.kinetic_angular_momentum).sum::<f64>() / window.len() as f64;

    let checks = ramp_checks(alpha_final, omega_fit, kinetic);
    Ok(RampReport {
        lambda,
        alpha_final,
        t_ramp,
        omega_fit,
        kinetic_angular_momentum: kinetic,
        initial_residual: start.state.residual,
        samples,
        checks,
    })
}

fn ramp_checks(alpha: f64, omega: f64, kinetic: f64) -> Vec<Check> {
    if alpha == 0.0 {
        return vec![
            Check::new(
                "no flux, no rotation",
                omega.abs() <= 1e-6,
                format!("omega_fit = {omega:.3e}, required |omega| <= 1e-6"),
            ),
            Check::new(
                "no flux, no current",
                kinetic.abs() <= 1e-6,
                format!("kinetic angular momentum = {kinetic:.3e}, required <= 1e-6"),
            ),
        ];
    }
    let a = alpha.abs();
    vec![
        Check::new(
            "angular velocity magnitude",
            (omega.abs() - a).abs() <= 0.10 * a,
            format!("|omega_fit| = {:.5}, expected {a} +- 10%", omega.abs()),
        ),
        Check::new(
            "rotation opposes flux",
            omega.signum() == -alpha.signum() && omega.signum() == kinetic.signum(),
            format!("omega_fit = {omega:+.5}, kinetic angular momentum = {kinetic:+.5}, alpha_final = {alpha:+}"),
        ),
        Check::new(
            "kinetic angular momentum",
            (kinetic.abs() - a).abs() <= 0.05 * a,
            format!("|<-i d/dphi - alpha>| = {:.5}, expected {a} +- 5%", kinetic.abs()),
        ),
    ]
}
