//! Scripted experiments, their checks, and result persistence.

mod asymptotic;
mod checks;
pub mod profile;
mod ramp;
pub mod records;
mod scaling;
mod sweep;

pub use asymptotic::{asymptotic_check, AsymptoticPoint, AsymptoticReport, SlopePoint};
pub use checks::{
    analytic_check, ground_state_report, half_flux_stationarity, AnalyticCheckReport,
    GroundStateReport, StationarityReport,
};
pub use ramp::{flux_ramp_experiment, RampReport, RAMP_FIT_WINDOW, RAMP_T_FINAL};
pub use records::{SweepRecord, SweepTable, TableMetadata};
pub use scaling::{lump_scaling_scan, ScalingPoint, ScalingReport};
pub use sweep::{
    flux_sweep, threshold_scan, uniform_stability_bound, FluxSweepReport, ThresholdReport,
    THRESHOLD_CONTRAST, THRESHOLD_WIDTH,
};

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    asymptotic_delta_energy, canonical_alpha, uniform_branch_best, wilczek_rotating_energy,
    HalfFluxAnalytic, RingProblem,
};
use crate::error::{Error, Result};
use crate::solver::{imaginary_time_ground_state, SolverConfig, StationaryState};

/// Solver settings plus scheduling options for a batch of experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub solver: SolverConfig,
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
    /// Fill `wall_time_s`; off by default so tables are byte-reproducible.
    pub record_timing: bool,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            jobs: None,
            record_timing: false,
        }
    }
}

impl HarnessConfig {
    pub fn with_solver(solver: SolverConfig) -> Self {
        Self {
            solver,
            ..Self::default()
        }
    }

    /// Maps `f` over `items` on a bounded pool, keeping input order.
    fn par_map<T, U, F>(&self, items: &[T], f: F) -> Result<Vec<U>>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> Result<U> + Sync + Send,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.unwrap_or(0))
            .build()
            .map_err(|e| Error::Contract(format!("worker pool: {e}")))?;
        pool.install(|| items.par_iter().map(&f).collect())
    }
}

/// One named pass/fail verdict with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// A solved point and how long it took.
#[derive(Debug, Clone)]
pub struct Solved {
    pub lambda: f64,
    pub alpha: f64,
    pub state: StationaryState,
    pub wall_time_s: f64,
}

pub fn solve_point(lambda: f64, alpha: f64, config: &SolverConfig) -> Result<Solved> {
    let problem = RingProblem::new(lambda, alpha)?;
    let start = Instant::now();
    let state = imaginary_time_ground_state(&problem, config)?;
    Ok(Solved {
        lambda,
        alpha,
        state,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Closed-form half-flux energy when `alpha` is a half-integer.
fn analytic_half_flux_eps(lambda: f64, alpha: f64) -> Result<Option<f64>> {
    if canonical_alpha(alpha) == 0.5 && lambda > 0.0 {
        Ok(Some(HalfFluxAnalytic::for_coupling(lambda)?.eps))
    } else {
        Ok(None)
    }
}

/// Builds the table row for `s`; `eps_zero_flux` is the converged `ε(0)`
/// at the same coupling, if there is one.
fn sweep_record(s: &Solved, eps_zero_flux: Option<f64>, timing: bool) -> Result<SweepRecord> {
    let eps = s.state.eps;
    Ok(SweepRecord {
        lambda: s.lambda,
        alpha: s.alpha,
        eps_numeric: eps,
        eps_uniform_best: uniform_branch_best(s.lambda, s.alpha).1,
        eps_wilczek: eps_zero_flux.map(|e0| wilczek_rotating_energy(e0, s.alpha)),
        eps_analytic_half_flux: analytic_half_flux_eps(s.lambda, s.alpha)?,
        delta_eps: eps_zero_flux.map(|e0| eps - e0),
        delta_eps_asymptotic: asymptotic_delta_energy(s.lambda, s.alpha),
        residual: s.state.residual,
        converged: s.state.converged,
        n_points: s.state.field.grid().n_points(),
        wall_time_s: if timing { s.wall_time_s } else { 0.0 },
    })
}

/// `(max |a − b|, number of pairs)` over pairs selected by `pair`.
fn max_pair_gap(
    records: &[&SweepRecord],
    pair: impl Fn(&SweepRecord, &SweepRecord) -> bool,
) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut count = 0;
    for a in records {
        for b in records {
            if pair(a, b) {
                worst = worst.max((a.eps_numeric - b.eps_numeric).abs());
                count += 1;
            }
        }
    }
    (worst, count)
}
