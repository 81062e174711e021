//! Flux sweeps and the zero-flux threshold scan.

use std::f64::consts::PI;

use serde::Serialize;

use crate::analytic::{canonical_alpha, critical_coupling, uniform_branch_best};
use crate::error::{Error, Result};

use super::records::{SweepTable, TableMetadata};
use super::{max_pair_gap, solve_point, sweep_record, Check, HarnessConfig, Solved};

/// Density contrast separating the uniform state from a lump.
pub const THRESHOLD_CONTRAST: f64 = 1e-3;

/// Bracket width at which the threshold bisection stops.
pub const THRESHOLD_WIDTH: f64 = 0.01;

const ALPHA_RANGE: (f64, f64) = (-1.0, 1.5);

/// Largest `|α|` (reduced to one period) at which the uniform winding-zero
/// state is still a local minimum: the `q = ±1` Bogoliubov branch
/// `√(½(½ − λ/π)) − |α|` stays positive. `None` above `λ = π/2`.
pub fn uniform_stability_bound(lambda: f64) -> Option<f64> {
    let s = 0.25 - lambda / (2.0 * PI);
    (s > 0.0).then(|| s.sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct FluxSweepReport {
    pub lambda: f64,
    pub eps_zero_flux: f64,
    pub reference_converged: bool,
    pub table: SweepTable,
    pub checks: Vec<Check>,
}

/// Ground states at `lambda` for every flux in `alphas` (within `[−1, 3/2]`).
///
/// The zero-flux state is always solved as the reference for `eps_wilczek`
/// and `delta_eps`; it only enters the table if `0` is among `alphas`.
/// Unconverged points are kept and flagged, and skipped by the checks.
pub fn flux_sweep(lambda: f64, alphas: &[f64], hc: &HarnessConfig) -> Result<FluxSweepReport> {
    if let Some(&a) = alphas
        .iter()
        .find(|a| !(a.is_finite() && **a >= ALPHA_RANGE.0 && **a <= ALPHA_RANGE.1))
    {
        return Err(Error::domain("alpha", a, "flux within [-1, 1.5]"));
    }
    let mut points: Vec<f64> = alphas.to_vec();
    points.push(0.0);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let solved = hc.par_map(&points, |&a| solve_point(lambda, a, &hc.solver))?;
    let reference = solved
        .iter()
        .find(|s| s.alpha == 0.0)
        .expect("zero flux is always solved");
    let reference_converged = reference.state.converged;
    let eps0 = reference.state.eps;

    let meta = TableMetadata::new(
        "flux_sweep",
        &serde_json::json!({ "solver": hc.solver, "lambda": lambda, "alphas": alphas }),
        hc.solver.seed,
    )?;
    let mut table = SweepTable::new(meta);
    for s in solved.iter().filter(|s| alphas.contains(&s.alpha)) {
        table.push(sweep_record(s, reference_converged.then_some(eps0), hc.record_timing)?)?;
    }
    table.sort();
    let checks = flux_sweep_checks(lambda, &table, reference_converged);
    Ok(FluxSweepReport {
        lambda,
        eps_zero_flux: eps0,
        reference_converged,
        table,
        checks,
    })
}

fn flux_sweep_checks(lambda: f64, table: &SweepTable, reference_converged: bool) -> Vec<Check> {
    let mut checks = Vec::new();
    let total = table.records.len();
    let good: Vec<_> = table.converged().collect();
    checks.push(Check::new(
        "converged",
        good.len() == total && reference_converged,
        format!(
            "{}/{} points converged, zero-flux reference converged: {}",
            good.len(),
            total,
            reference_converged
        ),
    ));

    let margins: Vec<f64> = good
        .iter()
        .filter_map(|r| r.eps_wilczek.map(|w| w - r.eps_numeric))
        .collect();
    if let Some(worst) = margins.iter().copied().reduce(f64::min) {
        checks.push(Check::new(
            "wilczek branch never below ground state",
            worst >= -1e-9,
            format!("min(eps_wilczek - eps_numeric) = {worst:.3e}, required >= -1e-9"),
        ));
    }

    let analytic: Vec<f64> = good
        .iter()
        .filter_map(|r| r.eps_analytic_half_flux.map(|a| (r.eps_numeric - a).abs()))
        .collect();
    if let Some(worst) = analytic.iter().copied().reduce(f64::max) {
        checks.push(Check::new(
            "half flux matches closed form",
            worst <= 1e-8,
            format!("max |eps_numeric - eps_analytic| = {worst:.3e}, required <= 1e-8"),
        ));
    }

    let (gap, pairs) = max_pair_gap(&good, |a, b| b.alpha == a.alpha + 1.0);
    if pairs > 0 {
        checks.push(Check::new(
            "period one in flux",
            gap <= 2e-9,
            format!("max |eps(a) - eps(a+1)| = {gap:.3e} over {pairs} pairs, required <= 2e-9"),
        ));
    }
    let (gap, pairs) = max_pair_gap(&good, |a, b| a.alpha > 0.0 && b.alpha == -a.alpha);
    if pairs > 0 {
        checks.push(Check::new(
            "even in flux",
            gap <= 2e-9,
            format!("max |eps(a) - eps(-a)| = {gap:.3e} over {pairs} pairs, required <= 2e-9"),
        ));
    }

    if let Some(bound) = uniform_stability_bound(lambda) {
        let inside: Vec<f64> = good
            .iter()
            .filter(|r| canonical_alpha(r.alpha).abs() < bound)
            .map(|r| (r.eps_numeric - uniform_branch_best(lambda, r.alpha).1).abs())
            .collect();
        if let Some(worst) = inside.iter().copied().reduce(f64::max) {
            checks.push(Check::new(
                "uniform branch below threshold",
                worst <= 1e-9,
                format!(
                    "max |eps_numeric - eps_uniform| = {worst:.3e} for |alpha| < {bound:.4}, required <= 1e-9"
                ),
            ));
        }
    }
    checks
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub estimate: f64,
    /// Final `(below, above)` bracket.
    pub bracket: (f64, f64),
    /// Every evaluation as `(λ, contrast, converged)`, in evaluation order.
    pub evaluations: Vec<(f64, f64, bool)>,
    pub table: SweepTable,
    pub checks: Vec<Check>,
}

/// Locates the zero-flux lump threshold.
///
/// The contrast is evaluated on `lambdas`; the first neighbouring pair where
/// it crosses [`THRESHOLD_CONTRAST`] is bisected down to
/// [`THRESHOLD_WIDTH`] and the midpoint reported.
pub fn threshold_scan(lambdas: &[f64], hc: &HarnessConfig) -> Result<ThresholdReport> {
    let mut grid: Vec<f64> = lambdas.to_vec();
    if let Some(&l) = grid.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::domain("lambda", l, "finite lambda >= 0"));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut solved: Vec<Solved> = hc.par_map(&grid, |&l| solve_point(l, 0.0, &hc.solver))?;
    let lump = |s: &Solved| s.state.density_contrast() > THRESHOLD_CONTRAST;
    let start = solved
        .windows(2)
        .position(|w| !lump(&w[0]) && lump(&w[1]))
        .ok_or_else(|| {
            let summary: Vec<String> = solved
                .iter()
                .map(|s| format!("{}:{:.2e}", s.lambda, s.state.density_contrast()))
                .collect();
            Error::NoBracket(format!(
                "density contrast never crosses {THRESHOLD_CONTRAST} upward on lambda grid [{}]",
                summary.join(", ")
            ))
        })?;
    let (mut lo, mut hi) = (solved[start].lambda, solved[start + 1].lambda);

    let mut extra = Vec::new();
    while hi - lo > THRESHOLD_WIDTH {
        let mid = 0.5 * (lo + hi);
        let s = solve_point(mid, 0.0, &hc.solver)?;
        if lump(&s) {
            hi = mid;
        } else {
            lo = mid;
        }
        extra.push(s);
    }
    solved.extend(extra);

    let evaluations = solved
        .iter()
        .map(|s| (s.lambda, s.state.density_contrast(), s.state.converged))
        .collect();
    let meta = TableMetadata::new(
        "threshold_scan",
        &serde_json::json!({
            "solver": hc.solver,
            "lambdas": lambdas,
            "contrast": THRESHOLD_CONTRAST,
            "width": THRESHOLD_WIDTH,
        }),
        hc.solver.seed,
    )?;
    let mut table = SweepTable::new(meta);
    for s in &solved {
        let eps0 = s.state.converged.then_some(s.state.eps);
        table.push(sweep_record(s, eps0, hc.record_timing)?)?;
    }
    table.sort();

    let estimate = 0.5 * (lo + hi);
    let target = critical_coupling();
    let checks = vec![Check::new(
        "threshold near pi/2",
        (estimate - target).abs() <= 0.05,
        format!("lambda_c = {estimate:.4} in [{lo:.4}, {hi:.4}], expected {target:.4} +- 0.05"),
    )];
    Ok(ThresholdReport {
        estimate,
        bracket: (lo, hi),
        evaluations,
        table,
        checks,
    })
}
