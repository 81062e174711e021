//! Strong-coupling flux dependence of the ground-state energy.

use serde::Serialize;

use crate::analytic::{asymptotic_delta_energy, HalfFluxAnalytic};
use crate::error::{Error, Result};

use super::records::{SweepTable, TableMetadata};
use super::{solve_point, sweep_record, Check, HarnessConfig};

const LAMBDA_RANGE: (f64, f64) = (5.0, 8.0);
const MAX_RESIDUAL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticPoint {
    pub lambda: f64,
    pub eps_zero_flux: f64,
    pub eps_half_flux_analytic: f64,
    pub eps_half_flux_numeric: f64,
    /// `ε_analytic(½) − ε_numeric(0)`.
    pub delta_eps: f64,
    pub delta_eps_formula: f64,
    /// `delta_eps / delta_eps_formula`.
    pub ratio: f64,
    /// `|ε_numeric(½) − ε_analytic(½)|`, the resolution of the difference.
    pub noise_floor: f64,
    /// Converged and `|Δε|` at least ten times the noise floor.
    pub usable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopePoint {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    /// Finite-difference `d ln|Δε| / dλ` of the measurements.
    pub measured: f64,
    /// The same difference of `ln|formula|`: `−π + 2 ln(λ′/λ)/(λ′ − λ)`.
    pub predicted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub points: Vec<AsymptoticPoint>,
    pub slopes: Vec<SlopePoint>,
    pub table: SweepTable,
    pub checks: Vec<Check>,
}

/// Measures `Δε = ε(½) − ε(0)` for each coupling in `lambdas ⊂ [5, 8]`.
///
/// `ε(0)` comes from the solver and `ε(½)` from the closed form; the solver
/// value at half flux, taken with the same grid and tolerances, sets the
/// noise floor. Requires `residual_tol <= 1e-11`.
pub fn asymptotic_check(lambdas: &[f64], hc: &HarnessConfig) -> Result<AsymptoticReport> {
    if hc.solver.residual_tol > MAX_RESIDUAL_TOL {
        return Err(Error::domain(
            "residual_tol",
            hc.solver.residual_tol,
            "residual_tol <= 1e-11 for the asymptotic check",
        ));
    }
    let mut grid = lambdas.to_vec();
    if let Some(&l) = grid
        .iter()
        .find(|l| !(**l >= LAMBDA_RANGE.0 && **l <= LAMBDA_RANGE.1))
    {
        return Err(Error::domain("lambda", l, "lambda within [5, 8]"));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let jobs: Vec<(f64, f64)> = grid.iter().flat_map(|&l| [(l, 0.0), (l, 0.5)]).collect();
    let solved = hc.par_map(&jobs, |&(l, a)| solve_point(l, a, &hc.solver))?;

    let meta = TableMetadata::new(
        "asymptotic_check",
        &serde_json::json!({ "solver": hc.solver, "lambdas": lambdas }),
        hc.solver.seed,
    )?;
    let mut table = SweepTable::new(meta);
    let mut points = Vec::new();
    for pair in solved.chunks(2) {
        let (zero, half) = (&pair[0], &pair[1]);
        let lambda = zero.lambda;
        let analytic = HalfFluxAnalytic::for_coupling(lambda)?;
        let eps0 = zero.state.eps;
        let delta_eps = analytic.eps - eps0;
        let formula = asymptotic_delta_energy(lambda, 0.5);
        let noise_floor = (half.state.eps - analytic.eps).abs();
        let converged = zero.state.converged && half.state.converged;
        points.push(AsymptoticPoint {
            lambda,
            eps_zero_flux: eps0,
            eps_half_flux_analytic: analytic.eps,
            eps_half_flux_numeric: half.state.eps,
            delta_eps,
            delta_eps_formula: formula,
            ratio: delta_eps / formula,
            noise_floor,
            usable: converged && delta_eps.abs() >= 10.0 * noise_floor,
        });

        let reference = zero.state.converged.then_some(eps0);
        table.push(sweep_record(zero, reference, hc.record_timing)?)?;
        let mut rec = sweep_record(half, reference, hc.record_timing)?;
        rec.delta_eps = reference.map(|_| delta_eps);
        table.push(rec)?;
    }
    table.sort();

    let usable: Vec<&AsymptoticPoint> = points.iter().filter(|p| p.usable).collect();
    let slopes: Vec<SlopePoint> = usable
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let dl = b.lambda - a.lambda;
            SlopePoint {
                lambda_lo: a.lambda,
                lambda_hi: b.lambda,
                measured: (b.delta_eps.abs().ln() - a.delta_eps.abs().ln()) / dl,
                predicted: (b.delta_eps_formula.abs().ln() - a.delta_eps_formula.abs().ln()) / dl,
            }
        })
        .collect();

    let checks = asymptotic_checks(&points, &slopes);
    Ok(AsymptoticReport {
        points,
        slopes,
        table,
        checks,
    })
}

fn asymptotic_checks(points: &[AsymptoticPoint], slopes: &[SlopePoint]) -> Vec<Check> {
    let mut checks = Vec::new();
    let unusable: Vec<String> = points
        .iter()
        .filter(|p| !p.usable)
        .map(|p| format!("{}", p.lambda))
        .collect();
    checks.push(Check::new(
        "points usable",
        unusable.is_empty(),
        if unusable.is_empty() {
            format!("all {} points resolved above 10x noise floor", points.len())
        } else {
            format!("unusable at lambda = {}", unusable.join(", "))
        },
    ));

    let signs: Vec<String> = points
        .iter()
        .filter(|p| p.usable)
        .map(|p| format!("{}: {:+.4e}", p.lambda, p.delta_eps))
        .collect();
    checks.push(Check::new(
        "delta eps negative",
        points.iter().filter(|p| p.usable).all(|p| p.delta_eps < 0.0),
        format!("delta_eps = [{}], required < 0", signs.join(", ")),
    ));

    for s in slopes {
        let rel = (s.measured - s.predicted).abs() / s.predicted.abs();
        checks.push(Check::new(
            format!("log slope {}..{}", s.lambda_lo, s.lambda_hi),
            rel <= 0.10,
            format!(
                "measured {:.4}, predicted {:.4}, off by {:.2}%, allowed 10%",
                s.measured,
                s.predicted,
                100.0 * rel
            ),
        ));
    }

    for p in points.iter().filter(|p| p.usable) {
        checks.push(Check::new(
            format!("prefactor ratio at lambda={}", p.lambda),
            (0.5..=2.0).contains(&p.ratio),
            format!(
                "measured/formula = {:.4} ({:+.4e} / {:+.4e}), required in [0.5, 2.0]",
                p.ratio, p.delta_eps, p.delta_eps_formula
            ),
        ));
    }
    checks
}
