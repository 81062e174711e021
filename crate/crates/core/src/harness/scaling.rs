//! Width and tail of the zero-flux lump across couplings.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};

use super::profile::{fit_line, lump_shape, LineFit};
use super::records::{SweepTable, TableMetadata};
use super::{solve_point, sweep_record, Check, HarnessConfig};

const LAMBDA_RANGE: (f64, f64) = (4.0, 12.0);

/// Couplings whose antipode amplitude enters the slope fit.
pub const ANTIPODE_FIT_RANGE: (f64, f64) = (4.0, 10.0);

/// Grid used above `λ = 8`, where the lump is too narrow for 256 points.
pub const FINE_GRID: usize = 1024;

/// Fewest grid points across the half maximum for a resolved lump.
pub const MIN_POINTS_PER_WIDTH: f64 = 8.0;

/// Tail prefactor of the zero-flux state: its antipode amplitude tends to
/// `2√λ e^{−πλ/2}` as `λ → ∞`.
pub const ANTIPODE_PREFACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub lambda: f64,
    pub n_points: usize,
    pub fwhm: f64,
    pub antipode_amplitude: f64,
    pub eps: f64,
    pub converged: bool,
    /// FWHM spans at least [`MIN_POINTS_PER_WIDTH`] grid spacings.
    pub resolved: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// `(λ, 2λ, FWHM(2λ)/FWHM(λ))` for every doubling pair present.
    pub fwhm_ratios: Vec<(f64, f64, f64)>,
    /// `ln|ψ_antipode|` against `λ`.
    pub antipode_fit: Option<LineFit>,
    /// `ln(|ψ_antipode| / √λ)` against `λ`.
    pub compensated_fit: Option<LineFit>,
    pub table: SweepTable,
    pub checks: Vec<Check>,
}

fn grid_for(lambda: f64, base: usize) -> usize {
    if lambda > 8.0 {
        base.max(FINE_GRID)
    } else {
        base
    }
}

/// Zero-flux ground states over `lambdas ⊂ [4, 12]` with their FWHM and
/// antipode amplitude. Unresolved or unconverged points are kept but
/// left out of the fits.
pub fn lump_scaling_scan(lambdas: &[f64], hc: &HarnessConfig) -> Result<ScalingReport> {
    let mut grid = lambdas.to_vec();
    if let Some(&l) = grid
        .iter()
        .find(|l| !(**l >= LAMBDA_RANGE.0 && **l <= LAMBDA_RANGE.1))
    {
        return Err(Error::domain("lambda", l, "lambda within [4, 12]"));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let solved = hc.par_map(&grid, |&l| {
        let cfg = hc.solver.with_n_points(grid_for(l, hc.solver.n_points));
        solve_point(l, 0.0, &cfg)
    })?;

    let meta = TableMetadata::new(
        "lump_scaling_scan",
        &serde_json::json!({ "solver": hc.solver, "lambdas": lambdas, "fine_grid": FINE_GRID }),
        hc.solver.seed,
    )?;
    let mut table = SweepTable::new(meta);
    let mut points = Vec::new();
    for s in &solved {
        let shape = lump_shape(&s.state.field);
        let h = s.state.field.grid().spacing();
        points.push(ScalingPoint {
            lambda: s.lambda,
            n_points: s.state.field.grid().n_points(),
            fwhm: shape.fwhm,
            antipode_amplitude: shape.antipode_amplitude,
            eps: s.state.eps,
            converged: s.state.converged,
            resolved: shape.fwhm >= MIN_POINTS_PER_WIDTH * h,
        });
        let eps0 = s.state.converged.then_some(s.state.eps);
        table.push(sweep_record(s, eps0, hc.record_timing)?)?;
    }
    table.sort();

    let good: Vec<&ScalingPoint> = points.iter().filter(|p| p.converged && p.resolved).collect();
    let mut fwhm_ratios = Vec::new();
    for a in &good {
        if let Some(b) = good.iter().find(|b| b.lambda == 2.0 * a.lambda) {
            fwhm_ratios.push((a.lambda, b.lambda, b.fwhm / a.fwhm));
        }
    }
    let in_fit: Vec<&&ScalingPoint> = good
        .iter()
        .filter(|p| p.lambda >= ANTIPODE_FIT_RANGE.0 && p.lambda <= ANTIPODE_FIT_RANGE.1)
        .collect();
    let raw: Vec<(f64, f64)> = in_fit
        .iter()
        .map(|p| (p.lambda, p.antipode_amplitude.ln()))
        .collect();
    let compensated: Vec<(f64, f64)> = in_fit
        .iter()
        .map(|p| (p.lambda, (p.antipode_amplitude / p.lambda.sqrt()).ln()))
        .collect();
    let antipode_fit = fit_line(&raw);
    let compensated_fit = fit_line(&compensated);

    let checks = scaling_checks(&points, &fwhm_ratios, antipode_fit, compensated_fit);
    Ok(ScalingReport {
        points,
        fwhm_ratios,
        antipode_fit,
        compensated_fit,
        table,
        checks,
    })
}

fn scaling_checks(
    points: &[ScalingPoint],
    ratios: &[(f64, f64, f64)],
    raw: Option<LineFit>,
    compensated: Option<LineFit>,
) -> Vec<Check> {
    let mut checks = Vec::new();
    let flagged: Vec<String> = points
        .iter()
        .filter(|p| !(p.converged && p.resolved))
        .map(|p| format!("{} (converged {}, resolved {})", p.lambda, p.converged, p.resolved))
        .collect();
    checks.push(Check::new(
        "points converged and resolved",
        flagged.is_empty(),
        if flagged.is_empty() {
            format!("all {} points usable", points.len())
        } else {
            format!("flagged: {}", flagged.join("; "))
        },
    ));
    for &(a, b, r) in ratios {
        checks.push(Check::new(
            format!("fwhm ratio {a}->{b}"),
            (r - 0.5).abs() <= 0.05,
            format!("FWHM({b})/FWHM({a}) = {r:.4}, expected 0.5 +- 10%"),
        ));
    }
    let target = -FRAC_PI_2;
    if let Some(fit) = compensated {
        let rel = (fit.slope - target).abs() / FRAC_PI_2;
        checks.push(Check::new(
            "antipode log slope",
            rel <= 0.05,
            format!(
                "d ln(|psi_a|/sqrt(lambda))/d lambda = {:.4}, expected {:.4} +- 5% (off {:.2}%)",
                fit.slope,
                target,
                100.0 * rel
            ),
        ));
        let prefactor = fit.intercept.exp();
        let factor = (prefactor / ANTIPODE_PREFACTOR).max(ANTIPODE_PREFACTOR / prefactor);
        checks.push(Check::new(
            "antipode prefactor",
            factor <= 2.0,
            format!(
                "exp(intercept) = {prefactor:.4}, expected {ANTIPODE_PREFACTOR} within a factor 2"
            ),
        ));
    }
    if let Some(fit) = raw {
        let rel = (fit.slope - target).abs() / FRAC_PI_2;
        checks.push(Check::new(
            "antipode raw log slope",
            rel <= 0.05,
            format!(
                "d ln|psi_a|/d lambda = {:.4} without the sqrt(lambda) term, expected {:.4} +- 5% (off {:.2}%)",
                fit.slope,
                target,
                100.0 * rel
            ),
        ));
    }
    checks
}
