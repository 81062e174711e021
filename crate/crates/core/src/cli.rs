//! Command-line front end: one subcommand per experiment.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::records::{write_json, write_plot_data};
use crate::harness::{
    self, all_passed, Check, HarnessConfig, SweepTable, RAMP_FIT_WINDOW, RAMP_T_FINAL,
};
use crate::solver::SolverConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable that takes precedence over `--out`.
pub const OUT_ENV: &str = "RING_CRYSTAL_OUT";

/// A list of reals written as `start:stop:count` (inclusive, evenly
/// spaced), a comma-separated list, or a single value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let num = |t: &str| -> std::result::Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("not a number: {t:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("not finite: {t:?}"))
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, count] => {
                let (a, b) = (num(start)?, num(stop)?);
                let n: usize = count
                    .trim()
                    .parse()
                    .map_err(|_| format!("count must be a positive integer: {count:?}"))?;
                match n {
                    0 => Err("count must be at least 1".into()),
                    1 if a != b => Err("count 1 needs start == stop".into()),
                    1 => Ok(Grid(vec![a])),
                    _ => {
                        let step = (b - a) / (n - 1) as f64;
                        let mut v: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
                        v[n - 1] = b;
                        Ok(Grid(v))
                    }
                }
            }
            [single] => single
                .split(',')
                .map(num)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Grid),
            _ => Err(format!("expected start:stop:count or a comma list, got {s:?}")),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&items.join(","))
    }
}

#[derive(Debug, Parser)]
#[command(name = "ring-crystal", version, about = "Attractive bosons on a ring threaded by a flux")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Solver and output options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Grid points, a power of two >= 64.
    #[arg(long, default_value = "256")]
    pub n_points: usize,
    /// Imaginary-time step.
    #[arg(long, default_value = "1e-3")]
    pub dtau: f64,
    /// Real-time step.
    #[arg(long, default_value = "1e-3")]
    pub dt: f64,
    /// Seed of the symmetry-breaking noise.
    #[arg(long, default_value = "42")]
    pub seed: u64,
    /// Iteration cap of the ground-state search.
    #[arg(long, default_value = "2000000")]
    pub max_iters: usize,
    /// Residual ||(H - mu) psi|| for convergence [default: 1e-9; asymptotic: 1e-11].
    #[arg(long)]
    pub residual_tol: Option<f64>,
    /// Per-step energy change for convergence.
    #[arg(long, default_value = "1e-13")]
    pub energy_tol: f64,
    /// Per-step energy change that ends the split-step phase.
    #[arg(long, default_value = "1e-10")]
    pub split_tol: f64,
    /// Amplitude of the initial noise.
    #[arg(long, default_value = "1e-3")]
    pub noise_amplitude: f64,
    /// Output directory; RING_CRYSTAL_OUT takes precedence.
    #[arg(long, default_value = "ring-crystal-out")]
    pub out: PathBuf,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Record wall-clock time per point (tables stop being byte-reproducible).
    #[arg(long)]
    pub timing: bool,
}

impl Common {
    fn solver(&self, default_residual_tol: f64) -> SolverConfig {
        SolverConfig {
            n_points: self.n_points,
            dtau: self.dtau,
            dt: self.dt,
            max_iters: self.max_iters,
            residual_tol: self.residual_tol.unwrap_or(default_residual_tol),
            energy_tol: self.energy_tol,
            split_tol: self.split_tol,
            seed: self.seed,
            noise_amplitude: self.noise_amplitude,
        }
    }

    fn harness(&self, default_residual_tol: f64) -> HarnessConfig {
        HarnessConfig {
            solver: self.solver(default_residual_tol),
            jobs: self.jobs,
            record_timing: self.timing,
        }
    }

    fn out_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.out.clone(),
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Ground state at one (lambda, alpha), cross-checked against closed forms.
    GroundState {
        #[arg(long, default_value = "5")]
        lambda: f64,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        alpha: f64,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Energy against flux at fixed coupling.
    FluxSweep {
        #[arg(long, default_value = "5")]
        lambda: f64,
        /// Fluxes within [-1, 1.5].
        #[arg(long, default_value = "0:0.5:9", allow_hyphen_values = true)]
        alphas: Grid,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Zero-flux lump threshold by contrast bisection.
    Threshold {
        /// Couplings bracketing the threshold.
        #[arg(long, default_value = "1.2:2.0:5")]
        lambdas: Grid,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// eps(1/2) - eps(0) at strong coupling against the asymptotic law.
    Asymptotic {
        /// Couplings within [5, 8].
        #[arg(long, default_value = "5:7:3")]
        lambdas: Grid,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Width and antipode tail of the zero-flux lump.
    Scaling {
        /// Couplings within [4, 12]; points above 8 use 1024 grid points.
        #[arg(long, default_value = "4:12:9")]
        lambdas: Grid,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Flux ramp on a zero-flux lump, plus stationarity of the half-flux state.
    Ramp {
        #[arg(long, default_value = "5")]
        lambda: f64,
        /// Final flux, |alpha| <= 1/2.
        #[arg(long, default_value = "0.3", allow_hyphen_values = true)]
        alpha: f64,
        /// Ramp duration.
        #[arg(long, default_value = "1")]
        t_ramp: f64,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Self-consistency of the closed-form half-flux state.
    AnalyticCheck {
        #[arg(long, default_value = "5")]
        lambda: f64,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::GroundState { common, .. }
            | Command::FluxSweep { common, .. }
            | Command::Threshold { common, .. }
            | Command::Asymptotic { common, .. }
            | Command::Scaling { common, .. }
            | Command::Ramp { common, .. }
            | Command::AnalyticCheck { common, .. } => common,
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain { .. } => EXIT_USAGE,
                _ => EXIT_CHECK_FAILED,
            }
        }
    }
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    version: &'static str,
    #[serde(flatten)]
    command: &'a Command,
    solver: SolverConfig,
}

/// Runs one subcommand; `Ok(false)` means a check failed.
pub fn execute(command: &Command) -> Result<bool> {
    let common = command.common();
    let residual_default = match command {
        Command::Asymptotic { .. } => 1e-11,
        _ => SolverConfig::default().residual_tol,
    };
    let hc = common.harness(residual_default);
    let out = common.out_dir();
    write_json(
        &out.join("config.json"),
        &ConfigEcho {
            version: env!("CARGO_PKG_VERSION"),
            command,
            solver: hc.solver,
        },
    )?;
    hc.solver.validate()?;

    let checks = match command {
        Command::GroundState { lambda, alpha, .. } => ground_state(&out, *lambda, *alpha, &hc)?,
        Command::FluxSweep { lambda, alphas, .. } => flux_sweep(&out, *lambda, &alphas.0, &hc)?,
        Command::Threshold { lambdas, .. } => threshold(&out, &lambdas.0, &hc)?,
        Command::Asymptotic { lambdas, .. } => asymptotic(&out, &lambdas.0, &hc)?,
        Command::Scaling { lambdas, .. } => scaling(&out, &lambdas.0, &hc)?,
        Command::Ramp {
            lambda,
            alpha,
            t_ramp,
            ..
        } => ramp(&out, *lambda, *alpha, *t_ramp, &hc)?,
        Command::AnalyticCheck { lambda, .. } => analytic(&out, *lambda, common.n_points)?,
    };
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("artifacts in {}", out.display());
    Ok(all_passed(&checks))
}

fn write_table(out: &Path, stem: &str, table: &SweepTable) -> Result<()> {
    table.write_csv(&out.join(format!("{stem}.csv")))?;
    table.write_json_sidecar(&out.join(format!("{stem}.json")))
}

fn ground_state(out: &Path, lambda: f64, alpha: f64, hc: &HarnessConfig) -> Result<Vec<Check>> {
    let r = harness::ground_state_report(lambda, alpha, hc)?;
    println!("lambda = {lambda}, alpha = {alpha}, N = {}", r.n_points);
    println!("eps      = {:.15}", r.eps);
    println!("mu       = {:.15}", r.mu);
    println!("residual = {:.3e} ({} iterations)", r.residual, r.iterations);
    println!("contrast = {:.6e}, FWHM = {:.6}", r.contrast, r.shape.fwhm);
    if let Some(a) = r.eps_analytic {
        println!("eps closed form = {a:.15}");
    }
    write_plot_data(&out.join("profile.dat"), "phi density (peak at pi)", &r.profile)?;
    if let Some(p) = &r.analytic_profile {
        write_plot_data(&out.join("analytic_profile.dat"), "phi density (closed form)", p)?;
    }
    write_json(&out.join("ground_state.json"), &r)?;
    Ok(r.checks)
}

fn flux_sweep(out: &Path, lambda: f64, alphas: &[f64], hc: &HarnessConfig) -> Result<Vec<Check>> {
    let r = harness::flux_sweep(lambda, alphas, hc)?;
    println!("lambda = {lambda}, eps(0) = {:.15}", r.eps_zero_flux);
    println!("{:>10} {:>20} {:>20} {:>12}", "alpha", "eps", "eps_wilczek", "residual");
    for rec in &r.table.records {
        println!(
            "{:>10.6} {:>20.15} {:>20} {:>12.3e}{}",
            rec.alpha,
            rec.eps_numeric,
            rec.eps_wilczek.map_or("-".into(), |w| format!("{w:.15}")),
            rec.residual,
            if rec.converged { "" } else { "  (unconverged)" }
        );
    }
    write_table(out, "flux_sweep", &r.table)?;
    let curve = |f: &dyn Fn(&harness::SweepRecord) -> Option<f64>| -> Vec<(f64, f64)> {
        r.table.records.iter().filter_map(|x| f(x).map(|y| (x.alpha, y))).collect()
    };
    write_plot_data(&out.join("eps_numeric.dat"), "alpha eps_numeric", &curve(&|x| Some(x.eps_numeric)))?;
    write_plot_data(&out.join("eps_wilczek.dat"), "alpha eps_wilczek", &curve(&|x| x.eps_wilczek))?;
    write_plot_data(
        &out.join("eps_uniform_best.dat"),
        "alpha eps_uniform_best",
        &curve(&|x| Some(x.eps_uniform_best)),
    )?;
    Ok(r.checks)
}

fn threshold(out: &Path, lambdas: &[f64], hc: &HarnessConfig) -> Result<Vec<Check>> {
    let r = harness::threshold_scan(lambdas, hc)?;
    println!(
        "lambda_c = {:.5} (bracket [{:.5}, {:.5}], {} solves)",
        r.estimate,
        r.bracket.0,
        r.bracket.1,
        r.evaluations.len()
    );
    write_table(out, "threshold", &r.table)?;
    let mut pts: Vec<(f64, f64)> = r.evaluations.iter().map(|e| (e.0, e.1)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    write_plot_data(&out.join("contrast.dat"), "lambda density_contrast", &pts)?;
    write_json(&out.join("threshold_report.json"), &r)?;
    Ok(r.checks)
}

fn asymptotic(out: &Path, lambdas: &[f64], hc: &HarnessConfig) -> Result<Vec<Check>> {
    let r = harness::asymptotic_check(lambdas, hc)?;
    println!(
        "{:>6} {:>14} {:>14} {:>9} {:>11}",
        "lambda", "delta_eps", "formula", "ratio", "noise"
    );
    for p in &r.points {
        println!(
            "{:>6} {:>14.6e} {:>14.6e} {:>9.4} {:>11.2e}{}",
            p.lambda,
            p.delta_eps,
            p.delta_eps_formula,
            p.ratio,
            p.noise_floor,
            if p.usable { "" } else { "  (unusable)" }
        );
    }
    write_table(out, "asymptotic", &r.table)?;
    let measured: Vec<(f64, f64)> = r.points.iter().map(|p| (p.lambda, p.delta_eps)).collect();
    let formula: Vec<(f64, f64)> = r.points.iter().map(|p| (p.lambda, p.delta_eps_formula)).collect();
    write_plot_data(&out.join("delta_eps.dat"), "lambda delta_eps_measured", &measured)?;
    write_plot_data(&out.join("delta_eps_formula.dat"), "lambda delta_eps_formula", &formula)?;
    write_json(&out.join("asymptotic_report.json"), &r)?;
    Ok(r.checks)
}

fn scaling(out: &Path, lambdas: &[f64], hc: &HarnessConfig) -> Result<Vec<Check>> {
    let r = harness::lump_scaling_scan(lambdas, hc)?;
    println!("{:>6} {:>6} {:>12} {:>14}", "lambda", "N", "fwhm", "antipode");
    for p in &r.points {
        println!(
            "{:>6} {:>6} {:>12.6} {:>14.6e}{}",
            p.lambda,
            p.n_points,
            p.fwhm,
            p.antipode_amplitude,
            if p.converged && p.resolved { "" } else { "  (flagged)" }
        );
    }
    write_table(out, "scaling", &r.table)?;
    let fwhm: Vec<(f64, f64)> = r.points.iter().map(|p| (p.lambda, p.fwhm)).collect();
    let tail: Vec<(f64, f64)> = r
        .points
        .iter()
        .map(|p| (p.lambda, p.antipode_amplitude.ln()))
        .collect();
    write_plot_data(&out.join("fwhm.dat"), "lambda fwhm", &fwhm)?;
    write_plot_data(&out.join("antipode.dat"), "lambda ln_antipode_amplitude", &tail)?;
    write_json(&out.join("scaling_report.json"), &r)?;
    Ok(r.checks)
}

fn ramp(out: &Path, lambda: f64, alpha: f64, t_ramp: f64, hc: &HarnessConfig) -> Result<Vec<Check>> {
    let r = harness::flux_ramp_experiment(lambda, alpha, t_ramp, hc)?;
    println!(
        "omega_fit = {:+.6} over t in [{}, {}] (t_final {RAMP_T_FINAL}), kinetic angular momentum = {:+.6}",
        r.omega_fit, RAMP_FIT_WINDOW.0, RAMP_FIT_WINDOW.1, r.kinetic_angular_momentum
    );
    let centroid: Vec<(f64, f64)> = r.samples.iter().map(|s| (s.t, s.centroid)).collect();
    let momentum: Vec<(f64, f64)> = r.samples.iter().map(|s| (s.t, s.angular_momentum)).collect();
    let kinetic: Vec<(f64, f64)> = r
        .samples
        .iter()
        .map(|s| (s.t, s.kinetic_angular_momentum))
        .collect();
    write_plot_data(&out.join("ramp_centroid.dat"), "t centroid_angle", &centroid)?;
    write_plot_data(&out.join("ramp_angular_momentum.dat"), "t angular_momentum", &momentum)?;
    write_plot_data(
        &out.join("ramp_kinetic_angular_momentum.dat"),
        "t kinetic_angular_momentum",
        &kinetic,
    )?;
    write_json(&out.join("ramp_report.json"), &r)?;

    let s = harness::half_flux_stationarity(lambda, RAMP_T_FINAL, hc)?;
    println!(
        "half-flux state: density drift {:.3e}, norm drift {:.3e}, energy drift {:.3e}",
        s.max_density_drift, s.max_norm_drift, s.max_energy_drift
    );
    write_json(&out.join("stationarity_report.json"), &s)?;
    Ok(r.checks.into_iter().chain(s.checks).collect())
}

fn analytic(out: &Path, lambda: f64, n_points: usize) -> Result<Vec<Check>> {
    let r = harness::analytic_check(lambda, n_points)?;
    println!("lambda = {lambda}: k = {:.15}, K = {:.15}, E = {:.15}", r.k, r.big_k, r.big_e);
    println!("mu = {:.15}, eps = {:.15}", r.mu, r.eps);
    write_json(&out.join("analytic_check.json"), &r)?;
    Ok(r.checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!("0:0.5:3".parse::<Grid>().unwrap().0, vec![0.0, 0.25, 0.5]);
        assert_eq!("1.5".parse::<Grid>().unwrap().0, vec![1.5]);
        assert_eq!("1,2.5,-1".parse::<Grid>().unwrap().0, vec![1.0, 2.5, -1.0]);
        assert_eq!("2:2:1".parse::<Grid>().unwrap().0, vec![2.0]);
        let g = "0:0.3:7".parse::<Grid>().unwrap().0;
        assert_eq!(g.len(), 7);
        assert_eq!(*g.last().unwrap(), 0.3);
        for bad in ["", "1:2", "1:2:0", "a:2:3", "1:2:3:4", "1:2:1", "nan", "1,,2"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_values_parse() {
        let cli = Cli::try_parse_from(["ring-crystal", "flux-sweep", "--alphas", "-1,-0.5,0.25"]).unwrap();
        match cli.command {
            Command::FluxSweep { alphas, .. } => assert_eq!(alphas.0, vec![-1.0, -0.5, 0.25]),
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from(["ring-crystal", "ground-state", "--alpha", "-0.3"]).unwrap();
        assert!(matches!(cli.command, Command::GroundState { alpha, .. } if alpha == -0.3));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(run(["ring-crystal", "ground-state", "--bogus", "1"]), EXIT_USAGE);
        assert_eq!(run(["ring-crystal", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["ring-crystal", "flux-sweep", "--alphas", "0:1"]), EXIT_USAGE);
    }
}
