//! Pseudospectral solver for the nonlinear Schrödinger equation on the ring.

mod dynamics;
mod ground_state;
mod hamiltonian;
mod spectral;

pub use dynamics::{
    linear_ramp, real_time_evolve, real_time_evolve_sampled, Observables, RealTimePropagator,
    Sample, Scheme, Trajectory, CENTROID_CONTRAST_MIN, MAX_NORM_DRIFT,
};
pub use ground_state::{imaginary_time_ground_state, ImaginaryTime, Phase};
pub use hamiltonian::{apply_hamiltonian, energy_and_mu, gauge_transform, residual_norm};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::WaveField;

/// Numerical settings shared by the imaginary- and real-time solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_points: usize,
    /// Imaginary-time step of the split-step phase.
    pub dtau: f64,
    /// Real-time step.
    pub dt: f64,
    /// Cap on split-step plus refinement iterations.
    pub max_iters: usize,
    /// `‖(H − μ)ψ‖` needed to call a state converged.
    pub residual_tol: f64,
    /// Per-iteration energy change needed to call a state converged.
    pub energy_tol: f64,
    /// Per-step energy change that hands the split-step phase over to refinement.
    pub split_tol: f64,
    pub seed: u64,
    pub noise_amplitude: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_points: 256,
            dtau: 1e-3,
            dt: 1e-3,
            max_iters: 2_000_000,
            residual_tol: 1e-9,
            energy_tol: 1e-13,
            split_tol: 1e-10,
            seed: 42,
            noise_amplitude: 1e-3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dtau", self.dtau),
            ("dt", self.dt),
            ("residual_tol", self.residual_tol),
            ("energy_tol", self.energy_tol),
            ("split_tol", self.split_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(name, v, "finite and > 0"));
            }
        }
        if !(self.noise_amplitude.is_finite() && self.noise_amplitude >= 0.0) {
            return Err(Error::domain("noise_amplitude", self.noise_amplitude, "finite and >= 0"));
        }
        if self.max_iters == 0 {
            return Err(Error::domain("max_iters", 0.0, ">= 1"));
        }
        crate::field::RingGrid::new(self.n_points)?;
        Ok(())
    }

    pub fn with_n_points(mut self, n_points: usize) -> Self {
        self.n_points = n_points;
        self
    }
}

/// A converged (or flagged unconverged) stationary state in the lab frame.
#[derive(Debug, Clone)]
pub struct StationaryState {
    pub field: WaveField,
    pub mu: f64,
    pub eps: f64,
    /// `‖(H − μ)ψ‖` in L².
    pub residual: f64,
    pub iterations: usize,
    /// Iterations spent in the split-step phase.
    pub split_iterations: usize,
    pub converged: bool,
}

impl StationaryState {
    pub fn density_contrast(&self) -> f64 {
        self.field.density_contrast()
    }
}
