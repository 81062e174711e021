use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::RingGrid;

/// Forward/inverse FFT pair for one ring grid, with its own scratch space.
///
/// `forward` is unnormalized; `inverse` divides by `N`, so the pair is an
/// exact round trip up to rounding.
pub(crate) struct Spectral {
    grid: RingGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    modes: Vec<f64>,
}

impl Spectral {
    pub(crate) fn new(grid: RingGrid) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            forward,
            inverse,
            scratch: vec![Complex64::default(); len],
            modes: (0..n).map(|j| grid.mode(j)).collect(),
        }
    }

    #[inline]
    pub(crate) fn grid(&self) -> RingGrid {
        self.grid
    }

    /// Integer mode numbers in FFT bin order.
    #[inline]
    pub(crate) fn modes(&self) -> &[f64] {
        &self.modes
    }

    pub(crate) fn forward(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    pub(crate) fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
    }

    /// Multiplies the Fourier coefficients of `buf` by `multiplier[bin]`.
    pub(crate) fn apply_diagonal<T>(&mut self, buf: &mut [Complex64], multiplier: &[T])
    where
        T: Copy + std::ops::Mul<Complex64, Output = Complex64>,
    {
        self.forward(buf);
        buf.iter_mut()
            .zip(multiplier)
            .for_each(|(z, &m)| *z = m * *z);
        self.inverse(buf);
    }

    /// `½ Σ (n − α)² |c_n|²` scaled so it equals `½∫|(−i∂ − α)ψ|² dφ`.
    ///
    /// `coeffs` are unnormalized forward-FFT coefficients.
    pub(crate) fn kinetic_from_coeffs(&self, coeffs: &[Complex64], alpha: f64) -> f64 {
        let n = coeffs.len() as f64;
        let sum: f64 = coeffs
            .iter()
            .zip(&self.modes)
            .map(|(c, &m)| {
                let q = m - alpha;
                q * q * c.norm_sqr()
            })
            .sum();
        0.5 * sum * 2.0 * std::f64::consts::PI / (n * n)
    }

    /// `⟨−i∂⟩ = 2π/N² Σ n |c_n|²` for a normalized field.
    pub(crate) fn momentum_from_coeffs(&self, coeffs: &[Complex64]) -> f64 {
        let n = coeffs.len() as f64;
        let sum: f64 = coeffs
            .iter()
            .zip(&self.modes)
            .map(|(c, &m)| m * c.norm_sqr())
            .sum();
        sum * 2.0 * std::f64::consts::PI / (n * n)
    }
}
