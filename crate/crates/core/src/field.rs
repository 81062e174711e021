use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform periodic grid over `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingGrid {
    n_points: usize,
}

impl RingGrid {
    pub const MIN_POINTS: usize = 64;

    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < Self::MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::domain(
                "n_points",
                n_points as f64,
                "a power of two >= 64",
            ));
        }
        Ok(Self { n_points })
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n_points as f64
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.node(j))
    }

    /// Integer Fourier mode carried by FFT bin `j`, in `[−N/2, N/2)`.
    #[inline]
    pub fn mode(&self, j: usize) -> f64 {
        let n = self.n_points;
        if j < n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        }
    }

    /// Rectangle-rule quadrature, spectrally accurate for smooth periodic integrands.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        values.into_iter().sum::<f64>() * self.spacing()
    }
}

/// Which operator form a field is written for.
///
/// `Lab` fields are strictly periodic and see the flux through the covariant
/// kinetic term; `Twisted` fields have the flux gauged into the boundary
/// condition `ψ̃(φ + 2π) = e^{−i2πα} ψ̃(φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Twisted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: RingGrid,
    amplitudes: Vec<Complex64>,
    frame: Frame,
}

impl WaveField {
    pub fn new(grid: RingGrid, amplitudes: Vec<Complex64>, frame: Frame) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::Contract(format!(
                "{} amplitudes for a {}-point grid",
                amplitudes.len(),
                grid.n_points()
            )));
        }
        Ok(Self {
            grid,
            amplitudes,
            frame,
        })
    }

    pub fn from_fn(grid: RingGrid, frame: Frame, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.nodes().map(f).collect();
        Self {
            grid,
            amplitudes,
            frame,
        }
    }

    /// The normalized `n = 0` plane wave.
    pub fn uniform(grid: RingGrid, frame: Frame) -> Self {
        let a = Complex64::new((2.0 * PI).sqrt().recip(), 0.0);
        Self {
            grid,
            amplitudes: vec![a; grid.n_points()],
            frame,
        }
    }

    #[inline]
    pub fn grid(&self) -> RingGrid {
        self.grid
    }

    #[inline]
    pub fn frame(&self) -> Frame {
        self.frame
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub(crate) fn set_frame(&mut self, frame: Frame) {
        self.frame = frame;
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `∫|ψ|² dφ` on the grid.
    pub fn norm_sqr(&self) -> f64 {
        self.grid.integrate(self.amplitudes.iter().map(|z| z.norm_sqr()))
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Contract(format!("cannot normalize field with norm {n}")));
        }
        let scale = n.sqrt().recip();
        self.amplitudes.iter_mut().for_each(|z| *z *= scale);
        Ok(())
    }

    pub(crate) fn require_frame(&self, frame: Frame, op: &str) -> Result<()> {
        if self.frame != frame {
            return Err(Error::Contract(format!(
                "{op} needs a {frame:?}-frame field, got {:?}",
                self.frame
            )));
        }
        Ok(())
    }

    pub(crate) fn require_normalized(&self, op: &str) -> Result<()> {
        let dev = (self.norm_sqr() - 1.0).abs();
        if dev > 1e-8 {
            return Err(Error::Contract(format!(
                "{op} needs a unit-normalized field, |norm - 1| = {dev:e}"
            )));
        }
        Ok(())
    }

    /// `(max ρ − min ρ) / (max ρ + min ρ)`; zero for a uniform field.
    pub fn density_contrast(&self) -> f64 {
        density_contrast(&self.density())
    }
}

pub fn density_contrast(density: &[f64]) -> f64 {
    let (lo, hi) = density
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });
    if hi + lo == 0.0 {
        0.0
    } else {
        (hi - lo) / (hi + lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(RingGrid::new(32).is_err());
        assert!(RingGrid::new(100).is_err());
        assert!(RingGrid::new(64).is_ok());
    }

    #[test]
    fn constant_integrates_to_two_pi() {
        for n in [64, 256, 1024] {
            let g = RingGrid::new(n).unwrap();
            assert_eq!(g.integrate(std::iter::repeat(1.0).take(n)), 2.0 * PI);
        }
    }

    #[test]
    fn modes_cover_symmetric_range() {
        let g = RingGrid::new(64).unwrap();
        assert_eq!(g.mode(0), 0.0);
        assert_eq!(g.mode(31), 31.0);
        assert_eq!(g.mode(32), -32.0);
        assert_eq!(g.mode(63), -1.0);
    }

    #[test]
    fn uniform_is_normalized_and_flat() {
        let f = WaveField::uniform(RingGrid::new(128).unwrap(), Frame::Lab);
        assert!((f.norm_sqr() - 1.0).abs() < 1e-14);
        assert_eq!(f.density_contrast(), 0.0);
    }

    #[test]
    fn normalize_restores_unit_norm() {
        let g = RingGrid::new(64).unwrap();
        let mut f = WaveField::from_fn(g, Frame::Lab, |p| Complex64::new(2.0 + p.cos(), p.sin()));
        f.normalize().unwrap();
        assert!((f.norm_sqr() - 1.0).abs() < 1e-14);
        let mut zero = WaveField::from_fn(g, Frame::Lab, |_| Complex64::new(0.0, 0.0));
        assert!(zero.normalize().is_err());
    }
}
