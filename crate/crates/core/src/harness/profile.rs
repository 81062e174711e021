//! Shape measurements on sampled ring fields.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::Result;
use crate::field::WaveField;

/// Trigonometric interpolant of periodic samples on `[0, 2π)`.
///
/// The Nyquist mode is split symmetrically so real data interpolates to
/// real values.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    coeffs: Vec<Complex64>,
}

impl TrigInterpolant {
    pub fn new(samples: &[Complex64]) -> Self {
        let n = samples.len();
        let mut coeffs = samples.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut coeffs);
        let scale = 1.0 / n as f64;
        coeffs.iter_mut().for_each(|c| *c *= scale);
        Self { coeffs }
    }

    pub fn from_real(samples: &[f64]) -> Self {
        let z: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(&z)
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        let n = self.coeffs.len();
        let half = n / 2;
        let mut acc = self.coeffs[0];
        for m in 1..half {
            acc += self.coeffs[m] * Complex64::from_polar(1.0, m as f64 * phi);
            acc += self.coeffs[n - m] * Complex64::from_polar(1.0, -(m as f64) * phi);
        }
        acc + self.coeffs[half] * (half as f64 * phi).cos()
    }

    /// Derivative of the interpolant; the Nyquist term is differentiated as
    /// the cosine it represents.
    pub fn eval_derivative(&self, phi: f64) -> Complex64 {
        let n = self.coeffs.len();
        let half = n / 2;
        let mut acc = Complex64::default();
        for m in 1..half {
            let mf = m as f64;
            acc += self.coeffs[m] * Complex64::new(0.0, mf) * Complex64::from_polar(1.0, mf * phi);
            acc += self.coeffs[n - m] * Complex64::new(0.0, -mf) * Complex64::from_polar(1.0, -mf * phi);
        }
        let hf = half as f64;
        acc - self.coeffs[half] * hf * (hf * phi).sin()
    }

    /// Translates the interpolated function by `shift`: `g(φ) = f(φ − shift)`,
    /// sampled back on the original grid.
    pub fn shifted_samples(&self, shift: f64) -> Vec<Complex64> {
        let n = self.coeffs.len();
        let mut c: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                if j == n / 2 {
                    c * (m * shift).cos()
                } else {
                    c * Complex64::from_polar(1.0, -m * shift)
                }
            })
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut c);
        c
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a < 1e-14 {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Peak location, peak density and full width at half maximum of `|ψ|²`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LumpShape {
    pub peak_angle: f64,
    pub peak_density: f64,
    pub fwhm: f64,
    /// `|ψ|` half way round the ring from the peak.
    pub antipode_amplitude: f64,
}

pub fn lump_shape(field: &WaveField) -> LumpShape {
    let grid = field.grid();
    let h = grid.spacing();
    let density = field.density();
    let rho = TrigInterpolant::from_real(&density);
    let psi = TrigInterpolant::new(field.amplitudes());
    let rho_at = |phi: f64| rho.eval(phi).re;

    let j_max = density
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, &r)| if r > best.1 { (j, r) } else { best })
        .0;
    let centre = grid.node(j_max);
    // the maximum is a sign change of ρ'; comparing ρ values alone only
    // pins it to ~√ε
    let slope_at = |phi: f64| rho.eval_derivative(phi).re;
    let peak_angle = if slope_at(centre - h) > 0.0 && slope_at(centre + h) < 0.0 {
        bisect(slope_at, centre - h, centre + h)
    } else {
        golden_max(rho_at, centre - h, centre + h)
    };
    let peak_density = rho_at(peak_angle);
    let half = 0.5 * peak_density;

    let crossing = |dir: f64| -> f64 {
        let mut step = 1;
        while (step as f64) * h < PI {
            let x = peak_angle + dir * step as f64 * h;
            if rho_at(x) < half {
                let inner = peak_angle + dir * (step - 1) as f64 * h;
                return bisect(|p| rho_at(p) - half, inner, x);
            }
            step += 1;
        }
        peak_angle + dir * PI
    };
    let fwhm = crossing(1.0) - crossing(-1.0);

    LumpShape {
        peak_angle: peak_angle.rem_euclid(2.0 * PI),
        peak_density,
        fwhm,
        antipode_amplitude: psi.eval(peak_angle + PI).norm(),
    }
}

/// Translates a field so its density maximum sits at `φ = π`.
pub fn align_peak_to_pi(field: &WaveField) -> Result<WaveField> {
    let shape = lump_shape(field);
    let psi = TrigInterpolant::new(field.amplitudes());
    let shifted = psi.shifted_samples(PI - shape.peak_angle);
    WaveField::new(field.grid(), shifted, field.frame())
}

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn fit_line(points: &[(f64, f64)]) -> Option<LineFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}
