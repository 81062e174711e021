//! The ring Hamiltonian `H = ½(−i∂_φ − α)² − λ|ψ|²` and its diagnostics.

use num_complex::Complex64;

use crate::analytic::RingProblem;
use crate::error::{Error, Result};
use crate::field::{Frame, WaveField};

use super::spectral::Spectral;

/// Moves a field between the lab frame and the twisted frame.
///
/// `ψ(φ) = e^{iαφ} ψ̃(φ)`; the lab field is periodic, the twisted one picks
/// up `e^{−i2πα}` around the ring.
pub fn gauge_transform(field: &WaveField, alpha: f64, target: Frame) -> Result<WaveField> {
    if field.frame() == target {
        return Err(Error::Contract(format!(
            "gauge transform requested into the frame the field is already in ({target:?})"
        )));
    }
    let sign = match target {
        Frame::Lab => 1.0,
        Frame::Twisted => -1.0,
    };
    let grid = field.grid();
    let mut out = field.clone();
    for (j, z) in out.amplitudes_mut().iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, sign * alpha * grid.node(j));
    }
    out.set_frame(target);
    Ok(out)
}

/// Workspace for repeated Hamiltonian evaluations on one grid.
pub(crate) struct HamiltonianWork {
    pub(crate) spectral: Spectral,
    coeffs: Vec<Complex64>,
    buf: Vec<Complex64>,
    half_q2: Vec<f64>,
    alpha: f64,
}

/// Energy functionals of a normalized field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Functionals {
    pub kinetic: f64,
    pub quartic: f64,
}

impl Functionals {
    pub(crate) fn eps(&self, lambda: f64) -> f64 {
        self.kinetic - 0.5 * lambda * self.quartic
    }

    pub(crate) fn mu(&self, lambda: f64) -> f64 {
        self.kinetic - lambda * self.quartic
    }
}

impl HamiltonianWork {
    pub(crate) fn new(spectral: Spectral, alpha: f64) -> Self {
        let n = spectral.grid().n_points();
        let mut w = Self {
            spectral,
            coeffs: vec![Complex64::default(); n],
            buf: vec![Complex64::default(); n],
            half_q2: vec![0.0; n],
            alpha: f64::NAN,
        };
        w.set_alpha(alpha);
        w
    }

    pub(crate) fn set_alpha(&mut self, alpha: f64) {
        if alpha == self.alpha {
            return;
        }
        self.alpha = alpha;
        for (h, &m) in self.half_q2.iter_mut().zip(self.spectral.modes()) {
            let q = m - alpha;
            *h = 0.5 * q * q;
        }
    }

    /// `½(n − α)²` per FFT bin.
    #[inline]
    pub(crate) fn kinetic_symbol(&self) -> &[f64] {
        &self.half_q2
    }

    /// Kinetic and quartic functionals via Parseval; the FFT of `psi` is
    /// left in the coefficient buffer.
    pub(crate) fn functionals(&mut self, psi: &[Complex64]) -> Functionals {
        self.coeffs.copy_from_slice(psi);
        self.spectral.forward(&mut self.coeffs);
        let kinetic = self.spectral.kinetic_from_coeffs(&self.coeffs, self.alpha);
        let grid = self.spectral.grid();
        let quartic = grid.integrate(psi.iter().map(|z| z.norm_sqr() * z.norm_sqr()));
        Functionals { kinetic, quartic }
    }

    /// `ε[a] − ε[b]` for the scale-invariant energy `T/N − (λ/2)Q/N²`,
    /// which is `ε` on the unit sphere. The differences are assembled from
    /// `a − b` and `a + b`, so the rounding error scales with the change
    /// rather than with the energies, and rounding in the norms drops out.
    pub(crate) fn energy_change(&mut self, a: &[Complex64], b: &[Complex64], lambda: f64) -> f64 {
        let h = self.spectral.grid().spacing();
        let (mut dn, mut dq, mut nb, mut qb) = (0.0, 0.0, 0.0, 0.0);
        for ((d, s), (x, y)) in self.coeffs.iter_mut().zip(self.buf.iter_mut()).zip(a.iter().zip(b)) {
            *d = x - y;
            *s = x + y;
            // |x|² − |y|²
            let drho = (d.conj() * *s).re;
            let rho = y.norm_sqr();
            dn += drho;
            dq += drho * (x.norm_sqr() + rho);
            nb += rho;
            qb += rho * rho;
        }
        let (dn, dq, nb, qb) = (dn * h, dq * h, nb * h, qb * h);
        self.spectral.forward(&mut self.coeffs);
        self.spectral.forward(&mut self.buf);
        let scale = std::f64::consts::TAU / (a.len() as f64).powi(2);
        let (mut dt, mut tb) = (0.0, 0.0);
        for ((d, s), q) in self.coeffs.iter().zip(&self.buf).zip(&self.half_q2) {
            dt += q * (d.conj() * s).re;
            // b = (s − d)/2
            tb += q * (0.5 * (s - d)).norm_sqr();
        }
        let (dt, tb) = (dt * scale, tb * scale);
        let na = nb + dn;
        let kinetic = (dt * nb - tb * dn) / (na * nb);
        let quartic = (dq * nb * nb - qb * dn * (na + nb)) / (na * na * nb * nb);
        kinetic - 0.5 * lambda * quartic
    }

    pub(crate) fn momentum(&mut self, psi: &[Complex64]) -> f64 {
        self.coeffs.copy_from_slice(psi);
        self.spectral.forward(&mut self.coeffs);
        self.spectral.momentum_from_coeffs(&self.coeffs)
    }

    /// Writes `Hψ` into `out`.
    pub(crate) fn apply(&mut self, psi: &[Complex64], lambda: f64, out: &mut [Complex64]) {
        out.copy_from_slice(psi);
        let symbol = std::mem::take(&mut self.half_q2);
        self.spectral.apply_diagonal(out, &symbol);
        self.half_q2 = symbol;
        for (o, z) in out.iter_mut().zip(psi) {
            *o -= lambda * z.norm_sqr() * z;
        }
    }

    /// `μ = ⟨ψ|Hψ⟩` and `‖(H − μ)ψ‖`, leaving `(H − μ)ψ` in `out`.
    pub(crate) fn residual(&mut self, psi: &[Complex64], lambda: f64, out: &mut [Complex64]) -> (f64, f64) {
        self.apply(psi, lambda, out);
        let grid = self.spectral.grid();
        let mu = grid.integrate(psi.iter().zip(out.iter()).map(|(a, b)| (a.conj() * b).re));
        for (o, z) in out.iter_mut().zip(psi) {
            *o -= mu * z;
        }
        let norm = grid.integrate(out.iter().map(|z| z.norm_sqr())).sqrt();
        (mu, norm)
    }

    /// Kinetic energy `½∫|(−i∂ − α)ψ|² dφ` by spectral differentiation and
    /// grid quadrature in real space.
    pub(crate) fn kinetic_real_space(&mut self, psi: &[Complex64]) -> f64 {
        self.buf.copy_from_slice(psi);
        let alpha = self.alpha;
        let symbol: Vec<f64> = self.spectral.modes().iter().map(|m| m - alpha).collect();
        self.spectral.apply_diagonal(&mut self.buf, &symbol);
        0.5 * self.spectral.grid().integrate(self.buf.iter().map(|z| z.norm_sqr()))
    }
}

/// `Hψ` for a lab-frame field. The result is not normalized.
pub fn apply_hamiltonian(field: &WaveField, problem: &RingProblem) -> Result<Vec<Complex64>> {
    field.require_frame(Frame::Lab, "apply_hamiltonian")?;
    let mut work = HamiltonianWork::new(Spectral::new(field.grid()), problem.alpha());
    let mut out = vec![Complex64::default(); field.grid().n_points()];
    work.apply(field.amplitudes(), problem.lambda(), &mut out);
    Ok(out)
}

/// Energy per particle `ε` and chemical potential `μ` of a normalized field.
///
/// A lab-frame field is differentiated spectrally with `(n − α)` and the
/// kinetic density integrated on the grid. A twisted-frame field is expanded
/// in the shifted modes `e^{i(n − α)φ}` and its kinetic energy summed over
/// coefficients. Both give the same number; `ε = μ + (λ/2)∫|ψ|⁴` holds by
/// construction in either case.
pub fn energy_and_mu(field: &WaveField, problem: &RingProblem) -> Result<(f64, f64)> {
    field.require_normalized("energy_and_mu")?;
    let lambda = problem.lambda();
    let grid = field.grid();
    let psi = field.amplitudes();
    let quartic = grid.integrate(psi.iter().map(|z| z.norm_sqr() * z.norm_sqr()));
    let kinetic = match field.frame() {
        Frame::Lab => {
            let mut work = HamiltonianWork::new(Spectral::new(grid), problem.alpha());
            work.kinetic_real_space(psi)
        }
        Frame::Twisted => {
            let mut spectral = Spectral::new(grid);
            let alpha = problem.alpha();
            let mut coeffs: Vec<Complex64> = psi
                .iter()
                .enumerate()
                .map(|(j, z)| z * Complex64::from_polar(1.0, alpha * grid.node(j)))
                .collect();
            spectral.forward(&mut coeffs);
            spectral.kinetic_from_coeffs(&coeffs, alpha)
        }
    };
    let f = Functionals { kinetic, quartic };
    Ok((f.eps(lambda), f.mu(lambda)))
}

/// `‖(H − ⟨H⟩)ψ‖` in L² for a normalized lab-frame field.
pub fn residual_norm(field: &WaveField, problem: &RingProblem) -> Result<f64> {
    field.require_frame(Frame::Lab, "residual_norm")?;
    field.require_normalized("residual_norm")?;
    let mut work = HamiltonianWork::new(Spectral::new(field.grid()), problem.alpha());
    let mut out = vec![Complex64::default(); field.grid().n_points()];
    Ok(work.residual(field.amplitudes(), problem.lambda(), &mut out).1)
}
