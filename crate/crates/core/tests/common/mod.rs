//! Independent reference computations. Nothing here calls into the crate's
//! elliptic or solver code.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

/// `∫₀^{π/2} g(θ) dθ` rewritten with `tan θ = e^s` and summed by the
/// trapezoid rule over `s`. The integrands below are analytic in the strip
/// `|Im s| < π/2` whatever `kc` is, so the rule converges geometrically and
/// `k → 1` costs only a longer range. `f` receives `e^s`.
fn log_tan_quadrature(f: impl Fn(f64) -> f64, kc: f64) -> f64 {
    let h = 0.02;
    let lo = -45.0;
    let hi = 45.0 - kc.ln();
    let n = ((hi - lo) / h).ceil() as usize;
    (0..=n).map(|j| f((lo + j as f64 * h).exp())).sum::<f64>() * h
}

/// `K = ∫₀^∞ dx / √((1 + x²)(1 + kc²x²))`.
pub fn complete_k_kc(kc: f64) -> f64 {
    log_tan_quadrature(|x| x / ((1.0 + x * x) * (1.0 + kc * kc * x * x)).sqrt(), kc)
}

/// `E = ∫₀^∞ √(1 + kc²x²) / (1 + x²)^{3/2} dx`.
pub fn complete_e_kc(kc: f64) -> f64 {
    log_tan_quadrature(|x| x * (1.0 + kc * kc * x * x).sqrt() / (1.0 + x * x).powf(1.5), kc)
}

pub fn complete_k(k: f64) -> f64 {
    complete_k_kc((1.0 - k * k).sqrt())
}

pub fn complete_e(k: f64) -> f64 {
    complete_e_kc((1.0 - k * k).sqrt())
}

/// Jacobi amplitude `am(u)` by RK4 on `dφ/du = √(1 − k² sin²φ)`.
pub fn amplitude(u: f64, k: f64, steps: usize) -> f64 {
    let rhs = |phi: f64| (1.0 - k * k * phi.sin().powi(2)).sqrt();
    let h = u / steps as f64;
    let mut phi = 0.0;
    for _ in 0..steps {
        let k1 = rhs(phi);
        let k2 = rhs(phi + 0.5 * h * k1);
        let k3 = rhs(phi + 0.5 * h * k2);
        let k4 = rhs(phi + h * k3);
        phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    phi
}

/// `(sn, cn, dn)` from the integrated amplitude.
pub fn jacobi(u: f64, k: f64) -> (f64, f64, f64) {
    let steps = ((u.abs() * 400.0).ceil() as usize).max(64);
    let phi = amplitude(u, k, steps);
    let (s, c) = phi.sin_cos();
    (s, c, (1.0 - k * k * s * s).sqrt())
}

/// Plain bisection on a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Zero-flux lump `ψ = (K/π√λ) dn(φK/π)` sampled on `n` points, with
/// `K E = πλ/2`. Peaks at `φ = 0`.
pub fn dn_lump(lambda: f64, n: usize) -> Vec<f64> {
    let target = FRAC_PI_2 * lambda;
    // parametrize by kc on a log scale; K·E rises monotonically as kc falls
    let t = bisect(
        |t| {
            let kc = (-t).exp();
            complete_k_kc(kc) * complete_e_kc(kc) - target
        },
        1e-3,
        40.0,
    );
    let kc = (-t).exp();
    let k = (1.0 - kc * kc).sqrt();
    let big_k = complete_k_kc(kc);
    let amp = big_k / (PI * lambda.sqrt());
    let h = TAU / n as f64;
    // dn is even about φ = π as well as 0, so integrate on [0, π] only
    (0..n)
        .map(|j| {
            let phi = j as f64 * h;
            let phi = if phi > PI { TAU - phi } else { phi };
            amp * jacobi(phi * big_k / PI, k).2
        })
        .collect()
}

/// Discrete Fourier transform by direct summation, `X_m = Σ_j x_j e^{−2πi jm/N}`.
pub struct NaiveDft {
    n: usize,
    roots: Vec<Complex64>,
}

impl NaiveDft {
    pub fn new(n: usize) -> Self {
        let roots = (0..n)
            .map(|j| Complex64::from_polar(1.0, -TAU * j as f64 / n as f64))
            .collect();
        Self { n, roots }
    }

    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|m| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| v * self.roots[(j * m) % self.n])
                    .sum()
            })
            .collect()
    }

    pub fn inverse(&self, x: &[Complex64]) -> Vec<Complex64> {
        let scale = 1.0 / self.n as f64;
        (0..self.n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(m, v)| v * self.roots[(j * m) % self.n].conj())
                    .sum::<Complex64>()
                    * scale
            })
            .collect()
    }

    /// Integer wavenumber of bin `m`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        if m < self.n / 2 {
            m as f64
        } else {
            m as f64 - self.n as f64
        }
    }
}

pub struct PgdResult {
    pub psi: Vec<Complex64>,
    pub eps: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Projected gradient descent on the unit sphere for
/// `ε[ψ] = ½⟨ψ|(−i∂ − α)²|ψ⟩ − (λ/2)∫|ψ|⁴`, with derivatives taken by
/// direct DFT and the gradient preconditioned by `(½(m − α)² + 1)⁻¹`.
pub fn pgd_ground_state(lambda: f64, alpha: f64, initial: &[Complex64], tol: f64) -> PgdResult {
    let n = initial.len();
    let h = TAU / n as f64;
    let dft = NaiveDft::new(n);
    let symbol: Vec<f64> = (0..n).map(|m| 0.5 * (dft.wavenumber(m) - alpha).powi(2)).collect();
    let normalize = |psi: &mut Vec<Complex64>| {
        let s = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * h).sqrt();
        psi.iter_mut().for_each(|z| *z /= s);
    };
    // (ε, μ, Hψ)
    let evaluate = |psi: &[Complex64]| {
        let coeffs = dft.forward(psi);
        let t_psi = dft.inverse(&coeffs.iter().zip(&symbol).map(|(c, s)| c * s).collect::<Vec<_>>());
        let h_psi: Vec<Complex64> = t_psi
            .iter()
            .zip(psi)
            .map(|(t, p)| t - lambda * p.norm_sqr() * p)
            .collect();
        let kinetic: f64 = psi.iter().zip(&t_psi).map(|(p, t)| (p.conj() * t).re).sum::<f64>() * h;
        let quartic: f64 = psi.iter().map(|p| p.norm_sqr().powi(2)).sum::<f64>() * h;
        (kinetic - 0.5 * lambda * quartic, kinetic - lambda * quartic, h_psi)
    };

    let mut psi = initial.to_vec();
    normalize(&mut psi);
    let mut iterations = 0;
    loop {
        let (eps, mu, h_psi) = evaluate(&psi);
        let grad: Vec<Complex64> = h_psi.iter().zip(&psi).map(|(hp, p)| hp - mu * p).collect();
        let residual = (grad.iter().map(|z| z.norm_sqr()).sum::<f64>() * h).sqrt();
        if residual <= tol || iterations >= 20_000 {
            return PgdResult { psi, eps, residual, iterations };
        }
        let shift = mu.abs() + 1.0;
        let g_hat = dft.forward(&grad);
        let step = dft.inverse(
            &g_hat
                .iter()
                .zip(&symbol)
                .map(|(g, s)| g / (s + shift))
                .collect::<Vec<_>>(),
        );
        for (p, d) in psi.iter_mut().zip(&step) {
            *p -= 0.8 * d;
        }
        normalize(&mut psi);
        iterations += 1;
    }
}

/// Moves the density maximum to index `n/2` by a whole-sample rotation.
pub fn center_peak(rho: &[f64]) -> Vec<f64> {
    let n = rho.len();
    let peak = (0..n).max_by(|&a, &b| rho[a].total_cmp(&rho[b])).unwrap();
    (0..n).map(|j| rho[(j + peak + n - n / 2) % n]).collect()
}
