//! Closed-form branches of the ring problem.
//!
//! At half flux the gauge-transformed equation has antiperiodic boundary
//! conditions and a stationary solution `ψ̃(φ) = (kK / π√λ) cn(φK/π, k)`
//! whose modulus is fixed by `[E − (1 − k²)K] K = πλ/2`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::elliptic::{self, EllipticModulus};
use crate::error::{Error, Result};
use crate::field::{Frame, RingGrid, WaveField};
use crate::roots::{self, Tolerance};

/// Coupling above which the modulus equation is solved in `ln kc`.
///
/// In the `k` variable one ulp of `k` near `kc ≈ 1.5e-3` (λ = 5) already
/// moves the residual by ~4e-11, so the switch sits well below that.
pub const LOG_KC_SWITCH: f64 = 1.0;

/// Largest coupling the closed forms are validated for.
pub const MAX_SUPPORTED_LAMBDA: f64 = 12.0;

/// Below this modulus the energy formula is replaced by its `k → 0` limit.
pub const DEGENERATE_K: f64 = 1e-6;

/// Energy per particle of the half-flux state in the `λ → 0` limit.
pub const WEAK_COUPLING_HALF_FLUX_ENERGY: f64 = 0.125;

/// Reduces a flux to the canonical window `(−1/2, 1/2]`.
///
/// Values already inside the window are returned untouched, which makes the
/// map idempotent bit for bit.
pub fn canonical_alpha(alpha: f64) -> f64 {
    if alpha > -0.5 && alpha <= 0.5 {
        return alpha;
    }
    let r = alpha - alpha.floor();
    if r > 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Coupling `λ` and flux `α` in units `ħ = m = R = 1`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RingProblem {
    lambda: f64,
    alpha: f64,
}

impl RingProblem {
    /// `alpha` is kept as given, so fluxes outside one period exercise the
    /// solver rather than a relabeling. `lambda = 0` is accepted as the
    /// linear limit; negative couplings are not.
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::domain("lambda", lambda, "finite lambda >= 0"));
        }
        if !alpha.is_finite() {
            return Err(Error::domain("alpha", alpha, "finite flux"));
        }
        Ok(Self {
            lambda,
            alpha,
        })
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The flux reduced to `(−1/2, 1/2]`.
    #[inline]
    pub fn canonical_alpha(&self) -> f64 {
        canonical_alpha(self.alpha)
    }
}

/// The closed-form half-flux state for one coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfFluxAnalytic {
    pub lambda: f64,
    pub modulus: EllipticModulus,
    pub big_k: f64,
    pub big_e: f64,
    /// `E − (1 − k²)K`, evaluated without cancellation.
    pub gap: f64,
    pub mu: f64,
    pub eps: f64,
    /// Set when `k < 1e-6` and `eps` holds the weak-coupling limit.
    pub degenerate: bool,
}

impl HalfFluxAnalytic {
    pub fn for_coupling(lambda: f64) -> Result<Self> {
        let modulus = solve_modulus(lambda)?;
        Self::from_modulus(lambda, modulus)
    }

    pub fn from_modulus(lambda: f64, modulus: EllipticModulus) -> Result<Self> {
        let ci = elliptic::complete_integrals(modulus)?;
        let mut a = Self {
            lambda,
            modulus,
            big_k: ci.big_k,
            big_e: ci.big_e,
            gap: ci.gap,
            mu: 0.0,
            eps: 0.0,
            degenerate: modulus.k() < DEGENERATE_K,
        };
        a.mu = half_flux_mu(&a);
        a.eps = half_flux_energy(&a);
        Ok(a)
    }

    /// `[E − (1 − k²)K] K − πλ/2`.
    pub fn modulus_residual(&self) -> f64 {
        self.gap * self.big_k - FRAC_PI_2 * self.lambda
    }

    /// Peak amplitude `kK / (π√λ)`, reached at `φ = 0`.
    pub fn amplitude(&self) -> f64 {
        self.modulus.k() * self.big_k / (PI * self.lambda.sqrt())
    }

    /// `ψ̃(φ)` in the twisted frame; real valued.
    pub fn twisted_value(&self, phi: f64) -> Result<f64> {
        let j = elliptic::jacobi_cn_sn_dn(phi * self.big_k / PI, self.modulus)?;
        Ok(self.amplitude() * j.cn)
    }

    /// Samples the twisted-frame field on `grid`.
    pub fn field(&self, grid: RingGrid) -> Result<WaveField> {
        let amplitudes = grid
            .nodes()
            .map(|phi| self.twisted_value(phi).map(|v| Complex64::new(v, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        WaveField::new(grid, amplitudes, Frame::Twisted)
    }

    /// `∫|ψ̃|⁴ dφ` in closed form.
    ///
    /// With `u = φK/π` this is `(k⁴K⁴/π⁴λ²)(π/K) ∫₀^{2K} cn⁴ du`, and
    /// `∫₀^{K} cn⁴ = [(2 − 3k²)kc²K + 2(2k² − 1)E] / (3k⁴)`.
    pub fn quartic_moment(&self) -> f64 {
        let k2 = self.modulus.k2();
        let kc2 = self.modulus.kc2();
        let quarter = ((2.0 - 3.0 * k2) * kc2 * self.big_k + 2.0 * (2.0 * k2 - 1.0) * self.big_e) / 3.0;
        2.0 * self.big_k.powi(3) * quarter / (PI.powi(3) * self.lambda * self.lambda)
    }
}

/// Solves `[E − (1 − k²)K] K = πλ/2` for the half-flux modulus.
///
/// The left side increases monotonically from 0 at `k = 0` to infinity at
/// `k = 1`, so `(0, 1)` brackets the root for every `λ > 0`. Above
/// [`LOG_KC_SWITCH`] the unknown is `ln kc`, since `kc ~ 4e^{−πλ/2}` soon
/// drops below what `1 − k²` can resolve.
pub fn solve_modulus(lambda: f64) -> Result<EllipticModulus> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain("lambda", lambda, "finite lambda > 0"));
    }
    let target = FRAC_PI_2 * lambda;
    let lhs = |m: EllipticModulus| -> Result<f64> {
        let ci = elliptic::complete_integrals(m)?;
        Ok(ci.gap * ci.big_k - target)
    };
    let tol = Tolerance {
        residual: 1e-14 * target,
        width: 0.0,
        max_iters: 400,
    };

    let modulus = if lambda <= LOG_KC_SWITCH {
        let hi = 1.0 - 0.5 * f64::EPSILON;
        let root = roots::bracketed(|k| lhs(EllipticModulus::from_k(k)?), 0.0, hi, tol)?;
        EllipticModulus::from_k(root.x)?
    } else {
        let root = roots::bracketed(|s| lhs(EllipticModulus::from_ln_kc(s)?), -700.0, 0.0, tol)?;
        EllipticModulus::from_ln_kc(root.x)?
    };

    let residual = lhs(modulus)?;
    if residual.abs() > 1e-12 * target {
        return Err(Error::RootSolve {
            lo: modulus.k(),
            hi: modulus.k(),
            residual,
            iterations: tol.max_iters,
        });
    }
    Ok(modulus)
}

/// The analytic record plus its twisted-frame field on an `n_grid`-point grid.
///
/// Fails if the sampled field misses unit norm by more than `1e-10`, which
/// given the modulus equation can only come from an upstream defect.
pub fn half_flux_state(lambda: f64, n_grid: usize) -> Result<(HalfFluxAnalytic, WaveField)> {
    let grid = RingGrid::new(n_grid)?;
    let a = HalfFluxAnalytic::for_coupling(lambda)?;
    let field = a.field(grid)?;
    let deviation = (field.norm_sqr() - 1.0).abs();
    if deviation > 1e-10 {
        return Err(Error::Normalization { deviation });
    }
    Ok((a, field))
}

/// `μ = (K²/π²)(1/2 − k²)`.
pub fn half_flux_mu(a: &HalfFluxAnalytic) -> f64 {
    a.big_k * a.big_k / (PI * PI) * (0.5 - a.modulus.k2())
}

/// `ε = −K²[(2k² − 1)E − (1 − k²)(3k² − 1)K] / (6π²[E − (1 − k²)K])`.
///
/// Substituting `E = gap + kc²K` turns the bracket into
/// `(2k² − 1)·gap − k²kc²K`, which is free of the `k → 0` cancellation.
/// Degenerate records (`k < 1e-6`) report the weak-coupling limit `1/8`.
pub fn half_flux_energy(a: &HalfFluxAnalytic) -> f64 {
    if a.degenerate {
        return WEAK_COUPLING_HALF_FLUX_ENERGY;
    }
    let k2 = a.modulus.k2();
    let kc2 = a.modulus.kc2();
    let bracket = (2.0 * k2 - 1.0) * a.gap - k2 * kc2 * a.big_k;
    -a.big_k * a.big_k * bracket / (6.0 * PI * PI * a.gap)
}

/// Energy per particle of the plane wave `e^{inφ}/√(2π)`: `(n − α)²/2 − λ/(4π)`.
pub fn uniform_branch_energy(lambda: f64, alpha: f64, winding: i64) -> f64 {
    let q = winding as f64 - alpha;
    0.5 * q * q - lambda / (4.0 * PI)
}

/// Lowest plane-wave energy over all windings.
pub fn uniform_branch_best(lambda: f64, alpha: f64) -> (i64, f64) {
    let lo = alpha.floor() as i64;
    [lo, lo + 1]
        .into_iter()
        .map(|n| (n, uniform_branch_energy(lambda, alpha, n)))
        .fold((lo, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Zero-flux coupling at which the uniform state gives way to a lump: `π/2`.
pub fn critical_coupling() -> f64 {
    FRAC_PI_2
}

/// Energy of the zero-flux lump set into rigid rotation so the flux is
/// cancelled in the co-moving frame: `ε₀ + α²/2`.
pub fn wilczek_rotating_energy(eps_zero_flux: f64, alpha: f64) -> f64 {
    let a = canonical_alpha(alpha);
    eps_zero_flux + 0.5 * a * a
}

/// Strong-coupling flux dependence `−3[1 − cos 2πα] λ² e^{−πλ}` of the
/// ground-state energy, as printed.
pub fn asymptotic_delta_energy(lambda: f64, alpha: f64) -> f64 {
    let c = 1.0 - (2.0 * PI * alpha).cos();
    -3.0 * c * lambda * lambda * (-PI * lambda).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_alpha_window() {
        assert_eq!(canonical_alpha(0.5), 0.5);
        assert_eq!(canonical_alpha(-0.5), 0.5);
        assert_eq!(canonical_alpha(0.75), -0.25);
        assert_eq!(canonical_alpha(1.0), 0.0);
        assert_eq!(canonical_alpha(1.5), 0.5);
        assert_eq!(canonical_alpha(-0.1), -0.1);
        assert!((canonical_alpha(1.3) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn problem_validation() {
        assert!(RingProblem::new(-1.0, 0.0).is_err());
        assert!(RingProblem::new(f64::NAN, 0.0).is_err());
        assert!(RingProblem::new(1.0, f64::INFINITY).is_err());
        let p = RingProblem::new(2.0, 0.75).unwrap();
        assert_eq!(p.alpha(), 0.75);
        assert_eq!(p.canonical_alpha(), -0.25);
    }

    #[test]
    fn uniform_branch_examples() {
        assert_eq!(uniform_branch_energy(0.0, 0.0, 0), 0.0);
        assert!((uniform_branch_energy(2.0 * PI, 0.0, 0) + 0.5).abs() < 1e-15);
        assert_eq!(uniform_branch_energy(1.0, 0.5, 0), uniform_branch_energy(1.0, 0.5, 1));
        assert_eq!(uniform_branch_best(0.0, 0.3).0, 0);
        assert_eq!(uniform_branch_best(0.0, 0.7).0, 1);
        assert_eq!(uniform_branch_best(0.0, -0.3).0, 0);
    }

    #[test]
    fn critical_coupling_is_half_pi() {
        assert_eq!(critical_coupling(), FRAC_PI_2);
        assert!((critical_coupling() - 1.570_796_326_794_896_6).abs() < 1e-16);
    }

    #[test]
    fn wilczek_offsets() {
        assert_eq!(wilczek_rotating_energy(-1.0, 0.0), -1.0);
        assert_eq!(wilczek_rotating_energy(-1.0, 0.5), -1.0 + 0.125);
        assert_eq!(wilczek_rotating_energy(-1.0, 0.25), -1.0 + 0.03125);
        assert_eq!(wilczek_rotating_energy(-1.0, 1.25), -1.0 + 0.03125);
    }

    #[test]
    fn asymptotic_formula_values() {
        assert_eq!(asymptotic_delta_energy(7.0, 0.0), 0.0);
        let v = asymptotic_delta_energy(10.0, 0.5);
        assert!((v / (-600.0 * (-10.0 * PI).exp()) - 1.0).abs() < 1e-15);
        assert!((v + 1.36e-11).abs() < 0.01e-11);
        let ratio = asymptotic_delta_energy(7.0, 0.5) / asymptotic_delta_energy(6.0, 0.5);
        let slope = ratio.ln();
        assert!((slope - (-PI + 2.0 * (7.0f64 / 6.0).ln())).abs() < 1e-13);
        for a in [0.1, 0.25, 0.4, -0.3] {
            assert!(asymptotic_delta_energy(5.0, a) < 0.0);
        }
    }

    #[test]
    fn modulus_small_coupling_series() {
        for lambda in [1e-8, 1e-6, 1e-4] {
            let k = solve_modulus(lambda).unwrap().k();
            let leading = 2.0 * (lambda / PI).sqrt();
            // next order is O(λ^{3/2})
            assert!((k - leading).abs() <= 2.0 * lambda.powf(1.5), "λ={lambda}: {k} vs {leading}");
        }
    }

    #[test]
    fn modulus_monotone_in_coupling() {
        let kc5 = solve_modulus(5.0).unwrap().kc();
        let kc10 = solve_modulus(10.0).unwrap().kc();
        assert!(kc10 < kc5);
        let mut prev = 1.0;
        for i in 1..=60 {
            let kc = solve_modulus(0.2 * i as f64).unwrap().kc();
            assert!(kc < prev);
            prev = kc;
        }
    }

    #[test]
    fn log_kc_switch_is_seamless() {
        let below = solve_modulus(LOG_KC_SWITCH).unwrap();
        let above = solve_modulus(LOG_KC_SWITCH * (1.0 + 1e-12)).unwrap();
        assert!((below.kc() / above.kc() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn modulus_rejects_bad_coupling() {
        assert!(solve_modulus(0.0).is_err());
        assert!(solve_modulus(-1.0).is_err());
        assert!(solve_modulus(f64::NAN).is_err());
    }

    #[test]
    fn record_satisfies_modulus_equation() {
        for lambda in [0.1, 0.5, 1.0, 2.0, 5.0, 8.0, 10.0, 12.0] {
            let a = HalfFluxAnalytic::for_coupling(lambda).unwrap();
            let scale = (FRAC_PI_2 * lambda).max(1.0);
            assert!(a.modulus_residual().abs() <= 1e-12 * scale, "λ={lambda}");
        }
    }

    #[test]
    fn mu_zero_at_symmetric_modulus() {
        let m = EllipticModulus::from_k(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let a = HalfFluxAnalytic::from_modulus(1.0, m).unwrap();
        assert!(half_flux_mu(&a).abs() < 1e-16);
    }

    #[test]
    fn weak_coupling_limits() {
        let a = HalfFluxAnalytic::for_coupling(1e-9).unwrap();
        assert!((a.mu - 0.125).abs() < 1e-8);
        assert!((a.eps - 0.125).abs() < 1e-8);
        // cn → cos, so the state tends to the standing wave cos(φ/2)/√π with
        // ∫|ψ|⁴ = 3/(4π): first order ε = 1/8 − 3λ/(8π), below the uniform
        // branch 1/8 − λ/(4π)
        let lambda = 1e-4;
        let a = HalfFluxAnalytic::for_coupling(lambda).unwrap();
        let standing = 0.125 - 3.0 * lambda / (8.0 * PI);
        assert!((a.eps - standing).abs() < 10.0 * lambda * lambda, "{} vs {}", a.eps, standing);
        assert!(a.eps < uniform_branch_energy(lambda, 0.5, 0));
    }

    #[test]
    fn degenerate_record_is_flagged() {
        let m = EllipticModulus::from_k(1e-8).unwrap();
        let a = HalfFluxAnalytic::from_modulus(1e-16, m).unwrap();
        assert!(a.degenerate);
        assert_eq!(a.eps, 0.125);
    }

    #[test]
    fn energy_rewrite_matches_printed_form() {
        for lambda in [0.5, 2.0, 5.0] {
            let a = HalfFluxAnalytic::for_coupling(lambda).unwrap();
            let (k2, kc2) = (a.modulus.k2(), a.modulus.kc2());
            let (kk, ee) = (a.big_k, a.big_e);
            let printed = -kk * kk * ((2.0 * k2 - 1.0) * ee - kc2 * (3.0 * k2 - 1.0) * kk)
                / (6.0 * PI * PI * (ee - kc2 * kk));
            assert!((printed - a.eps).abs() < 1e-13 * a.eps.abs().max(1.0), "λ={lambda}");
        }
    }

    #[test]
    fn energy_identity_closed_form() {
        for lambda in [0.3, 1.0, 5.0, 12.0] {
            let a = HalfFluxAnalytic::for_coupling(lambda).unwrap();
            let via_mu = a.mu + 0.5 * lambda * a.quartic_moment();
            assert!((via_mu - a.eps).abs() < 1e-12 * a.eps.abs().max(1.0), "λ={lambda}");
        }
    }

    #[test]
    fn half_flux_field_shape() {
        let (a, f) = half_flux_state(5.0, 256).unwrap();
        assert_eq!(f.frame(), Frame::Twisted);
        let peak = f.amplitudes()[0].re;
        assert!((peak - a.amplitude()).abs() < 1e-15);
        assert!(f.amplitudes().iter().all(|z| z.re.abs() <= peak + 1e-15 && z.im == 0.0));
        // antiperiodicity ψ̃(φ + 2π) = −ψ̃(φ)
        for phi in [0.0, 0.3, 1.7, 4.0] {
            let here = a.twisted_value(phi).unwrap();
            let there = a.twisted_value(phi + 2.0 * PI).unwrap();
            assert!((here + there).abs() < 1e-13);
        }
    }

    #[test]
    fn half_flux_state_rejects_bad_grid() {
        assert!(half_flux_state(5.0, 100).is_err());
        assert!(half_flux_state(5.0, 32).is_err());
    }
}
