//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! Everything here uses the modulus convention: `K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ)`.
//! The complementary modulus `kc = √(1 − k²)` is carried alongside `k` so that
//! moduli with `kc` far below `f64::EPSILON` stay representable.

use std::f64::consts::{FRAC_PI_2, LN_2};

use crate::error::{Error, Result};

/// Below this complementary modulus K and E switch to their logarithmic expansions.
pub const COMPLEMENTARY_SWITCH: f64 = 1e-5;

const AGM_MAX_ITERS: usize = 64;

/// An elliptic modulus `k ∈ [0, 1]` stored together with `kc = √(1 − k²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    k: f64,
    kc: f64,
}

impl EllipticModulus {
    pub fn from_k(k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::domain("k", k, "0 <= k <= 1"));
        }
        let kc = ((1.0 - k) * (1.0 + k)).sqrt();
        Ok(Self { k, kc })
    }

    pub fn from_kc(kc: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kc) {
            return Err(Error::domain("kc", kc, "0 <= kc <= 1"));
        }
        let k = ((1.0 - kc) * (1.0 + kc)).sqrt();
        Ok(Self { k, kc })
    }

    /// Builds the modulus from `ln kc`, the natural variable when `kc` is tiny.
    pub fn from_ln_kc(ln_kc: f64) -> Result<Self> {
        if ln_kc.is_nan() || ln_kc > 0.0 {
            return Err(Error::domain("ln kc", ln_kc, "ln kc <= 0"));
        }
        Self::from_kc(ln_kc.exp())
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    #[inline]
    pub fn kc(&self) -> f64 {
        self.kc
    }

    /// `k²`, the parameter `m` of the other common convention.
    #[inline]
    pub fn k2(&self) -> f64 {
        self.k * self.k
    }

    /// `kc² = 1 − k²` without the subtraction.
    #[inline]
    pub fn kc2(&self) -> f64 {
        self.kc * self.kc
    }

    /// The complementary modulus `k' = kc` as a modulus in its own right.
    pub fn complement(&self) -> Self {
        Self {
            k: self.kc,
            kc: self.k,
        }
    }
}

/// Result of the arithmetic-geometric mean run on `(1, kc)`.
#[derive(Debug, Clone, Copy)]
struct Agm {
    mean: f64,
    /// `Σ_{n≥1} 2^{n−1} c_n²`, with `c_n` produced by the cancellation-free recurrence.
    tail: f64,
}

fn agm(m: EllipticModulus) -> Agm {
    let mut a = 1.0_f64;
    let mut b = m.kc;
    let mut c = m.k;
    let mut tail = 0.0;
    let mut weight = 1.0;
    for _ in 0..AGM_MAX_ITERS {
        if (a - b).abs() <= 8.0 * f64::EPSILON * a {
            break;
        }
        let next_a = 0.5 * (a + b);
        c = c * c / (4.0 * next_a);
        b = (a * b).sqrt();
        a = next_a;
        tail += weight * c * c;
        weight *= 2.0;
    }
    Agm { mean: a, tail }
}

/// `ln(4 / kc)`, the leading term of K near `k = 1`.
fn log_four_over_kc(kc: f64) -> f64 {
    2.0 * LN_2 - kc.ln()
}

/// Complete elliptic integral of the first kind.
pub fn complete_k(m: EllipticModulus) -> Result<f64> {
    let kc = m.kc;
    if kc == 0.0 {
        return Err(Error::Divergent);
    }
    if kc < COMPLEMENTARY_SWITCH {
        let l = log_four_over_kc(kc);
        let kc2 = kc * kc;
        return Ok(l + 0.25 * kc2 * (l - 1.0));
    }
    Ok(FRAC_PI_2 / agm(m).mean)
}

/// Complete elliptic integral of the second kind.
pub fn complete_e(m: EllipticModulus) -> f64 {
    let kc = m.kc;
    if kc == 0.0 {
        return 1.0;
    }
    if kc < COMPLEMENTARY_SWITCH {
        let l = log_four_over_kc(kc);
        return 1.0 + 0.5 * kc * kc * (l - 0.5);
    }
    let r = agm(m);
    let big_k = FRAC_PI_2 / r.mean;
    big_k * (1.0 - 0.5 * m.k2() - r.tail)
}

/// K(k) and E(k) together, plus `E − kc²K` computed without cancellation.
///
/// The last quantity is what the half-flux modulus equation and energy
/// need; at small `k` it is `O(k²)` while E and `kc²K` are both near `π/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompleteIntegrals {
    pub big_k: f64,
    pub big_e: f64,
    pub gap: f64,
}

pub fn complete_integrals(m: EllipticModulus) -> Result<CompleteIntegrals> {
    let kc = m.kc;
    if kc == 0.0 {
        return Err(Error::Divergent);
    }
    if kc < COMPLEMENTARY_SWITCH {
        let big_k = complete_k(m)?;
        let big_e = complete_e(m);
        return Ok(CompleteIntegrals {
            big_k,
            big_e,
            gap: big_e - m.kc2() * big_k,
        });
    }
    let r = agm(m);
    let big_k = FRAC_PI_2 / r.mean;
    Ok(CompleteIntegrals {
        big_k,
        big_e: big_k * (1.0 - 0.5 * m.k2() - r.tail),
        gap: big_k * (0.5 * m.k2() - r.tail),
    })
}

/// Jacobi elliptic functions `cn`, `sn`, `dn` at real argument `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub cn: f64,
    pub sn: f64,
    pub dn: f64,
}

/// Evaluates `cn`, `sn` and `dn` jointly by descending Landen transformation.
///
/// The AGM scale sequence seeds the angle `φ_N = 2^N a_N u`, which is then
/// walked back down with `φ_{n−1} = ½(φ_n + asin(c_n/a_n · sin φ_n))`.
pub fn jacobi_cn_sn_dn(u: f64, m: EllipticModulus) -> Result<Jacobi> {
    if !u.is_finite() {
        return Err(Error::domain("u", u, "finite argument"));
    }
    let (k, kc) = (m.k, m.kc);
    if k == 0.0 {
        let (sn, cn) = u.sin_cos();
        return Ok(Jacobi { cn, sn, dn: 1.0 });
    }
    if kc == 0.0 {
        let sech = 1.0 / u.cosh();
        return Ok(Jacobi {
            cn: sech,
            sn: u.tanh(),
            dn: sech,
        });
    }

    let mut a = [0.0_f64; AGM_MAX_ITERS + 1];
    let mut c = [0.0_f64; AGM_MAX_ITERS + 1];
    a[0] = 1.0;
    c[0] = k;
    let mut b = kc;
    let mut n = 0;
    while n < AGM_MAX_ITERS && (a[n] - b).abs() > 8.0 * f64::EPSILON * a[n] {
        let next = 0.5 * (a[n] + b);
        c[n + 1] = c[n] * c[n] / (4.0 * next);
        b = (a[n] * b).sqrt();
        a[n + 1] = next;
        n += 1;
    }

    let mut phi = (n as f64).exp2() * a[n] * u;
    for j in (1..=n).rev() {
        let s = (c[j] / a[j] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (m.kc2() + m.k2() * cn * cn).sqrt();
    Ok(Jacobi { cn, sn, dn })
}
