//! Bracketed scalar root finding.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Stop once `|f(x)| <= residual`.
    pub residual: f64,
    /// Stop once the bracket is narrower than this.
    pub width: f64,
    pub max_iters: usize,
}

/// Brent's method on a sign-changing bracket `[lo, hi]`.
///
/// Inverse quadratic interpolation and secant steps are accepted only while
/// they shrink the bracket fast enough; otherwise the step bisects. Stops
/// when `|f| <= tol.residual` or the bracket has collapsed to
/// `tol.width` (plus a few ulp).
pub fn bracketed<F>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(Root { x: a, residual: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket(format!(
            "f({a}) = {fa:e} and f({b}) = {fb:e} have the same sign"
        )));
    }

    // b is the best estimate, c the opposite end of the bracket, a the previous b
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for it in 1..=tol.max_iters {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let t = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.width;
        let m = 0.5 * (c - b);
        if fb.abs() <= tol.residual || m.abs() <= t {
            return Ok(Root { x: b, residual: fb, iterations: it - 1 });
        }

        if e.abs() >= t && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (t * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > t { d } else { t.copysign(m) };
        fb = f(b)?;
    }
    // the last step moved b without re-pairing it with a sign-changing partner
    let (other, f_other) = if fb.signum() == fc.signum() { (a, fa) } else { (c, fc) };
    Err(Error::RootSolve {
        lo: b.min(other),
        hi: b.max(other),
        residual: fb.abs().min(f_other.abs()),
        iterations: tol.max_iters,
    })
}
