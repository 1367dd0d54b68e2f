//! Bracketed root finding on the real line.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Brent's method (bisection, secant and inverse quadratic steps) on a
/// bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign.
///
/// Iterates until the bracket shrinks to a few ulps around the root, so the
/// residual at the returned point is as small as the arithmetic of `f` allows.
pub fn brent<F>(mut f: F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    brent_with_values(f, a, b, fa, fb)
}

/// Like [`brent`] with `f(a)` and `f(b)` already known.
pub fn brent_with_values<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::NoBracket(format!(
            "non-finite endpoint values f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket(format!(
            "f({a}) = {fa} and f({b}) = {fb} have the same sign"
        )));
    }

    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if (fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0) {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + f64::MIN_POSITIVE;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * xm * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(xm) };
        fb = f(b)?;
        if !fb.is_finite() {
            return Err(Error::RootNotConverged(format!("f({b}) = {fb}")));
        }
    }
    Err(Error::RootNotConverged(format!(
        "no convergence after {MAX_ITER} iterations near {b}"
    )))
}

/// Samples `f` on a geometric grid of `points` radii in `[lo, hi]` and returns
/// every sub-interval over which `f` changes sign, with the endpoint values.
pub fn sign_changes<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<SignChange>>
where
    F: FnMut(f64) -> Result<f64>,
{
    debug_assert!(lo > 0.0 && hi > lo && points >= 2);
    let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo)?;
    for i in 1..points {
        let x = if i == points - 1 { hi } else { lo * ratio.powi(i as i32) };
        let fx = f(x)?;
        if f_prev == 0.0 || f_prev.signum() != fx.signum() {
            out.push(SignChange {
                lo: x_prev,
                hi: x,
                f_lo: f_prev,
                f_hi: fx,
            });
        }
        x_prev = x;
        f_prev = fx;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChange {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl SignChange {
    /// `true` when `f` goes from negative to positive.
    pub fn is_increasing(&self) -> bool {
        self.f_lo < self.f_hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_sqrt_two() {
        let r = brent(|x| Ok(x * x - 2.0), 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn brent_rejects_same_sign() {
        assert!(matches!(
            brent(|x| Ok(x * x + 1.0), -1.0, 1.0),
            Err(Error::NoBracket(_))
        ));
    }

    #[test]
    fn brent_steep_function() {
        // x^9 is flat near the root; plain secant stalls there
        let r = brent(|x: f64| Ok((x - 0.3).powi(9)), -1.0, 2.0).unwrap();
        assert!((r - 0.3).abs() < 1e-2);
        let r = brent(|x: f64| Ok(x.exp() - 10.0), 0.0, 100.0).unwrap();
        assert!((r - 10f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn scan_counts_crossings() {
        let changes = sign_changes(|x| Ok((x - 1.0) * (x - 3.0)), 0.1, 10.0, 200).unwrap();
        assert_eq!(changes.len(), 2);
        assert!(!changes[0].is_increasing());
        assert!(changes[1].is_increasing());
    }
}
