//! Quadrature rules.
//!
//! Two integrators with different jobs: [`integrate`] is a composite
//! Gauss–Legendre rule whose node set depends smoothly on the limits (so
//! results can be finite-differenced in a parameter), and [`adaptive_simpson`]
//! is a classic adaptive rule used as an independent check.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Nodes per panel for [`integrate`].
const PANEL_NODES: usize = 24;
const MIN_PANELS: usize = 4;
/// Subdivision cap shared by both integrators.
pub const MAX_INTERVALS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// A Gauss–Legendre rule of the given degree, computed once per process.
pub fn gauss_legendre(degree: usize) -> &'static GaussLegendre {
    static RULES: OnceLock<Mutex<HashMap<usize, &'static GaussLegendre>>> = OnceLock::new();
    let mut rules = RULES
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .expect("quadrature rule cache poisoned");
    rules.entry(degree).or_insert_with(|| {
        let degree = NonZeroUsize::new(degree).expect("Gauss-Legendre degree must be positive");
        Box::leak(Box::new(GaussLegendre::new(degree)))
    })
}

/// Sum of `panels` equal-width Gauss–Legendre panels of `nodes` points each.
pub fn composite_gauss<F>(mut f: F, a: f64, b: f64, panels: usize, nodes: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let rule = gauss_legendre(nodes);
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let mut panel = 0.0;
        for &(x, w) in rule.as_node_weight_pairs() {
            panel += w * f(mid + half * x)?;
        }
        total += half * panel;
    }
    Ok(total)
}

/// Composite Gauss–Legendre with panel doubling until two successive
/// estimates agree to `tol` (absolute plus relative).
///
/// For integrands analytic on `[a, b]` the first comparison already agrees,
/// so the panel count (and hence the node layout relative to `[a, b]`) does
/// not change with the limits.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    let mut panels = MIN_PANELS;
    let mut coarse = composite_gauss(&mut f, a, b, panels, PANEL_NODES)?;
    loop {
        panels *= 2;
        let fine = composite_gauss(&mut f, a, b, panels, PANEL_NODES)?;
        if !fine.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integral on [{a}, {b}]"
            )));
        }
        let err = (fine - coarse).abs();
        if err <= tol * (1.0 + fine.abs()) {
            return Ok(Integral {
                value: fine,
                error_estimate: err,
                intervals: panels,
            });
        }
        if panels >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] with {panels} panels (last change {err:e})"
            )));
        }
        coarse = fine;
    }
}

/// Adaptive Simpson quadrature with absolute plus relative tolerance `tol`
/// and at most [`MAX_INTERVALS`] subintervals.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    struct Segment {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    }

    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    let simpson = |a: f64, b: f64, fa: f64, fm: f64, fb: f64| (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    let fa = f(a)?;
    let fb = f(b)?;
    let fm = f(0.5 * (a + b))?;
    let whole = simpson(a, b, fa, fm, fb);
    let scale = tol * (1.0 + whole.abs());
    let mut stack = vec![Segment {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        tol: scale,
    }];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut intervals = 1usize;

    while let Some(seg) = stack.pop() {
        let m = 0.5 * (seg.a + seg.b);
        let lm = 0.5 * (seg.a + m);
        let rm = 0.5 * (m + seg.b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = simpson(seg.a, m, seg.fa, flm, seg.fm);
        let right = simpson(m, seg.b, seg.fm, frm, seg.fb);
        let delta = left + right - seg.whole;
        let width = seg.b - seg.a;
        if delta.abs() <= 15.0 * seg.tol || width <= 1e-15 * (1.0 + m.abs()) {
            value += left + right + delta / 15.0;
            error += delta.abs() / 15.0;
            continue;
        }
        intervals += 1;
        if intervals > MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "adaptive Simpson exceeded {MAX_INTERVALS} intervals on [{a}, {b}]"
            )));
        }
        stack.push(Segment {
            a: m,
            b: seg.b,
            fa: seg.fm,
            fm: frm,
            fb: seg.fb,
            whole: right,
            tol: 0.5 * seg.tol,
        });
        stack.push(Segment {
            a: seg.a,
            b: m,
            fa: seg.fa,
            fm: flm,
            fb: seg.fm,
            whole: left,
            tol: 0.5 * seg.tol,
        });
    }
    if !value.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integral on [{a}, {b}]"
        )));
    }
    Ok(Integral {
        value,
        error_estimate: error,
        intervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_polynomial_exact() {
        let v = integrate(|x| Ok(x.powi(7) - 3.0 * x * x), 0.0, 2.0, 1e-14).unwrap();
        assert!((v.value - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn gauss_sqrt_singularity() {
        // endpoint singularity forces panel doubling
        let v = integrate(|x: f64| Ok(x.sqrt()), 0.0, 1.0, 1e-8).unwrap();
        assert!((v.value - 2.0 / 3.0).abs() < 1e-7);
        assert!(v.intervals > 8);
    }

    #[test]
    fn simpson_matches_analytic() {
        let v = adaptive_simpson(|x: f64| Ok(x.exp()), 0.0, 1.0, 1e-12).unwrap();
        assert!((v.value - (1f64.exp() - 1.0)).abs() < 1e-11);
        let v = adaptive_simpson(|x: f64| Ok(x.sqrt()), 0.0, 1.0, 1e-10).unwrap();
        assert!((v.value - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn simpson_interval_cap() {
        let err = adaptive_simpson(|x: f64| Ok((1.0 / x).sin()), 1e-300, 1.0, 1e-300);
        assert!(matches!(err, Err(Error::Quadrature(_))));
    }
}
