//! Exact finite-`N` cumulant generating function for `d = 2, β = 2`, and its
//! saddle-point limit `F(s) = lim χ(s,N)/N²`.
//!
//! With `p(z_1..z_N) ∝ Π|z_i - z_j|² Π e^{-2N U(|z_k|)}` the CGF
//! `χ(s,N) = ln⟨e^{-N s L_N}⟩` factorizes over angular modes:
//!
//! `χ = Σ_{j=1}^N [ln ∫ r^{2j-1} e^{-2NU - Nsf} dr - ln ∫ r^{2j-1} e^{-2NU} dr]`.
//!
//! The symplectic variant uses `r^{4j-1}` and `U = r²`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cumulants::{CumulantReport, Route};
use crate::error::{Error, Result};
use crate::numerics::diff::{fornberg_weights, stencil_half_width};
use crate::numerics::{brent_with_values, central_derivative, composite_gauss, gauss_legendre, sign_changes};
use crate::potentials::{GasModel, RadialFunction};

/// Half-width of the first integration window, in units of the peak width.
const WINDOW_SIGMAS: f64 = 12.0;
/// The window is widened until the log-integrand has dropped this much.
const WINDOW_DROP: f64 = 60.0;
const LOG_NODES: usize = 24;
const LOG_TOL: f64 = 1e-14;
const SCAN_POINTS: usize = 400;
/// Default Gauss–Legendre nodes for the `λ` integral of `F(s)`.
pub const DEFAULT_LAMBDA_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogIntegralResult {
    /// `ln ∫_0^∞ r^p e^{-2NU(r) - Nsf(r)} dr`.
    pub log_value: f64,
    pub peak_radius: f64,
    pub converged: bool,
}

/// Log-integrand `p ln r - 2N U(r) - N s f(r)` and its first two derivatives.
struct LogWeight<'a> {
    p: f64,
    n: f64,
    s: f64,
    u: &'a RadialFunction,
    f: &'a RadialFunction,
}

impl LogWeight<'_> {
    fn jets(&self, r: f64, order: usize) -> Result<[f64; 3]> {
        let u = self.u.jet(r, order)?;
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate().take(order + 1) {
            *o = 2.0 * self.n * u.derivative(k);
        }
        if self.s != 0.0 {
            let f = self.f.jet(r, order)?;
            for (k, o) in out.iter_mut().enumerate().take(order + 1) {
                *o += self.n * self.s * f.derivative(k);
            }
        }
        Ok(out)
    }

    fn value(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.p * r.ln() - self.jets(r, 0)?[0])
    }

    fn slope(&self, r: f64) -> Result<f64> {
        Ok(self.p / r - self.jets(r, 1)?[1])
    }

    fn curvature(&self, r: f64) -> Result<f64> {
        Ok(-self.p / (r * r) - self.jets(r, 2)?[2])
    }
}

/// `ln ∫_0^∞ r^p e^{-2NU(r) - Nsf(r)} dr` by peak-subtracted Gauss–Legendre
/// quadrature on a window around the maxima of the log-integrand.
pub fn log_radial_integral(
    p: f64,
    n: usize,
    u: &RadialFunction,
    f: &RadialFunction,
    s: f64,
    cap: f64,
) -> Result<LogIntegralResult> {
    if !(p > -1.0) {
        return Err(Error::InvalidParameter(format!("r^{p} is not integrable at 0")));
    }
    let w = LogWeight {
        p,
        n: n as f64,
        s,
        u,
        f,
    };
    let lo = 1e-8f64.min(0.5 * cap);
    let changes = sign_changes(|r| w.slope(r), lo, cap, SCAN_POINTS)?;
    let mut peaks = Vec::new();
    for c in changes.iter().filter(|c| !c.is_increasing()) {
        peaks.push(brent_with_values(|r| w.slope(r), c.lo, c.hi, c.f_lo, c.f_hi)?);
    }
    if w.slope(cap)? >= 0.0 || peaks.is_empty() {
        return Err(Error::Divergent(format!(
            "log-integrand still increasing at the cutoff r = {cap} (p = {p}, s = {s})"
        )));
    }
    let mut peak = peaks[0];
    let mut top = w.value(peak)?;
    for &r in &peaks[1..] {
        let v = w.value(r)?;
        if v > top {
            top = v;
            peak = r;
        }
    }
    let width = |r: f64| -> Result<f64> {
        let c = w.curvature(r)?;
        Ok(if c < 0.0 { 1.0 / (-c).sqrt() } else { 0.1 * r })
    };
    let first = *peaks.first().expect("non-empty");
    let last = *peaks.last().expect("non-empty");
    let mut a = (first - WINDOW_SIGMAS * width(first)?).max(0.0);
    let mut b = last + WINDOW_SIGMAS * width(last)?;
    let mut step = b - last;
    while w.value(b)? > top - WINDOW_DROP {
        b += step;
        step *= 2.0;
        if b > cap {
            return Err(Error::Divergent(format!(
                "log-integrand has not decayed by r = {cap} (p = {p}, s = {s})"
            )));
        }
    }
    let mut step = first - a;
    while a > 0.0 && w.value(a)? > top - WINDOW_DROP {
        a = (a - step).max(0.0);
        step *= 2.0;
    }

    let shifted = |r: f64| -> Result<f64> { Ok((w.value(r)? - top).exp()) };
    let mut panels = 8;
    let mut prev = composite_gauss(shifted, a, b, panels, LOG_NODES)?;
    let mut converged = false;
    while panels < 1 << 12 {
        panels *= 2;
        let next = composite_gauss(shifted, a, b, panels, LOG_NODES)?;
        let change = (next / prev).ln().abs();
        prev = next;
        if change < LOG_TOL {
            converged = true;
            break;
        }
    }
    if !(prev > 0.0 && prev.is_finite()) {
        return Err(Error::Quadrature(format!("window integral {prev} for p = {p}, s = {s}")));
    }
    Ok(LogIntegralResult {
        log_value: top + prev.ln(),
        peak_radius: peak,
        converged,
    })
}

fn mode_sum(
    n: usize,
    power: impl Fn(usize) -> f64 + Sync,
    u: &RadialFunction,
    f: &RadialFunction,
    s: f64,
    cap: f64,
) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let terms: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|j| {
            let p = power(j);
            let tilted = log_radial_integral(p, n, u, f, s, cap)?;
            let flat = log_radial_integral(p, n, u, f, 0.0, cap)?;
            Ok(tilted.log_value - flat.log_value)
        })
        .collect::<Result<_>>()?;
    // fixed summation order
    Ok(terms.iter().sum())
}

fn require_determinantal(model: &GasModel) -> Result<()> {
    if !model.is_determinantal() {
        return Err(Error::InvalidModel(format!(
            "the exact CGF needs d = 2 and beta = 2, got d = {}, beta = {}",
            model.dimension(),
            model.beta()
        )));
    }
    Ok(())
}

/// Exact `χ(s, N)` for `d = 2, β = 2` and any radial `U`, `f`.
pub fn exact_cgf(model: &GasModel, s: f64) -> Result<f64> {
    require_determinantal(model)?;
    mode_sum(
        model.n_particles(),
        |j| (2 * j - 1) as f64,
        model.potential(),
        model.statistic(),
        s,
        model.radius_cap(),
    )
}

/// Exact `χ(s, N)` of the symplectic Ginibre ensemble, weights
/// `r^{4j-1} e^{-2N r²}`.
pub fn exact_cgf_ginse(n: usize, f: &RadialFunction, s: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one particle".into()));
    }
    let u = ginse_potential();
    mode_sum(n, |j| (4 * j - 1) as f64, &u, f, s, crate::potentials::DEFAULT_RADIUS_CAP)
}

/// `U(r) = r²`, the confinement of the symplectic ensemble.
pub fn ginse_potential() -> RadialFunction {
    RadialFunction::harmonic(2.0).expect("positive stiffness")
}

/// Default step and Richardson levels for [`exact_cumulants`].
pub fn default_exact_step(q: usize) -> (f64, usize) {
    if q <= 4 {
        (1e-2, 2)
    } else {
        (3e-2, 2)
    }
}

/// Finite-`N` cumulant `⟨L_N^q⟩_c = (-1)^q N^{-q} ∂_s^q χ(0, N)` from central
/// differences of [`exact_cgf`], reported as `N^{q-2} ⟨L_N^q⟩_c`.
pub fn exact_cumulants(model: &GasModel, q: usize, h: Option<f64>) -> Result<CumulantReport> {
    require_determinantal(model)?;
    exact_cumulants_with(q, h, model.n_particles(), |s| exact_cgf(model, s))
}

/// As [`exact_cumulants`] for the symplectic ensemble.
pub fn exact_cumulants_ginse(n: usize, f: &RadialFunction, q: usize, h: Option<f64>) -> Result<CumulantReport> {
    exact_cumulants_with(q, h, n, |s| exact_cgf_ginse(n, f, s))
}

fn exact_cumulants_with(
    q: usize,
    h: Option<f64>,
    n: usize,
    chi: impl Fn(f64) -> Result<f64>,
) -> Result<CumulantReport> {
    if !(1..=6).contains(&q) {
        return Err(Error::InvalidParameter(format!("exact cumulants cover q = 1..6, got {q}")));
    }
    let (default_h, levels) = default_exact_step(q);
    let h = h.unwrap_or(default_h);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let reach = stencil_half_width(q) as f64 * h;
    let mut largest: f64 = 0.0;
    for s in [-reach, reach] {
        match chi(s) {
            Ok(v) => largest = largest.max(v.abs()),
            Err(e) if e.is_numerical() => {
                return Err(Error::StencilOutOfRange(format!("chi({s}) failed: {e}")))
            }
            Err(e) => return Err(e),
        }
    }
    let der = central_derivative(&chi, q, h, levels)?;
    let nf = n as f64;
    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
    let scale = sign / (nf * nf);
    let value = scale * der.value;

    // rounding: ~1e-13 relative error in χ amplified by the smallest stencil
    let p = stencil_half_width(q) as i64;
    let unit: Vec<f64> = (-p..=p).map(|k| k as f64).collect();
    let weight_sum: f64 = fornberg_weights(q, &unit).iter().map(|w| w.abs()).sum();
    let smallest = h / 2f64.powi(levels as i32);
    let rounding = 1e-13 * largest.max(1.0) * weight_sum / smallest.powi(q as i32) * scale.abs();
    let error = (der.error_estimate * scale.abs()).max(rounding);
    // (-1)^q N^{-2} ∂^q χ times N^{2-q} (or N for q = 1) is the cumulant
    let mut report = CumulantReport::new(q, value, Route::DeterminantalExact, error)
        .with_note(format!("h = {h}, {levels} Richardson levels"));
    if error > 1e-5 * value.abs() {
        report = report.with_note(format!("precision warning: error estimate {error:e} exceeds 1e-5 relative"));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleProfile {
    pub lambda: f64,
    pub r_star: f64,
    pub phi_min: f64,
    pub b_lambda: f64,
}

/// Minimizer of `2U(r) + s f(r) - 2κλ ln r` for `r > 0`.
fn saddle_root(u: &RadialFunction, f: &RadialFunction, s: f64, target: f64) -> Result<f64> {
    // stationarity: r (2U'(r) + s f'(r)) = 2κλ
    let g = |r: f64| -> Result<f64> {
        let up = u.slope(r)?;
        let fp = if s == 0.0 { 0.0 } else { f.slope(r)? };
        Ok(r * (2.0 * up + s * fp) - target)
    };
    let changes = sign_changes(g, 1e-10, crate::potentials::DEFAULT_RADIUS_CAP, SCAN_POINTS)?;
    match changes.as_slice() {
        [c] if c.is_increasing() => brent_with_values(g, c.lo, c.hi, c.f_lo, c.f_hi),
        [] | [_] => Err(Error::NoInteriorMin(format!(
            "r(2U' + s f') never crosses {target} upward (s = {s})"
        ))),
        many => Err(Error::MultipleMinima(format!(
            "{} stationary points for s = {s}, target {target}",
            many.len()
        ))),
    }
}

/// Saddle point of `φ_{s,λ}(r) = 2U(r) + s f(r) - 2κλ ln r - b(λ)` with
/// `b(λ) = min_r (2U(r) - 2κλ ln r)`; `κ = 1` for the complex ensemble and
/// `κ = 2` for the symplectic one.
pub fn saddle_profile_with_degree(
    u: &RadialFunction,
    f: &RadialFunction,
    s: f64,
    lambda: f64,
    kappa: f64,
) -> Result<SaddleProfile> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    let target = 2.0 * kappa * lambda;
    let r0 = saddle_root(u, f, 0.0, target)?;
    let b = 2.0 * u.value(r0)? - target * r0.ln();
    let r = if s == 0.0 { r0 } else { saddle_root(u, f, s, target)? };
    let fr = if s == 0.0 { 0.0 } else { s * f.value(r)? };
    let phi = 2.0 * u.value(r)? + fr - target * r.ln() - b;
    Ok(SaddleProfile {
        lambda,
        r_star: r,
        phi_min: phi,
        b_lambda: b,
    })
}

/// [`saddle_profile_with_degree`] for the complex ensemble (`κ = 1`).
pub fn saddle_profile(u: &RadialFunction, f: &RadialFunction, s: f64, lambda: f64) -> Result<SaddleProfile> {
    saddle_profile_with_degree(u, f, s, lambda, 1.0)
}

/// `∫_0^1 g(λ) dλ` as `∫_0^1 g(v²) 2v dv`, which smooths the `√λ` behaviour
/// of the saddle radius near `λ = 0`.
fn lambda_integral(nodes: usize, g: impl Fn(f64) -> Result<f64> + Sync) -> Result<f64> {
    if nodes == 0 {
        return Err(Error::InvalidParameter("need at least one lambda node".into()));
    }
    let rule = gauss_legendre(nodes);
    let terms: Vec<f64> = rule
        .as_node_weight_pairs()
        .par_iter()
        .map(|&(x, w)| {
            let v = 0.5 * (x + 1.0);
            Ok(0.5 * w * 2.0 * v * g(v * v)?)
        })
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum())
}

fn asymptotic_f_degree(u: &RadialFunction, f: &RadialFunction, s: f64, nodes: usize, kappa: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let integral = lambda_integral(nodes, |l| Ok(saddle_profile_with_degree(u, f, s, l, kappa)?.phi_min))?;
    Ok(-integral)
}

/// `F(s) = -∫_0^1 φ_{s,λ}(r_{s,λ}) dλ = lim χ(s,N)/N²`.
pub fn asymptotic_f(u: &RadialFunction, f: &RadialFunction, s: f64, lambda_nodes: usize) -> Result<f64> {
    asymptotic_f_degree(u, f, s, lambda_nodes, 1.0)
}

/// `∂_s F = -∫_0^1 f(r_{s,λ}) dλ`.
pub fn asymptotic_f_derivative(u: &RadialFunction, f: &RadialFunction, s: f64, lambda_nodes: usize) -> Result<f64> {
    let integral = lambda_integral(lambda_nodes, |l| f.value(saddle_profile(u, f, s, l)?.r_star))?;
    Ok(-integral)
}

/// Large-`N` limit of `χ/N²` for the symplectic ensemble (`U = r²`, `κ = 2`).
pub fn asymptotic_f_ginse(f: &RadialFunction, s: f64, lambda_nodes: usize) -> Result<f64> {
    asymptotic_f_degree(&ginse_potential(), f, s, lambda_nodes, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ginibre(n: usize) -> GasModel {
        GasModel::new(
            2,
            2.0,
            n,
            RadialFunction::harmonic(1.0).unwrap(),
            RadialFunction::monomial(2.0).unwrap(),
        )
        .unwrap()
    }

    fn closed(n: usize, s: f64) -> f64 {
        -0.5 * (n * (n + 1)) as f64 * (1.0 + s).ln()
    }

    #[test]
    fn ginibre_closed_form() {
        for n in [1, 10, 50] {
            let m = ginibre(n);
            assert_eq!(exact_cgf(&m, 0.0).unwrap(), 0.0);
            for s in [-0.3, 0.3, 0.7] {
                let v = exact_cgf(&m, s).unwrap();
                assert!((v - closed(n, s)).abs() < 1e-10 * closed(n, s).abs(), "N={n} s={s}: {v}");
            }
        }
    }

    #[test]
    fn log_integral_stability() {
        let u = RadialFunction::harmonic(1.0).unwrap();
        let f = RadialFunction::monomial(2.0).unwrap();
        // ∫ r^{2l+1} e^{-a r²} dr = l! / (2 a^{l+1}), a = N(1+s)
        let (n, s, l) = (200usize, 0.3, 150usize);
        let a = n as f64 * (1.0 + s);
        let exact = statrs::function::gamma::ln_gamma(l as f64 + 1.0) - 2f64.ln() - (l as f64 + 1.0) * a.ln();
        let r = log_radial_integral((2 * l + 1) as f64, n, &u, &f, s, 1e3).unwrap();
        assert!(r.converged);
        assert!((r.log_value - exact).abs() < 1e-10 * exact.abs(), "{} vs {exact}", r.log_value);
        let wide = log_radial_integral((2 * l + 1) as f64, n, &u, &f, s, 2e3).unwrap();
        assert!((wide.log_value - r.log_value).abs() < 1e-10 * exact.abs());
        assert!((r.peak_radius - ((2 * l + 1) as f64 / (2.0 * a)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn divergent_tilt_is_reported() {
        let m = ginibre(5);
        assert!(matches!(exact_cgf(&m, -1.5), Err(Error::Divergent(_))));
        let wrong = GasModel::new(2, 1.0, 5, RadialFunction::harmonic(1.0).unwrap(), RadialFunction::monomial(2.0).unwrap()).unwrap();
        assert!(matches!(exact_cgf(&wrong, 0.1), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn ginse_closed_form() {
        let f = RadialFunction::monomial(2.0).unwrap();
        assert_eq!(exact_cgf_ginse(4, &f, 0.0).unwrap(), 0.0);
        let one = exact_cgf_ginse(1, &f, 0.4).unwrap();
        assert!((one + 2.0 * 1.2f64.ln()).abs() < 1e-12);
        let many = exact_cgf_ginse(30, &f, 0.4).unwrap();
        assert!((many + 930.0 * 1.2f64.ln()).abs() < 1e-10 * 930.0);
        let asym = asymptotic_f_ginse(&f, 0.4, 64).unwrap();
        assert!((asym + 1.2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn exact_cumulant_examples() {
        let m = ginibre(20);
        let n = 20.0;
        let c2 = exact_cumulants(&m, 2, None).unwrap();
        assert!((c2.at_n(20) - 0.525).abs() < 1e-8, "{c2:?}");
        let c3 = exact_cumulants(&m, 3, None).unwrap();
        assert!((c3.at_n(20) - 0.0525).abs() < 1e-8, "{c3:?}");
        let c4 = exact_cumulants(&m, 4, None).unwrap();
        assert!((c4.at_n(20) - 0.007875).abs() < 1e-8, "{c4:?}");
        let c1 = exact_cumulants(&m, 1, None).unwrap();
        assert!((c1.at_n(20) - (n + 1.0) / 2.0).abs() < 1e-8, "{c1:?}");
    }

    #[test]
    fn saddle_examples() {
        let u = RadialFunction::harmonic(1.0).unwrap();
        let f = RadialFunction::monomial(2.0).unwrap();
        for l in [0.1, 0.5, 1.0] {
            let p = saddle_profile(&u, &f, 0.0, l).unwrap();
            assert!((p.r_star - l.sqrt()).abs() < 1e-10);
            assert_eq!(p.phi_min, 0.0);
        }
        let p = saddle_profile(&u, &f, 0.5, 1.0).unwrap();
        assert!((p.r_star - 1.0 / 1.5f64.sqrt()).abs() < 1e-12);
        assert!((asymptotic_f(&u, &f, 0.5, 64).unwrap() + 0.5 * 1.5f64.ln()).abs() < 1e-12);
        assert_eq!(asymptotic_f(&u, &f, 0.0, 64).unwrap(), 0.0);
        assert!((asymptotic_f_derivative(&u, &f, 0.5, 64).unwrap() + 1.0 / 3.0).abs() < 1e-12);
    }
}
