//! Leading-order cumulants of `L_N = Σ_i f(|x_i|)`.
//!
//! `⟨L_N⟩ ≈ c_1 N` and `⟨L_N^q⟩_c ≈ c_q N^{2-q}` for `q ≥ 2`. For `q ≥ 3` the
//! coefficient depends only on the jets of `U` and `f` at the droplet edge.

use std::fmt;

use serde::Serialize;

use crate::equilibrium::{droplet_radius, tilted_radius};
use crate::error::{Error, Result};
use crate::numerics::{central_derivative, diff::stencil_half_width, gamma_ratio, integrate};
use crate::potentials::{GasModel, RadialJet, MAX_JET_ORDER};

/// Tolerance handed to the radial quadrature.
pub const QUAD_TOL: f64 = 1e-12;
/// Denominators below this make the edge degenerate.
pub const DEGENERATE_TOL: f64 = 1e-14;
/// Highest order reachable by [`cumulant_q_jet`].
pub const MAX_JET_CUMULANT: usize = MAX_JET_ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ClosedForm,
    JetOperator,
    FiniteDifference,
    DeterminantalExact,
    MonteCarlo,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::ClosedForm => "closed",
            Route::JetOperator => "jet",
            Route::FiniteDifference => "fd",
            Route::DeterminantalExact => "det",
            Route::MonteCarlo => "mc",
        })
    }
}

/// Cumulant of order `q` as `leading_coefficient · N^{n_scaling_exponent}`.
///
/// For the exact and Monte Carlo routes the coefficient is the finite-`N`
/// cumulant rescaled by `N^{-n_scaling_exponent}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulantReport {
    pub order: usize,
    pub leading_coefficient: f64,
    pub n_scaling_exponent: i32,
    pub route: Route,
    pub error_estimate: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CumulantReport {
    pub fn new(order: usize, leading_coefficient: f64, route: Route, error_estimate: f64) -> Self {
        Self {
            order,
            leading_coefficient,
            n_scaling_exponent: scaling_exponent(order),
            route,
            error_estimate,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// The cumulant itself at particle number `n`.
    pub fn at_n(&self, n: usize) -> f64 {
        self.leading_coefficient * (n as f64).powi(self.n_scaling_exponent)
    }
}

/// `1` for the mean, `2 - q` otherwise.
pub fn scaling_exponent(q: usize) -> i32 {
    if q == 1 {
        1
    } else {
        2 - q as i32
    }
}

fn power(x: f64, k: i32) -> f64 {
    x.powi(k)
}

/// `∫_0^R f(x) (x^{d-1} W'(x))' dx` with `W = U + (s/β) f`: the mean of `f`
/// under the tilted equilibrium measure.
pub(crate) fn tilted_mean(model: &GasModel, s: f64, radius: f64) -> Result<f64> {
    let d = model.dimension() as i32;
    let tilt = s / model.beta();
    let integrand = |x: f64| -> Result<f64> {
        let u = model.potential().jet(x, 2)?;
        let f = model.statistic().jet(x, 2)?;
        let w1 = u.derivative(1) + tilt * f.derivative(1);
        let w2 = u.derivative(2) + tilt * f.derivative(2);
        let flux = (d - 1) as f64 * power(x, d - 2) * w1 + power(x, d - 1) * w2;
        Ok(f.value() * flux)
    };
    Ok(integrate(integrand, 0.0, radius, QUAD_TOL)?.value)
}

/// `β^{-1} ∫_0^R x^{d-1} f'(x)² dx`.
pub(crate) fn slope_energy(model: &GasModel, radius: f64) -> Result<f64> {
    let d = model.dimension() as i32;
    let integrand = |x: f64| -> Result<f64> {
        let fp = model.statistic().slope(x)?;
        Ok(power(x, d - 1) * fp * fp)
    };
    Ok(integrate(integrand, 0.0, radius, QUAD_TOL)?.value / model.beta())
}

/// `c_1 = ∫_0^R f (x^{d-1} U')' dx`.
pub fn first_cumulant(model: &GasModel) -> Result<CumulantReport> {
    let r = droplet_radius(model)?.radius;
    let c = tilted_mean(model, 0.0, r)?;
    Ok(CumulantReport::new(1, c, Route::ClosedForm, QUAD_TOL * (1.0 + c.abs())))
}

/// `c_2 = β^{-1} ∫_0^R x^{d-1} f'² dx`.
pub fn second_cumulant(model: &GasModel) -> Result<CumulantReport> {
    let r = droplet_radius(model)?.radius;
    let c = slope_energy(model, r)?;
    Ok(CumulantReport::new(2, c, Route::ClosedForm, QUAD_TOL * (1.0 + c.abs())))
}

struct Edge {
    radius: f64,
    u: RadialJet,
    f: RadialJet,
    /// `U''(R) + (d-1)/R^d`.
    curvature: f64,
}

fn edge(model: &GasModel, order: usize) -> Result<Edge> {
    let radius = droplet_radius(model)?.radius;
    let u = model.potential().jet(radius, order)?;
    let f = model.statistic().jet(radius, order)?;
    let d = model.dimension() as i32;
    let curvature = u.derivative(2) + (d - 1) as f64 / power(radius, d);
    if curvature <= DEGENERATE_TOL {
        return Err(Error::DegenerateEdge {
            radius,
            denominator: curvature,
        });
    }
    Ok(Edge {
        radius,
        u,
        f,
        curvature,
    })
}

fn rounding_error(c: f64) -> f64 {
    16.0 * f64::EPSILON * c.abs()
}

/// `c_3 = β^{-2} R^{d-1} f'(R)³ / (U''(R) + (d-1)/R^d)`.
pub fn third_cumulant(model: &GasModel) -> Result<CumulantReport> {
    let e = edge(model, 2)?;
    let d = model.dimension() as i32;
    let fp = e.f.derivative(1);
    let c = power(e.radius, d - 1) * fp.powi(3) / e.curvature / model.beta().powi(2);
    Ok(CumulantReport::new(3, c, Route::ClosedForm, rounding_error(c)))
}

/// Fourth cumulant from the edge jets of `U` (order 3) and `f` (order 2).
pub fn fourth_cumulant(model: &GasModel) -> Result<CumulantReport> {
    let e = edge(model, 3)?;
    let d = model.dimension() as i32;
    let r = e.radius;
    let (f1, f2) = (e.f.derivative(1), e.f.derivative(2));
    let u3 = e.u.derivative(3);
    let dd = e.curvature;
    let first = ((d - 1) as f64 * d as f64 - power(r, d + 1) * u3) * f1.powi(4) / (r * r * dd.powi(3));
    let second = power(r, d - 2) * f1.powi(3) * ((d - 1) as f64 * f1 + 4.0 * r * f2) / (dd * dd);
    let c = (first + second) / model.beta().powi(3);
    Ok(CumulantReport::new(4, c, Route::ClosedForm, rounding_error(c)))
}

/// Closed-form coefficient for `q ∈ 1..=4`.
pub fn closed_form(model: &GasModel, q: usize) -> Result<CumulantReport> {
    match q {
        1 => first_cumulant(model),
        2 => second_cumulant(model),
        3 => third_cumulant(model),
        4 => fourth_cumulant(model),
        _ => Err(Error::InvalidParameter(format!(
            "closed forms exist for q = 1..4, got {q}"
        ))),
    }
}

/// `c_q = β^{-(q-1)} (A ∂_r)^{q-3} (A r^{d-1} f'²)` at `r = R`, with
/// `A = f'² / [f''(r^{1-d} - U') + f'(U'' + (d-1)/r^d)]`, by jet arithmetic.
pub fn cumulant_q_jet(model: &GasModel, q: usize) -> Result<CumulantReport> {
    if q < 3 {
        return Err(Error::InvalidParameter(format!(
            "the edge operator starts at q = 3, got {q}"
        )));
    }
    if q > MAX_JET_CUMULANT {
        let radius = droplet_radius(model)?.radius;
        return Err(Error::OrderUnavailable {
            requested: q - 1,
            available: MAX_JET_ORDER,
            radius,
        });
    }
    let m = q - 3;
    let radius = droplet_radius(model)?.radius;
    let d = model.dimension() as f64;
    let u = model.potential().jet(radius, m + 2)?;
    let f = model.statistic().jet(radius, m + 2)?;
    let (u1, f1) = (u.differentiate(), f.differentiate());
    let (u2, f2) = (u1.differentiate(), f1.differentiate());
    let r_1md = RadialJet::power_of_variable(radius, 1.0 - d, m)?;
    let r_md = RadialJet::power_of_variable(radius, -d, m)?;
    let r_dm1 = RadialJet::power_of_variable(radius, d - 1.0, m)?;

    let denom = f2 * (r_1md - u1) + f1 * (u2 + r_md.scale(d - 1.0));
    if denom.value().abs() < DEGENERATE_TOL {
        return Err(Error::DegenerateEdge {
            radius,
            denominator: denom.value(),
        });
    }
    let slope_sq = f1 * f1;
    let a = slope_sq.checked_div(&denom)?;
    let mut g = a * r_dm1 * slope_sq;
    for _ in 0..m {
        g = a * g.differentiate();
    }
    let c = g.value() / model.beta().powi(q as i32 - 1);
    Ok(CumulantReport::new(q, c, Route::JetOperator, rounding_error(c) * q as f64))
}

/// Default step of [`cumulant_q_fd`].
pub fn default_fd_step(q: usize) -> f64 {
    match q {
        0..=4 => 1e-2,
        5 => 3e-2,
        _ => 5e-2,
    }
}

/// Richardson levels used by [`cumulant_q_fd`].
pub const FD_LEVELS: usize = 3;

/// `c_q = (-1)^q ∂_s^{q-2} g(0)` with `g(s) = β^{-1} ∫_0^{R_s} x^{d-1} f'² dx`,
/// by central differences in `s` with Richardson extrapolation.
pub fn cumulant_q_fd(model: &GasModel, q: usize, h: Option<f64>) -> Result<CumulantReport> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!(
            "the finite-difference route starts at q = 2, got {q}"
        )));
    }
    let h = h.unwrap_or_else(|| default_fd_step(q));
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let order = q - 2;
    let reach = stencil_half_width(order) as f64 * h;
    for s in [-reach, reach] {
        let ok = tilted_radius(model, s).map(|t| t.confinement_ok).unwrap_or(false);
        if !ok {
            return Err(Error::StencilOutOfRange(format!(
                "tilt {s} is outside the confining range for q = {q}, h = {h}"
            )));
        }
    }
    let g = |s: f64| -> Result<f64> {
        let radius = tilted_radius(model, s)?.radius;
        slope_energy(model, radius)
    };
    let levels = if order == 0 { 0 } else { FD_LEVELS };
    let der = central_derivative(g, order, h, levels)?;
    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
    Ok(CumulantReport::new(
        q,
        sign * der.value,
        Route::FiniteDifference,
        der.error_estimate,
    )
    .with_note(format!("h = {h}, {levels} Richardson levels")))
}

/// Cumulants of `f(x) = x` in the harmonic trap `U = μx²/2`:
/// `c_q = β^{-(q-1)} Γ(q-1+(2-q)/d) / (d Γ(2+(2-q)/d)) R^{(q-1)d+2-q}`, `μR^d = 1`.
///
/// Where `2 + (2-q)/d` is a pole of `Γ` the coefficient vanishes; this is
/// reported as [`Error::GammaPole`].
pub fn harmonic_linear_cumulants(d: usize, mu: f64, beta: f64, q: usize) -> Result<CumulantReport> {
    if d == 0 || q < 2 || !(mu > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need d ≥ 1, q ≥ 2, mu > 0, beta > 0 (got d={d}, q={q}, mu={mu}, beta={beta})"
        )));
    }
    let (df, qf) = (d as f64, q as f64);
    let shift = (2.0 - qf) / df;
    let ratio = gamma_ratio(qf - 1.0 + shift, 2.0 + shift)?;
    let radius = mu.powf(-1.0 / df);
    let c = ratio / df * radius.powf((qf - 1.0) * df + 2.0 - qf) / beta.powi(q as i32 - 1);
    let mut report = CumulantReport::new(q, c, Route::ClosedForm, rounding_error(c) * 4.0);
    if d == 1 {
        report = report.with_note("f'(0) = 1 violates the d = 1 edge condition; value is the naive extension");
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialFunction;

    fn model(d: usize, beta: f64, mu: f64, f: &str) -> GasModel {
        GasModel::unchecked(d, beta, 100, RadialFunction::harmonic(mu).unwrap(), f.parse().unwrap()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn ginibre_square() {
        let m = model(2, 2.0, 1.0, "monomial:q=2");
        assert!(close(first_cumulant(&m).unwrap().leading_coefficient, 0.5, 1e-13));
        assert!(close(second_cumulant(&m).unwrap().leading_coefficient, 0.5, 1e-13));
        assert!(close(third_cumulant(&m).unwrap().leading_coefficient, 1.0, 1e-14));
        assert!(close(fourth_cumulant(&m).unwrap().leading_coefficient, 3.0, 1e-14));
        for q in 3..=4 {
            let jet = cumulant_q_jet(&m, q).unwrap().leading_coefficient;
            let closed = closed_form(&m, q).unwrap().leading_coefficient;
            assert!(close(jet, closed, 1e-12));
        }
        // c_q = (q-1)!/2
        assert!(close(cumulant_q_jet(&m, 6).unwrap().leading_coefficient, 60.0, 1e-12));
        let r = third_cumulant(&m).unwrap();
        assert_eq!(r.n_scaling_exponent, -1);
        assert!(close(r.at_n(200), 1.0 / 200.0, 1e-14));
    }

    #[test]
    fn constant_statistic_vanishes() {
        let m = model(2, 2.0, 1.0, "poly:3");
        assert_eq!(second_cumulant(&m).unwrap().leading_coefficient, 0.0);
        assert_eq!(third_cumulant(&m).unwrap().leading_coefficient, 0.0);
        assert!((first_cumulant(&m).unwrap().leading_coefficient - 3.0).abs() < 1e-13);
    }

    #[test]
    fn linear_statistic_against_gamma_formula() {
        for beta in [1.0, 2.0, 4.0] {
            let m = model(2, beta, 1.0, "monomial:q=1");
            let c3 = third_cumulant(&m).unwrap().leading_coefficient;
            assert!(close(c3, 0.5 / (beta * beta), 1e-14));
            for q in 2..=5 {
                let g = harmonic_linear_cumulants(2, 1.0, beta, q).unwrap().leading_coefficient;
                let route = if q == 2 {
                    second_cumulant(&m).unwrap()
                } else {
                    cumulant_q_jet(&m, q).unwrap()
                };
                assert!(close(route.leading_coefficient, g, 1e-12), "q={q}: {} vs {g}", route.leading_coefficient);
            }
        }
        // 2 + (2-6)/2 = 0
        assert!(matches!(harmonic_linear_cumulants(2, 1.0, 2.0, 6), Err(Error::GammaPole(_))));
        assert!(close(harmonic_linear_cumulants(2, 1.0, 2.0, 5).unwrap().leading_coefficient, 3.0 / 8.0 / 16.0, 1e-13));
    }

    #[test]
    fn one_dimensional_fourth_cumulant() {
        // U = x²/2 + x⁴/4, f = x²: compare with f'³(4f''U'' - U'''f')/U''³ / β³
        let u: RadialFunction = "poly:0,0,0.5,0,0.25".parse().unwrap();
        let m = GasModel::new(1, 1.5, 10, u.clone(), RadialFunction::monomial(2.0).unwrap()).unwrap();
        let r = droplet_radius(&m).unwrap().radius;
        let uj = u.jet(r, 3).unwrap();
        let (f1, f2) = (2.0 * r, 2.0);
        let expect = f1.powi(3) * (4.0 * f2 * uj.derivative(2) - uj.derivative(3) * f1)
            / uj.derivative(2).powi(3)
            / 1.5f64.powi(3);
        assert!(close(fourth_cumulant(&m).unwrap().leading_coefficient, expect, 1e-13));
    }

    #[test]
    fn finite_differences_agree() {
        let m = model(2, 2.0, 1.0, "monomial:q=2");
        let c2 = cumulant_q_fd(&m, 2, None).unwrap().leading_coefficient;
        assert!(close(c2, 0.5, 1e-13));
        let c3 = cumulant_q_fd(&m, 3, Some(1e-3)).unwrap().leading_coefficient;
        assert!((c3 - 1.0).abs() < 1e-6, "{c3}");
        let c4 = cumulant_q_fd(&m, 4, Some(1e-2)).unwrap().leading_coefficient;
        assert!((c4 - 3.0).abs() < 1e-4, "{c4}");
    }

    #[test]
    fn order_limits() {
        let m = model(2, 2.0, 1.0, "monomial:q=2");
        assert!(cumulant_q_jet(&m, MAX_JET_CUMULANT).is_ok());
        assert!(matches!(
            cumulant_q_jet(&m, MAX_JET_CUMULANT + 1),
            Err(Error::OrderUnavailable { .. })
        ));
        assert!(cumulant_q_jet(&m, 2).is_err());
    }
}
