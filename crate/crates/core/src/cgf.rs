//! Scaled cumulant generating function `χ(s)/N²` and the large-deviation
//! rate function `Ψ(Λ)`, with `P(L_N ≈ NΛ) ≍ e^{-N² Ψ(Λ)}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cumulants::{slope_energy, tilted_mean};
use crate::equilibrium::{droplet_radius, tilted_sweep};
use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;
use crate::potentials::GasModel;

/// Gauss–Legendre nodes per panel in [`chi_over_n2`].
pub const CHI_PANEL_NODES: usize = 8;
/// Default panel count for [`chi_over_n2`].
pub const DEFAULT_CHI_PANELS: usize = 16;

/// `∂_s χ / N² = -∫_0^{R_s} f(x) (x^{d-1} W'(x))' dx`.
pub fn dchi_ds(model: &GasModel, s: f64) -> Result<f64> {
    let t = &tilted_sweep(model, &[s])?[0];
    Ok(-tilted_mean(model, s, t.radius)?)
}

fn dchi_at_radius(model: &GasModel, s: f64, radius: f64) -> Result<f64> {
    Ok(-tilted_mean(model, s, radius)?)
}

/// `χ(s)/N²` at leading order, integrating [`dchi_ds`] from 0 to `s` on
/// `panels` Gauss–Legendre panels.
pub fn chi_over_n2(model: &GasModel, s: f64, panels: usize) -> Result<f64> {
    if panels == 0 {
        return Err(Error::InvalidParameter("need at least one panel".into()));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let rule = gauss_legendre(CHI_PANEL_NODES);
    let width = s / panels as f64;
    let mut nodes = Vec::with_capacity(panels * CHI_PANEL_NODES);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for &(x, w) in rule.as_node_weight_pairs() {
            nodes.push(mid + 0.5 * width * x);
            weights.push(0.5 * width * w);
        }
    }
    let droplets = tilted_sweep(model, &nodes)?;
    let mut total = 0.0;
    for ((t, s), w) in droplets.iter().zip(&nodes).zip(&weights) {
        total += w * dchi_at_radius(model, *s, t.radius)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgfCurve {
    pub s_values: Vec<f64>,
    pub dchi: Vec<f64>,
    pub chi: Vec<f64>,
    pub droplet_radii: Vec<f64>,
}

/// `χ/N²`, `∂_sχ/N²` and `R_s` on `points` equally spaced tilts in
/// `[s_min, s_max]`. Points are computed in parallel and kept in order.
pub fn cgf_curve(model: &GasModel, s_min: f64, s_max: f64, points: usize, panels: usize) -> Result<CgfCurve> {
    if points < 2 || !(s_min < s_max) {
        return Err(Error::InvalidParameter(format!(
            "need s_min < s_max and at least 2 points (got [{s_min}, {s_max}], {points})"
        )));
    }
    let s_values: Vec<f64> = (0..points)
        .map(|i| s_min + (s_max - s_min) * i as f64 / (points - 1) as f64)
        .collect();
    let droplets = tilted_sweep(model, &s_values)?;
    let rows: Vec<(f64, f64)> = s_values
        .par_iter()
        .zip(&droplets)
        .map(|(&s, t)| Ok((dchi_at_radius(model, s, t.radius)?, chi_over_n2(model, s, panels)?)))
        .collect::<Result<_>>()?;
    Ok(CgfCurve {
        dchi: rows.iter().map(|r| r.0).collect(),
        chi: rows.iter().map(|r| r.1).collect(),
        droplet_radii: droplets.iter().map(|t| t.radius).collect(),
        s_values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub radius: f64,
    pub s: f64,
    pub lambda: f64,
    pub psi_prime: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCurve {
    /// Sorted by radius; includes the mean point `Λ̄` where `Ψ = Ψ' = 0`.
    pub points: Vec<RatePoint>,
    pub lambda_bar: f64,
}

impl RateCurve {
    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.lambda)
    }
}

/// Tilt whose droplet has radius `r`: `s = β (r^{1-d} - U'(r)) / f'(r)`.
pub fn tilt_for_radius(model: &GasModel, r: f64) -> Result<f64> {
    let d = model.dimension() as i32;
    let fp = model.statistic().slope(r)?;
    if fp.abs() < 1e-14 {
        return Err(Error::ZeroSlope(r));
    }
    let up = model.potential().slope(r)?;
    Ok(model.beta() * (r.powi(1 - d) - up) / fp)
}

/// Rate function sampled parametrically in the droplet radius.
///
/// Each grid radius gives `s`, `Ψ' = -s` and `Λ`; `Ψ` is accumulated from
/// `Λ̄` by the trapezoid rule with the endpoint correction
/// `-(h²/12)(Ψ''_b - Ψ''_a)`, using `Ψ'' = 1/(∂²_s χ/N²)`.
pub fn rate_function(model: &GasModel, radius_grid: &[f64]) -> Result<RateCurve> {
    if radius_grid.is_empty() {
        return Err(Error::InvalidParameter("empty radius grid".into()));
    }
    if let Some(r) = radius_grid.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter(format!("radii must be positive, got {r}")));
    }
    let mean_radius = droplet_radius(model)?.radius;
    let mut radii: Vec<f64> = radius_grid.to_vec();
    radii.push(mean_radius);
    radii.sort_by(f64::total_cmp);
    radii.dedup();

    // (point without Ψ, Ψ'')
    let samples: Vec<(RatePoint, f64)> = radii
        .par_iter()
        .map(|&r| {
            let s = if r == mean_radius { 0.0 } else { tilt_for_radius(model, r)? };
            let lambda = tilted_mean(model, s, r)?;
            let curvature = 1.0 / slope_energy(model, r)?;
            Ok((
                RatePoint {
                    radius: r,
                    s,
                    lambda,
                    psi_prime: -s,
                    psi: 0.0,
                },
                curvature,
            ))
        })
        .collect::<Result<_>>()?;

    let center = radii.iter().position(|&r| r == mean_radius).expect("mean radius inserted");
    let mut points: Vec<RatePoint> = samples.iter().map(|s| s.0).collect();
    let segment = |a: usize, b: usize| -> f64 {
        let (pa, pb) = (&samples[a], &samples[b]);
        let h = pb.0.lambda - pa.0.lambda;
        0.5 * h * (pa.0.psi_prime + pb.0.psi_prime) - h * h / 12.0 * (pb.1 - pa.1)
    };
    for k in center + 1..points.len() {
        points[k].psi = points[k - 1].psi + segment(k - 1, k);
    }
    for k in (0..center).rev() {
        points[k].psi = points[k + 1].psi - segment(k, k + 1);
    }
    Ok(RateCurve {
        lambda_bar: points[center].lambda,
        points,
    })
}

/// `-min_Λ (Ψ(Λ) + sΛ)` over a sampled rate curve.
///
/// The sampled minimum is refined on the adjacent interval where
/// `Ψ'(Λ) + s` changes sign: there the cubic Hermite interpolant of
/// `Ψ + sΛ` has a quadratic derivative whose root gives the minimizer.
pub fn legendre_roundtrip(s: f64, rate: &RateCurve) -> Result<f64> {
    let mut pts: Vec<RatePoint> = rate.points.clone();
    pts.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    if pts.len() < 3 {
        return Err(Error::InvalidParameter("rate curve needs at least 3 points".into()));
    }
    let value = |p: &RatePoint| p.psi + s * p.lambda;
    let k = (0..pts.len())
        .min_by(|&i, &j| value(&pts[i]).total_cmp(&value(&pts[j])))
        .expect("non-empty");
    if k == 0 || k == pts.len() - 1 {
        return Err(Error::RangeTooNarrow(pts[k].lambda));
    }
    let slope = |p: &RatePoint| p.psi_prime + s;
    let (a, b) = if slope(&pts[k]) > 0.0 { (k - 1, k) } else { (k, k + 1) };
    let (pa, pb) = (&pts[a], &pts[b]);
    let h = pb.lambda - pa.lambda;
    let (y0, y1) = (value(pa), value(pb));
    let (m0, m1) = (slope(pa) * h, slope(pb) * h);
    // Hermite cubic p(t) on t ∈ [0,1]; p'(t) = A t² + B t + C
    let big_a = 6.0 * (y0 - y1) + 3.0 * (m0 + m1);
    let big_b = -6.0 * (y0 - y1) - 4.0 * m0 - 2.0 * m1;
    let big_c = m0;
    let t = if big_a.abs() < 1e-300 {
        -big_c / big_b
    } else {
        let disc = (big_b * big_b - 4.0 * big_a * big_c).max(0.0).sqrt();
        let q = -0.5 * (big_b + big_b.signum() * disc);
        let (r1, r2) = (q / big_a, big_c / q);
        if (0.0..=1.0).contains(&r1) { r1 } else { r2 }
    };
    let t = t.clamp(0.0, 1.0);
    let (t2, t3) = (t * t, t * t * t);
    let p = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * m0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * m1;
    Ok(-p.min(value(&pts[k])))
}

/// Rate function of `f = x²` in the harmonic trap `U = μx²/2`:
/// `(β/4)(2Λμ - ln(2Λμ) - 1)` in `d = 2`, and otherwise
/// `(β/2)(d²μ^{1-2/d}/(4-d²) + Λ(μ - (2/(2-d))((d+2)Λ/d)^{-d/2}))`.
pub fn rate_closed_harmonic_x2(d: usize, mu: f64, beta: f64, lambda: f64) -> Result<f64> {
    if d == 0 || !(mu > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need d ≥ 1, mu > 0, beta > 0 (got d={d}, mu={mu}, beta={beta})"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("rate function diverges at Lambda = {lambda} ≤ 0")));
    }
    if d == 2 {
        let x = 2.0 * lambda * mu;
        return Ok(0.25 * beta * (x - x.ln() - 1.0));
    }
    let df = d as f64;
    let constant = df * df * mu.powf(1.0 - 2.0 / df) / (4.0 - df * df);
    let power = ((df + 2.0) * lambda / df).powf(-0.5 * df);
    Ok(0.5 * beta * (constant + lambda * (mu - 2.0 / (2.0 - df) * power)))
}

/// Rate function obtained by naively applying the smooth-`f` result to
/// `f = |x|` in `d = 1` with `U = μx²/2`:
/// `β/(6μ) (4√2 (μΛ)^{3/2} - 6μΛ + 1)`.
///
/// `f'(0) ≠ 0` breaks the edge condition at the origin and the formula is
/// only correct for `Λ ≤ Λ̄ = 1/(2μ)`; larger `Λ` is refused.
pub fn naive_abs_rate_d1(mu: f64, beta: f64, lambda: f64) -> Result<f64> {
    if !(mu > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("need mu > 0, beta > 0 (got {mu}, {beta})")));
    }
    let lambda_bar = 0.5 / mu;
    if !(lambda > 0.0) || lambda > lambda_bar {
        return Err(Error::Domain(format!(
            "naive |x| branch holds only for 0 < Lambda ≤ {lambda_bar}, got {lambda}"
        )));
    }
    let x = mu * lambda;
    Ok(beta / (6.0 * mu) * (4.0 * 2f64.sqrt() * x.powf(1.5) - 6.0 * x + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialFunction;
    use std::f64::consts::LN_2;

    fn ginibre() -> GasModel {
        GasModel::new(
            2,
            2.0,
            100,
            RadialFunction::harmonic(1.0).unwrap(),
            RadialFunction::monomial(2.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn derivative_examples() {
        let m = ginibre();
        assert!((dchi_ds(&m, 0.0).unwrap() + 0.5).abs() < 1e-13);
        for s in [-0.5, 0.3, 1.0] {
            assert!((dchi_ds(&m, s).unwrap() + 0.5 / (1.0 + s)).abs() < 1e-13);
        }
        let zero = m.with_statistic("poly:0".parse().unwrap()).unwrap();
        assert_eq!(dchi_ds(&zero, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn chi_examples() {
        let m = ginibre();
        assert_eq!(chi_over_n2(&m, 0.0, 16).unwrap(), 0.0);
        assert!((chi_over_n2(&m, 1.0, 16).unwrap() + 0.5 * LN_2).abs() < 1e-12);
        assert!((chi_over_n2(&m, -0.5, 16).unwrap() - 0.5 * LN_2).abs() < 1e-12);
        let curve = cgf_curve(&m, -0.5, 0.5, 5, 16).unwrap();
        assert_eq!(curve.chi[2], 0.0);
        for (s, chi) in curve.s_values.iter().zip(&curve.chi) {
            assert!((chi + 0.5 * (1.0 + s).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_examples() {
        assert!(rate_closed_harmonic_x2(2, 1.0, 2.0, 0.5).unwrap().abs() < 1e-15);
        assert!((rate_closed_harmonic_x2(2, 1.0, 2.0, 1.0).unwrap() - 0.1534264097).abs() < 1e-10);
        assert!(rate_closed_harmonic_x2(2, 1.0, 2.0, 0.0).is_err());
        // the d ≠ 2 form vanishes at the mean d/(d+2) μ^{-2/d}
        for d in [1, 3, 4] {
            let df = d as f64;
            let bar = df / (df + 2.0) * 2f64.powf(-2.0 / df);
            assert!(rate_closed_harmonic_x2(d, 2.0, 1.5, bar).unwrap().abs() < 1e-14);
        }
        assert!(naive_abs_rate_d1(1.0, 2.0, 0.5).unwrap().abs() < 1e-14);
        assert!(naive_abs_rate_d1(1.0, 2.0, 0.6).is_err());
    }

    #[test]
    fn parametric_matches_closed_form() {
        let m = ginibre();
        let grid: Vec<f64> = (0..=240).map(|i| 0.4 + 1.6 * i as f64 / 240.0).collect();
        let rate = rate_function(&m, &grid).unwrap();
        assert!((rate.lambda_bar - 0.5).abs() < 1e-13);
        for p in &rate.points {
            let exact = rate_closed_harmonic_x2(2, 1.0, 2.0, p.lambda).unwrap();
            assert!((p.psi - exact).abs() < 1e-7, "{p:?} vs {exact}");
            assert!(p.psi >= 0.0);
        }
        for s in [-0.5, 0.0, 1.0] {
            let l = legendre_roundtrip(s, &rate).unwrap();
            assert!((l + 0.5 * (1.0 + s).ln()).abs() < 1e-8, "s={s}: {l}");
        }
        assert!(matches!(legendre_roundtrip(10.0, &rate), Err(Error::RangeTooNarrow(_))));
    }

    #[test]
    fn zero_slope_is_reported() {
        let m = ginibre().with_statistic("poly:0,0,-1,0,1".parse().unwrap()).unwrap();
        // f'(r) = -2r + 4r³ vanishes at r = 1/√2
        assert!(matches!(rate_function(&m, &[0.5f64.sqrt()]), Err(Error::ZeroSlope(_))));
    }
}
