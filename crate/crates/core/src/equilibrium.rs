//! Droplet radius `R`, tilted radius `R_s` and the (tilted) equilibrium
//! density of a rotationally invariant Coulomb gas.
//!
//! The tilted potential is `W = U + (s/β) f`. Its droplet is the ball of
//! radius `R_s` solving `R_s^{d-1} W'(R_s) = 1`, and inside it the density is
//! `ρ_s(x) = (1/Ω_d) x^{1-d} (x^{d-1} W'(x))'`.

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, brent_with_values, sign_changes, unit_sphere_area};
use crate::potentials::{GasModel, RadialJet};

/// Smallest radius of the pre-scan for the untilted edge.
const SCAN_LO: f64 = 1e-8;
const SCAN_POINTS: usize = 400;
/// Residual tolerance on the edge condition, relative to the size of its terms.
pub const EDGE_TOL: f64 = 1e-12;
/// Largest tilt increment of the continuation in `s`.
pub const MAX_TILT_STEP: f64 = 0.05;
/// A continuation step may change the radius by at most this fraction.
const MAX_RADIUS_JUMP: f64 = 0.2;
/// Densities above `-DENSITY_TOL` count as nonnegative.
pub const DENSITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Droplet {
    pub radius: f64,
    /// `U'(R)`.
    pub potential_slope_at_edge: f64,
    /// `|U'(R) R^{d-1} - 1|`.
    pub normalization_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TiltedDroplet {
    pub s: f64,
    pub radius: f64,
    /// `|R_s^{d-1} W'(R_s) - 1|`.
    pub residual: f64,
    /// The tilted density is nonnegative on `[0, R_s]`.
    pub confinement_ok: bool,
    pub branch_note: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCheck {
    pub nonnegative: bool,
    /// First grid radius (from the origin outward) with a negative density.
    pub first_violation: Option<f64>,
    pub min_density: f64,
}

/// Jet of `W = U + (s/β) f` at `r`.
pub fn tilted_potential_jet(model: &GasModel, s: f64, r: f64, order: usize) -> Result<RadialJet> {
    let u = model.potential().jet(r, order)?;
    if s == 0.0 {
        return Ok(u);
    }
    let f = model.statistic().jet(r, order)?;
    Ok(u + f.scale(s / model.beta()))
}

fn power(x: f64, k: usize) -> f64 {
    x.powi(k as i32)
}

/// `x^{d-1} W'(x) - 1`.
fn edge_function(model: &GasModel, s: f64, x: f64) -> Result<f64> {
    let w = tilted_potential_jet(model, s, x, 1)?;
    Ok(power(x, model.dimension() - 1) * w.derivative(1) - 1.0)
}

/// `(x^{d-1} W'(x))'`, the slope of the edge function.
fn edge_slope(model: &GasModel, s: f64, x: f64) -> Result<f64> {
    let d = model.dimension();
    let w = tilted_potential_jet(model, s, x, 2)?;
    let lead = if d == 1 {
        0.0
    } else {
        (d - 1) as f64 * power(x, d - 2) * w.derivative(1)
    };
    Ok(lead + power(x, d - 1) * w.derivative(2))
}

/// Residual of the edge condition relative to the magnitude of its terms.
fn edge_residual(model: &GasModel, s: f64, x: f64) -> Result<f64> {
    let d = model.dimension();
    let u = model.potential().slope(x)?;
    let tilt = if s == 0.0 {
        0.0
    } else {
        s / model.beta() * model.statistic().slope(x)?
    };
    let xd = power(x, d - 1);
    let scale = 1f64.max(xd * (u.abs() + tilt.abs()));
    Ok((xd * (u + tilt) - 1.0).abs() / scale)
}

/// Radius `R` of the untilted droplet, `U'(R) R^{d-1} = 1`.
///
/// A geometric pre-scan over `[1e-8, cap]` must find exactly one crossing,
/// from below to above.
pub fn droplet_radius(model: &GasModel) -> Result<Droplet> {
    let cap = model.radius_cap();
    let lo = SCAN_LO.min(0.5 * cap);
    let h = |x: f64| edge_function(model, 0.0, x);
    let changes = sign_changes(h, lo, cap, SCAN_POINTS)?;
    let change = match changes.as_slice() {
        [] => {
            let below = h(cap)? < 0.0;
            return Err(Error::NoBracket(if below {
                format!("x^(d-1) U'(x) stays below 1 up to the radius cap {cap}; potential not confining")
            } else {
                format!("x^(d-1) U'(x) already exceeds 1 at x = {lo}")
            }));
        }
        [c] if c.is_increasing() => *c,
        [c] => {
            return Err(Error::NoBracket(format!(
                "x^(d-1) U'(x) - 1 decreases through zero near x = {}",
                c.hi
            )))
        }
        many => {
            let at: Vec<String> = many.iter().map(|c| format!("{:.6}", c.hi)).collect();
            return Err(Error::MultipleRoots(format!(
                "x^(d-1) U'(x) = 1 crossed near x = {}",
                at.join(", ")
            )));
        }
    };
    let radius = brent_with_values(h, change.lo, change.hi, change.f_lo, change.f_hi)?;
    let residual = edge_residual(model, 0.0, radius)?;
    if residual > EDGE_TOL {
        return Err(Error::RootNotConverged(format!(
            "edge residual {residual:e} at R = {radius}"
        )));
    }
    let slope = model.potential().slope(radius)?;
    Ok(Droplet {
        radius,
        potential_slope_at_edge: slope,
        normalization_residual: residual,
    })
}

/// Root of the tilted edge condition near `guess`, found by expanding a
/// bracket geometrically away from `guess` in the direction of the sign.
fn local_root(model: &GasModel, s: f64, guess: f64) -> Result<f64> {
    let cap = model.radius_cap();
    let h = |x: f64| edge_function(model, s, x);
    let h0 = h(guess)?;
    if h0 == 0.0 {
        return Ok(guess);
    }
    let upward = h0 < 0.0;
    let mut delta = 1e-3;
    let (mut a, mut fa) = (guess, h0);
    loop {
        let b = if upward { a * (1.0 + delta) } else { a / (1.0 + delta) };
        if b > cap || b < SCAN_LO * guess {
            return Err(Error::NoBracket(format!(
                "no tilted edge within [{:e}, {cap}] at s = {s}",
                SCAN_LO * guess
            )));
        }
        let fb = h(b)?;
        if fb.signum() != fa.signum() || fb == 0.0 {
            let (lo, hi, flo, fhi) = if upward { (a, b, fa, fb) } else { (b, a, fb, fa) };
            return brent_with_values(h, lo, hi, flo, fhi);
        }
        a = b;
        fa = fb;
        delta = (2.0 * delta).min(0.25);
    }
}

/// Continues the edge from `(s0, r0)` to `s1` in steps of at most
/// [`MAX_TILT_STEP`], halving on failure. Returns the radius and the number
/// of accepted steps.
fn continue_edge(model: &GasModel, r0: f64, s0: f64, s1: f64) -> Result<(f64, usize)> {
    let dir = (s1 - s0).signum();
    let mut step = MAX_TILT_STEP.min((s1 - s0).abs());
    let min_step = 1e-9 * (1.0 + s1.abs());
    let (mut r, mut s_cur, mut steps) = (r0, s0, 0);
    while s_cur != s1 {
        let s_next = if (s1 - s_cur).abs() <= step {
            s1
        } else {
            s_cur + dir * step
        };
        let attempt = local_root(model, s_next, r).and_then(|r_next| {
            if (r_next / r - 1.0).abs() > MAX_RADIUS_JUMP {
                return Err(Error::LostBranch {
                    s: s_next,
                    reason: format!("radius jumped from {r} to {r_next}"),
                });
            }
            if edge_slope(model, s_next, r_next)? <= 0.0 {
                return Err(Error::LostBranch {
                    s: s_next,
                    reason: format!("edge condition is not increasing at R_s = {r_next}"),
                });
            }
            Ok(r_next)
        });
        match attempt {
            Ok(r_next) => {
                r = r_next;
                s_cur = s_next;
                steps += 1;
                step = (1.5 * step).min(MAX_TILT_STEP);
            }
            Err(e) => {
                step *= 0.5;
                if step < min_step {
                    return Err(match e {
                        Error::LostBranch { .. } => e,
                        other => Error::LostBranch {
                            s: s_next,
                            reason: other.to_string(),
                        },
                    });
                }
            }
        }
    }
    Ok((r, steps))
}

fn finish(model: &GasModel, s: f64, radius: f64, note: String) -> Result<TiltedDroplet> {
    let residual = edge_residual(model, s, radius)?;
    if residual > EDGE_TOL {
        return Err(Error::RootNotConverged(format!(
            "tilted edge residual {residual:e} at R_s = {radius}, s = {s}"
        )));
    }
    let scan = density_scan(model, s, radius, 64)?;
    Ok(TiltedDroplet {
        s,
        radius,
        residual,
        confinement_ok: scan.nonnegative,
        branch_note: note,
    })
}

/// Radius `R_s` of the tilted droplet on the branch continued from `R_0 = R`.
pub fn tilted_radius(model: &GasModel, s: f64) -> Result<TiltedDroplet> {
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!("tilt must be finite, got {s}")));
    }
    let base = droplet_radius(model)?;
    if s == 0.0 {
        return finish(model, s, base.radius, "s = 0: droplet radius".into());
    }
    let (radius, steps) = continue_edge(model, base.radius, 0.0, s)?;
    finish(
        model,
        s,
        radius,
        format!("continued from R = {} in {steps} steps", base.radius),
    )
}

/// Tilted radii for many `s`, each continued from its neighbour closer to 0.
/// Results come back in the order of `s_values`.
pub fn tilted_sweep(model: &GasModel, s_values: &[f64]) -> Result<Vec<TiltedDroplet>> {
    if let Some(bad) = s_values.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter(format!("tilt must be finite, got {bad}")));
    }
    let base = droplet_radius(model)?;
    let mut order: Vec<usize> = (0..s_values.len()).collect();
    order.sort_by(|&i, &j| s_values[i].abs().total_cmp(&s_values[j].abs()));
    let mut out: Vec<Option<TiltedDroplet>> = vec![None; s_values.len()];
    // last continued point on each side of zero
    let mut pos = (0.0, base.radius);
    let mut neg = (0.0, base.radius);
    for i in order {
        let s = s_values[i];
        let side = if s >= 0.0 { &mut pos } else { &mut neg };
        let (radius, steps) = continue_edge(model, side.1, side.0, s)?;
        *side = (s, radius);
        let note = if s == 0.0 {
            "s = 0: droplet radius".to_string()
        } else {
            format!("continued from R = {} ({steps} steps from the previous point)", base.radius)
        };
        out[i] = Some(finish(model, s, radius, note)?);
    }
    Ok(out.into_iter().map(|d| d.expect("every index visited")).collect())
}

/// `ρ_s(x)` assuming `x` lies inside the droplet.
fn density_inside(model: &GasModel, s: f64, x: f64) -> Result<f64> {
    let d = model.dimension();
    let w = tilted_potential_jet(model, s, x, 2)?;
    let laplacian = if d == 1 {
        w.derivative(2)
    } else {
        w.derivative(2) + (d - 1) as f64 * w.derivative(1) / x
    };
    Ok(laplacian / unit_sphere_area(d))
}

fn check_radius(model: &GasModel, x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) || (x == 0.0 && model.dimension() >= 2) {
        return Err(Error::Domain(format!(
            "density needs x > 0 in d = {}, got {x}",
            model.dimension()
        )));
    }
    Ok(())
}

/// Tilted equilibrium density at radius `x`; zero outside the droplet.
pub fn equilibrium_density(model: &GasModel, s: f64, x: f64) -> Result<f64> {
    check_radius(model, x)?;
    let droplet = tilted_radius(model, s)?;
    if x > droplet.radius {
        return Ok(0.0);
    }
    density_inside(model, s, x)
}

fn density_scan(model: &GasModel, s: f64, radius: f64, grid: usize) -> Result<DensityCheck> {
    let first = if model.dimension() == 1 { 0 } else { 1 };
    let mut check = DensityCheck {
        nonnegative: true,
        first_violation: None,
        min_density: f64::INFINITY,
    };
    for i in first..=grid {
        let x = radius * i as f64 / grid as f64;
        let rho = density_inside(model, s, x)?;
        check.min_density = check.min_density.min(rho);
        if rho < -DENSITY_TOL && check.first_violation.is_none() {
            check.nonnegative = false;
            check.first_violation = Some(x);
        }
    }
    Ok(check)
}

/// Samples the tilted density on `grid` equally spaced radii in `(0, R_s]`
/// (including the origin in `d = 1`).
pub fn check_density_nonnegative(model: &GasModel, s: f64, grid: usize) -> Result<DensityCheck> {
    if grid < 16 {
        return Err(Error::InvalidParameter(format!("density grid needs at least 16 points, got {grid}")));
    }
    let droplet = tilted_radius(model, s)?;
    density_scan(model, s, droplet.radius, grid)
}

/// `Ω_d ∫_0^{R_s} x^{d-1} ρ_s(x) dx` by adaptive Simpson; equals 1 for a
/// valid droplet.
pub fn density_normalization(model: &GasModel, s: f64) -> Result<f64> {
    let d = model.dimension();
    let droplet = tilted_radius(model, s)?;
    let omega = unit_sphere_area(d);
    // the integrand is finite at the origin, but jets may not exist there
    let floor = 1e-150;
    let integrand = |x: f64| -> Result<f64> {
        let x = x.max(floor);
        Ok(omega * power(x, d - 1) * density_inside(model, s, x)?)
    };
    Ok(adaptive_simpson(integrand, 0.0, droplet.radius, 1e-12)?.value)
}

/// `dR_s/ds = -f'(R_s) / (s f''(R_s) + β (U''(R_s) + (d-1)/R_s^d))`.
pub fn tilted_radius_slope(model: &GasModel, s: f64) -> Result<f64> {
    let droplet = tilted_radius(model, s)?;
    let r = droplet.radius;
    let d = model.dimension();
    let u = model.potential().jet(r, 2)?;
    let f = model.statistic().jet(r, 2)?;
    let denom = s * f.derivative(2)
        + model.beta() * (u.derivative(2) + (d - 1) as f64 / power(r, d));
    if denom.abs() < 1e-14 {
        return Err(Error::DegenerateEdge {
            radius: r,
            denominator: denom,
        });
    }
    Ok(-f.derivative(1) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialFunction;
    use std::f64::consts::PI;

    fn model(d: usize, mu: f64, f: &str) -> GasModel {
        GasModel::new(
            d,
            2.0,
            10,
            RadialFunction::harmonic(mu).unwrap(),
            f.parse().unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn harmonic_droplets() {
        let r = droplet_radius(&model(2, 1.0, "monomial:q=2")).unwrap().radius;
        assert!((r - 1.0).abs() < 1e-12);
        let r = droplet_radius(&model(2, 2.0, "monomial:q=2")).unwrap().radius;
        assert!((r - 0.7071067812).abs() < 1e-10);
        let r = droplet_radius(&model(3, 1.0, "monomial:q=2")).unwrap().radius;
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_confining_and_multiple_roots() {
        let flat = GasModel::new(
            2,
            2.0,
            10,
            RadialFunction::polynomial(vec![0.0, 0.0, 1e-9]).unwrap(),
            RadialFunction::monomial(2.0).unwrap(),
        )
        .unwrap()
        .with_radius_cap(10.0)
        .unwrap();
        assert!(matches!(droplet_radius(&flat), Err(Error::NoBracket(_))));
        // x U'(x) = 48(x⁴/4 - 2x³/3 + 3x²/8) rises above 1, dips below 0, rises again
        let wiggly = GasModel::new(
            2,
            2.0,
            10,
            RadialFunction::polynomial(vec![0.0, 0.0, 9.0, -32.0 / 3.0, 3.0]).unwrap(),
            RadialFunction::monomial(2.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(droplet_radius(&wiggly), Err(Error::MultipleRoots(_))));
    }

    #[test]
    fn tilted_examples() {
        let m = model(2, 1.0, "monomial:q=2");
        let t = tilted_radius(&m, 0.5).unwrap();
        assert!((t.radius - 1.0 / 1.5f64.sqrt()).abs() < 1e-12);
        assert!(t.confinement_ok);
        let t = tilted_radius(&model(2, 1.0, "monomial:q=1"), 0.2).unwrap();
        assert!((t.radius - 0.9512492197).abs() < 1e-10);
        let t = tilted_radius(&m, 0.0).unwrap();
        assert_eq!(t.radius, droplet_radius(&m).unwrap().radius);
    }

    #[test]
    fn sweep_matches_pointwise() {
        let m = model(2, 1.0, "monomial:q=2");
        let s = [0.3, -0.4, 0.0, 0.1, -0.1];
        let sweep = tilted_sweep(&m, &s).unwrap();
        for (t, s) in sweep.iter().zip(s) {
            assert_eq!(t.s, s);
            assert!((t.radius - (1.0 / (1.0 + s)).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn densities() {
        let m = model(2, 1.0, "monomial:q=2");
        for x in [0.1, 0.5, 0.99] {
            assert!((equilibrium_density(&m, 0.0, x).unwrap() - 1.0 / PI).abs() < 1e-14);
        }
        assert_eq!(equilibrium_density(&m, 0.0, 1.5).unwrap(), 0.0);
        assert!(equilibrium_density(&m, 0.0, 0.0).is_err());
        let rho = equilibrium_density(&m, 0.3, 0.5).unwrap();
        assert!((rho - 1.3 / PI).abs() < 1e-14);
        let m3 = model(3, 1.0, "monomial:q=2");
        assert!((equilibrium_density(&m3, 0.0, 0.4).unwrap() - 3.0 / (4.0 * PI)).abs() < 1e-14);
        assert!(check_density_nonnegative(&m, 0.3, 64).unwrap().nonnegative);
        assert!(check_density_nonnegative(&m, 0.3, 8).is_err());
    }

    #[test]
    fn negative_density_is_detected() {
        // W = x²/2 + 0.75(x⁴ - x²): W'' + W'/x = 2 - 3 + 12x² < 0 near the origin
        let m = GasModel::new(
            2,
            2.0,
            10,
            RadialFunction::harmonic(1.0).unwrap(),
            "poly:0,0,-1,0,1".parse().unwrap(),
        )
        .unwrap();
        let check = check_density_nonnegative(&m, 1.5, 64).unwrap();
        assert!(!check.nonnegative);
        let x = check.first_violation.unwrap();
        assert!(x > 0.0 && x < (1.0f64 / 12.0).sqrt());
        assert!(!tilted_radius(&m, 1.5).unwrap().confinement_ok);
    }

    #[test]
    fn normalization_and_slope() {
        for (d, f) in [(1, "monomial:q=2"), (2, "monomial:q=1"), (3, "monomial:q=3")] {
            let m = model(d, 1.0, f);
            for s in [-0.3, 0.0, 0.4] {
                let norm = density_normalization(&m, s).unwrap();
                assert!((norm - 1.0).abs() < 1e-9, "d={d} f={f} s={s}: {norm}");
                let h = 1e-5;
                let fd = (tilted_radius(&m, s + h).unwrap().radius
                    - tilted_radius(&m, s - h).unwrap().radius)
                    / (2.0 * h);
                let exact = tilted_radius_slope(&m, s).unwrap();
                assert!((fd - exact).abs() < 1e-6 * exact.abs(), "{fd} vs {exact}");
            }
        }
    }

    #[test]
    fn lost_branch_for_runaway_tilt() {
        // f = -x⁴: x W'(x) = x² - 2s x⁴ peaks at 1/(8s) < 1 once s > 1/8
        let m = model(2, 1.0, "poly:0,0,0,0,-1");
        assert!(tilted_radius(&m, 0.1).is_ok());
        let err = tilted_radius(&m, 1.0).unwrap_err();
        assert!(matches!(err, Error::LostBranch { .. }), "{err}");
    }
}
