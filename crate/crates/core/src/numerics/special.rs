use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// `Γ(x)` as `(ln|Γ(x)|, sign Γ(x))`, using the reflection formula for
/// negative arguments. Fails on the poles `x ∈ {0, -1, -2, ...}`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 && x == x.round() {
        return Err(Error::GammaPole(x));
    }
    if x > 0.0 {
        return Ok((ln_gamma(x), 1.0));
    }
    // Γ(x) Γ(1-x) = π / sin(πx)
    let sin = (PI * x).sin();
    Ok((PI.ln() - sin.abs().ln() - ln_gamma(1.0 - x), sin.signum()))
}

/// `Γ(a) / Γ(b)` evaluated in log space.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    let (la, sa) = ln_gamma_signed(a)?;
    let (lb, sb) = ln_gamma_signed(b)?;
    Ok(sa * sb * (la - lb).exp())
}

/// Surface area `Ω_d = 2π^{d/2} / Γ(d/2)` of the unit sphere in `ℝ^d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    let half = 0.5 * d as f64;
    2.0 * (half * PI.ln() - ln_gamma(half)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn reflection_negative_arguments() {
        // Γ(-1/2) = -2√π, Γ(-3/2) = 4√π/3
        let (l, s) = ln_gamma_signed(-0.5).unwrap();
        assert_eq!(s, -1.0);
        assert!((l.exp() - 2.0 * PI.sqrt()).abs() < 1e-12);
        let (l, s) = ln_gamma_signed(-1.5).unwrap();
        assert_eq!(s, 1.0);
        assert!((l.exp() - 4.0 * PI.sqrt() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn poles_rejected() {
        assert!(matches!(ln_gamma_signed(0.0), Err(Error::GammaPole(_))));
        assert!(matches!(ln_gamma_signed(-3.0), Err(Error::GammaPole(_))));
        assert!((gamma_ratio(5.0, 3.0).unwrap() - 12.0).abs() < 1e-12);
    }
}
