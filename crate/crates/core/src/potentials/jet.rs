//! Truncated Taylor expansions ("jets") of radial functions.
//!
//! A [`RadialJet`] of order `K` at center `r₀` holds `f(r₀), f'(r₀), …,
//! f^{(K)}(r₀)`. Internally it stores normalized Taylor coefficients
//! `f^{(k)}(r₀)/k!`, which makes products and compositions cheap convolutions.
//! All arithmetic is exact up to floating-point rounding: the jet of a
//! composite expression equals the derivatives of that expression.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Highest derivative order a jet can carry. Cumulants up to `q = 15` need
/// jets of order `q - 1` for both `U` and `f`.
pub const MAX_JET_ORDER: usize = 14;

const LEN: usize = MAX_JET_ORDER + 1;

#[derive(Clone, Copy, PartialEq)]
pub struct RadialJet {
    center: f64,
    order: usize,
    taylor: [f64; LEN],
}

impl fmt::Debug for RadialJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialJet")
            .field("center", &self.center)
            .field("derivatives", &self.derivatives())
            .finish()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_JET_ORDER {
        return Err(Error::InvalidParameter(format!(
            "jet order {order} exceeds the maximum {MAX_JET_ORDER}"
        )));
    }
    Ok(())
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Generalized binomial coefficient `C(a, k)` for real `a`.
pub(crate) fn binomial(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a - i as f64) / (i + 1) as f64)
}

impl RadialJet {
    /// Jet of the constant function `value`.
    pub fn constant(center: f64, value: f64, order: usize) -> Self {
        let mut taylor = [0.0; LEN];
        taylor[0] = value;
        Self {
            center,
            order: order.min(MAX_JET_ORDER),
            taylor,
        }
    }

    /// Jet of the identity `r ↦ r`.
    pub fn variable(center: f64, order: usize) -> Self {
        let mut jet = Self::constant(center, center, order);
        if jet.order >= 1 {
            jet.taylor[1] = 1.0;
        }
        jet
    }

    /// Jet of `r ↦ r^a` for real `a`; requires `center > 0` unless `a` is a
    /// non-negative integer.
    pub fn power_of_variable(center: f64, a: f64, order: usize) -> Result<Self> {
        check_order(order)?;
        let mut taylor = [0.0; LEN];
        let integer = a >= 0.0 && a == a.round();
        if center <= 0.0 && !integer {
            return Err(Error::Domain(format!(
                "r^{a} has no jet at r = {center}"
            )));
        }
        for (k, t) in taylor.iter_mut().enumerate().take(order + 1) {
            let c = binomial(a, k);
            *t = if c == 0.0 { 0.0 } else { c * center.powf(a - k as f64) };
            if integer && center == 0.0 {
                *t = if k as f64 == a { 1.0 } else { 0.0 };
            }
        }
        Ok(Self {
            center,
            order,
            taylor,
        })
    }

    /// Builds a jet from derivative values `f(r₀), f'(r₀), …`.
    pub fn from_derivatives(center: f64, derivatives: &[f64]) -> Result<Self> {
        if derivatives.is_empty() {
            return Err(Error::InvalidParameter("empty derivative list".into()));
        }
        let order = derivatives.len() - 1;
        check_order(order)?;
        let mut taylor = [0.0; LEN];
        for (k, d) in derivatives.iter().enumerate() {
            taylor[k] = d / factorial(k);
        }
        Self::from_taylor_array(center, order, taylor)
    }

    /// Builds a jet from normalized Taylor coefficients `f^{(k)}(r₀)/k!`.
    pub fn from_taylor(center: f64, coefficients: &[f64]) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient list".into()));
        }
        let order = coefficients.len() - 1;
        check_order(order)?;
        let mut taylor = [0.0; LEN];
        taylor[..coefficients.len()].copy_from_slice(coefficients);
        Self::from_taylor_array(center, order, taylor)
    }

    fn from_taylor_array(center: f64, order: usize, taylor: [f64; LEN]) -> Result<Self> {
        if let Some(k) = taylor[..=order].iter().position(|t| !t.is_finite()) {
            return Err(Error::Domain(format!(
                "derivative of order {k} is not finite at r = {center}"
            )));
        }
        Ok(Self {
            center,
            order,
            taylor,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.taylor[0]
    }

    /// `k`-th derivative at the center; zero beyond the jet's order is *not*
    /// implied, so this panics if `k > order`.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(k <= self.order, "derivative {k} beyond jet order {}", self.order);
        self.taylor[k] * factorial(k)
    }

    /// All derivative values `f(r₀), …, f^{(K)}(r₀)`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order).map(|k| self.derivative(k)).collect()
    }

    pub fn taylor(&self) -> &[f64] {
        &self.taylor[..=self.order]
    }

    pub fn is_finite(&self) -> bool {
        self.taylor().iter().all(|t| t.is_finite())
    }

    /// Same center, lower order.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut taylor = [0.0; LEN];
        taylor[..=order].copy_from_slice(&self.taylor[..=order]);
        Self {
            center: self.center,
            order,
            taylor,
        }
    }

    /// Jet of `f'`, one order lower. A jet of order 0 differentiates to the
    /// zero jet of order 0, which carries no information; callers check orders.
    pub fn differentiate(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut taylor = [0.0; LEN];
        for k in 0..self.order {
            taylor[k] = (k + 1) as f64 * self.taylor[k + 1];
        }
        Self {
            center: self.center,
            order,
            taylor,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = *self;
        for t in out.taylor[..=out.order].iter_mut() {
            *t *= c;
        }
        out
    }

    pub fn offset(&self, c: f64) -> Self {
        let mut out = *self;
        out.taylor[0] += c;
        out
    }

    fn binary_shape(&self, other: &Self) -> (f64, usize) {
        assert!(
            self.center == other.center,
            "jets at different centers ({} vs {})",
            self.center,
            other.center
        );
        (self.center, self.order.min(other.order))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(self.center, 1.0, self.order).checked_div(self)
    }

    /// Quotient, failing when the denominator vanishes at the center.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        let (center, order) = self.binary_shape(rhs);
        let b0 = rhs.taylor[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(Error::Domain(format!(
                "division by a jet with value {b0} at r = {center}"
            )));
        }
        let mut c = [0.0; LEN];
        for k in 0..=order {
            let mut acc = self.taylor[k];
            for i in 1..=k {
                acc -= rhs.taylor[i] * c[k - i];
            }
            c[k] = acc / b0;
        }
        Ok(Self {
            center,
            order,
            taylor: c,
        })
    }

    pub fn exp(&self) -> Self {
        let mut e = [0.0; LEN];
        e[0] = self.taylor[0].exp();
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.taylor[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Self {
            center: self.center,
            order: self.order,
            taylor: e,
        }
    }

    pub fn ln(&self) -> Result<Self> {
        let a0 = self.taylor[0];
        if a0 <= 0.0 {
            return Err(Error::Domain(format!(
                "logarithm of a jet with value {a0}"
            )));
        }
        let mut l = [0.0; LEN];
        l[0] = a0.ln();
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l[j] * self.taylor[k - j];
            }
            l[k] = (self.taylor[k] - acc / k as f64) / a0;
        }
        Ok(Self {
            center: self.center,
            order: self.order,
            taylor: l,
        })
    }

    /// `self^p` for real `p`; the value at the center must be positive.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let a0 = self.taylor[0];
        if a0 <= 0.0 {
            return Err(Error::Domain(format!(
                "real power of a jet with value {a0}"
            )));
        }
        let mut y = [0.0; LEN];
        y[0] = a0.powf(p);
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((p + 1.0) * j as f64 - k as f64) * self.taylor[j] * y[k - j];
            }
            y[k] = acc / (k as f64 * a0);
        }
        Ok(Self {
            center: self.center,
            order: self.order,
            taylor: y,
        })
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::constant(self.center, 1.0, self.order);
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    /// `g ∘ self`, where `outer` holds `g(v), g'(v), …` at `v = self.value()`.
    /// The result has order `min(self.order, outer.len() - 1)`.
    pub fn compose(&self, outer: &[f64]) -> Result<Self> {
        if outer.is_empty() {
            return Err(Error::InvalidParameter("empty outer derivative list".into()));
        }
        let order = self.order.min(outer.len() - 1);
        let mut delta = self.truncate(order);
        delta.taylor[0] = 0.0;
        let mut power = Self::constant(self.center, 1.0, order);
        let mut out = [0.0; LEN];
        for (m, g) in outer.iter().enumerate().take(order + 1) {
            let coeff = g / factorial(m);
            for k in 0..=order {
                out[k] += coeff * power.taylor[k];
            }
            power = power * delta;
        }
        Self::from_taylor_array(self.center, order, out)
    }
}

impl Add for RadialJet {
    type Output = RadialJet;
    fn add(self, rhs: Self) -> Self {
        let (center, order) = self.binary_shape(&rhs);
        let mut taylor = [0.0; LEN];
        for k in 0..=order {
            taylor[k] = self.taylor[k] + rhs.taylor[k];
        }
        Self {
            center,
            order,
            taylor,
        }
    }
}

impl Sub for RadialJet {
    type Output = RadialJet;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for RadialJet {
    type Output = RadialJet;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for RadialJet {
    type Output = RadialJet;
    fn mul(self, rhs: Self) -> Self {
        let (center, order) = self.binary_shape(&rhs);
        let mut taylor = [0.0; LEN];
        for k in 0..=order {
            let mut acc = 0.0;
            for i in 0..=k {
                acc += self.taylor[i] * rhs.taylor[k - i];
            }
            taylor[k] = acc;
        }
        Self {
            center,
            order,
            taylor,
        }
    }
}

impl Mul<f64> for RadialJet {
    type Output = RadialJet;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

/// Panics when the denominator vanishes; use [`RadialJet::checked_div`] for
/// a fallible quotient.
impl Div for RadialJet {
    type Output = RadialJet;
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("jet division by zero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_jet(coeffs: &[f64], r: f64, order: usize) -> RadialJet {
        // p(r) = Σ a_n r^n via jet arithmetic on the variable
        let x = RadialJet::variable(r, order);
        coeffs
            .iter()
            .rev()
            .fold(RadialJet::constant(r, 0.0, order), |acc, a| (acc * x).offset(*a))
    }

    #[test]
    fn variable_and_constants() {
        let x = RadialJet::variable(2.0, 3);
        assert_eq!(x.derivatives(), vec![2.0, 1.0, 0.0, 0.0]);
        let c = RadialJet::constant(2.0, 5.0, 2);
        assert_eq!(c.derivatives(), vec![5.0, 0.0, 0.0]);
    }

    #[test]
    fn cube_derivatives() {
        let x = RadialJet::variable(2.0, 3);
        let cube = x.powi(3);
        assert_eq!(cube.derivatives(), vec![8.0, 12.0, 12.0, 6.0]);
    }

    #[test]
    fn quotient_and_log() {
        // 1/(1+r) at r = 0: derivatives (-1)^k k!
        let x = RadialJet::variable(0.0, 6);
        let g = x.offset(1.0).recip().unwrap();
        for k in 0..=6 {
            let expect = if k % 2 == 0 { 1.0 } else { -1.0 } * factorial(k);
            assert!((g.derivative(k) - expect).abs() < 1e-9);
        }
        let l = x.offset(1.0).ln().unwrap();
        assert_eq!(l.taylor()[..4], [0.0, 1.0, -0.5, 1.0 / 3.0]);
    }

    #[test]
    fn power_of_variable_matches_powf() {
        let a = RadialJet::power_of_variable(1.7, -2.5, 8).unwrap();
        let b = RadialJet::variable(1.7, 8).powf(-2.5).unwrap();
        for k in 0..=8 {
            assert!((a.taylor()[k] - b.taylor()[k]).abs() < 1e-12 * a.taylor()[k].abs().max(1.0));
        }
        assert!(RadialJet::power_of_variable(0.0, 1.5, 2).is_err());
        let sq = RadialJet::power_of_variable(0.0, 2.0, 4).unwrap();
        assert_eq!(sq.derivatives(), vec![0.0, 0.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn compose_exp_of_polynomial() {
        // exp(r²) at r = 0.5 against exp() of the jet
        let x = RadialJet::variable(0.5, 8);
        let inner = x * x;
        let v = inner.value().exp();
        let direct = inner.compose(&[v; 9]).unwrap();
        let via_exp = inner.exp();
        for k in 0..=8 {
            assert!((direct.taylor()[k] - via_exp.taylor()[k]).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn leibniz_matches_polynomial_product() {
        let p = [1.0, -2.0, 0.5, 3.0];
        let q = [0.0, 1.0, 4.0];
        // p*q coefficients by convolution
        let mut pq = vec![0.0; p.len() + q.len() - 1];
        for (i, a) in p.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                pq[i + j] += a * b;
            }
        }
        for &r in &[-1.3, 0.0, 0.7, 2.2] {
            let lhs = poly_jet(&p, r, 8) * poly_jet(&q, r, 8);
            let rhs = poly_jet(&pq, r, 8);
            for k in 0..=8 {
                assert!((lhs.taylor()[k] - rhs.taylor()[k]).abs() < 1e-12 * (1.0 + rhs.taylor()[k].abs()));
            }
        }
    }

    #[test]
    fn non_finite_derivatives_rejected() {
        assert!(RadialJet::from_derivatives(1.0, &[1.0, f64::NAN]).is_err());
        assert!(RadialJet::from_derivatives(1.0, &[0.0; MAX_JET_ORDER + 2]).is_err());
    }
}
