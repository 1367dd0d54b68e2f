//! Radial functions with exact derivative access.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::jet::{binomial, RadialJet, MAX_JET_ORDER};

/// A function of the radius `r = |x| ≥ 0` that can produce exact jets.
///
/// Implementors must be deterministic. `smoothness_at_origin` bounds the
/// jet order available at `r = 0` (`None` means unbounded); away from the
/// origin every order up to [`MAX_JET_ORDER`] must be available.
pub trait Radial: Send + Sync + fmt::Debug {
    fn jet(&self, r: f64, order: usize) -> Result<RadialJet>;

    /// Human-readable name with parameters, e.g. `harmonic:mu=1`.
    fn descriptor(&self) -> String;

    fn smoothness_at_origin(&self) -> Option<usize> {
        None
    }
}

/// Shared handle to a [`Radial`] implementation; cheap to clone.
#[derive(Clone)]
pub struct RadialFunction {
    inner: Arc<dyn Radial>,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialFunction({})", self.inner.descriptor())
    }
}

impl fmt::Display for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.inner.descriptor())
    }
}

impl RadialFunction {
    pub fn new(radial: impl Radial + 'static) -> Self {
        Self {
            inner: Arc::new(radial),
        }
    }

    /// Confining potential `U(r) = (mu/2) r²`.
    pub fn harmonic(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "harmonic stiffness must be positive, got {mu}"
            )));
        }
        Ok(Self::new(Harmonic { mu }))
    }

    /// `f(r) = r^q` for real `q > 0`.
    pub fn monomial(q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "monomial exponent must be positive, got {q}"
            )));
        }
        Ok(Self::new(Monomial { q }))
    }

    /// `Σ_n coefficients[n] · r^n`.
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "polynomial needs at least one finite coefficient".into(),
            ));
        }
        Ok(Self::new(Polynomial { coefficients }))
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::polynomial(vec![value])
    }

    /// Pointwise sum `self + other`.
    pub fn plus(&self, other: &RadialFunction) -> Self {
        Self::new(Sum {
            terms: vec![self.clone(), other.clone()],
        })
    }

    /// Jet of order `order` at radius `r ≥ 0`.
    pub fn jet(&self, r: f64, order: usize) -> Result<RadialJet> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!(
                "radial functions are defined for r >= 0, got {r}"
            )));
        }
        if order > MAX_JET_ORDER {
            return Err(Error::OrderUnavailable {
                requested: order,
                available: MAX_JET_ORDER,
                radius: r,
            });
        }
        if r == 0.0 {
            if let Some(max) = self.inner.smoothness_at_origin() {
                if order > max {
                    return Err(Error::OrderUnavailable {
                        requested: order,
                        available: max,
                        radius: 0.0,
                    });
                }
            }
        }
        self.inner.jet(r, order)
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        Ok(self.jet(r, 0)?.value())
    }

    /// `(f(r), f'(r))`.
    pub fn value_and_slope(&self, r: f64) -> Result<(f64, f64)> {
        let j = self.jet(r, 1)?;
        Ok((j.value(), j.derivative(1)))
    }

    pub fn slope(&self, r: f64) -> Result<f64> {
        Ok(self.jet(r, 1)?.derivative(1))
    }

    pub fn descriptor(&self) -> String {
        self.inner.descriptor()
    }

    pub fn smoothness_at_origin(&self) -> Option<usize> {
        self.inner.smoothness_at_origin()
    }
}

/// Parses the string ids `harmonic:mu=<v>`, `monomial:q=<v>` and
/// `poly:<c0>,<c1>,...` (coefficients in increasing degree).
impl FromStr for RadialFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognized radial function id `{s}`"));
        let (family, params) = s.trim().split_once(':').ok_or_else(bad)?;
        let keyed = |key: &str| -> Result<f64> {
            let (k, v) = params.split_once('=').ok_or_else(bad)?;
            if k.trim() != key {
                return Err(bad());
            }
            v.trim().parse::<f64>().map_err(|_| bad())
        };
        match family.trim() {
            "harmonic" => Self::harmonic(keyed("mu")?),
            "monomial" => Self::monomial(keyed("q")?),
            "poly" => {
                let coefficients = params
                    .split(',')
                    .map(|c| c.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                Self::polynomial(coefficients)
            }
            _ => Err(bad()),
        }
    }
}

fn format_number(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone, Copy)]
struct Harmonic {
    mu: f64,
}

impl Radial for Harmonic {
    fn jet(&self, r: f64, order: usize) -> Result<RadialJet> {
        let mut taylor = [0.0; MAX_JET_ORDER + 1];
        taylor[0] = 0.5 * self.mu * r * r;
        if order >= 1 {
            taylor[1] = self.mu * r;
        }
        if order >= 2 {
            taylor[2] = 0.5 * self.mu;
        }
        RadialJet::from_taylor(r, &taylor[..=order])
    }

    fn descriptor(&self) -> String {
        format!("harmonic:mu={}", format_number(self.mu))
    }
}

#[derive(Debug, Clone, Copy)]
struct Monomial {
    q: f64,
}

impl Monomial {
    fn is_integer(&self) -> bool {
        self.q == self.q.round()
    }
}

impl Radial for Monomial {
    fn jet(&self, r: f64, order: usize) -> Result<RadialJet> {
        if r == 0.0 && !self.is_integer() {
            // all derivatives below the exponent vanish at the origin
            return Ok(RadialJet::constant(0.0, 0.0, order));
        }
        RadialJet::power_of_variable(r, self.q, order)
    }

    fn descriptor(&self) -> String {
        format!("monomial:q={}", format_number(self.q))
    }

    fn smoothness_at_origin(&self) -> Option<usize> {
        if self.is_integer() {
            None
        } else {
            Some(self.q.floor() as usize)
        }
    }
}

#[derive(Debug, Clone)]
struct Polynomial {
    coefficients: Vec<f64>,
}

impl Radial for Polynomial {
    fn jet(&self, r: f64, order: usize) -> Result<RadialJet> {
        let mut taylor = [0.0; MAX_JET_ORDER + 1];
        for (k, t) in taylor.iter_mut().enumerate().take(order + 1) {
            *t = self
                .coefficients
                .iter()
                .enumerate()
                .skip(k)
                .map(|(n, a)| a * binomial(n as f64, k) * r.powi((n - k) as i32))
                .sum();
        }
        RadialJet::from_taylor(r, &taylor[..=order])
    }

    fn descriptor(&self) -> String {
        let coeffs: Vec<String> = self.coefficients.iter().map(|c| format_number(*c)).collect();
        format!("poly:{}", coeffs.join(","))
    }
}

#[derive(Debug, Clone)]
struct Sum {
    terms: Vec<RadialFunction>,
}

impl Radial for Sum {
    fn jet(&self, r: f64, order: usize) -> Result<RadialJet> {
        let mut acc = RadialJet::constant(r, 0.0, order);
        for t in &self.terms {
            acc = acc + t.jet(r, order)?;
        }
        Ok(acc)
    }

    fn descriptor(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|t| t.descriptor()).collect();
        parts.join("+")
    }

    fn smoothness_at_origin(&self) -> Option<usize> {
        self.terms.iter().filter_map(|t| t.smoothness_at_origin()).min()
    }
}
