#![allow(dead_code)]

use std::io::Write;
use std::time::Duration;

use coulomb_linstat::potentials::Radial;
use coulomb_linstat::{GasModel, RadialFunction, RadialJet, Result};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ginibre(n: usize) -> GasModel {
    GasModel::new(
        2,
        2.0,
        n,
        RadialFunction::harmonic(1.0).unwrap(),
        RadialFunction::monomial(2.0).unwrap(),
    )
    .unwrap()
}

/// `amplitude · exp(-1/(1 - t²))` with `t = (r - center)/half_width`, zero for `|t| ≥ 1`.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub amplitude: f64,
}

impl Radial for Bump {
    fn jet(&self, r: f64, order: usize) -> Result<RadialJet> {
        if (r - self.center).abs() >= self.half_width {
            return Ok(RadialJet::constant(r, 0.0, order));
        }
        let t = RadialJet::variable(r, order).offset(-self.center).scale(1.0 / self.half_width);
        let g = t.powi(2).scale(-1.0).offset(1.0);
        Ok(g.recip()?.scale(-1.0).exp().scale(self.amplitude))
    }

    fn descriptor(&self) -> String {
        format!("bump:c={},w={},a={}", self.center, self.half_width, self.amplitude)
    }
}

/// Convex `U = a2 x² + a3 x³ + a4 x⁴` and increasing `f = b2 x² + b3 x³ + b4 x⁴`.
pub fn random_polynomial_model(rng: &mut ChaCha8Rng, d: usize) -> GasModel {
    let u = vec![
        0.0,
        0.0,
        rng.random_range(0.2..1.0),
        rng.random_range(0.0..0.3),
        rng.random_range(0.0..0.3),
    ];
    let f = vec![
        0.0,
        0.0,
        rng.random_range(0.5..1.5),
        rng.random_range(0.0..0.5),
        rng.random_range(0.0..0.5),
    ];
    GasModel::new(
        d,
        rng.random_range(0.5..3.0),
        100,
        RadialFunction::polynomial(u).unwrap(),
        RadialFunction::polynomial(f).unwrap(),
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// One status line per criterion, written past the test harness capture.
pub fn report(name: &str, passed: bool, detail: &str, elapsed: Duration, budget: Duration) -> bool {
    let in_time = elapsed <= budget;
    let status = if passed && in_time { "PASS" } else { "FAIL" };
    let line = format!(
        "[{status}] {name}: {detail} ({:.2} s, budget {} s)\n",
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    passed && in_time
}
