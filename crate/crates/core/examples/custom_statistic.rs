//! A user-defined radial function: a smooth bump added to f = x^2. The
//! bump sits inside the droplet, so only the mean and variance move.

use coulomb_linstat::cumulants::{closed_form, cumulant_q_jet};
use coulomb_linstat::potentials::Radial;
use coulomb_linstat::{GasModel, RadialFunction, RadialJet, Result};

#[derive(Debug)]
struct Bump {
    center: f64,
    width: f64,
}

impl Radial for Bump {
    fn jet(&self, r: f64, order: usize) -> Result<RadialJet> {
        if (r - self.center).abs() >= self.width {
            return Ok(RadialJet::constant(r, 0.0, order));
        }
        let t = RadialJet::variable(r, order).offset(-self.center).scale(1.0 / self.width);
        Ok(t.powi(2).scale(-1.0).offset(1.0).recip()?.scale(-1.0).exp())
    }

    fn descriptor(&self) -> String {
        format!("bump:c={},w={}", self.center, self.width)
    }
}

fn main() -> Result<()> {
    let plain = GasModel::new(2, 2.0, 100, "harmonic:mu=1".parse()?, "monomial:q=2".parse()?)?;
    let bump = RadialFunction::new(Bump { center: 0.5, width: 0.3 });
    let bumped = plain.with_statistic(plain.statistic().plus(&bump))?;
    for q in 1..=2 {
        println!("q={q}: {} -> {}", closed_form(&plain, q)?.leading_coefficient, closed_form(&bumped, q)?.leading_coefficient);
    }
    for q in 3..=6 {
        println!("q={q}: {} -> {}", cumulant_q_jet(&plain, q)?.leading_coefficient, cumulant_q_jet(&bumped, q)?.leading_coefficient);
    }
    Ok(())
}
