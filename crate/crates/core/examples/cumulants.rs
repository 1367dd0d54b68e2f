//! Leading cumulant coefficients by the closed forms, the edge operator and
//! finite differences of the tilted edge.

use coulomb_linstat::cumulants::{closed_form, cumulant_q_fd, cumulant_q_jet, harmonic_linear_cumulants};
use coulomb_linstat::GasModel;

fn main() -> coulomb_linstat::Result<()> {
    let model = GasModel::new(2, 2.0, 100, "harmonic:mu=1".parse()?, "monomial:q=2".parse()?)?;
    for q in 1..=4 {
        let c = closed_form(&model, q)?;
        println!("q={q} closed {:>22}   <L^q>_c at N=100: {}", c.leading_coefficient, c.at_n(100));
    }
    for q in 3..=8 {
        let jet = cumulant_q_jet(&model, q)?;
        let fd = if q <= 6 { cumulant_q_fd(&model, q, None).map(|r| r.leading_coefficient).ok() } else { None };
        println!("q={q} jet {:>22}  fd {:?}", jet.leading_coefficient, fd);
    }

    // f = x: the Gamma-function formula, d = 3
    let linear = GasModel::new(3, 1.0, 100, "harmonic:mu=1".parse()?, "monomial:q=1".parse()?)?;
    for q in 3..=6 {
        let gamma = harmonic_linear_cumulants(3, 1.0, 1.0, q)?;
        let jet = cumulant_q_jet(&linear, q)?;
        println!("f=x d=3 q={q}: gamma {} jet {}", gamma.leading_coefficient, jet.leading_coefficient);
    }
    Ok(())
}
