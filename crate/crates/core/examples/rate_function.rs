//! Rate function sampled along the edge radius, compared with the d = 2
//! closed form, then Legendre-transformed back to the CGF.

use coulomb_linstat::cgf::{legendre_roundtrip, rate_closed_harmonic_x2, rate_function};
use coulomb_linstat::GasModel;

fn main() -> coulomb_linstat::Result<()> {
    let model = GasModel::new(2, 2.0, 100, "harmonic:mu=1".parse()?, "monomial:q=2".parse()?)?;
    let radii: Vec<f64> = (0..=160).map(|i| 0.4 + 0.01 * i as f64).collect();
    let rate = rate_function(&model, &radii)?;
    println!("mean Lambda = {}", rate.lambda_bar);
    for p in rate.points.iter().step_by(20) {
        let exact = rate_closed_harmonic_x2(2, 1.0, 2.0, p.lambda)?;
        println!("Lambda {:>8.4}  Psi {:>14.10}  closed {:>14.10}  s {:>8.4}", p.lambda, p.psi, exact, p.s);
    }
    for s in [-0.4, 0.0, 0.5] {
        println!("s = {s}: Legendre {}  direct {}", legendre_roundtrip(s, &rate)?, -0.5 * (1.0f64 + s).ln());
    }
    Ok(())
}
