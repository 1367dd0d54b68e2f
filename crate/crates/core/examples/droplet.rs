//! Droplet edge, tilted edges and the model diagnostics for a quartic trap.

use coulomb_linstat::equilibrium::{density_normalization, droplet_radius, equilibrium_density, tilted_sweep};
use coulomb_linstat::potentials::validate_model;
use coulomb_linstat::GasModel;

fn main() -> coulomb_linstat::Result<()> {
    let model = GasModel::new(2, 2.0, 100, "poly:0,0,0.5,0,0.125".parse()?, "monomial:q=3".parse()?)?;

    let droplet = droplet_radius(&model)?;
    println!("R = {}  U'(R) = {}", droplet.radius, droplet.potential_slope_at_edge);

    println!("{:>6} {:>20} {:>10}", "s", "R_s", "residual");
    let s_values: Vec<f64> = (-5..=5).map(|k| 0.1 * k as f64).collect();
    for t in tilted_sweep(&model, &s_values)? {
        println!("{:>6.2} {:>20.15} {:>10.2e}", t.s, t.radius, t.residual);
    }

    for x in [0.25, 0.5, 1.0] {
        println!("rho_0({x}) = {}", equilibrium_density(&model, 0.0, x)?);
    }
    println!("normalization at s = 0.3: {}", density_normalization(&model, 0.3)?);

    for d in validate_model(&model, (-0.5, 0.5)) {
        let s = d.s.map(|s| format!(" s={s}")).unwrap_or_default();
        let status = match (d.passed, d.advisory) {
            (true, _) => "ok",
            (false, true) => "advisory",
            (false, false) => "FAIL",
        };
        println!("{:<20} {status}{s}  {}", d.check.to_string(), d.detail);
    }
    Ok(())
}
