//! chi(s)/N^2 and its derivative from the tilted droplet, for f = x^2 in a
//! harmonic trap where chi/N^2 = -ln(1+s)/2.

use coulomb_linstat::cgf::{cgf_curve, DEFAULT_CHI_PANELS};
use coulomb_linstat::GasModel;

fn main() -> coulomb_linstat::Result<()> {
    let model = GasModel::new(2, 2.0, 100, "harmonic:mu=1".parse()?, "monomial:q=2".parse()?)?;
    let curve = cgf_curve(&model, -0.5, 1.0, 16, DEFAULT_CHI_PANELS)?;
    println!("{:>6} {:>22} {:>22} {:>10}", "s", "chi/N^2", "exact", "R_s");
    for i in 0..curve.s_values.len() {
        let s = curve.s_values[i];
        println!("{s:>6.2} {:>22.16} {:>22.16} {:>10.6}", curve.chi[i], -0.5 * (1.0 + s).ln(), curve.droplet_radii[i]);
    }
    Ok(())
}
