//! Metropolis sampling of the 2d gas, with pooled cumulant estimates next to
//! the exact Ginibre values.

use coulomb_linstat::montecarlo::{estimate_cumulants, pool_chains, run_chains, MCConfig};
use coulomb_linstat::GasModel;

fn main() -> coulomb_linstat::Result<()> {
    let n = 32;
    let model = GasModel::new(2, 2.0, n, "harmonic:mu=1".parse()?, "monomial:q=2".parse()?)?;
    let config = MCConfig::new(model, 21_600, 1_600)?.with_seed(1);
    let chains = run_chains(&config, 4)?;
    for (k, c) in chains.iter().enumerate() {
        println!("chain {k}: acceptance {:.3}  tau {:.2}  step {:.4}", c.acceptance_rate, c.autocorrelation_time_estimate, c.final_step);
    }
    let pooled = pool_chains(&chains)?;
    let nf = n as f64;
    let exact = [(nf + 1.0) / 2.0, (nf + 1.0) / (2.0 * nf), (nf + 1.0) / (nf * nf), 3.0 * (nf + 1.0) / nf.powi(3)];
    for (e, x) in pooled.cumulant_estimates.iter().zip(exact) {
        println!("k{} = {:.5} +- {:.5}   exact {:.5}", e.order, e.value, e.std_error, x);
    }
    for r in estimate_cumulants(&pooled, 4)? {
        println!("coefficient q={}: {:.4} +- {:.4} {:?}", r.order, r.leading_coefficient, r.error_estimate, r.notes);
    }
    Ok(())
}
