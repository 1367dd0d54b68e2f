//! Exact finite-N CGF in d = 2, beta = 2 against the large-N saddle point,
//! for the Ginibre-like gas and for GinSE.

use coulomb_linstat::determinantal::{
    asymptotic_f, asymptotic_f_ginse, exact_cgf, exact_cgf_ginse, exact_cumulants, DEFAULT_LAMBDA_NODES,
};
use coulomb_linstat::{GasModel, RadialFunction};

fn main() -> coulomb_linstat::Result<()> {
    let f: RadialFunction = "monomial:q=3".parse()?;
    let u: RadialFunction = "poly:0,0,0.5,0,0.125".parse()?;
    let big_f = asymptotic_f(&u, &f, 0.3, DEFAULT_LAMBDA_NODES)?;
    for n in [25, 50, 100, 200] {
        let model = GasModel::new(2, 2.0, n, u.clone(), f.clone())?;
        let chi = exact_cgf(&model, 0.3)?;
        let scaled = chi / (n * n) as f64;
        println!("N={n:>4}  chi/N^2 {scaled:.12}  F {big_f:.12}  N*gap {:.6}", n as f64 * (scaled - big_f));
    }

    let ginibre = GasModel::new(2, 2.0, 200, "harmonic:mu=1".parse()?, "monomial:q=2".parse()?)?;
    for q in 2..=4 {
        let c = exact_cumulants(&ginibre, q, None)?;
        println!("exact N=200 q={q}: {} (+- {:.1e})", c.leading_coefficient, c.error_estimate);
    }

    let sq: RadialFunction = "monomial:q=2".parse()?;
    for n in [10, 100] {
        let chi = exact_cgf_ginse(n, &sq, 0.3)?;
        println!("GinSE N={n}: chi/N^2 {}  F {}", chi / (n * n) as f64, asymptotic_f_ginse(&sq, 0.3, 64)?);
    }
    Ok(())
}
