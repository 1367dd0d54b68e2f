//! Leading-order cumulants, cumulant generating function and large-deviation
//! rate function of rotationally invariant linear statistics
//! `L_N = Σ_i f(|x_i|)` of a trapped `d`-dimensional Coulomb gas.
//!
//! The asymptotic results are computed from the droplet edge `R_s` of the
//! tilted potential `U + (s/β) f` (modules [`equilibrium`], [`cumulants`],
//! [`cgf`]). Two independent routes check them: the exact finite-`N`
//! product-of-integrals formula available for `d = 2, β = 2`
//! ([`determinantal`]) and Metropolis sampling of the Gibbs measure
//! ([`montecarlo`]). [`compare`] runs the cross-checks as named suites.

pub mod cgf;
pub mod cli;
pub mod compare;
pub mod cumulants;
pub mod determinantal;
pub mod equilibrium;
mod error;
pub mod montecarlo;
pub mod numerics;
pub mod potentials;

pub use error::{Error, Result};
pub use potentials::{GasModel, RadialFunction, RadialJet};
