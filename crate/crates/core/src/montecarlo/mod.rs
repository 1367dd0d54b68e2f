//! Metropolis sampling of the Gibbs measure `∝ e^{-βE}`.

mod energy;
mod sampler;
mod stats;

pub use energy::{energy_delta, linear_statistic, log_acceptance, pair_potential, total_energy, Configuration};
pub use sampler::{estimate_cumulants, metropolis_run, pool_chains, run_chains, ChainStats, MCConfig};
pub use stats::{batch_estimates, merge_all, CumulantEstimate, PowerSums};
