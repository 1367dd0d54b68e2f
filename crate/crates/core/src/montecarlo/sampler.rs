use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::energy::{linear_statistic, log_acceptance, Configuration};
use super::stats::{batch_estimates, CumulantEstimate, PowerSums};
use crate::cumulants::{CumulantReport, Route};
use crate::equilibrium::droplet_radius;
use crate::error::{Error, Result};
use crate::potentials::GasModel;

const ADAPT_WINDOW: usize = 100;
const ADAPT_RATE: f64 = 0.1;
const ERGODIC_RANGE: (f64, f64) = (0.05, 0.95);

#[derive(Debug, Clone)]
pub struct MCConfig {
    pub model: GasModel,
    /// Total sweeps, burn-in included.
    pub n_sweeps: usize,
    pub burn_in_sweeps: usize,
    pub target_acceptance: f64,
    pub initial_step: f64,
    pub rng_seed: u64,
    pub batch_count: usize,
    pub min_pair_distance: f64,
}

impl MCConfig {
    /// Defaults: target acceptance 0.5, 16 batches, seed 0, and an initial
    /// step of half the mean interparticle spacing in the droplet.
    pub fn new(model: GasModel, n_sweeps: usize, burn_in_sweeps: usize) -> Result<Self> {
        let radius = droplet_radius(&model).map(|d| d.radius).unwrap_or(1.0);
        let spacing = radius * (model.n_particles() as f64).powf(-1.0 / model.dimension() as f64);
        let config = Self {
            model,
            n_sweeps,
            burn_in_sweeps,
            target_acceptance: 0.5,
            initial_step: 0.5 * spacing,
            rng_seed: 0,
            batch_count: 16,
            min_pair_distance: 1e-12,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_batches(mut self, batch_count: usize) -> Result<Self> {
        self.batch_count = batch_count;
        self.validate()?;
        Ok(self)
    }

    pub fn with_initial_step(mut self, step: f64) -> Result<Self> {
        self.initial_step = step;
        self.validate()?;
        Ok(self)
    }

    pub fn with_target_acceptance(mut self, target: f64) -> Result<Self> {
        self.target_acceptance = target;
        self.validate()?;
        Ok(self)
    }

    pub fn production_sweeps(&self) -> usize {
        self.n_sweeps.saturating_sub(self.burn_in_sweeps)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_sweeps <= self.burn_in_sweeps {
            return bad(format!(
                "n_sweeps = {} must exceed burn_in_sweeps = {}",
                self.n_sweeps, self.burn_in_sweeps
            ));
        }
        if self.batch_count < 8 {
            return bad(format!("batch_count = {} must be at least 8", self.batch_count));
        }
        if self.production_sweeps() % self.batch_count != 0 {
            return bad(format!(
                "batch_count = {} does not divide the {} production sweeps",
                self.batch_count,
                self.production_sweeps()
            ));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return bad(format!("target_acceptance = {} outside (0, 1)", self.target_acceptance));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad(format!("initial_step = {} must be positive", self.initial_step));
        }
        if !(self.min_pair_distance >= 0.0) {
            return bad(format!("min_pair_distance = {}", self.min_pair_distance));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStats {
    pub n_particles: usize,
    /// Seeds of the chains that produced these samples.
    pub seeds: Vec<u64>,
    #[serde(skip)]
    pub samples_of_l: Vec<f64>,
    pub acceptance_rate: f64,
    pub cumulant_estimates: Vec<CumulantEstimate>,
    /// In sweeps.
    pub autocorrelation_time_estimate: f64,
    pub final_step: f64,
    #[serde(skip)]
    pub batches: Vec<PowerSums>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ChainStats {
    fn assemble(
        n_particles: usize,
        seeds: Vec<u64>,
        samples_of_l: Vec<f64>,
        acceptance_rate: f64,
        final_step: f64,
        batches: Vec<PowerSums>,
    ) -> Result<Self> {
        let (cumulant_estimates, tau) = batch_estimates(&batches)?;
        let mut warnings = Vec::new();
        if acceptance_rate <= ERGODIC_RANGE.0 || acceptance_rate >= ERGODIC_RANGE.1 {
            warnings.push(format!(
                "non-ergodic: acceptance rate {acceptance_rate} outside ({}, {})",
                ERGODIC_RANGE.0, ERGODIC_RANGE.1
            ));
        }
        Ok(Self {
            n_particles,
            seeds,
            samples_of_l,
            acceptance_rate,
            cumulant_estimates,
            autocorrelation_time_estimate: tau,
            final_step,
            batches,
            warnings,
        })
    }

    pub fn is_ergodic(&self) -> bool {
        self.warnings.is_empty()
    }
}

fn initial_configuration(model: &GasModel, rng: &mut ChaCha8Rng, guard: f64) -> Result<Configuration> {
    let d = model.dimension();
    let n = model.n_particles();
    let radius = droplet_radius(model).map(|r| r.radius).unwrap_or(1.0);
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..n {
        let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
        coords.extend(dir.iter().map(|v| r * v / norm));
    }
    let config = Configuration::new(d, coords)?;
    super::energy::total_energy(model, &config, guard)?;
    Ok(config)
}

/// Metropolis chain with single-particle Gaussian moves.
///
/// The step adapts every 100 proposals during burn-in and is frozen after.
/// `L` is recorded once per production sweep.
pub fn metropolis_run(config: &MCConfig) -> Result<ChainStats> {
    config.validate()?;
    let model = &config.model;
    let (n, d) = (model.n_particles(), model.dimension());
    let guard = config.min_pair_distance;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut positions = initial_configuration(model, &mut rng, guard)?;

    let mut step = config.initial_step;
    let (mut window_accepted, mut window_total) = (0usize, 0usize);
    let mut accepted = 0u64;
    let production = config.production_sweeps();
    let batch_len = production / config.batch_count;
    let mut samples = Vec::with_capacity(production);
    let mut batches = Vec::with_capacity(config.batch_count);
    let mut current: Option<PowerSums> = None;
    let mut proposal = vec![0.0; d];

    for sweep in 0..config.n_sweeps {
        let burning = sweep < config.burn_in_sweeps;
        for i in 0..n {
            for (k, p) in proposal.iter_mut().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                *p = positions.point(i)[k] + step * z;
            }
            let accept = match log_acceptance(model, &positions, i, &proposal, guard) {
                Ok(la) => la >= 0.0 || rng.random::<f64>().ln() < la,
                Err(Error::PairCollision(..)) => false,
                Err(e) => return Err(e),
            };
            if accept {
                positions.set_point(i, &proposal);
            }
            if burning {
                window_total += 1;
                window_accepted += accept as usize;
                if window_total == ADAPT_WINDOW {
                    let rate = window_accepted as f64 / window_total as f64;
                    step *= (ADAPT_RATE * (rate - config.target_acceptance)).exp();
                    window_total = 0;
                    window_accepted = 0;
                }
            } else {
                accepted += accept as u64;
            }
        }
        if !burning {
            let l = linear_statistic(model, &positions)?;
            samples.push(l);
            let block = current.get_or_insert_with(|| PowerSums::new(l));
            block.push(l);
            if block.count as usize == batch_len {
                batches.push(*block);
                current = None;
            }
        }
    }

    let rate = accepted as f64 / (production * n) as f64;
    ChainStats::assemble(n, vec![config.rng_seed], samples, rate, step, batches)
}

/// Runs `chains` independent chains with seeds `rng_seed + k`, concurrently.
/// Results are in chain order.
pub fn run_chains(config: &MCConfig, chains: usize) -> Result<Vec<ChainStats>> {
    if chains == 0 {
        return Err(Error::InvalidParameter("need at least one chain".into()));
    }
    (0..chains as u64)
        .into_par_iter()
        .map(|k| {
            let mut c = config.clone();
            c.rng_seed = config.rng_seed.wrapping_add(k);
            metropolis_run(&c)
        })
        .collect()
}

/// Pools chains by concatenating their batches in the given order.
pub fn pool_chains(chains: &[ChainStats]) -> Result<ChainStats> {
    let first = chains
        .first()
        .ok_or_else(|| Error::InvalidParameter("no chains to pool".into()))?;
    if chains.iter().any(|c| c.n_particles != first.n_particles) {
        return Err(Error::InvalidParameter("chains have different particle numbers".into()));
    }
    let total: usize = chains.iter().map(|c| c.samples_of_l.len()).sum();
    let rate = chains
        .iter()
        .map(|c| c.acceptance_rate * c.samples_of_l.len() as f64)
        .sum::<f64>()
        / total as f64;
    let mut pooled = ChainStats::assemble(
        first.n_particles,
        chains.iter().flat_map(|c| c.seeds.iter().copied()).collect(),
        chains.iter().flat_map(|c| c.samples_of_l.iter().copied()).collect(),
        rate,
        f64::NAN,
        chains.iter().flat_map(|c| c.batches.iter().copied()).collect(),
    )?;
    // chains are independent, so the per-chain estimate is the relevant one
    pooled.autocorrelation_time_estimate = chains
        .iter()
        .map(|c| c.autocorrelation_time_estimate)
        .fold(0.0, f64::max);
    pooled.warnings = chains.iter().flat_map(|c| c.warnings.iter().cloned()).collect();
    Ok(pooled)
}

/// `k_1..k_{q_max}` of `L` as cumulant reports, rescaled by `N^{-(2-q)}`
/// (`N^{-1}` for the mean).
pub fn estimate_cumulants(stats: &ChainStats, q_max: usize) -> Result<Vec<CumulantReport>> {
    if q_max == 0 || q_max > 4 {
        return Err(Error::InvalidParameter(format!("q_max = {q_max} must be in 1..=4")));
    }
    let samples = stats.batches.iter().map(|b| b.count).sum::<u64>() as f64;
    let tau = stats.autocorrelation_time_estimate;
    if samples < 100.0 * tau {
        return Err(Error::InsufficientSamples(format!(
            "{samples} samples is fewer than 100 autocorrelation times ({tau} sweeps)"
        )));
    }
    let n = stats.n_particles as f64;
    Ok(stats
        .cumulant_estimates
        .iter()
        .take(q_max)
        .map(|e| {
            let scale = n.powi(-crate::cumulants::scaling_exponent(e.order));
            let mut report = CumulantReport::new(e.order, e.value * scale, Route::MonteCarlo, e.std_error * scale);
            if e.order >= 3 && samples < 1000.0 * tau {
                report = report.with_note(format!("fewer than 1000 autocorrelation times ({tau} sweeps)"));
            }
            for w in &stats.warnings {
                report = report.with_note(w.clone());
            }
            report
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialFunction;

    fn model(n: usize, f: RadialFunction) -> GasModel {
        GasModel::new(2, 2.0, n, RadialFunction::harmonic(1.0).unwrap(), f).unwrap()
    }

    #[test]
    fn config_invariants() {
        let m = model(4, RadialFunction::monomial(2.0).unwrap());
        assert!(MCConfig::new(m.clone(), 100, 100).is_err());
        assert!(MCConfig::new(m.clone(), 116, 16).is_err()); // 100 sweeps, 16 batches
        assert!(MCConfig::new(m.clone(), 160, 0).unwrap().with_batches(4).is_err());
        assert!(MCConfig::new(m, 160, 0).is_ok());
    }

    #[test]
    fn identical_seeds_identical_chains() {
        let m = model(8, RadialFunction::monomial(2.0).unwrap());
        let c = MCConfig::new(m, 1800, 200).unwrap().with_seed(7);
        let a = metropolis_run(&c).unwrap();
        let b = metropolis_run(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples_of_l.len(), 1600);
        let other = metropolis_run(&c.clone().with_seed(8)).unwrap();
        assert_ne!(a.samples_of_l, other.samples_of_l);
    }

    #[test]
    fn constant_statistic() {
        let m = model(6, RadialFunction::constant(1.5).unwrap());
        let c = MCConfig::new(m, 660, 100).unwrap();
        let stats = metropolis_run(&c).unwrap();
        let k = &stats.cumulant_estimates;
        assert!((k[0].value - 9.0).abs() < 1e-12);
        assert!(k[1..].iter().all(|e| e.value == 0.0));
        let reports = estimate_cumulants(&stats, 4).unwrap();
        assert_eq!(reports.len(), 4);
        assert!(reports.iter().all(|r| r.route == Route::MonteCarlo));
    }

    #[test]
    fn pooling_preserves_order() {
        let m = model(4, RadialFunction::monomial(2.0).unwrap());
        let c = MCConfig::new(m, 800, 160).unwrap().with_seed(3);
        let chains = run_chains(&c, 3).unwrap();
        assert_eq!(chains[1], metropolis_run(&c.clone().with_seed(4)).unwrap());
        let pooled = pool_chains(&chains).unwrap();
        assert_eq!(pooled.batches.len(), 48);
        assert_eq!(pooled.seeds, vec![3, 4, 5]);
        assert_eq!(pooled.samples_of_l.len(), 3 * 640);
    }
}
