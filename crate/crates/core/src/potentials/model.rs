use crate::error::{Error, Result};

use super::RadialFunction;

/// Default upper end of the radius search for droplet edges.
pub const DEFAULT_RADIUS_CAP: f64 = 1e3;

/// One Coulomb-gas problem instance: dimension `d`, inverse temperature
/// `β`, particle number `N`, confining potential `U` and statistic `f`.
#[derive(Debug, Clone)]
pub struct GasModel {
    dimension: usize,
    beta: f64,
    n_particles: usize,
    potential: RadialFunction,
    statistic: RadialFunction,
    radius_cap: f64,
}

impl GasModel {
    /// Builds a model, rejecting it in `d = 1` unless `U'(0) = f'(0) = 0`
    /// (otherwise `x^{d-1}(U' + s f'/β)` does not vanish at the origin).
    pub fn new(
        dimension: usize,
        beta: f64,
        n_particles: usize,
        potential: RadialFunction,
        statistic: RadialFunction,
    ) -> Result<Self> {
        let model = Self::unchecked(dimension, beta, n_particles, potential, statistic)?;
        if dimension == 1 {
            for (name, func) in [("U", &model.potential), ("f", &model.statistic)] {
                let slope = func.slope(0.0).map_err(|e| {
                    Error::InvalidModel(format!("d = 1 needs {name}'(0), unavailable: {e}"))
                })?;
                if slope != 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "d = 1 requires {name}'(0) = 0, got {slope}"
                    )));
                }
            }
        }
        Ok(model)
    }

    /// Builds a model checking only `d ≥ 1`, `β > 0`, `N ≥ 1`. Used to run
    /// diagnostics on models that [`GasModel::new`] would refuse.
    pub fn unchecked(
        dimension: usize,
        beta: f64,
        n_particles: usize,
        potential: RadialFunction,
        statistic: RadialFunction,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidModel("dimension must be at least 1".into()));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidModel(format!("beta must be positive, got {beta}")));
        }
        if n_particles == 0 {
            return Err(Error::InvalidModel("need at least one particle".into()));
        }
        Ok(Self {
            dimension,
            beta,
            n_particles,
            potential,
            statistic,
            radius_cap: DEFAULT_RADIUS_CAP,
        })
    }

    pub fn with_radius_cap(mut self, cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius cap must be positive, got {cap}")));
        }
        self.radius_cap = cap;
        Ok(self)
    }

    /// Same model with another statistic `f`.
    pub fn with_statistic(&self, statistic: RadialFunction) -> Result<Self> {
        Self::new(
            self.dimension,
            self.beta,
            self.n_particles,
            self.potential.clone(),
            statistic,
        )
        .map(|m| Self {
            radius_cap: self.radius_cap,
            ..m
        })
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::unchecked(
            self.dimension,
            beta,
            self.n_particles,
            self.potential.clone(),
            self.statistic.clone(),
        )
        .map(|m| Self {
            radius_cap: self.radius_cap,
            ..m
        })
    }

    pub fn with_particles(&self, n_particles: usize) -> Result<Self> {
        Self::unchecked(
            self.dimension,
            self.beta,
            n_particles,
            self.potential.clone(),
            self.statistic.clone(),
        )
        .map(|m| Self {
            radius_cap: self.radius_cap,
            ..m
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn potential(&self) -> &RadialFunction {
        &self.potential
    }

    pub fn statistic(&self) -> &RadialFunction {
        &self.statistic
    }

    pub fn radius_cap(&self) -> f64 {
        self.radius_cap
    }

    /// `d = 2, β = 2`, where the gas is determinantal.
    pub fn is_determinantal(&self) -> bool {
        self.dimension == 2 && self.beta == 2.0
    }

    pub fn descriptor(&self) -> String {
        format!(
            "d={} beta={} N={} U={} f={}",
            self.dimension, self.beta, self.n_particles, self.potential, self.statistic
        )
    }
}
