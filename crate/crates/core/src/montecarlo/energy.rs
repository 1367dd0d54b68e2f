use crate::error::{Error, Result};
use crate::potentials::GasModel;

/// Particle positions, stored row-major as `N × d` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dimension: usize,
    coords: Vec<f64>,
}

impl Configuration {
    pub fn new(dimension: usize, coords: Vec<f64>) -> Result<Self> {
        if dimension == 0 || coords.len() % dimension != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not split into points of dimension {dimension}",
                coords.len()
            )));
        }
        Ok(Self { dimension, coords })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dimension = points.first().map_or(0, |p| p.len());
        if points.iter().any(|p| p.len() != dimension) {
            return Err(Error::InvalidParameter("points of mixed dimension".into()));
        }
        Self::new(dimension, points.concat())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn set_point(&mut self, i: usize, x: &[f64]) {
        self.coords[i * self.dimension..(i + 1) * self.dimension].copy_from_slice(x);
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    distance_sq(a, b).sqrt()
}

/// `V_d` as a function of the squared distance.
fn pair_potential_sq(d: usize, r2: f64) -> f64 {
    match d {
        1 => -r2.sqrt(),
        2 => -0.5 * r2.ln(),
        3 => 1.0 / r2.sqrt(),
        _ => pair_potential(d, r2.sqrt()),
    }
}

/// Coulomb interaction `V_d(r)`: `-ln r` in `d = 2`, `r^{2-d}/(d-2)` otherwise.
pub fn pair_potential(d: usize, r: f64) -> f64 {
    match d {
        1 => -r,
        2 => -r.ln(),
        3 => 1.0 / r,
        _ => r.powi(2 - d as i32) / (d as f64 - 2.0),
    }
}

fn check_dimension(model: &GasModel, positions: &Configuration) -> Result<()> {
    if positions.dimension() != model.dimension() || positions.len() != model.n_particles() {
        return Err(Error::InvalidParameter(format!(
            "configuration has {} points in d = {}, model needs {} in d = {}",
            positions.len(),
            positions.dimension(),
            model.n_particles(),
            model.dimension()
        )));
    }
    Ok(())
}

/// `E = Σ_{i<j} V_d(|x_i - x_j|) + N Σ_k U(|x_k|)`; the Gibbs weight is `e^{-βE}`.
pub fn total_energy(model: &GasModel, positions: &Configuration, min_pair_distance: f64) -> Result<f64> {
    check_dimension(model, positions)?;
    let (n, d) = (positions.len(), positions.dimension());
    let mut pairs = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = distance(positions.point(i), positions.point(j));
            if r < min_pair_distance {
                return Err(Error::PairCollision(i, j));
            }
            pairs += pair_potential(d, r);
        }
    }
    let mut confinement = 0.0;
    for k in 0..n {
        confinement += model.potential().value(norm(positions.point(k)))?;
    }
    Ok(pairs + n as f64 * confinement)
}

/// Energy change when particle `i` moves to `new`, in `O(N)`.
pub fn energy_delta(
    model: &GasModel,
    positions: &Configuration,
    i: usize,
    new: &[f64],
    min_pair_distance: f64,
) -> Result<f64> {
    let (n, d) = (positions.len(), positions.dimension());
    let old = positions.point(i);
    let guard = min_pair_distance * min_pair_distance;
    let mut delta = 0.0;
    for j in 0..n {
        if j == i {
            continue;
        }
        let other = positions.point(j);
        let r2 = distance_sq(new, other);
        if r2 < guard {
            return Err(Error::PairCollision(i, j));
        }
        delta += pair_potential_sq(d, r2) - pair_potential_sq(d, distance_sq(old, other));
    }
    let u = model.potential();
    Ok(delta + n as f64 * (u.value(norm(new))? - u.value(norm(old))?))
}

/// `ln min(1, e^{-βΔE})` for moving particle `i` to `new`.
pub fn log_acceptance(
    model: &GasModel,
    positions: &Configuration,
    i: usize,
    new: &[f64],
    min_pair_distance: f64,
) -> Result<f64> {
    let delta = energy_delta(model, positions, i, new, min_pair_distance)?;
    Ok((-model.beta() * delta).min(0.0))
}

/// `L = Σ_i f(|x_i|)`.
pub fn linear_statistic(model: &GasModel, positions: &Configuration) -> Result<f64> {
    let f = model.statistic();
    (0..positions.len()).try_fold(0.0, |acc, i| Ok(acc + f.value(norm(positions.point(i)))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialFunction;

    fn model(d: usize, n: usize, u: &str) -> GasModel {
        GasModel::unchecked(d, 2.0, n, u.parse().unwrap(), RadialFunction::monomial(2.0).unwrap()).unwrap()
    }

    #[test]
    fn energy_examples() {
        let one = Configuration::from_points(&[vec![0.3, 0.4]]).unwrap();
        let m = model(2, 1, "harmonic:mu=1");
        assert!((total_energy(&m, &one, 1e-12).unwrap() - 0.125).abs() < 1e-15);

        let two = Configuration::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(total_energy(&model(2, 2, "poly:0"), &two, 1e-12).unwrap(), 0.0);

        let three_d = Configuration::from_points(&[vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap();
        assert!((total_energy(&model(3, 2, "poly:0"), &three_d, 1e-12).unwrap() - 0.5).abs() < 1e-15);

        let clash = Configuration::from_points(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(total_energy(&m.with_particles(2).unwrap(), &clash, 1e-12), Err(Error::PairCollision(0, 1))));
    }

    #[test]
    fn delta_matches_totals() {
        let m = model(2, 3, "harmonic:mu=1");
        let mut c = Configuration::from_points(&[vec![0.1, 0.2], vec![-0.5, 0.3], vec![0.4, -0.6]]).unwrap();
        let before = total_energy(&m, &c, 1e-12).unwrap();
        let new = [0.2, 0.25];
        let delta = energy_delta(&m, &c, 0, &new, 1e-12).unwrap();
        c.set_point(0, &new);
        let after = total_energy(&m, &c, 1e-12).unwrap();
        assert!((after - before - delta).abs() < 1e-12);
    }
}
