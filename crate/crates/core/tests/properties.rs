mod common;

use coulomb_linstat::cumulants::{closed_form, cumulant_q_fd, cumulant_q_jet};
use coulomb_linstat::equilibrium::{density_normalization, droplet_radius, tilted_radius};
use coulomb_linstat::montecarlo::{
    energy_delta, metropolis_run, pool_chains, run_chains, total_energy, Configuration, MCConfig,
};
use coulomb_linstat::potentials::{all_passed, validate_model};
use coulomb_linstat::{GasModel, RadialFunction, RadialJet};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Gamma};

use common::{ginibre, relative_gap};

fn poly(coefficients: Vec<f64>) -> RadialFunction {
    RadialFunction::polynomial(coefficients).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_product_and_quotient(a in proptest::collection::vec(-2.0f64..2.0, 7), b in proptest::collection::vec(0.5f64..2.0, 7)) {
        let x = RadialJet::from_taylor(0.7, &a).unwrap();
        let y = RadialJet::from_taylor(0.7, &b).unwrap();
        let product = x * y;
        // Leibniz: (xy)^{(k)} = Σ C(k,j) x^{(j)} y^{(k-j)}
        for k in 0..=6usize {
            let mut expected = 0.0;
            let mut binom = 1.0;
            for j in 0..=k {
                expected += binom * x.derivative(j) * y.derivative(k - j);
                binom *= (k - j) as f64 / (j + 1) as f64;
            }
            prop_assert!((product.derivative(k) - expected).abs() <= 1e-10 * expected.abs().max(1.0));
        }
        let back = (x / y) * y;
        for k in 0..=6 {
            prop_assert!((back.derivative(k) - x.derivative(k)).abs() <= 1e-9 * x.derivative(k).abs().max(1.0));
        }
    }

    #[test]
    fn jet_operator_matches_closed_forms(
        d in 1usize..=3,
        beta in 0.5f64..3.0,
        u2 in 0.2f64..1.0, u3 in 0.0f64..0.3, u4 in 0.0f64..0.3,
        f2 in 0.5f64..1.5, f3 in 0.0f64..0.5, f4 in 0.0f64..0.5,
    ) {
        let m = GasModel::new(d, beta, 50, poly(vec![0.0, 0.0, u2, u3, u4]), poly(vec![0.0, 0.0, f2, f3, f4])).unwrap();
        for q in [3, 4] {
            let closed = closed_form(&m, q).unwrap().leading_coefficient;
            let jet = cumulant_q_jet(&m, q).unwrap().leading_coefficient;
            prop_assert!(relative_gap(jet, closed) <= 1e-10, "q={} closed {} jet {}", q, closed, jet);
        }
    }

    #[test]
    fn energy_delta_is_consistent(
        d in 1usize..=3,
        coords in proptest::collection::vec(-1.5f64..1.5, 24),
        i in 0usize..8,
        step in proptest::collection::vec(-0.4f64..0.4, 3),
    ) {
        let m = GasModel::new(d, 2.0, 8, RadialFunction::harmonic(1.0).unwrap(), RadialFunction::monomial(2.0).unwrap()).unwrap();
        let x = Configuration::new(d, coords[..8 * d].to_vec()).unwrap();
        let new: Vec<f64> = x.point(i).iter().zip(&step).map(|(a, b)| a + b).collect();
        let before = total_energy(&m, &x, 1e-12);
        let delta = energy_delta(&m, &x, i, &new, 1e-12);
        prop_assume!(before.is_ok() && delta.is_ok());
        let mut y = x.clone();
        y.set_point(i, &new);
        let after = total_energy(&m, &y, 1e-12).unwrap();
        let (before, delta) = (before.unwrap(), delta.unwrap());
        let scale = before.abs().max(after.abs()).max(1.0);
        prop_assert!((after - before - delta).abs() <= 1e-9 * scale);
    }
}

#[test]
fn single_particle_marginal() {
    // N = 1, U = x²/2, β = 2: r² is Gamma(d/2, 1) distributed
    for d in 1..=3 {
        let m = GasModel::new(d, 2.0, 1, RadialFunction::harmonic(1.0).unwrap(), RadialFunction::monomial(2.0).unwrap())
            .unwrap();
        let config = MCConfig::new(m, 202_000, 2_000).unwrap().with_seed(11 + d as u64);
        let stats = metropolis_run(&config).unwrap();
        let mut samples: Vec<f64> = stats.samples_of_l.iter().step_by(2).copied().collect();
        assert_eq!(samples.len(), 100_000);
        samples.sort_by(f64::total_cmp);
        let law = Gamma::new(0.5 * d as f64, 1.0).unwrap();
        let n = samples.len() as f64;
        let ks = samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = law.cdf(x);
                (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "d = {d}: KS statistic {ks}");
    }
}

#[test]
fn variance_stays_order_one() {
    // Var(L) = (N+1)/(2N) for the Ginibre weight; it does not grow with N
    for n in [32, 64] {
        let config = MCConfig::new(ginibre(n), 42_000, 2_000).unwrap().with_seed(5);
        let pooled = pool_chains(&run_chains(&config, 2).unwrap()).unwrap();
        let var = pooled.cumulant_estimates[1];
        let exact = 0.5 * (n as f64 + 1.0) / n as f64;
        assert!((var.value - exact).abs() <= 4.0 * var.std_error, "N = {n}: {var:?} vs {exact}");
        assert!(var.value < 1.0);
    }
}

#[test]
fn routes_agree_on_builtin_models() {
    let models = [
        (1, "harmonic:mu=1", "monomial:q=2"),
        (2, "harmonic:mu=1", "monomial:q=2"),
        (1, "poly:0,0,0.5,0,0.25", "monomial:q=4"),
        (3, "harmonic:mu=2", "monomial:q=2"),
        (2, "poly:0,0,0.5,0,0.125", "monomial:q=3"),
    ];
    for (d, u, f) in models {
        let m = GasModel::new(d, 2.0, 100, u.parse().unwrap(), f.parse().unwrap()).unwrap();
        assert!(all_passed(&validate_model(&m, (-0.5, 0.5))), "{u} {f} d={d}");
        for q in 2..=4 {
            let closed = closed_form(&m, q).unwrap().leading_coefficient;
            let fd = cumulant_q_fd(&m, q, None).unwrap().leading_coefficient;
            assert!(relative_gap(fd, closed) <= 1e-6, "q={q} {u} {f} d={d}: {fd} vs {closed}");
        }
        for q in 5..=6 {
            let jet = cumulant_q_jet(&m, q).unwrap().leading_coefficient;
            let fd = cumulant_q_fd(&m, q, None).unwrap();
            let tol = 1e-6 * jet.abs() + 1e-6;
            assert!((fd.leading_coefficient - jet).abs() <= tol, "q={q} {u} {f} d={d}: {fd:?} vs {jet}");
        }
    }
}

#[test]
fn density_integrates_to_one() {
    for d in 1..=4 {
        for mu in [0.5, 1.0, 3.0] {
            let m = GasModel::new(
                d,
                2.0,
                10,
                RadialFunction::harmonic(mu).unwrap(),
                RadialFunction::monomial(2.0).unwrap(),
            )
            .unwrap();
            for s in [-0.3, 0.0, 0.6] {
                let norm = density_normalization(&m, s).unwrap();
                assert!((norm - 1.0).abs() <= 1e-9, "d={d} mu={mu} s={s}: {norm}");
            }
        }
    }
}

#[test]
fn edge_radius_follows_power_law() {
    // harmonic trap: μ R^d = 1, and f = x² tilts μ to μ + 2s/β
    for d in 1..=3 {
        let m = GasModel::new(d, 2.0, 10, RadialFunction::harmonic(2.0).unwrap(), RadialFunction::monomial(2.0).unwrap())
            .unwrap();
        let r = droplet_radius(&m).unwrap().radius;
        assert!((2.0 * r.powi(d as i32) - 1.0).abs() < 1e-12);
        let t = tilted_radius(&m, 0.4).unwrap().radius;
        assert!((2.4 * t.powi(d as i32) - 1.0).abs() < 1e-12);
    }
}
