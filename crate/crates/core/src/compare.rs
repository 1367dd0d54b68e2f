//! Cross-route comparison suites.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cgf::{chi_over_n2, dchi_ds, legendre_roundtrip, rate_closed_harmonic_x2, rate_function};
use crate::cumulants::{closed_form, cumulant_q_jet, harmonic_linear_cumulants};
use crate::determinantal::{
    asymptotic_f_derivative, asymptotic_f_ginse, exact_cgf, exact_cgf_ginse, exact_cumulants_ginse,
    DEFAULT_LAMBDA_NODES,
};
use crate::error::{Error, Result};
use crate::montecarlo::{pool_chains, run_chains, ChainStats, MCConfig};
use crate::numerics::{central_derivative, format_f64};
use crate::potentials::{GasModel, RadialFunction};

pub const SUITES: [&str; 5] = [
    "cumulants-closed-vs-jet",
    "cgf-coulomb-vs-det",
    "rate-closed-vs-parametric",
    "mc-vs-exact",
    "ginse-sanity",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    Absolute(f64),
    /// Relative to the second route's value.
    Relative(f64),
}

impl Tolerance {
    pub fn admits(&self, a: f64, b: f64) -> bool {
        let gap = (a - b).abs();
        match *self {
            Tolerance::Absolute(t) => gap <= t,
            Tolerance::Relative(t) => gap <= t * b.abs(),
        }
    }

    fn parts(&self) -> (&'static str, f64) {
        match *self {
            Tolerance::Absolute(t) => ("absolute", t),
            Tolerance::Relative(t) => ("relative", t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub id: String,
    pub quantity: String,
    pub route_a: String,
    pub value_a: Option<f64>,
    pub route_b: String,
    pub value_b: Option<f64>,
    pub tolerance: Option<Tolerance>,
    pub passed: bool,
    pub runtime_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub suite: String,
    pub model: String,
    pub rows: Vec<ComparisonRow>,
    pub passed: bool,
}

impl ComparisonReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidParameter(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "id", "quantity", "route_a", "value_a", "route_b", "value_b", "gap", "tolerance_kind",
            "tolerance", "passed", "runtime_s", "error",
        ])
        .map_err(io)?;
        let num = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
        for r in &self.rows {
            let gap = r.value_a.zip(r.value_b).map(|(a, b)| (a - b).abs());
            let (kind, tol) = r.tolerance.map(|t| t.parts()).map_or(("", None), |(k, t)| (k, Some(t)));
            w.write_record([
                r.id.clone(),
                r.quantity.clone(),
                r.route_a.clone(),
                num(r.value_a),
                r.route_b.clone(),
                num(r.value_b),
                num(gap),
                kind.to_string(),
                num(tol),
                r.passed.to_string(),
                format_f64(r.runtime_s),
                r.error.clone().unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| !r.passed)
    }
}

/// Optional parameter overrides; unset fields keep the suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SuiteOverrides {
    #[serde(rename = "N")]
    pub n_particles: Option<usize>,
    pub s: Option<f64>,
    pub seed: Option<u64>,
    pub sweeps: Option<usize>,
    pub burn_in: Option<usize>,
    pub chains: Option<usize>,
}

type Eval = Box<dyn Fn() -> Result<(f64, f64, Tolerance)> + Send + Sync>;

struct RowSpec {
    id: String,
    quantity: String,
    route_a: String,
    route_b: String,
    eval: Eval,
}

impl RowSpec {
    fn new(
        id: impl Into<String>,
        quantity: impl Into<String>,
        routes: (&str, &str),
        eval: impl Fn() -> Result<(f64, f64, Tolerance)> + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            quantity: quantity.into(),
            route_a: routes.0.into(),
            route_b: routes.1.into(),
            eval: Box::new(eval),
        }
    }

    fn run(&self) -> ComparisonRow {
        let start = Instant::now();
        let outcome = (self.eval)();
        let runtime_s = start.elapsed().as_secs_f64();
        let mut row = ComparisonRow {
            id: self.id.clone(),
            quantity: self.quantity.clone(),
            route_a: self.route_a.clone(),
            value_a: None,
            route_b: self.route_b.clone(),
            value_b: None,
            tolerance: None,
            passed: false,
            runtime_s,
            error: None,
        };
        match outcome {
            Ok((a, b, tol)) => {
                row.value_a = Some(a);
                row.value_b = Some(b);
                row.tolerance = Some(tol);
                row.passed = a.is_finite() && b.is_finite() && tol.admits(a, b);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    }
}

fn execute(suite: &str, model: String, specs: Vec<RowSpec>) -> ComparisonReport {
    let rows: Vec<ComparisonRow> = specs.par_iter().map(RowSpec::run).collect();
    let passed = !rows.is_empty() && rows.iter().all(|r| r.passed);
    ComparisonReport {
        suite: suite.to_string(),
        model,
        rows,
        passed,
    }
}

fn harmonic() -> RadialFunction {
    RadialFunction::harmonic(1.0).expect("valid")
}

fn square() -> RadialFunction {
    RadialFunction::monomial(2.0).expect("valid")
}

fn ginibre(n: usize) -> Result<GasModel> {
    GasModel::new(2, 2.0, n, harmonic(), square())
}

/// Runs the named suite. Row failures, including errors, are recorded in
/// the report rather than returned.
pub fn run_suite(name: &str, overrides: &SuiteOverrides) -> Result<ComparisonReport> {
    match name {
        "cumulants-closed-vs-jet" => cumulants_closed_vs_jet(overrides),
        "cgf-coulomb-vs-det" => cgf_coulomb_vs_det(overrides),
        "rate-closed-vs-parametric" => rate_closed_vs_parametric(),
        "mc-vs-exact" => mc_vs_exact(overrides),
        "ginse-sanity" => ginse_sanity(overrides),
        _ => Err(Error::UnknownSuite(format!("{name} (known: {})", SUITES.join(", ")))),
    }
}

fn cumulants_closed_vs_jet(o: &SuiteOverrides) -> Result<ComparisonReport> {
    let n = o.n_particles.unwrap_or(100);
    let mut specs = Vec::new();
    for d in 1..=3 {
        let model = GasModel::new(d, 2.0, n, harmonic(), square())?;
        for q in [3, 4] {
            let m = model.clone();
            specs.push(RowSpec::new(
                format!("d{d}-q{q}"),
                format!("c{q} harmonic/x^2 d={d}"),
                ("closed", "jet"),
                move || {
                    let a = closed_form(&m, q)?.leading_coefficient;
                    let b = cumulant_q_jet(&m, q)?.leading_coefficient;
                    Ok((a, b, Tolerance::Relative(1e-10)))
                },
            ));
        }
    }
    for d in [2, 3] {
        let model = GasModel::new(d, 2.0, n, harmonic(), RadialFunction::monomial(1.0)?)?;
        specs.push(RowSpec::new(
            format!("linear-d{d}-q5"),
            format!("c5 harmonic/x d={d}"),
            ("gamma-formula", "jet"),
            move || {
                let a = harmonic_linear_cumulants(d, 1.0, 2.0, 5)?.leading_coefficient;
                let b = cumulant_q_jet(&model, 5)?.leading_coefficient;
                Ok((a, b, Tolerance::Relative(1e-9)))
            },
        ));
    }
    Ok(execute("cumulants-closed-vs-jet", format!("U=harmonic:mu=1 beta=2 N={n}"), specs))
}

fn cgf_coulomb_vs_det(o: &SuiteOverrides) -> Result<ComparisonReport> {
    let n = o.n_particles.unwrap_or(100);
    let s0 = o.s.unwrap_or(0.3);
    let model = ginibre(n)?;
    let nf = n as f64;
    let mut specs = Vec::new();
    for s in [-s0, s0] {
        let m = model.clone();
        specs.push(RowSpec::new(
            format!("chi-s{s}"),
            format!("chi/N^2 at s={s}"),
            ("det-exact", "coulomb"),
            move || {
                let a = exact_cgf(&m, s)? / (nf * nf);
                let b = chi_over_n2(&m, s, crate::cgf::DEFAULT_CHI_PANELS)?;
                Ok((a, b, Tolerance::Absolute(2.0 / nf)))
            },
        ));
        let m = model.clone();
        specs.push(RowSpec::new(
            format!("exact-closed-s{s}"),
            format!("chi at s={s}"),
            ("det-exact", "closed"),
            move || {
                let a = exact_cgf(&m, s)?;
                let b = -0.5 * nf * (nf + 1.0) * (1.0 + s).ln();
                Ok((a, b, Tolerance::Relative(1e-9)))
            },
        ));
    }
    for k in 0..=10 {
        let s = -0.5 + 0.1 * k as f64;
        let m = model.clone();
        specs.push(RowSpec::new(
            format!("dchi-s{s:.1}"),
            format!("d(chi/N^2)/ds at s={s:.1}"),
            ("coulomb", "det-asymptotic"),
            move || {
                let a = dchi_ds(&m, s)?;
                let b = asymptotic_f_derivative(m.potential(), m.statistic(), s, DEFAULT_LAMBDA_NODES)?;
                Ok((a, b, Tolerance::Absolute(1e-8)))
            },
        ));
    }
    Ok(execute("cgf-coulomb-vs-det", model.descriptor(), specs))
}

fn rate_closed_vs_parametric() -> Result<ComparisonReport> {
    let model = ginibre(100)?;
    let grid: Vec<f64> = (0..=240).map(|i| 0.4 + 1.6 * i as f64 / 240.0).collect();
    let curve = Arc::new(rate_function(&model, &grid).map_err(|e| e.to_string()));
    let mut specs = Vec::new();
    let c = Arc::clone(&curve);
    specs.push(RowSpec::new(
        "psi-max-gap",
        "max |Psi_param - Psi_closed| over Lambda in [0.1, 2]",
        ("parametric", "closed"),
        move || {
            let curve = c.as_ref().clone().map_err(Error::Quadrature)?;
            let mut worst: f64 = 0.0;
            for p in curve.points.iter().filter(|p| (0.1..=2.0).contains(&p.lambda)) {
                worst = worst.max((p.psi - rate_closed_harmonic_x2(2, 1.0, 2.0, p.lambda)?).abs());
            }
            Ok((worst, 0.0, Tolerance::Absolute(1e-6)))
        },
    ));
    for k in 0..=10 {
        let s = -0.5 + 0.1 * k as f64;
        let (c, m) = (Arc::clone(&curve), model.clone());
        specs.push(RowSpec::new(
            format!("legendre-s{s:.1}"),
            format!("chi/N^2 at s={s:.1}"),
            ("legendre", "coulomb"),
            move || {
                let curve = c.as_ref().clone().map_err(Error::Quadrature)?;
                let a = legendre_roundtrip(s, &curve)?;
                let b = chi_over_n2(&m, s, crate::cgf::DEFAULT_CHI_PANELS)?;
                Ok((a, b, Tolerance::Absolute(1e-6)))
            },
        ));
    }
    Ok(execute("rate-closed-vs-parametric", model.descriptor(), specs))
}

fn mc_vs_exact(o: &SuiteOverrides) -> Result<ComparisonReport> {
    let n = o.n_particles.unwrap_or(64);
    let burn_in = o.burn_in.unwrap_or(8_000);
    let sweeps = o.sweeps.unwrap_or(200_000);
    let chains = o.chains.unwrap_or(4);
    let model = ginibre(n)?;
    let config = MCConfig::new(model.clone(), sweeps + burn_in, burn_in)?.with_seed(o.seed.unwrap_or(2024));
    let pooled: Arc<std::result::Result<ChainStats, String>> =
        Arc::new(run_chains(&config, chains).and_then(|c| pool_chains(&c)).map_err(|e| e.to_string()));
    let nf = n as f64;
    let targets = [
        (1, "mean", 0.5 * (nf + 1.0)),
        (2, "variance", 0.5 * (nf + 1.0) / nf),
        (3, "k3", (nf + 1.0) / (nf * nf)),
    ];
    let mut specs = Vec::new();
    for (order, name, exact) in targets {
        let p = Arc::clone(&pooled);
        specs.push(RowSpec::new(
            name,
            format!("k{order} of L within 3 sigma"),
            ("mc", "det-exact"),
            move || {
                let stats = p.as_ref().clone().map_err(Error::InsufficientSamples)?;
                let e = stats.cumulant_estimates[order - 1];
                Ok((e.value, exact, Tolerance::Absolute(3.0 * e.std_error)))
            },
        ));
    }
    let p = Arc::clone(&pooled);
    specs.push(RowSpec::new(
        "variance-sigma",
        "standard error of the variance",
        ("mc", "bound"),
        move || {
            let stats = p.as_ref().clone().map_err(Error::InsufficientSamples)?;
            Ok((stats.cumulant_estimates[1].std_error, 0.0, Tolerance::Absolute(0.05)))
        },
    ));
    let p = Arc::clone(&pooled);
    specs.push(RowSpec::new(
        "acceptance",
        "acceptance rate in (0.05, 0.95)",
        ("mc", "bound"),
        move || {
            let stats = p.as_ref().clone().map_err(Error::InsufficientSamples)?;
            Ok((stats.acceptance_rate, 0.5, Tolerance::Absolute(0.45)))
        },
    ));
    Ok(execute(
        "mc-vs-exact",
        format!("{} chains={chains} sweeps={sweeps} burn-in={burn_in}", model.descriptor()),
        specs,
    ))
}

fn ginse_sanity(o: &SuiteOverrides) -> Result<ComparisonReport> {
    let n = o.n_particles.unwrap_or(100);
    let s0 = o.s.unwrap_or(0.3);
    let nf = n as f64;
    let f = square();
    let mut specs = Vec::new();
    for s in [-s0, s0] {
        let g = f.clone();
        specs.push(RowSpec::new(
            format!("exact-closed-s{s}"),
            format!("GinSE chi at s={s}"),
            ("det-exact", "closed"),
            move || {
                let a = exact_cgf_ginse(n, &g, s)?;
                let b = -nf * (nf + 1.0) * (1.0 + 0.5 * s).ln();
                Ok((a, b, Tolerance::Relative(1e-9)))
            },
        ));
        let g = f.clone();
        specs.push(RowSpec::new(
            format!("chi-s{s}"),
            format!("GinSE chi/N^2 at s={s}"),
            ("det-exact", "det-asymptotic"),
            move || {
                let a = exact_cgf_ginse(n, &g, s)? / (nf * nf);
                let b = asymptotic_f_ginse(&g, s, DEFAULT_LAMBDA_NODES)?;
                Ok((a, b, Tolerance::Absolute(2.0 / nf)))
            },
        ));
    }
    let g = f.clone();
    specs.push(RowSpec::new(
        "c2",
        "GinSE second cumulant",
        ("det-exact", "det-asymptotic"),
        move || {
            let a = exact_cumulants_ginse(n, &g, 2, None)?.leading_coefficient;
            let b = central_derivative(|s| asymptotic_f_ginse(&g, s, DEFAULT_LAMBDA_NODES), 2, 1e-2, 2)?.value;
            Ok((a, b, Tolerance::Absolute(1.0 / nf)))
        },
    ));
    Ok(execute(
        "ginse-sanity",
        format!("GinSE U=harmonic:mu=2 f={} N={n}", f.descriptor()),
        specs,
    ))
}
