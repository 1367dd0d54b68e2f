use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::{CommandName, Ensemble, Format, RouteChoice, RunConfig, HEADER_PREFIX};
use crate::cgf::{cgf_curve, rate_function, DEFAULT_CHI_PANELS};
use crate::compare::{run_suite, SuiteOverrides};
use crate::cumulants::{closed_form, cumulant_q_fd, cumulant_q_jet, CumulantReport, MAX_JET_CUMULANT};
use crate::determinantal::{
    asymptotic_f, asymptotic_f_ginse, exact_cgf, exact_cgf_ginse, ginse_potential, DEFAULT_LAMBDA_NODES,
};
use crate::equilibrium::tilted_sweep;
use crate::error::{Error, Result};
use crate::numerics::format_f64;
use crate::montecarlo::{estimate_cumulants, pool_chains, run_chains, MCConfig};
use crate::potentials::{GasModel, RadialFunction};

/// Highest order tried by the finite-difference route under `--route all`.
const FD_MAX_ORDER_IN_ALL: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Tabular command result.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text)).map_err(csv_error)?;
        }
        w.flush().map_err(io_error)
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let map: Map<String, Value> =
                        self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(map)
                })
                .collect(),
        )
    }
}

pub(crate) fn io_error(e: std::io::Error) -> Error {
    Error::InvalidParameter(format!("i/o: {e}"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}

/// What a command produced, before serialization.
pub enum Output {
    Table(Table),
    Document(Value),
    Report { json: Value, csv: Vec<u8>, passed: bool },
}

impl Output {
    /// Whether the run met its own pass criterion (only comparisons can fail).
    pub fn passed(&self) -> bool {
        match self {
            Output::Report { passed, .. } => *passed,
            _ => true,
        }
    }

    pub fn write<W: Write>(&self, config: &RunConfig, mut out: W) -> Result<()> {
        let format = config.output.format.unwrap_or(Format::Csv);
        let config_value = serde_json::to_value(config.echo()).expect("config serializes");
        match (self, format) {
            (Output::Table(t), Format::Csv) => {
                writeln!(out, "{HEADER_PREFIX}{}", config.to_json()).map_err(io_error)?;
                t.write_csv(out)
            }
            (Output::Table(t), Format::Json) => {
                write_json(out, &json!({ "config": config_value, "columns": t.columns, "rows": t.json_rows() }))
            }
            (Output::Document(doc), _) | (Output::Report { json: doc, .. }, Format::Json) => {
                let mut doc = doc.clone();
                if let Value::Object(map) = &mut doc {
                    map.insert("config".into(), config_value);
                }
                write_json(out, &doc)
            }
            (Output::Report { csv, .. }, Format::Csv) => {
                writeln!(out, "{HEADER_PREFIX}{}", config.to_json()).map_err(io_error)?;
                out.write_all(csv).map_err(io_error)
            }
        }
    }
}

fn write_json<W: Write>(mut out: W, value: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    writeln!(out).map_err(io_error)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn parse_function(id: &Option<String>, what: &str) -> Result<RadialFunction> {
    id.as_deref()
        .ok_or_else(|| Error::InvalidParameter(format!("missing {what}")))?
        .parse()
}

fn build_model(config: &RunConfig) -> Result<GasModel> {
    let m = &config.model;
    let missing = |k: &str| Error::InvalidParameter(format!("missing model.{k}"));
    GasModel::new(
        m.d.ok_or_else(|| missing("d"))?,
        m.beta.ok_or_else(|| missing("beta"))?,
        m.n.ok_or_else(|| missing("N"))?,
        parse_function(&m.u, "U")?,
        parse_function(&m.f, "f")?,
    )
}

fn tilt_grid(config: &RunConfig) -> Result<Vec<f64>> {
    let o = &config.options;
    let (lo, hi, points) = (o.s_min.unwrap_or(-0.5), o.s_max.unwrap_or(0.5), o.points.unwrap_or(11));
    if !(lo <= hi) || points == 0 || (points == 1 && lo != hi) {
        return Err(Error::InvalidParameter(format!(
            "need s-min ≤ s-max and points ≥ 2 (got {lo}, {hi}, {points})"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect())
}

/// Runs a resolved config.
pub fn execute(config: &RunConfig) -> Result<Output> {
    match config.command {
        CommandName::Droplet => droplet(config),
        CommandName::Cumulants => cumulants(config),
        CommandName::Cgf => cgf(config),
        CommandName::Ratefn => ratefn(config),
        CommandName::Det => det(config),
        CommandName::Mc => mc(config),
        CommandName::Compare => compare(config),
    }
}

fn droplet(config: &RunConfig) -> Result<Output> {
    let model = build_model(config)?;
    let s_values = tilt_grid(config)?;
    let mut table = Table::new(vec!["s", "R_s", "residual"]);
    for t in tilted_sweep(&model, &s_values)? {
        table.rows.push(vec![Cell::Num(t.s), Cell::Num(t.radius), Cell::Num(t.residual)]);
    }
    Ok(Output::Table(table))
}

fn cumulants(config: &RunConfig) -> Result<Output> {
    let model = build_model(config)?;
    let qmax = config.options.qmax.unwrap_or(4);
    let route = config.options.route.unwrap_or(RouteChoice::All);
    if qmax == 0 {
        return Err(Error::InvalidParameter("qmax must be at least 1".into()));
    }
    let mut reports: Vec<CumulantReport> = Vec::new();
    for q in 1..=qmax {
        match route {
            RouteChoice::Closed => reports.push(closed_form(&model, q)?),
            RouteChoice::Jet if q < 3 => reports.push(closed_form(&model, q)?),
            RouteChoice::Jet => reports.push(cumulant_q_jet(&model, q)?),
            RouteChoice::Fd if q < 2 => reports.push(closed_form(&model, q)?),
            RouteChoice::Fd => reports.push(cumulant_q_fd(&model, q, None)?),
            RouteChoice::All => {
                if q <= 4 {
                    reports.push(closed_form(&model, q)?);
                }
                if (3..=MAX_JET_CUMULANT).contains(&q) {
                    reports.push(cumulant_q_jet(&model, q)?);
                }
                if (2..=FD_MAX_ORDER_IN_ALL).contains(&q) {
                    reports.push(cumulant_q_fd(&model, q, None)?);
                }
            }
        }
    }
    let n = model.n_particles();
    let mut table = Table::new(vec![
        "q",
        "route",
        "leading_coefficient",
        "n_scaling_exponent",
        "cumulant_at_N",
        "error_estimate",
    ]);
    for r in reports {
        table.rows.push(vec![
            Cell::Int(r.order as i64),
            Cell::Text(r.route.to_string()),
            Cell::Num(r.leading_coefficient),
            Cell::Int(r.n_scaling_exponent as i64),
            Cell::Num(r.at_n(n)),
            Cell::Num(r.error_estimate),
        ]);
    }
    Ok(Output::Table(table))
}

fn cgf(config: &RunConfig) -> Result<Output> {
    let model = build_model(config)?;
    let grid = tilt_grid(config)?;
    let curve = cgf_curve(&model, grid[0], grid[grid.len() - 1], grid.len(), DEFAULT_CHI_PANELS)?;
    let mut table = Table::new(vec!["s", "chi", "dchi", "R_s"]);
    for i in 0..curve.s_values.len() {
        table.rows.push(vec![
            Cell::Num(curve.s_values[i]),
            Cell::Num(curve.chi[i]),
            Cell::Num(curve.dchi[i]),
            Cell::Num(curve.droplet_radii[i]),
        ]);
    }
    Ok(Output::Table(table))
}

fn ratefn(config: &RunConfig) -> Result<Output> {
    let model = build_model(config)?;
    let o = &config.options;
    let (lo, hi) = (o.s_min.unwrap_or(-0.5), o.s_max.unwrap_or(0.5));
    let points = o.points.unwrap_or(101);
    if !(lo < hi) || points < 2 {
        return Err(Error::InvalidParameter(format!(
            "need s-min < s-max and points ≥ 2 (got {lo}, {hi}, {points})"
        )));
    }
    let ends = tilted_sweep(&model, &[lo, hi])?;
    let (a, b) = (ends[0].radius.min(ends[1].radius), ends[0].radius.max(ends[1].radius));
    let radii: Vec<f64> = (0..points).map(|i| a + (b - a) * i as f64 / (points - 1) as f64).collect();
    let rate = rate_function(&model, &radii)?;
    let mut table = Table::new(vec!["Lambda", "PsiPrime", "Psi"]);
    let mut points = rate.points;
    points.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
    for p in points {
        table.rows.push(vec![Cell::Num(p.lambda), Cell::Num(p.psi_prime), Cell::Num(p.psi)]);
    }
    Ok(Output::Table(table))
}

fn det(config: &RunConfig) -> Result<Output> {
    let m = &config.model;
    if m.d.is_some_and(|d| d != 2) || m.beta.is_some_and(|b| b != 2.0) {
        return Err(Error::InvalidModel("det needs d = 2 and beta = 2".into()));
    }
    let n = m.n.ok_or_else(|| Error::InvalidParameter("missing model.N".into()))?;
    let f = parse_function(&m.f, "f")?;
    let s_list = config.options.s_list.clone().unwrap_or_default();
    let ensemble = config.options.ensemble.unwrap_or(Ensemble::GinibreLike);
    let nf = n as f64;
    let mut table = Table::new(vec!["s", "chi_exact", "chi_exact_over_N2", "F_asymptotic", "gap"]);
    for s in s_list {
        let (chi, asym) = match ensemble {
            Ensemble::GinibreLike => {
                let model = GasModel::new(2, 2.0, n, parse_function(&m.u, "U")?, f.clone())?;
                (exact_cgf(&model, s)?, asymptotic_f(model.potential(), &f, s, DEFAULT_LAMBDA_NODES)?)
            }
            Ensemble::Ginse => {
                if let Some(u) = &m.u {
                    if u.parse::<RadialFunction>()?.descriptor() != ginse_potential().descriptor() {
                        return Err(Error::InvalidModel(format!(
                            "GinSE is defined for U = {} only, got {u}",
                            ginse_potential().descriptor()
                        )));
                    }
                }
                (exact_cgf_ginse(n, &f, s)?, asymptotic_f_ginse(&f, s, DEFAULT_LAMBDA_NODES)?)
            }
        };
        let scaled = chi / (nf * nf);
        table.rows.push(vec![
            Cell::Num(s),
            Cell::Num(chi),
            Cell::Num(scaled),
            Cell::Num(asym),
            Cell::Num((scaled - asym).abs()),
        ]);
    }
    Ok(Output::Table(table))
}

fn mc(config: &RunConfig) -> Result<Output> {
    let model = build_model(config)?;
    let o = &config.options;
    let (sweeps, burn_in) = (o.sweeps.unwrap_or(20_000), o.burn_in.unwrap_or(2_000));
    let mc_config = MCConfig::new(model, sweeps + burn_in, burn_in)?.with_seed(o.seed.unwrap_or(0));
    let chains = run_chains(&mc_config, o.chains.unwrap_or(4))?;
    let pooled = pool_chains(&chains)?;
    if let Some(path) = &o.trace {
        let file = std::fs::File::create(path).map_err(io_error)?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["chain", "seed", "sweep", "L"]).map_err(csv_error)?;
        for (k, c) in chains.iter().enumerate() {
            for (i, l) in c.samples_of_l.iter().enumerate() {
                w.write_record([k.to_string(), c.seeds[0].to_string(), i.to_string(), format_f64(*l)])
                    .map_err(csv_error)?;
            }
        }
        w.flush().map_err(io_error)?;
    }
    if config.output.format == Some(Format::Csv) {
        let mut table = Table::new(vec!["chain", "q", "k", "std_error", "acceptance_rate", "tau"]);
        let all = chains.iter().enumerate().map(|(k, c)| (Cell::Int(k as i64), c));
        for (label, c) in all.chain(std::iter::once((Cell::Text("pooled".into()), &pooled))) {
            for e in &c.cumulant_estimates {
                table.rows.push(vec![
                    label.clone(),
                    Cell::Int(e.order as i64),
                    Cell::Num(e.value),
                    Cell::Num(e.std_error),
                    Cell::Num(c.acceptance_rate),
                    Cell::Num(c.autocorrelation_time_estimate),
                ]);
            }
        }
        return Ok(Output::Table(table));
    }
    let reports = estimate_cumulants(&pooled, 4);
    Ok(Output::Document(json!({
        "chains": to_value(&chains),
        "pooled": to_value(&pooled),
        "pooled_coefficients": match &reports {
            Ok(r) => to_value(r),
            Err(e) => json!({ "error": e.to_string() }),
        },
    })))
}

fn compare(config: &RunConfig) -> Result<Output> {
    let o = &config.options;
    let suite = o.suite.as_deref().ok_or_else(|| Error::InvalidParameter("compare needs --suite".into()))?;
    let overrides = SuiteOverrides {
        n_particles: config.model.n,
        s: o.s,
        seed: o.seed,
        sweeps: o.sweeps,
        burn_in: o.burn_in,
        chains: o.chains,
    };
    let report = run_suite(suite, &overrides)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    Ok(Output::Report {
        json: to_value(&report),
        csv,
        passed: report.passed,
    })
}

