use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{CommandName, Ensemble, Format, ModelSpec, Options, OutputSpec, RouteChoice, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "coulomb-linstat", version, about = "Cumulants, CGF and rate function of Coulomb gas linear statistics")]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Confining potential, e.g. `harmonic:mu=1` or `poly:0,0,0.5`.
    #[arg(long = "U")]
    pub u: Option<String>,
    /// Statistic, e.g. `monomial:q=2`.
    #[arg(long)]
    pub f: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct TiltArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args, Default)]
pub struct ChainArgs {
    /// Production sweeps per chain, burn-in excluded.
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chains: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Droplet radius along a range of tilts (CSV: s, R_s, residual).
    Droplet {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tilt: TiltArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Leading-order cumulant coefficients.
    Cumulants {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        qmax: Option<usize>,
        #[arg(long, value_enum)]
        route: Option<RouteChoice>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Scaled CGF chi/N^2 and its derivative.
    Cgf {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tilt: TiltArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rate function sampled over the radii reached by the tilt range.
    Ratefn {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tilt: TiltArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact finite-N CGF in d = 2, beta = 2 against its large-N limit.
    Det {
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s_list: Option<Vec<f64>>,
        #[arg(long = "U")]
        u: Option<String>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long, value_enum)]
        ensemble: Option<Ensemble>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Metropolis sampling of L.
    Mc {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        chain: ChainArgs,
        /// Per-sweep CSV trace of L.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-route comparison suite.
    Compare {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl ModelArgs {
    fn spec(self) -> ModelSpec {
        ModelSpec {
            d: self.d,
            beta: self.beta,
            n: self.n,
            u: self.u,
            f: self.f,
        }
    }
}

impl OutputArgs {
    fn spec(self) -> OutputSpec {
        OutputSpec {
            path: self.out,
            format: self.format,
        }
    }
}

impl TiltArgs {
    fn apply(self, o: &mut Options) {
        o.s_min = self.s_min;
        o.s_max = self.s_max;
        o.points = self.points;
    }
}

impl ChainArgs {
    fn apply(self, o: &mut Options) {
        o.sweeps = self.sweeps;
        o.burn_in = self.burn_in;
        o.seed = self.seed;
        o.chains = self.chains;
    }
}

impl Command {
    /// The flags as a partial config, unset flags left empty.
    pub fn into_config(self) -> RunConfig {
        let mut o = Options::default();
        let (command, model, output) = match self {
            Command::Droplet { model, tilt, output } => {
                tilt.apply(&mut o);
                (CommandName::Droplet, model.spec(), output)
            }
            Command::Cgf { model, tilt, output } => {
                tilt.apply(&mut o);
                (CommandName::Cgf, model.spec(), output)
            }
            Command::Ratefn { model, tilt, output } => {
                tilt.apply(&mut o);
                (CommandName::Ratefn, model.spec(), output)
            }
            Command::Cumulants { model, qmax, route, output } => {
                o.qmax = qmax;
                o.route = route;
                (CommandName::Cumulants, model.spec(), output)
            }
            Command::Det { n, s_list, u, f, ensemble, output } => {
                o.s_list = s_list;
                o.ensemble = ensemble;
                let model = ModelSpec { n, u, f, ..ModelSpec::default() };
                (CommandName::Det, model, output)
            }
            Command::Mc { model, chain, trace, output } => {
                chain.apply(&mut o);
                o.trace = trace;
                (CommandName::Mc, model.spec(), output)
            }
            Command::Compare { suite, n, s, chain, output } => {
                chain.apply(&mut o);
                o.suite = suite;
                o.s = s;
                let model = ModelSpec { n, ..ModelSpec::default() };
                (CommandName::Compare, model, output)
            }
        };
        RunConfig {
            command,
            model,
            options: o,
            output: output.spec(),
        }
    }
}
