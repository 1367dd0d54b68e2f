use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Droplet,
    Cumulants,
    Cgf,
    Ratefn,
    Det,
    Mc,
    Compare,
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RouteChoice {
    Closed,
    Jet,
    Fd,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    GinibreLike,
    Ginse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
}

/// Command options; keys mirror the long flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<RouteChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Ensemble>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chains: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// A full run description, as read from `--config` and echoed in outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub options: Options,
    #[serde(default)]
    pub output: OutputSpec,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),+) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )+
    };
}

impl RunConfig {
    pub fn new(command: CommandName) -> Self {
        Self {
            command,
            model: ModelSpec::default(),
            options: Options::default(),
            output: OutputSpec::default(),
        }
    }

    /// Parses a config file. Besides a bare config object this accepts an
    /// earlier output: a JSON document with a `config` key, or a CSV file
    /// whose first line is `# config=<json>`.
    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::InvalidParameter(format!("config: {e}"));
        if let Some(rest) = text.strip_prefix(HEADER_PREFIX) {
            let line = rest.lines().next().unwrap_or_default();
            return serde_json::from_str(line).map_err(bad);
        }
        let value: serde_json::Value = serde_json::from_str(text).map_err(bad)?;
        match value.get("config") {
            Some(inner) if value.get("command").is_none() => serde_json::from_value(inner.clone()).map_err(bad),
            _ => serde_json::from_value(value).map_err(bad),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Values set in `top` win.
    pub fn overlay(&mut self, top: &RunConfig) {
        self.command = top.command;
        overlay!(self.model, top.model, d, beta, n, u, f);
        overlay!(
            self.options, top.options, s_min, s_max, points, qmax, route, s_list, ensemble, sweeps, burn_in, seed,
            chains, trace, suite, s
        );
        overlay!(self.output, top.output, path, format);
    }

    /// Fills every default the command uses, so the echoed config pins the run.
    pub fn resolve(mut self) -> Result<Self> {
        let m = &mut self.model;
        let o = &mut self.options;
        let uses_model = !matches!(self.command, CommandName::Compare);
        if uses_model {
            m.d.get_or_insert(2);
            m.beta.get_or_insert(2.0);
            m.n.get_or_insert(100);
            m.f.get_or_insert_with(|| "monomial:q=2".into());
            if !(self.command == CommandName::Det && o.ensemble == Some(Ensemble::Ginse)) {
                m.u.get_or_insert_with(|| "harmonic:mu=1".into());
            }
        }
        match self.command {
            CommandName::Droplet | CommandName::Cgf | CommandName::Ratefn => {
                o.s_min.get_or_insert(-0.5);
                o.s_max.get_or_insert(0.5);
                o.points.get_or_insert(if self.command == CommandName::Ratefn { 101 } else { 11 });
            }
            CommandName::Cumulants => {
                o.qmax.get_or_insert(4);
                o.route.get_or_insert(RouteChoice::All);
            }
            CommandName::Det => {
                o.s_list.get_or_insert_with(|| vec![-0.3, 0.3]);
                o.ensemble.get_or_insert(Ensemble::GinibreLike);
            }
            CommandName::Mc => {
                o.sweeps.get_or_insert(20_000);
                o.burn_in.get_or_insert(2_000);
                o.seed.get_or_insert(0);
                o.chains.get_or_insert(4);
            }
            CommandName::Compare => {
                if o.suite.is_none() {
                    return Err(Error::InvalidParameter("compare needs --suite".into()));
                }
            }
        }
        let default_format = match self.command {
            CommandName::Mc | CommandName::Compare => Format::Json,
            _ => Format::Csv,
        };
        self.output.format.get_or_insert(default_format);
        Ok(self)
    }

    /// The config as echoed in outputs: the output path is left out, so
    /// feeding an echo back never overwrites the file it came from.
    pub fn echo(&self) -> RunConfig {
        let mut c = self.clone();
        c.output.path = None;
        c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.echo()).expect("config serializes")
    }
}

pub(crate) const HEADER_PREFIX: &str = "# config=";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"command":"cumulants","model":{"d":2,"mu":1}}"#;
        assert!(RunConfig::from_text(text).is_err());
        let text = r#"{"command":"cumulants","options":{"q-max":3}}"#;
        assert!(RunConfig::from_text(text).is_err());
    }

    #[test]
    fn echoed_config_parses_back() {
        let c = RunConfig::new(CommandName::Det).resolve().unwrap();
        let line = format!("{HEADER_PREFIX}{}\ns,chi\n", c.to_json());
        assert_eq!(RunConfig::from_text(&line).unwrap(), c);
        let doc = format!(r#"{{"config":{},"rows":[]}}"#, c.to_json());
        assert_eq!(RunConfig::from_text(&doc).unwrap(), c);
    }
}
