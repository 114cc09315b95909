//! `key=value` run configuration and the run manifest.
//!
//! A manifest is a configuration file with extra bookkeeping keys, so any
//! manifest can be fed back as `--config` to repeat the run.

use std::fmt::Write as _;
use std::path::Path;

use critnet_core::economy::SimConfig;

use crate::error::{CliError, Result};

/// Keys written by [`Manifest`] that carry no configuration.
const MANIFEST_ONLY: &[&str] = &["d_th_resolved", "version", "started", "finished", "replica"];

/// Optional overrides for every field of a [`SimConfig`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimOverrides {
    pub agents: Option<usize>,
    pub k_out: Option<u32>,
    pub gamma: Option<f64>,
    pub d_th: Option<String>,
    pub steps: Option<u64>,
    pub stride: Option<u64>,
    pub seed: Option<u64>,
    pub aggregator: Option<String>,
    pub snapshots: Option<usize>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

impl SimOverrides {
    /// Reads `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut out = SimOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "agents" => out.agents = Some(parse(key, value)?),
                "k_out" => out.k_out = Some(parse(key, value)?),
                "gamma" => out.gamma = Some(parse(key, value)?),
                "d_th" => out.d_th = Some(value.to_string()),
                "steps" => out.steps = Some(parse(key, value)?),
                "stride" => out.stride = Some(parse(key, value)?),
                "seed" => out.seed = Some(parse(key, value)?),
                "aggregator" => out.aggregator = Some(value.to_string()),
                "snapshots" => out.snapshots = Some(parse(key, value)?),
                k if MANIFEST_ONLY.contains(&k) || k.starts_with("output.") => {}
                other => {
                    return Err(CliError::Config(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Fields set in `other` win.
    pub fn merged(self, other: SimOverrides) -> SimOverrides {
        SimOverrides {
            agents: other.agents.or(self.agents),
            k_out: other.k_out.or(self.k_out),
            gamma: other.gamma.or(self.gamma),
            d_th: other.d_th.or(self.d_th),
            steps: other.steps.or(self.steps),
            stride: other.stride.or(self.stride),
            seed: other.seed.or(self.seed),
            aggregator: other.aggregator.or(self.aggregator),
            snapshots: other.snapshots.or(self.snapshots),
        }
    }

    /// Applies the overrides to the defaults and validates the result.
    pub fn resolve(&self) -> Result<SimConfig> {
        let mut c = SimConfig::default();
        if let Some(v) = self.agents {
            c.n_agents = v;
        }
        if let Some(v) = self.k_out {
            c.k_out_init = v;
        }
        if let Some(v) = self.gamma {
            c.gamma_target = v;
        }
        if let Some(v) = &self.d_th {
            c.d_th = v.parse()?;
        }
        if let Some(v) = self.steps {
            c.n_steps = v;
        }
        if let Some(v) = self.stride {
            c.sample_stride = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.aggregator {
            c.index_aggregator = v.parse()?;
        }
        if let Some(v) = self.snapshots {
            c.degree_snapshots = v;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Configuration as `key=value` lines, readable by [`SimOverrides::from_text`].
pub fn config_to_text(c: &SimConfig) -> String {
    format!(
        "agents={}\nk_out={}\ngamma={}\nd_th={}\nsteps={}\nstride={}\nseed={}\naggregator={}\nsnapshots={}\n",
        c.n_agents,
        c.k_out_init,
        c.gamma_target,
        c.d_th,
        c.n_steps,
        c.sample_stride,
        c.seed,
        c.index_aggregator,
        c.degree_snapshots
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub config: SimConfig,
    pub d_th_resolved: f64,
    pub version: String,
    pub started: String,
    pub finished: String,
    pub replica: Option<usize>,
    /// `(role, file name)` of every output written next to the manifest.
    pub outputs: Vec<(String, String)>,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        let mut s = String::from("# critnet run manifest\n");
        s.push_str(&config_to_text(&self.config));
        let _ = writeln!(s, "d_th_resolved={}", self.d_th_resolved);
        let _ = writeln!(s, "version={}", self.version);
        let _ = writeln!(s, "started={}", self.started);
        let _ = writeln!(s, "finished={}", self.finished);
        if let Some(r) = self.replica {
            let _ = writeln!(s, "replica={r}");
        }
        for (role, file) in &self.outputs {
            let _ = writeln!(s, "output.{role}={file}");
        }
        s
    }
}
