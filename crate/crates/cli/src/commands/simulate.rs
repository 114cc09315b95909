use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use critnet_core::criticality::predicted_exponent;
use critnet_core::economy::{run, SimConfig, SimResult};
use critnet_core::export::{format_float, write_avalanches_csv, write_index_csv, write_xy_csv};
use critnet_core::graph::Direction;
use critnet_core::stats::{ccdf, fit_power_law, FitMethod, FitOptions, PowerLawFit, Xmin};
use rayon::prelude::*;

use crate::config::Manifest;
use crate::error::{CliError, Result};

pub const FILE_INDEX: &str = "index.csv";
pub const FILE_AVALANCHES: &str = "avalanches.csv";
pub const FILE_AVALANCHE_CCDF: &str = "avalanche_ccdf.csv";
pub const FILE_DEGREE_CCDF: &str = "degree_ccdf.csv";
pub const FILE_EDGES: &str = "graph.edges";
pub const FILE_MANIFEST: &str = "manifest.txt";
pub const FILE_SUMMARY: &str = "summary.txt";

/// Fit used for simulated avalanche sizes: CCDF regression from size 1.
pub const AVALANCHE_FIT: FitOptions = FitOptions {
    method: FitMethod::CcdfRegression,
    xmin: Xmin::Fixed(1.0),
    discrete: false,
};

pub fn fit_avalanche_sizes(sizes: &[f64]) -> critnet_core::Result<PowerLawFit> {
    fit_power_law(sizes, &AVALANCHE_FIT)
}

#[derive(Debug, Clone)]
pub struct SimulateRequest {
    pub config: SimConfig,
    pub out: PathBuf,
    /// Independent runs with seeds `seed, seed + 1, ...`.
    pub replicas: usize,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub seed: u64,
    pub d_th: f64,
    pub n_avalanches: usize,
    pub max_avalanche: u32,
    /// Fitted avalanche-size exponent, or why there is none.
    pub fitted_m: std::result::Result<f64, String>,
    /// In-degree exponent of the final graph.
    pub gamma_hat: std::result::Result<f64, String>,
    pub predicted_m_target: f64,
}

impl RunSummary {
    pub fn predicted_m_measured(&self) -> Option<f64> {
        self.gamma_hat.as_ref().ok().map(|&g| predicted_exponent(g))
    }

    pub fn to_text(&self) -> String {
        let show = |r: &std::result::Result<f64, String>| match r {
            Ok(v) => format_float(*v),
            Err(e) => format!("n/a ({e})"),
        };
        let measured = self
            .predicted_m_measured()
            .map(format_float)
            .unwrap_or_else(|| "n/a".into());
        format!(
            "seed={}\nd_th={}\navalanches={}\nmax_avalanche={}\nfitted_m={}\ngamma_hat={}\npredicted_m_from_gamma_hat={}\npredicted_m_from_gamma_target={}\n",
            self.seed,
            format_float(self.d_th),
            self.n_avalanches,
            self.max_avalanche,
            show(&self.fitted_m),
            show(&self.gamma_hat),
            measured,
            format_float(self.predicted_m_target),
        )
    }
}

#[derive(Debug, Clone)]
pub struct SimulateSummary {
    pub runs: Vec<RunSummary>,
}

impl SimulateSummary {
    pub fn to_text(&self) -> String {
        if let [only] = self.runs.as_slice() {
            return only.to_text();
        }
        let mut s = String::new();
        for r in &self.runs {
            s.push_str(&format!("# {}\n", r.dir.display()));
            s.push_str(&r.to_text());
        }
        let ms: Vec<f64> = self.runs.iter().filter_map(|r| r.fitted_m.as_ref().ok().copied()).collect();
        if !ms.is_empty() {
            let mean = ms.iter().sum::<f64>() / ms.len() as f64;
            let var = ms.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / ms.len() as f64;
            s.push_str(&format!(
                "# replicas\nreplicas={}\nfitted_m_mean={}\nfitted_m_std={}\n",
                self.runs.len(),
                format_float(mean),
                format_float(var.sqrt())
            ));
        }
        s
    }
}

pub fn simulate(req: &SimulateRequest) -> Result<SimulateSummary> {
    if req.replicas == 0 {
        return Err(CliError::Config("replicas must be >= 1".into()));
    }
    req.config.validate()?;
    fs::create_dir_all(&req.out).map_err(CliError::output(&req.out))?;
    let runs = if req.replicas == 1 {
        vec![run_one(&req.config, &req.out, None)?]
    } else {
        (0..req.replicas)
            .into_par_iter()
            .map(|i| {
                let config = SimConfig {
                    seed: req.config.seed.wrapping_add(i as u64),
                    ..req.config.clone()
                };
                run_one(&config, &req.out.join(format!("replica-{i}")), Some(i))
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(SimulateSummary { runs })
}

fn run_one(config: &SimConfig, dir: &Path, replica: Option<usize>) -> Result<RunSummary> {
    fs::create_dir_all(dir).map_err(CliError::output(dir))?;
    let started = now();
    let result = run(config)?;
    let summary = summarize_run(&result, dir);
    write_outputs(&result, dir)?;

    let manifest = Manifest {
        config: config.clone(),
        d_th_resolved: result.d_th,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished: now(),
        replica,
        outputs: [
            ("index", FILE_INDEX),
            ("avalanches", FILE_AVALANCHES),
            ("avalanche_ccdf", FILE_AVALANCHE_CCDF),
            ("degree_ccdf", FILE_DEGREE_CCDF),
            ("edges", FILE_EDGES),
            ("summary", FILE_SUMMARY),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect(),
    };
    write_file(&dir.join(FILE_MANIFEST), |w| w.write_all(manifest.to_text().as_bytes()))?;
    write_file(&dir.join(FILE_SUMMARY), |w| w.write_all(summary.to_text().as_bytes()))?;
    Ok(summary)
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn summarize_run(result: &SimResult, dir: &Path) -> RunSummary {
    let sizes = result.avalanche_sizes();
    RunSummary {
        dir: dir.to_path_buf(),
        seed: result.config.seed,
        d_th: result.d_th,
        n_avalanches: sizes.len(),
        max_avalanche: result.avalanches.iter().map(|a| a.size_s).max().unwrap_or(0),
        fitted_m: fit_avalanche_sizes(&sizes).map(|f| f.exponent).map_err(|e| e.to_string()),
        gamma_hat: result
            .final_graph
            .degree_histogram(Direction::In)
            .exponent_fit()
            .map(|f| f.exponent)
            .map_err(|e| e.to_string()),
        predicted_m_target: predicted_exponent(result.config.gamma_target),
    }
}

fn write_outputs(result: &SimResult, dir: &Path) -> Result<()> {
    write_file(&dir.join(FILE_INDEX), |w| write_index_csv(w, &result.index_series))?;
    write_file(&dir.join(FILE_AVALANCHES), |w| write_avalanches_csv(w, &result.avalanches))?;
    let sizes = result.avalanche_sizes();
    let points = if sizes.is_empty() { Vec::new() } else { ccdf(&sizes)? };
    write_file(&dir.join(FILE_AVALANCHE_CCDF), |w| write_xy_csv(w, ("size_s", "ccdf"), &points))?;
    write_file(&dir.join(FILE_DEGREE_CCDF), |w| {
        writeln!(w, "step,k_in,ccdf")?;
        for (step, hist) in &result.degree_snapshots {
            for (k, p) in hist.ccdf() {
                writeln!(w, "{step},{k},{}", format_float(p))?;
            }
        }
        Ok(())
    })?;
    write_file(&dir.join(FILE_EDGES), |w| result.final_graph.write_edge_list(w, result.config.n_steps))
}

pub(crate) fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(CliError::output(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(CliError::output(path))
}
