use std::fs;
use std::io::Write;
use std::path::PathBuf;

use critnet_core::export::{format_float, write_histogram_csv, write_xy_csv};
use critnet_core::stats::{
    ccdf, extract_drawdowns, fit_power_law, log_returns, summarize, EventSize, FitMethod, FitOptions,
    Goodness, PowerLawFit, Xmin,
};

use super::simulate::write_file;
use crate::error::{CliError, Result};
use crate::ingest::{ingest_csv, IngestError};

/// Fewest levels accepted for analysis.
pub const MIN_LEVELS: usize = 30;

/// Fewest drawdown events accepted for a fit.
pub const MIN_EVENTS: usize = 30;

pub const FILE_EVENTS: &str = "events.csv";
pub const FILE_CCDF: &str = "ccdf.csv";
pub const FILE_RETURNS_PDF: &str = "returns_pdf.csv";
pub const FILE_FIT: &str = "fit.txt";

/// Avalanche exponents implied by degree exponents between 2.1 and 2.7.
pub const PREDICTED_BAND: (f64, f64) = (2.15, 3.05);

#[derive(Debug, Clone)]
pub struct AnalyzeRequest {
    pub input: PathBuf,
    pub date_col: String,
    pub close_col: String,
    pub xmin: Xmin,
    pub method: FitMethod,
    pub size: EventSize,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct AnalyzeReport {
    pub dataset: String,
    pub n_levels: usize,
    pub dropped_rows: usize,
    pub n_returns: usize,
    pub excluded_returns: usize,
    pub n_events: usize,
    pub size: EventSize,
    pub fit: PowerLawFit,
    pub excess_kurtosis: f64,
}

impl AnalyzeReport {
    pub fn in_band(&self) -> bool {
        (PREDICTED_BAND.0..=PREDICTED_BAND.1).contains(&self.fit.exponent)
    }

    pub fn to_text(&self) -> String {
        let (goodness_key, goodness) = match self.fit.goodness {
            Goodness::RSquared(r) => ("r_squared", r),
            Goodness::LogLikelihood(l) => ("log_likelihood", l),
        };
        let size = match self.size {
            EventSize::Magnitude => "magnitude",
            EventSize::RunLength => "run_length",
        };
        let ks = self.fit.ks_distance.map(format_float).unwrap_or_else(|| "n/a".into());
        format!(
            "dataset={}\nlevels={}\ndropped_rows={}\nreturns={}\nexcluded_returns={}\nevents={}\nevent_size={}\n\
             method={}\nexponent={}\nccdf_slope={}\nxmin={}\n{}={}\nks_distance={}\nn_points={}\n\
             returns_excess_kurtosis={}\npredicted_band_low={}\npredicted_band_high={}\nin_predicted_band={}\n",
            self.dataset,
            self.n_levels,
            self.dropped_rows,
            self.n_returns,
            self.excluded_returns,
            self.n_events,
            size,
            self.fit.method,
            format_float(self.fit.exponent),
            format_float(self.fit.ccdf_slope),
            format_float(self.fit.xmin),
            goodness_key,
            format_float(goodness),
            ks,
            self.fit.n_points,
            format_float(self.excess_kurtosis),
            PREDICTED_BAND.0,
            PREDICTED_BAND.1,
            self.in_band(),
        )
    }
}

pub fn analyze(req: &AnalyzeRequest) -> Result<AnalyzeReport> {
    let data = ingest_csv(&req.input, &req.date_col, &req.close_col)?;
    if data.len() < MIN_LEVELS {
        return Err(IngestError::TooShort {
            len: data.len(),
            min: MIN_LEVELS,
        }
        .into());
    }
    let returns = log_returns(&data.closes)?;
    let events = extract_drawdowns(&returns);
    if events.len() < MIN_EVENTS {
        return Err(critnet_core::Error::InsufficientData(format!(
            "{} drawdown events, need at least {MIN_EVENTS}",
            events.len()
        ))
        .into());
    }
    let sizes: Vec<f64> = events.iter().map(|e| e.size(req.size)).collect();
    let fit = fit_power_law(
        &sizes,
        &FitOptions {
            method: req.method,
            xmin: req.xmin,
            discrete: req.size == EventSize::RunLength,
        },
    )?;
    let summary = summarize(&returns.values, None)?;

    fs::create_dir_all(&req.out).map_err(CliError::output(&req.out))?;
    write_file(&req.out.join(FILE_EVENTS), |w| {
        writeln!(w, "start_index,end_index,start_date,end_date,length,magnitude")?;
        for e in &events {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                e.start_index,
                e.end_index,
                data.dates[returns.index[e.start_index]],
                data.dates[returns.index[e.end_index]],
                e.length,
                format_float(e.magnitude)
            )?;
        }
        Ok(())
    })?;
    let points = ccdf(&sizes)?;
    write_file(&req.out.join(FILE_CCDF), |w| write_xy_csv(w, ("size", "ccdf"), &points))?;
    write_file(&req.out.join(FILE_RETURNS_PDF), |w| write_histogram_csv(w, &summary.histogram))?;

    let report = AnalyzeReport {
        dataset: data.name.clone(),
        n_levels: data.len(),
        dropped_rows: data.dropped,
        n_returns: returns.len(),
        excluded_returns: returns.excluded_count,
        n_events: events.len(),
        size: req.size,
        fit,
        excess_kurtosis: summary.excess_kurtosis,
    };
    write_file(&req.out.join(FILE_FIT), |w| w.write_all(report.to_text().as_bytes()))?;
    Ok(report)
}
