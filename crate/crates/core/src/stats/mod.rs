//! Series statistics shared by simulated and empirical data.

mod powerlaw;

pub use powerlaw::{
    fit_ccdf_points, fit_power_law, FitMethod, FitOptions, Goodness, PowerLawFit, Xmin,
    MIN_FIT_POINTS,
};

use crate::{Error, Result};

/// Log returns of a level series.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    /// Position in the input of the later level of each pair.
    pub index: Vec<usize>,
    pub values: Vec<f64>,
    /// Consecutive pairs skipped because a level was not positive and finite.
    pub excluded_count: usize,
}

impl ReturnSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `ln(x_t / x_{t-1})` for each consecutive pair of usable levels.
pub fn log_returns(levels: &[f64]) -> Result<ReturnSeries> {
    let usable = |x: f64| x > 0.0 && x.is_finite();
    let mut out = ReturnSeries {
        index: Vec::new(),
        values: Vec::new(),
        excluded_count: 0,
    };
    for (t, pair) in levels.windows(2).enumerate() {
        if usable(pair[0]) && usable(pair[1]) {
            out.index.push(t + 1);
            out.values.push((pair[1] / pair[0]).ln());
        } else {
            out.excluded_count += 1;
        }
    }
    if out.excluded_count > 0 {
        log::warn!("{} return pairs skipped on non-positive levels", out.excluded_count);
    }
    if out.values.is_empty() {
        return Err(Error::InsufficientData(format!(
            "need two consecutive positive levels, got {} levels",
            levels.len()
        )));
    }
    Ok(out)
}

/// Elements at positions `0, stride, 2 stride, ...`.
///
/// # Panics
/// If `stride` is 0.
pub fn stride_sample<T: Clone>(series: &[T], stride: usize) -> Vec<T> {
    assert!(stride >= 1, "stride must be at least 1");
    series.iter().step_by(stride).cloned().collect()
}

/// A maximal run of strictly negative returns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawdownEvent {
    /// First return of the run, as a position in the return series.
    pub start_index: usize,
    /// Last return of the run, inclusive.
    pub end_index: usize,
    /// Sum of `|r_t|` over the run.
    pub magnitude: f64,
    pub length: usize,
}

/// How a drawdown is turned into a single size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EventSize {
    #[default]
    Magnitude,
    RunLength,
}

impl DrawdownEvent {
    pub fn size(&self, mode: EventSize) -> f64 {
        match mode {
            EventSize::Magnitude => self.magnitude,
            EventSize::RunLength => self.length as f64,
        }
    }
}

/// Splits the returns into maximal runs of negative values. Zero and
/// positive returns end a run.
pub fn extract_drawdowns(returns: &ReturnSeries) -> Vec<DrawdownEvent> {
    let mut events = Vec::new();
    let mut current: Option<DrawdownEvent> = None;
    for (i, &r) in returns.values.iter().enumerate() {
        if r < 0.0 {
            let ev = current.get_or_insert(DrawdownEvent {
                start_index: i,
                end_index: i,
                magnitude: 0.0,
                length: 0,
            });
            ev.end_index = i;
            ev.magnitude += -r;
            ev.length += 1;
        } else if let Some(ev) = current.take() {
            events.push(ev);
        }
    }
    events.extend(current);
    events
}

/// Empirical `P(X >= x)` over the sorted distinct values.
pub fn ccdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::InsufficientData("ccdf of an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("ccdf input contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        if out.last().is_none_or(|&(prev, _)| prev != x) {
            out.push((x, (sorted.len() - i) as f64 / n));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// Bin edges, one more than the number of bins.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// `(bin centre, probability density)` pairs.
    pub fn density(&self) -> Vec<(f64, f64)> {
        let total: usize = self.counts.iter().sum();
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let (a, b) = (self.edges[i], self.edges[i + 1]);
                let width = b - a;
                let d = if total == 0 || width <= 0.0 {
                    0.0
                } else {
                    c as f64 / (total as f64 * width)
                };
                (0.5 * (a + b), d)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (divisor `n - 1`).
    pub std: f64,
    /// `m3 / m2^1.5` with central moments about the mean.
    pub skewness: f64,
    /// `m4 / m2^2 - 3`.
    pub excess_kurtosis: f64,
    pub histogram: Histogram,
}

/// Moments and a histogram. `bins = None` picks the Freedman–Diaconis width.
pub fn summarize(values: &[f64], bins: Option<usize>) -> Result<DistributionSummary> {
    let n = values.len();
    if n < 4 {
        return Err(Error::InsufficientData(format!("need at least 4 values, got {n}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("summary input must be finite".into()));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let std = (m2 / (nf - 1.0)).sqrt();
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    Ok(DistributionSummary {
        n,
        mean,
        std,
        skewness,
        excess_kurtosis,
        histogram: histogram(values, bins),
    })
}

const MAX_BINS: usize = 10_000;

fn histogram(values: &[f64], bins: Option<usize>) -> Histogram {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if hi <= lo {
        return Histogram {
            edges: vec![lo - 0.5, lo + 0.5],
            counts: vec![sorted.len()],
        };
    }
    let n_bins = bins.unwrap_or_else(|| {
        let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
        let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
        if width > 0.0 {
            ((hi - lo) / width).ceil() as usize
        } else {
            (sorted.len() as f64).sqrt().ceil() as usize
        }
    });
    let n_bins = n_bins.clamp(1, MAX_BINS);
    let width = (hi - lo) / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0usize; n_bins];
    for &v in &sorted {
        let b = (((v - lo) / width) as usize).min(n_bins - 1);
        counts[b] += 1;
    }
    Histogram { edges, counts }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}
