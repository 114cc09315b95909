//! Power-law fits to heavy-tailed samples.
//!
//! Every exponent reported here is a PDF exponent `m` in `p(x) ~ x^-m`. The
//! CCDF of such a sample falls as `x^-(m-1)`; the raw CCDF slope is kept
//! alongside so the two conventions cannot be confused.

use std::fmt;
use std::str::FromStr;

use super::ccdf;
use crate::{Error, Result};

/// Fewest points at or above `xmin` accepted by [`fit_power_law`].
pub const MIN_FIT_POINTS: usize = 30;

/// Upper bound on xmin candidates scanned by the automatic search.
const MAX_XMIN_CANDIDATES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMethod {
    /// Least squares of `ln P(X >= x)` on `ln x`.
    #[default]
    CcdfRegression,
    /// Hill-type maximum likelihood.
    Mle,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::CcdfRegression => "ccdf",
            FitMethod::Mle => "mle",
        })
    }
}

impl FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ccdf" | "ccdf-regression" | "regression" => Ok(FitMethod::CcdfRegression),
            "mle" => Ok(FitMethod::Mle),
            other => Err(Error::InvalidConfiguration(format!(
                "unknown fit method `{other}` (expected ccdf or mle)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Xmin {
    /// Pick the cutoff minimising the Kolmogorov–Smirnov distance.
    #[default]
    Auto,
    Fixed(f64),
}

impl fmt::Display for Xmin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Xmin::Auto => f.write_str("auto"),
            Xmin::Fixed(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Xmin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Xmin::Auto);
        }
        match s.parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(Xmin::Fixed(x)),
            _ => Err(Error::InvalidConfiguration(format!(
                "xmin must be `auto` or a positive number, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub method: FitMethod,
    pub xmin: Xmin,
    /// Treat values as integers: the likelihood uses `xmin - 1/2` as scale.
    pub discrete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Goodness {
    RSquared(f64),
    LogLikelihood(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// PDF exponent `m`.
    pub exponent: f64,
    /// Slope of `ln P(X >= x)` against `ln x`: fitted directly by the
    /// regression, `-(m - 1)` for the likelihood fit.
    pub ccdf_slope: f64,
    pub method: FitMethod,
    pub xmin: f64,
    pub goodness: Goodness,
    /// Sample points at or above `xmin`.
    pub n_points: usize,
    /// Kolmogorov–Smirnov distance between the tail and the fitted law.
    pub ks_distance: Option<f64>,
}

/// Fits a power law to the values at or above `xmin`.
pub fn fit_power_law(values: &[f64], options: &FitOptions) -> Result<PowerLawFit> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("power-law fit needs finite values".into()));
    }
    if values.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_FIT_POINTS} values, got {}",
            values.len()
        )));
    }
    if values.iter().all(|&v| v == values[0]) {
        return Err(Error::NoVariance);
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let xmin = match options.xmin {
        Xmin::Fixed(x) if x > 0.0 && x.is_finite() => x,
        Xmin::Fixed(x) => {
            return Err(Error::Domain(format!("xmin must be positive, got {x}")));
        }
        Xmin::Auto => select_xmin(&sorted, options.discrete)?,
    };
    let tail = &sorted[sorted.partition_point(|&v| v < xmin)..];
    if tail.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_FIT_POINTS} values >= xmin = {xmin}, got {}",
            tail.len()
        )));
    }
    if tail.iter().all(|&v| v == tail[0]) {
        return Err(Error::NoVariance);
    }

    let scale = likelihood_scale(xmin, options.discrete);
    let fit = match options.method {
        FitMethod::Mle => {
            let log_sum: f64 = tail.iter().map(|&x| (x / scale).ln()).sum();
            let n = tail.len() as f64;
            let m = 1.0 + n / log_sum;
            let loglik = n * (m - 1.0).ln() - n * scale.ln() - m * log_sum;
            PowerLawFit {
                exponent: m,
                ccdf_slope: -(m - 1.0),
                method: FitMethod::Mle,
                xmin,
                goodness: Goodness::LogLikelihood(loglik),
                n_points: tail.len(),
                ks_distance: None,
            }
        }
        FitMethod::CcdfRegression => {
            let points = ccdf(tail)?;
            let (slope, r2) = log_log_regression(&points)?;
            PowerLawFit {
                exponent: 1.0 - slope,
                ccdf_slope: slope,
                method: FitMethod::CcdfRegression,
                xmin,
                goodness: Goodness::RSquared(r2),
                n_points: tail.len(),
                ks_distance: None,
            }
        }
    };
    Ok(PowerLawFit {
        ks_distance: Some(ks_distance(tail, fit.exponent, scale)),
        ..fit
    })
}

/// Regression on CCDF points supplied directly, e.g. an exact curve.
pub fn fit_ccdf_points(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 CCDF points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, p)| !(x > 0.0 && p > 0.0 && x.is_finite() && p.is_finite())) {
        return Err(Error::Domain("CCDF points must be positive and finite".into()));
    }
    let (slope, r2) = log_log_regression(points)?;
    let xmin = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    Ok(PowerLawFit {
        exponent: 1.0 - slope,
        ccdf_slope: slope,
        method: FitMethod::CcdfRegression,
        xmin,
        goodness: Goodness::RSquared(r2),
        n_points: points.len(),
        ks_distance: None,
    })
}

fn likelihood_scale(xmin: f64, discrete: bool) -> f64 {
    if discrete {
        xmin - 0.5
    } else {
        xmin
    }
}

/// Least-squares slope and R² of `ln y` on `ln x`.
fn log_log_regression(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::NoVariance);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::NoVariance);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        let residual: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let e = y - (my + slope * (x - mx));
                e * e
            })
            .sum();
        (1.0 - residual / syy).clamp(0.0, 1.0)
    };
    Ok((slope, r2))
}

/// KS distance between sorted tail data and `P(X >= x) = (x/scale)^(1-m)`.
fn ks_distance(tail: &[f64], m: f64, scale: f64) -> f64 {
    let n = tail.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < tail.len() {
        let x = tail[i];
        let mut j = i;
        while j < tail.len() && tail[j] == x {
            j += 1;
        }
        let model = 1.0 - (x / scale).powf(1.0 - m);
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d.max((model - below).abs()).max((upto - model).abs());
        i = j;
    }
    d
}

/// Cutoff with the smallest KS distance among distinct values that leave at
/// least [`MIN_FIT_POINTS`] points in the tail.
fn select_xmin(sorted: &[f64], discrete: bool) -> Result<f64> {
    let positive_start = sorted.partition_point(|&v| v <= 0.0);
    let last_start = sorted.len().saturating_sub(MIN_FIT_POINTS);
    let mut starts: Vec<usize> = Vec::new();
    let mut i = positive_start;
    while i <= last_start {
        starts.push(i);
        let x = sorted[i];
        i += sorted[i..].partition_point(|&v| v == x);
    }
    if starts.is_empty() {
        return Err(Error::InsufficientData(format!(
            "fewer than {MIN_FIT_POINTS} positive values for xmin search"
        )));
    }
    if starts.len() > MAX_XMIN_CANDIDATES {
        let step = starts.len() as f64 / MAX_XMIN_CANDIDATES as f64;
        starts = (0..MAX_XMIN_CANDIDATES).map(|k| starts[(k as f64 * step) as usize]).collect();
    }

    // suffix sums of ln x make each candidate's estimate O(1)
    let mut suffix_ln = vec![0.0; sorted.len() + 1];
    for k in (0..sorted.len()).rev() {
        suffix_ln[k] = suffix_ln[k + 1] + sorted[k].max(f64::MIN_POSITIVE).ln();
    }
    let mut best: Option<(f64, f64)> = None;
    for start in starts {
        let tail = &sorted[start..];
        if tail.iter().all(|&v| v == tail[0]) {
            continue;
        }
        let xmin = tail[0];
        let scale = likelihood_scale(xmin, discrete);
        let n = tail.len() as f64;
        let log_sum = suffix_ln[start] - n * scale.ln();
        if log_sum <= 0.0 {
            continue;
        }
        let m = 1.0 + n / log_sum;
        let d = ks_distance(tail, m, scale);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, xmin));
        }
    }
    best.map(|(_, x)| x).ok_or(Error::NoVariance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Inverse-CDF draws from a Pareto law with PDF exponent `m`.
    fn pareto(n: usize, m: f64, xmin: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                xmin * u.powf(-1.0 / (m - 1.0))
            })
            .collect()
    }

    fn opts(method: FitMethod, xmin: Xmin) -> FitOptions {
        FitOptions {
            method,
            xmin,
            discrete: false,
        }
    }

    #[test]
    fn pareto_recovered_by_both_methods() {
        let xs = pareto(100_000, 2.5, 1.0, 1);
        let mle = fit_power_law(&xs, &opts(FitMethod::Mle, Xmin::Fixed(1.0))).unwrap();
        assert!((mle.exponent - 2.5).abs() <= 0.05, "{}", mle.exponent);
        assert!((2.45..=2.55).contains(&mle.exponent));
        assert_eq!(mle.ccdf_slope, -(mle.exponent - 1.0));
        let reg = fit_power_law(&xs, &opts(FitMethod::CcdfRegression, Xmin::Fixed(1.0))).unwrap();
        assert!((reg.exponent - 2.5).abs() <= 0.1, "{}", reg.exponent);
        assert!((reg.exponent - mle.exponent).abs() <= 0.1);
        match reg.goodness {
            Goodness::RSquared(r2) => assert!(r2 > 0.95),
            other => panic!("{other:?}"),
        }
        assert_eq!(reg.n_points, 100_000);
    }

    #[test]
    fn auto_xmin_finds_the_tail_of_a_mixture() {
        // uniform bulk on [0, 3) under a Pareto tail from 3
        let mut xs = pareto(20_000, 2.5, 3.0, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        xs.extend((0..20_000).map(|_| 3.0 * rng.random::<f64>()));
        let fit = fit_power_law(&xs, &opts(FitMethod::Mle, Xmin::Auto)).unwrap();
        // the cutoff lands in the pure tail, not inside the uniform bulk
        assert!((2.9..6.0).contains(&fit.xmin), "xmin {}", fit.xmin);
        assert!((fit.exponent - 2.5).abs() < 0.1, "{}", fit.exponent);
    }

    #[test]
    fn exact_ccdf_points_are_fitted_exactly() {
        let points: Vec<(f64, f64)> =
            (1..=50).map(|k| (f64::from(k), f64::from(k).powf(-1.5))).collect();
        let fit = fit_ccdf_points(&points).unwrap();
        assert!((fit.ccdf_slope + 1.5).abs() < 1e-6);
        assert!((fit.exponent - 2.5).abs() < 1e-6);
        match fit.goodness {
            Goodness::RSquared(r2) => assert!((r2 - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn discrete_mle_on_zeta_like_sample() {
        // integer parts of a continuous Pareto shifted by 1/2 behave close to
        // a discrete power law with the same exponent
        let xs: Vec<f64> = pareto(100_000, 2.5, 9.5, 4).iter().map(|x| (x + 0.5).floor()).collect();
        let fit = fit_power_law(
            &xs,
            &FitOptions {
                method: FitMethod::Mle,
                xmin: Xmin::Fixed(10.0),
                discrete: true,
            },
        )
        .unwrap();
        assert!((fit.exponent - 2.5).abs() < 0.05, "{}", fit.exponent);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            fit_power_law(&[1.0, 2.0, 3.0], &FitOptions::default()),
            Err(Error::InsufficientData(_))
        ));
        assert_eq!(fit_power_law(&[4.0; 50], &FitOptions::default()), Err(Error::NoVariance));
        let xs = pareto(100, 2.5, 1.0, 5);
        assert!(matches!(
            fit_power_law(&xs, &opts(FitMethod::Mle, Xmin::Fixed(1e9))),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn option_parsing() {
        assert_eq!("mle".parse::<FitMethod>().unwrap(), FitMethod::Mle);
        assert_eq!("ccdf".parse::<FitMethod>().unwrap(), FitMethod::CcdfRegression);
        assert!("ols".parse::<FitMethod>().is_err());
        assert_eq!("auto".parse::<Xmin>().unwrap(), Xmin::Auto);
        assert_eq!("2.5".parse::<Xmin>().unwrap(), Xmin::Fixed(2.5));
        assert!("-1".parse::<Xmin>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn mle_is_scale_equivariant(seed in any::<u64>(), c in 0.01f64..100.0) {
            let xs = pareto(500, 2.2, 1.0, seed);
            let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
            let a = fit_power_law(&xs, &opts(FitMethod::Mle, Xmin::Fixed(1.5))).unwrap();
            let b = fit_power_law(&scaled, &opts(FitMethod::Mle, Xmin::Fixed(1.5 * c))).unwrap();
            prop_assert!((a.exponent - b.exponent).abs() < 1e-9);
            prop_assert_eq!(a.n_points, b.n_points);
        }
    }
}
