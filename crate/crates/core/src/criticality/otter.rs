//! Galton–Watson trees for checking the `r^-3/2` tree-size law.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{raw_branching, BranchingEstimate};
use crate::stats::{fit_power_law, FitMethod, FitOptions, PowerLawFit, Xmin};
use crate::{Error, Result};

/// Trees reaching this many nodes are abandoned and left out of the fit.
pub const TREE_SIZE_CAP: u64 = 100_000;

/// Smallest tree size used when fitting the size distribution.
pub const TREE_FIT_XMIN: f64 = 4.0;

/// Mean offspring further than this from 1 raises a drift warning.
pub const DRIFT_TOLERANCE: f64 = 0.05;

/// Offspring law of a collapsing agent in the model: it has in-degree `k`
/// with probability proportional to `k^-gamma` on `[1, k_max]`, and each of
/// its `k` suppliers collapses independently with the clamped branching
/// probability for `k`.
#[derive(Debug, Clone)]
pub struct ModelOffspring {
    pub gamma: f64,
    pub omega: f64,
    pub k0: u32,
    pub k_max: u32,
    cumulative: Vec<f64>,
    branch: Vec<f64>,
}

impl ModelOffspring {
    pub fn new(gamma: f64, omega: f64, k0: u32, k_max: u32) -> Result<Self> {
        if !(gamma > 0.0) || !(omega > 0.0) || k0 == 0 || k_max == 0 {
            return Err(Error::Domain(format!(
                "offspring law needs gamma > 0, omega > 0, k0 >= 1, k_max >= 1 \
                 (gamma={gamma}, omega={omega}, k0={k0}, k_max={k_max})"
            )));
        }
        let mut cumulative = Vec::with_capacity(k_max as usize);
        let mut branch = Vec::with_capacity(k_max as usize);
        let mut acc = 0.0;
        for k in 1..=k_max {
            let kf = f64::from(k);
            acc += kf.powf(-gamma);
            cumulative.push(acc);
            branch.push(raw_branching(kf, omega, gamma, f64::from(k0)));
        }
        Ok(Self {
            gamma,
            omega,
            k0,
            k_max,
            cumulative,
            branch,
        })
    }

    /// Exact mean number of offspring.
    pub fn mean(&self) -> f64 {
        super::normalized_mean(self.gamma, self.omega, f64::from(self.k0), self.k_max)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cumulative.last().expect("k_max >= 1");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1);
        let k = idx as u64 + 1;
        let p = self.branch[idx];
        if p >= 1.0 {
            return k;
        }
        Binomial::new(k, p).expect("p in [0, 1)").sample(rng)
    }
}

#[derive(Debug, Clone)]
pub enum OffspringLaw {
    /// Two children with probability `p_two`, none otherwise. Critical at 1/2.
    Binary { p_two: f64 },
    Model(ModelOffspring),
}

impl OffspringLaw {
    pub fn critical_binary() -> Self {
        OffspringLaw::Binary { p_two: 0.5 }
    }

    pub fn mean(&self) -> f64 {
        match self {
            OffspringLaw::Binary { p_two } => 2.0 * p_two,
            OffspringLaw::Model(m) => m.mean(),
        }
    }

    /// Total offspring of `parents` independent nodes.
    fn generation<R: Rng + ?Sized>(&self, parents: u64, rng: &mut R) -> u64 {
        match self {
            OffspringLaw::Binary { p_two } => {
                2 * Binomial::new(parents, *p_two).expect("p_two in [0, 1]").sample(rng)
            }
            OffspringLaw::Model(m) => (0..parents).map(|_| m.sample(rng)).sum(),
        }
    }

    /// Monte Carlo estimate of the mean offspring from `n` draws.
    pub fn estimate_mean<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> BranchingEstimate {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = self.generation(1, rng) as f64;
            sum += x;
            sum_sq += x * x;
        }
        let nf = n as f64;
        let mean = if n == 0 { 0.0 } else { sum / nf };
        let var = if n > 1 { (sum_sq - nf * mean * mean) / (nf - 1.0) } else { 0.0 };
        BranchingEstimate {
            expected_offspring: mean,
            std_error: (var.max(0.0) / nf.max(1.0)).sqrt(),
            n_trials: n,
        }
    }

    /// Size of one tree grown from a single root, or `None` once it reaches
    /// `cap` nodes.
    pub fn tree_size<R: Rng + ?Sized>(&self, cap: u64, rng: &mut R) -> Option<u64> {
        let mut size = 1u64;
        let mut alive = 1u64;
        while alive > 0 {
            alive = self.generation(alive, rng);
            size += alive;
            if size >= cap {
                return None;
            }
        }
        Some(size)
    }
}

/// Value of `omega` at which the model offspring law has mean exactly 1.
///
/// The mean depends on `omega` only through `c = k0 omega^-gamma` and is
/// nondecreasing in `c`, so the root is found by bisection on `ln c`.
pub fn critical_omega(gamma: f64, k0: u32, k_max: u32) -> Result<f64> {
    if !(gamma > 0.0) || k0 == 0 || k_max < 2 {
        return Err(Error::Domain(format!(
            "need gamma > 0, k0 >= 1, k_max >= 2 (gamma={gamma}, k0={k0}, k_max={k_max})"
        )));
    }
    let weights: Vec<(f64, f64)> = (1..=k_max)
        .map(|k| {
            let kf = f64::from(k);
            (kf, kf.powf(-gamma))
        })
        .collect();
    let norm: f64 = weights.iter().rev().map(|&(_, p)| p).sum();
    let mean = |c: f64| -> f64 {
        weights.iter().rev().map(|&(k, p)| k * p * (c * p).min(1.0)).sum::<f64>() / norm
    };
    // c = k_max^gamma clamps every branching probability to 1.
    let mut hi = gamma * f64::from(k_max).ln();
    if mean(hi.exp()) <= 1.0 {
        return Err(Error::Domain(format!(
            "mean in-degree on [1, {k_max}] does not exceed 1 for gamma={gamma}"
        )));
    }
    let mut lo = -50.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid.exp()) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let c = (0.5 * (lo + hi)).exp();
    Ok((f64::from(k0) / c).powf(1.0 / gamma))
}

#[derive(Debug, Clone)]
pub struct OtterReport {
    /// Fitted PDF exponent of the tree-size distribution.
    pub exponent: f64,
    pub fit: PowerLawFit,
    /// Exact mean offspring of the law used.
    pub mean_offspring: f64,
    /// Set when the mean offspring is more than [`DRIFT_TOLERANCE`] from 1.
    pub drift_warning: bool,
    pub n_trees: usize,
    /// Trees abandoned at [`TREE_SIZE_CAP`].
    pub censored: usize,
}

/// Grows `n_trees` independent trees and fits a power law to their sizes
/// with a maximum-likelihood fit from size [`TREE_FIT_XMIN`].
pub fn otter_check<R: Rng + ?Sized>(
    law: &OffspringLaw,
    n_trees: usize,
    rng: &mut R,
) -> Result<OtterReport> {
    let mean_offspring = law.mean();
    let drift_warning = (mean_offspring - 1.0).abs() > DRIFT_TOLERANCE;
    if drift_warning {
        log::warn!("offspring mean {mean_offspring:.4} is away from critical (1 +/- {DRIFT_TOLERANCE})");
    }
    let mut sizes = Vec::with_capacity(n_trees);
    let mut censored = 0;
    for _ in 0..n_trees {
        match law.tree_size(TREE_SIZE_CAP, rng) {
            Some(r) => sizes.push(r as f64),
            None => censored += 1,
        }
    }
    let fit = fit_power_law(
        &sizes,
        &FitOptions {
            method: FitMethod::Mle,
            xmin: Xmin::Fixed(TREE_FIT_XMIN),
            discrete: false,
        },
    )?;
    Ok(OtterReport {
        exponent: fit.exponent,
        fit,
        mean_offspring,
        drift_warning,
        n_trees,
        censored,
    })
}
