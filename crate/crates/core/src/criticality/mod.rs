//! Analytic side of the critical state: zeta function, the critical
//! threshold, branching probabilities and the predicted avalanche exponent.

mod otter;

pub use otter::{
    critical_omega, otter_check, ModelOffspring, OffspringLaw, OtterReport, DRIFT_TOLERANCE,
    TREE_FIT_XMIN, TREE_SIZE_CAP,
};

use crate::{Error, Result};

/// Absolute accuracy targeted by [`zeta`].
pub const ZETA_TOLERANCE: f64 = 1e-12;

/// Largest tail mass tolerated by [`expected_offspring`].
pub const TRUNCATION_TOLERANCE: f64 = 1e-9;

/// Riemann zeta function for real `s > 1`.
///
/// Sums the first `n` terms directly (smallest first) and adds the tail as
/// the integral of `x^-s` from `n + 1/2`. The midpoint tail overshoots the
/// true tail by about `s n^(-s-1) / 24`; `n` is chosen to keep that below a
/// tenth of [`ZETA_TOLERANCE`].
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("zeta needs s > 1, got {s}")));
    }
    let bound = ZETA_TOLERANCE / 10.0;
    let n = (s / (24.0 * bound)).powf(1.0 / (s + 1.0)).ceil();
    let n = if n.is_finite() { n.clamp(16.0, 4e6) as u64 } else { 16 };
    let partial: f64 = (1..=n).rev().map(|k| (k as f64).powf(-s)).sum();
    let tail = (n as f64 + 0.5).powf(1.0 - s) / (s - 1.0);
    Ok(partial + tail)
}

/// Degree-ratio form of the threshold: `(1 + d_th) / (1 - d_th)`.
pub fn omega(d_th: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&d_th) {
        return Err(Error::Domain(format!("d_th must lie in [0, 1), got {d_th}")));
    }
    Ok((1.0 + d_th) / (1.0 - d_th))
}

/// Inverse of [`omega`].
pub fn d_th_from_omega(omega: f64) -> Result<f64> {
    if !(omega >= 1.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite and >= 1, got {omega}")));
    }
    Ok((omega - 1.0) / (omega + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalSolution {
    pub gamma: f64,
    pub k0: u32,
    pub omega: f64,
    pub d_th: f64,
    /// `zeta(gamma + 1)`.
    pub zeta: f64,
}

/// Threshold at which one collapse is expected to cause exactly one more:
/// `omega^2 = k0^2 zeta(gamma + 1)`.
pub fn critical_threshold(gamma: f64, k0: u32) -> Result<CriticalSolution> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
    }
    if k0 == 0 {
        return Err(Error::Domain("k0 must be >= 1".into()));
    }
    let z = zeta(gamma + 1.0)?;
    let omega = f64::from(k0) * z.sqrt();
    let d_th = d_th_from_omega(omega)?;
    Ok(CriticalSolution {
        gamma,
        k0,
        omega,
        d_th,
        zeta: z,
    })
}

/// Chance that a neighbour with in-degree `k_in` collapses in turn,
/// `min(1, k0 (omega k_in)^-gamma)`.
pub fn branching_probability(k_in: u32, omega: f64, gamma: f64, k0: u32) -> Result<f64> {
    if k_in == 0 {
        return Err(Error::Domain("branching probability needs k_in >= 1".into()));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    Ok(raw_branching(f64::from(k_in), omega, gamma, f64::from(k0)))
}

fn raw_branching(k: f64, omega: f64, gamma: f64, k0: f64) -> f64 {
    (k0 * (omega * k).powf(-gamma)).clamp(0.0, 1.0)
}

/// Which form of the mean-offspring condition to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffspringCondition {
    /// `(k0/omega)^2 sum k^-(gamma+1)`: equals 1 exactly where
    /// `omega^2 = k0^2 zeta(gamma + 1)`.
    Literal,
    /// `(k0/omega)^2 sum k^-gamma`, the same condition with the exponent not
    /// shifted. Kept to document how far it sits from the zeta form.
    Unshifted,
    /// `sum k P(k) P_br(k)` with `P(k)` proportional to `k^-gamma` and
    /// normalised over `[1, k_max]`, `P_br` clamped. This is the mean of the
    /// offspring law used by the Monte Carlo trees.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchingEstimate {
    pub expected_offspring: f64,
    /// Truncation bound for deterministic sums, standard error of the mean
    /// for Monte Carlo estimates.
    pub std_error: f64,
    /// Number of sampled collapses; 0 for a deterministic sum.
    pub n_trials: u64,
}

/// Expected number of collapses induced by one collapse, summed over
/// degrees `1..=k_max`.
///
/// Fails with [`Error::Truncation`] when the tail of the series that the
/// chosen condition depends on exceeds [`TRUNCATION_TOLERANCE`].
pub fn expected_offspring(
    solution: &CriticalSolution,
    k_max: u32,
    condition: OffspringCondition,
) -> Result<BranchingEstimate> {
    let CriticalSolution { gamma, k0, omega, .. } = *solution;
    if !(omega > 0.0) || !(gamma > 0.0) || k_max == 0 {
        return Err(Error::Domain(format!(
            "need omega > 0, gamma > 0, k_max >= 1 (omega={omega}, gamma={gamma}, k_max={k_max})"
        )));
    }
    let series_exponent = match condition {
        OffspringCondition::Literal => gamma + 1.0,
        OffspringCondition::Unshifted | OffspringCondition::Normalized => gamma,
    };
    let tail = power_tail(k_max, series_exponent);
    if tail > TRUNCATION_TOLERANCE {
        return Err(Error::Truncation {
            tail,
            tolerance: TRUNCATION_TOLERANCE,
        });
    }
    let k0f = f64::from(k0);
    let scale = (k0f / omega).powi(2);
    let value = match condition {
        OffspringCondition::Literal | OffspringCondition::Unshifted => {
            scale * power_sum(k_max, series_exponent)
        }
        OffspringCondition::Normalized => normalized_mean(gamma, omega, k0f, k_max),
    };
    let std_error = match condition {
        OffspringCondition::Normalized => tail,
        _ => scale * tail,
    };
    Ok(BranchingEstimate {
        expected_offspring: value,
        std_error,
        n_trials: 0,
    })
}

/// Smallest `k_max` whose `k^-exponent` tail is within [`TRUNCATION_TOLERANCE`].
pub fn k_max_for(exponent: f64) -> Result<u32> {
    if !(exponent > 1.0) {
        return Err(Error::Truncation {
            tail: f64::INFINITY,
            tolerance: TRUNCATION_TOLERANCE,
        });
    }
    let k = ((exponent - 1.0) * TRUNCATION_TOLERANCE).powf(-1.0 / (exponent - 1.0)).ceil();
    if k > f64::from(u32::MAX) {
        return Err(Error::Truncation {
            tail: power_tail(u32::MAX, exponent),
            tolerance: TRUNCATION_TOLERANCE,
        });
    }
    Ok((k as u32).max(1))
}

/// Upper bound on `sum_{k > k_max} k^-exponent`.
fn power_tail(k_max: u32, exponent: f64) -> f64 {
    if exponent <= 1.0 {
        return f64::INFINITY;
    }
    f64::from(k_max).powf(1.0 - exponent) / (exponent - 1.0)
}

fn power_sum(k_max: u32, exponent: f64) -> f64 {
    (1..=k_max).rev().map(|k| f64::from(k).powf(-exponent)).sum()
}

pub(crate) fn normalized_mean(gamma: f64, omega: f64, k0: f64, k_max: u32) -> f64 {
    let mut norm = 0.0;
    let mut acc = 0.0;
    for k in (1..=k_max).rev() {
        let kf = f64::from(k);
        let p = kf.powf(-gamma);
        norm += p;
        acc += kf * p * raw_branching(kf, omega, gamma, k0);
    }
    acc / norm
}

/// Avalanche-size PDF exponent implied by a degree exponent: `1.5 gamma - 1`.
pub fn predicted_exponent(gamma: f64) -> f64 {
    1.5 * gamma - 1.0
}
