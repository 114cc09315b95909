use std::fmt;

use critnet_core::criticality::{
    critical_threshold, expected_offspring, k_max_for, omega, predicted_exponent, CriticalSolution,
    OffspringCondition,
};
use critnet_core::export::format_float;
use critnet_core::Error;

use crate::error::Result;

/// Mean offspring within this distance of 1 counts as critical.
pub const CRITICAL_BAND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictReport {
    pub solution: CriticalSolution,
    pub predicted_m: f64,
    /// Supplied threshold, the mean offspring there, and the regime.
    pub classification: Option<(f64, f64, Regime)>,
}

impl PredictReport {
    pub fn to_text(&self) -> String {
        let s = &self.solution;
        let mut out = format!(
            "gamma={}\nk0={}\nzeta_gamma_plus_1={}\nomega_critical={}\nd_th_critical={}\npredicted_m={}\n",
            s.gamma,
            s.k0,
            format_float(s.zeta),
            format_float(s.omega),
            format_float(s.d_th),
            format_float(self.predicted_m),
        );
        if let Some((d_th, mean, regime)) = self.classification {
            out.push_str(&format!(
                "d_th={}\nexpected_offspring={}\nregime={regime}\n",
                format_float(d_th),
                format_float(mean)
            ));
        }
        out
    }
}

/// Critical threshold and exponent for `gamma`, plus the regime of `d_th`
/// when one is given.
///
/// Fails when the predicted size distribution cannot be normalised
/// (`1.5 gamma - 1 <= 1`).
pub fn predict(gamma: f64, k0: u32, d_th: Option<f64>) -> Result<PredictReport> {
    let solution = critical_threshold(gamma, k0)?;
    let predicted_m = predicted_exponent(gamma);
    if !(predicted_m > 1.0) {
        return Err(Error::Domain(format!(
            "gamma = {gamma} predicts avalanche exponent {predicted_m}, which is not normalisable (need gamma > 4/3)"
        ))
        .into());
    }
    let classification = match d_th {
        None => None,
        Some(d) => {
            let at = CriticalSolution {
                omega: omega(d)?,
                d_th: d,
                ..solution
            };
            let k_max = k_max_for(gamma + 1.0)?;
            let mean = expected_offspring(&at, k_max, OffspringCondition::Literal)?.expected_offspring;
            let regime = if (mean - 1.0).abs() <= CRITICAL_BAND {
                Regime::Critical
            } else if mean < 1.0 {
                Regime::Subcritical
            } else {
                Regime::Supercritical
            };
            Some((d, mean, regime))
        }
    };
    Ok(PredictReport {
        solution,
        predicted_m,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::exit;

    #[test]
    fn exponent_for_reference_gamma() {
        let r = predict(2.34, 1, None).unwrap();
        assert!((r.predicted_m - 2.51).abs() < 1e-12);
        assert!(r.classification.is_none());
    }

    #[test]
    fn threshold_for_gamma_three() {
        let r = predict(3.0, 1, None).unwrap();
        let omega = (std::f64::consts::PI.powi(4) / 90.0).sqrt();
        assert!((r.solution.d_th - (omega - 1.0) / (omega + 1.0)).abs() < 1e-12);
        assert!(r.to_text().contains("d_th_critical=1.97748900295"));
    }

    #[test]
    fn small_gamma_is_a_domain_error() {
        let err = predict(0.5, 1, None).unwrap_err();
        assert_eq!(err.exit_code(), exit::CONFIG);
        assert_eq!(predict(0.0, 1, None).unwrap_err().exit_code(), exit::CONFIG);
        assert_eq!(predict(2.0, 1, Some(1.2)).unwrap_err().exit_code(), exit::CONFIG);
    }

    #[test]
    fn regimes_around_the_critical_threshold() {
        let crit = critical_threshold(2.5, 1).unwrap().d_th;
        let regime = |d| predict(2.5, 1, Some(d)).unwrap().classification.unwrap().2;
        assert_eq!(regime(crit), Regime::Critical);
        assert_eq!(regime(crit + 0.01), Regime::Subcritical);
        assert_eq!(regime((crit - 0.01).max(0.0)), Regime::Supercritical);
    }
}
