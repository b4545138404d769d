//! Single-call assembly of the full analytic metric set for one
//! configuration, optionally paired with Monte Carlo estimates of the same
//! quantities for cross-validation.

use crate::detection::{ber_report, BerMethod, BerReport};
use crate::energy::ecsr;
use crate::error::Result;
use crate::infometrics::{info_report, InfoReport};
use crate::montecarlo::{simulate_ecsr, simulate_link, simulate_mi, McEstimate, McOptions};
use crate::sysmodel::SystemConfig;

/// Monte Carlo companions to the analytic metrics. Each estimator runs on
/// its own seed derived from the base seed, so the three are independent.
#[derive(Debug, Clone, PartialEq)]
pub struct McValidation {
    /// Empirical energy-constraint success rate.
    pub ecsr: McEstimate,
    /// Empirical BER of the full chain after majority voting.
    pub ber_combined: McEstimate,
    /// Empirical pre-approximation mutual information, nats per sample.
    pub mi_per_sample: McEstimate,
}

/// Sizing for the Monte Carlo companion run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McRunSpec {
    /// Trials for the rate and information estimators.
    pub trials: u64,
    /// Transmitted bits for the link estimator.
    pub bits: u64,
    pub seed: u64,
    pub options: McOptions,
}

impl Default for McRunSpec {
    fn default() -> Self {
        McRunSpec {
            trials: 100_000,
            bits: 200_000,
            seed: 1,
            options: McOptions::default(),
        }
    }
}

/// Every performance metric for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceReport {
    /// Energy-constraint success rate, also the beamforming probability.
    pub ecsr: f64,
    /// Detection threshold in W (sum-energy convention over the M samples).
    pub threshold: f64,
    pub ber: BerReport,
    pub info: InfoReport,
    /// Present when a Monte Carlo companion run was requested.
    pub mc: Option<McValidation>,
}

/// Computes the analytic pipeline: energy success, link moments, default
/// threshold, the selected BER route with majority voting, and the
/// information metrics.
pub fn performance_report(cfg: &SystemConfig, method: BerMethod) -> Result<PerformanceReport> {
    let beamforming = ecsr(cfg)?;
    let ber = ber_report(cfg, method, None, None)?;
    let info = info_report(cfg)?;
    Ok(PerformanceReport {
        ecsr: beamforming,
        threshold: ber.threshold_used,
        ber,
        info,
        mc: None,
    })
}

/// As [`performance_report`], plus Monte Carlo estimates of the success
/// rate, the voted BER at the same threshold, and the mutual information.
pub fn performance_report_with_mc(
    cfg: &SystemConfig,
    method: BerMethod,
    run: &McRunSpec,
) -> Result<PerformanceReport> {
    let mut report = performance_report(cfg, method)?;
    report.mc = Some(McValidation {
        ecsr: simulate_ecsr(cfg, run.trials, run.seed)?,
        ber_combined: simulate_link(
            cfg,
            report.ecsr,
            report.threshold,
            run.bits,
            run.seed.wrapping_add(1),
            run.options,
        )?,
        mi_per_sample: simulate_mi(cfg, report.ecsr, run.trials, run.seed.wrapping_add(2))?,
    });
    Ok(report)
}
