//! Mutual information of the noise-keyed channel under the second-order
//! Taylor (Gaussian) approximation, the derived energy efficiency, and their
//! high-interference asymptotes.

use crate::energy::ecsr;
use crate::error::{Error, Result};
use crate::linkstats::{
    aggregate_noise, desired_moments, interference_stats, DesiredLinkMoments,
    InterferenceLinkStats,
};
use crate::montecarlo::{simulate_mi, McEstimate};
use crate::sysmodel::SystemConfig;

/// Information and efficiency metrics for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoReport {
    /// Per-sample mutual information in nats, clamped at zero.
    pub mi_per_sample: f64,
    /// The unclamped Taylor value; going negative flags approximation
    /// breakdown under strong interference.
    pub mi_per_sample_raw: f64,
    /// Per-symbol mutual information, M times the per-sample value.
    pub mi_per_symbol: f64,
    /// Energy efficiency in bits per joule.
    pub ee_bits_per_joule: f64,
    /// Net consumed power P_Tx + P_Rx in watts.
    pub total_power: f64,
    /// Aggregate interference-plus-noise power at the receiver, W.
    pub aggregate_noise: f64,
}

/// Σ (P_k σ²_{F_k})², the variance contribution of the interference powers.
fn interference_power_square_sum(cfg: &SystemConfig, istats: &InterferenceLinkStats) -> f64 {
    cfg.interferer_powers
        .iter()
        .zip(&istats.per_interferer_variance)
        .map(|(&power, &variance)| (power * variance).powi(2))
        .sum()
}

/// Per-sample mutual information in nats, second-order Taylor form, without
/// the nonnegativity clamp.
///
/// The marginal entropy averages the bit-0 and bit-1 Gaussian entropies with
/// E[ln X] ≈ ln E[X] − V[X]/(2E²[X]); the conditional entropy keeps only the
/// interference-plus-noise uncertainty. Their difference is
///   ½ ln[(1 + σ₀²μ/𝒜)(1 + σ₁²μ/𝒜)] + Σ(P_kσ²_F)²/(2𝒜²)
///   − [(σ₀²)²σ²_𝒟 + Σ(P_kσ²_F)²]/(4(σ₀²μ + 𝒜)²)
///   − [(σ₁²)²σ²_𝒟 + Σ(P_kσ²_F)²]/(4(σ₁²μ + 𝒜)²).
pub fn mutual_information_raw(
    cfg: &SystemConfig,
    moments: &DesiredLinkMoments,
    istats: &InterferenceLinkStats,
) -> f64 {
    let noise_total = aggregate_noise(cfg, istats);
    let square_sum = interference_power_square_sum(cfg, istats);
    let sigma0 = cfg.sigma0_sq();
    let sigma1 = cfg.sigma1_sq();
    let log_gain = 0.5
        * ((1.0 + sigma0 * moments.mean / noise_total)
            * (1.0 + sigma1 * moments.mean / noise_total))
            .ln();
    let conditional_correction = square_sum / (2.0 * noise_total * noise_total);
    let marginal_correction = |sigma_sq: f64| {
        let denom = sigma_sq * moments.mean + noise_total;
        (sigma_sq * sigma_sq * moments.variance + square_sum) / (4.0 * denom * denom)
    };
    log_gain + conditional_correction - marginal_correction(sigma0) - marginal_correction(sigma1)
}

/// Per-sample mutual information in nats, clamped at zero.
///
/// The Taylor form can dip slightly negative when its correction terms
/// dominate; information is nonnegative by definition and the asymptote is
/// exactly zero, so the clamp is the physical reading.
pub fn mutual_information(
    cfg: &SystemConfig,
    moments: &DesiredLinkMoments,
    istats: &InterferenceLinkStats,
) -> f64 {
    mutual_information_raw(cfg, moments, istats).max(0.0)
}

/// Net consumed power P_Tx + P_Rx in watts. The surface is excluded: it runs
/// on harvested energy.
pub fn total_power(cfg: &SystemConfig) -> f64 {
    cfg.tx_power + cfg.rx_power
}

/// Net power of the conventional baseline, which must transmit the keyed
/// noise actively: P_Tx = (σ₀² + σ₁²)/2 replaces the switch-controller draw.
pub fn conventional_total_power(cfg: &SystemConfig) -> f64 {
    0.5 * (cfg.sigma0_sq() + cfg.sigma1_sq()) + cfg.rx_power
}

/// Energy efficiency in bits per joule for a given consumed power.
pub fn energy_efficiency_with_power(total_power: f64, mi_per_sample: f64) -> Result<f64> {
    if !total_power.is_finite() || total_power <= 0.0 {
        return Err(Error::Domain(format!(
            "total power must be positive, got {total_power}"
        )));
    }
    Ok(mi_per_sample / (std::f64::consts::LN_2 * total_power))
}

/// Energy efficiency in bits per joule: EE = I / (ln 2 · (P_Tx + P_Rx)).
pub fn energy_efficiency(cfg: &SystemConfig, mi_per_sample: f64) -> Result<f64> {
    energy_efficiency_with_power(total_power(cfg), mi_per_sample)
}

/// High-interference limits of (mutual information, energy efficiency).
/// Both vanish: the log terms are dominated by the interference power.
pub fn info_asymptotics() -> (f64, f64) {
    (0.0, 0.0)
}

/// Monte Carlo estimate of the pre-approximation mutual information: the
/// sampled average of ½ ln[(σ₀²𝒟 + 𝓑)(σ₁²𝒟 + 𝓑)/𝓑²] over physical channel
/// draws, with the beamforming probability taken from the energy-success
/// closed form. Bounds the Taylor approximation error of
/// [`mutual_information`].
pub fn mc_entropy_oracle(cfg: &SystemConfig, trials: u64, seed: u64) -> Result<McEstimate> {
    let beamforming = ecsr(cfg)?;
    simulate_mi(cfg, beamforming, trials, seed)
}

/// Assembles the information metrics for a configuration: beamforming
/// probability, desired-link moments, interference statistics, then the
/// Taylor mutual information and the efficiency it buys.
pub fn info_report(cfg: &SystemConfig) -> Result<InfoReport> {
    let beamforming = ecsr(cfg)?;
    let moments = desired_moments(cfg, beamforming);
    let istats = interference_stats(cfg);
    let raw = mutual_information_raw(cfg, &moments, &istats);
    let clamped = raw.max(0.0);
    let consumed = total_power(cfg);
    Ok(InfoReport {
        mi_per_sample: clamped,
        mi_per_sample_raw: raw,
        mi_per_symbol: cfg.samples_per_symbol as f64 * clamped,
        ee_bits_per_joule: energy_efficiency_with_power(consumed, clamped)?,
        total_power: consumed,
        aggregate_noise: aggregate_noise(cfg, &istats),
    })
}
