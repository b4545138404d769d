//! Moments of the composite link gains: the desired squared envelope 𝒟 and
//! the per-interferer aggregate variances, plus the MGFs the error-rate
//! integrals consume.
//!
//! The desired gain decomposes as 𝒟 = 𝒟_R² + 𝒟_I² where the real part sums
//! the phase-aligned direct envelope, the beamforming elements' in-phase
//! residuals A_i, and the blind elements' real products; the imaginary part
//! sums the quadrature residuals B_i and blind imaginary products. Element
//! states are Bernoulli(P_s) with P_s supplied by the caller (the ECSR),
//! compounded binomially into the sums below.

use crate::error::{Error, Result};
use crate::specfun::laguerre_half_moments;
use crate::sysmodel::SystemConfig;

/// Per-element phase-residual moments for a beamforming element:
/// A = |h||g| cos φ, B = |h||g| sin φ with φ uniform on (−π/Q, π/Q)
/// and unit-power Rayleigh factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseStats {
    /// E[A] (E[B] = 0 by symmetry).
    pub mean_inphase: f64,
    /// V[A]
    pub var_inphase: f64,
    /// V[B]
    pub var_quadrature: f64,
}

impl PhaseStats {
    /// Moments under Q-level phase quantization.
    pub fn quantized(levels: u32) -> Self {
        debug_assert!(levels >= 2);
        let q = levels as f64;
        let pi = std::f64::consts::PI;
        let mean = q * (pi / q).sin() / 4.0;
        let cos2 = q * (2.0 * pi / q).sin() / (4.0 * pi);
        PhaseStats {
            mean_inphase: mean,
            var_inphase: 0.5 + cos2 - mean * mean,
            var_quadrature: 0.5 - cos2,
        }
    }

    /// Q → ∞ limit: perfect continuous phase alignment.
    pub fn ideal() -> Self {
        let pi = std::f64::consts::PI;
        PhaseStats {
            mean_inphase: pi / 4.0,
            var_inphase: 1.0 - pi * pi / 16.0,
            var_quadrature: 0.0,
        }
    }
}

/// First two moments of the desired gain 𝒟, with the component moments
/// exposed for white-box checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredLinkMoments {
    /// μ_𝒟 = V[𝒟_R] + V[𝒟_I] + E²[𝒟_R]
    pub mean: f64,
    /// σ²_𝒟 = 2V[𝒟_R](V[𝒟_R] + 2E²[𝒟_R]) + 2V²[𝒟_I]
    pub variance: f64,
    /// The beamforming probability P_s the moments were built with.
    pub ecsr_used: f64,
    /// E[𝒟_R]
    pub mean_real: f64,
    /// V[𝒟_R]
    pub var_real: f64,
    /// V[𝒟_I]
    pub var_imag: f64,
}

impl DesiredLinkMoments {
    /// Gamma shape μ²/σ² of the matched law for 𝒟.
    pub fn gamma_shape(&self) -> f64 {
        self.mean * self.mean / self.variance
    }

    /// Gamma scale σ²/μ of the matched law for 𝒟.
    pub fn gamma_scale(&self) -> f64 {
        self.variance / self.mean
    }
}

/// Desired-gain moments for the configured geometry and quantizer.
pub fn desired_moments(cfg: &SystemConfig, ecsr: f64) -> DesiredLinkMoments {
    desired_moments_with(
        &PhaseStats::quantized(cfg.ris.quantization_levels()),
        cfg.geometry.loss_direct(),
        cfg.geometry.loss_cascade(),
        cfg.ris.reflect_elements(),
        cfg.geometry.direct_link_mean,
        ecsr,
    )
}

/// Moment pipeline from explicit parts; the building block behind
/// [`desired_moments`] and the ideal-phase variants used in range studies.
pub fn desired_moments_with(
    phase: &PhaseStats,
    loss_direct: f64,
    loss_cascade: f64,
    reflect_elements: u32,
    direct_mean: f64,
    ecsr: f64,
) -> DesiredLinkMoments {
    debug_assert!((0.0..=1.0).contains(&ecsr));
    let n2 = reflect_elements as f64;
    let ps = ecsr;

    // beamforming sum G1 over Binomial(N2, P_s) elements
    let mean_beam = n2 * ps * phase.mean_inphase;
    let var_beam =
        n2 * ps * phase.var_inphase + n2 * ps * (1.0 - ps) * phase.mean_inphase.powi(2);
    // blind sums contribute variance (1−P_s)/4 per element and quadrature
    let var_blind = n2 * (1.0 - ps) / 4.0;
    let var_quad_beam = n2 * ps * phase.var_quadrature;

    // direct-link Rician envelope, unit scatter power
    let (direct_env_mean, direct_env_var) = laguerre_half_moments(direct_mean * direct_mean);

    let mean_real = loss_direct * direct_env_mean + loss_cascade * mean_beam;
    let var_real = loss_direct * loss_direct * direct_env_var
        + loss_cascade * loss_cascade * (var_beam + var_blind);
    let var_imag = loss_cascade * loss_cascade * (var_quad_beam + var_blind);

    let mean = var_real + var_imag + mean_real * mean_real;
    let variance = 2.0 * var_real * (var_real + 2.0 * mean_real * mean_real)
        + 2.0 * var_imag * var_imag;
    DesiredLinkMoments { mean, variance, ecsr_used: ecsr, mean_real, var_real, var_imag }
}

/// Variance of each interferer's composite channel 𝓕_k.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceLinkStats {
    /// σ²_{𝓕_k} = (𝓛_D⁽ᵏ⁾)² + (𝓛_B⁽ᵏ⁾)²·N2
    pub per_interferer_variance: Vec<f64>,
}

/// Interference channel variances. The reflected phases are independent of
/// the desired-signal alignment, so the beamforming probability never enters.
pub fn interference_stats(cfg: &SystemConfig) -> InterferenceLinkStats {
    let n2 = cfg.ris.reflect_elements() as f64;
    let per_interferer_variance = (0..cfg.geometry.interferer_count())
        .map(|k| {
            let direct = cfg.geometry.loss_interferer_direct(k);
            let cascade = cfg.geometry.loss_interferer_cascade(k);
            direct * direct + cascade * cascade * n2
        })
        .collect();
    InterferenceLinkStats { per_interferer_variance }
}

/// Aggregate received noise-plus-interference power
/// A = Σ_k P_k σ²_{𝓕_k} + N0.
pub fn aggregate_noise(cfg: &SystemConfig, stats: &InterferenceLinkStats) -> f64 {
    cfg.interferer_powers
        .iter()
        .zip(&stats.per_interferer_variance)
        .map(|(&p, &v)| p * v)
        .sum::<f64>()
        + cfg.noise_floor
}

/// MGF of the desired term under the gamma-matched law for 𝒟:
/// (1 + σ²_χ·s·σ²_𝒟 / (γ_th·μ_𝒟))^{−μ²_𝒟/σ²_𝒟}.
pub fn mgf_desired(
    moments: &DesiredLinkMoments,
    bit_variance: f64,
    s: f64,
    threshold: f64,
) -> Result<f64> {
    if s < 0.0 || threshold <= 0.0 {
        return Err(Error::domain(format!(
            "MGF needs s >= 0 and a positive threshold, got s={s}, threshold={threshold}"
        )));
    }
    let drive = bit_variance * s / threshold;
    if moments.variance == 0.0 {
        return Ok((-drive * moments.mean).exp()); // degenerate deterministic 𝒟
    }
    let shape = moments.mean * moments.mean / moments.variance;
    let arg = drive * moments.variance / moments.mean;
    Ok((-shape * arg.ln_1p()).exp())
}

/// MGF of interferer k's received-power term, exponential law:
/// 1 / (1 + s·P_k·σ²_{𝓕_k}/γ_th).
pub fn mgf_interference(
    stats: &InterferenceLinkStats,
    k: usize,
    s: f64,
    threshold: f64,
    power: f64,
) -> Result<f64> {
    if s < 0.0 || threshold <= 0.0 {
        return Err(Error::domain(format!(
            "MGF needs s >= 0 and a positive threshold, got s={s}, threshold={threshold}"
        )));
    }
    Ok(1.0 / (1.0 + s * power * stats.per_interferer_variance[k] / threshold))
}
