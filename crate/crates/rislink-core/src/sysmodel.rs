//! Scenario description: noise source, geometry, RIS split, and validated
//! system configuration.
//!
//! Everything downstream computes in SI units (watts, meters, seconds).
//! Powers given in dBm are converted at the config-parsing boundary; a
//! validated `SystemConfig` is immutable and freely shareable across workers.

use crate::energy::EhModel;
use crate::error::{Error, Result};

/// Boltzmann constant, J/K (2019 SI exact value).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// P[W] = 10^{(dBm − 30)/10}
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// P[dBm] = 10 log₁₀(P[W]) + 30
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Amplitude path-loss factor 𝓛 = d^{−a/2}; 𝓛² is the power attenuation.
pub fn path_loss(distance: f64, exponent: f64) -> Result<f64> {
    if distance <= 0.0 {
        return Err(Error::domain(format!(
            "path loss requires a positive distance, got {distance}"
        )));
    }
    Ok(distance.powf(-0.5 * exponent))
}

/// Horizontal-sweep geometry for a transmitter moving at ground level while
/// the reflecting surface sits at height `h` a fixed slant `d2` from the
/// receiver. Returns (χ, d1): the horizontal surface–receiver offset and the
/// resulting transmitter–surface distance.
pub fn range_geometry(d: f64, d2: f64, h: f64) -> Result<(f64, f64)> {
    if d <= 0.0 || h <= 0.0 {
        return Err(Error::domain(format!(
            "range geometry requires positive d and h, got d={d}, h={h}"
        )));
    }
    if h >= d2 {
        return Err(Error::domain(format!(
            "surface height {h} must be below the surface-receiver slant {d2}"
        )));
    }
    let chi = (d2 * d2 - h * h).sqrt();
    let d1 = (h * h + (d - chi) * (d - chi)).sqrt();
    Ok((chi, d1))
}

/// Thermal noise source switched between two resistors to encode bits.
///
/// Bit 0 selects the low resistance, bit 1 the high one, so the transmitted
/// "signal" is nothing but a noise variance change: σ1² = C·σ0².
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSource {
    /// Boltzmann constant κ, J/K. A field rather than the global constant so
    /// normalized-unit studies can set it to 1.
    pub boltzmann: f64,
    /// Source temperature T, K.
    pub temperature: f64,
    /// Bandwidth B, Hz.
    pub bandwidth: f64,
    /// Low resistance R_L, Ω.
    pub low_resistance: f64,
    /// C = R_H / R_L > 1.
    pub resistance_ratio: f64,
}

impl NoiseSource {
    /// Source with a prescribed bit-0 variance, using room temperature and a
    /// 10 MHz bandwidth to back out the implied low resistance.
    pub fn from_variance_bit0(sigma0_sq: f64, resistance_ratio: f64) -> Self {
        let temperature = 290.0;
        let bandwidth = 1.0e7;
        NoiseSource {
            boltzmann: BOLTZMANN,
            temperature,
            bandwidth,
            low_resistance: sigma0_sq / (4.0 * BOLTZMANN * temperature * bandwidth),
            resistance_ratio,
        }
    }

    /// σ0² = 4κT·R_L·B
    pub fn variance_bit0(&self) -> f64 {
        4.0 * self.boltzmann * self.temperature * self.low_resistance * self.bandwidth
    }

    /// σ1² = C·σ0²
    pub fn variance_bit1(&self) -> f64 {
        self.resistance_ratio * self.variance_bit0()
    }
}

/// Node placement and propagation model.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    /// Transmitter–receiver distance d, m.
    pub tx_rx: f64,
    /// Transmitter–surface distance d1, m.
    pub tx_ris: f64,
    /// Surface–receiver distance d2, m.
    pub ris_rx: f64,
    /// Interferer–surface distances d1⁽ᵏ⁾, m.
    pub interferer_ris: Vec<f64>,
    /// Interferer–receiver distances d_D⁽ᵏ⁾, m.
    pub interferer_rx: Vec<f64>,
    /// Path-loss exponent a ≥ 2.
    pub pathloss_exponent: f64,
    /// Surface height H, m; only range sweeps use it.
    pub ris_height: Option<f64>,
    /// Mean μ_d of the direct-link Rician line-of-sight component.
    pub direct_link_mean: f64,
}

impl Geometry {
    pub fn interferer_count(&self) -> usize {
        self.interferer_ris.len()
    }

    /// 𝓛_d: direct transmitter–receiver amplitude loss.
    pub fn loss_direct(&self) -> f64 {
        self.tx_rx.powf(-0.5 * self.pathloss_exponent)
    }

    /// 𝓛_B: cascaded transmitter–surface–receiver amplitude loss.
    pub fn loss_cascade(&self) -> f64 {
        (self.tx_ris * self.ris_rx).powf(-0.5 * self.pathloss_exponent)
    }

    /// 𝓛_D⁽ᵏ⁾: direct interferer-k–receiver amplitude loss.
    pub fn loss_interferer_direct(&self, k: usize) -> f64 {
        self.interferer_rx[k].powf(-0.5 * self.pathloss_exponent)
    }

    /// 𝓛_B⁽ᵏ⁾: cascaded interferer-k–surface–receiver amplitude loss.
    pub fn loss_interferer_cascade(&self, k: usize) -> f64 {
        (self.interferer_ris[k] * self.ris_rx).powf(-0.5 * self.pathloss_exponent)
    }
}

/// Reflecting-surface element budget and per-element electronics.
#[derive(Debug, Clone, PartialEq)]
pub struct RisConfig {
    /// Total element count N.
    pub total_elements: u32,
    /// Elements assigned to energy harvesting, N1.
    pub eh_elements: u32,
    /// Phase-shifter resolution b bits, Q = 2^b levels.
    pub quantization_bits: u32,
    /// Per-element power draw 𝓔, W.
    pub element_power: f64,
    /// Controller power draw 𝓔_con, W.
    pub controller_power: f64,
    /// Slot duration t, s.
    pub slot_duration: f64,
}

impl RisConfig {
    /// N2 = N − N1, the reflecting split.
    pub fn reflect_elements(&self) -> u32 {
        self.total_elements - self.eh_elements
    }

    /// Q = 2^b phase levels.
    pub fn quantization_levels(&self) -> u32 {
        1u32 << self.quantization_bits
    }
}

/// Complete validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub noise_source: NoiseSource,
    pub geometry: Geometry,
    pub ris: RisConfig,
    /// Interferer transmit powers P_k, W; length must match the geometry.
    pub interferer_powers: Vec<f64>,
    /// Receiver noise floor N0, W.
    pub noise_floor: f64,
    /// Energy-detector samples per repetition, M.
    pub samples_per_symbol: u32,
    /// Majority-vote repetitions 𝓡 (odd).
    pub repetitions: u32,
    pub eh_model: EhModel,
    /// Receiver circuit power P_Rx, W.
    pub rx_power: f64,
    /// Transmitter circuit power P_Tx, W.
    pub tx_power: f64,
}

impl SystemConfig {
    /// σ0², W.
    pub fn sigma0_sq(&self) -> f64 {
        self.noise_source.variance_bit0()
    }

    /// σ1², W.
    pub fn sigma1_sq(&self) -> f64 {
        self.noise_source.variance_bit1()
    }

    /// Checks every structural invariant, collecting one message per
    /// violation. A config that validates once validates again unchanged:
    /// all fields are already SI-normalized.
    pub fn validate(self) -> Result<SystemConfig> {
        let mut errors = Vec::new();
        let ns = &self.noise_source;
        if ns.boltzmann <= 0.0 || ns.temperature <= 0.0 || ns.bandwidth <= 0.0 {
            errors.push("noise_source: boltzmann, temperature, bandwidth must be positive".into());
        }
        if ns.low_resistance <= 0.0 {
            errors.push("noise_source.low_resistance: must be positive".into());
        }
        if ns.resistance_ratio <= 1.0 {
            errors.push(format!(
                "noise_source.resistance_ratio: must exceed 1 (bits indistinguishable otherwise), got {}",
                ns.resistance_ratio
            ));
        }

        let g = &self.geometry;
        for (name, value) in [("tx_rx", g.tx_rx), ("tx_ris", g.tx_ris), ("ris_rx", g.ris_rx)] {
            if value <= 0.0 {
                errors.push(format!("geometry.{name}: distance must be positive, got {value}"));
            }
        }
        if g.interferer_ris.len() != g.interferer_rx.len() {
            errors.push(format!(
                "geometry: interferer_ris has {} entries but interferer_rx has {}",
                g.interferer_ris.len(),
                g.interferer_rx.len()
            ));
        }
        if g.interferer_ris.iter().chain(&g.interferer_rx).any(|&d| d <= 0.0) {
            errors.push("geometry: interferer distances must be positive".into());
        }
        if g.pathloss_exponent < 2.0 {
            errors.push(format!(
                "geometry.pathloss_exponent: must be at least 2, got {}",
                g.pathloss_exponent
            ));
        }
        if let Some(h) = g.ris_height {
            if h <= 0.0 || h >= g.ris_rx {
                errors.push(format!(
                    "geometry.ris_height: must lie in (0, ris_rx), got {h}"
                ));
            }
        }
        if g.direct_link_mean < 0.0 {
            errors.push(format!(
                "geometry.direct_link_mean: must be nonnegative, got {}",
                g.direct_link_mean
            ));
        }

        let r = &self.ris;
        if r.eh_elements < 1 {
            errors.push("ris.eh_elements: at least one harvesting element required".into());
        }
        if r.eh_elements >= r.total_elements {
            errors.push("ris.eh_elements: at least one reflecting element required".into());
        }
        if r.quantization_bits < 1 {
            errors.push("ris.quantization_bits: must be at least 1".into());
        }
        if r.element_power < 0.0 || r.controller_power < 0.0 {
            errors.push("ris: element_power and controller_power must be nonnegative".into());
        }
        if r.slot_duration <= 0.0 {
            errors.push(format!(
                "ris.slot_duration: must be positive, got {}",
                r.slot_duration
            ));
        }

        if self.interferer_powers.len() != g.interferer_count() {
            errors.push(format!(
                "interferer_powers: {} entries for {} interferers",
                self.interferer_powers.len(),
                g.interferer_count()
            ));
        }
        if self.interferer_powers.iter().any(|&p| p <= 0.0) {
            errors.push("interferer_powers: powers must be positive".into());
        }
        if self.noise_floor <= 0.0 {
            errors.push(format!(
                "noise_floor: must be positive, got {}",
                self.noise_floor
            ));
        }
        if self.samples_per_symbol < 1 {
            errors.push("samples_per_symbol: must be at least 1".into());
        }
        if self.repetitions % 2 == 0 {
            errors.push(format!(
                "repetitions must be odd for a majority vote, got {}",
                self.repetitions
            ));
        }
        if let Err(e) = self.eh_model.check() {
            errors.push(format!("eh_model: {e}"));
        }
        if self.rx_power < 0.0 || self.tx_power < 0.0 {
            errors.push("rx_power and tx_power must be nonnegative".into());
        }

        if errors.is_empty() {
            Ok(self)
        } else {
            Err(Error::Config(errors))
        }
    }
}
