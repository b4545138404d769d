//! Harvested-energy models and the energy-causality success rate (ECSR).
//!
//! The harvesting elements absorb interference power whose aggregate is
//! moment-matched to a gamma distribution; the ECSR is the probability that
//! the usable harvest covers the reflecting side's consumption.

use crate::error::{Error, Result};
use crate::specfun::regularized_upper_gamma;
use crate::sysmodel::SystemConfig;

/// Unit in which the nonlinear-harvester curve-fit constants are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerUnit {
    Watts,
    Milliwatts,
}

impl PowerUnit {
    /// Scale factor from watts into this unit.
    pub fn per_watt(self) -> f64 {
        match self {
            PowerUnit::Watts => 1.0,
            PowerUnit::Milliwatts => 1e3,
        }
    }
}

/// Energy-harvester transfer model.
#[derive(Debug, Clone, PartialEq)]
pub enum EhModel {
    /// Usable power = η · harvested power, 0 < η ≤ 1.
    Linear { efficiency: f64 },
    /// Rational saturation model: usable = (a1·P + a2)/(P + a3) − a2/a3,
    /// evaluated in `unit`; ceiling a1 − a2/a3 as P → ∞.
    NonLinear { a1: f64, a2: f64, a3: f64, unit: PowerUnit },
}

impl EhModel {
    /// Standard curve-fit constants, interpreted in watts.
    pub fn nonlinear_default() -> Self {
        EhModel::NonLinear { a1: 2.463, a2: 1.635, a3: 0.826, unit: PowerUnit::Watts }
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            EhModel::Linear { efficiency } => {
                if efficiency > 0.0 && efficiency <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!(
                        "efficiency must lie in (0, 1], got {efficiency}"
                    )))
                }
            }
            EhModel::NonLinear { a1, a2, a3, .. } => {
                if a3 <= 0.0 {
                    Err(Error::domain(format!("a3 must be positive, got {a3}")))
                } else if a1 * a3 - a2 <= 0.0 {
                    Err(Error::domain(format!(
                        "a1*a3 - a2 must be positive for a usable ceiling, got {}",
                        a1 * a3 - a2
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Saturation ceiling of usable power in watts; None for the linear model.
    pub fn saturation_ceiling(&self) -> Option<f64> {
        match *self {
            EhModel::Linear { .. } => None,
            EhModel::NonLinear { a1, a2, a3, unit } => Some((a1 - a2 / a3) / unit.per_watt()),
        }
    }

    /// Usable output power (W) for a given harvested input power (W).
    pub fn usable_power(&self, harvested: f64) -> f64 {
        match *self {
            EhModel::Linear { efficiency } => efficiency * harvested,
            EhModel::NonLinear { a1, a2, a3, unit } => {
                let p = harvested * unit.per_watt();
                ((a1 * p + a2) / (p + a3) - a2 / a3) / unit.per_watt()
            }
        }
    }

    /// Smallest harvested power (W) whose usable output covers `consumption`
    /// (W); None when the model saturates below the demand.
    pub fn required_harvest(&self, consumption: f64) -> Option<f64> {
        if consumption <= 0.0 {
            return Some(0.0);
        }
        match *self {
            EhModel::Linear { efficiency } => {
                let req = consumption / efficiency;
                req.is_finite().then_some(req)
            }
            EhModel::NonLinear { a1, a2, a3, unit } => {
                let c = consumption * unit.per_watt();
                let denom = a1 * a3 - a3 * c - a2;
                if denom <= 0.0 {
                    return None; // demand at or above the saturation ceiling
                }
                Some(a3 * a3 * c / denom / unit.per_watt())
            }
        }
    }
}

/// Gamma model of the aggregate harvested power, (shape α, rate β).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaShapeRate {
    pub shape: f64,
    pub rate: f64,
}

impl GammaShapeRate {
    /// α/β
    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    /// α/β²
    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }
}

/// Reflecting-side power demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    /// N2·𝓔 + 𝓔_con, W.
    pub consumption_power: f64,
    /// Slot duration t, s.
    pub slot_duration: f64,
}

impl EnergyBudget {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        Self::for_split(cfg, cfg.ris.eh_elements)
    }

    /// Budget when `n1` elements harvest and N − n1 reflect.
    pub fn for_split(cfg: &SystemConfig, n1: u32) -> Self {
        let n2 = cfg.ris.total_elements - n1;
        EnergyBudget {
            consumption_power: n2 as f64 * cfg.ris.element_power + cfg.ris.controller_power,
            slot_duration: cfg.ris.slot_duration,
        }
    }

    /// 𝓔_C = t · (N2·𝓔 + 𝓔_con), J.
    pub fn consumption_energy(&self) -> f64 {
        self.slot_duration * self.consumption_power
    }
}

/// Per-interferer mean harvested power factor c_k = P_k · (d1⁽ᵏ⁾)^{−a}.
fn interferer_factors(cfg: &SystemConfig) -> Vec<f64> {
    cfg.interferer_powers
        .iter()
        .zip(&cfg.geometry.interferer_ris)
        .map(|(&p, &d)| p * d.powf(-cfg.geometry.pathloss_exponent))
        .collect()
}

/// Moment-matched gamma model of the power harvested by the configured N1.
pub fn aggregate_power_model(cfg: &SystemConfig) -> Result<GammaShapeRate> {
    aggregate_power_model_for(cfg, cfg.ris.eh_elements)
}

/// Same model for an explicit harvesting split (allocator sweeps need it).
///
/// The shape α = (Σc)²/Σc² is independent of N1; only the rate scales.
pub fn aggregate_power_model_for(cfg: &SystemConfig, n1: u32) -> Result<GammaShapeRate> {
    let factors = interferer_factors(cfg);
    if factors.is_empty() {
        return Err(Error::domain("no interference power available"));
    }
    let sum: f64 = factors.iter().sum();
    let sum_sq: f64 = factors.iter().map(|c| c * c).sum();
    Ok(GammaShapeRate {
        shape: sum * sum / sum_sq,
        rate: sum / (n1 as f64 * sum_sq),
    })
}

/// ECSR under the linear harvester: Q(α, β·C_p/η).
pub fn ecsr_linear(efficiency: f64, gamma: &GammaShapeRate, budget: &EnergyBudget) -> Result<f64> {
    let threshold = gamma.rate * budget.consumption_power / efficiency;
    if !threshold.is_finite() {
        return Ok(0.0); // η → 0⁺ limit
    }
    regularized_upper_gamma(gamma.shape, threshold)
}

/// ECSR under the saturating harvester; exactly 0 once the demand reaches
/// the ceiling a1 − a2/a3 (the closed form is meaningless past it).
pub fn ecsr_nonlinear(model: &EhModel, gamma: &GammaShapeRate, budget: &EnergyBudget) -> Result<f64> {
    debug_assert!(matches!(model, EhModel::NonLinear { .. }));
    match model.required_harvest(budget.consumption_power) {
        None => Ok(0.0),
        Some(req) => regularized_upper_gamma(gamma.shape, gamma.rate * req),
    }
}

/// ECSR for the configured model and split.
pub fn ecsr(cfg: &SystemConfig) -> Result<f64> {
    ecsr_with_split(cfg, cfg.ris.eh_elements)
}

/// ECSR when `n1` elements harvest; the primitive behind allocation search.
pub fn ecsr_with_split(cfg: &SystemConfig, n1: u32) -> Result<f64> {
    let gamma = aggregate_power_model_for(cfg, n1)?;
    let budget = EnergyBudget::for_split(cfg, n1);
    match &cfg.eh_model {
        EhModel::Linear { efficiency } => ecsr_linear(*efficiency, &gamma, &budget),
        model @ EhModel::NonLinear { .. } => ecsr_nonlinear(model, &gamma, &budget),
    }
}

/// Limit of the ECSR as interferer powers grow without bound.
///
/// Both closed forms drive their threshold argument to 0, so the limit is 1.
/// The saturating model is the exception in practice: demand above its
/// ceiling pins the ECSR at 0 no matter the power, which `ecsr_nonlinear`
/// honors even though this limit does not.
pub fn ecsr_asymptotic() -> f64 {
    1.0
}
