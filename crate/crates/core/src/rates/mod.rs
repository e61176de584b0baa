//! Closed-form achievable rates and degrees of freedom for layered lattice
//! coding, plus the Han–Kobayashi baseline used for comparison.
//!
//! All rates are in bits per real dimension.

pub mod hk;
pub mod nonsym;
pub mod symmetric;
pub mod very_strong;

use serde::{Deserialize, Serialize};

pub use hk::{hk_sym_rate, DEFAULT_HK_GRID};
pub use nonsym::{dof_nonsym_numeric, nonsym_layered_allocation, nonsym_sweep, NonsymPoint, NonsymSweep, SigmaLadder};
pub use symmetric::{
    dof_symmetric, layered_allocation_symmetric, stage_constraints_strong, stage_constraints_weak,
    sym_rate_lattice, sym_rate_lattice_hk, threshold_power, Regime, StageLimits,
};
pub use very_strong::{very_strong_conditions, very_strong_general, very_strong_symmetric, ConditionSet};

/// `½ log₂ x`.
pub fn half_log2(x: f64) -> f64 {
    0.5 * x.log2()
}

/// Gaussian capacity `½ log₂(1 + snr)`.
pub fn capacity(snr: f64) -> f64 {
    half_log2(1.0 + snr)
}

/// Order in which a receiver peels a stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeOrder {
    InterferenceFirst,
    MessageFirst,
}

/// Which power ladder a layered allocation follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AllocationRegime {
    Strong,
    Weak,
    Nonsymmetric,
}

/// Per-stage powers and rates of a layered scheme. Stage 1 (index 0) is the
/// highest-power layer and is decoded first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredAllocation {
    pub regime: AllocationRegime,
    pub layers: usize,
    /// `powers[user][stage]`, watts.
    pub powers: [Vec<f64>; 3],
    /// `rates[user][stage]`, bits per dimension.
    pub rates: [Vec<f64>; 3],
    pub total_power: [f64; 3],
    pub decode_order: DecodeOrder,
}

impl LayeredAllocation {
    pub fn sum_rate(&self) -> f64 {
        self.rates.iter().flatten().sum()
    }

    pub fn user_rate(&self, user: usize) -> f64 {
        self.rates[user].iter().sum()
    }
}

/// Which scheme a [`RateReport`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "lattice-layered")]
    LatticeLayered,
    #[serde(rename = "HK")]
    Hk,
    #[serde(rename = "very-strong")]
    VeryStrong,
    #[serde(rename = "time-sharing")]
    TimeSharing,
}

/// Achievable rates for one channel configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub scheme: Scheme,
    #[serde(rename = "rates_bits_per_dim")]
    pub per_user_rates: [f64; 3],
    pub sum_rate: f64,
    #[serde(rename = "dof")]
    pub dof_lower_bound: f64,
    pub binding_constraint: String,
}

impl RateReport {
    /// Builds a report; the DoF entry is `sum_rate / ½log₂(total_power)`,
    /// or 0 when the total power does not exceed 1.
    pub fn new(
        scheme: Scheme,
        per_user_rates: [f64; 3],
        total_power: f64,
        binding_constraint: impl Into<String>,
    ) -> Self {
        let sum_rate: f64 = per_user_rates.iter().sum();
        let denom = half_log2(total_power);
        let dof = if denom > 0.0 { (sum_rate / denom).max(0.0) } else { 0.0 };
        RateReport {
            scheme,
            per_user_rates,
            sum_rate,
            dof_lower_bound: dof,
            binding_constraint: binding_constraint.into(),
        }
    }

    pub fn symmetric_rate(&self) -> f64 {
        self.per_user_rates[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_shape() {
        let r = RateReport::new(Scheme::Hk, [0.5, 0.5, 0.5], 16.0, "triple-mac");
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["scheme"], "HK");
        assert_eq!(v["rates_bits_per_dim"][2], 0.5);
        assert_eq!(v["sum_rate"], 1.5);
        assert_eq!(v["dof"], 0.75);
        assert_eq!(v["binding_constraint"], "triple-mac");
    }

    #[test]
    fn report_dof_nonnegative() {
        let r = RateReport::new(Scheme::VeryStrong, [0.0; 3], 0.5, "x");
        assert_eq!(r.dof_lower_bound, 0.0);
    }
}
