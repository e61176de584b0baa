//! Symmetric channel: every cross gain equals `a`.

use serde::{Deserialize, Serialize};

use super::{half_log2, hk_sym_rate, AllocationRegime, DecodeOrder, LayeredAllocation, RateReport, Scheme};
use crate::error::{Error, Result};

const MAX_LAYERS: usize = 100_000;

/// Regions of `a²` with different layered constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `a² ≥ 2`: interference decoded first at every stage.
    Strong,
    /// `1/3 < a² < 2`: no layered construction; time sharing.
    Band,
    /// `a² ≤ 1/3`: message decoded first at every stage.
    Weak,
}

impl Regime {
    pub fn of(a2: f64) -> Regime {
        if a2 >= 2.0 {
            Regime::Strong
        } else if a2 <= 1.0 / 3.0 {
            Regime::Weak
        } else {
            Regime::Band
        }
    }
}

fn check_a2(a2: f64) -> Result<()> {
    if !(a2.is_finite() && a2 > 0.0) {
        return Err(Error::invalid("a2", format!("must be positive, got {a2}")));
    }
    Ok(())
}

fn layered_regime(a2: f64) -> Result<Regime> {
    check_a2(a2)?;
    match Regime::of(a2) {
        Regime::Band => Err(Error::Precondition(format!(
            "a² = {a2} lies in (1/3, 2) where no layered allocation exists"
        ))),
        r => Ok(r),
    }
}

/// Common ratio of the strong ladder, `2a⁴ − a²`.
fn strong_ratio(a2: f64) -> f64 {
    2.0 * a2 * a2 - a2
}

/// Common ratio of the weak ladder, `(1 + a²)/(2a⁴)`.
fn weak_ratio(a2: f64) -> f64 {
    (1.0 + a2) / (2.0 * a2 * a2)
}

/// Per-stage rate of the strong ladder, `½log₂(a² − 1)`.
fn strong_stage_rate(a2: f64) -> f64 {
    half_log2(a2 - 1.0)
}

/// Per-stage rate of the weak ladder, `½log₂((1 − a²)/(2a²))`.
fn weak_stage_rate(a2: f64) -> f64 {
    half_log2((1.0 - a2) / (2.0 * a2))
}

/// Achievable total degrees of freedom of the symmetric channel.
pub fn dof_symmetric(a2: f64) -> Result<f64> {
    check_a2(a2)?;
    Ok(match Regime::of(a2) {
        Regime::Strong => (3.0 * (a2 - 1.0).ln() / strong_ratio(a2).ln()).max(1.0),
        Regime::Band => 1.0,
        Regime::Weak => {
            let num = ((1.0 - a2) / (2.0 * a2)).ln();
            let den = weak_ratio(a2).ln();
            (3.0 * num / den).max(1.0)
        }
    })
}

/// The N-layer power ladder for the symmetric channel.
///
/// Strong regime: `P_i = (a²−1)(2a⁴−a²)^(N−i)`, rate `½log₂(a²−1)` per stage.
/// Weak regime: `P_i = (1−a²)/(2a⁴) · ((1+a²)/(2a⁴))^(N−i)`, rate
/// `½log₂((1−a²)/(2a²))` per stage.
pub fn layered_allocation_symmetric(a2: f64, layers: usize) -> Result<LayeredAllocation> {
    if layers == 0 {
        return Err(Error::invalid("layers", "must be at least 1"));
    }
    let regime = layered_regime(a2)?;
    let (base, ratio, rate, order, tag) = match regime {
        Regime::Strong => (
            a2 - 1.0,
            strong_ratio(a2),
            strong_stage_rate(a2),
            DecodeOrder::InterferenceFirst,
            AllocationRegime::Strong,
        ),
        Regime::Weak => (
            (1.0 - a2) / (2.0 * a2 * a2),
            weak_ratio(a2),
            weak_stage_rate(a2),
            DecodeOrder::MessageFirst,
            AllocationRegime::Weak,
        ),
        Regime::Band => unreachable!(),
    };
    let powers: Vec<f64> = (1..=layers)
        .map(|i| base * ratio.powi((layers - i) as i32))
        .collect();
    let total: f64 = powers.iter().sum();
    let rates = vec![rate; layers];
    Ok(LayeredAllocation {
        regime: tag,
        layers,
        powers: [powers.clone(), powers.clone(), powers],
        rates: [rates.clone(), rates.clone(), rates],
        total_power: [total; 3],
        decode_order: order,
    })
}

/// Largest rates at which a stage's aggregate interference and own
/// sub-message can be decoded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageLimits {
    pub interference: f64,
    pub message: f64,
}

impl StageLimits {
    pub fn binding(&self) -> f64 {
        self.interference.min(self.message)
    }
}

/// Power from the layers below stage `i`, seen at a receiver:
/// `Σ_{k>i} (2a²+1) P_k`.
fn residual_power(a2: f64, powers: &[f64], i: usize) -> f64 {
    powers[i + 1..].iter().map(|p| (2.0 * a2 + 1.0) * p).sum()
}

/// Stage limits with interference decoded first, unit receiver noise:
/// `½log₂(a²P_i/(P_i + S_i + 1))` and `½log₂(P_i/(S_i + 1))`, both
/// clamped at zero.
pub fn stage_constraints_strong(a2: f64, powers: &[f64]) -> Vec<StageLimits> {
    (0..powers.len())
        .map(|i| {
            let p = powers[i];
            let floor = residual_power(a2, powers, i) + 1.0;
            StageLimits {
                interference: half_log2(a2 * p / (p + floor)).max(0.0),
                message: half_log2(p / floor).max(0.0),
            }
        })
        .collect()
}

/// Stage limits with the sub-message decoded first: the message sees the
/// stage's aggregate interference `2a²P_i` as noise, then the aggregate is
/// decoded against the lower layers only.
pub fn stage_constraints_weak(a2: f64, powers: &[f64]) -> Vec<StageLimits> {
    (0..powers.len())
        .map(|i| {
            let p = powers[i];
            let floor = residual_power(a2, powers, i) + 1.0;
            StageLimits {
                interference: half_log2(a2 * p / floor).max(0.0),
                message: half_log2(p / (2.0 * a2 * p + floor)).max(0.0),
            }
        })
        .collect()
}

/// Total power of an N-layer ladder as a geometric sum. `N = 0` gives 0.
pub fn threshold_power(a2: f64, layers: usize) -> Result<f64> {
    let regime = layered_regime(a2)?;
    if layers == 0 {
        return Ok(0.0);
    }
    let n = layers as i32;
    Ok(match regime {
        Regime::Strong => {
            let r = strong_ratio(a2);
            (a2 - 1.0) * (r.powi(n) - 1.0) / (r - 1.0)
        }
        Regime::Weak => {
            let r = weak_ratio(a2);
            (1.0 - a2) / (2.0 * a2 * a2) * (r.powi(n) - 1.0) / (r - 1.0)
        }
        Regime::Band => unreachable!(),
    })
}

/// Largest `N ≥ 0` with `threshold_power(a2, N) ≤ power`, and whether
/// equality holds (to 1e-12 relative).
fn ladder_position(a2: f64, power: f64) -> Result<(usize, bool)> {
    let mut n = 0;
    loop {
        let next = threshold_power(a2, n + 1)?;
        if (power - next).abs() <= 1e-12 * next {
            return Ok((n + 1, true));
        }
        if power < next {
            return Ok((n, n == 0 && power == 0.0));
        }
        n += 1;
        if n > MAX_LAYERS {
            return Err(Error::invalid("power", "too large for the layer ladder"));
        }
    }
}

/// Symmetric rate of layered lattice coding at per-user power `power`
/// with unit receiver noise. `hk(P, σ², a)` supplies the Han–Kobayashi
/// symmetric rate used below the first weak-regime threshold, for the
/// top layer between weak thresholds, and throughout `1/3 < a² < 2`.
///
/// Strong regime, `P_a^N` the N-layer ladder power:
/// - `P ≤ a² − 1`: one layer, `½log₂P`;
/// - `P = P_a^N`: `(N/2)log₂(a² − 1)`;
/// - `P_a^N < P < P_a^(N+1)`: N full layers plus a top layer of power
///   `ΔP = P − P_a^N` carried at `½log₂(1 + (2a²+1)ΔP/(1 + (2a²+1)P_a^N))`.
///   This exceeds the next full layer just below `P_a^(N+1)`, so for
///   `N ≥ 1` the rate drops by `½log₂((2a⁴ − a²)/(a² − 1))` there.
///
/// Weak regime:
/// - `P ≤ (1 − a²)/(2a⁴)`: `hk(P, 1, a)`;
/// - `P = P_a^N`: `(N/2)log₂((1 − a²)/(2a²))`;
/// - otherwise the better of `i ∈ {N−1, N}` lattice layers with the
///   remaining power on a Han–Kobayashi top layer.
pub fn sym_rate_lattice(
    a2: f64,
    power: f64,
    hk: impl Fn(f64, f64, f64) -> f64,
) -> Result<RateReport> {
    check_a2(a2)?;
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::invalid("power", format!("must be positive, got {power}")));
    }
    let a = a2.sqrt();
    let total = 3.0 * power;
    let report = |scheme, r: f64, tag: &str| RateReport::new(scheme, [r; 3], total, tag);

    match Regime::of(a2) {
        Regime::Band => Ok(report(Scheme::Hk, hk(power, 1.0, a), "band-hk-fallback")),
        Regime::Strong => {
            let stage = strong_stage_rate(a2);
            if power <= a2 - 1.0 {
                return Ok(report(
                    Scheme::LatticeLayered,
                    half_log2(power).max(0.0),
                    "single-layer",
                ));
            }
            let (n, exact) = ladder_position(a2, power)?;
            if exact {
                return Ok(report(Scheme::LatticeLayered, n as f64 * stage, "full-layers"));
            }
            let below = threshold_power(a2, n)?;
            let noise = 1.0 + (2.0 * a2 + 1.0) * below;
            let top = half_log2(1.0 + (2.0 * a2 + 1.0) * (power - below) / noise);
            Ok(report(
                Scheme::LatticeLayered,
                n as f64 * stage + top,
                "partial-top-layer",
            ))
        }
        Regime::Weak => {
            let stage = weak_stage_rate(a2);
            if power <= threshold_power(a2, 1)? {
                return Ok(report(Scheme::Hk, hk(power, 1.0, a), "hk-only"));
            }
            let (n, exact) = ladder_position(a2, power)?;
            if exact {
                return Ok(report(Scheme::LatticeLayered, n as f64 * stage, "full-layers"));
            }
            let mut best = f64::NEG_INFINITY;
            for i in [n - 1, n] {
                let below = threshold_power(a2, i)?;
                let noise = 1.0 + (2.0 * a2 + 1.0) * below;
                best = best.max(i as f64 * stage + hk(power - below, noise, a));
            }
            Ok(report(Scheme::LatticeLayered, best, "hk-top-layer"))
        }
    }
}

/// [`sym_rate_lattice`] with the built-in Han–Kobayashi evaluation.
pub fn sym_rate_lattice_hk(a2: f64, power: f64, grid: usize) -> Result<RateReport> {
    sym_rate_lattice(a2, power, |p, s, a| hk_sym_rate(p, s, a, grid))
}
