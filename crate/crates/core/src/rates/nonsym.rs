//! Layered lattice coding on the channel where receiver `j` sees both
//! interferers through gain `a_j`.
//!
//! Stages are built from the bottom (lowest power) up. The powers of stage
//! `i` depend only on the stages below it, so the bottom `N − 1` stages of
//! an N-layer allocation coincide with the (N − 1)-layer allocation and one
//! sweep produces every N.

use serde::{Deserialize, Serialize};

use super::{half_log2, AllocationRegime, DecodeOrder, LayeredAllocation};
use crate::error::{Error, Result};

/// Sweeps stop once an effective noise power exceeds this.
const OVERFLOW: f64 = 1e250;

/// Effective noise powers per user and stage (index 0 is the top stage).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaLadder {
    /// Seen while decoding the stage's aggregate interference.
    pub sigma_int: [Vec<f64>; 3],
    /// Seen while decoding the stage's own sub-message.
    pub sigma_msg: [Vec<f64>; 3],
}

#[derive(Debug, Clone, Copy)]
struct Stage {
    power: [f64; 3],
    sigma_msg: [f64; 3],
}

fn check_gains(gains: [f64; 3]) -> Result<[f64; 3]> {
    let sq = gains.map(|a| a * a);
    if sq.iter().any(|s| !(s.is_finite() && *s >= 2.0)) {
        return Err(Error::Precondition(format!(
            "every squared gain must be at least 2, got {sq:?}"
        )));
    }
    Ok(sq)
}

/// Next stage on top of `below`, which lists lower stages from the bottom.
fn next_stage(sq: [f64; 3], own_below: [f64; 3], depth: usize) -> Result<Stage> {
    let total_below: f64 = own_below.iter().sum();
    let sigma_msg: [f64; 3] = std::array::from_fn(|j| {
        1.0 + own_below[j] + sq[j] * (total_below - own_below[j])
    });
    let mut power = [0.0; 3];
    for j in 0..3 {
        let worst = (0..3)
            .filter(|&l| l != j)
            .map(|l| sigma_msg[l])
            .fold(f64::INFINITY, f64::min);
        power[j] = sq[j] * worst - sigma_msg[j];
        if !(power[j] > 0.0) {
            return Err(Error::NonPositivePower {
                stage: depth,
                user: j + 1,
                power: power[j],
            });
        }
    }
    Ok(Stage { power, sigma_msg })
}

/// Builds stages bottom-up until `max_layers` or overflow.
fn sweep_stages(sq: [f64; 3], max_layers: usize) -> Result<Vec<Stage>> {
    let mut stages = Vec::with_capacity(max_layers);
    let mut own_below = [0.0; 3];
    while stages.len() < max_layers {
        let s = next_stage(sq, own_below, stages.len() + 1)?;
        if s.power.iter().chain(&s.sigma_msg).any(|v| *v > OVERFLOW) {
            break;
        }
        for j in 0..3 {
            own_below[j] += s.power[j];
        }
        stages.push(s);
    }
    Ok(stages)
}

/// N-layer allocation for gains `(a_1, a_2, a_3)`, each with `a_j² ≥ 2`.
///
/// Stage powers are `P_ji = a_j² · min_{l≠j} σ²_{m,li} − σ²_{m,ji}` with
/// `σ²_{m,ji} = 1 + Σ_{k>i} P_jk + a_j² Σ_{l≠j} Σ_{k>i} P_lk`, and rates
/// `R_ji = ½log₂(P_ji/σ²_{m,ji})`.
pub fn nonsym_layered_allocation(
    gains: [f64; 3],
    layers: usize,
) -> Result<(LayeredAllocation, SigmaLadder)> {
    if layers == 0 {
        return Err(Error::invalid("layers", "must be at least 1"));
    }
    let sq = check_gains(gains)?;
    let stages = sweep_stages(sq, layers)?;
    if stages.len() < layers {
        return Err(Error::Precondition(format!(
            "stage powers overflow beyond {} layers",
            stages.len()
        )));
    }
    // Top stage first.
    let ordered: Vec<&Stage> = stages.iter().rev().collect();
    let per_user = |f: &dyn Fn(&Stage, usize) -> f64| -> [Vec<f64>; 3] {
        std::array::from_fn(|j| ordered.iter().map(|s| f(s, j)).collect())
    };
    let powers = per_user(&|s, j| s.power[j]);
    let sigma_msg = per_user(&|s, j| s.sigma_msg[j]);
    let sigma_int = per_user(&|s, j| s.sigma_msg[j] + s.power[j]);
    let rates = per_user(&|s, j| half_log2(s.power[j] / s.sigma_msg[j]));
    let total_power = std::array::from_fn(|j| powers[j].iter().sum());
    Ok((
        LayeredAllocation {
            regime: AllocationRegime::Nonsymmetric,
            layers,
            powers,
            rates,
            total_power,
            decode_order: DecodeOrder::InterferenceFirst,
        },
        SigmaLadder {
            sigma_int,
            sigma_msg,
        },
    ))
}

/// Sum rate and total power of the N-layer allocation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonsymPoint {
    pub layers: usize,
    pub sum_rate: f64,
    pub total_power: f64,
    /// `sum_rate / ½log₂(total_power)`.
    pub ratio: f64,
    /// Slope of sum rate against `½log₂(total_power)` between N−1 and N
    /// layers; equals `ratio` at N = 1.
    pub dof_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonsymSweep {
    pub points: Vec<NonsymPoint>,
    /// Final estimate, floored at 1.
    pub dof: f64,
}

/// All layer counts `1..=max_layers` that stay below the overflow limit.
pub fn nonsym_sweep(gains: [f64; 3], max_layers: usize) -> Result<NonsymSweep> {
    if max_layers == 0 {
        return Err(Error::invalid("n_max", "must be at least 1"));
    }
    let sq = check_gains(gains)?;
    let stages = sweep_stages(sq, max_layers)?;
    let mut points: Vec<NonsymPoint> = Vec::with_capacity(stages.len());
    let (mut sum, mut total) = (0.0, 0.0);
    for (i, s) in stages.iter().enumerate() {
        sum += (0..3)
            .map(|j| half_log2(s.power[j] / s.sigma_msg[j]))
            .sum::<f64>();
        total += s.power.iter().sum::<f64>();
        let ratio = sum / half_log2(total);
        let dof_estimate = match points.last() {
            Some(prev) => (sum - prev.sum_rate) / half_log2(total / prev.total_power),
            None => ratio,
        };
        points.push(NonsymPoint {
            layers: i + 1,
            sum_rate: sum,
            total_power: total,
            ratio,
            dof_estimate,
        });
    }
    let dof = if points.len() >= 2 {
        points.last().unwrap().dof_estimate.max(1.0)
    } else {
        1.0
    };
    Ok(NonsymSweep { points, dof })
}

/// Degrees of freedom of the layered scheme, estimated from the growth of
/// sum rate against `½log₂` of total power at the deepest reachable layer
/// count. Falls back to 1 when some `a_j² < 2`.
pub fn dof_nonsym_numeric(gains: [f64; 3], max_layers: usize) -> Result<f64> {
    if check_gains(gains).is_err() {
        if gains.iter().all(|a| a.is_finite()) {
            return Ok(1.0);
        }
        return Err(Error::invalid("gains", format!("must be finite, got {gains:?}")));
    }
    Ok(nonsym_sweep(gains, max_layers)?.dof)
}
