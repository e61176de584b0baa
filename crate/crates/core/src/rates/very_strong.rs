//! Very-strong interference: the interference is decoded first at no cost
//! to the desired message.

use serde::{Deserialize, Serialize};

use super::{half_log2, RateReport, Scheme};
use crate::channel::ChannelMatrix3;
use crate::error::{Error, Result};

const SLACK: f64 = 1e-12;

fn at_least(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs * (1.0 - SLACK)
}

/// Symmetric rate `½log₂(P/σ²)` per user when `a² ≥ P/σ² + 1`.
pub fn very_strong_symmetric(a2: f64, power: f64, sigma2: f64) -> Option<RateReport> {
    if !(a2 > 0.0 && power > 0.0 && sigma2 > 0.0) {
        return None;
    }
    let snr = power / sigma2;
    if !at_least(a2, snr + 1.0) {
        return None;
    }
    let r = half_log2(snr).max(0.0);
    Some(RateReport::new(
        Scheme::VeryStrong,
        [r; 3],
        3.0 * snr,
        "message-decoding",
    ))
}

/// Which of the three sufficient gain conditions matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum ConditionSet {
    One,
    Two,
    Three,
}

impl From<ConditionSet> for u8 {
    fn from(c: ConditionSet) -> u8 {
        match c {
            ConditionSet::One => 1,
            ConditionSet::Two => 2,
            ConditionSet::Three => 3,
        }
    }
}

impl TryFrom<u8> for ConditionSet {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(ConditionSet::One),
            2 => Ok(ConditionSet::Two),
            3 => Ok(ConditionSet::Three),
            _ => Err(format!("condition set must be 1, 2 or 3, got {v}")),
        }
    }
}

impl ConditionSet {
    pub const ALL: [ConditionSet; 3] = [ConditionSet::One, ConditionSet::Two, ConditionSet::Three];

    /// Extra squared factors on `(rx, tx)` gains, zero-based.
    fn multipliers(self, p: f64, q: f64) -> [((usize, usize), f64); 2] {
        match self {
            ConditionSet::One => [((0, 1), p * p), ((1, 0), q * q)],
            ConditionSet::Two => [((1, 2), p * p), ((2, 1), q * q)],
            ConditionSet::Three => [((0, 2), q * q), ((2, 0), p * p)],
        }
    }
}

fn check_positive(field: &'static str, v: &[f64; 3]) -> Result<()> {
    if v.iter().all(|x| x.is_finite() && *x > 0.0) {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("entries must be positive, got {v:?}")))
    }
}

/// Evaluates the three condition sets for witness `p/q`:
/// `h_rt² ≥ m·(P_r + σ_r²)/σ_t²` for every cross pair, where `m` is `p²`
/// or `q²` on two designated gains of each set and 1 elsewhere.
pub fn very_strong_conditions(
    h: &ChannelMatrix3,
    power: [f64; 3],
    sigma2: [f64; 3],
    p: i64,
    q: i64,
) -> [bool; 3] {
    let (p, q) = (p as f64, q as f64);
    ConditionSet::ALL.map(|set| {
        let extra = set.multipliers(p, q);
        (0..3).all(|rx| {
            (0..3).filter(|&tx| tx != rx).all(|tx| {
                let m = extra
                    .iter()
                    .find(|(idx, _)| *idx == (rx, tx))
                    .map_or(1.0, |(_, m)| *m);
                let g = h.h[rx][tx];
                at_least(g * g, m * (power[rx] + sigma2[rx]) / sigma2[tx])
            })
        })
    })
}

/// Per-user rates `½log₂(P_i/σ_i²)` and the first matching condition set,
/// or `None` when no set holds.
pub fn very_strong_general(
    h: &ChannelMatrix3,
    power: [f64; 3],
    sigma2: [f64; 3],
) -> Result<Option<(RateReport, ConditionSet)>> {
    check_positive("power", &power)?;
    check_positive("sigma2", &sigma2)?;
    let w = h.witness.ok_or(Error::MissingWitness)?;
    let holds = very_strong_conditions(h, power, sigma2, w.p, w.q);
    let Some(idx) = holds.iter().position(|&b| b) else {
        return Ok(None);
    };
    let rates = [0, 1, 2].map(|i| half_log2(power[i] / sigma2[i]).max(0.0));
    let total: f64 = (0..3).map(|i| power[i] / sigma2[i]).sum();
    let set = ConditionSet::ALL[idx];
    let report = RateReport::new(Scheme::VeryStrong, rates, total, "message-decoding");
    Ok(Some((report, set)))
}
