//! Desk-scale Monte Carlo: lattice codebooks sent through the channel and
//! decoded stage by stage.
//!
//! Every random draw is keyed by `(master_seed, purpose, trial)`, so results
//! do not depend on thread count or scheduling.

pub mod align;
pub mod config;
mod decode;
pub mod design;
mod schemes;
pub mod stats;

use serde::{Deserialize, Serialize};

pub use align::{align_interference_lattices, align_with_placement, alignment_report, AlignedLattices, PlacementCheck};
pub use config::{DecoderMode, SimConfig, SimScheme};
pub use design::{design_best_codebook, design_codebook, select_base_lattice};
pub use stats::{wilson_interval, ErrorStats};

use crate::error::{Error, Result};

fn expect(cfg: &SimConfig, scheme: SimScheme) -> Result<()> {
    if cfg.scheme != scheme {
        return Err(Error::invalid(
            "scheme",
            format!("expected {}, got {}", scheme.name(), cfg.scheme.name()),
        ));
    }
    cfg.validate()
}

pub fn simulate_point_to_point(cfg: &SimConfig) -> Result<ErrorStats> {
    expect(cfg, SimScheme::P2p)?;
    schemes::point_to_point(cfg)
}

pub fn simulate_very_strong_symmetric(cfg: &SimConfig) -> Result<ErrorStats> {
    expect(cfg, SimScheme::VeryStrongSym)?;
    schemes::very_strong_symmetric(cfg)
}

pub fn simulate_layered_symmetric(cfg: &SimConfig) -> Result<ErrorStats> {
    expect(cfg, SimScheme::LayeredSym)?;
    schemes::layered_symmetric(cfg)
}

pub fn simulate_very_strong_general(cfg: &SimConfig) -> Result<ErrorStats> {
    expect(cfg, SimScheme::VeryStrongGeneral)?;
    schemes::very_strong_general(cfg)
}

/// Runs whichever scheme the config names.
pub fn simulate(cfg: &SimConfig) -> Result<ErrorStats> {
    schemes::dispatch(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageErrors {
    pub stage: usize,
    pub interference: u64,
    pub message: u64,
}

/// One JSON line per simulated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub config_hash: String,
    pub scheme: SimScheme,
    pub n: usize,
    pub trials: u64,
    pub stage_errors: Vec<StageErrors>,
    pub block_error: f64,
    pub wilson: [f64; 2],
    pub seed: u64,
    pub block_errors: u64,
    pub alignment_violations: u64,
}

impl SimRecord {
    pub fn new(cfg: &SimConfig, stats: &ErrorStats) -> Self {
        let stage_errors = stats
            .per_stage_interference_errors
            .iter()
            .zip(&stats.per_stage_message_errors)
            .enumerate()
            .map(|(i, (&interference, &message))| StageErrors {
                stage: i + 1,
                interference,
                message,
            })
            .collect();
        SimRecord {
            config_hash: cfg.hash(),
            scheme: cfg.scheme,
            n: cfg.n,
            trials: stats.trials,
            stage_errors,
            block_error: stats.block_error_rate(),
            wilson: [stats.wilson_interval.0, stats.wilson_interval.1],
            seed: cfg.master_seed,
            block_errors: stats.block_errors,
            alignment_violations: stats.alignment_violations,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2p(rate: f64, sigma2: f64) -> SimConfig {
        let mut c = SimConfig::new(SimScheme::P2p, 4, 200, 11, vec![rate]);
        c.power = Some(8.0);
        c.sigma2 = sigma2;
        c.search_budget = 4;
        c
    }

    #[test]
    fn zero_rate_never_errs() {
        let s = simulate_point_to_point(&p2p(0.0, 1.0)).unwrap();
        assert_eq!(s.block_errors, 0);
        assert_eq!(s.trials, 200);
    }

    #[test]
    fn noiseless_never_errs() {
        let s = simulate_point_to_point(&p2p(1.0, 1e-6)).unwrap();
        assert_eq!(s.block_errors, 0);
    }

    #[test]
    fn deterministic_across_runs() {
        let c = p2p(1.0, 1.0);
        let a = simulate(&c).unwrap();
        let b = simulate(&c).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| simulate(&c).unwrap());
        assert_eq!(a, single);
    }

    #[test]
    fn wrong_scheme_rejected() {
        let c = p2p(1.0, 1.0);
        assert!(simulate_layered_symmetric(&c).unwrap_err().is_validation());
    }

    #[test]
    fn record_shape() {
        let c = p2p(0.5, 1.0);
        let s = simulate(&c).unwrap();
        let line = SimRecord::new(&c, &s).to_json_line();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        for key in ["config_hash", "scheme", "n", "trials", "stage_errors", "block_error", "wilson", "seed"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["scheme"], "p2p");
        assert_eq!(v["stage_errors"][0]["stage"], 1);
    }

    #[test]
    fn layered_single_layer_matches_very_strong() {
        let mut vs = SimConfig::new(SimScheme::VeryStrongSym, 4, 150, 5, vec![0.4]);
        vs.a = Some(2.0);
        vs.power = Some(3.0);
        vs.search_budget = 3;
        let mut layered = vs.clone();
        layered.scheme = SimScheme::LayeredSym;
        layered.power = None;
        let a = simulate(&vs).unwrap();
        let b = simulate(&layered).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.alignment_violations, 0);
    }

    #[test]
    fn layered_rate_above_ceiling_rejected() {
        let mut c = SimConfig::new(SimScheme::LayeredSym, 4, 100, 5, vec![0.5, 0.5]);
        c.a = Some(3f64.sqrt());
        c.layers = 2;
        c.margin = 0.25;
        assert!(matches!(simulate(&c), Err(Error::Precondition(_))));
        c.rates = vec![0.25, 0.25];
        assert!(simulate(&c).is_ok());
    }

    #[test]
    fn general_scheme_runs_on_symmetric_matrix() {
        let a = 2.0f64;
        let mut c = SimConfig::new(SimScheme::VeryStrongGeneral, 4, 100, 3, vec![0.3; 3]);
        c.h = Some([[1.0, a, a], [a, 1.0, a], [a, a, 1.0]]);
        c.powers = Some([3.0; 3]);
        c.search_budget = 3;
        let s = simulate(&c).unwrap();
        assert_eq!(s.trials, 100);
        assert_eq!(s.alignment_violations, 0);
    }
}
