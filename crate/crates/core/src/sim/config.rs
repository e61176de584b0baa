//! Simulation configuration.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::Witness;
use crate::error::{Error, Result};
use crate::lattice::{is_prime, target_size};

/// Which transmission scheme to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimScheme {
    P2p,
    VeryStrongSym,
    LayeredSym,
    VeryStrongGeneral,
}

impl SimScheme {
    pub fn name(self) -> &'static str {
        match self {
            SimScheme::P2p => "p2p",
            SimScheme::VeryStrongSym => "very-strong-sym",
            SimScheme::LayeredSym => "layered-sym",
            SimScheme::VeryStrongGeneral => "very-strong-general",
        }
    }
}

/// How a receiver searches for a codeword or aggregate point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderMode {
    /// Restricted search when the candidate set has at most
    /// [`AUTO_LIST_LIMIT`] points, lattice decoding otherwise.
    #[default]
    Auto,
    /// Minimum distance over the codebook (or the set of possible
    /// aggregates).
    Restricted,
    /// Nearest point of the (shifted) lattice, then a shaping check.
    Lattice,
}

pub const AUTO_LIST_LIMIT: usize = 1 << 16;

fn default_sigma2() -> f64 {
    1.0
}
fn default_layers() -> usize {
    1
}
fn default_budget() -> usize {
    20
}
fn default_shift_trials() -> usize {
    8
}
fn default_code_p() -> u64 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Block length, 2 to 10.
    pub n: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub scheme: SimScheme,
    /// Per-user power for `p2p` and `very-strong-sym`.
    #[serde(default)]
    pub power: Option<f64>,
    /// Per-user powers for `very-strong-general`.
    #[serde(default)]
    pub powers: Option<[f64; 3]>,
    /// Receiver noise variance.
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    /// Cross gain of the symmetric schemes.
    #[serde(default)]
    pub a: Option<f64>,
    /// Gain matrix for `very-strong-general`.
    #[serde(default)]
    pub h: Option<[[f64; 3]; 3]>,
    #[serde(default)]
    pub witness: Option<Witness>,
    #[serde(default = "default_layers")]
    pub layers: usize,
    /// Per-layer rates (bits/dim); per-user rates for `very-strong-general`.
    pub rates: Vec<f64>,
    /// Candidate linear codes tried per layer.
    #[serde(default = "default_budget")]
    pub search_budget: usize,
    /// Random shifts tried per codebook.
    #[serde(default = "default_shift_trials")]
    pub shift_trials: usize,
    #[serde(default = "default_code_p")]
    pub code_p: u64,
    /// Code dimension; `n/2` when absent.
    #[serde(default)]
    pub code_k: Option<usize>,
    #[serde(default)]
    pub genie: bool,
    #[serde(default)]
    pub decoder: DecoderMode,
    /// Required gap between each layer rate and its stage ceiling.
    #[serde(default)]
    pub margin: f64,
}

fn bad(field: &'static str, reason: impl Into<String>) -> Error {
    Error::invalid(field, reason)
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive, got {v}")))
    }
}

impl SimConfig {
    /// A config with defaults for everything but the essentials.
    pub fn new(scheme: SimScheme, n: usize, trials: u64, master_seed: u64, rates: Vec<f64>) -> Self {
        SimConfig {
            n,
            trials,
            master_seed,
            scheme,
            power: None,
            powers: None,
            sigma2: default_sigma2(),
            a: None,
            h: None,
            witness: None,
            layers: default_layers(),
            rates,
            search_budget: default_budget(),
            shift_trials: default_shift_trials(),
            code_p: default_code_p(),
            code_k: None,
            genie: false,
            decoder: DecoderMode::Auto,
            margin: 0.0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn code_k(&self) -> usize {
        self.code_k.unwrap_or(self.n / 2)
    }

    /// Field-level checks that do not depend on lattice construction.
    pub fn validate(&self) -> Result<()> {
        if !(2..=10).contains(&self.n) {
            return Err(bad("n", format!("must be between 2 and 10, got {}", self.n)));
        }
        if self.trials < 100 {
            return Err(bad("trials", format!("must be at least 100, got {}", self.trials)));
        }
        if self.search_budget == 0 {
            return Err(bad("search_budget", "must be at least 1"));
        }
        if self.shift_trials == 0 {
            return Err(bad("shift_trials", "must be at least 1"));
        }
        positive("sigma2", self.sigma2)?;
        if !is_prime(self.code_p) {
            return Err(Error::NotPrime(self.code_p));
        }
        if self.code_k() > self.n {
            return Err(bad("code_k", format!("must not exceed n = {}", self.n)));
        }
        if (self.code_p as f64).powi(self.code_k() as i32) > crate::lattice::code::MAX_CODEWORDS as f64 {
            return Err(bad("code_k", "code has too many codewords"));
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(bad("margin", "must be nonnegative"));
        }
        for &r in &self.rates {
            if !(r.is_finite() && r >= 0.0) {
                return Err(bad("rates", format!("must be nonnegative, got {r}")));
            }
            if target_size(self.n, r) > crate::lattice::codebook::MAX_WORDS {
                return Err(bad("rates", format!("rate {r} needs too many codewords")));
            }
        }
        let expected_rates = match self.scheme {
            SimScheme::P2p | SimScheme::VeryStrongSym => 1,
            SimScheme::LayeredSym => self.layers,
            SimScheme::VeryStrongGeneral => 3,
        };
        if self.rates.len() != expected_rates {
            return Err(bad(
                "rates",
                format!("expected {expected_rates} entries, got {}", self.rates.len()),
            ));
        }
        match self.scheme {
            SimScheme::P2p => {
                positive("power", self.power.ok_or_else(|| bad("power", "required"))?)?;
            }
            SimScheme::VeryStrongSym => {
                let p = self.power.ok_or_else(|| bad("power", "required"))?;
                positive("power", p)?;
                let a = self.a.ok_or_else(|| bad("a", "required"))?;
                positive("a", a.abs())?;
                if a * a < p / self.sigma2 + 1.0 - 1e-12 {
                    return Err(Error::Precondition(format!(
                        "a² = {} is below P/σ² + 1 = {}",
                        a * a,
                        p / self.sigma2 + 1.0
                    )));
                }
            }
            SimScheme::LayeredSym => {
                let a = self.a.ok_or_else(|| bad("a", "required"))?;
                positive("a", a.abs())?;
                if !(1..=3).contains(&self.layers) {
                    return Err(bad("layers", format!("must be 1 to 3, got {}", self.layers)));
                }
            }
            SimScheme::VeryStrongGeneral => {
                let powers = self.powers.ok_or_else(|| bad("powers", "required"))?;
                for p in powers {
                    positive("powers", p)?;
                }
                if self.h.is_none() {
                    return Err(bad("h", "required"));
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
