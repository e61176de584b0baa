//! Error counts and confidence intervals.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Trial-level error counts. A stage counts as failed in a trial when any
/// receiver fails it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub trials: u64,
    pub per_stage_interference_errors: Vec<u64>,
    pub per_stage_message_errors: Vec<u64>,
    pub block_errors: u64,
    /// Trials where an aggregate interference point fell off its lattice.
    pub alignment_violations: u64,
    pub wilson_interval: (f64, f64),
}

impl ErrorStats {
    pub fn block_error_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.block_errors as f64 / self.trials as f64
        }
    }

    pub fn stages(&self) -> usize {
        self.per_stage_message_errors.len()
    }
}

/// Per-trial accumulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Counts {
    pub trials: u64,
    pub interference: Vec<u64>,
    pub message: Vec<u64>,
    pub block: u64,
    pub violations: u64,
}

impl Counts {
    pub fn zero(stages: usize) -> Self {
        Counts {
            trials: 0,
            interference: vec![0; stages],
            message: vec![0; stages],
            block: 0,
            violations: 0,
        }
    }

    pub fn merge(mut self, other: Counts) -> Counts {
        self.trials += other.trials;
        for (a, b) in self.interference.iter_mut().zip(other.interference) {
            *a += b;
        }
        for (a, b) in self.message.iter_mut().zip(other.message) {
            *a += b;
        }
        self.block += other.block;
        self.violations += other.violations;
        self
    }

    pub fn finish(self) -> ErrorStats {
        ErrorStats {
            wilson_interval: wilson_interval(self.block, self.trials, Z95),
            trials: self.trials,
            per_stage_interference_errors: self.interference,
            per_stage_message_errors: self.message,
            block_errors: self.block,
            alignment_violations: self.violations,
        }
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone)]
pub(crate) struct TrialOutcome {
    pub interference: Vec<bool>,
    pub message: Vec<bool>,
    pub violations: u64,
}

impl TrialOutcome {
    pub fn new(stages: usize) -> Self {
        TrialOutcome {
            interference: vec![false; stages],
            message: vec![false; stages],
            violations: 0,
        }
    }

    pub fn into_counts(self) -> Counts {
        let block = self.interference.iter().chain(&self.message).any(|&e| e);
        Counts {
            trials: 1,
            interference: self.interference.iter().map(|&e| u64::from(e)).collect(),
            message: self.message.iter().map(|&e| u64::from(e)).collect(),
            block: u64::from(block),
            violations: u64::from(self.violations > 0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // k = 10, n = 100: (0.05523, 0.17437) to five digits.
        let (lo, hi) = wilson_interval(10, 100, Z95);
        assert!((lo - 0.05523).abs() < 5e-5, "{lo}");
        assert!((hi - 0.17437).abs() < 5e-5, "{hi}");
        let (lo, hi) = wilson_interval(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(50, 50, Z95);
        assert!(lo > 0.9);
        assert!(hi > 1.0 - 1e-12 && hi <= 1.0);
    }

    #[test]
    fn merge_adds() {
        let mut t = TrialOutcome::new(2);
        t.message[1] = true;
        let c = Counts::zero(2).merge(t.into_counts()).merge(TrialOutcome::new(2).into_counts());
        let s = c.finish();
        assert_eq!(s.trials, 2);
        assert_eq!(s.per_stage_message_errors, vec![0, 1]);
        assert_eq!(s.block_errors, 1);
        assert_eq!(s.block_error_rate(), 0.5);
    }
}
