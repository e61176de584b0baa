//! Spherically shaped lattice codebooks `(Λ + s) ∩ S`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::construction::{Lattice, LatticeDoc};
use crate::error::{Error, Result};

/// Largest codebook we enumerate before giving up.
pub const MAX_WORDS: usize = 1 << 21;

/// Mean power `(1/n) Σ xᵢ²` of a block.
pub fn mean_power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// Number of words needed to carry `rate` bits per dimension over `n`
/// dimensions, `⌈2^(n·rate)⌉`.
pub fn target_size(n: usize, rate: f64) -> usize {
    let exact = (n as f64 * rate).exp2();
    // Absorb floating noise so that e.g. rate 0.5, n 8 asks for 16, not 17.
    (exact - 1e-9).ceil().max(1.0) as usize
}

/// Volume of the n-ball of radius `r`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    // V_n(r) = π^(n/2) r^n / Γ(n/2 + 1), with Γ evaluated by recursion
    // from Γ(1) = 1 or Γ(1/2) = √π.
    let half = n as f64 / 2.0;
    let mut gamma = if n % 2 == 0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    while x < half + 1.0 - 1e-12 {
        gamma *= x;
        x += 1.0;
    }
    std::f64::consts::PI.powf(half) * r.powi(n as i32) / gamma
}

/// The words of `(Λ + s) ∩ {w : ‖w‖²/n ≤ P}`.
///
/// Words are stored with their integer lattice coordinates (`w = γ·v + s`)
/// and sorted by energy, ties broken lexicographically on `v`.
#[derive(Debug, Clone)]
pub struct Codebook {
    lattice: Lattice,
    shift: Vec<f64>,
    power: f64,
    coords: Vec<Vec<i64>>,
    words: Vec<Vec<f64>>,
}

impl Codebook {
    /// Enumerates the codebook for a fixed shift.
    pub fn with_shift(lattice: &Lattice, power: f64, shift: Vec<f64>) -> Result<Codebook> {
        let n = lattice.dim();
        if shift.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: shift.len(),
            });
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::invalid("power", format!("must be positive, got {power}")));
        }
        let coords = enumerate_sphere(lattice, &shift, power)?;
        let mut entries: Vec<(f64, Vec<i64>, Vec<f64>)> = coords
            .into_iter()
            .map(|v| {
                let w: Vec<f64> = v
                    .iter()
                    .zip(&shift)
                    .map(|(&vi, si)| lattice.gamma() * vi as f64 + si)
                    .collect();
                (w.iter().map(|x| x * x).sum(), v, w)
            })
            .collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let (coords, words) = entries.into_iter().map(|(_, v, w)| (v, w)).unzip();
        Ok(Codebook {
            lattice: lattice.clone(),
            shift,
            power,
            coords,
            words,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn words(&self) -> &[Vec<f64>] {
        &self.words
    }

    /// Integer lattice coordinates of each word.
    pub fn coords(&self) -> &[Vec<i64>] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Bits per dimension carried by the full codebook.
    pub fn rate(&self) -> f64 {
        (self.len() as f64).log2() / self.dim() as f64
    }

    /// The `m` lowest-energy words, used as the message set.
    pub fn truncated(&self, m: usize) -> Result<Codebook> {
        if m > self.len() {
            return Err(Error::CodebookTooSmall {
                found: self.len(),
                target: m,
            });
        }
        Ok(Codebook {
            lattice: self.lattice.clone(),
            shift: self.shift.clone(),
            power: self.power,
            coords: self.coords[..m].to_vec(),
            words: self.words[..m].to_vec(),
        })
    }

    /// Index of the word with the given integer coordinates.
    pub fn index_of(&self, v: &[i64]) -> Option<usize> {
        self.coords.iter().position(|c| c.as_slice() == v)
    }

    pub fn to_doc(&self) -> LatticeDoc {
        let mut doc = LatticeDoc::from(&self.lattice);
        doc.shift = Some(self.shift.clone());
        doc.power = Some(self.power);
        doc
    }
}

fn enumerate_sphere(lattice: &Lattice, shift: &[f64], power: f64) -> Result<Vec<Vec<i64>>> {
    let n = lattice.dim();
    let p = lattice.code().p() as i64;
    let gamma = lattice.gamma();
    let budget = n as f64 * power;
    let mut out = Vec::new();
    let mut v = vec![0i64; n];

    // Depth-first over coordinates inside each coset c + pZⁿ.
    fn descend(
        d: usize,
        rem: f64,
        coset: &[u32],
        ctx: (&[f64], f64, i64, f64),
        v: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) -> Result<()> {
        let (shift, gamma, p, power) = ctx;
        if d == v.len() {
            let w: Vec<f64> = v
                .iter()
                .zip(shift)
                .map(|(&vi, si)| gamma * vi as f64 + si)
                .collect();
            if mean_power(&w) <= power {
                if out.len() == MAX_WORDS {
                    return Err(Error::invalid(
                        "power",
                        format!("codebook exceeds {MAX_WORDS} words"),
                    ));
                }
                out.push(v.clone());
            }
            return Ok(());
        }
        let r = rem.max(0.0).sqrt();
        // Slight widening; the exact power test happens at the leaf.
        let lo = ((-r - shift[d]) / gamma - 1e-9).ceil() as i64;
        let hi = ((r - shift[d]) / gamma + 1e-9).floor() as i64;
        let c = i64::from(coset[d]);
        let mut m = (lo - c).div_euclid(p);
        loop {
            let vi = c + p * m;
            if vi > hi {
                break;
            }
            if vi >= lo {
                let x = gamma * vi as f64 + shift[d];
                v[d] = vi;
                descend(d + 1, rem - x * x, coset, ctx, v, out)?;
            }
            m += 1;
        }
        Ok(())
    }

    let budget_slack = budget * (1.0 + 1e-12);
    for coset in lattice.cosets() {
        descend(0, budget_slack, coset, (shift, gamma, p, power), &mut v, &mut out)?;
    }
    Ok(out)
}

/// Searches `shift_trials` uniform shifts in `[0, γp)ⁿ` and keeps the
/// largest codebook. Fails if none reaches `⌈2^(n·target_rate)⌉` words.
pub fn build_codebook(
    lattice: &Lattice,
    power: f64,
    target_rate: f64,
    shift_trials: usize,
    seed: u64,
) -> Result<Codebook> {
    if !(target_rate >= 0.0) {
        return Err(Error::invalid("target_rate", "must be nonnegative"));
    }
    if shift_trials == 0 {
        return Err(Error::invalid("shift_trials", "must be at least 1"));
    }
    let n = lattice.dim();
    let target = target_size(n, target_rate);
    let cell = lattice.gamma() * lattice.code().p() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Codebook> = None;
    for _ in 0..shift_trials {
        let shift: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * cell).collect();
        let cb = Codebook::with_shift(lattice, power, shift)?;
        if best.as_ref().is_none_or(|b| cb.len() > b.len()) {
            best = Some(cb);
        }
    }
    let best = best.expect("at least one trial");
    if best.len() < target {
        return Err(Error::CodebookTooSmall {
            found: best.len(),
            target,
        });
    }
    Ok(best)
}
