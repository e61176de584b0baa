//! Lattice and codebook selection for finite block lengths.

use crate::error::{Error, Result};
use crate::lattice::{ball_volume, build_codebook, construction_a, make_linear_code, target_size, Codebook, Lattice};
use crate::rng::derive_seed;

/// The search for a scale starts this far above the volume-matched one and
/// steps down by `STEP` until enough words fit.
pub(crate) const START: f64 = 1.15;
pub(crate) const STEP: f64 = 0.99;
pub(crate) const MAX_STEPS: usize = 250;

/// Ordering key for candidate designs: absolute squared minimum distance,
/// then fewer minimal vectors.
fn design_key(lat: &Lattice) -> (f64, std::cmp::Reverse<u64>) {
    (lat.min_distance_sq(), std::cmp::Reverse(lat.kissing_number()))
}

fn better(a: &(f64, std::cmp::Reverse<u64>), b: &(f64, std::cmp::Reverse<u64>)) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Equal => a.1 > b.1,
        o => o == std::cmp::Ordering::Greater,
    }
}

/// Squared minimum distance between codewords and the number of pairs
/// attaining it. Codebooks above [`PAIR_LIMIT`] words fall back to the
/// lattice's own minimum distance and kissing number.
fn codebook_key(cb: &Codebook) -> (f64, std::cmp::Reverse<u64>) {
    let words = cb.words();
    if words.len() < 2 || words.len() > PAIR_LIMIT {
        return design_key(cb.lattice());
    }
    let mut best = f64::INFINITY;
    let mut count = 0u64;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            if d < best * (1.0 - 1e-9) {
                best = d;
                count = 1;
            } else if d <= best * (1.0 + 1e-9) {
                count += 1;
            }
        }
    }
    (best, std::cmp::Reverse(count))
}

const PAIR_LIMIT: usize = 4096;

/// The Construction-A lattice (γ = 1) with the largest minimum norm among
/// `budget` random `[n, k]` codes over `F_p`, fewest minimal vectors on
/// ties, then the earliest candidate.
pub fn select_base_lattice(n: usize, p: u64, k: usize, budget: usize, seed: u64) -> Result<Lattice> {
    if budget == 0 {
        return Err(Error::invalid("search_budget", "must be at least 1"));
    }
    let mut best: Option<((f64, std::cmp::Reverse<u64>), Lattice)> = None;
    for c in 0..budget {
        let lat = candidate_lattice(n, p, k, seed, c)?;
        let key = design_key(&lat);
        if best.as_ref().is_none_or(|(b, _)| better(&key, b)) {
            best = Some((key, lat));
        }
    }
    Ok(best.expect("budget is positive").1)
}

fn candidate_lattice(n: usize, p: u64, k: usize, seed: u64, c: usize) -> Result<Lattice> {
    let code = make_linear_code(n, k, p, derive_seed(&[seed, c as u64]))?;
    construction_a(code, 1.0)
}

/// Scale of `base` whose cell volume equals the shaping-ball volume over
/// `m`, so the ball holds about `m` points.
pub fn volume_matched_scale(base: &Lattice, power: f64, m: usize) -> f64 {
    let n = base.dim();
    let target = ball_volume(n, (n as f64 * power).sqrt()) / m as f64;
    (target / base.fundamental_volume()).powf(1.0 / n as f64)
}

/// The `⌈2^(n·rate)⌉` lowest-energy words of the coarsest scaled copy of
/// `base` (on a 1% grid) that still fits that many words under the power
/// constraint.
pub fn design_codebook(
    base: &Lattice,
    power: f64,
    rate: f64,
    shift_trials: usize,
    seed: u64,
) -> Result<Codebook> {
    let m = target_size(base.dim(), rate);
    let mut scale = START * volume_matched_scale(base, power, m);
    let mut last = Error::CodebookTooSmall { found: 0, target: m };
    for step in 0..MAX_STEPS {
        let lat = base.scale(scale)?;
        match build_codebook(&lat, power, rate, shift_trials, derive_seed(&[seed, step as u64])) {
            Ok(cb) => return cb.truncated(m),
            Err(e @ Error::CodebookTooSmall { .. }) => last = e,
            Err(e) => return Err(e),
        }
        scale *= STEP;
    }
    Err(last)
}

/// Designs a codebook on each of `budget` candidate codes and keeps the one
/// whose lattice has the largest minimum distance after scaling.
#[allow(clippy::too_many_arguments)]
pub fn design_best_codebook(
    n: usize,
    p: u64,
    k: usize,
    budget: usize,
    power: f64,
    rate: f64,
    shift_trials: usize,
    seed: u64,
) -> Result<Codebook> {
    if budget == 0 {
        return Err(Error::invalid("search_budget", "must be at least 1"));
    }
    let mut best: Option<((f64, std::cmp::Reverse<u64>), Codebook)> = None;
    for c in 0..budget {
        let base = candidate_lattice(n, p, k, seed, c)?;
        let cb = design_codebook(&base, power, rate, shift_trials, derive_seed(&[seed, c as u64, 1]))?;
        let key = codebook_key(&cb);
        if best.as_ref().is_none_or(|(b, _)| better(&key, b)) {
            best = Some((key, cb));
        }
    }
    Ok(best.expect("budget is positive").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::mean_power;

    #[test]
    fn best_of_budget_is_monotone() {
        let one = select_base_lattice(6, 3, 3, 1, 9).unwrap();
        let many = select_base_lattice(6, 3, 3, 20, 9).unwrap();
        assert!(many.min_norm_integer() >= one.min_norm_integer());
        assert_eq!(many.gamma(), 1.0);
        let one = design_best_codebook(6, 2, 3, 1, 2.0, 0.5, 4, 9).unwrap();
        let many = design_best_codebook(6, 2, 3, 10, 2.0, 0.5, 4, 9).unwrap();
        assert!(many.lattice().min_distance_sq() >= one.lattice().min_distance_sq());
        assert_eq!(many.len(), 8);
    }

    #[test]
    fn codebook_has_target_size_and_power() {
        let base = select_base_lattice(4, 3, 2, 5, 1).unwrap();
        let cb = design_codebook(&base, 3.0, 1.0, 4, 2).unwrap();
        assert_eq!(cb.len(), 16);
        assert!(cb.words().iter().all(|w| mean_power(w) <= 3.0 + 1e-12));
        let single = design_codebook(&base, 3.0, 0.0, 4, 2).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn volume_scale_round_trip() {
        let base = select_base_lattice(3, 5, 1, 3, 4).unwrap();
        let s = volume_matched_scale(&base, 2.0, 10);
        let v = base.scale(s).unwrap().fundamental_volume();
        let expect = ball_volume(3, 6f64.sqrt()) / 10.0;
        assert!((v - expect).abs() < 1e-9 * expect);
    }
}
