//! Han–Kobayashi symmetric-rate baseline.
//!
//! Each user splits power `P` into a private part `(1−β)P` and a common part
//! `βP`. Receiver j decodes its own private and common messages together
//! with both interfering common messages, treating the interfering private
//! signals as noise. For a fixed β the symmetric rate `R = R_p + R_c` is the
//! optimum of a two-variable LP over all multiple-access constraints; the
//! split is found by a grid search over β. This evaluates a subset of the
//! full four-part Han–Kobayashi region and is therefore a lower bound on it.

use rayon::prelude::*;

use super::capacity;

pub const DEFAULT_HK_GRID: usize = 1001;

/// One MAC constraint `x·R_p + c·R_c ≤ rhs`.
#[derive(Debug, Clone, Copy)]
struct Constraint {
    x: f64,
    c: f64,
    rhs: f64,
}

fn constraints(power: f64, sigma2: f64, a2: f64, beta: f64) -> Vec<Constraint> {
    let private = (1.0 - beta) * power;
    let common = beta * power;
    let noise = sigma2 + 2.0 * a2 * private;
    let mut out = Vec::with_capacity(11);
    for own_private in [0.0, 1.0] {
        for own_common in [0.0, 1.0] {
            for others in [0.0, 1.0, 2.0] {
                if own_private + own_common + others == 0.0 {
                    continue;
                }
                let rx = own_private * private + own_common * common + others * a2 * common;
                out.push(Constraint {
                    x: own_private,
                    c: own_common + others,
                    rhs: capacity(rx / noise),
                });
            }
        }
    }
    out
}

/// Maximizes `R_p + R_c` over `R_p, R_c ≥ 0` subject to the constraints by
/// enumerating vertices of the feasible polygon.
fn max_symmetric_rate(cons: &[Constraint]) -> f64 {
    let mut lines: Vec<Constraint> = cons.to_vec();
    // Axes as constraints -R ≤ 0.
    lines.push(Constraint { x: -1.0, c: 0.0, rhs: 0.0 });
    lines.push(Constraint { x: 0.0, c: -1.0, rhs: 0.0 });
    let feasible = |rp: f64, rc: f64| {
        lines
            .iter()
            .all(|l| l.x * rp + l.c * rc <= l.rhs + 1e-12 * (1.0 + l.rhs.abs()))
    };
    let mut best = 0.0f64;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a, b) = (lines[i], lines[j]);
            let det = a.x * b.c - a.c * b.x;
            if det.abs() < 1e-15 {
                continue;
            }
            let rp = (a.rhs * b.c - a.c * b.rhs) / det;
            let rc = (a.x * b.rhs - a.rhs * b.x) / det;
            if feasible(rp, rc) {
                best = best.max(rp + rc);
            }
        }
    }
    best
}

/// Symmetric rate of the private/common split at common fraction `beta`.
pub fn hk_rate_at_split(power: f64, sigma2: f64, a: f64, beta: f64) -> f64 {
    max_symmetric_rate(&constraints(power, sigma2, a * a, beta))
}

/// Best symmetric Han–Kobayashi rate over `grid_size` evenly spaced common
/// fractions in `[0, 1]`.
pub fn hk_sym_rate(power: f64, sigma2: f64, a: f64, grid_size: usize) -> f64 {
    if !(power > 0.0) {
        return 0.0;
    }
    let grid = grid_size.max(2);
    (0..grid)
        .into_par_iter()
        .map(|g| hk_rate_at_split(power, sigma2, a, g as f64 / (grid - 1) as f64))
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_interference_is_point_to_point() {
        for p in [0.5, 3.0, 100.0] {
            let r = hk_sym_rate(p, 1.0, 0.0, 11);
            assert!((r - capacity(p)).abs() < 1e-12, "{r}");
        }
    }

    #[test]
    fn vanishing_power() {
        assert!(hk_sym_rate(1e-12, 1.0, 1.0, 101) < 1e-11);
        assert_eq!(hk_sym_rate(0.0, 1.0, 1.0, 101), 0.0);
    }

    #[test]
    fn unit_gain_bracket() {
        let r = hk_sym_rate(1.0, 1.0, 1.0, 10_000);
        assert!(r <= 0.5 + 1e-12);
        assert!(r >= 1.0 / 3.0 - 1e-12);
        // All-common split alone attains exactly a third of a bit.
        assert!((hk_rate_at_split(1.0, 1.0, 1.0, 1.0) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lp_vertex_matches_brute_force() {
        // Dense grid over (R_p, R_c) as an independent check of the LP.
        for &(p, a, beta) in &[(10.0, 2.5, 0.3), (1.0, 0.5, 0.7), (50.0, 1.2, 0.5)] {
            let cons = constraints(p, 1.0, a * a, beta);
            let lp = max_symmetric_rate(&cons);
            let steps = 800;
            let cap = 5.0;
            let mut brute = 0.0f64;
            for i in 0..=steps {
                for j in 0..=steps {
                    let rp = cap * i as f64 / steps as f64;
                    let rc = cap * j as f64 / steps as f64;
                    if cons.iter().all(|c| c.x * rp + c.c * rc <= c.rhs) {
                        brute = brute.max(rp + rc);
                    }
                }
            }
            assert!(lp >= brute - 1e-12);
            assert!(lp - brute < 2.0 * cap / steps as f64, "lp {lp} brute {brute}");
        }
    }

    #[test]
    fn below_single_user_bound() {
        for &(p, s, a) in &[(1.0, 1.0, 1.0), (100.0, 2.0, 3.0), (5.0, 0.5, 0.2)] {
            assert!(hk_sym_rate(p, s, a, 101) <= capacity(p / s) + 1e-12);
        }
    }
}
