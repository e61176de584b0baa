//! The real three-user Gaussian interference channel
//! `Y_j = X_j + Σ_{k≠j} h_jk X_k + Z_j`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::mean_power;
use crate::rng;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_DEN: i64 = 10_000;

/// Integer pair `(p, q)`, `gcd(p, q) = 1`, `q > 0`, certifying that the
/// cyclic cross-gain ratio product equals `p/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub p: i64,
    pub q: i64,
}

impl Witness {
    pub fn ratio(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// A 3×3 gain matrix with unit diagonal. Indices are zero-based: `h[0][1]`
/// is the gain from transmitter 2 to receiver 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelMatrix3 {
    pub h: [[f64; 3]; 3],
    pub witness: Option<Witness>,
}

impl ChannelMatrix3 {
    /// Validates the unit diagonal (within `tol`) and searches for a
    /// membership witness.
    pub fn new(h: [[f64; 3]; 3], tol: f64, max_den: i64) -> Result<Self> {
        check_diagonal(&h, tol)?;
        let witness = if off_diagonal_nonzero(&h).is_ok() {
            class_h1_membership(&h, tol, max_den)?
        } else {
            None
        };
        Ok(ChannelMatrix3 { h, witness })
    }

    /// The matrix with every cross gain equal to `a`.
    pub fn symmetric(a: f64) -> Self {
        let mut h = [[a; 3]; 3];
        for (i, row) in h.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        ChannelMatrix3 {
            h,
            witness: Some(Witness { p: 1, q: 1 }),
        }
    }

    /// `(h12/h21)(h23/h32)(h31/h13)`.
    pub fn ratio_product(&self) -> f64 {
        ratio_product(&self.h)
    }

    pub fn gain(&self, rx: usize, tx: usize) -> f64 {
        self.h[rx][tx]
    }
}

/// Cyclic cross-gain ratio product of a gain matrix.
pub fn ratio_product(h: &[[f64; 3]; 3]) -> f64 {
    (h[0][1] / h[1][0]) * (h[1][2] / h[2][1]) * (h[2][0] / h[0][2])
}

fn check_diagonal(h: &[[f64; 3]; 3], tol: f64) -> Result<()> {
    for i in 0..3 {
        if !((h[i][i] - 1.0).abs() <= tol) {
            return Err(Error::NonUnitDiagonal(i + 1));
        }
    }
    Ok(())
}

fn off_diagonal_nonzero(h: &[[f64; 3]; 3]) -> Result<()> {
    for (i, row) in h.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            if i != j && g == 0.0 {
                return Err(Error::ZeroGain { row: i + 1, col: j + 1 });
            }
        }
    }
    Ok(())
}

/// Smallest-denominator fraction `p/q` with `q ≤ max_den` and
/// `|x − p/q| ≤ tol`, if any.
///
/// Every such fraction is a best approximation of the first kind, so it is
/// found among the convergents and semiconvergents of `x`.
pub fn rational_approximation(x: f64, tol: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() || max_den < 1 {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let target = x.abs();
    let within = |p: i128, q: i128| (target - p as f64 / q as f64).abs() <= tol;

    // Convergents h_{k}/k_{k} with h_{-1}=1, k_{-1}=0, h_{-2}=0, k_{-2}=1.
    let (mut h_prev, mut k_prev): (i128, i128) = (0, 1);
    let (mut h_cur, mut k_cur): (i128, i128) = (1, 0);
    let mut rem = target;
    for _ in 0..64 {
        let a = rem.floor();
        if a > 1e15 {
            break;
        }
        let a_int = a as i128;
        // Semiconvergents (h_prev + t h_cur)/(k_prev + t k_cur), t = 1..=a,
        // in increasing denominator order; t = a is the next convergent.
        let lo_t = if k_cur == 0 { a_int } else { 1 };
        for t in lo_t..=a_int {
            let (h, k) = (h_prev + t * h_cur, k_prev + t * k_cur);
            if k > max_den as i128 {
                return None;
            }
            if k > 0 && within(h, k) {
                return Some(((sign as i128 * h) as i64, k as i64));
            }
        }
        let (h_next, k_next) = (a_int * h_cur + h_prev, a_int * k_cur + k_prev);
        h_prev = h_cur;
        k_prev = k_cur;
        h_cur = h_next;
        k_cur = k_next;
        let frac = rem - a;
        if frac == 0.0 {
            break;
        }
        rem = 1.0 / frac;
    }
    None
}

/// Tests class-H1 membership: returns the witness `(p, q)` when the ratio
/// product has a rational approximation within `tol` with `q ≤ max_den`.
pub fn class_h1_membership(h: &[[f64; 3]; 3], tol: f64, max_den: i64) -> Result<Option<Witness>> {
    off_diagonal_nonzero(h)?;
    check_diagonal(h, tol)?;
    Ok(rational_approximation(ratio_product(h), tol, max_den).map(|(p, q)| Witness { p, q }))
}

/// The `{"h": [[..]; 3], "tol": .., "max_den": ..}` channel file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub h: [[f64; 3]; 3],
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_den")]
    pub max_den: i64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_max_den() -> i64 {
    DEFAULT_MAX_DEN
}

/// Receiver noise description for one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub seed: u64,
    pub block: u64,
    /// Per-sample variance σ². Zero disables noise.
    pub variance: f64,
}

impl Noise {
    pub fn unit(seed: u64) -> Self {
        Noise {
            seed,
            block: 0,
            variance: 1.0,
        }
    }

    /// The noise block for receiver `rx` (zero-based).
    pub fn sample(&self, rx: usize, n: usize) -> Vec<f64> {
        if self.variance == 0.0 {
            return vec![0.0; n];
        }
        let sd = self.variance.sqrt();
        let mut rng = rng::stream(&[self.seed, rx as u64, self.block]);
        (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sd * z
            })
            .collect()
    }
}

/// Sends one block through the channel. Each receiver draws its own noise
/// stream keyed by `(seed, receiver, block)`.
pub fn transmit(h: &ChannelMatrix3, x: [&[f64]; 3], noise: &Noise) -> Result<[Vec<f64>; 3]> {
    let n = x[0].len();
    for xi in &x[1..] {
        if xi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: xi.len(),
            });
        }
    }
    if !(noise.variance >= 0.0) {
        return Err(Error::invalid("noise_var", "must be nonnegative"));
    }
    let mut out: [Vec<f64>; 3] = Default::default();
    for (j, y) in out.iter_mut().enumerate() {
        let mut yj = noise.sample(j, n);
        for (k, xk) in x.iter().enumerate() {
            let g = h.h[j][k];
            if g != 0.0 {
                for (acc, &v) in yj.iter_mut().zip(xk.iter()) {
                    *acc += g * v;
                }
            }
        }
        *y = yj;
    }
    Ok(out)
}

/// Average power constraint `(1/n) Σ x² ≤ P + tol`.
pub fn check_power(x: &[f64], power: f64, tol: f64) -> bool {
    !x.is_empty() && mean_power(x) <= power + tol
}
