//! Construction-A lattices `γ·{v ∈ Zⁿ : v mod p ∈ C}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::code::LinearCode;
use crate::error::{Error, Result};

/// A Construction-A lattice scaled by `gamma`.
///
/// The lattice is the union of the `p^k` cosets `c + pZⁿ`, `c ∈ C`, scaled
/// by `gamma`. Coset representatives are cached so quantization is a scan
/// over codewords with per-coordinate rounding inside each coset.
#[derive(Debug, Clone)]
pub struct Lattice {
    code: LinearCode,
    gamma: f64,
    cosets: Arc<Vec<Vec<u32>>>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code && self.gamma == other.gamma
    }
}

/// Builds the Construction-A lattice of `code`, scaled by `gamma`.
pub fn construction_a(code: LinearCode, gamma: f64) -> Result<Lattice> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma", format!("must be positive, got {gamma}")));
    }
    let cosets = Arc::new(code.codewords());
    Ok(Lattice {
        code,
        gamma,
        cosets,
    })
}

impl Lattice {
    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.code.n()
    }

    /// Coset representatives: the codewords with entries in `0..p`.
    pub(crate) fn cosets(&self) -> &[Vec<u32>] {
        &self.cosets
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }

    /// Volume of the fundamental region, `γⁿ p^(n-k)`.
    pub fn fundamental_volume(&self) -> f64 {
        let n = self.dim() as i32;
        let p = self.code.p() as f64;
        self.gamma.powi(n) * p.powi(n - self.code.k() as i32)
    }

    /// Maps integer coordinates to the lattice point `γ·v`.
    pub fn point(&self, v: &[i64]) -> Vec<f64> {
        v.iter().map(|&x| self.gamma * x as f64).collect()
    }

    /// Whether an integer vector satisfies the membership predicate.
    pub fn contains_integer(&self, v: &[i64]) -> bool {
        self.code.contains_reduced(v)
    }

    /// True iff `w` lies within `tol` (∞-norm) of a lattice point.
    pub fn is_lattice_point(&self, w: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(w.len())?;
        if !(tol >= 0.0) {
            return Err(Error::invalid("tol", "must be nonnegative"));
        }
        let p = self.code.p() as i64;
        // Candidate residues per coordinate: integers in [(w-tol)/γ, (w+tol)/γ].
        let mut allowed: Vec<Vec<i64>> = Vec::with_capacity(w.len());
        for &wi in w {
            let lo = ((wi - tol) / self.gamma).ceil();
            let hi = ((wi + tol) / self.gamma).floor();
            if lo > hi {
                return Ok(false);
            }
            let count = (hi - lo) as i64 + 1;
            let lo = lo as i64;
            let residues: Vec<i64> = if count >= p {
                (0..p).collect()
            } else {
                (0..count).map(|d| lo + d).collect()
            };
            allowed.push(residues);
        }
        let mut idx = vec![0usize; w.len()];
        let mut v = vec![0i64; w.len()];
        loop {
            for (d, r) in allowed.iter().enumerate() {
                v[d] = r[idx[d]];
            }
            if self.contains_integer(&v) {
                return Ok(true);
            }
            let mut d = w.len();
            loop {
                if d == 0 {
                    return Ok(false);
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < allowed[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// Integer coordinates of the lattice point nearest to `y`.
    ///
    /// Exact: each coset `c + pZⁿ` is quantized coordinate-wise, then the
    /// best coset wins. Ties go to the lexicographically smallest integer
    /// vector.
    pub fn nearest_integer(&self, y: &[f64]) -> Result<Vec<i64>> {
        self.check_dim(y.len())?;
        let n = self.dim();
        let p = self.code.p() as usize;
        let pf = p as f64;

        // table[d*p + r] = (best integer ≡ r mod p near u_d, squared error)
        let mut table: Vec<(i64, f64)> = Vec::with_capacity(n * p);
        for &yi in y {
            let u = yi / self.gamma;
            for r in 0..p {
                let t = ((u - r as f64) / pf).floor();
                let lo = r as f64 + pf * t;
                let hi = lo + pf;
                let (dlo, dhi) = (u - lo, hi - u);
                if dlo <= dhi {
                    table.push((lo as i64, dlo * dlo));
                } else {
                    table.push((hi as i64, dhi * dhi));
                }
            }
        }

        let mut best: Option<(f64, usize)> = None;
        for (ci, c) in self.cosets.iter().enumerate() {
            let mut dist = 0.0;
            for (d, &r) in c.iter().enumerate() {
                dist += table[d * p + r as usize].1;
            }
            match best {
                None => best = Some((dist, ci)),
                Some((bd, bi)) => {
                    if dist < bd {
                        best = Some((dist, ci));
                    } else if dist == bd {
                        let cand = self.coset_point(&table, p, ci);
                        let cur = self.coset_point(&table, p, bi);
                        if cand < cur {
                            best = Some((dist, ci));
                        }
                    }
                }
            }
        }
        let (_, bi) = best.expect("a code always contains the zero word");
        Ok(self.coset_point(&table, p, bi))
    }

    fn coset_point(&self, table: &[(i64, f64)], p: usize, ci: usize) -> Vec<i64> {
        self.cosets[ci]
            .iter()
            .enumerate()
            .map(|(d, &r)| table[d * p + r as usize].0)
            .collect()
    }

    /// The lattice point nearest to `y`.
    pub fn nearest_point(&self, y: &[f64]) -> Result<Vec<f64>> {
        Ok(self.point(&self.nearest_integer(y)?))
    }

    /// Scales the lattice by `c`. The sign is absorbed by `Λ = -Λ`.
    pub fn scale(&self, c: f64) -> Result<Lattice> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::invalid("c", "scale factor must be finite and nonzero"));
        }
        Ok(Lattice {
            code: self.code.clone(),
            gamma: self.gamma * c.abs(),
            cosets: Arc::clone(&self.cosets),
        })
    }

    /// Squared length of the shortest nonzero integer vector in the
    /// unscaled lattice.
    pub fn min_norm_integer(&self) -> u64 {
        self.shortest_vectors().0
    }

    /// Number of lattice vectors of minimum norm.
    pub fn kissing_number(&self) -> u64 {
        self.shortest_vectors().1
    }

    fn shortest_vectors(&self) -> (u64, u64) {
        let p = self.code.p();
        let n = self.dim() as u64;
        // Multiples of p·e_i always reach norm p².
        let (mut best, mut count) = (p * p, 2 * n);
        for c in self.cosets.iter() {
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            let mut norm = 0u64;
            let mut reps = 1u64;
            for &x in c {
                let x = u64::from(x);
                let m = x.min(p - x);
                norm += m * m;
                if x != 0 && 2 * x == p {
                    reps *= 2;
                }
            }
            if norm < best {
                (best, count) = (norm, reps);
            } else if norm == best {
                count += reps;
            }
        }
        (best, count)
    }

    /// Squared minimum distance between distinct lattice points.
    pub fn min_distance_sq(&self) -> f64 {
        self.gamma * self.gamma * self.min_norm_integer() as f64
    }
}

/// Scales `lat` by the nonzero factor `c`.
pub fn scale_lattice(lat: &Lattice, c: f64) -> Result<Lattice> {
    lat.scale(c)
}

/// JSON form of a lattice or codebook:
/// `{n, k, p, gamma, generators, shift, power}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub n: usize,
    pub k: usize,
    pub p: u64,
    pub gamma: f64,
    pub generators: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
}

impl From<&Lattice> for LatticeDoc {
    fn from(lat: &Lattice) -> Self {
        LatticeDoc {
            n: lat.dim(),
            k: lat.code.k(),
            p: lat.code.p(),
            gamma: lat.gamma,
            generators: lat.code.generators().to_vec(),
            shift: None,
            power: None,
        }
    }
}

impl LatticeDoc {
    pub fn to_lattice(&self) -> Result<Lattice> {
        if self.generators.len() != self.k {
            return Err(Error::invalid(
                "generators",
                format!("expected {} rows, found {}", self.k, self.generators.len()),
            ));
        }
        let code = LinearCode::new(self.n, self.p, self.generators.clone())?;
        construction_a(code, self.gamma)
    }
}
