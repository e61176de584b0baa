//! Linear codes over prime fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `p^k` for codes we are willing to enumerate.
pub const MAX_CODEWORDS: u64 = 1 << 20;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Reduced row echelon form over Z_p. Returns the nonzero rows and their
/// pivot columns.
fn rref(rows: &[Vec<u32>], p: u64) -> (Vec<Vec<u32>>, Vec<usize>) {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| u64::from(x) % p).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(sel) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, sel);
        let inv = inv_mod(m[row][col], p);
        for x in m[row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..ncols {
                    m[r][c] = (m[r][c] + p - f * m[row][c] % p) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    m.truncate(row);
    let m = m
        .into_iter()
        .map(|r| r.into_iter().map(|x| x as u32).collect())
        .collect();
    (m, pivots)
}

/// Rank of a set of vectors over Z_p.
pub fn rank_mod_p(rows: &[Vec<u32>], p: u64) -> usize {
    rref(rows, p).1.len()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LinearCodeDoc {
    n: usize,
    k: usize,
    p: u64,
    generators: Vec<Vec<u32>>,
}

/// An `(n, k)` linear code over `Z_p` given by `k` independent generator rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LinearCodeDoc", into = "LinearCodeDoc")]
pub struct LinearCode {
    n: usize,
    p: u64,
    generators: Vec<Vec<u32>>,
    /// Parity checks: `c` is a codeword iff every check has zero inner
    /// product with `c` mod p.
    checks: Vec<Vec<u32>>,
}

impl TryFrom<LinearCodeDoc> for LinearCode {
    type Error = Error;

    fn try_from(doc: LinearCodeDoc) -> Result<Self> {
        if doc.generators.len() != doc.k {
            return Err(Error::invalid(
                "generators",
                format!("expected {} rows, found {}", doc.k, doc.generators.len()),
            ));
        }
        LinearCode::new(doc.n, doc.p, doc.generators)
    }
}

impl From<LinearCode> for LinearCodeDoc {
    fn from(code: LinearCode) -> Self {
        LinearCodeDoc {
            n: code.n,
            k: code.k(),
            p: code.p,
            generators: code.generators,
        }
    }
}

impl LinearCode {
    /// Builds a code from explicit generator rows, validating primality,
    /// row lengths, entry range and independence.
    pub fn new(n: usize, p: u64, generators: Vec<Vec<u32>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "must be positive"));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if generators.len() > n {
            return Err(Error::invalid(
                "k",
                format!("k = {} exceeds n = {n}", generators.len()),
            ));
        }
        for row in &generators {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if row.iter().any(|&x| u64::from(x) >= p) {
                return Err(Error::invalid("generators", "entry outside 0..p"));
            }
        }
        let (reduced, pivots) = rref(&generators, p);
        if pivots.len() != generators.len() {
            return Err(Error::invalid(
                "generators",
                "rows are linearly dependent over Z_p",
            ));
        }
        let size = (p as f64).powi(generators.len() as i32);
        if size > MAX_CODEWORDS as f64 {
            return Err(Error::invalid(
                "k",
                format!("p^k = {size} exceeds the supported {MAX_CODEWORDS} codewords"),
            ));
        }

        // One check per free column j: c_j - sum_r c_{pivot_r} * rref[r][j] = 0.
        let mut checks = Vec::with_capacity(n - pivots.len());
        for j in (0..n).filter(|j| !pivots.contains(j)) {
            let mut h = vec![0u32; n];
            h[j] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                let g = u64::from(reduced[r][j]);
                h[pc] = ((p - g) % p) as u32;
            }
            checks.push(h);
        }

        Ok(LinearCode {
            n,
            p,
            generators,
            checks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    /// Number of codewords, `p^k`.
    pub fn size(&self) -> u64 {
        self.p.pow(self.k() as u32)
    }

    /// Membership of an integer vector after componentwise reduction mod p.
    pub fn contains_reduced(&self, v: &[i64]) -> bool {
        debug_assert_eq!(v.len(), self.n);
        let p = self.p as i64;
        self.checks.iter().all(|h| {
            let s = h
                .iter()
                .zip(v)
                .fold(0i64, |acc, (&hi, &vi)| (acc + i64::from(hi) * vi.rem_euclid(p)) % p);
            s == 0
        })
    }

    /// All `p^k` codewords with entries in `0..p`, in the order of their
    /// message vectors (first generator varies slowest).
    pub fn codewords(&self) -> Vec<Vec<u32>> {
        let k = self.k();
        let p = self.p;
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut msg = vec![0u64; k];
        loop {
            let mut word = vec![0u64; self.n];
            for (m, g) in msg.iter().zip(&self.generators) {
                if *m != 0 {
                    for (w, &gi) in word.iter_mut().zip(g) {
                        *w = (*w + m * u64::from(gi)) % p;
                    }
                }
            }
            out.push(word.into_iter().map(|x| x as u32).collect());

            // Odometer over Z_p^k, last coordinate fastest.
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                msg[i] += 1;
                if msg[i] < p {
                    break;
                }
                msg[i] = 0;
            }
        }
    }
}

/// Samples a random `(n, k)` code over `Z_p` with independent generators.
/// The result is a deterministic function of `seed`.
pub fn make_linear_code(n: usize, k: usize, p: u64, seed: u64) -> Result<LinearCode> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k > n {
        return Err(Error::invalid("k", format!("k = {k} exceeds n = {n}")));
    }
    if n == 0 {
        return Err(Error::invalid("n", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let rows: Vec<Vec<u32>> = (0..k)
            .map(|_| (0..n).map(|_| rng.random_range(0..p) as u32).collect())
            .collect();
        if rank_mod_p(&rows, p) == k {
            return LinearCode::new(n, p, rows);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&x| is_prime(x)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn zero_dimensional_code() {
        let code = make_linear_code(2, 0, 5, 1).unwrap();
        assert_eq!(code.codewords(), vec![vec![0, 0]]);
        assert!(code.contains_reduced(&[5, -10]));
        assert!(!code.contains_reduced(&[1, 0]));
    }

    #[test]
    fn full_code_spans_everything() {
        let code = make_linear_code(2, 2, 5, 9).unwrap();
        let words: HashSet<_> = code.codewords().into_iter().collect();
        assert_eq!(words.len(), 25);
        assert!(code.contains_reduced(&[3, 4]));
    }

    #[test]
    fn enumerated_size_matches_rank() {
        let code = make_linear_code(4, 2, 7, 42).unwrap();
        assert_eq!(rank_mod_p(code.generators(), 7), 2);
        let words: HashSet<_> = code.codewords().into_iter().collect();
        assert_eq!(words.len(), 49);
        for w in &words {
            let v: Vec<i64> = w.iter().map(|&x| i64::from(x)).collect();
            assert!(code.contains_reduced(&v));
        }
        // Exactly p^k of the p^n vectors pass the parity checks.
        let mut members = 0;
        for idx in 0..7i64.pow(4) {
            let v: Vec<i64> = (0..4).map(|d| (idx / 7i64.pow(d)) % 7).collect();
            if code.contains_reduced(&v) {
                members += 1;
            }
        }
        assert_eq!(members, 49);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = make_linear_code(6, 3, 5, 123).unwrap();
        let b = make_linear_code(6, 3, 5, 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(make_linear_code(4, 2, 6, 0), Err(Error::NotPrime(6))));
        assert!(make_linear_code(2, 3, 5, 0).is_err());
        let dep = LinearCode::new(2, 5, vec![vec![1, 2], vec![2, 4]]);
        assert!(dep.is_err());
    }

    #[test]
    fn serde_validates() {
        let code = make_linear_code(3, 1, 5, 2).unwrap();
        let json = serde_json::to_string(&code).unwrap();
        let back: LinearCode = serde_json::from_str(&json).unwrap();
        assert_eq!(code, back);
        let bad = r#"{"n":2,"k":1,"p":4,"generators":[[1,2]]}"#;
        assert!(serde_json::from_str::<LinearCode>(bad).is_err());
    }
}
