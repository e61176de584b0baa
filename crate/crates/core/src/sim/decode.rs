//! Minimum-distance decoders over codebooks, aggregate sets and lattices.

use super::config::{DecoderMode, AUTO_LIST_LIMIT};
use crate::error::Result;
use crate::lattice::{Codebook, Lattice};

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Points agree to within floating rounding.
pub(crate) fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + y.abs()))
}

pub(crate) fn sub_in_place(acc: &mut [f64], x: &[f64]) {
    for (a, v) in acc.iter_mut().zip(x) {
        *a -= v;
    }
}

#[derive(Debug, Clone)]
enum Kind {
    List(Vec<Vec<f64>>),
    Lattice {
        lattice: Lattice,
        offset: Vec<f64>,
        shaping: Option<Codebook>,
    },
}

/// Returns the candidate closest to the observation, or `None` when a
/// lattice decode lands outside the shaping region.
#[derive(Debug, Clone)]
pub(crate) struct Decoder {
    kind: Kind,
}

impl Decoder {
    fn pick(mode: DecoderMode, size: usize) -> bool {
        match mode {
            DecoderMode::Restricted => true,
            DecoderMode::Lattice => false,
            DecoderMode::Auto => size <= AUTO_LIST_LIMIT,
        }
    }

    /// Decodes a single codeword of `cb`.
    pub fn message(cb: &Codebook, mode: DecoderMode) -> Decoder {
        let kind = if Self::pick(mode, cb.len()) {
            Kind::List(cb.words().to_vec())
        } else {
            Kind::Lattice {
                lattice: cb.lattice().clone(),
                offset: cb.shift().to_vec(),
                shaping: Some(cb.clone()),
            }
        };
        Decoder { kind }
    }

    /// Decodes `g1·x + g2·y` for `x ∈ c1`, `y ∈ c2`. In lattice mode the
    /// search runs over the finer of `g1·Λ1` and `g2·Λ2`.
    pub fn aggregate(c1: &Codebook, g1: f64, c2: &Codebook, g2: f64, mode: DecoderMode) -> Result<Decoder> {
        let same = std::ptr::eq(c1, c2) && g1 == g2;
        let size = if same {
            c1.len() * (c1.len() + 1) / 2
        } else {
            c1.len() * c2.len()
        };
        let kind = if Self::pick(mode, size) {
            let mut pts = Vec::with_capacity(size);
            for (i, x) in c1.words().iter().enumerate() {
                let start = if same { i } else { 0 };
                for y in &c2.words()[start..] {
                    pts.push(aggregate_point(g1, x, g2, y));
                }
            }
            Kind::List(pts)
        } else {
            let l1 = c1.lattice().scale(g1)?;
            let l2 = c2.lattice().scale(g2)?;
            let lattice = if l1.gamma() <= l2.gamma() { l1 } else { l2 };
            let offset = aggregate_point(g1, c1.shift(), g2, c2.shift());
            Kind::Lattice {
                lattice,
                offset,
                shaping: None,
            }
        };
        Ok(Decoder { kind })
    }

    pub fn decode(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        match &self.kind {
            Kind::List(pts) => {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (i, p) in pts.iter().enumerate() {
                    let d = dist2(y, p);
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                Ok(pts.get(best).cloned())
            }
            Kind::Lattice {
                lattice,
                offset,
                shaping,
            } => {
                let z: Vec<f64> = y.iter().zip(offset).map(|(a, b)| a - b).collect();
                let v = lattice.nearest_integer(&z)?;
                if let Some(cb) = shaping {
                    if cb.index_of(&v).is_none() {
                        return Ok(None);
                    }
                }
                let mut p = lattice.point(&v);
                for (a, b) in p.iter_mut().zip(offset) {
                    *a += b;
                }
                Ok(Some(p))
            }
        }
    }
}

/// `g1·x + g2·y`, evaluated the same way for candidates and ground truth.
pub(crate) fn aggregate_point(g1: f64, x: &[f64], g2: f64, y: &[f64]) -> Vec<f64> {
    if g1 == g2 {
        x.iter().zip(y).map(|(a, b)| g1 * (a + b)).collect()
    } else {
        x.iter().zip(y).map(|(a, b)| g1 * a + g2 * b).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{construction_a, LinearCode};

    fn z2_codebook() -> Codebook {
        let lat = construction_a(LinearCode::new(2, 3, vec![vec![1, 0], vec![0, 1]]).unwrap(), 1.0).unwrap();
        Codebook::with_shift(&lat, 2.5, vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn list_and_lattice_agree_inside() {
        let cb = z2_codebook();
        let list = Decoder::message(&cb, DecoderMode::Restricted);
        let lat = Decoder::message(&cb, DecoderMode::Lattice);
        for w in cb.words() {
            let y = [w[0] + 0.1, w[1] - 0.2];
            assert_eq!(list.decode(&y).unwrap().unwrap(), *w);
            assert_eq!(lat.decode(&y).unwrap().unwrap(), *w);
        }
        // Far outside the shaping ball: the lattice decoder gives up.
        assert!(lat.decode(&[40.5, 0.5]).unwrap().is_none());
        assert!(list.decode(&[40.5, 0.5]).unwrap().is_some());
    }

    #[test]
    fn aggregate_symmetric_dedups_order() {
        let cb = z2_codebook();
        let d = Decoder::aggregate(&cb, 2.0, &cb, 2.0, DecoderMode::Restricted).unwrap();
        let (x, y) = (&cb.words()[1], &cb.words()[3]);
        let truth = aggregate_point(2.0, x, 2.0, y);
        assert_eq!(aggregate_point(2.0, y, 2.0, x), truth);
        let got = d.decode(&truth).unwrap().unwrap();
        assert!(same_point(&got, &truth));
        let dl = Decoder::aggregate(&cb, 2.0, &cb, 2.0, DecoderMode::Lattice).unwrap();
        assert!(same_point(&dl.decode(&truth).unwrap().unwrap(), &truth));
    }
}
