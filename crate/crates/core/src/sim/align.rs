//! Scaled copies of one base lattice whose interference images coincide
//! at every receiver.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelMatrix3, Witness};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::rates::ConditionSet;

pub const ALIGN_TOL: f64 = 1e-9;

/// Scale factors `(c1, c2, c3)` with `Λ_j = c_j·base`, and the relative
/// residual of each of the three image equalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementCheck {
    pub placement: ConditionSet,
    pub scales: [f64; 3],
    pub residuals: [f64; 3],
}

impl PlacementCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn consistent(&self) -> bool {
        self.max_residual() <= ALIGN_TOL
    }
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    let d = (lhs - rhs).abs();
    if d == 0.0 {
        0.0
    } else {
        d / lhs.abs().max(rhs.abs())
    }
}

fn check_gains(h: &[[f64; 3]; 3]) -> Result<()> {
    for (i, row) in h.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            if i != j && (g == 0.0 || !g.is_finite()) {
                return Err(Error::ZeroGain { row: i + 1, col: j + 1 });
            }
        }
    }
    Ok(())
}

/// Scale factors for one placement of the witness.
///
/// 1. `h12Λ2 = p·h13Λ3`, `h21Λ1 = q·h23Λ3`, `h31Λ1 = h32Λ2`, with `Λ3 = base`.
/// 2. `h23Λ3 = p·h21Λ1`, `h32Λ2 = q·h31Λ1`, `h12Λ2 = h13Λ3`, with `Λ1 = base`.
/// 3. `h13Λ3 = q·h12Λ2`, `h31Λ1 = p·h32Λ2`, `h21Λ1 = h23Λ3`, with `Λ2 = base`.
pub fn placement_scales(h: &[[f64; 3]; 3], w: Witness, placement: ConditionSet) -> Result<PlacementCheck> {
    check_gains(h)?;
    let (p, q) = (w.p as f64, w.q as f64);
    let g = |r: usize, t: usize| h[r - 1][t - 1];
    let (scales, residuals) = match placement {
        ConditionSet::One => {
            let c = [q * g(2, 3) / g(2, 1), p * g(1, 3) / g(1, 2), 1.0];
            let r = [
                rel(g(1, 2) * c[1], p * g(1, 3) * c[2]),
                rel(g(2, 1) * c[0], q * g(2, 3) * c[2]),
                rel(g(3, 1) * c[0], g(3, 2) * c[1]),
            ];
            (c, r)
        }
        ConditionSet::Two => {
            let c = [1.0, q * g(3, 1) / g(3, 2), p * g(2, 1) / g(2, 3)];
            let r = [
                rel(g(2, 3) * c[2], p * g(2, 1) * c[0]),
                rel(g(3, 2) * c[1], q * g(3, 1) * c[0]),
                rel(g(1, 2) * c[1], g(1, 3) * c[2]),
            ];
            (c, r)
        }
        ConditionSet::Three => {
            let c = [p * g(3, 2) / g(3, 1), 1.0, q * g(1, 2) / g(1, 3)];
            let r = [
                rel(g(1, 3) * c[2], q * g(1, 2) * c[1]),
                rel(g(3, 1) * c[0], p * g(3, 2) * c[1]),
                rel(g(2, 1) * c[0], g(2, 3) * c[2]),
            ];
            (c, r)
        }
    };
    Ok(PlacementCheck {
        placement,
        scales,
        residuals,
    })
}

/// All three placements for the matrix's witness.
pub fn alignment_report(h: &ChannelMatrix3) -> Result<[PlacementCheck; 3]> {
    let w = h.witness.ok_or(Error::MissingWitness)?;
    let checks: Vec<PlacementCheck> = ConditionSet::ALL
        .iter()
        .map(|&set| placement_scales(&h.h, w, set))
        .collect::<Result<_>>()?;
    Ok([checks[0], checks[1], checks[2]])
}

#[derive(Debug, Clone)]
pub struct AlignedLattices {
    pub lattices: [Lattice; 3],
    pub check: PlacementCheck,
}

/// `(Λ1, Λ2, Λ3)` for a given placement; fails when the closing equality
/// misses by more than [`ALIGN_TOL`].
pub fn align_with_placement(h: &ChannelMatrix3, base: &Lattice, placement: ConditionSet) -> Result<AlignedLattices> {
    let w = h.witness.ok_or(Error::MissingWitness)?;
    let check = placement_scales(&h.h, w, placement)?;
    if !check.consistent() {
        return Err(Error::AlignmentResidual {
            residual: check.max_residual(),
            tolerance: ALIGN_TOL,
        });
    }
    let [c1, c2, c3] = check.scales;
    Ok(AlignedLattices {
        lattices: [base.scale(c1)?, base.scale(c2)?, base.scale(c3)?],
        check,
    })
}

/// `Λ3 = base`, `Λ2 = (p·h13/h12)·base`, `Λ1 = (q·h23/h21)·base`.
pub fn align_interference_lattices(h: &ChannelMatrix3, base: &Lattice) -> Result<[Lattice; 3]> {
    Ok(align_with_placement(h, base, ConditionSet::One)?.lattices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{construction_a, make_linear_code};

    fn base() -> Lattice {
        construction_a(make_linear_code(3, 1, 5, 2).unwrap(), 0.5).unwrap()
    }

    #[test]
    fn symmetric_is_identity() {
        let ch = ChannelMatrix3::symmetric(2.0);
        let [l1, l2, l3] = align_interference_lattices(&ch, &base()).unwrap();
        assert_eq!(l1, base());
        assert_eq!(l2, base());
        assert_eq!(l3, base());
    }

    #[test]
    fn integer_witness_example() {
        let h = [[1.0, 2.0, 1.0], [1.0, 1.0, 3.0], [1.0, 1.0, 1.0]];
        let ch = ChannelMatrix3 {
            h,
            witness: Some(Witness { p: 6, q: 1 }),
        };
        let report = alignment_report(&ch).unwrap();
        assert_eq!(report[0].scales, [3.0, 3.0, 1.0]);
        assert!(report.iter().all(|c| c.consistent()));
        let wrong = ChannelMatrix3 {
            h,
            witness: Some(Witness { p: 5, q: 1 }),
        };
        assert!(matches!(
            align_interference_lattices(&wrong, &base()),
            Err(Error::AlignmentResidual { .. })
        ));
    }

    #[test]
    fn missing_witness_and_zero_gain() {
        let mut ch = ChannelMatrix3::symmetric(2.0);
        ch.witness = None;
        assert!(matches!(
            align_interference_lattices(&ch, &base()),
            Err(Error::MissingWitness)
        ));
        let ch = ChannelMatrix3 {
            h: [[1.0, 0.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]],
            witness: Some(Witness { p: 1, q: 1 }),
        };
        assert!(matches!(
            align_interference_lattices(&ch, &base()),
            Err(Error::ZeroGain { row: 1, col: 2 })
        ));
    }
}
