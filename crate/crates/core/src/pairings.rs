//! Pairings of the qudit basis labels.
//!
//! A `PairingIndexSet` splits the labels `{0, .., D-1}` into disjoint ordered
//! pairs `(i_r, j_r)` with `i_r < j_r`, leaving one unpaired label `k` when D
//! is odd. The unpaired label carries a unimodular phase `eta`. These sets
//! index the ladder operators built in [`crate::operators`], and there are
//! `(D-1)!!` of them for even D, `(D-2)!! * D` for odd D.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on `| |eta| - 1 |` when validating the unpaired-label phase.
pub const UNIT_PHASE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PairingError {
    #[error("qudit dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("phase eta must be unimodular for odd dimension, got |eta| = {0}")]
    InvalidPhase(f64),
    #[error("pair indices must satisfy i < j, got ({0}, {1})")]
    UnorderedPair(usize, usize),
    #[error("pairs and unpaired index must cover 0..{dim} exactly once")]
    IndexCover { dim: usize },
    #[error("unpaired index must be present exactly when the dimension is odd")]
    UnpairedParity,
    #[error("pairing count overflows u64 at dimension {0}")]
    CountOverflow(usize),
}

/// One choice of disjoint ordered index pairs over `{0, .., D-1}`, plus the
/// unpaired label and its phase when D is odd.
///
/// Serializes as `{"dim": D, "pairs": [[i, j], ..], "unpaired": k|null,
/// "eta": [re, im]}`. The pair list is kept sorted by first index, so equal
/// sets have identical JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPairing", into = "RawPairing")]
pub struct PairingIndexSet {
    dim: usize,
    pairs: Vec<(usize, usize)>,
    unpaired: Option<usize>,
    eta: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RawPairing {
    dim: usize,
    pairs: Vec<(usize, usize)>,
    unpaired: Option<usize>,
    #[serde(with = "crate::complex_serde")]
    eta: Complex64,
}

impl From<PairingIndexSet> for RawPairing {
    fn from(p: PairingIndexSet) -> Self {
        RawPairing {
            dim: p.dim,
            pairs: p.pairs,
            unpaired: p.unpaired,
            eta: p.eta,
        }
    }
}

impl TryFrom<RawPairing> for PairingIndexSet {
    type Error = PairingError;

    fn try_from(raw: RawPairing) -> Result<Self, PairingError> {
        PairingIndexSet::new(raw.dim, raw.pairs, raw.unpaired, raw.eta)
    }
}

impl PairingIndexSet {
    /// Validate and canonicalize a pairing. For even `dim` the phase is fixed
    /// to zero regardless of the argument; for odd `dim` it must be unit.
    pub fn new(
        dim: usize,
        mut pairs: Vec<(usize, usize)>,
        unpaired: Option<usize>,
        eta: Complex64,
    ) -> Result<Self, PairingError> {
        if dim < 2 {
            return Err(PairingError::InvalidDimension(dim));
        }
        if (dim % 2 == 0) != unpaired.is_none() {
            return Err(PairingError::UnpairedParity);
        }
        for &(i, j) in &pairs {
            if i >= j {
                return Err(PairingError::UnorderedPair(i, j));
            }
        }
        let mut labels: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
        labels.extend(unpaired);
        labels.sort_unstable();
        if labels != (0..dim).collect::<Vec<_>>() {
            return Err(PairingError::IndexCover { dim });
        }
        let eta = if dim % 2 == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            if (eta.norm() - 1.0).abs() > UNIT_PHASE_TOL {
                return Err(PairingError::InvalidPhase(eta.norm()));
            }
            eta
        };
        pairs.sort_unstable();
        Ok(PairingIndexSet {
            dim,
            pairs,
            unpaired,
            eta,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The ordered pairs `(i_r, j_r)`, sorted by first index.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The unpaired label `k`; present exactly when the dimension is odd.
    pub fn unpaired(&self) -> Option<usize> {
        self.unpaired
    }

    /// Phase attached to the unpaired label (zero for even dimension).
    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    /// Number of pairs M: `D/2` for even D, `(D-1)/2` for odd D.
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_odd_dim(&self) -> bool {
        self.dim % 2 == 1
    }

    /// Same index set with a different unpaired-label phase.
    pub fn with_eta(&self, eta: Complex64) -> Result<Self, PairingError> {
        Self::new(self.dim, self.pairs.clone(), self.unpaired, eta)
    }
}

/// The double factorial `n!! = n (n-2) (n-4) ...`, with `0!! = 1!! = 1`.
pub fn double_factorial(n: u64) -> Option<u64> {
    let mut out: u64 = 1;
    let mut m = n;
    while m > 1 {
        out = out.checked_mul(m)?;
        m -= 2;
    }
    Some(out)
}

/// Number of distinct pairings: `(D-1)!!` for even D, `(D-2)!! * D` for odd D.
pub fn count_pairings(dim: usize) -> Result<u64, PairingError> {
    if dim < 2 {
        return Err(PairingError::InvalidDimension(dim));
    }
    let overflow = || PairingError::CountOverflow(dim);
    if dim % 2 == 0 {
        double_factorial(dim as u64 - 1).ok_or_else(overflow)
    } else {
        double_factorial(dim as u64 - 2)
            .and_then(|m| m.checked_mul(dim as u64))
            .ok_or_else(overflow)
    }
}

/// All perfect matchings of the (sorted) label slice, each returned with its
/// pairs sorted by first index.
fn perfect_matchings(labels: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if labels.is_empty() {
        return vec![Vec::new()];
    }
    let first = labels[0];
    let mut out = Vec::new();
    for idx in 1..labels.len() {
        let partner = labels[idx];
        let rest: Vec<usize> = labels[1..]
            .iter()
            .copied()
            .filter(|&l| l != partner)
            .collect();
        for mut tail in perfect_matchings(&rest) {
            tail.insert(0, (first, partner));
            out.push(tail);
        }
    }
    out
}

/// Every pairing of `{0, .., dim-1}` in canonical order: lexicographic by
/// pair list, then by unpaired index. Odd dimensions attach the same `eta`
/// to every set; even dimensions ignore it.
pub fn enumerate_pairings(dim: usize, eta: Complex64) -> Result<Vec<PairingIndexSet>, PairingError> {
    if dim < 2 {
        return Err(PairingError::InvalidDimension(dim));
    }
    let even = dim % 2 == 0;
    if !even && (eta.norm() - 1.0).abs() > UNIT_PHASE_TOL {
        return Err(PairingError::InvalidPhase(eta.norm()));
    }
    let labels: Vec<usize> = (0..dim).collect();
    let mut sets = Vec::new();
    if even {
        for pairs in perfect_matchings(&labels) {
            sets.push(PairingIndexSet {
                dim,
                pairs,
                unpaired: None,
                eta: Complex64::new(0.0, 0.0),
            });
        }
    } else {
        for k in 0..dim {
            let rest: Vec<usize> = labels.iter().copied().filter(|&l| l != k).collect();
            for pairs in perfect_matchings(&rest) {
                sets.push(PairingIndexSet {
                    dim,
                    pairs,
                    unpaired: Some(k),
                    eta,
                });
            }
        }
    }
    sets.sort_by(|a, b| (&a.pairs, a.unpaired).cmp(&(&b.pairs, b.unpaired)));
    Ok(sets)
}

/// The consecutive pairing `{(0,1), (2,3), ..}`; odd dimensions leave
/// `k = D-1` unpaired.
pub fn canonical_pairing(dim: usize, eta: Complex64) -> Result<PairingIndexSet, PairingError> {
    if dim < 2 {
        return Err(PairingError::InvalidDimension(dim));
    }
    let pairs: Vec<(usize, usize)> = (0..dim / 2).map(|r| (2 * r, 2 * r + 1)).collect();
    let unpaired = (dim % 2 == 1).then_some(dim - 1);
    PairingIndexSet::new(dim, pairs, unpaired, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    /// Independent oracle: count perfect matchings of a label bitmask by
    /// dynamic programming (pair the lowest set bit with every other bit).
    fn matching_count_oracle(mask: u32) -> u64 {
        if mask == 0 {
            return 1;
        }
        let lowest = mask.trailing_zeros();
        let rest = mask & !(1 << lowest);
        let mut total = 0;
        let mut bits = rest;
        while bits != 0 {
            let partner = bits.trailing_zeros();
            total += matching_count_oracle(rest & !(1 << partner));
            bits &= bits - 1;
        }
        total
    }

    fn pairing_count_oracle(dim: usize) -> u64 {
        let full = (1u32 << dim) - 1;
        if dim % 2 == 0 {
            matching_count_oracle(full)
        } else {
            (0..dim)
                .map(|k| matching_count_oracle(full & !(1 << k)))
                .sum()
        }
    }

    #[test]
    fn dim_two_has_single_pairing() {
        let sets = enumerate_pairings(2, ONE).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].pairs(), &[(0, 1)]);
        assert_eq!(sets[0].unpaired(), None);
        assert_eq!(count_pairings(2).unwrap(), 1);
    }

    #[test]
    fn dim_four_has_three_pairings() {
        let sets = enumerate_pairings(4, ONE).unwrap();
        assert_eq!(sets.len(), 3);
        assert_eq!(sets[0].pairs(), &[(0, 1), (2, 3)]);
        assert_eq!(sets[1].pairs(), &[(0, 2), (1, 3)]);
        assert_eq!(sets[2].pairs(), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn dim_three_unpaired_takes_each_label() {
        let sets = enumerate_pairings(3, ONE).unwrap();
        assert_eq!(sets.len(), 3);
        let ks: HashSet<usize> = sets.iter().map(|s| s.unpaired().unwrap()).collect();
        assert_eq!(ks, HashSet::from([0, 1, 2]));
        // Lexicographic by pair list: (0,1) before (0,2) before (1,2).
        assert_eq!(sets[0].pairs(), &[(0, 1)]);
        assert_eq!(sets[0].unpaired(), Some(2));
        assert_eq!(sets[2].unpaired(), Some(0));
    }

    #[test]
    fn dim_six_matches_brute_force() {
        assert_eq!(enumerate_pairings(6, ONE).unwrap().len(), 15);
        assert_eq!(pairing_count_oracle(6), 15);
    }

    #[test]
    fn counts_match_formula_and_oracle() {
        assert_eq!(count_pairings(8).unwrap(), 105);
        assert_eq!(count_pairings(5).unwrap(), 15);
        for dim in 2..=9 {
            let count = count_pairings(dim).unwrap();
            assert_eq!(count, pairing_count_oracle(dim), "dim {dim}");
            assert_eq!(
                count,
                enumerate_pairings(dim, ONE).unwrap().len() as u64,
                "dim {dim}"
            );
        }
    }

    #[test]
    fn double_factorial_recurrence() {
        for dim in (4..=12).step_by(2) {
            let lhs = count_pairings(dim).unwrap();
            let rhs = (dim as u64 - 1) * count_pairings(dim - 2).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn canonical_pairing_is_consecutive() {
        let p4 = canonical_pairing(4, ONE).unwrap();
        assert_eq!(p4.pairs(), &[(0, 1), (2, 3)]);
        assert_eq!(p4.eta(), Complex64::new(0.0, 0.0));

        let p2 = canonical_pairing(2, ONE).unwrap();
        assert_eq!(p2.pairs(), &[(0, 1)]);

        let p5 = canonical_pairing(5, ONE).unwrap();
        assert_eq!(p5.pairs(), &[(0, 1), (2, 3)]);
        assert_eq!(p5.unpaired(), Some(4));
        assert_eq!(p5.eta(), ONE);
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        for dim in 2..=8 {
            let sets = enumerate_pairings(dim, ONE).unwrap();
            let serialized: HashSet<String> = sets
                .iter()
                .map(|s| serde_json::to_string(s).unwrap())
                .collect();
            assert_eq!(serialized.len(), sets.len(), "dim {dim}");
        }
    }

    #[test]
    fn enumerated_sets_satisfy_invariants() {
        for dim in 2..=8 {
            for set in enumerate_pairings(dim, Complex64::i()).unwrap() {
                let mut labels: Vec<usize> =
                    set.pairs().iter().flat_map(|&(i, j)| [i, j]).collect();
                labels.extend(set.unpaired());
                labels.sort_unstable();
                assert_eq!(labels, (0..dim).collect::<Vec<_>>());
                assert!(set.pairs().iter().all(|&(i, j)| i < j));
                if dim % 2 == 0 {
                    assert_eq!(set.pair_count(), dim / 2);
                    assert_eq!(set.eta(), Complex64::new(0.0, 0.0));
                } else {
                    assert_eq!(set.pair_count(), (dim - 1) / 2);
                    assert!((set.eta().norm() - 1.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(
            enumerate_pairings(1, ONE),
            Err(PairingError::InvalidDimension(1))
        ));
        assert!(matches!(
            count_pairings(0),
            Err(PairingError::InvalidDimension(0))
        ));
        assert!(matches!(
            enumerate_pairings(3, Complex64::new(0.5, 0.0)),
            Err(PairingError::InvalidPhase(_))
        ));
        assert!(matches!(
            PairingIndexSet::new(4, vec![(1, 0), (2, 3)], None, ONE),
            Err(PairingError::UnorderedPair(1, 0))
        ));
        assert!(matches!(
            PairingIndexSet::new(4, vec![(0, 1), (1, 3)], None, ONE),
            Err(PairingError::IndexCover { dim: 4 })
        ));
        assert!(matches!(
            PairingIndexSet::new(4, vec![(0, 1), (2, 3)], Some(0), ONE),
            Err(PairingError::UnpairedParity)
        ));
    }

    #[test]
    fn json_shape_is_stable() {
        let p = canonical_pairing(3, Complex64::i()).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"{"dim":3,"pairs":[[0,1]],"unpaired":2,"eta":[0.0,1.0]}"#
        );
        let back: PairingIndexSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn deserialization_validates() {
        let bad = r#"{"dim":3,"pairs":[[0,1]],"unpaired":2,"eta":[2.0,0.0]}"#;
        assert!(serde_json::from_str::<PairingIndexSet>(bad).is_err());
    }
}
