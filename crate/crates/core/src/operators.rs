//! Ladder operators attached to a pairing, and their N-site tensor products.
//!
//! A pairing `I` of the D basis labels defines the local (single-qudit)
//! operator
//!
//! ```text
//! σ_I = 2 Σ_r |i_r⟩⟨j_r| + η |k⟩⟨k|
//! ```
//!
//! whose Hermitian and anti-Hermitian parts `σ_I^± = (σ_I ± σ_I†)/(2, 2i)`
//! square to the identity up to a phase-dependent defect on the unpaired
//! label and therefore have spectrum inside `[-1, 1]`. The N-site observable
//! `Σ_I = ⊗_n σ_{I_n}` is kept sparse: it has only `(M + [D odd])^N`
//! nonzeros out of `D^(2N)` entries.
//!
//! Index convention: site 0 is the most significant base-D digit of a
//! computational-basis index (big-endian), both in memory and in the JSON
//! triplet format.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairings::PairingIndexSet;
use crate::DEFAULT_SIZE_CAP;

/// Tolerance used when asserting Hermiticity of constructed operators.
pub const HERMITICITY_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("index sets must share one dimension, found {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("at least one site is required")]
    EmptySites,
    #[error("total dimension {total} exceeds the size cap {cap}")]
    SizeCapExceeded { total: u128, cap: u64 },
    #[error("total dimension D^N overflows for D={dim}, N={num_sites}")]
    DimensionOverflow { dim: usize, num_sites: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator is not Hermitian within {0}")]
    NotHermitian(f64),
    #[error("conjugating matrix is not unitary within {0}")]
    NotUnitary(f64),
    #[error("operand shapes differ")]
    ShapeMismatch,
    #[error("triplet index ({row}, {col}) outside dimension {dim_total}")]
    TripletOutOfRange {
        row: usize,
        col: usize,
        dim_total: usize,
    },
}

/// `D^N` checked against `cap`, as a usize.
pub fn checked_total_dim(num_sites: usize, dim: usize, cap: u64) -> Result<usize, OperatorError> {
    if num_sites == 0 {
        return Err(OperatorError::EmptySites);
    }
    let total = (dim as u128)
        .checked_pow(num_sites as u32)
        .ok_or(OperatorError::DimensionOverflow { dim, num_sites })?;
    if total > u128::from(cap) || total > usize::MAX as u128 {
        return Err(OperatorError::SizeCapExceeded { total, cap });
    }
    Ok(total as usize)
}

/// Big-endian mixed-radix index of per-site digits.
pub fn tensor_index(digits: &[usize], dim: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * dim + d)
}

/// Per-site digits of a big-endian index.
pub fn tensor_digits(mut index: usize, dim: usize, num_sites: usize) -> Vec<usize> {
    let mut digits = vec![0; num_sites];
    for slot in digits.iter_mut().rev() {
        *slot = index % dim;
        index /= dim;
    }
    digits
}

// ---------------------------------------------------------------------------
// Local operators
// ---------------------------------------------------------------------------

/// A dense complex D x D single-qudit operator.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    dim: usize,
    entries: DMatrix<Complex64>,
}

impl LocalOperator {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, OperatorError> {
        if entries.nrows() != entries.ncols() {
            return Err(OperatorError::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        Ok(LocalOperator {
            dim: entries.nrows(),
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn adjoint(&self) -> LocalOperator {
        LocalOperator {
            dim: self.dim,
            entries: self.entries.adjoint(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.entries - self.entries.adjoint())
            .iter()
            .all(|z| z.norm() <= tol)
    }

    /// `⟨ψ|A|ψ⟩` for a unit vector of matching dimension.
    pub fn expectation(&self, psi: &DVector<Complex64>) -> Complex64 {
        psi.dotc(&(&self.entries * psi))
    }

    /// Eigenvalues of a Hermitian operator, sorted ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, OperatorError> {
        if !self.is_hermitian(1e-12) {
            return Err(OperatorError::NotHermitian(1e-12));
        }
        let mut eigs: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        eigs.sort_by(f64::total_cmp);
        Ok(eigs)
    }

    /// `U A U†`, after checking that `U` is unitary to within 1e-12.
    pub fn conjugated_by(&self, u: &DMatrix<Complex64>) -> Result<LocalOperator, OperatorError> {
        if u.nrows() != self.dim || u.ncols() != self.dim {
            return Err(OperatorError::ShapeMismatch);
        }
        let defect = u * u.adjoint() - DMatrix::<Complex64>::identity(self.dim, self.dim);
        if defect.iter().any(|z| z.norm() > 1e-12) {
            return Err(OperatorError::NotUnitary(1e-12));
        }
        Ok(LocalOperator {
            dim: self.dim,
            entries: u * &self.entries * u.adjoint(),
        })
    }
}

/// The ladder operator `σ_I = 2 Σ_r |i_r⟩⟨j_r| + η |k⟩⟨k|`.
pub fn local_sigma(pairing: &PairingIndexSet) -> LocalOperator {
    let dim = pairing.dim();
    let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
    for &(i, j) in pairing.pairs() {
        entries[(i, j)] = Complex64::new(2.0, 0.0);
    }
    if let Some(k) = pairing.unpaired() {
        entries[(k, k)] = pairing.eta();
    }
    LocalOperator { dim, entries }
}

/// Hermitian part `σ_I^+ = (σ_I + σ_I†)/2`.
pub fn local_sigma_plus(pairing: &PairingIndexSet) -> LocalOperator {
    let sigma = local_sigma(pairing);
    let entries = (&sigma.entries + sigma.entries.adjoint()).scale(0.5);
    LocalOperator {
        dim: sigma.dim,
        entries,
    }
}

/// Anti-Hermitian part `σ_I^- = (σ_I - σ_I†)/(2i)`, itself Hermitian.
pub fn local_sigma_minus(pairing: &PairingIndexSet) -> LocalOperator {
    let sigma = local_sigma(pairing);
    let entries = (&sigma.entries - sigma.entries.adjoint()) * Complex64::new(0.0, -0.5);
    LocalOperator {
        dim: sigma.dim,
        entries,
    }
}

/// Dense Kronecker product of a list of matrices, site 0 leftmost.
pub fn kron_dense(factors: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

// ---------------------------------------------------------------------------
// Global operators
// ---------------------------------------------------------------------------

/// A sparse complex operator on `(C^D)^{⊗N}`, stored as sorted
/// `(row, col, value)` triplets with exact zeros pruned.
///
/// Serializes as `{"n": N, "d": D, "triplets": [[row, col, re, im], ..]}`
/// with big-endian row/column indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGlobalOperator", into = "RawGlobalOperator")]
pub struct GlobalOperator {
    num_sites: usize,
    dim: usize,
    dim_total: usize,
    triplets: Vec<(usize, usize, Complex64)>,
}

#[derive(Serialize, Deserialize)]
struct RawGlobalOperator {
    n: usize,
    d: usize,
    triplets: Vec<(u64, u64, f64, f64)>,
}

impl From<GlobalOperator> for RawGlobalOperator {
    fn from(op: GlobalOperator) -> Self {
        RawGlobalOperator {
            n: op.num_sites,
            d: op.dim,
            triplets: op
                .triplets
                .into_iter()
                .map(|(r, c, v)| (r as u64, c as u64, v.re, v.im))
                .collect(),
        }
    }
}

impl TryFrom<RawGlobalOperator> for GlobalOperator {
    type Error = OperatorError;

    fn try_from(raw: RawGlobalOperator) -> Result<Self, OperatorError> {
        GlobalOperator::from_triplets(
            raw.n,
            raw.d,
            raw.triplets
                .into_iter()
                .map(|(r, c, re, im)| (r as usize, c as usize, Complex64::new(re, im)))
                .collect(),
        )
    }
}

impl GlobalOperator {
    /// Build from raw triplets, validating indices against `D^N` (under the
    /// default size cap), merging duplicates and pruning exact zeros.
    pub fn from_triplets(
        num_sites: usize,
        dim: usize,
        triplets: Vec<(usize, usize, Complex64)>,
    ) -> Result<Self, OperatorError> {
        Self::from_triplets_with_cap(num_sites, dim, triplets, DEFAULT_SIZE_CAP)
    }

    pub fn from_triplets_with_cap(
        num_sites: usize,
        dim: usize,
        triplets: Vec<(usize, usize, Complex64)>,
        cap: u64,
    ) -> Result<Self, OperatorError> {
        let dim_total = checked_total_dim(num_sites, dim, cap)?;
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= dim_total || c >= dim_total {
                return Err(OperatorError::TripletOutOfRange {
                    row: r,
                    col: c,
                    dim_total,
                });
            }
            *map.entry((r, c)).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Ok(Self::from_map(num_sites, dim, dim_total, map))
    }

    fn from_map(
        num_sites: usize,
        dim: usize,
        dim_total: usize,
        map: BTreeMap<(usize, usize), Complex64>,
    ) -> Self {
        let triplets = map
            .into_iter()
            .filter(|&(_, v)| v.re != 0.0 || v.im != 0.0)
            .map(|((r, c), v)| (r, c, v))
            .collect();
        GlobalOperator {
            num_sites,
            dim,
            dim_total,
            triplets,
        }
    }

    fn to_map(&self) -> BTreeMap<(usize, usize), Complex64> {
        self.triplets.iter().map(|&(r, c, v)| ((r, c), v)).collect()
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total Hilbert-space dimension `D^N`.
    pub fn total_dim(&self) -> usize {
        self.dim_total
    }

    /// Sorted nonzero triplets `(row, col, value)`.
    pub fn triplets(&self) -> &[(usize, usize, Complex64)] {
        &self.triplets
    }

    pub fn nnz(&self) -> usize {
        self.triplets.len()
    }

    pub fn adjoint(&self) -> GlobalOperator {
        let map: BTreeMap<(usize, usize), Complex64> = self
            .triplets
            .iter()
            .map(|&(r, c, v)| ((c, r), v.conj()))
            .collect();
        Self::from_map(self.num_sites, self.dim, self.dim_total, map)
    }

    pub fn scale(&self, factor: Complex64) -> GlobalOperator {
        let map = self
            .triplets
            .iter()
            .map(|&(r, c, v)| ((r, c), v * factor))
            .collect();
        Self::from_map(self.num_sites, self.dim, self.dim_total, map)
    }

    pub fn add(&self, other: &GlobalOperator) -> Result<GlobalOperator, OperatorError> {
        if self.num_sites != other.num_sites || self.dim != other.dim {
            return Err(OperatorError::ShapeMismatch);
        }
        let mut map = self.to_map();
        for &(r, c, v) in &other.triplets {
            *map.entry((r, c)).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Ok(Self::from_map(self.num_sites, self.dim, self.dim_total, map))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let map = self.to_map();
        self.triplets.iter().all(|&(r, c, v)| {
            let mirrored = map
                .get(&(c, r))
                .copied()
                .unwrap_or(Complex64::new(0.0, 0.0));
            (v - mirrored.conj()).norm() <= tol
        })
    }

    /// Matrix-vector product `A x`.
    pub fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let mut y = DVector::<Complex64>::zeros(self.dim_total);
        for &(r, c, v) in &self.triplets {
            y[r] += v * x[c];
        }
        y
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation_pure(&self, psi: &DVector<Complex64>) -> Complex64 {
        self.triplets
            .iter()
            .map(|&(r, c, v)| psi[r].conj() * v * psi[c])
            .sum()
    }

    /// `Tr(ρ A) = Σ_{(r,c)} A_{rc} ρ_{cr}` against a dense matrix.
    pub fn trace_against(&self, rho: &DMatrix<Complex64>) -> Complex64 {
        self.triplets
            .iter()
            .map(|&(r, c, v)| v * rho[(c, r)])
            .sum()
    }

    pub fn trace(&self) -> Complex64 {
        self.triplets
            .iter()
            .filter(|&&(r, c, _)| r == c)
            .map(|&(_, _, v)| v)
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut out = DMatrix::<Complex64>::zeros(self.dim_total, self.dim_total);
        for &(r, c, v) in &self.triplets {
            out[(r, c)] = v;
        }
        out
    }
}

fn local_sigma_triplets(pairing: &PairingIndexSet) -> Vec<(usize, usize, Complex64)> {
    let mut t: Vec<(usize, usize, Complex64)> = pairing
        .pairs()
        .iter()
        .map(|&(i, j)| (i, j, Complex64::new(2.0, 0.0)))
        .collect();
    if let Some(k) = pairing.unpaired() {
        t.push((k, k, pairing.eta()));
    }
    t.sort_unstable_by_key(|&(r, c, _)| (r, c));
    t
}

fn check_shared_dim(pairings: &[PairingIndexSet]) -> Result<usize, OperatorError> {
    let first = pairings.first().ok_or(OperatorError::EmptySites)?;
    for p in pairings {
        if p.dim() != first.dim() {
            return Err(OperatorError::DimensionMismatch(first.dim(), p.dim()));
        }
    }
    Ok(first.dim())
}

/// `Σ_I = ⊗_n σ_{I_n}` as a sparse operator; each site may carry its own
/// index set (and its own phase when D is odd).
pub fn global_sigma(pairings: &[PairingIndexSet]) -> Result<GlobalOperator, OperatorError> {
    global_sigma_with_cap(pairings, DEFAULT_SIZE_CAP)
}

pub fn global_sigma_with_cap(
    pairings: &[PairingIndexSet],
    cap: u64,
) -> Result<GlobalOperator, OperatorError> {
    let dim = check_shared_dim(pairings)?;
    let num_sites = pairings.len();
    let dim_total = checked_total_dim(num_sites, dim, cap)?;

    // Kronecker product of triplet lists; the digit maps are injective, so
    // no duplicate (row, col) can appear.
    let mut acc = vec![(0usize, 0usize, Complex64::new(1.0, 0.0))];
    for p in pairings {
        let locals = local_sigma_triplets(p);
        let mut next = Vec::with_capacity(acc.len() * locals.len());
        for &(r0, c0, v0) in &acc {
            for &(r, c, v) in &locals {
                next.push((r0 * dim + r, c0 * dim + c, v0 * v));
            }
        }
        acc = next;
    }
    acc.sort_unstable_by_key(|&(r, c, _)| (r, c));
    Ok(GlobalOperator {
        num_sites,
        dim,
        dim_total,
        triplets: acc,
    })
}

/// Hermitian part `Σ_I^+ = (Σ_I + Σ_I†)/2`.
pub fn global_sigma_plus(pairings: &[PairingIndexSet]) -> Result<GlobalOperator, OperatorError> {
    global_sigma_plus_with_cap(pairings, DEFAULT_SIZE_CAP)
}

pub fn global_sigma_plus_with_cap(
    pairings: &[PairingIndexSet],
    cap: u64,
) -> Result<GlobalOperator, OperatorError> {
    let sigma = global_sigma_with_cap(pairings, cap)?;
    let plus = sigma.add(&sigma.adjoint())?.scale(Complex64::new(0.5, 0.0));
    debug_assert!(plus.is_hermitian(HERMITICITY_TOL));
    Ok(plus)
}

/// Anti-Hermitian part `Σ_I^- = (Σ_I - Σ_I†)/(2i)`, itself Hermitian.
pub fn global_sigma_minus(pairings: &[PairingIndexSet]) -> Result<GlobalOperator, OperatorError> {
    global_sigma_minus_with_cap(pairings, DEFAULT_SIZE_CAP)
}

pub fn global_sigma_minus_with_cap(
    pairings: &[PairingIndexSet],
    cap: u64,
) -> Result<GlobalOperator, OperatorError> {
    let sigma = global_sigma_with_cap(pairings, cap)?;
    let minus = sigma
        .add(&sigma.adjoint().scale(Complex64::new(-1.0, 0.0)))?
        .scale(Complex64::new(0.0, -0.5));
    debug_assert!(minus.is_hermitian(HERMITICITY_TOL));
    Ok(minus)
}

// ---------------------------------------------------------------------------
// Measurement-setting decomposition
// ---------------------------------------------------------------------------

/// One product term `coefficient * ⊗_n factors[n]` of a decomposition into
/// commuting local Hermitian observables.
#[derive(Debug, Clone)]
pub struct SettingTerm {
    pub coefficient: f64,
    pub factors: Vec<LocalOperator>,
}

/// Expansion of `Σ_I^±` over the sign patterns of `⊗_n (σ^+ + i σ^-)`:
/// the pattern with `m` minus factors contributes `Re(i^m)` to the plus part
/// and `Im(i^m)` to the minus part, so each part keeps exactly `2^(N-1)`
/// terms with coefficients ±1.
#[derive(Debug, Clone)]
pub struct SettingDecomposition {
    pub plus_terms: Vec<SettingTerm>,
    pub minus_terms: Vec<SettingTerm>,
}

pub fn setting_decomposition(
    pairings: &[PairingIndexSet],
) -> Result<SettingDecomposition, OperatorError> {
    check_shared_dim(pairings)?;
    let num_sites = pairings.len();
    let plus_factors: Vec<LocalOperator> = pairings.iter().map(local_sigma_plus).collect();
    let minus_factors: Vec<LocalOperator> = pairings.iter().map(local_sigma_minus).collect();

    let mut plus_terms = Vec::new();
    let mut minus_terms = Vec::new();
    for mask in 0u32..(1u32 << num_sites) {
        let minus_count = mask.count_ones();
        let factors: Vec<LocalOperator> = (0..num_sites)
            .map(|site| {
                if mask >> site & 1 == 1 {
                    minus_factors[site].clone()
                } else {
                    plus_factors[site].clone()
                }
            })
            .collect();
        // i^m cycles 1, i, -1, -i.
        match minus_count % 4 {
            0 => plus_terms.push(SettingTerm {
                coefficient: 1.0,
                factors,
            }),
            1 => minus_terms.push(SettingTerm {
                coefficient: 1.0,
                factors,
            }),
            2 => plus_terms.push(SettingTerm {
                coefficient: -1.0,
                factors,
            }),
            _ => minus_terms.push(SettingTerm {
                coefficient: -1.0,
                factors,
            }),
        }
    }
    Ok(SettingDecomposition {
        plus_terms,
        minus_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairings::{canonical_pairing, enumerate_pairings, PairingIndexSet};
    use crate::test_support::{random_pairing, random_unit_coeffs};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_entry_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn qubit_sigma_is_the_upper_ladder() {
        let sigma = local_sigma(&canonical_pairing(2, ONE).unwrap());
        let expected = DMatrix::from_row_slice(2, 2, &[z(0., 0.), z(2., 0.), z(0., 0.), z(0., 0.)]);
        assert_eq!(sigma.entries(), &expected);
    }

    #[test]
    fn qutrit_sigma_places_eta_on_unpaired_label() {
        let p = PairingIndexSet::new(3, vec![(0, 1)], Some(2), ONE).unwrap();
        let sigma = local_sigma(&p);
        assert_eq!(sigma.entries()[(0, 1)], z(2., 0.));
        assert_eq!(sigma.entries()[(2, 2)], z(1., 0.));
        assert_eq!(
            sigma.entries().iter().filter(|v| v.norm() > 0.0).count(),
            2
        );
    }

    #[test]
    fn dim_four_canonical_sigma() {
        let sigma = local_sigma(&canonical_pairing(4, ONE).unwrap());
        assert_eq!(sigma.entries()[(0, 1)], z(2., 0.));
        assert_eq!(sigma.entries()[(2, 3)], z(2., 0.));
        assert_eq!(
            sigma.entries().iter().filter(|v| v.norm() > 0.0).count(),
            2
        );
    }

    #[test]
    fn qubit_hermitian_parts_are_pauli_like() {
        let p = canonical_pairing(2, ONE).unwrap();
        let plus = local_sigma_plus(&p);
        let minus = local_sigma_minus(&p);
        let sigma_x = DMatrix::from_row_slice(2, 2, &[z(0., 0.), z(1., 0.), z(1., 0.), z(0., 0.)]);
        let expected_minus =
            DMatrix::from_row_slice(2, 2, &[z(0., 0.), z(0., -1.), z(0., 1.), z(0., 0.)]);
        assert_eq!(plus.entries(), &sigma_x);
        assert_eq!(minus.entries(), &expected_minus);
    }

    /// `(σ^+)² = 1 - (Im η)² |k⟩⟨k|` and `(σ^-)² = 1 - (Re η)² |k⟩⟨k|`.
    fn square_identity_defect(p: &PairingIndexSet) -> (f64, f64) {
        let dim = p.dim();
        let eye = DMatrix::<Complex64>::identity(dim, dim);
        let mut plus_target = eye.clone();
        let mut minus_target = eye;
        if let Some(k) = p.unpaired() {
            plus_target[(k, k)] -= z(p.eta().im * p.eta().im, 0.);
            minus_target[(k, k)] -= z(p.eta().re * p.eta().re, 0.);
        }
        let plus = local_sigma_plus(p).entries().clone();
        let minus = local_sigma_minus(p).entries().clone();
        (
            max_entry_diff(&(&plus * &plus), &plus_target),
            max_entry_diff(&(&minus * &minus), &minus_target),
        )
    }

    #[test]
    fn qutrit_squares_follow_the_phase() {
        let real = PairingIndexSet::new(3, vec![(0, 1)], Some(2), ONE).unwrap();
        let (dp, dm) = square_identity_defect(&real);
        assert!(dp < 1e-15, "eta=1 gives (σ+)² = 1");
        assert!(dm < 1e-15);
        // With eta = i the defect moves to the plus part: (σ+)² = 1 - |2⟩⟨2|.
        let imag = real.with_eta(Complex64::i()).unwrap();
        let plus = local_sigma_plus(&imag).entries().clone();
        let mut target = DMatrix::<Complex64>::identity(3, 3);
        target[(2, 2)] = z(0., 0.);
        assert!(max_entry_diff(&(&plus * &plus), &target) < 1e-15);
        let (_, dm_imag) = square_identity_defect(&imag);
        assert!(dm_imag < 1e-15);
    }

    #[test]
    fn square_identities_hold_for_random_pairings() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phases = [ONE, Complex64::i(), Complex64::from_polar(1.0, std::f64::consts::PI / 3.0)];
        for dim in 2..=7 {
            for _ in 0..20 {
                let base = random_pairing(dim, &mut rng);
                for eta in phases {
                    let p = if dim % 2 == 1 {
                        base.with_eta(eta).unwrap()
                    } else {
                        base.clone()
                    };
                    let (dp, dm) = square_identity_defect(&p);
                    assert!(dp <= 1e-14 && dm <= 1e-14, "dim {dim}: {dp} {dm}");
                    assert!(local_sigma_plus(&p).is_hermitian(1e-14));
                    assert!(local_sigma_minus(&p).is_hermitian(1e-14));
                }
            }
        }
    }

    #[test]
    fn hermitian_parts_have_unit_spectral_radius() {
        for dim in 2..=6 {
            for p in enumerate_pairings(dim, Complex64::i()).unwrap() {
                for op in [local_sigma_plus(&p), local_sigma_minus(&p)] {
                    let eigs = op.hermitian_eigenvalues().unwrap();
                    let radius = eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
                    assert!(radius <= 1.0 + 1e-12, "dim {dim}: radius {radius}");
                }
            }
        }
    }

    #[test]
    fn sigma_expectation_bounded_by_one_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 2..=6 {
            let p = canonical_pairing(dim, ONE).unwrap();
            let sigma = local_sigma(&p);
            for _ in 0..2000 {
                let psi = DVector::from_vec(random_unit_coeffs(dim, &mut rng));
                assert!(sigma.expectation(&psi).norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn unitary_conjugation_preserves_the_bound() {
        let p = canonical_pairing(2, ONE).unwrap();
        // Hadamard.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = DMatrix::from_row_slice(2, 2, &[z(s, 0.), z(s, 0.), z(s, 0.), z(-s, 0.)]);
        let rotated = local_sigma(&p).conjugated_by(&u).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let psi = DVector::from_vec(random_unit_coeffs(2, &mut rng));
            assert!(rotated.expectation(&psi).norm() <= 1.0 + 1e-12);
        }
        let not_unitary = DMatrix::from_row_slice(2, 2, &[z(1., 0.), z(1., 0.), z(0., 0.), z(1., 0.)]);
        assert!(matches!(
            local_sigma(&p).conjugated_by(&not_unitary),
            Err(OperatorError::NotUnitary(_))
        ));
    }

    #[test]
    fn single_site_global_equals_local() {
        let p = canonical_pairing(3, ONE).unwrap();
        let global = global_sigma(std::slice::from_ref(&p)).unwrap();
        assert_eq!(global.to_dense(), *local_sigma(&p).entries());
    }

    #[test]
    fn two_qubit_sigma_is_a_single_corner_entry() {
        let p = canonical_pairing(2, ONE).unwrap();
        let op = global_sigma(&[p.clone(), p]).unwrap();
        // |00⟩⟨11| scaled by 4: row 0, column 3 in big-endian indexing.
        assert_eq!(op.triplets(), &[(0usize, 3usize, z(4., 0.))]);
    }

    #[test]
    fn nonzero_count_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (num_sites, dim) in [(1usize, 5usize), (2, 3), (3, 2), (2, 4), (2, 5), (3, 3)] {
            let pairings: Vec<PairingIndexSet> =
                (0..num_sites).map(|_| random_pairing(dim, &mut rng)).collect();
            let op = global_sigma(&pairings).unwrap();
            let per_site = dim / 2 + dim % 2;
            assert_eq!(op.nnz(), per_site.pow(num_sites as u32));
        }
    }

    #[test]
    fn sparse_tensor_matches_dense_kronecker() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (num_sites, dim) in [(2usize, 2usize), (3, 2), (2, 3), (2, 4), (4, 2), (2, 5)] {
            let pairings: Vec<PairingIndexSet> =
                (0..num_sites).map(|_| random_pairing(dim, &mut rng)).collect();
            let sparse = global_sigma(&pairings).unwrap().to_dense();
            let dense_factors: Vec<DMatrix<Complex64>> = pairings
                .iter()
                .map(|p| local_sigma(p).entries().clone())
                .collect();
            let dense = kron_dense(&dense_factors);
            assert_eq!(max_entry_diff(&sparse, &dense), 0.0);
        }
    }

    #[test]
    fn sigma_splits_exactly_into_hermitian_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for (num_sites, dim) in [(2usize, 2usize), (3, 2), (2, 3), (2, 5)] {
            let pairings: Vec<PairingIndexSet> =
                (0..num_sites).map(|_| random_pairing(dim, &mut rng)).collect();
            let sigma = global_sigma(&pairings).unwrap();
            let plus = global_sigma_plus(&pairings).unwrap();
            let minus = global_sigma_minus(&pairings).unwrap();
            assert!(plus.is_hermitian(1e-14));
            assert!(minus.is_hermitian(1e-14));
            let rebuilt = plus.add(&minus.scale(Complex64::i())).unwrap();
            assert_eq!(rebuilt, sigma);
        }
    }

    #[test]
    fn decomposition_expands_two_sites_symbolically() {
        let p = canonical_pairing(2, ONE).unwrap();
        let pairings = [p.clone(), p];
        let dec = setting_decomposition(&pairings).unwrap();
        assert_eq!(dec.plus_terms.len(), 2);
        assert_eq!(dec.minus_terms.len(), 2);

        let term_dense = |t: &SettingTerm| {
            let factors: Vec<DMatrix<Complex64>> =
                t.factors.iter().map(|f| f.entries().clone()).collect();
            kron_dense(&factors).scale(t.coefficient)
        };
        // Σ^+ = σ+⊗σ+ - σ-⊗σ-, Σ^- = σ+⊗σ- + σ-⊗σ+.
        let plus = &local_sigma_plus(&pairings[0]).entries().clone();
        let minus = &local_sigma_minus(&pairings[0]).entries().clone();
        let expected_plus = plus.kronecker(plus) - minus.kronecker(minus);
        let expected_minus = plus.kronecker(minus) + minus.kronecker(plus);
        let got_plus = term_dense(&dec.plus_terms[0]) + term_dense(&dec.plus_terms[1]);
        let got_minus = term_dense(&dec.minus_terms[0]) + term_dense(&dec.minus_terms[1]);
        assert_eq!(max_entry_diff(&got_plus, &expected_plus), 0.0);
        assert_eq!(max_entry_diff(&got_minus, &expected_minus), 0.0);
    }

    #[test]
    fn decomposition_reconstructs_global_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (num_sites, dim) in [(1usize, 2usize), (2, 3), (3, 2), (2, 4), (3, 3)] {
            let pairings: Vec<PairingIndexSet> =
                (0..num_sites).map(|_| random_pairing(dim, &mut rng)).collect();
            let dec = setting_decomposition(&pairings).unwrap();
            assert_eq!(dec.plus_terms.len(), 1 << (num_sites - 1));
            assert_eq!(dec.minus_terms.len(), 1 << (num_sites - 1));

            let rebuild = |terms: &[SettingTerm]| {
                let total = dim.pow(num_sites as u32);
                let mut acc = DMatrix::<Complex64>::zeros(total, total);
                for t in terms {
                    let factors: Vec<DMatrix<Complex64>> =
                        t.factors.iter().map(|f| f.entries().clone()).collect();
                    acc += kron_dense(&factors).scale(t.coefficient);
                }
                acc
            };
            let plus = global_sigma_plus(&pairings).unwrap().to_dense();
            let minus = global_sigma_minus(&pairings).unwrap().to_dense();
            assert!(max_entry_diff(&rebuild(&dec.plus_terms), &plus) <= 1e-12);
            assert!(max_entry_diff(&rebuild(&dec.minus_terms), &minus) <= 1e-12);
        }
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let a = canonical_pairing(2, ONE).unwrap();
        let b = canonical_pairing(4, ONE).unwrap();
        assert!(matches!(
            global_sigma(&[a, b]),
            Err(OperatorError::DimensionMismatch(2, 4))
        ));
    }

    #[test]
    fn size_cap_error_names_the_cap() {
        let p = canonical_pairing(3, ONE).unwrap();
        let err = global_sigma_with_cap(&[p.clone(), p], 8).unwrap_err();
        assert!(err.to_string().contains('8'), "{err}");
        assert!(matches!(
            err,
            OperatorError::SizeCapExceeded { total: 9, cap: 8 }
        ));
    }

    #[test]
    fn tensor_indexing_round_trips() {
        for (num_sites, dim) in [(3usize, 3usize), (4, 2), (2, 5)] {
            for index in 0..dim.pow(num_sites as u32) {
                let digits = tensor_digits(index, dim, num_sites);
                assert_eq!(tensor_index(&digits, dim), index);
            }
        }
        // Site 0 is the most significant digit.
        assert_eq!(tensor_index(&[1, 0], 3), 3);
    }

    #[test]
    fn global_operator_json_round_trips() {
        let p = canonical_pairing(3, Complex64::i()).unwrap();
        let op = global_sigma(&[p.clone(), p]).unwrap();
        let json = serde_json::to_string(&op).unwrap();
        assert!(json.starts_with(r#"{"n":2,"d":3,"triplets":[["#));
        let back: GlobalOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, op);
    }
}
