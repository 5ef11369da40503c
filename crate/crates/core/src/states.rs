//! State families: product states, separable ensembles, the `ψ(μ)`
//! superpositions that saturate the operator spectrum, maximally entangled
//! states, and Werner states.
//!
//! All constructors validate their invariants (normalization, Hermiticity,
//! positivity) and every source of randomness takes an explicit seed or RNG,
//! so state generation is reproducible.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{checked_total_dim, tensor_index, GlobalOperator, OperatorError};
use crate::pairings::PairingIndexSet;
use crate::{DEFAULT_DENSE_CAP, DEFAULT_SIZE_CAP};

/// Tolerance on norms, traces and Hermiticity defects.
pub const NORM_TOL: f64 = 1e-12;

/// Density-matrix eigenvalues may dip this far below zero and still count
/// as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("expected {expected} amplitudes, got {got}")]
    AmplitudeCount { expected: usize, got: usize },
    #[error("state vector has norm {norm}, not 1")]
    NotNormalized { norm: f64 },
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("matrix is not Hermitian: max defect {max_defect}")]
    NotHermitian { max_defect: f64 },
    #[error("matrix has trace {trace}, not 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("ensemble needs at least one weighted term")]
    EmptyEnsemble,
    #[error("ensemble weight {weight} at term {term} is not positive")]
    WeightNotPositive { term: usize, weight: f64 },
    #[error("ensemble weights sum to {sum}, not 1")]
    WeightsNotNormalized { sum: f64 },
    #[error("term {term} has {got} factors, expected {expected}")]
    FactorCount {
        term: usize,
        expected: usize,
        got: usize,
    },
    #[error("factor at term {term}, site {site} must be a single qudit of dimension {expected}")]
    FactorShape {
        term: usize,
        site: usize,
        expected: usize,
    },
    #[error("coefficient vector at site {site} has length {got}, expected {expected}")]
    CoefficientCount {
        site: usize,
        expected: usize,
        got: usize,
    },
    #[error("coefficient vector at site {site} has norm {norm}, not 1")]
    CoefficientNotUnit { site: usize, norm: f64 },
    #[error("phase must be unimodular, got modulus {norm}")]
    PhaseNotUnit { norm: f64 },
    #[error("parameter {name} = {value} outside its allowed range")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error(
        "state is {state_sites} site(s) of dimension {state_dim}, operand is {other_sites} of {other_dim}"
    )]
    DimensionMismatch {
        state_sites: usize,
        state_dim: usize,
        other_sites: usize,
        other_dim: usize,
    },
}

// ---------------------------------------------------------------------------
// Pure states
// ---------------------------------------------------------------------------

/// A unit vector in `(C^D)^{⊗N}`, big-endian site order.
///
/// Serializes as `{"n": N, "d": D, "amps": [[re, im], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPureState", into = "RawPureState")]
pub struct PureState {
    num_sites: usize,
    dim: usize,
    amplitudes: DVector<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawPureState {
    n: usize,
    d: usize,
    amps: Vec<(f64, f64)>,
}

impl From<PureState> for RawPureState {
    fn from(s: PureState) -> Self {
        RawPureState {
            n: s.num_sites,
            d: s.dim,
            amps: s.amplitudes.iter().map(|z| (z.re, z.im)).collect(),
        }
    }
}

impl TryFrom<RawPureState> for PureState {
    type Error = StateError;

    fn try_from(raw: RawPureState) -> Result<Self, StateError> {
        let amps = raw
            .amps
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        PureState::new(raw.n, raw.d, amps)
    }
}

impl PureState {
    /// Wrap an already-normalized amplitude vector.
    pub fn new(
        num_sites: usize,
        dim: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, StateError> {
        let expected = checked_total_dim(num_sites, dim, u64::MAX)?;
        if amplitudes.len() != expected {
            return Err(StateError::AmplitudeCount {
                expected,
                got: amplitudes.len(),
            });
        }
        let amplitudes = DVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(PureState {
            num_sites,
            dim,
            amplitudes,
        })
    }

    /// Normalize and wrap an arbitrary nonzero amplitude vector.
    pub fn normalized(
        num_sites: usize,
        dim: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, StateError> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 {
            return Err(StateError::ZeroVector);
        }
        Self::new(
            num_sites,
            dim,
            amplitudes.into_iter().map(|z| z / norm).collect(),
        )
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Result<Complex64, StateError> {
        if self.num_sites != other.num_sites || self.dim != other.dim {
            return Err(StateError::DimensionMismatch {
                state_sites: self.num_sites,
                state_dim: self.dim,
                other_sites: other.num_sites,
                other_dim: other.dim,
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64, StateError> {
        Ok(self.overlap(other)?.norm())
    }

    /// The rank-one projector `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let entries = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix {
            num_sites: self.num_sites,
            dim: self.dim,
            entries,
            separable_by_construction: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

/// A Hermitian, unit-trace, positive-semidefinite matrix on `(C^D)^{⊗N}`.
///
/// Serializes as `{"n": N, "d": D, "entries": [[re, im], ..]}` with entries
/// flattened row-major. The separability certificate records construction
/// provenance and does not survive serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensityMatrix", into = "RawDensityMatrix")]
pub struct DensityMatrix {
    num_sites: usize,
    dim: usize,
    entries: DMatrix<Complex64>,
    separable_by_construction: bool,
}

#[derive(Serialize, Deserialize)]
struct RawDensityMatrix {
    n: usize,
    d: usize,
    entries: Vec<(f64, f64)>,
}

impl From<DensityMatrix> for RawDensityMatrix {
    fn from(m: DensityMatrix) -> Self {
        let total = m.entries.nrows();
        let mut entries = Vec::with_capacity(total * total);
        for r in 0..total {
            for c in 0..total {
                let z = m.entries[(r, c)];
                entries.push((z.re, z.im));
            }
        }
        RawDensityMatrix {
            n: m.num_sites,
            d: m.dim,
            entries,
        }
    }
}

impl TryFrom<RawDensityMatrix> for DensityMatrix {
    type Error = StateError;

    fn try_from(raw: RawDensityMatrix) -> Result<Self, StateError> {
        let total = checked_total_dim(raw.n, raw.d, u64::MAX)?;
        if raw.entries.len() != total * total {
            return Err(StateError::AmplitudeCount {
                expected: total * total,
                got: raw.entries.len(),
            });
        }
        let entries = DMatrix::from_fn(total, total, |r, c| {
            let (re, im) = raw.entries[r * total + c];
            Complex64::new(re, im)
        });
        DensityMatrix::new(raw.n, raw.d, entries)
    }
}

fn min_eigenvalue_hermitian(m: &DMatrix<Complex64>) -> f64 {
    // Hermitize first; the eigensolver assumes self-adjointness bit-exactly.
    let h = (m + m.adjoint()).scale(0.5);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

impl DensityMatrix {
    /// Validate Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(
        num_sites: usize,
        dim: usize,
        entries: DMatrix<Complex64>,
    ) -> Result<Self, StateError> {
        Self::validated(num_sites, dim, entries, false)
    }

    fn validated(
        num_sites: usize,
        dim: usize,
        entries: DMatrix<Complex64>,
        separable_by_construction: bool,
    ) -> Result<Self, StateError> {
        let total = checked_total_dim(num_sites, dim, u64::MAX)?;
        if entries.nrows() != total || entries.ncols() != total {
            return Err(StateError::AmplitudeCount {
                expected: total * total,
                got: entries.nrows() * entries.ncols(),
            });
        }
        let max_defect = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if max_defect > NORM_TOL {
            return Err(StateError::NotHermitian { max_defect });
        }
        let trace: Complex64 = entries.diagonal().iter().sum();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(StateError::TraceNotOne { trace: trace.re });
        }
        let min_eigenvalue = min_eigenvalue_hermitian(&entries);
        if min_eigenvalue < PSD_TOL {
            return Err(StateError::NotPositive { min_eigenvalue });
        }
        Ok(DensityMatrix {
            num_sites,
            dim,
            entries,
            separable_by_construction,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// True when this matrix was produced from an explicit separable
    /// ensemble, certifying separability by construction.
    pub fn separable_by_construction(&self) -> bool {
        self.separable_by_construction
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue_hermitian(&self.entries)
    }
}

// ---------------------------------------------------------------------------
// Quantum state wrapper
// ---------------------------------------------------------------------------

/// Either a pure state vector or a density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl From<PureState> for QuantumState {
    fn from(s: PureState) -> Self {
        QuantumState::Pure(s)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(m: DensityMatrix) -> Self {
        QuantumState::Mixed(m)
    }
}

impl QuantumState {
    pub fn num_sites(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.num_sites,
            QuantumState::Mixed(m) => m.num_sites,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.dim,
            QuantumState::Mixed(m) => m.dim,
        }
    }

    /// `⟨ψ|A|ψ⟩` or `Tr ρA`, after checking shapes.
    pub fn expectation(&self, op: &GlobalOperator) -> Result<Complex64, StateError> {
        if self.num_sites() != op.num_sites() || self.dim() != op.dim() {
            return Err(StateError::DimensionMismatch {
                state_sites: self.num_sites(),
                state_dim: self.dim(),
                other_sites: op.num_sites(),
                other_dim: op.dim(),
            });
        }
        Ok(match self {
            QuantumState::Pure(s) => op.expectation_pure(&s.amplitudes),
            QuantumState::Mixed(m) => op.trace_against(&m.entries),
        })
    }
}

// ---------------------------------------------------------------------------
// Separable ensembles
// ---------------------------------------------------------------------------

/// A convex mixture of explicit N-site product states; the certificate form
/// of a separable density matrix.
///
/// Serializes as `{"weights": [..], "factors": [[site vectors] per term]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnsemble", into = "RawEnsemble")]
pub struct SeparableEnsemble {
    weights: Vec<f64>,
    factors: Vec<Vec<PureState>>,
}

#[derive(Serialize, Deserialize)]
struct RawEnsemble {
    weights: Vec<f64>,
    factors: Vec<Vec<Vec<(f64, f64)>>>,
}

impl From<SeparableEnsemble> for RawEnsemble {
    fn from(e: SeparableEnsemble) -> Self {
        RawEnsemble {
            weights: e.weights,
            factors: e
                .factors
                .into_iter()
                .map(|term| {
                    term.into_iter()
                        .map(|site| site.amplitudes.iter().map(|z| (z.re, z.im)).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<RawEnsemble> for SeparableEnsemble {
    type Error = StateError;

    fn try_from(raw: RawEnsemble) -> Result<Self, StateError> {
        let factors = raw
            .factors
            .into_iter()
            .map(|term| {
                term.into_iter()
                    .map(|site| {
                        let amps: Vec<Complex64> = site
                            .into_iter()
                            .map(|(re, im)| Complex64::new(re, im))
                            .collect();
                        PureState::new(1, amps.len(), amps)
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        SeparableEnsemble::new(raw.weights, factors)
    }
}

impl SeparableEnsemble {
    pub fn new(weights: Vec<f64>, factors: Vec<Vec<PureState>>) -> Result<Self, StateError> {
        if weights.is_empty() || weights.len() != factors.len() {
            return Err(StateError::EmptyEnsemble);
        }
        for (term, &w) in weights.iter().enumerate() {
            if !(w > 0.0) {
                return Err(StateError::WeightNotPositive { term, weight: w });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(StateError::WeightsNotNormalized { sum });
        }
        let num_sites = factors[0].len();
        if num_sites == 0 {
            return Err(StateError::FactorCount {
                term: 0,
                expected: 1,
                got: 0,
            });
        }
        let dim = factors[0][0].dim();
        for (term, sites) in factors.iter().enumerate() {
            if sites.len() != num_sites {
                return Err(StateError::FactorCount {
                    term,
                    expected: num_sites,
                    got: sites.len(),
                });
            }
            for (site, s) in sites.iter().enumerate() {
                if s.num_sites() != 1 || s.dim() != dim {
                    return Err(StateError::FactorShape {
                        term,
                        site,
                        expected: dim,
                    });
                }
            }
        }
        Ok(SeparableEnsemble { weights, factors })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors(&self) -> &[Vec<PureState>] {
        &self.factors
    }

    pub fn num_sites(&self) -> usize {
        self.factors[0].len()
    }

    pub fn dim(&self) -> usize {
        self.factors[0][0].dim()
    }
}

/// Tensor product of per-site vectors, site 0 most significant.
fn kron_vectors(site_vectors: &[&DVector<Complex64>]) -> DVector<Complex64> {
    let mut acc = DVector::from_element(1, Complex64::new(1.0, 0.0));
    for v in site_vectors {
        let mut next = DVector::zeros(acc.len() * v.len());
        for (a, &av) in acc.iter().enumerate() {
            for (b, &bv) in v.iter().enumerate() {
                next[a * v.len() + b] = av * bv;
            }
        }
        acc = next;
    }
    acc
}

/// `ρ = Σ_s p_s ⊗_n |ψ_s^(n)⟩⟨ψ_s^(n)|`, carrying the separable-by-construction
/// certificate.
pub fn ensemble_to_density(ensemble: &SeparableEnsemble) -> Result<DensityMatrix, StateError> {
    ensemble_to_density_with_cap(ensemble, DEFAULT_DENSE_CAP)
}

pub fn ensemble_to_density_with_cap(
    ensemble: &SeparableEnsemble,
    cap: u64,
) -> Result<DensityMatrix, StateError> {
    let num_sites = ensemble.num_sites();
    let dim = ensemble.dim();
    let total = checked_total_dim(num_sites, dim, cap)?;
    let mut entries = DMatrix::<Complex64>::zeros(total, total);
    for (term, sites) in ensemble.factors.iter().enumerate() {
        let vectors: Vec<&DVector<Complex64>> = sites.iter().map(|s| s.amplitudes()).collect();
        let product = kron_vectors(&vectors);
        entries += (&product * product.adjoint()).scale(ensemble.weights[term]);
    }
    DensityMatrix::validated(num_sites, dim, entries, true)
}

// ---------------------------------------------------------------------------
// Random states
// ---------------------------------------------------------------------------

/// Haar-random single-qudit state: normalized vector of iid standard complex
/// Gaussians.
pub fn haar_random_qudit<R: Rng>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| {
                Complex64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            })
            .collect();
        if let Ok(state) = PureState::normalized(1, dim, amps) {
            return state;
        }
    }
}

/// `⊗_n` of independent Haar-random single-qudit states.
pub fn random_product_state_rng<R: Rng>(
    num_sites: usize,
    dim: usize,
    rng: &mut R,
) -> Result<PureState, StateError> {
    checked_total_dim(num_sites, dim, DEFAULT_SIZE_CAP)?;
    let sites: Vec<PureState> = (0..num_sites).map(|_| haar_random_qudit(dim, rng)).collect();
    let vectors: Vec<&DVector<Complex64>> = sites.iter().map(|s| s.amplitudes()).collect();
    PureState::new(num_sites, dim, kron_vectors(&vectors).data.into())
}

pub fn random_product_state(
    num_sites: usize,
    dim: usize,
    seed: u64,
) -> Result<PureState, StateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_product_state_rng(num_sites, dim, &mut rng)
}

/// A random ensemble of `num_terms` Haar product states with weights drawn
/// away from zero and normalized.
pub fn random_separable_ensemble<R: Rng>(
    num_sites: usize,
    dim: usize,
    num_terms: usize,
    rng: &mut R,
) -> Result<SeparableEnsemble, StateError> {
    if num_terms == 0 {
        return Err(StateError::EmptyEnsemble);
    }
    let raw: Vec<f64> = (0..num_terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.into_iter().map(|w| w / sum).collect();
    let factors: Vec<Vec<PureState>> = (0..num_terms)
        .map(|_| (0..num_sites).map(|_| haar_random_qudit(dim, rng)).collect())
        .collect();
    SeparableEnsemble::new(weights, factors)
}

// ---------------------------------------------------------------------------
// Pairing-adapted superpositions
// ---------------------------------------------------------------------------

fn validate_coefficients(
    pairings: &[PairingIndexSet],
    coeffs: &[Vec<Complex64>],
) -> Result<(), StateError> {
    if pairings.len() != coeffs.len() {
        return Err(StateError::CoefficientCount {
            site: pairings.len().min(coeffs.len()),
            expected: pairings.len(),
            got: coeffs.len(),
        });
    }
    for (site, (p, c)) in pairings.iter().zip(coeffs).enumerate() {
        if c.len() != p.pair_count() {
            return Err(StateError::CoefficientCount {
                site,
                expected: p.pair_count(),
                got: c.len(),
            });
        }
        let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::CoefficientNotUnit { site, norm });
        }
    }
    Ok(())
}

/// Per-site orthonormal partners adapted to a pairing: `|+⟩ = Σ_r c_r |i_r⟩`
/// on the first pair members, `|−⟩ = Σ_r c_r |j_r⟩` on the second, sharing
/// one coefficient vector per site. The ladder action is
/// `σ_I |−⟩ = 2 |+⟩` and `σ_I† |+⟩ = 2 |−⟩`.
pub fn plus_minus_states(
    pairings: &[PairingIndexSet],
    coeffs: &[Vec<Complex64>],
) -> Result<(Vec<PureState>, Vec<PureState>), StateError> {
    validate_coefficients(pairings, coeffs)?;
    let mut plus = Vec::with_capacity(pairings.len());
    let mut minus = Vec::with_capacity(pairings.len());
    for (p, c) in pairings.iter().zip(coeffs) {
        let dim = p.dim();
        let mut plus_amps = vec![Complex64::new(0.0, 0.0); dim];
        let mut minus_amps = vec![Complex64::new(0.0, 0.0); dim];
        for (&(i, j), &cr) in p.pairs().iter().zip(c) {
            plus_amps[i] = cr;
            minus_amps[j] = cr;
        }
        plus.push(PureState::new(1, dim, plus_amps)?);
        minus.push(PureState::new(1, dim, minus_amps)?);
    }
    Ok((plus, minus))
}

/// The equal-weight coefficient vector `c_r = 1/√M`.
pub fn uniform_pair_coefficients(pairing: &PairingIndexSet) -> Vec<Complex64> {
    let m = pairing.pair_count();
    vec![Complex64::new(1.0 / (m as f64).sqrt(), 0.0); m]
}

/// `|ψ(μ)⟩ = (|+,..,+⟩ + μ |−,..,−⟩)/√2` with `|μ| = 1`.
pub fn psi_mu(
    pairings: &[PairingIndexSet],
    coeffs: &[Vec<Complex64>],
    mu: Complex64,
) -> Result<PureState, StateError> {
    if (mu.norm() - 1.0).abs() > NORM_TOL {
        return Err(StateError::PhaseNotUnit { norm: mu.norm() });
    }
    let (plus, minus) = plus_minus_states(pairings, coeffs)?;
    let num_sites = pairings.len();
    let dim = pairings[0].dim();
    checked_total_dim(num_sites, dim, DEFAULT_SIZE_CAP)?;
    let plus_vec = kron_vectors(&plus.iter().map(|s| s.amplitudes()).collect::<Vec<_>>());
    let minus_vec = kron_vectors(&minus.iter().map(|s| s.amplitudes()).collect::<Vec<_>>());
    let scale = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let amps = (plus_vec + minus_vec * mu) * scale;
    PureState::new(num_sites, dim, amps.data.into())
}

// ---------------------------------------------------------------------------
// Maximally entangled and Werner states
// ---------------------------------------------------------------------------

/// `(1/√D) Σ_i |i,..,i⟩`.
pub fn maximally_entangled(num_sites: usize, dim: usize) -> Result<PureState, StateError> {
    maximally_entangled_with_cap(num_sites, dim, DEFAULT_SIZE_CAP)
}

pub fn maximally_entangled_with_cap(
    num_sites: usize,
    dim: usize,
    cap: u64,
) -> Result<PureState, StateError> {
    let total = checked_total_dim(num_sites, dim, cap)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    let weight = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    for i in 0..dim {
        amps[tensor_index(&vec![i; num_sites], dim)] = weight;
    }
    PureState::new(num_sites, dim, amps)
}

/// `ρ = 1/D^N`.
pub fn maximally_mixed(num_sites: usize, dim: usize) -> Result<DensityMatrix, StateError> {
    let total = checked_total_dim(num_sites, dim, DEFAULT_DENSE_CAP)?;
    let entries = DMatrix::<Complex64>::identity(total, total).scale(1.0 / total as f64);
    DensityMatrix::new(num_sites, dim, entries)
}

/// Werner mixture `p |ψ_max⟩⟨ψ_max| + (1-p)/D^N 1` for `p` in `[0, 1]`.
pub fn werner_state(num_sites: usize, dim: usize, p: f64) -> Result<DensityMatrix, StateError> {
    werner_state_with_cap(num_sites, dim, p, DEFAULT_DENSE_CAP)
}

pub fn werner_state_with_cap(
    num_sites: usize,
    dim: usize,
    p: f64,
    cap: u64,
) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StateError::ParameterOutOfRange { name: "p", value: p });
    }
    let total = checked_total_dim(num_sites, dim, cap)?;
    let mut entries = DMatrix::<Complex64>::identity(total, total).scale((1.0 - p) / total as f64);
    let pump = Complex64::new(p / dim as f64, 0.0);
    for i in 0..dim {
        let row = tensor_index(&vec![i; num_sites], dim);
        for l in 0..dim {
            let col = tensor_index(&vec![l; num_sites], dim);
            entries[(row, col)] += pump;
        }
    }
    DensityMatrix::new(num_sites, dim, entries)
}
