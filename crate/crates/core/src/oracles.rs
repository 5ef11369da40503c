//! Independent verification machinery: product-state maximization, exact
//! spectra, the partial-transpose criterion, and finite-shot sampling of the
//! local measurement settings. Each one checks a claim of the witness module
//! by a second, unrelated route.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{
    local_sigma, setting_decomposition, tensor_digits, GlobalOperator, OperatorError,
    SettingTerm,
};
use crate::pairings::PairingIndexSet;
use crate::states::{haar_random_qudit, werner_state, DensityMatrix, PureState, QuantumState, StateError};
use crate::util::{bisect, fmt_f64};
use crate::DEFAULT_DENSE_CAP;

/// Relative tolerance of the iterative extremal-eigenvalue fallback.
pub const ITERATIVE_EIG_TOL: f64 = 1e-8;

/// Bisection resolution in `p` for threshold location.
pub const THRESHOLD_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("at least one restart is required")]
    InvalidRestarts,
    #[error("at least one shot per setting is required")]
    InvalidShots,
    #[error("operator is not Hermitian within {0}")]
    NotHermitian(f64),
    #[error("partition must be a nonempty proper subset of the sites")]
    TrivialPartition,
    #[error("partition site {site} outside 0..{num_sites}")]
    PartitionSiteOutOfRange { site: usize, num_sites: usize },
    #[error("partition lists site {site} twice")]
    DuplicatePartitionSite { site: usize },
    #[error("bisection bracket does not change sign")]
    BisectionBracketFailed,
    #[error("power iteration did not reach tolerance {tol} in {iters} iterations")]
    PowerIterationStalled { tol: f64, iters: usize },
}

// ---------------------------------------------------------------------------
// Product-state maximization
// ---------------------------------------------------------------------------

/// Outcome of maximizing `|Π_n ⟨ψ^(n)|σ_{I_n}|ψ^(n)⟩|` over product states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_value: f64,
    /// Per-site maximizers.
    pub argument: Vec<PureState>,
    /// Total ascent iterations across sites and restarts.
    pub iterations: u64,
    pub converged: bool,
}

struct SiteAscent {
    value_sq: f64,
    vector: DVector<Complex64>,
    iterations: u64,
    converged: bool,
}

/// Projected gradient ascent of `|⟨ψ|σ|ψ⟩|²` on the unit sphere. The
/// ascent direction is the Wirtinger gradient `z̄ σψ + z σ†ψ`.
fn ascend_site(
    sigma: &DMatrix<Complex64>,
    sigma_adj: &DMatrix<Complex64>,
    start: DVector<Complex64>,
    max_iters: u64,
) -> SiteAscent {
    let mut psi = start;
    psi /= Complex64::new(psi.norm(), 0.0);
    let mut z = psi.dotc(&(sigma * &psi));
    let mut best = z.norm_sqr();
    let mut alpha = 0.5f64;
    let mut stalled_steps = 0u32;
    let mut iterations = 0u64;
    let mut converged = false;

    while iterations < max_iters {
        iterations += 1;
        let grad = (sigma * &psi) * z.conj() + (sigma_adj * &psi) * z;
        let mut candidate = &psi + &grad * Complex64::new(alpha, 0.0);
        let norm = candidate.norm();
        if norm == 0.0 {
            break;
        }
        candidate /= Complex64::new(norm, 0.0);
        let z_new = candidate.dotc(&(sigma * &candidate));
        let value = z_new.norm_sqr();
        if value > best {
            let relative_gain = (value - best) / best.max(1e-300);
            psi = candidate;
            z = z_new;
            best = value;
            alpha = (alpha * 1.3).min(2.0);
            if relative_gain < 1e-13 {
                stalled_steps += 1;
            } else {
                stalled_steps = 0;
            }
        } else {
            alpha *= 0.5;
            if alpha < 1e-14 {
                converged = true;
                break;
            }
        }
        if stalled_steps >= 5 {
            converged = true;
            break;
        }
    }
    SiteAscent {
        value_sq: best,
        vector: psi,
        iterations,
        converged,
    }
}

/// Maximize `|Π_n ⟨ψ^(n)|σ_{I_n}|ψ^(n)⟩|` over product pure states. The
/// objective factorizes over sites, so each site runs an independent
/// multi-restart ascent on its own unit sphere.
pub fn maximize_over_products(
    pairings: &[PairingIndexSet],
    restarts: usize,
    seed: u64,
) -> Result<OptimizationResult, OracleError> {
    if restarts == 0 {
        return Err(OracleError::InvalidRestarts);
    }
    if pairings.is_empty() {
        return Err(OperatorError::EmptySites.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut argument = Vec::with_capacity(pairings.len());
    let mut best_value = 1.0f64;
    let mut iterations = 0u64;
    let mut converged = true;

    for pairing in pairings {
        let dim = pairing.dim();
        let sigma = local_sigma(pairing).entries().clone();
        let sigma_adj = sigma.adjoint();
        let mut site_best: Option<SiteAscent> = None;
        let mut site_converged = false;
        for _ in 0..restarts {
            let start = haar_random_qudit(dim, &mut rng).amplitudes().clone();
            let run = ascend_site(&sigma, &sigma_adj, start, 500);
            iterations += run.iterations;
            site_converged |= run.converged;
            if site_best.as_ref().is_none_or(|b| run.value_sq > b.value_sq) {
                site_best = Some(run);
            }
        }
        let site_best = site_best.expect("at least one restart ran");
        best_value *= site_best.value_sq.sqrt();
        argument.push(PureState::new(
            1,
            dim,
            site_best.vector.data.into(),
        )?);
        converged &= site_converged;
    }
    Ok(OptimizationResult {
        best_value,
        argument,
        iterations,
        converged,
    })
}

// ---------------------------------------------------------------------------
// Exact spectra
// ---------------------------------------------------------------------------

/// Extreme eigenvalues of a Hermitian operator: dense solve up to the cap,
/// shifted power iteration above it.
pub fn spectral_extremes(op: &GlobalOperator) -> Result<(f64, f64), OracleError> {
    spectral_extremes_with_cap(op, DEFAULT_DENSE_CAP)
}

pub fn spectral_extremes_with_cap(
    op: &GlobalOperator,
    dense_cap: u64,
) -> Result<(f64, f64), OracleError> {
    if !op.is_hermitian(1e-12) {
        return Err(OracleError::NotHermitian(1e-12));
    }
    if (op.total_dim() as u64) <= dense_cap {
        let dense = op.to_dense();
        let herm = (&dense + dense.adjoint()).scale(0.5);
        let eigs = herm.symmetric_eigenvalues();
        let min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Ok((min, max));
    }

    // Gershgorin radius bounds the whole spectrum; shifting by it makes each
    // extreme the dominant eigenvalue of a positive operator.
    let mut row_sums = vec![0.0f64; op.total_dim()];
    for &(r, _, v) in op.triplets() {
        row_sums[r] += v.norm();
    }
    let radius = row_sums.iter().copied().fold(0.0, f64::max);
    if radius == 0.0 {
        return Ok((0.0, 0.0));
    }
    let max = power_iteration(op, radius, 1.0)? - radius;
    let min = radius - power_iteration(op, radius, -1.0)?;
    Ok((min, max))
}

/// Dominant eigenvalue of `shift * 1 + direction * A` by power iteration
/// with a fixed-seed random start.
fn power_iteration(
    op: &GlobalOperator,
    shift: f64,
    direction: f64,
) -> Result<f64, OracleError> {
    let total = op.total_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x = DVector::from_fn(total, |_, _| {
        Complex64::new(
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
        )
    });
    x /= Complex64::new(x.norm(), 0.0);
    let mut previous = f64::INFINITY;
    let max_iters = 200_000usize;
    for iters in 0..max_iters {
        let mut y = op.apply(&x) * Complex64::new(direction, 0.0);
        y += &x * Complex64::new(shift, 0.0);
        let rayleigh = x.dotc(&y).re;
        let norm = y.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        y /= Complex64::new(norm, 0.0);
        let residual = {
            let mut r = op.apply(&y) * Complex64::new(direction, 0.0);
            r += &y * Complex64::new(shift, 0.0);
            r -= &y * Complex64::new(norm, 0.0);
            r.norm()
        };
        x = y;
        if (rayleigh - previous).abs() <= ITERATIVE_EIG_TOL * rayleigh.abs().max(1.0)
            && residual <= ITERATIVE_EIG_TOL * shift.max(1.0)
        {
            let _ = iters;
            return Ok(norm);
        }
        previous = rayleigh;
    }
    Err(OracleError::PowerIterationStalled {
        tol: ITERATIVE_EIG_TOL,
        iters: max_iters,
    })
}

// ---------------------------------------------------------------------------
// Partial transpose
// ---------------------------------------------------------------------------

fn validate_partition(partition: &[usize], num_sites: usize) -> Result<Vec<usize>, OracleError> {
    if partition.is_empty() || partition.len() >= num_sites {
        return Err(OracleError::TrivialPartition);
    }
    let mut sites = partition.to_vec();
    sites.sort_unstable();
    for window in sites.windows(2) {
        if window[0] == window[1] {
            return Err(OracleError::DuplicatePartitionSite { site: window[0] });
        }
    }
    for &site in &sites {
        if site >= num_sites {
            return Err(OracleError::PartitionSiteOutOfRange { site, num_sites });
        }
    }
    Ok(sites)
}

/// Transpose the given sites of a density matrix: swap the row and column
/// digits of every entry on those sites.
pub fn partial_transpose(
    rho: &DensityMatrix,
    partition: &[usize],
) -> Result<DMatrix<Complex64>, OracleError> {
    let num_sites = rho.num_sites();
    let dim = rho.dim();
    let sites = validate_partition(partition, num_sites)?;
    let total = rho.entries().nrows();
    let mut out = DMatrix::<Complex64>::zeros(total, total);
    for r in 0..total {
        let r_digits = tensor_digits(r, dim, num_sites);
        for c in 0..total {
            let mut r_new = r_digits.clone();
            let mut c_new = tensor_digits(c, dim, num_sites);
            for &site in &sites {
                std::mem::swap(&mut r_new[site], &mut c_new[site]);
            }
            let dest_r = crate::operators::tensor_index(&r_new, dim);
            let dest_c = crate::operators::tensor_index(&c_new, dim);
            out[(dest_r, dest_c)] = rho.entries()[(r, c)];
        }
    }
    Ok(out)
}

/// Minimum eigenvalue of the partial transpose; a negative value certifies
/// entanglement across the cut.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, partition: &[usize]) -> Result<f64, OracleError> {
    let pt = partial_transpose(rho, partition)?;
    let herm = (&pt + pt.adjoint()).scale(0.5);
    Ok(herm
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// `1/(1 + D^(N-1))`: the Werner-state threshold for single-site cuts.
pub fn ppt_single_site_threshold(num_sites: usize, dim: usize) -> f64 {
    1.0 / (1.0 + (dim as f64).powi(num_sites as i32 - 1))
}

/// Bisection on `p` for the sign change of the partially transposed Werner
/// state's minimum eigenvalue.
pub fn ppt_threshold(
    num_sites: usize,
    dim: usize,
    partition: &[usize],
) -> Result<f64, OracleError> {
    validate_partition(partition, num_sites)?;
    let mut min_eig = |p: f64| -> f64 {
        werner_state(num_sites, dim, p)
            .map(|rho| ppt_min_eigenvalue(&rho, partition).unwrap_or(f64::NAN))
            .unwrap_or(f64::NAN)
    };
    bisect(&mut min_eig, 0.0, 1.0, THRESHOLD_TOL).ok_or(OracleError::BisectionBracketFailed)
}

/// Minimum PT eigenvalue of the Werner family across a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptPoint {
    pub p: f64,
    pub min_eigenvalue: f64,
}

pub fn ppt_sweep(
    num_sites: usize,
    dim: usize,
    partition: &[usize],
    p_grid: &[f64],
) -> Result<Vec<PptPoint>, OracleError> {
    validate_partition(partition, num_sites)?;
    let mut points = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let rho = werner_state(num_sites, dim, p)?;
        points.push(PptPoint {
            p,
            min_eigenvalue: ppt_min_eigenvalue(&rho, partition)?,
        });
    }
    Ok(points)
}

/// CSV with columns `p, min_eigenvalue`.
pub fn ppt_sweep_csv(points: &[PptPoint]) -> String {
    let mut out = String::from("p,min_eigenvalue\n");
    for pt in points {
        out.push_str(&format!(
            "{},{}\n",
            fmt_f64(pt.p),
            fmt_f64(pt.min_eigenvalue)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Finite-shot sampling
// ---------------------------------------------------------------------------

/// A finite-shot estimate of one Hermitian quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEstimate {
    pub mean: f64,
    /// Root-sum-square of per-setting standard errors.
    pub std_error: f64,
    pub shots_per_setting: u64,
    /// Number of local measurement settings; `2^(N-1)` per quadrature.
    pub num_settings: u64,
}

/// Deterministic eigenbasis of a local Hermitian factor: eigenvalues sorted
/// ascending, each eigenvector phased so its largest-magnitude component is
/// real positive.
fn deterministic_eigenbasis(factor: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let herm = (factor + factor.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let dim = factor.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vec::with_capacity(dim);
    let mut vectors = DMatrix::<Complex64>::zeros(dim, dim);
    for (slot, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let column = eig.eigenvectors.column(src);
        let mut anchor = 0usize;
        for i in 1..dim {
            if column[i].norm() > column[anchor].norm() {
                anchor = i;
            }
        }
        let phase = if column[anchor].norm() > 0.0 {
            column[anchor].conj() / Complex64::new(column[anchor].norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            vectors[(i, slot)] = column[i] * phase;
        }
    }
    (values, vectors)
}

/// Apply a local D x D matrix at one site of a length-D^N vector.
fn apply_local_to_vector(
    x: &DVector<Complex64>,
    u: &DMatrix<Complex64>,
    site: usize,
    dim: usize,
    num_sites: usize,
) -> DVector<Complex64> {
    let total = x.len();
    let stride = dim.pow((num_sites - 1 - site) as u32);
    let block = stride * dim;
    let mut y = DVector::<Complex64>::zeros(total);
    for outer in 0..total / block {
        for inner in 0..stride {
            let base = outer * block + inner;
            for a in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..dim {
                    acc += u[(a, b)] * x[base + b * stride];
                }
                y[base + a * stride] = acc;
            }
        }
    }
    y
}

/// Probability weights of the joint outcomes of one product setting, in the
/// rotated eigenbasis: `|⟨o|ψ⟩|²` for pure states, `⟨o|ρ|o⟩` for mixed.
fn setting_weights(
    state: &QuantumState,
    bases: &[DMatrix<Complex64>],
    dim: usize,
    num_sites: usize,
) -> Vec<f64> {
    match state {
        QuantumState::Pure(psi) => {
            let mut rotated = psi.amplitudes().clone();
            for (site, basis) in bases.iter().enumerate() {
                rotated = apply_local_to_vector(&rotated, &basis.adjoint(), site, dim, num_sites);
            }
            rotated.iter().map(|z| z.norm_sqr()).collect()
        }
        QuantumState::Mixed(rho) => {
            let total = rho.entries().nrows();
            // B = rho W, applying W to the column index row by row.
            let mut b = DMatrix::<Complex64>::zeros(total, total);
            for r in 0..total {
                let mut row = DVector::from_fn(total, |k, _| rho.entries()[(r, k)]);
                for (site, basis) in bases.iter().enumerate() {
                    row = apply_local_to_vector(&row, &basis.transpose(), site, dim, num_sites);
                }
                for c in 0..total {
                    b[(r, c)] = row[c];
                }
            }
            // rho' = W† B, applied column by column; only the diagonal is needed.
            let mut weights = Vec::with_capacity(total);
            for c in 0..total {
                let mut column = DVector::from_fn(total, |k, _| b[(k, c)]);
                for (site, basis) in bases.iter().enumerate() {
                    column =
                        apply_local_to_vector(&column, &basis.adjoint(), site, dim, num_sites);
                }
                weights.push(column[c].re.max(0.0));
            }
            weights
        }
    }
}

/// Draw one joint outcome by measuring the sites in order: at each site the
/// conditional marginal over its D outcomes is accumulated from the still
/// active block of weights, a digit is drawn, and the block narrows.
fn sample_joint_outcome<R: Rng>(
    weights: &[f64],
    eigenvalues: &[Vec<f64>],
    dim: usize,
    num_sites: usize,
    rng: &mut R,
) -> f64 {
    let mut base = 0usize;
    let mut len = weights.len();
    let mut product = 1.0f64;
    for site in 0..num_sites {
        let sub = len / dim;
        let mut marginals = [0.0f64; 0].to_vec();
        marginals.resize(dim, 0.0);
        for (a, slot) in marginals.iter_mut().enumerate() {
            let start = base + a * sub;
            *slot = weights[start..start + sub].iter().sum();
        }
        let total: f64 = marginals.iter().sum();
        let digit = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = dim - 1;
            for (a, &m) in marginals.iter().enumerate() {
                if u < m {
                    chosen = a;
                    break;
                }
                u -= m;
            }
            chosen
        } else {
            // Zero-probability prefix, reachable only through roundoff.
            rng.random_range(0..dim)
        };
        product *= eigenvalues[site][digit];
        base += digit * sub;
        len = sub;
    }
    product
}

struct TermEstimate {
    mean: f64,
    std_error: f64,
}

fn sample_term<R: Rng>(
    state: &QuantumState,
    term: &SettingTerm,
    shots: u64,
    rng: &mut R,
) -> TermEstimate {
    let dim = state.dim();
    let num_sites = state.num_sites();
    let mut eigenvalues = Vec::with_capacity(num_sites);
    let mut bases = Vec::with_capacity(num_sites);
    for factor in &term.factors {
        let (values, vectors) = deterministic_eigenbasis(factor.entries());
        eigenvalues.push(values);
        bases.push(vectors);
    }
    let weights = setting_weights(state, &bases, dim, num_sites);

    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..shots {
        let outcome = sample_joint_outcome(&weights, &eigenvalues, dim, num_sites, rng);
        sum += outcome;
        sum_sq += outcome * outcome;
    }
    let n = shots as f64;
    let mean = sum / n;
    let std_error = if shots > 1 {
        let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (variance / n).sqrt()
    } else {
        0.0
    };
    TermEstimate { mean, std_error }
}

fn combine_terms(terms: &[SettingTerm], estimates: &[TermEstimate], shots: u64) -> SampleEstimate {
    let mean = terms
        .iter()
        .zip(estimates)
        .map(|(t, e)| t.coefficient * e.mean)
        .sum();
    let variance: f64 = terms
        .iter()
        .zip(estimates)
        .map(|(t, e)| (t.coefficient * e.std_error).powi(2))
        .sum();
    SampleEstimate {
        mean,
        std_error: variance.sqrt(),
        shots_per_setting: shots,
        num_settings: terms.len() as u64,
    }
}

/// Estimate `Tr ρ Σ_I^+` and `Tr ρ Σ_I^-` by projective sampling: each of
/// the `2^(N-1)` product settings per quadrature is measured locally,
/// site by site, with `shots_per_setting` repetitions.
pub fn sample_correlation(
    state: &QuantumState,
    pairings: &[PairingIndexSet],
    shots_per_setting: u64,
    seed: u64,
) -> Result<(SampleEstimate, SampleEstimate), OracleError> {
    if shots_per_setting == 0 {
        return Err(OracleError::InvalidShots);
    }
    if state.num_sites() != pairings.len()
        || pairings.first().is_some_and(|p| p.dim() != state.dim())
    {
        return Err(StateError::DimensionMismatch {
            state_sites: state.num_sites(),
            state_dim: state.dim(),
            other_sites: pairings.len(),
            other_dim: pairings.first().map_or(0, |p| p.dim()),
        }
        .into());
    }
    let decomposition = setting_decomposition(pairings)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let plus_estimates: Vec<TermEstimate> = decomposition
        .plus_terms
        .iter()
        .map(|t| sample_term(state, t, shots_per_setting, &mut rng))
        .collect();
    let minus_estimates: Vec<TermEstimate> = decomposition
        .minus_terms
        .iter()
        .map(|t| sample_term(state, t, shots_per_setting, &mut rng))
        .collect();

    Ok((
        combine_terms(&decomposition.plus_terms, &plus_estimates, shots_per_setting),
        combine_terms(
            &decomposition.minus_terms,
            &minus_estimates,
            shots_per_setting,
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{global_sigma, global_sigma_minus, global_sigma_plus};
    use crate::pairings::{canonical_pairing, PairingIndexSet};
    use crate::states::{
        ensemble_to_density, maximally_mixed, psi_mu, random_separable_ensemble,
        uniform_pair_coefficients,
    };
    use crate::test_support::random_pairing;
    use crate::witnesses::correlation;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn canonical_sites(num_sites: usize, dim: usize) -> Vec<PairingIndexSet> {
        vec![canonical_pairing(dim, ONE).unwrap(); num_sites]
    }

    fn psi_one(num_sites: usize, dim: usize) -> QuantumState {
        let pairings = canonical_sites(num_sites, dim);
        let coeffs: Vec<Vec<Complex64>> =
            pairings.iter().map(uniform_pair_coefficients).collect();
        QuantumState::Pure(psi_mu(&pairings, &coeffs, ONE).unwrap())
    }

    #[test]
    fn qubit_product_maximum_is_one() {
        let pairings = canonical_sites(1, 2);
        let result = maximize_over_products(&pairings, 4, 99).unwrap();
        assert!(result.converged);
        assert!((result.best_value - 1.0).abs() < 1e-9);
        // The maximizer is an equal-weight superposition of the pair.
        let amp0 = result.argument[0].amplitudes()[0].norm();
        let amp1 = result.argument[0].amplitudes()[1].norm();
        assert!((amp0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
        assert!((amp1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
    }

    /// Coarse dense grid over the 3-dimensional unit sphere (global phase
    /// fixed) as an independent check that the qutrit optimum is 1.
    #[test]
    fn qutrit_grid_agrees_with_the_optimizer() {
        let pairing = canonical_pairing(3, ONE).unwrap();
        let sigma = local_sigma(&pairing).entries().clone();
        let steps = 14usize;
        let mut grid_best = 0.0f64;
        for ia in 0..=steps {
            let a = (ia as f64 / steps as f64) * std::f64::consts::FRAC_PI_2;
            for ib in 0..=steps {
                let b = (ib as f64 / steps as f64) * std::f64::consts::FRAC_PI_2;
                for ip in 0..steps {
                    let beta = ip as f64 / steps as f64 * std::f64::consts::TAU;
                    for iq in 0..steps {
                        let gamma = iq as f64 / steps as f64 * std::f64::consts::TAU;
                        let amps = vec![
                            Complex64::new(a.cos() * b.cos(), 0.0),
                            Complex64::from_polar(a.cos() * b.sin(), beta),
                            Complex64::from_polar(a.sin(), gamma),
                        ];
                        let psi = DVector::from_vec(amps);
                        let value = psi.dotc(&(&sigma * &psi)).norm();
                        grid_best = grid_best.max(value);
                    }
                }
            }
        }
        assert!(grid_best <= 1.0 + 1e-12);
        assert!(grid_best > 1.0 - 1e-2);

        let result = maximize_over_products(&[pairing], 6, 4).unwrap();
        assert!(result.best_value >= grid_best - 1e-4);
        assert!(result.best_value <= 1.0 + 1e-9);
        assert!(result.best_value >= 1.0 - 1e-6);
    }

    #[test]
    fn product_maximum_never_exceeds_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for dim in 2..=7 {
            for round in 0..4 {
                let pairings = vec![random_pairing(dim, &mut rng)];
                let result =
                    maximize_over_products(&pairings, 3, round as u64 * 31 + dim as u64).unwrap();
                assert!(result.best_value <= 1.0 + 1e-9, "dim {dim}");
                assert!(result.best_value >= 1.0 - 1e-6, "dim {dim}");
                // Re-evaluating the returned argument reproduces the value.
                let recomputed: f64 = pairings
                    .iter()
                    .zip(&result.argument)
                    .map(|(p, s)| local_sigma(p).expectation(s.amplitudes()).norm())
                    .product();
                assert!((recomputed - result.best_value).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_restarts_is_an_error() {
        let pairings = canonical_sites(1, 2);
        assert!(matches!(
            maximize_over_products(&pairings, 0, 1),
            Err(OracleError::InvalidRestarts)
        ));
    }

    #[test]
    fn two_qubit_plus_part_has_extreme_eigenvalues() {
        let plus = global_sigma_plus(&canonical_sites(2, 2)).unwrap();
        let (min, max) = spectral_extremes(&plus).unwrap();
        assert!((min + 2.0).abs() < 1e-12);
        assert!((max - 2.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_combination_reaches_two_to_the_n_minus_half() {
        let pairings = canonical_sites(2, 2);
        let plus = global_sigma_plus(&pairings).unwrap();
        let minus = global_sigma_minus(&pairings).unwrap();
        let combined = plus.add(&minus).unwrap();
        let (_, max) = spectral_extremes(&combined).unwrap();
        assert!((max - 2f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn local_hermitian_parts_have_unit_extremes() {
        for dim in [2usize, 4, 6] {
            let p = canonical_pairing(dim, ONE).unwrap();
            let plus = global_sigma_plus(&[p]).unwrap();
            let (min, max) = spectral_extremes(&plus).unwrap();
            assert!((min + 1.0).abs() < 1e-12);
            assert!((max - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let sigma = global_sigma(&canonical_sites(2, 2)).unwrap();
        assert!(matches!(
            spectral_extremes(&sigma),
            Err(OracleError::NotHermitian(_))
        ));
    }

    #[test]
    fn iterative_fallback_matches_dense() {
        let pairings = canonical_sites(3, 2);
        let plus = global_sigma_plus(&pairings).unwrap();
        let dense = spectral_extremes(&plus).unwrap();
        let iterative = spectral_extremes_with_cap(&plus, 1).unwrap();
        assert!((dense.0 - iterative.0).abs() < 1e-6);
        assert!((dense.1 - iterative.1).abs() < 1e-6);
    }

    #[test]
    fn werner_pt_flips_sign_across_one_third() {
        let above = werner_state(2, 2, 0.5).unwrap();
        assert!(ppt_min_eigenvalue(&above, &[0]).unwrap() < 0.0);
        let below = werner_state(2, 2, 0.3).unwrap();
        assert!(ppt_min_eigenvalue(&below, &[0]).unwrap() >= -1e-12);
    }

    #[test]
    fn product_states_stay_positive_under_pt() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let ensemble = random_separable_ensemble(2, 3, 2, &mut rng).unwrap();
            let rho = ensemble_to_density(&ensemble).unwrap();
            assert!(ppt_min_eigenvalue(&rho, &[1]).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn ppt_thresholds_match_the_closed_form() {
        for (num_sites, dim, expected) in
            [(2usize, 2usize, 1.0 / 3.0), (2, 3, 0.25), (3, 2, 0.2)]
        {
            let threshold = ppt_threshold(num_sites, dim, &[0]).unwrap();
            assert!(
                (threshold - expected).abs() < 1e-6,
                "({num_sites},{dim}): {threshold}"
            );
            assert!((ppt_single_site_threshold(num_sites, dim) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_partitions_are_rejected() {
        let rho = werner_state(2, 2, 0.5).unwrap();
        assert!(matches!(
            ppt_min_eigenvalue(&rho, &[]),
            Err(OracleError::TrivialPartition)
        ));
        assert!(matches!(
            ppt_min_eigenvalue(&rho, &[0, 1]),
            Err(OracleError::TrivialPartition)
        ));
        assert!(matches!(
            ppt_min_eigenvalue(&rho, &[5]),
            Err(OracleError::PartitionSiteOutOfRange { site: 5, .. })
        ));
    }

    #[test]
    fn ppt_sweep_emits_csv() {
        let grid = [0.0, 0.25, 0.5];
        let points = ppt_sweep(2, 2, &[0], &grid).unwrap();
        let csv = ppt_sweep_csv(&points);
        assert!(csv.starts_with("p,min_eigenvalue\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn sampling_agrees_with_exact_bell_correlation() {
        let state = psi_one(2, 2);
        let pairings = canonical_sites(2, 2);
        let (re, im) = sample_correlation(&state, &pairings, 20_000, 12345).unwrap();
        assert_eq!(re.num_settings, 2);
        assert_eq!(im.num_settings, 2);
        assert!((re.mean - 2.0).abs() <= 5.0 * re.std_error + 1e-12);
        assert!(im.mean.abs() <= 5.0 * im.std_error + 1e-12);
    }

    #[test]
    fn sampling_the_maximally_mixed_state_averages_to_zero() {
        let rho = QuantumState::Mixed(maximally_mixed(2, 2).unwrap());
        let pairings = canonical_sites(2, 2);
        let (re, im) = sample_correlation(&rho, &pairings, 20_000, 777).unwrap();
        assert!(re.mean.abs() <= 5.0 * re.std_error + 1e-12);
        assert!(im.mean.abs() <= 5.0 * im.std_error + 1e-12);
    }

    #[test]
    fn sampling_tracks_the_werner_correlation() {
        let rho = QuantumState::Mixed(werner_state(2, 2, 0.6).unwrap());
        let pairings = canonical_sites(2, 2);
        let exact = correlation(&rho, &pairings).unwrap();
        assert!((exact.value.norm() - 1.2).abs() < 1e-12);
        let (re, im) = sample_correlation(&rho, &pairings, 20_000, 31415).unwrap();
        assert!((re.mean - exact.re_part).abs() <= 5.0 * re.std_error + 1e-12);
        assert!((im.mean - exact.im_part).abs() <= 5.0 * im.std_error + 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let state = psi_one(2, 3);
        let pairings = canonical_sites(2, 3);
        let a = sample_correlation(&state, &pairings, 500, 2024).unwrap();
        let b = sample_correlation(&state, &pairings, 500, 2024).unwrap();
        assert_eq!(a, b);
        let c = sample_correlation(&state, &pairings, 500, 2025).unwrap();
        assert!(a.0.mean != c.0.mean || a.1.mean != c.1.mean);
    }

    #[test]
    fn zero_shots_is_an_error() {
        let state = psi_one(2, 2);
        assert!(matches!(
            sample_correlation(&state, &canonical_sites(2, 2), 0, 1),
            Err(OracleError::InvalidShots)
        ));
    }
}
