//! Correlation reports, separability and local-realism verdicts, Werner
//! sweeps, and index-set scans.
//!
//! For a state ρ and index sets `I = (I_1, .., I_N)` the central quantity is
//! the complex correlation `Tr ρ Σ_I`, whose real and imaginary parts are the
//! expectations of the Hermitian observables `Σ_I^±`:
//!
//! * separable states obey the quadratic bound
//!   `|Tr ρ Σ_I^+|² + |Tr ρ Σ_I^-|² ≤ 1` and its weaker linear forms;
//! * local-hidden-variable models obey `|Tr ρ Σ_I^±| ≤ √2^(N-1)` for odd N
//!   and `|Tr ρ Σ_I^+| + |Tr ρ Σ_I^-| ≤ √2^N` for even N.
//!
//! Exceeding the first family certifies entanglement from measured
//! correlations alone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{
    global_sigma_minus_with_cap, global_sigma_plus_with_cap, global_sigma_with_cap, OperatorError,
};
use crate::pairings::{canonical_pairing, count_pairings, enumerate_pairings, PairingIndexSet, PairingError};
use crate::states::{werner_state_with_cap, QuantumState, StateError};
use crate::util::{bisect, fmt_f64};
use crate::{DEFAULT_DENSE_CAP, DEFAULT_SIZE_CAP};

/// Margin above a bound before a violation is flagged; guards against
/// roundoff at the boundary.
pub const CERTIFICATION_TOL: f64 = 1e-9;

/// Grid resolution of the bisection that locates threshold crossings.
pub const BISECTION_TOL: f64 = 1e-8;

/// Default cap on the number of index-set combinations an exhaustive scan
/// will evaluate.
pub const DEFAULT_SCAN_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error("sweep grid value {0} outside [0, 1]")]
    GridOutOfRange(f64),
    #[error(
        "exhaustive scan needs {combinations} combinations, above the cap {cap}; \
         use the per-site greedy strategy"
    )]
    ScanCapExceeded { combinations: u128, cap: u64 },
}

/// Separability and local-realism verdicts attached to a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    /// `|Tr ρ Σ_I| > 1 + tol`: entanglement certified.
    pub entangled_certified: bool,
    /// The parity-appropriate local-hidden-variable bound is exceeded.
    pub lhv_violated: bool,
}

/// The correlation `Tr ρ Σ_I` together with every bound comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub index_sets: Vec<PairingIndexSet>,
    /// `Tr ρ Σ_I` as a complex number.
    #[serde(with = "crate::complex_serde")]
    pub value: Complex64,
    /// `Tr ρ Σ_I^+`, computed through the sparse Hermitian part.
    pub re_part: f64,
    /// `Tr ρ Σ_I^-`.
    pub im_part: f64,
    /// The separable-state bound on `|value|`; always 1.
    pub separability_bound: f64,
    /// `re_part² + im_part²`, the quadratic form bounded by 1.
    pub quadratic_lhs: f64,
    /// `√2^(N-1)`, the LHV bound on each quadrature for odd N.
    pub lhv_bound_odd: f64,
    /// `√2^N`, the LHV bound on `|re| + |im|` for even N.
    pub lhv_bound_even_sum: f64,
    /// `|value| / 1`.
    pub violation_ratio_sep: f64,
    /// Observed LHV quantity over its parity-appropriate bound.
    pub violation_ratio_lhv: f64,
    pub verdicts: Verdicts,
}

impl CorrelationReport {
    pub fn num_sites(&self) -> usize {
        self.index_sets.len()
    }
}

/// Exact correlation of a state with `Σ_I` for one choice of index sets,
/// evaluated by sparse contraction.
pub fn correlation(
    state: &QuantumState,
    pairings: &[PairingIndexSet],
) -> Result<CorrelationReport, WitnessError> {
    correlation_with_cap(state, pairings, DEFAULT_SIZE_CAP)
}

pub fn correlation_with_cap(
    state: &QuantumState,
    pairings: &[PairingIndexSet],
    cap: u64,
) -> Result<CorrelationReport, WitnessError> {
    let sigma = global_sigma_with_cap(pairings, cap)?;
    let value = state.expectation(&sigma)?;
    // The Hermitian parts give the two quadratures by independent
    // contractions; their imaginary residue is pure roundoff.
    let re_part = state
        .expectation(&global_sigma_plus_with_cap(pairings, cap)?)?
        .re;
    let im_part = state
        .expectation(&global_sigma_minus_with_cap(pairings, cap)?)?
        .re;
    let num_sites = pairings.len();
    let lhv_bound_odd = 2f64.powf((num_sites as f64 - 1.0) / 2.0);
    let lhv_bound_even_sum = 2f64.powf(num_sites as f64 / 2.0);
    let quadratic_lhs = re_part * re_part + im_part * im_part;
    let violation_ratio_sep = value.norm();
    let (lhv_observed, lhv_bound) = if num_sites % 2 == 1 {
        (re_part.abs().max(im_part.abs()), lhv_bound_odd)
    } else {
        (re_part.abs() + im_part.abs(), lhv_bound_even_sum)
    };
    Ok(CorrelationReport {
        index_sets: pairings.to_vec(),
        value,
        re_part,
        im_part,
        separability_bound: 1.0,
        quadratic_lhs,
        lhv_bound_odd,
        lhv_bound_even_sum,
        violation_ratio_sep,
        violation_ratio_lhv: lhv_observed / lhv_bound,
        verdicts: Verdicts {
            entangled_certified: value.norm() > 1.0 + CERTIFICATION_TOL,
            lhv_violated: lhv_observed > lhv_bound + CERTIFICATION_TOL,
        },
    })
}

/// Which separability inequalities a report violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparabilityVerdict {
    /// `re² + im² > 1`.
    pub quadratic_violated: bool,
    /// `|re| > 1`.
    pub linear_re_violated: bool,
    /// `|im| > 1`.
    pub linear_im_violated: bool,
    /// `|re| + |im| > √2`.
    pub linear_sum_violated: bool,
    /// Any of the above; separable states satisfy all of them.
    pub entangled_certified: bool,
}

/// Evaluate the quadratic separability inequality and its weaker linear
/// forms. Any violation certifies entanglement.
pub fn check_separability(report: &CorrelationReport) -> SeparabilityVerdict {
    let re = report.re_part.abs();
    let im = report.im_part.abs();
    let quadratic_violated = report.quadratic_lhs > 1.0 + CERTIFICATION_TOL;
    let linear_re_violated = re > 1.0 + CERTIFICATION_TOL;
    let linear_im_violated = im > 1.0 + CERTIFICATION_TOL;
    let linear_sum_violated = re + im > std::f64::consts::SQRT_2 + CERTIFICATION_TOL;
    SeparabilityVerdict {
        quadratic_violated,
        linear_re_violated,
        linear_im_violated,
        linear_sum_violated,
        entangled_certified: quadratic_violated
            || linear_re_violated
            || linear_im_violated
            || linear_sum_violated,
    }
}

/// Local-realism comparison for a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhvVerdict {
    /// `max(|re|, |im|)` for odd N, `|re| + |im|` for even N.
    pub observed: f64,
    /// `√2^(N-1)` for odd N, `√2^N` for even N.
    pub bound: f64,
    pub ratio: f64,
    pub violated: bool,
}

/// Apply the parity-appropriate local-hidden-variable bound: each quadrature
/// separately for odd N, their sum for even N.
pub fn check_lhv(report: &CorrelationReport) -> LhvVerdict {
    let num_sites = report.num_sites();
    let (observed, bound) = if num_sites % 2 == 1 {
        (
            report.re_part.abs().max(report.im_part.abs()),
            report.lhv_bound_odd,
        )
    } else {
        (
            report.re_part.abs() + report.im_part.abs(),
            report.lhv_bound_even_sum,
        )
    };
    LhvVerdict {
        observed,
        bound,
        ratio: observed / bound,
        violated: observed > bound + CERTIFICATION_TOL,
    }
}

// ---------------------------------------------------------------------------
// Werner sweeps
// ---------------------------------------------------------------------------

/// One grid point of a Werner sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WernerPoint {
    pub p: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub sep_violated: bool,
    pub lhv_violated: bool,
}

/// Exact Werner correlations on a parameter grid, with the numerically
/// bisected and closed-form separability thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WernerSweep {
    pub num_sites: usize,
    pub dim: usize,
    pub points: Vec<WernerPoint>,
    /// Crossing of `|Tr ρ_W Σ_I| = 1` located by bisection on the exact
    /// correlation, when it exists in `[0, 1]`.
    pub threshold_numeric: Option<f64>,
    /// `2^-(N-1)` for even D, `(D^N - 1)/((2D)^(N-1)(D-1) + D^(N-1) - 1)`
    /// for odd D.
    pub threshold_closed_form: f64,
}

/// Analytic `Tr ρ_W Σ_I` for the canonical index sets with `eta = 1`:
/// `p 2^(N-1)` for even D and
/// `p (2^(N-1)(D-1)/D + 1/D) + (1-p)/D^N` for odd D.
pub fn werner_correlation_closed_form(num_sites: usize, dim: usize, p: f64) -> f64 {
    let peak = 2f64.powi(num_sites as i32 - 1);
    if dim % 2 == 0 {
        p * peak
    } else {
        let d = dim as f64;
        p * (peak * (d - 1.0) / d + 1.0 / d) + (1.0 - p) / d.powi(num_sites as i32)
    }
}

/// Closed-form Werner separability-violation threshold.
pub fn werner_witness_threshold(num_sites: usize, dim: usize) -> f64 {
    let n = num_sites as i32;
    if dim % 2 == 0 {
        2f64.powi(-(n - 1))
    } else {
        let d = dim as f64;
        (d.powi(n) - 1.0) / ((2.0 * d).powi(n - 1) * (d - 1.0) + d.powi(n - 1) - 1.0)
    }
}

/// Sweep the Werner family over `p_grid`, computing each correlation exactly
/// from the density matrix (the closed form is reported only as the
/// reference threshold).
pub fn werner_sweep(
    num_sites: usize,
    dim: usize,
    p_grid: &[f64],
) -> Result<WernerSweep, WitnessError> {
    werner_sweep_with_caps(num_sites, dim, p_grid, DEFAULT_SIZE_CAP, DEFAULT_DENSE_CAP)
}

pub fn werner_sweep_with_caps(
    num_sites: usize,
    dim: usize,
    p_grid: &[f64],
    cap: u64,
    dense_cap: u64,
) -> Result<WernerSweep, WitnessError> {
    for &p in p_grid {
        if !(0.0..=1.0).contains(&p) {
            return Err(WitnessError::GridOutOfRange(p));
        }
    }
    let eta = Complex64::new(1.0, 0.0);
    let pairings = vec![canonical_pairing(dim, eta)?; num_sites];
    let correlation_at = |p: f64| -> Result<CorrelationReport, WitnessError> {
        let rho = werner_state_with_cap(num_sites, dim, p, dense_cap)?;
        correlation_with_cap(&QuantumState::Mixed(rho), &pairings, cap)
    };

    let mut points = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let report = correlation_at(p)?;
        points.push(WernerPoint {
            p,
            re: report.re_part,
            im: report.im_part,
            abs: report.value.norm(),
            sep_violated: report.verdicts.entangled_certified,
            lhv_violated: report.verdicts.lhv_violated,
        });
    }

    // |Tr ρ_W Σ_I| grows affinely in p, so one bracket suffices.
    let mut boundary_gap = |p: f64| -> f64 {
        correlation_at(p)
            .map(|r| r.value.norm() - 1.0)
            .unwrap_or(f64::NAN)
    };
    let threshold_numeric = bisect(&mut boundary_gap, 0.0, 1.0, BISECTION_TOL);

    Ok(WernerSweep {
        num_sites,
        dim,
        points,
        threshold_numeric,
        threshold_closed_form: werner_witness_threshold(num_sites, dim),
    })
}

impl WernerSweep {
    /// CSV with columns `p, re, im, abs, sep_violated, lhv_violated`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,re,im,abs,sep_violated,lhv_violated\n");
        for pt in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_f64(pt.p),
                fmt_f64(pt.re),
                fmt_f64(pt.im),
                fmt_f64(pt.abs),
                pt.sep_violated,
                pt.lhv_violated
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Phase sweeps of the ψ(μ) family
// ---------------------------------------------------------------------------

/// One grid point of a `ψ(e^{iθ})` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuPoint {
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub sep_violated: bool,
    pub lhv_violated: bool,
}

/// Correlations of `ψ(μ)` on a grid of phases `μ = e^{iθ}`, built from the
/// canonical index sets with equal pair coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuSweep {
    pub num_sites: usize,
    pub dim: usize,
    pub points: Vec<MuPoint>,
}

pub fn mu_sweep(num_sites: usize, dim: usize, thetas: &[f64]) -> Result<MuSweep, WitnessError> {
    let eta = Complex64::new(1.0, 0.0);
    let pairings = vec![canonical_pairing(dim, eta)?; num_sites];
    let coeffs: Vec<Vec<Complex64>> = pairings
        .iter()
        .map(crate::states::uniform_pair_coefficients)
        .collect();
    let mut points = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let mu = Complex64::from_polar(1.0, theta);
        let psi = crate::states::psi_mu(&pairings, &coeffs, mu)?;
        let report = correlation(&QuantumState::Pure(psi), &pairings)?;
        points.push(MuPoint {
            theta,
            re: report.re_part,
            im: report.im_part,
            abs: report.value.norm(),
            sep_violated: report.verdicts.entangled_certified,
            lhv_violated: report.verdicts.lhv_violated,
        });
    }
    Ok(MuSweep {
        num_sites,
        dim,
        points,
    })
}

impl MuSweep {
    /// CSV with columns `theta, re, im, abs, sep_violated, lhv_violated`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,re,im,abs,sep_violated,lhv_violated\n");
        for pt in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_f64(pt.theta),
                fmt_f64(pt.re),
                fmt_f64(pt.im),
                fmt_f64(pt.abs),
                pt.sep_violated,
                pt.lhv_violated
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Index-set scans
// ---------------------------------------------------------------------------

/// How to search the family of `N_I^N` inequalities for a given state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanStrategy {
    /// Evaluate every combination of index sets, refusing above the cap.
    Exhaustive { cap: u64 },
    /// Coordinate ascent: optimize one site's index set at a time until a
    /// full pass makes no improvement.
    PerSiteGreedy,
    /// Evaluate only the canonical pairing at every site.
    FixedCanonical,
}

impl Default for ScanStrategy {
    fn default() -> Self {
        ScanStrategy::Exhaustive {
            cap: DEFAULT_SCAN_CAP,
        }
    }
}

/// Result of a scan: the report with the largest `|Tr ρ Σ_I|` and the number
/// of index-set combinations evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub report: CorrelationReport,
    pub examined: u64,
}

/// Search index-set combinations for the strongest correlation; ties keep
/// the first combination in enumeration order. Odd dimensions use `eta = 1`
/// at every site.
pub fn scan_index_sets(
    state: &QuantumState,
    strategy: ScanStrategy,
) -> Result<ScanOutcome, WitnessError> {
    let num_sites = state.num_sites();
    let dim = state.dim();
    let eta = Complex64::new(1.0, 0.0);
    let choices = enumerate_pairings(dim, eta)?;

    match strategy {
        ScanStrategy::FixedCanonical => {
            let pairings = vec![canonical_pairing(dim, eta)?; num_sites];
            Ok(ScanOutcome {
                report: correlation(state, &pairings)?,
                examined: 1,
            })
        }
        ScanStrategy::Exhaustive { cap } => {
            let per_site = count_pairings(dim)? as u128;
            let combinations = per_site.pow(num_sites as u32);
            if combinations > u128::from(cap) {
                return Err(WitnessError::ScanCapExceeded { combinations, cap });
            }
            let mut best: Option<CorrelationReport> = None;
            let mut selector = vec![0usize; num_sites];
            let mut examined = 0u64;
            loop {
                let pairings: Vec<PairingIndexSet> =
                    selector.iter().map(|&i| choices[i].clone()).collect();
                let report = correlation(state, &pairings)?;
                examined += 1;
                if best
                    .as_ref()
                    .is_none_or(|b| report.value.norm() > b.value.norm())
                {
                    best = Some(report);
                }
                // Odometer increment over the per-site selector.
                let mut site = num_sites;
                loop {
                    if site == 0 {
                        return Ok(ScanOutcome {
                            report: best.expect("at least one combination evaluated"),
                            examined,
                        });
                    }
                    site -= 1;
                    selector[site] += 1;
                    if selector[site] < choices.len() {
                        break;
                    }
                    selector[site] = 0;
                }
            }
        }
        ScanStrategy::PerSiteGreedy => {
            let mut selector = vec![0usize; num_sites];
            let mut examined = 0u64;
            let canonical = canonical_pairing(dim, eta)?;
            let canonical_index = choices
                .iter()
                .position(|c| *c == canonical)
                .unwrap_or(0);
            selector.fill(canonical_index);

            let evaluate = |sel: &[usize]| -> Result<CorrelationReport, WitnessError> {
                let pairings: Vec<PairingIndexSet> =
                    sel.iter().map(|&i| choices[i].clone()).collect();
                correlation(state, &pairings)
            };
            let mut best = evaluate(&selector)?;
            examined += 1;
            // Bounded number of passes; each pass either improves or stops.
            for _ in 0..10 {
                let mut improved = false;
                for site in 0..num_sites {
                    let original = selector[site];
                    let mut best_choice = original;
                    for candidate in 0..choices.len() {
                        if candidate == original {
                            continue;
                        }
                        selector[site] = candidate;
                        let report = evaluate(&selector)?;
                        examined += 1;
                        if report.value.norm() > best.value.norm() {
                            best = report;
                            best_choice = candidate;
                            improved = true;
                        }
                    }
                    selector[site] = best_choice;
                }
                if !improved {
                    break;
                }
            }
            Ok(ScanOutcome {
                report: best,
                examined,
            })
        }
    }
}
