//! Bell-type separability witnesses for systems of N qudits.
//!
//! The toolkit builds the non-Hermitian ladder operators `σ_I` attached to a
//! pairing of the D basis labels, tensors them into sparse N-site observables
//! `Σ_I`, and evaluates the resulting correlation inequalities on pure and
//! mixed states:
//!
//! * separable states obey `|Tr ρ Σ_I| ≤ 1`, while entangled states can reach
//!   `2^(N-1)`;
//! * local-hidden-variable models only bound the same correlations by
//!   `√2^(N-1)` (odd N, per quadrature) or `√2^N` (even N, sum).
//!
//! Everything is double-checked by independent oracles: brute-force product
//! maximization, dense spectra, the partial-transpose criterion, and
//! finite-shot sampling of the `2^(N-1)` local measurement settings.
//!
//! Tensor indices are big-endian throughout: site 0 is the most significant
//! base-D digit of a computational-basis index.

pub mod oracles;
pub mod operators;
pub mod pairings;
pub mod states;
pub mod verify;
pub mod witnesses;

mod complex_serde;
mod util;

pub use operators::{GlobalOperator, LocalOperator};
pub use pairings::PairingIndexSet;
pub use states::{DensityMatrix, PureState, QuantumState, SeparableEnsemble};
pub use witnesses::CorrelationReport;

/// Default cap on the total dimension D^N for sparse operator construction.
pub const DEFAULT_SIZE_CAP: u64 = 65_536;

/// Default cap on the total dimension D^N for dense matrices and eigensolves.
pub const DEFAULT_DENSE_CAP: u64 = 4_096;

#[cfg(test)]
pub(crate) mod test_support;
