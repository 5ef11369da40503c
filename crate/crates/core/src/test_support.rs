//! Helpers shared by the unit tests across modules.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::pairings::PairingIndexSet;

pub(crate) fn random_phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// A uniformly shuffled pairing of `{0, .., dim-1}` with a random unit phase.
pub(crate) fn random_pairing<R: Rng>(dim: usize, rng: &mut R) -> PairingIndexSet {
    let mut labels: Vec<usize> = (0..dim).collect();
    labels.shuffle(rng);
    let unpaired = (dim % 2 == 1).then(|| labels.pop().unwrap());
    let pairs: Vec<(usize, usize)> = labels
        .chunks_exact(2)
        .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
        .collect();
    PairingIndexSet::new(dim, pairs, unpaired, random_phase(rng)).unwrap()
}

/// A random unit-norm complex coefficient vector of length `len`.
pub(crate) fn random_unit_coeffs<R: Rng>(len: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..len)
            .map(|_| {
                Complex64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}
