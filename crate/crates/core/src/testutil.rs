//! Shared helpers for the crate's unit tests.
#![cfg(test)]

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::spectral::{Basis, SpectralField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real (Hermitian-symmetric) field with coefficients in
/// `[-scale, scale]`.
pub fn random_field(
    basis: &Basis<f64>,
    m_max: usize,
    period: f64,
    rng: &mut ChaCha8Rng,
    scale: f64,
) -> SpectralField<f64> {
    let mut u = SpectralField::zero(basis.clone(), m_max, period);
    for flat in 0..basis.spatial_len() {
        u.set(0, flat, Complex::new(rng.gen_range(-scale..=scale), 0.0));
        for m in 1..=m_max as i64 {
            let c = Complex::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale));
            u.set(m, flat, c);
            u.set(-m, flat, c.conj());
        }
    }
    u
}

/// Random purely oscillatory real field.
pub fn random_oscillatory(
    basis: &Basis<f64>,
    m_max: usize,
    period: f64,
    rng: &mut ChaCha8Rng,
    scale: f64,
) -> SpectralField<f64> {
    random_field(basis, m_max, period, rng, scale).project_oscillatory()
}
