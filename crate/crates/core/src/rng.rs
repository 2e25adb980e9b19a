//! Seeded random sampling used by the heuristic checks.
//!
//! Everything draws from a `SplitMix64` stream so a recorded seed is
//! enough to reproduce any random trial.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;

use crate::scalar::{Real, C};

pub type SeededRng = SplitMix64;

pub fn seeded(seed: u64) -> SeededRng {
    SplitMix64::seed_from_u64(seed)
}

/// Independent stream for sub-task `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    seeded(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Complex Gaussian vector normalized to unit length.
pub fn random_unit_vector<T: Real>(rng: &mut SeededRng, len: usize) -> DVector<C<T>> {
    loop {
        let v = DVector::from_fn(len, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C::new(T::lit(re), T::lit(im))
        });
        let n = v.norm();
        if n > T::lit(1e-8) {
            return v.unscale(n);
        }
    }
}

/// Haar-ish random unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<T: Real>(rng: &mut SeededRng, n: usize) -> nalgebra::DMatrix<C<T>> {
    let g = nalgebra::DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C::new(T::lit(re), T::lit(im))
    });
    g.qr().q()
}
