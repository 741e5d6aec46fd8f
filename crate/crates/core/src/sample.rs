//! Seeded random draws used by tests, suites and rapidity sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with modulus uniform in `[0.5, 2]` and uniform argument.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let r = rng.gen_range(0.5..=2.0);
    let arg = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::from_polar(r, arg)
}

/// Complex number with real and imaginary parts uniform in `[-1, 1]`.
pub fn random_unit_box<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_unit_box(rng))
}

/// Random matrix shifted away from singularity, suitable as a gauge.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let g = random_matrix(rng, n, n) + CMatrix::identity(n, n) * C64::new(1.5, 0.0);
        if crate::linalg::rcond(&g) > 1e-2 {
            return g;
        }
    }
}
