//! Deterministic random and quasi-random inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg;
use crate::symplectic::{gamma, omega, EmPair, SiegelPoint, SymplecticMatrix, Taming};
use crate::RMat;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(n: usize, m: usize, rng: &mut SampleRng) -> RMat {
    RMat::from_fn(n, m, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn random_symmetric(n: usize, rng: &mut SampleRng) -> RMat {
    let g = gaussian(n, n, rng);
    (&g + g.transpose()) * 0.5
}

/// `R` symmetric Gaussian, `I = MᵀM + 0.1`.
pub fn random_em_pair(n: usize, rng: &mut SampleRng) -> EmPair {
    let r = random_symmetric(n, rng);
    let m = gaussian(n, n, rng);
    let i = m.transpose() * &m + RMat::identity(n, n) * 0.1;
    EmPair::new(r, i).expect("sampled pair is valid")
}

pub fn random_taming(n: usize, rng: &mut SampleRng) -> Taming {
    gamma(&random_em_pair(n, rng))
}

pub fn random_siegel(n: usize, rng: &mut SampleRng) -> SiegelPoint {
    let p = random_em_pair(n, rng);
    SiegelPoint::from_parts(&p.r, &p.i).expect("sampled point is valid")
}

/// `-Ω S` with `S` symmetric Gaussian of standard deviation `scale`.
pub fn random_sp_algebra(n: usize, rng: &mut SampleRng, scale: f64) -> RMat {
    -(omega(n) * random_symmetric(2 * n, rng)) * scale
}

/// Exponential of [`random_sp_algebra`].
pub fn random_symplectic(n: usize, rng: &mut SampleRng, scale: f64) -> SymplecticMatrix {
    let x = random_sp_algebra(n, rng, scale);
    SymplecticMatrix::with_tolerance(linalg::expm(&x), 1e-9).expect("exponential is symplectic")
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// `count` points of the Halton sequence in the box `[lo, hi]`, skipping the
/// first point (which sits on the corner).
pub fn halton_box(lo: &[f64], hi: &[f64], count: usize) -> Vec<Vec<f64>> {
    assert!(lo.len() == hi.len() && lo.len() <= PRIMES.len());
    (1..=count as u64)
        .map(|i| {
            lo.iter()
                .zip(hi)
                .zip(PRIMES)
                .map(|((a, b), p)| a + (b - a) * radical_inverse(i, p))
                .collect()
        })
        .collect()
}
