//! Seeded Haar-induced sampling.
//!
//! A [`Seed`] is a 64-bit value that can be split into independent child
//! seeds by index; each seed drives a ChaCha8 stream, so any sampled object is
//! reproduced from its seed alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::state::{DensityOperator, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Child seed for stream `index`. Distinct indices give statistically
    /// independent streams.
    pub fn split(self, index: u64) -> Seed {
        Seed(splitmix64(splitmix64(self.0) ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D))))
    }

    /// Chained split over a path of indices.
    pub fn split_path(self, path: &[u64]) -> Seed {
        path.iter().fold(self, |s, &i| s.split(i))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> crate::C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn sample_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    // Fix the column phases so the distribution is exactly Haar.
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn sample_state<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    if rank == 0 || rank > dim {
        return Err(Error::validation(format!("rank {rank} outside 1..={dim}")));
    }
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityOperator::from_trusted(m.unscale(tr), None))
}

pub fn sample_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    PureState::normalized(v, None).expect("gaussian vector is nonzero")
}

/// Induced-measure random density operator `GG†/Tr GG†` with `G` of shape
/// `dim × rank`.
pub fn random_state(dim: usize, rank: usize, seed: Seed) -> Result<DensityOperator> {
    sample_state(dim, rank, &mut seed.rng())
}

/// Haar-random unitary.
pub fn random_unitary(dim: usize, seed: Seed) -> CMatrix {
    sample_unitary(dim, &mut seed.rng())
}

pub fn random_pure(dim: usize, seed: Seed) -> PureState {
    sample_pure(dim, &mut seed.rng())
}
