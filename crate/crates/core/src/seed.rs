//! Counter-based seed derivation.
//!
//! Every random draw in a simulation descends from a master seed through a
//! path of integer labels (trial index, stream, ...). Children are derived by
//! hashing, so a trial's randomness does not depend on how many other trials
//! exist or on the order they run in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, CVector, C64};

/// Stream labels used by the simulation harness.
pub mod stream {
    pub const TRAINING: u64 = 0x7261_696e;
    pub const TRIALS: u64 = 0x7472_6961;
    pub const TX_CHANNEL: u64 = 1;
    pub const JAM_CHANNEL: u64 = 2;
    pub const JAMMER: u64 = 3;
    pub const NOISE: u64 = 4;
    pub const SWEEP: u64 = 0x7377_6570;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    pub fn child(self, label: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(label.wrapping_add(0x9e37_79b9_7f4a_7c15))))
    }

    pub fn path(self, labels: &[u64]) -> Seed {
        labels.iter().fold(self, |s, &l| s.child(l))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One draw from CN(0, 1): real and imaginary parts independent N(0, 1/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_normal_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn complex_normal_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    // Column-major fill keeps the draw order independent of nalgebra internals.
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}
