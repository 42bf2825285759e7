//! Deterministic sampling for the randomized checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::linalg::{CMat, C64};
use crate::ogroup::GroupElement;

pub type SampleRng = ChaCha8Rng;

/// Seed and sample counts for a randomized verification pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub seed: u64,
    /// Number of sampled cone elements (and of sampled pairs).
    pub count: usize,
    /// Cone elements are drawn with coordinates in `0..=max_coord`.
    pub max_coord: i64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            seed: 0,
            count: 64,
            max_coord: 8,
        }
    }
}

impl SampleSpec {
    pub fn with_seed(seed: u64) -> Self {
        SampleSpec {
            seed,
            ..Self::default()
        }
    }

    pub fn rng(&self) -> SampleRng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Element with independent entries uniform in the unit square.
pub fn random_element<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> AlgebraElement {
    let blocks = shape
        .block_sizes()
        .iter()
        .map(|&n| CMat::from_fn(n, n, |_, _| random_complex(rng)))
        .collect();
    AlgebraElement::from_blocks(shape, blocks).expect("blocks built from shape")
}

/// Cone element of `Z^k` with every coordinate in `0..=max_coord`.
pub fn random_cone_element<R: Rng + ?Sized>(dim: usize, max_coord: i64, rng: &mut R) -> GroupElement {
    GroupElement::new((0..dim).map(|_| rng.random_range(0..=max_coord)).collect())
        .expect("positive dimension")
}

pub fn random_group_element<R: Rng + ?Sized>(dim: usize, radius: i64, rng: &mut R) -> GroupElement {
    GroupElement::new((0..dim).map(|_| rng.random_range(-radius..=radius)).collect())
        .expect("positive dimension")
}

pub fn random_phases<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}
