//! Seeded random streams. Every consumer derives its own substream from the
//! caller's seed, so no generator is ever shared between tasks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed from `(seed, tag, index)`.
pub fn substream_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ tag) ^ index)
}

pub fn stream(seed: u64, tag: u64, index: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, tag, index))
}

/// Uniform direction on the unit sphere of `R^n`.
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = crate::linalg::norm(&v);
        if nrm > 1e-12 {
            return v.into_iter().map(|x| x / nrm).collect();
        }
    }
}

/// Uniform point in the ball of radius `r` centred at the origin.
pub fn in_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    let dir = unit_direction(rng, n);
    let u: f64 = rng.random::<f64>();
    let rad = r * u.powf(1.0 / n as f64);
    dir.into_iter().map(|x| x * rad).collect()
}

pub(crate) mod tags {
    pub const CLARKE_LEVEL: u64 = 0x11;
    pub const CRIT_DIRS: u64 = 0x22;
    pub const INNER_START: u64 = 0x33;
    pub const INNER_BUNDLE: u64 = 0x44;
    pub const INITIAL_POINT: u64 = 0x55;
    pub const OUTER_ITER: u64 = 0x66;
    pub const CRIT_DIR_EST: u64 = 0x77;
}
