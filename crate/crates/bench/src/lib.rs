//! Fixtures shared by the benchmarks.

use focalsphere_core::geom::random_unit;
use focalsphere_core::UnitVec3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn random_positions(n: usize, seed: u64) -> Vec<UnitVec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_unit(&mut rng)).collect()
}
