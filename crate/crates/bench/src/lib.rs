//! Seeded fixtures shared by the benchmarks.

use qcompose::graph::random_connected;
use qcompose::{BitString, GInput, WeightedGraph};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A balanced `g`-input of length `m`.
pub fn balanced_input(m: usize, seed: u64) -> GInput {
    let mut bits = BitString::leading_ones(m, m / 2).bits().to_vec();
    bits.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    GInput::new(BitString::new(bits)).expect("balanced by construction")
}

/// A connected graph on `n` vertices with weights in `[0.1, 10]`.
pub fn graph(n: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_connected(&mut rng, n, 4.0 / n as f64, 0.1, 10.0).expect("n >= 2")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert!(!balanced_input(64, 1).eval());
        let g = graph(30, 2);
        assert_eq!(g.component_of(0).len(), 30);
    }
}
