//! Shared helpers for the integration suites.

#![allow(dead_code)]

use bis_core::prob::{BisSystem, ChannelMatrix, DiscreteDistribution};
use bis_core::region::random_stochastic_channel;
use bis_core::rng::Stream;
use rand::Rng;

/// Closed-form binary entropy in bits (test oracle).
pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Binary source with symmetric 0.9-diagonal channels on both sides.
pub fn binary_example_system() -> BisSystem {
    BisSystem::new(
        DiscreteDistribution::new(vec![0.5, 0.5]).unwrap(),
        ChannelMatrix::binary_symmetric(0.1).unwrap(),
        ChannelMatrix::binary_symmetric(0.1).unwrap(),
    )
    .unwrap()
}

/// Random system with alphabet sizes drawn from [2, max_len].
pub fn random_system(max_len: usize, rng: &mut Stream) -> BisSystem {
    let nx = rng.gen_range(2..=max_len);
    let ny = rng.gen_range(2..=max_len);
    let nz = rng.gen_range(2..=max_len);
    let source = random_distribution(nx, rng);
    let enrollment = random_stochastic_channel(nx, ny, rng).unwrap();
    let identification = random_stochastic_channel(nx, nz, rng).unwrap();
    BisSystem::new(source, enrollment, identification).unwrap()
}

pub fn random_distribution(len: usize, rng: &mut Stream) -> DiscreteDistribution {
    let row = random_stochastic_channel(1, len, rng).unwrap();
    DiscreteDistribution::new(row.row(0).to_vec()).unwrap()
}
