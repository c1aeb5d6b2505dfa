//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::SeedableRng;
use underlords::random::random_instance;
use underlords::Instance;

pub fn dataset() -> Instance {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/underlords.json");
    underlords::load_instance(path).expect("dataset loads")
}

/// `count` seeded random instances with `n` heroes and cap `m`.
pub fn random_cases(seed: u64, count: usize, n: usize, m: usize) -> Vec<Instance> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, n, m)).collect()
}
