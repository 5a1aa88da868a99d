//! Seeded inputs for the join benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigmarho::oracle::OracleView;
use sigmarho::table::MemoTable;

/// Two random tables over a bag of `k` vertices with `s` labels, sizes up to `max_size`.
pub fn table_pair<A: OracleView>(alg: &A, s: usize, k: usize, max_size: u32, seed: u64) -> [MemoTable<A::Value>; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bag: Vec<usize> = (0..k).collect();
    [alg.random_table(&mut rng, bag.clone(), s, max_size), alg.random_table(&mut rng, bag, s, max_size)]
}
