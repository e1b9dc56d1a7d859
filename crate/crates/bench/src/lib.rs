//! Fixed benchmark instances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twincolor::catalog::{random_connected_graph, random_tree};
use twincolor::graph::degeneracy_ordering;
use twincolor::Graph;

/// Random tree with `n` vertices and maximum degree `d`, fixed by `seed`.
pub fn tree(n: usize, d: usize, seed: u64) -> Graph {
    random_tree(n, d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// First seeded random connected graph on `n` vertices with coloring number
/// at least 3.
pub fn dense_graph(n: usize, avg_extra: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = random_connected_graph(n, (avg_extra / n as f64).min(1.0), &mut rng);
        if degeneracy_ordering(&g).col >= 3 {
            return g;
        }
    }
}
