//! Benchmark inputs shared by the criterion targets.

use treksep::verify::random_graph;
use treksep::{GraphClass, MixedGraph, VertexSet, vset};

/// A seeded graph with query sets `{1, 2, 3}` and the last three vertices.
pub fn instance(class: GraphClass, n: usize, seed: u64) -> (MixedGraph, VertexSet, VertexSet) {
    let g = random_graph(class, n, seed, 0.4);
    (g, vset(1..=3), vset(n - 2..=n))
}
