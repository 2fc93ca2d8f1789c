//! Small fixed instances used in tests, benches and examples.

use crate::graph::{vset, GraphBuilder, MixedGraph, VertexSet};

/// Five vertices, five edges: `1->2, 1->3, 2->4, 3->4, 4->5`.
/// Vertex 4 is a choke point between `{1,3}` and `{4,5}`.
pub fn choke_graph() -> MixedGraph {
    GraphBuilder::new(5)
        .directed(1, 2)
        .directed(1, 3)
        .directed(2, 4)
        .directed(3, 4)
        .directed(4, 5)
        .build()
        .expect("choke graph is valid")
}

pub fn choke_sets() -> (VertexSet, VertexSet) {
    (vset([1, 3]), vset([4, 5]))
}

/// Hub 7 with legs `7->1, 7->2, 3->7, 7->4, 7->5, 6->7`.
pub fn spider_graph() -> MixedGraph {
    GraphBuilder::new(7)
        .directed(7, 1)
        .directed(7, 2)
        .directed(3, 7)
        .directed(7, 4)
        .directed(7, 5)
        .directed(6, 7)
        .build()
        .expect("spider graph is valid")
}

pub fn spider_sets() -> (VertexSet, VertexSet) {
    (vset([1, 2, 3]), vset([4, 5, 6]))
}
