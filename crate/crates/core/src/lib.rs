//! Trek separation for Gaussian graphical models.
//!
//! For a mixed graph (directed, undirected and bidirected edges) the generic
//! rank of a covariance submatrix `Σ_{A,B}` equals the size of a smallest
//! triple of vertex sets blocking every trek from `A` to `B`. This crate
//! computes such triples by max-flow, and checks the answers against exact
//! rational arithmetic on randomly drawn model parameters.
//!
//! ```
//! use treksep::{canonical, generic_rank, vset};
//!
//! let g = canonical::choke_graph();
//! assert_eq!(generic_rank(&g, &vset([1, 3]), &vset([4, 5])).unwrap(), 1);
//! ```

pub mod algebra;
pub mod canonical;
mod error;
mod graph;
pub mod separation;
pub mod trek;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{parse_graph, vset, EdgeKind, GraphBuilder, GraphClass, MixedGraph, VertexId, VertexSet, Violation};
pub use separation::{
    ci_implied, d_sep_via_t_sep, d_separates, generic_rank, is_t_separating, min_t_separator, vanishing_tetrad,
    ChokePoint, Level, RankResult, SeparationTriple, Side,
};
