//! Exact covariance construction and algebraic rank oracles.

mod covariance;
mod gvl;
mod matrix;
mod params;

pub use covariance::{
    build_covariance, covariance_block, generic_rank_oracle, middle_matrix, monomial_value, oracle_ranks,
    path_matrix, simple_trek_rule_covariance, trek_rule_covariance, TrekRuleContext,
};
pub use gvl::{cauchy_binet_two_ways, gvl_minor_two_ways, undirected_minor_check};
pub use matrix::{is_positive_definite, RationalMatrix};
pub use params::{
    in_sample_range, sample_parameters, translate_subdivision_parameters, ParamAssignment, DEFAULT_SCALE,
};
