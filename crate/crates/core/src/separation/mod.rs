//! Trek separation, minimum separators and the rank and independence
//! queries built on them.

mod dsep;
mod flow;

use serde::Serialize;

pub use dsep::d_separates;
pub use flow::{build_auxiliary_graph, FlowNetwork, Level, SeparationTriple};

use crate::error::{Error, Result};
use crate::graph::{GraphClass, MixedGraph, VertexId, VertexSet};

/// Size of the largest conditioning set accepted by [`d_sep_via_t_sep`].
pub const MAX_PARTITION_SET: usize = 20;

/// A minimum separator together with the max-flow that certifies it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RankResult {
    pub rank: usize,
    pub certificate: SeparationTriple,
    pub flow_value: usize,
    /// Vertex-disjoint routes of the flow, each a list of `(vertex, layer)`
    /// copies. On graphs with bidirected edges the routes run through the
    /// subdivision and may mention its extra vertices.
    #[serde(skip)]
    pub paths: Vec<Vec<(VertexId, Level)>>,
}

fn check_sets<'a>(g: &MixedGraph, sets: impl IntoIterator<Item = &'a VertexSet>) -> Result<()> {
    for s in sets {
        for &v in s {
            g.check_vertex(v)?;
        }
    }
    Ok(())
}

/// Network on the bidirected subdivision of `g`, with the added vertices
/// never cut.
fn network(g: &MixedGraph, a: &VertexSet, b: &VertexSet) -> Result<FlowNetwork> {
    check_sets(g, [a, b])?;
    if g.bidirected_edges().is_empty() {
        return build_auxiliary_graph(g, a, b);
    }
    let m = g.m();
    FlowNetwork::new(&g.bidirected_subdivision(), a, b, |v| v.get() <= m)
}

/// Whether `c` blocks every trek from `A` to `B`.
pub fn is_t_separating(g: &MixedGraph, a: &VertexSet, b: &VertexSet, c: &SeparationTriple) -> Result<bool> {
    check_sets(g, [&c.c_left, &c.c_mid, &c.c_right])?;
    Ok(!network(g, a, b)?.path_exists_without(c))
}

/// A smallest triple t-separating `A` from `B`.
///
/// The certificate is the cut nearest to `A'`, so it is deterministic.
pub fn min_t_separator(g: &MixedGraph, a: &VertexSet, b: &VertexSet) -> Result<RankResult> {
    let mut net = network(g, a, b)?;
    let flow_value = net.max_flow();
    let certificate = net.min_cut();
    debug_assert_eq!(certificate.size(), flow_value);
    Ok(RankResult {
        rank: certificate.size(),
        certificate,
        flow_value,
        paths: net.flow_paths(),
    })
}

/// Generic rank of `Σ_{A,B}` for the model of `g`.
pub fn generic_rank(g: &MixedGraph, a: &VertexSet, b: &VertexSet) -> Result<usize> {
    Ok(min_t_separator(g, a, b)?.rank)
}

fn require_dag(g: &MixedGraph) -> Result<()> {
    if g.class() != GraphClass::Dag {
        return Err(Error::Unsupported("query needs a DAG".into()));
    }
    Ok(())
}

fn require_disjoint(a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<()> {
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::BadQuery("A, B and C must be pairwise disjoint".into()));
    }
    Ok(())
}

/// d-separation decided by trek separation: some split `C = C_A ⊎ C_B`
/// must t-separate `A ∪ C` from `B ∪ C`.
pub fn d_sep_via_t_sep(g: &MixedGraph, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<bool> {
    require_dag(g)?;
    check_sets(g, [a, b, c])?;
    require_disjoint(a, b, c)?;
    if c.len() > MAX_PARTITION_SET {
        return Err(Error::BadQuery(format!(
            "conditioning set of size {} exceeds {MAX_PARTITION_SET}",
            c.len()
        )));
    }
    let ac: VertexSet = a.union(c).copied().collect();
    let bc: VertexSet = b.union(c).copied().collect();
    let net = build_auxiliary_graph(g, &ac, &bc)?;
    let members: Vec<VertexId> = c.iter().copied().collect();
    for mask in 0u32..(1 << members.len()) {
        let (left, right): (Vec<_>, Vec<_>) = members.iter().enumerate().partition(|(k, _)| mask >> k & 1 == 1);
        let triple = SeparationTriple::pair(
            left.into_iter().map(|(_, &v)| v).collect(),
            right.into_iter().map(|(_, &v)| v).collect(),
        );
        if !net.path_exists_without(&triple) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether `A ⊥ B | C` holds for every distribution in the model, decided by
/// `rank Σ_{A∪C, B∪C} = #C`.
pub fn ci_implied(g: &MixedGraph, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<bool> {
    check_sets(g, [a, b, c])?;
    require_disjoint(a, b, c)?;
    let ac: VertexSet = a.union(c).copied().collect();
    let bc: VertexSet = b.union(c).copied().collect();
    Ok(generic_rank(g, &ac, &bc)? == c.len())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A single vertex `c` such that `({c}, ∅)` or `(∅, {c})` t-separates the
/// two pairs.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct ChokePoint {
    pub vertex: VertexId,
    pub side: Side,
}

/// A choke point explaining the vanishing of the tetrad
/// `σ_ik σ_jl - σ_il σ_jk`, or `None` when it does not vanish generically.
///
/// When no trek joins the pairs at all any vertex works; `i` on the left is
/// returned.
pub fn vanishing_tetrad(
    g: &MixedGraph,
    (i, j): (VertexId, VertexId),
    (k, l): (VertexId, VertexId),
) -> Result<Option<ChokePoint>> {
    require_dag(g)?;
    let a: VertexSet = [i, j].into();
    let b: VertexSet = [k, l].into();
    let r = min_t_separator(g, &a, &b)?;
    let (c_a, c_b) = r.certificate.dag_pair();
    Ok(match r.rank {
        0 => Some(ChokePoint { vertex: i, side: Side::Left }),
        1 => Some(match c_a.first() {
            Some(&v) => ChokePoint { vertex: v, side: Side::Left },
            None => ChokePoint { vertex: *c_b.first().expect("cut of size one"), side: Side::Right },
        }),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{choke_graph, choke_sets, spider_graph, spider_sets};
    use crate::graph::{vset, GraphBuilder};
    use crate::trek::{max_noncrossing, DEFAULT_CAP};
    use proptest::prelude::*;

    fn v(i: usize) -> VertexId {
        VertexId::new(i)
    }

    fn triple(l: &[usize], m: &[usize], r: &[usize]) -> SeparationTriple {
        SeparationTriple::new(
            vset(l.iter().copied()),
            vset(m.iter().copied()),
            vset(r.iter().copied()),
        )
    }

    #[test]
    fn choke_separation() {
        let g = choke_graph();
        let (a, b) = choke_sets();
        assert!(is_t_separating(&g, &a, &b, &triple(&[], &[], &[4])).unwrap());
        assert!(!is_t_separating(&g, &a, &b, &triple(&[], &[], &[5])).unwrap());
        assert!(is_t_separating(&g, &a, &b, &SeparationTriple::pair(a.clone(), vset([]))).unwrap());
        assert!(is_t_separating(&g, &a, &b, &SeparationTriple::pair(vset([]), b.clone())).unwrap());
        let r = min_t_separator(&g, &a, &b).unwrap();
        assert_eq!(r.rank, 1);
        assert_eq!(r.flow_value, 1);
        assert_eq!(r.certificate, triple(&[], &[], &[4]));
    }

    #[test]
    fn spider_separation() {
        let g = spider_graph();
        let (a, b) = spider_sets();
        assert!(!is_t_separating(&g, &a, &b, &triple(&[7], &[], &[])).unwrap());
        assert!(is_t_separating(&g, &a, &b, &triple(&[7], &[], &[7])).unwrap());
        let r = min_t_separator(&g, &a, &b).unwrap();
        assert_eq!(r.rank, 2);
        // the cut nearest A; ({7},∅,{7}) is another minimum
        assert_eq!(r.certificate, triple(&[3, 7], &[], &[]));
        assert!(is_t_separating(&g, &a, &b, &r.certificate).unwrap());
    }

    #[test]
    fn same_vertex_on_both_sides() {
        let g = GraphBuilder::new(1).build().unwrap();
        let r = min_t_separator(&g, &vset([1]), &vset([1])).unwrap();
        assert_eq!(r.rank, 1);
        let (c_a, c_b) = r.certificate.dag_pair();
        assert!(c_a == vset([1]) && c_b.is_empty() || c_a.is_empty() && c_b == vset([1]));
    }

    #[test]
    fn generic_rank_examples() {
        let path = GraphBuilder::new(4).undirected(1, 2).undirected(2, 3).undirected(3, 4).build().unwrap();
        assert_eq!(generic_rank(&path, &vset([1, 2]), &vset([3, 4])).unwrap(), 1);
        let collider = GraphBuilder::new(3).directed(1, 3).directed(2, 3).build().unwrap();
        assert_eq!(generic_rank(&collider, &vset([1]), &vset([2])).unwrap(), 0);
        let mixed = GraphBuilder::new(4).bidirected(1, 2).directed(1, 3).directed(2, 4).build().unwrap();
        assert_eq!(generic_rank(&mixed, &vset([3]), &vset([4])).unwrap(), 1);
        let r = min_t_separator(&mixed, &vset([3]), &vset([4])).unwrap();
        assert!(r.certificate.entries().iter().all(|(x, _)| x.get() <= 4));
    }

    #[test]
    fn bidirected_separation_uses_original_vertices() {
        let g = GraphBuilder::new(4).bidirected(1, 2).directed(1, 3).directed(2, 4).build().unwrap();
        assert!(!is_t_separating(&g, &vset([3]), &vset([4]), &triple(&[], &[], &[3])).unwrap());
        assert!(is_t_separating(&g, &vset([3]), &vset([4]), &triple(&[1], &[], &[])).unwrap());
        assert!(is_t_separating(&g, &vset([3]), &vset([4]), &triple(&[], &[], &[2])).unwrap());
        assert!(!is_t_separating(&g, &vset([3]), &vset([4]), &triple(&[], &[], &[1])).unwrap());
    }

    #[test]
    fn d_separation_examples() {
        let collider = GraphBuilder::new(3).directed(1, 3).directed(2, 3).build().unwrap();
        let chain = GraphBuilder::new(3).directed(1, 2).directed(2, 3).build().unwrap();
        for (g, c, want) in [(&collider, vset([]), true), (&collider, vset([3]), false), (&chain, vset([2]), true)] {
            let (a, b) = if g == &collider { (vset([1]), vset([2])) } else { (vset([1]), vset([3])) };
            assert_eq!(d_separates(g, &a, &b, &c).unwrap(), want);
            assert_eq!(d_sep_via_t_sep(g, &a, &b, &c).unwrap(), want);
            assert_eq!(ci_implied(g, &a, &b, &c).unwrap(), want);
        }
        assert!(d_separates(&choke_graph(), &vset([1]), &vset([5]), &vset([4])).unwrap());
        assert!(d_sep_via_t_sep(&choke_graph(), &vset([1]), &vset([5]), &vset([4])).unwrap());
    }

    #[test]
    fn ci_examples() {
        assert!(!ci_implied(&choke_graph(), &vset([1]), &vset([5]), &vset([])).unwrap());
        let path = GraphBuilder::new(3).undirected(1, 2).undirected(2, 3).build().unwrap();
        assert!(ci_implied(&path, &vset([1]), &vset([3]), &vset([2])).unwrap());
        assert!(ci_implied(&path, &vset([1]), &vset([2]), &vset([2])).is_err());
    }

    #[test]
    fn dsep_rejects_non_dags() {
        let path = GraphBuilder::new(3).undirected(1, 2).undirected(2, 3).build().unwrap();
        assert!(d_separates(&path, &vset([1]), &vset([3]), &vset([2])).is_err());
        assert!(d_sep_via_t_sep(&path, &vset([1]), &vset([3]), &vset([2])).is_err());
    }

    #[test]
    fn tetrads() {
        let choke = vanishing_tetrad(&choke_graph(), (v(1), v(3)), (v(4), v(5))).unwrap();
        assert_eq!(choke, Some(ChokePoint { vertex: v(4), side: Side::Right }));
        // the right pair {4,5} is reached from {1,3} only through 7
        let spider = vanishing_tetrad(&spider_graph(), (v(1), v(3)), (v(4), v(5))).unwrap();
        assert_eq!(spider, Some(ChokePoint { vertex: v(7), side: Side::Right }));
        let collider = GraphBuilder::new(3).directed(1, 3).directed(2, 3).build().unwrap();
        assert_eq!(vanishing_tetrad(&collider, (v(1), v(3)), (v(2), v(3))).unwrap(), None);
        let edgeless = GraphBuilder::new(4).build().unwrap();
        assert_eq!(
            vanishing_tetrad(&edgeless, (v(1), v(2)), (v(3), v(4))).unwrap(),
            Some(ChokePoint { vertex: v(1), side: Side::Left })
        );
    }

    fn arb_graph() -> impl Strategy<Value = MixedGraph> {
        (2usize..=5, any::<u64>(), prop::sample::select(vec![GraphClass::Dag, GraphClass::Undirected, GraphClass::Mixed]))
            .prop_map(|(n, seed, class)| crate::verify::random_graph(class, n, seed, 0.45))
    }

    fn arb_query() -> impl Strategy<Value = (MixedGraph, VertexSet, VertexSet)> {
        arb_graph().prop_flat_map(|g| {
            let n = g.m();
            let set = prop::collection::btree_set(1..=n, 1..=3.min(n)).prop_map(vset);
            (Just(g), set.clone(), set)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn certificate_is_minimal_and_symmetric((g, a, b) in arb_query()) {
            let r = min_t_separator(&g, &a, &b).unwrap();
            prop_assert_eq!(r.rank, r.flow_value);
            prop_assert!(r.rank <= a.len().min(b.len()));
            prop_assert!(is_t_separating(&g, &a, &b, &r.certificate).unwrap());
            for (x, level) in r.certificate.entries() {
                prop_assert!(!is_t_separating(&g, &a, &b, &r.certificate.without(x, level)).unwrap());
            }
            prop_assert_eq!(generic_rank(&g, &b, &a).unwrap(), r.rank);
        }

        #[test]
        fn rank_matches_noncrossing_systems((g, a, b) in arb_query()) {
            prop_assert_eq!(generic_rank(&g, &a, &b).unwrap(), max_noncrossing(&g, &a, &b, DEFAULT_CAP).unwrap());
        }

        #[test]
        fn subdivision_keeps_rank((g, a, b) in arb_query()) {
            let sub = g.bidirected_subdivision();
            prop_assert_eq!(generic_rank(&g, &a, &b).unwrap(), generic_rank(&sub, &a, &b).unwrap());
        }
    }
}
