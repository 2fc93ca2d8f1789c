use crate::error::{Error, Result};
use crate::graph::{GraphClass, MixedGraph, VertexSet};

/// Classic d-separation of `A` and `B` given `C` in a DAG.
///
/// Reachability over (vertex, direction) states: a walk arriving at a
/// noncollider passes unless the vertex is in `C`; a walk meeting a collider
/// passes only if the collider has a descendant in `C`.
pub fn d_separates(g: &MixedGraph, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<bool> {
    if g.class() != GraphClass::Dag {
        return Err(Error::Unsupported("d-separation needs a DAG".into()));
    }
    for &x in a.iter().chain(b).chain(c) {
        g.check_vertex(x)?;
    }
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::BadQuery("A, B and C must be pairwise disjoint".into()));
    }
    let m = g.m();
    let mut in_c = vec![false; m];
    for x in c {
        in_c[x.idx()] = true;
    }
    // vertices with a descendant in C
    let mut opens = in_c.clone();
    let mut stack: Vec<usize> = c.iter().map(|x| x.idx()).collect();
    while let Some(x) = stack.pop() {
        for &p in g.parents_idx(x) {
            if !opens[p] {
                opens[p] = true;
                stack.push(p);
            }
        }
    }

    // state: (vertex, arrived from a child) / (vertex, arrived from a parent)
    let mut seen = vec![[false; 2]; m];
    let mut stack: Vec<(usize, usize)> = a.iter().map(|x| (x.idx(), 0)).collect();
    while let Some((x, from_parent)) = stack.pop() {
        if seen[x][from_parent] {
            continue;
        }
        seen[x][from_parent] = true;
        if !in_c[x] && b.iter().any(|y| y.idx() == x) {
            return Ok(false);
        }
        if from_parent == 0 {
            if !in_c[x] {
                stack.extend(g.parents_idx(x).iter().map(|&p| (p, 0)));
                stack.extend(g.children_idx(x).iter().map(|&ch| (ch, 1)));
            }
        } else {
            if !in_c[x] {
                stack.extend(g.children_idx(x).iter().map(|&ch| (ch, 1)));
            }
            if opens[x] {
                stack.extend(g.parents_idx(x).iter().map(|&p| (p, 0)));
            }
        }
    }
    Ok(true)
}
