use std::collections::BTreeMap;

use num::{BigInt, BigRational, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{MixedGraph, VertexId};

pub const DEFAULT_SCALE: u64 = 1_000_000;

type Pair = (VertexId, VertexId);

/// Numeric values for every parameter of a mixed graph model.
///
/// `lambda` holds the directed edge weights (`Λ = I - L`). `phi` and `k` are
/// symmetric and store only pairs with the smaller id first; `phi` covers the
/// diagonal of `W` plus bidirected edges, `k` the diagonal of `U` plus
/// undirected edges.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ParamAssignment {
    pub lambda: BTreeMap<Pair, BigRational>,
    pub phi: BTreeMap<Pair, BigRational>,
    pub k: BTreeMap<Pair, BigRational>,
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl ParamAssignment {
    pub fn phi_at(&self, a: VertexId, b: VertexId) -> BigRational {
        self.phi.get(&(a.min(b), a.max(b))).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn k_at(&self, a: VertexId, b: VertexId) -> BigRational {
        self.k.get(&(a.min(b), a.max(b))).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The support of every map agrees with the graph.
    pub fn matches(&self, g: &MixedGraph) -> bool {
        let lambda_ok = self.lambda.keys().eq(g.directed_edges().iter());
        let mut phi_support: Vec<Pair> = g.w_set().iter().map(|&v| (v, v)).collect();
        phi_support.extend(g.bidirected_edges().iter().copied());
        phi_support.sort();
        let mut k_support: Vec<Pair> = g.u_set().iter().map(|&v| (v, v)).collect();
        k_support.extend(g.undirected_edges().iter().copied());
        k_support.sort();
        lambda_ok && self.phi.keys().eq(phi_support.iter()) && self.k.keys().eq(k_support.iter())
    }
}

fn nonzero(rng: &mut ChaCha8Rng, scale: u64) -> i64 {
    let mag = rng.random_range(1..=scale) as i64;
    if rng.random::<bool>() {
        mag
    } else {
        -mag
    }
}

/// Draw integer parameters for `g`, deterministically from `seed`.
///
/// Off-diagonal entries are uniform on `[-scale, scale] \ {0}`. Each diagonal
/// entry of `Φ` and `K` is the absolute row sum of its off-diagonal entries
/// plus a uniform draw from `[1, scale]`, so both are strictly diagonally
/// dominant and hence positive definite.
pub fn sample_parameters(g: &MixedGraph, seed: u64, scale: u64) -> ParamAssignment {
    assert!(scale >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = ParamAssignment::default();
    for &e in g.directed_edges() {
        p.lambda.insert(e, int(nonzero(&mut rng, scale)));
    }
    let mut row_abs = vec![0i64; g.m()];
    for (edges, target) in [(g.bidirected_edges(), &mut p.phi), (g.undirected_edges(), &mut p.k)] {
        for &e in edges {
            let x = nonzero(&mut rng, scale);
            row_abs[e.0.idx()] += x.abs();
            row_abs[e.1.idx()] += x.abs();
            target.insert(e, int(x));
        }
    }
    for v in g.vertices() {
        let d = row_abs[v.idx()] + rng.random_range(1..=scale) as i64;
        let target = if g.in_u(v) { &mut p.k } else { &mut p.phi };
        target.insert((v, v), int(d));
    }
    p
}

/// Map parameters of the bidirected subdivision of `g` back to parameters of
/// `g` that give the same covariance matrix on the original vertices:
/// `φ_ij = φ̃_v λ̃_vi λ̃_vj` and `φ_ii = φ̃_ii + Σ φ̃_v λ̃_vi²`.
pub fn translate_subdivision_parameters(g: &MixedGraph, sub: &ParamAssignment) -> ParamAssignment {
    let mut p = ParamAssignment {
        lambda: g.directed_edges().iter().map(|e| (*e, sub.lambda[e].clone())).collect(),
        phi: BTreeMap::new(),
        k: sub.k.clone(),
    };
    for v in g.w_set() {
        p.phi.insert((v, v), sub.phi_at(v, v));
    }
    for (s, (i, j)) in g.subdivision_vertices() {
        let fv = sub.phi_at(s, s);
        let li = &sub.lambda[&(s, i)];
        let lj = &sub.lambda[&(s, j)];
        p.phi.insert((i, j), &fv * li * lj);
        *p.phi.get_mut(&(i, i)).unwrap() += &fv * li * li;
        *p.phi.get_mut(&(j, j)).unwrap() += &fv * lj * lj;
    }
    p
}

/// True iff `x` is a nonzero integer with `|x| <= scale`.
pub fn in_sample_range(x: &BigRational, scale: u64) -> bool {
    x.is_integer() && !x.is_zero() && x.abs() <= int(scale as i64)
}
