//! Determinant identities checked two ways: by exact elimination and by
//! brute-force path-system sums.

use num::{BigRational, One, Zero};

use crate::algebra::covariance::{build_covariance, covariance_block, indices, path_matrix};
use crate::algebra::params::ParamAssignment;
use crate::error::{Error, Result};
use crate::graph::{GraphClass, MixedGraph, VertexId, VertexSet};
use crate::trek::directed_paths;

fn same_size(r: &VertexSet, s: &VertexSet) -> Result<()> {
    if r.len() == s.len() {
        Ok(())
    } else {
        Err(Error::BadQuery(format!("sets have sizes {} and {}", r.len(), s.len())))
    }
}

/// Permutations of `0..n` with their parity (true = odd).
fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    fn heap(k: usize, perm: &mut Vec<usize>, odd: &mut bool, out: &mut Vec<(Vec<usize>, bool)>) {
        if k <= 1 {
            out.push((perm.clone(), *odd));
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, perm, odd, out);
            if k.is_multiple_of(2) {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
            *odd = !*odd;
        }
        heap(k - 1, perm, odd, out);
    }
    let mut odd = false;
    heap(n, &mut perm, &mut odd, &mut out);
    out
}

/// `det(Λ^{-1})_{R,S}` computed from the matrix and, independently, as the
/// signed weight of all vertex-disjoint directed path systems from `R` to `S`.
pub fn gvl_minor_two_ways(
    g: &MixedGraph,
    p: &ParamAssignment,
    r: &VertexSet,
    s: &VertexSet,
    cap: usize,
) -> Result<(BigRational, BigRational)> {
    same_size(r, s)?;
    let det = path_matrix(g, p)?.submatrix(&indices(r), &indices(s)).determinant()?;

    let rv: Vec<VertexId> = r.iter().copied().collect();
    let sv: Vec<VertexId> = s.iter().copied().collect();
    let mut paths = Vec::with_capacity(rv.len());
    let mut total = 0;
    for &x in &rv {
        let mut row = Vec::with_capacity(sv.len());
        for &y in &sv {
            let ps = directed_paths(g, x, y, cap)?;
            total += ps.len();
            if total > cap {
                return Err(Error::CapExceeded { cap });
            }
            row.push(ps);
        }
        paths.push(row);
    }

    fn weight(p: &ParamAssignment, path: &[VertexId]) -> BigRational {
        path.windows(2).fold(BigRational::one(), |acc, w| acc * &p.lambda[&(w[0], w[1])])
    }

    fn systems(
        paths: &[Vec<Vec<Vec<VertexId>>>],
        perm: &[usize],
        k: usize,
        used: &mut Vec<bool>,
        acc: BigRational,
        p: &ParamAssignment,
        out: &mut BigRational,
    ) {
        if k == perm.len() {
            *out += acc;
            return;
        }
        for path in &paths[k][perm[k]] {
            if path.iter().any(|v| used[v.idx()]) {
                continue;
            }
            path.iter().for_each(|v| used[v.idx()] = true);
            systems(paths, perm, k + 1, used, &acc * weight(p, path), p, out);
            path.iter().for_each(|v| used[v.idx()] = false);
        }
    }

    let mut signed = BigRational::zero();
    for (perm, odd) in permutations(rv.len()) {
        let mut sum = BigRational::zero();
        let mut used = vec![false; g.m()];
        systems(&paths, &perm, 0, &mut used, BigRational::one(), p, &mut sum);
        if odd {
            signed -= sum;
        } else {
            signed += sum;
        }
    }
    Ok((det, signed))
}

/// `det Σ_{A,B}` for a DAG, directly and as
/// `Σ_S det(Λ^{-1})_{S,A} · det(Λ^{-1})_{S,B} · φ_S` over all `#A`-subsets `S`.
pub fn cauchy_binet_two_ways(
    g: &MixedGraph,
    p: &ParamAssignment,
    a: &VertexSet,
    b: &VertexSet,
) -> Result<(BigRational, BigRational)> {
    same_size(a, b)?;
    if g.class() != GraphClass::Dag {
        return Err(Error::Unsupported("Cauchy–Binet expansion with diagonal Φ needs a DAG".into()));
    }
    let sigma = build_covariance(g, p)?;
    let direct = covariance_block(&sigma, a, b).determinant()?;

    let lam_inv = path_matrix(g, p)?;
    let (ai, bi) = (indices(a), indices(b));
    let k = a.len();
    let mut sum = BigRational::zero();
    let mut subset: Vec<usize> = Vec::with_capacity(k);
    fn each_subset(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for x in start..m {
            cur.push(x);
            each_subset(m, k, x + 1, cur, f);
            cur.pop();
        }
    }
    each_subset(g.m(), k, 0, &mut subset, &mut |s: &[usize]| {
        let da = lam_inv.submatrix(s, &ai).determinant().expect("square");
        if da.is_zero() {
            return;
        }
        let db = lam_inv.submatrix(s, &bi).determinant().expect("square");
        let phi_s = s
            .iter()
            .fold(BigRational::one(), |acc, &i| acc * p.phi_at(VertexId::from_idx(i), VertexId::from_idx(i)));
        sum += da * db * phi_s;
    });
    Ok((direct, sum))
}

/// For an undirected graph: the exact minor `det Σ_{A,B}` with `Σ = K^{-1}`,
/// and whether the doubled directed graph has `#A` vertex-disjoint paths from
/// `A` to `B`. Generically the minor is nonzero exactly when such a system
/// exists.
pub fn undirected_minor_check(
    g: &MixedGraph,
    p: &ParamAssignment,
    a: &VertexSet,
    b: &VertexSet,
    cap: usize,
) -> Result<(BigRational, bool)> {
    same_size(a, b)?;
    if !g.directed_edges().is_empty() || !g.bidirected_edges().is_empty() {
        return Err(Error::Unsupported("expected an undirected graph".into()));
    }
    let sigma = build_covariance(g, p)?;
    let minor = covariance_block(&sigma, a, b).determinant()?;
    let av: Vec<usize> = indices(a);
    let bv: Vec<usize> = indices(b);
    let mut used = vec![false; g.m()];
    let mut b_used = vec![false; bv.len()];
    let mut steps = 0usize;

    // Route each source in turn to an unused target by a self-avoiding walk
    // that avoids every vertex already claimed.
    fn route(
        g: &MixedGraph,
        av: &[usize],
        bv: &[usize],
        k: usize,
        used: &mut Vec<bool>,
        b_used: &mut Vec<bool>,
        steps: &mut usize,
        cap: usize,
    ) -> Result<bool> {
        if k == av.len() {
            return Ok(true);
        }
        let start = av[k];
        if used[start] {
            return Ok(false);
        }
        used[start] = true;
        let mut path = vec![start];
        let found = walk(g, av, bv, k, &mut path, used, b_used, steps, cap)?;
        used[start] = false;
        Ok(found)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        g: &MixedGraph,
        av: &[usize],
        bv: &[usize],
        k: usize,
        path: &mut Vec<usize>,
        used: &mut Vec<bool>,
        b_used: &mut Vec<bool>,
        steps: &mut usize,
        cap: usize,
    ) -> Result<bool> {
        *steps += 1;
        if *steps > cap {
            return Err(Error::CapExceeded { cap });
        }
        let x = *path.last().unwrap();
        if let Some(bi) = bv.iter().position(|&y| y == x) {
            if !b_used[bi] {
                b_used[bi] = true;
                if route(g, av, bv, k + 1, used, b_used, steps, cap)? {
                    return Ok(true);
                }
                b_used[bi] = false;
            }
        }
        for &y in g.undirected_idx(x) {
            if used[y] {
                continue;
            }
            used[y] = true;
            path.push(y);
            let found = walk(g, av, bv, k, path, used, b_used, steps, cap)?;
            path.pop();
            used[y] = false;
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }

    let exists = route(g, &av, &bv, 0, &mut used, &mut b_used, &mut steps, cap)?;
    Ok((minor, exists))
}
