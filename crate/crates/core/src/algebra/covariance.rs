use num::{BigRational, Zero};

use crate::algebra::matrix::RationalMatrix;
use crate::algebra::params::{sample_parameters, ParamAssignment, DEFAULT_SCALE};
use crate::error::{Error, Result};
use crate::graph::{GraphClass, MixedGraph, VertexId, VertexSet};
use crate::trek::{enumerate_simple_treks, enumerate_treks, trek_monomial, Monomial, Param, DEFAULT_CAP};

fn check_params(g: &MixedGraph, p: &ParamAssignment) -> Result<()> {
    if p.matches(g) {
        Ok(())
    } else {
        Err(Error::BadQuery("parameter support does not match the graph".into()))
    }
}

/// `Λ^{-1}` where `Λ = I - L`. Row `i` collects the weights of all directed
/// paths leaving `i`, filled in reverse topological order.
pub fn path_matrix(g: &MixedGraph, p: &ParamAssignment) -> Result<RationalMatrix> {
    check_params(g, p)?;
    let m = g.m();
    let order = g.topological_order()?;
    let mut inv = RationalMatrix::identity(m);
    for &i in order.iter().rev() {
        for c in g.children(i) {
            let w = &p.lambda[&(i, c)];
            for j in 0..m {
                let t = w * &inv[(c.idx(), j)];
                if !t.is_zero() {
                    inv[(i.idx(), j)] += t;
                }
            }
        }
    }
    Ok(inv)
}

/// The block-diagonal middle factor `K^{-1} ⊕ Φ`, laid out on the original
/// vertex indices.
pub fn middle_matrix(g: &MixedGraph, p: &ParamAssignment) -> Result<RationalMatrix> {
    check_params(g, p)?;
    let m = g.m();
    let mut omega = RationalMatrix::zeros(m, m);
    for (&(a, b), x) in &p.phi {
        omega[(a.idx(), b.idx())] = x.clone();
        omega[(b.idx(), a.idx())] = x.clone();
    }
    let u: Vec<VertexId> = g.u_set().into_iter().collect();
    if !u.is_empty() {
        let k = RationalMatrix::from_fn(u.len(), u.len(), |i, j| p.k_at(u[i], u[j]));
        let kinv = k.inverse()?;
        for (i, a) in u.iter().enumerate() {
            for (j, b) in u.iter().enumerate() {
                omega[(a.idx(), b.idx())] = kinv[(i, j)].clone();
            }
        }
    }
    Ok(omega)
}

/// `Σ = Λ^{-T} (K^{-1} ⊕ Φ) Λ^{-1}`, exactly.
pub fn build_covariance(g: &MixedGraph, p: &ParamAssignment) -> Result<RationalMatrix> {
    let lam_inv = path_matrix(g, p)?;
    let omega = middle_matrix(g, p)?;
    Ok(&(&lam_inv.transpose() * &omega) * &lam_inv)
}

pub(crate) fn indices(s: &VertexSet) -> Vec<usize> {
    s.iter().map(|v| v.idx()).collect()
}

/// `Σ_{A,B}` with rows and columns in ascending id order.
pub fn covariance_block(sigma: &RationalMatrix, a: &VertexSet, b: &VertexSet) -> RationalMatrix {
    sigma.submatrix(&indices(a), &indices(b))
}

/// Rank of `Σ_{A,B}`, maximised over `trials` independent parameter draws
/// with seeds `seed, seed+1, ...`. A single draw falls short of the generic
/// rank only on the zero set of a nonzero minor, which a uniform draw from a
/// range of `scale` integers hits with probability at most
/// `degree / scale`.
pub fn generic_rank_oracle(g: &MixedGraph, a: &VertexSet, b: &VertexSet, seed: u64, trials: u32) -> Result<usize> {
    Ok(oracle_ranks(g, a, b, seed, trials, DEFAULT_SCALE)?.into_iter().max().unwrap_or(0))
}

/// The rank from each individual trial.
pub fn oracle_ranks(
    g: &MixedGraph,
    a: &VertexSet,
    b: &VertexSet,
    seed: u64,
    trials: u32,
    scale: u64,
) -> Result<Vec<usize>> {
    for v in a.iter().chain(b) {
        g.check_vertex(*v)?;
    }
    (0..trials as u64)
        .map(|t| {
            let p = sample_parameters(g, seed.wrapping_add(t), scale);
            let sigma = build_covariance(g, &p)?;
            Ok(covariance_block(&sigma, a, b).rank())
        })
        .collect()
}

/// Value of a monomial in `φ` and `λ`; `None` if it mentions undirected
/// symbols, which have no rational value.
pub fn monomial_value(mono: &Monomial, p: &ParamAssignment) -> Option<BigRational> {
    let mut acc = BigRational::from_integer(mono.coefficient.into());
    for (param, &e) in &mono.exponents {
        let x = match *param {
            Param::Phi(a, b) => p.phi_at(a, b),
            Param::Lambda(a, b) => p.lambda.get(&(a, b))?.clone(),
            Param::Psi(..) | Param::InvStdDev(..) => return None,
        };
        for _ in 0..e {
            acc *= &x;
        }
    }
    Some(acc)
}

/// `σ_ij` as the sum of trek monomials over all treks between `i` and `j`.
/// Bidirected edges contribute treks whose middle is that edge.
pub fn trek_rule_covariance(g: &MixedGraph, p: &ParamAssignment, i: VertexId, j: VertexId) -> Result<BigRational> {
    check_params(g, p)?;
    let treks = enumerate_treks(g, i, j, DEFAULT_CAP)?;
    let mut sum = BigRational::zero();
    for t in &treks {
        sum += monomial_value(&trek_monomial(g, t), p)
            .ok_or_else(|| Error::Unsupported("undirected trek in trek rule".into()))?;
    }
    Ok(sum)
}

/// The alternate parameters `a_i = σ_ii`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrekRuleContext {
    pub a: Vec<BigRational>,
}

impl TrekRuleContext {
    pub fn from_covariance(sigma: &RationalMatrix) -> Self {
        TrekRuleContext { a: (0..sigma.rows()).map(|i| sigma[(i, i)].clone()).collect() }
    }
}

/// Path-analysis form: sum over simple treks only, weighting each by
/// `a_top` instead of `φ_top`.
pub fn simple_trek_rule_covariance(
    g: &MixedGraph,
    p: &ParamAssignment,
    ctx: &TrekRuleContext,
    i: VertexId,
    j: VertexId,
) -> Result<BigRational> {
    check_params(g, p)?;
    if g.class() != GraphClass::Dag {
        return Err(Error::Unsupported("the simple trek rule needs a DAG".into()));
    }
    let treks = enumerate_simple_treks(g, i, j, DEFAULT_CAP)?;
    let mut sum = BigRational::zero();
    for t in &treks {
        let mut term = ctx.a[t.left_source().idx()].clone();
        for path in [&t.left, &t.right] {
            for w in path.windows(2) {
                term *= &p.lambda[&(w[0], w[1])];
            }
        }
        sum += term;
    }
    Ok(sum)
}
