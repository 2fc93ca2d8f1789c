//! Treks, trek systems and trek monomials.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{MixedGraph, VertexId, VertexSet};

pub const DEFAULT_CAP: usize = 100_000;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum MiddleKind {
    /// Left and right share their source (the top).
    None,
    /// An undirected path with at least one edge.
    Undirected,
    /// A single bidirected edge.
    Bidirected,
}

/// A trek between `left.last()` and `right.last()`.
///
/// `left` and `right` are directed paths listed source first. `middle` joins
/// the two sources: the single top for [`MiddleKind::None`], the full vertex
/// sequence of an undirected path, or the two ends of a bidirected edge.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Trek {
    pub left: Vec<VertexId>,
    pub middle_kind: MiddleKind,
    pub middle: Vec<VertexId>,
    pub right: Vec<VertexId>,
}

/// What a trek occupies on its middle segment.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum MiddleToken {
    Vertex(VertexId),
    Edge(VertexId, VertexId),
}

impl Trek {
    pub fn new(left: Vec<VertexId>, middle_kind: MiddleKind, middle: Vec<VertexId>, right: Vec<VertexId>) -> Self {
        Trek { left, middle_kind, middle, right }
    }

    /// Trek with a common top.
    pub fn with_top(left: Vec<VertexId>, right: Vec<VertexId>) -> Self {
        let top = left[0];
        Trek::new(left, MiddleKind::None, vec![top], right)
    }

    pub fn trivial(v: VertexId) -> Self {
        Trek::with_top(vec![v], vec![v])
    }

    pub fn left_sink(&self) -> VertexId {
        *self.left.last().unwrap()
    }

    pub fn right_sink(&self) -> VertexId {
        *self.right.last().unwrap()
    }

    pub fn left_source(&self) -> VertexId {
        self.left[0]
    }

    pub fn right_source(&self) -> VertexId {
        self.right[0]
    }

    /// Sources of the two directed paths; equal when the trek has a top.
    pub fn tops(&self) -> (VertexId, VertexId) {
        (self.left_source(), self.right_source())
    }

    fn middle_tokens(&self) -> Vec<MiddleToken> {
        match self.middle_kind {
            MiddleKind::Bidirected => {
                let (a, b) = (self.middle[0], self.middle[1]);
                vec![MiddleToken::Edge(a.min(b), a.max(b))]
            }
            _ => self.middle.iter().map(|&v| MiddleToken::Vertex(v)).collect(),
        }
    }

    /// Checks that the trek is made of edges of `g` and joins its segments
    /// at the right vertices.
    pub fn is_trek_of(&self, g: &MixedGraph) -> bool {
        if self.left.is_empty() || self.right.is_empty() || self.middle.is_empty() {
            return false;
        }
        if self.left.iter().chain(&self.middle).chain(&self.right).any(|&v| !g.contains(v)) {
            return false;
        }
        let directed_ok = |p: &[VertexId]| p.windows(2).all(|w| g.has_directed(w[0], w[1]));
        if !directed_ok(&self.left) || !directed_ok(&self.right) {
            return false;
        }
        let (s, t) = self.tops();
        match self.middle_kind {
            MiddleKind::None => s == t && self.middle == [s],
            MiddleKind::Undirected => {
                self.middle.len() >= 2
                    && self.middle[0] == s
                    && *self.middle.last().unwrap() == t
                    && self.middle.windows(2).all(|w| {
                        g.undirected_edges().contains(&(w[0].min(w[1]), w[0].max(w[1])))
                    })
            }
            MiddleKind::Bidirected => {
                self.middle == [s, t] && g.bidirected_edges().contains(&(s.min(t), s.max(t)))
            }
        }
    }

    /// Segments are self-avoiding and meet only at the sources.
    pub fn is_simple(&self) -> bool {
        fn self_avoiding(p: &[VertexId]) -> bool {
            let set: BTreeSet<_> = p.iter().collect();
            set.len() == p.len()
        }
        if !self_avoiding(&self.left) || !self_avoiding(&self.middle) || !self_avoiding(&self.right) {
            return false;
        }
        let (s, t) = self.tops();
        let l: BTreeSet<_> = self.left.iter().copied().collect();
        let r: BTreeSet<_> = self.right.iter().copied().collect();
        let m: BTreeSet<_> = self.middle.iter().copied().collect();
        let lr: Vec<_> = l.intersection(&r).copied().collect();
        let lm: Vec<_> = l.intersection(&m).copied().collect();
        let mr: Vec<_> = m.intersection(&r).copied().collect();
        if s == t {
            lr == [s] && lm == [s] && mr == [s]
        } else {
            lr.is_empty() && lm == [s] && mr == [t]
        }
    }

    fn sort_key(&self) -> impl Ord + '_ {
        (
            self.tops(),
            self.left.len(),
            self.right.len(),
            &self.left,
            self.middle_kind,
            &self.middle,
            &self.right,
        )
    }
}

impl fmt::Display for Trek {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = |p: &[VertexId], sep: &str| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(sep);
        let mut left = self.left.clone();
        left.reverse();
        write!(f, "{}", path(&left, "<-"))?;
        match self.middle_kind {
            MiddleKind::None => {}
            MiddleKind::Undirected => write!(f, " [{}] ", path(&self.middle, "--"))?,
            MiddleKind::Bidirected => write!(f, " [{}] ", path(&self.middle, "<->"))?,
        }
        match self.middle_kind {
            MiddleKind::None => {
                if self.right.len() > 1 {
                    write!(f, "->{}", path(&self.right[1..], "->"))?;
                }
                Ok(())
            }
            _ => write!(f, "{}", path(&self.right, "->")),
        }
    }
}

/// An ordered collection of treks from `A` to `B`.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct TrekSystem {
    pub treks: Vec<Trek>,
}

impl TrekSystem {
    pub fn new(treks: Vec<Trek>) -> Self {
        TrekSystem { treks }
    }

    pub fn a_endpoints(&self) -> Vec<VertexId> {
        self.treks.iter().map(Trek::left_sink).collect()
    }

    pub fn b_endpoints(&self) -> Vec<VertexId> {
        self.treks.iter().map(Trek::right_sink).collect()
    }

    /// Both endpoint lists consist of distinct vertices.
    pub fn has_distinct_endpoints(&self) -> bool {
        let a: BTreeSet<_> = self.a_endpoints().into_iter().collect();
        let b: BTreeSet<_> = self.b_endpoints().into_iter().collect();
        a.len() == self.treks.len() && b.len() == self.treks.len()
    }
}

fn sided_crossing(x: &Trek, y: &Trek) -> bool {
    let meets = |p: &[VertexId], q: &[VertexId]| p.iter().any(|v| q.contains(v));
    meets(&x.left, &y.left)
        || meets(&x.right, &y.right)
        || {
            let ym = y.middle_tokens();
            x.middle_tokens().iter().any(|t| ym.contains(t))
        }
}

/// Two treks of the system share a vertex on the same side: left with left,
/// middle with middle, or right with right. Sources count on both their
/// directed path and the middle segment; a bidirected middle occupies only
/// the edge itself.
pub fn has_sided_intersection(sys: &TrekSystem) -> bool {
    let t = &sys.treks;
    (0..t.len()).any(|i| (i + 1..t.len()).any(|j| sided_crossing(&t[i], &t[j])))
}

struct Budget {
    cap: usize,
    used: usize,
}

impl Budget {
    fn take(&mut self, n: usize) -> Result<()> {
        self.used += n;
        if self.used > self.cap {
            Err(Error::CapExceeded { cap: self.cap })
        } else {
            Ok(())
        }
    }
}

/// All directed paths from `from` to `to`, each listed source first.
pub fn directed_paths(g: &MixedGraph, from: VertexId, to: VertexId, cap: usize) -> Result<Vec<Vec<VertexId>>> {
    let mut budget = Budget { cap, used: 0 };
    let reach = g.ancestors(to);
    paths_into(g, from, to, &reach, &mut budget)
}

fn paths_into(
    g: &MixedGraph,
    from: VertexId,
    to: VertexId,
    reach: &VertexSet,
    budget: &mut Budget,
) -> Result<Vec<Vec<VertexId>>> {
    let mut out = Vec::new();
    if !reach.contains(&from) {
        return Ok(out);
    }
    let mut path = vec![from];
    fn rec(
        g: &MixedGraph,
        to: VertexId,
        reach: &VertexSet,
        path: &mut Vec<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
        budget: &mut Budget,
    ) -> Result<()> {
        let x = *path.last().unwrap();
        if x == to {
            budget.take(1)?;
            out.push(path.clone());
            return Ok(());
        }
        for c in g.children(x) {
            if reach.contains(&c) {
                path.push(c);
                rec(g, to, reach, path, out, budget)?;
                path.pop();
            }
        }
        Ok(())
    }
    rec(g, to, reach, &mut path, &mut out, budget)?;
    Ok(out)
}

/// Self-avoiding undirected paths from `s` to `t` with at least one edge.
fn undirected_paths(g: &MixedGraph, s: VertexId, t: VertexId, budget: &mut Budget) -> Result<Vec<Vec<VertexId>>> {
    let mut out = Vec::new();
    if s == t {
        return Ok(out);
    }
    let mut on_path = vec![false; g.m()];
    let mut path = vec![s.idx()];
    on_path[s.idx()] = true;
    fn rec(
        g: &MixedGraph,
        t: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<VertexId>>,
        budget: &mut Budget,
    ) -> Result<()> {
        let x = *path.last().unwrap();
        if x == t {
            budget.take(1)?;
            out.push(path.iter().map(|&i| VertexId::from_idx(i)).collect());
            return Ok(());
        }
        for &y in g.undirected_idx(x) {
            if !on_path[y] {
                on_path[y] = true;
                path.push(y);
                rec(g, t, path, on_path, out, budget)?;
                path.pop();
                on_path[y] = false;
            }
        }
        Ok(())
    }
    rec(g, t.idx(), &mut path, &mut on_path, &mut out, budget)?;
    Ok(out)
}

/// Treks between `i` and `j` with their directed parts, not necessarily
/// simple. Only defined when the graph has no undirected edges, because an
/// undirected middle may wander through cycles.
pub fn enumerate_treks(g: &MixedGraph, i: VertexId, j: VertexId, cap: usize) -> Result<Vec<Trek>> {
    g.check_vertex(i)?;
    g.check_vertex(j)?;
    if !g.undirected_edges().is_empty() {
        return Err(Error::Unsupported("trek set is infinite with undirected edges".into()));
    }
    collect_treks(g, i, j, cap, false)
}

/// Every simple trek between `i` and `j`, sorted by tops, path lengths and
/// vertex sequences. Fails once more than `cap` treks or partial paths have
/// been produced.
pub fn enumerate_simple_treks(g: &MixedGraph, i: VertexId, j: VertexId, cap: usize) -> Result<Vec<Trek>> {
    g.check_vertex(i)?;
    g.check_vertex(j)?;
    collect_treks(g, i, j, cap, true)
}

fn collect_treks(g: &MixedGraph, i: VertexId, j: VertexId, cap: usize, simple_only: bool) -> Result<Vec<Trek>> {
    let mut budget = Budget { cap, used: 0 };
    let anc_i = g.ancestors(i);
    let anc_j = g.ancestors(j);
    let mut left_paths = BTreeMap::new();
    for &s in &anc_i {
        left_paths.insert(s, paths_into(g, s, i, &anc_i, &mut budget)?);
    }
    let mut right_paths = BTreeMap::new();
    for &t in &anc_j {
        right_paths.insert(t, paths_into(g, t, j, &anc_j, &mut budget)?);
    }

    let mut out = Vec::new();
    let mut push = |t: Trek, budget: &mut Budget| -> Result<()> {
        if !simple_only || t.is_simple() {
            budget.take(1)?;
            out.push(t);
        }
        Ok(())
    };

    for k in anc_i.intersection(&anc_j) {
        for p in &left_paths[k] {
            for q in &right_paths[k] {
                push(Trek::with_top(p.clone(), q.clone()), &mut budget)?;
            }
        }
    }
    for &(a, b) in g.bidirected_edges() {
        for (s, t) in [(a, b), (b, a)] {
            let (Some(ps), Some(qs)) = (left_paths.get(&s), right_paths.get(&t)) else {
                continue;
            };
            for p in ps {
                for q in qs {
                    push(Trek::new(p.clone(), MiddleKind::Bidirected, vec![s, t], q.clone()), &mut budget)?;
                }
            }
        }
    }
    if !g.undirected_edges().is_empty() {
        for &s in anc_i.iter().filter(|&&s| g.in_u(s)) {
            for &t in anc_j.iter().filter(|&&t| g.in_u(t) && t != s) {
                let mids = undirected_paths(g, s, t, &mut budget)?;
                for mid in &mids {
                    for p in &left_paths[&s] {
                        for q in &right_paths[&t] {
                            push(Trek::new(p.clone(), MiddleKind::Undirected, mid.clone(), q.clone()), &mut budget)?;
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    Ok(out)
}

/// Search for `r` simple treks joining `r` distinct vertices of `A` to `r`
/// distinct vertices of `B` without a sided intersection.
pub fn exists_noncrossing_system(
    g: &MixedGraph,
    a: &VertexSet,
    b: &VertexSet,
    r: usize,
    cap: usize,
) -> Result<bool> {
    Ok(find_noncrossing_system(g, a, b, r, cap)?.is_some())
}

/// Like [`exists_noncrossing_system`] but returns a witness.
pub fn find_noncrossing_system(
    g: &MixedGraph,
    a: &VertexSet,
    b: &VertexSet,
    r: usize,
    cap: usize,
) -> Result<Option<TrekSystem>> {
    if r == 0 {
        return Ok(Some(TrekSystem::default()));
    }
    if r > a.len().min(b.len()) {
        return Ok(None);
    }
    let mut total = 0;
    // treks[ai][bi]
    let mut treks: Vec<Vec<Vec<Trek>>> = Vec::new();
    for &x in a {
        let mut row = Vec::new();
        for &y in b {
            let t = enumerate_simple_treks(g, x, y, cap)?;
            total += t.len();
            if total > cap {
                return Err(Error::CapExceeded { cap });
            }
            row.push(t);
        }
        treks.push(row);
    }
    let mut budget = Budget { cap, used: 0 };
    let mut chosen: Vec<Trek> = Vec::new();
    let mut used_b = vec![false; b.len()];

    fn search(
        treks: &[Vec<Vec<Trek>>],
        next_a: usize,
        r: usize,
        chosen: &mut Vec<Trek>,
        used_b: &mut [bool],
        budget: &mut Budget,
    ) -> Result<bool> {
        if chosen.len() == r {
            return Ok(true);
        }
        // not enough A vertices left
        if treks.len() - next_a < r - chosen.len() {
            return Ok(false);
        }
        for ai in next_a..treks.len() {
            for bi in 0..used_b.len() {
                if used_b[bi] {
                    continue;
                }
                for t in &treks[ai][bi] {
                    budget.take(1)?;
                    if chosen.iter().any(|c| sided_crossing(c, t)) {
                        continue;
                    }
                    chosen.push(t.clone());
                    used_b[bi] = true;
                    if search(treks, ai + 1, r, chosen, used_b, budget)? {
                        return Ok(true);
                    }
                    used_b[bi] = false;
                    chosen.pop();
                }
            }
        }
        Ok(false)
    }

    if search(&treks, 0, r, &mut chosen, &mut used_b, &mut budget)? {
        Ok(Some(TrekSystem::new(chosen)))
    } else {
        Ok(None)
    }
}

/// Largest `r` for which a noncrossing system exists.
pub fn max_noncrossing(g: &MixedGraph, a: &VertexSet, b: &VertexSet, cap: usize) -> Result<usize> {
    let mut best = 0;
    for r in 1..=a.len().min(b.len()) {
        if exists_noncrossing_system(g, a, b, r, cap)? {
            best = r;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Symbols appearing in trek monomials.
///
/// `InvStdDev(s)` is the factor `d_s^{-1}` attached to each end of an
/// undirected middle segment (and twice to a top in `U`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Param {
    Phi(VertexId, VertexId),
    InvStdDev(VertexId),
    Psi(VertexId, VertexId),
    Lambda(VertexId, VertexId),
}

fn pair_label(a: VertexId, b: VertexId) -> String {
    if a.get() < 10 && b.get() < 10 {
        format!("{a}{b}")
    } else {
        format!("{{{a},{b}}}")
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Param::Phi(a, b) => write!(f, "φ_{}", pair_label(a, b)),
            Param::Psi(a, b) => write!(f, "ψ_{}", pair_label(a, b)),
            Param::Lambda(a, b) => write!(f, "λ_{}", pair_label(a, b)),
            Param::InvStdDev(a) => write!(f, "δ_{a}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Monomial {
    pub coefficient: i64,
    pub exponents: BTreeMap<Param, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { coefficient: 1, exponents: BTreeMap::new() }
    }

    pub fn times(mut self, p: Param) -> Self {
        *self.exponents.entry(p).or_insert(0) += 1;
        self
    }

    pub fn degree(&self) -> u32 {
        self.exponents.values().sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient != 1 || self.exponents.is_empty() {
            write!(f, "{}", self.coefficient)?;
        }
        for (p, &e) in &self.exponents {
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// The term a trek contributes to the covariance expansion.
pub fn trek_monomial(g: &MixedGraph, t: &Trek) -> Monomial {
    let mut mono = Monomial::one();
    let (s, u) = t.tops();
    match t.middle_kind {
        MiddleKind::None => {
            if g.contains(s) && g.in_u(s) {
                mono = mono.times(Param::InvStdDev(s)).times(Param::InvStdDev(s));
            } else {
                mono = mono.times(Param::Phi(s, s));
            }
        }
        MiddleKind::Bidirected => mono = mono.times(Param::Phi(s.min(u), s.max(u))),
        MiddleKind::Undirected => {
            mono = mono.times(Param::InvStdDev(s)).times(Param::InvStdDev(u));
            for w in t.middle.windows(2) {
                mono = mono.times(Param::Psi(w[0].min(w[1]), w[0].max(w[1])));
            }
        }
    }
    for p in [&t.left, &t.right] {
        for w in p.windows(2) {
            mono = mono.times(Param::Lambda(w[0], w[1]));
        }
    }
    mono
}
