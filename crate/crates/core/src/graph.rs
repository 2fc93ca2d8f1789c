//! Mixed graphs with directed, undirected and bidirected edges.
//!
//! Vertices are split into two blocks `U` and `W`. Undirected edges live in
//! `U`, bidirected edges live in `W`, and a directed edge joining the blocks
//! must point from `U` into `W`. The directed part is acyclic.

use std::collections::{BTreeSet, BinaryHeap, HashSet};
use std::cmp::Reverse;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A 1-based vertex label.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct VertexId(u32);

impl VertexId {
    /// Panics on `0`.
    pub fn new(id: usize) -> Self {
        assert!(id >= 1, "vertex ids are 1-based");
        VertexId(id as u32)
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn idx(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub(crate) fn from_idx(i: usize) -> Self {
        VertexId(i as u32 + 1)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type VertexSet = BTreeSet<VertexId>;

/// Build a vertex set from raw 1-based ids.
pub fn vset<I: IntoIterator<Item = usize>>(ids: I) -> VertexSet {
    ids.into_iter().map(VertexId::new).collect()
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum EdgeKind {
    Directed,
    Undirected,
    Bidirected,
}

impl EdgeKind {
    pub fn symbol(self) -> &'static str {
        match self {
            EdgeKind::Directed => "->",
            EdgeKind::Undirected => "--",
            EdgeKind::Bidirected => "<->",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum GraphClass {
    Dag,
    Undirected,
    Mixed,
}

/// One rule broken by a graph.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Violation {
    DirectedCycle(Vec<VertexId>),
    DirectionViolated { from: VertexId, to: VertexId },
    UndirectedOutsideU { a: VertexId, b: VertexId },
    BidirectedOutsideW { a: VertexId, b: VertexId },
    PartitionConflict(VertexId),
    SelfLoop { kind: EdgeKind, v: VertexId },
    DuplicateEdge { kind: EdgeKind, a: VertexId, b: VertexId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DirectedCycle(c) => {
                let s: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "directed cycle: {}", s.join(","))
            }
            Violation::DirectionViolated { from, to } => {
                write!(f, "U→W direction violated: edge {from} -> {to} points from W into U")
            }
            Violation::UndirectedOutsideU { a, b } => {
                write!(f, "undirected edge {a} -- {b} has an endpoint outside U")
            }
            Violation::BidirectedOutsideW { a, b } => {
                write!(f, "bidirected edge {a} <-> {b} has an endpoint outside W")
            }
            Violation::PartitionConflict(v) => {
                write!(f, "vertex {v} cannot be in both U and W")
            }
            Violation::SelfLoop { kind, v } => {
                write!(f, "self-loop {v} {} {v}", kind.symbol())
            }
            Violation::DuplicateEdge { kind, a, b } => {
                write!(f, "duplicate edge {a} {} {b}", kind.symbol())
            }
        }
    }
}

/// A mixed graph on vertices `1..=m`.
///
/// Unordered pairs are stored with the smaller id first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MixedGraph {
    m: usize,
    in_u: Vec<bool>,
    directed: BTreeSet<(VertexId, VertexId)>,
    undirected: BTreeSet<(VertexId, VertexId)>,
    bidirected: BTreeSet<(VertexId, VertexId)>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    und_adj: Vec<Vec<usize>>,
    bi_adj: Vec<Vec<usize>>,
}

fn unordered(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl MixedGraph {
    /// Assemble a graph without checking the structural rules; only vertex
    /// ranges are checked. Use [`validate`] on the result, or go through
    /// [`GraphBuilder`] which does both.
    pub fn from_parts(
        m: usize,
        u_set: &VertexSet,
        directed: impl IntoIterator<Item = (VertexId, VertexId)>,
        undirected: impl IntoIterator<Item = (VertexId, VertexId)>,
        bidirected: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let check = |v: VertexId| {
            if v.get() > m {
                Err(Error::VertexOutOfRange { id: v.get(), m })
            } else {
                Ok(v)
            }
        };
        let mut in_u = vec![false; m];
        for &v in u_set {
            in_u[check(v)?.idx()] = true;
        }
        let mut g = MixedGraph {
            m,
            in_u,
            directed: BTreeSet::new(),
            undirected: BTreeSet::new(),
            bidirected: BTreeSet::new(),
            children: vec![Vec::new(); m],
            parents: vec![Vec::new(); m],
            und_adj: vec![Vec::new(); m],
            bi_adj: vec![Vec::new(); m],
        };
        for (a, b) in directed {
            g.directed.insert((check(a)?, check(b)?));
        }
        for (a, b) in undirected {
            g.undirected.insert(unordered(check(a)?, check(b)?));
        }
        for (a, b) in bidirected {
            g.bidirected.insert(unordered(check(a)?, check(b)?));
        }
        for &(a, b) in &g.directed {
            g.children[a.idx()].push(b.idx());
            g.parents[b.idx()].push(a.idx());
        }
        for &(a, b) in &g.undirected {
            g.und_adj[a.idx()].push(b.idx());
            if a != b {
                g.und_adj[b.idx()].push(a.idx());
            }
        }
        for &(a, b) in &g.bidirected {
            g.bi_adj[a.idx()].push(b.idx());
            if a != b {
                g.bi_adj[b.idx()].push(a.idx());
            }
        }
        for adj in [&mut g.children, &mut g.parents, &mut g.und_adj, &mut g.bi_adj] {
            adj.iter_mut().for_each(|l| l.sort_unstable());
        }
        Ok(g)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.m).map(VertexId::from_idx)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.get() <= self.m
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { id: v.get(), m: self.m })
        }
    }

    pub fn in_u(&self, v: VertexId) -> bool {
        self.in_u[v.idx()]
    }

    pub fn u_set(&self) -> VertexSet {
        self.vertices().filter(|&v| self.in_u(v)).collect()
    }

    pub fn w_set(&self) -> VertexSet {
        self.vertices().filter(|&v| !self.in_u(v)).collect()
    }

    pub fn directed_edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.directed
    }

    pub fn undirected_edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.undirected
    }

    pub fn bidirected_edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.bidirected
    }

    pub fn has_directed(&self, a: VertexId, b: VertexId) -> bool {
        self.directed.contains(&(a, b))
    }

    pub fn children(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.children[v.idx()].iter().map(|&i| VertexId::from_idx(i))
    }

    pub fn parents(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.parents[v.idx()].iter().map(|&i| VertexId::from_idx(i))
    }

    pub fn undirected_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.und_adj[v.idx()].iter().map(|&i| VertexId::from_idx(i))
    }

    pub fn bidirected_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.bi_adj[v.idx()].iter().map(|&i| VertexId::from_idx(i))
    }

    pub(crate) fn children_idx(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub(crate) fn parents_idx(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub(crate) fn undirected_idx(&self, i: usize) -> &[usize] {
        &self.und_adj[i]
    }

    pub fn class(&self) -> GraphClass {
        if self.undirected.is_empty() && self.bidirected.is_empty() {
            GraphClass::Dag
        } else if self.directed.is_empty() && self.bidirected.is_empty() {
            GraphClass::Undirected
        } else {
            GraphClass::Mixed
        }
    }

    pub fn edge_count(&self) -> usize {
        self.directed.len() + self.undirected.len() + self.bidirected.len()
    }

    /// Vertices with a directed path into `v`, including `v`.
    pub fn ancestors(&self, v: VertexId) -> VertexSet {
        self.reach(v, &self.parents)
    }

    /// Vertices reachable from `v` along directed edges, including `v`.
    pub fn descendants(&self, v: VertexId) -> VertexSet {
        self.reach(v, &self.children)
    }

    fn reach(&self, v: VertexId, adj: &[Vec<usize>]) -> VertexSet {
        let mut seen = vec![false; self.m];
        let mut stack = vec![v.idx()];
        seen[v.idx()] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.m).filter(|&i| seen[i]).map(VertexId::from_idx).collect()
    }

    /// Kahn's algorithm, smallest available id first.
    pub fn topological_order(&self) -> Result<Vec<VertexId>> {
        let mut indeg: Vec<usize> = self.parents.iter().map(|p| p.len()).collect();
        let mut heap: BinaryHeap<Reverse<usize>> = (0..self.m)
            .filter(|&i| indeg[i] == 0)
            .map(Reverse)
            .collect();
        let mut out = Vec::with_capacity(self.m);
        while let Some(Reverse(i)) = heap.pop() {
            out.push(VertexId::from_idx(i));
            for &c in &self.children[i] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    heap.push(Reverse(c));
                }
            }
        }
        if out.len() == self.m {
            Ok(out)
        } else {
            Err(Error::Cycle)
        }
    }

    /// Replace every bidirected edge `i <-> j` by a fresh vertex with edges
    /// into `i` and `j`. New ids are `m+1, m+2, ...` in lexicographic order of
    /// the edges.
    pub fn bidirected_subdivision(&self) -> MixedGraph {
        let mut directed: Vec<_> = self.directed.iter().copied().collect();
        for (k, &(a, b)) in self.bidirected.iter().enumerate() {
            let v = VertexId::new(self.m + k + 1);
            directed.push((v, a));
            directed.push((v, b));
        }
        let m = self.m + self.bidirected.len();
        MixedGraph::from_parts(m, &self.u_set(), directed, self.undirected.iter().copied(), [])
            .expect("subdivision stays in range")
    }

    /// The vertices added by [`MixedGraph::bidirected_subdivision`], paired with
    /// the bidirected edge each one replaces.
    pub fn subdivision_vertices(&self) -> Vec<(VertexId, (VertexId, VertexId))> {
        self.bidirected
            .iter()
            .enumerate()
            .map(|(k, &e)| (VertexId::new(self.m + k + 1), e))
            .collect()
    }

    /// All structural rule violations, empty for a valid graph.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for &(a, b) in &self.directed {
            if a == b {
                out.push(Violation::SelfLoop { kind: EdgeKind::Directed, v: a });
            } else if !self.in_u(a) && self.in_u(b) {
                out.push(Violation::DirectionViolated { from: a, to: b });
            }
        }
        for &(a, b) in &self.undirected {
            if a == b {
                out.push(Violation::SelfLoop { kind: EdgeKind::Undirected, v: a });
            } else if !self.in_u(a) || !self.in_u(b) {
                out.push(Violation::UndirectedOutsideU { a, b });
            }
        }
        for &(a, b) in &self.bidirected {
            if a == b {
                out.push(Violation::SelfLoop { kind: EdgeKind::Bidirected, v: a });
            } else if self.in_u(a) || self.in_u(b) {
                out.push(Violation::BidirectedOutsideW { a, b });
            }
        }
        if let Some(cycle) = self.find_cycle() {
            out.push(Violation::DirectedCycle(cycle));
        }
        out
    }

    fn find_cycle(&self) -> Option<Vec<VertexId>> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; self.m];
        for root in 0..self.m {
            if color[root] != 0 {
                continue;
            }
            let mut path = vec![root];
            let mut iters = vec![0usize];
            color[root] = 1;
            while let Some(&x) = path.last() {
                let k = iters.last_mut().unwrap();
                if let Some(&y) = self.children[x].get(*k) {
                    *k += 1;
                    match color[y] {
                        0 => {
                            color[y] = 1;
                            path.push(y);
                            iters.push(0);
                        }
                        1 => {
                            let start = path.iter().position(|&p| p == y).unwrap();
                            return Some(path[start..].iter().map(|&i| VertexId::from_idx(i)).collect());
                        }
                        _ => {}
                    }
                } else {
                    color[x] = 2;
                    path.pop();
                    iters.pop();
                }
            }
        }
        None
    }
}

impl fmt::Display for MixedGraph {
    /// Writes the line-based graph file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "v {}", self.m)?;
        for (tag, set) in [("u", self.u_set()), ("w", self.w_set())] {
            if !set.is_empty() {
                let ids: Vec<String> = set.iter().map(|v| v.to_string()).collect();
                writeln!(f, "{tag} {}", ids.join(" "))?;
            }
        }
        for (kind, set) in [
            (EdgeKind::Directed, &self.directed),
            (EdgeKind::Undirected, &self.undirected),
            (EdgeKind::Bidirected, &self.bidirected),
        ] {
            for (a, b) in set {
                writeln!(f, "e {a} {} {b}", kind.symbol())?;
            }
        }
        Ok(())
    }
}

/// Collects edges and block annotations, infers the `U`/`W` split and
/// validates the result.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    m: usize,
    edges: Vec<(EdgeKind, usize, usize)>,
    explicit_u: Vec<usize>,
    explicit_w: Vec<usize>,
}

impl GraphBuilder {
    pub fn new(m: usize) -> Self {
        GraphBuilder { m, ..Default::default() }
    }

    pub fn edge(mut self, kind: EdgeKind, a: usize, b: usize) -> Self {
        self.edges.push((kind, a, b));
        self
    }

    pub fn directed(self, a: usize, b: usize) -> Self {
        self.edge(EdgeKind::Directed, a, b)
    }

    pub fn undirected(self, a: usize, b: usize) -> Self {
        self.edge(EdgeKind::Undirected, a, b)
    }

    pub fn bidirected(self, a: usize, b: usize) -> Self {
        self.edge(EdgeKind::Bidirected, a, b)
    }

    pub fn in_u(mut self, ids: impl IntoIterator<Item = usize>) -> Self {
        self.explicit_u.extend(ids);
        self
    }

    pub fn in_w(mut self, ids: impl IntoIterator<Item = usize>) -> Self {
        self.explicit_w.extend(ids);
        self
    }

    pub fn build(self) -> Result<MixedGraph> {
        let m = self.m;
        let check = |id: usize| {
            if id == 0 || id > m {
                Err(Error::VertexOutOfRange { id, m })
            } else {
                Ok(id - 1)
            }
        };
        let mut seen = HashSet::new();
        let mut dups = Vec::new();
        let (mut dir, mut und, mut bi) = (Vec::new(), Vec::new(), Vec::new());
        let mut base_u = vec![false; m];
        let mut base_w = vec![false; m];
        for &id in &self.explicit_u {
            base_u[check(id)?] = true;
        }
        for &id in &self.explicit_w {
            base_w[check(id)?] = true;
        }
        for &(kind, a, b) in &self.edges {
            let (ia, ib) = (check(a)?, check(b)?);
            let (va, vb) = (VertexId::from_idx(ia), VertexId::from_idx(ib));
            let key = match kind {
                EdgeKind::Directed => (kind, va, vb),
                _ => {
                    let (x, y) = unordered(va, vb);
                    (kind, x, y)
                }
            };
            if !seen.insert(key) {
                dups.push(Violation::DuplicateEdge { kind, a: key.1, b: key.2 });
                continue;
            }
            match kind {
                EdgeKind::Directed => dir.push((va, vb)),
                EdgeKind::Undirected => {
                    base_u[ia] = true;
                    base_u[ib] = true;
                    und.push((va, vb));
                }
                EdgeKind::Bidirected => {
                    base_w[ia] = true;
                    base_w[ib] = true;
                    bi.push((va, vb));
                }
            }
        }
        let mut violations = dups;
        for i in 0..m {
            if base_u[i] && base_w[i] {
                violations.push(Violation::PartitionConflict(VertexId::from_idx(i)));
            }
        }
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }

        // Parents of U vertices are pulled into U; everything left over goes to W.
        let mut in_u = base_u;
        let mut stack: Vec<usize> = (0..m).filter(|&i| in_u[i]).collect();
        let mut parents = vec![Vec::new(); m];
        for &(a, b) in &dir {
            parents[b.idx()].push(a.idx());
        }
        while let Some(x) = stack.pop() {
            for &p in &parents[x] {
                if !in_u[p] && !base_w[p] {
                    in_u[p] = true;
                    stack.push(p);
                }
            }
        }
        let u_set: VertexSet = (0..m).filter(|&i| in_u[i]).map(VertexId::from_idx).collect();
        let g = MixedGraph::from_parts(m, &u_set, dir, und, bi)?;
        let violations = g.validate();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(Error::Invalid(violations))
        }
    }
}

/// Parse the line-based graph file format.
///
/// ```text
/// v 5
/// e 1 -> 2
/// e 2 -- 3
/// e 4 <-> 5
/// ```
pub fn parse_graph(text: &str) -> Result<MixedGraph> {
    let syntax = |line: usize, message: String| Error::Syntax { line, message };
    let mut builder: Option<GraphBuilder> = None;
    let mut seen = HashSet::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parse_id = |t: &str| -> Result<usize> {
            t.parse::<usize>()
                .map_err(|_| syntax(line_no, format!("expected a vertex id, found `{t}`")))
        };
        let Some(b) = builder.as_mut() else {
            if toks[0] != "v" || toks.len() != 2 {
                return Err(syntax(line_no, "first line must be `v <m>`".into()));
            }
            let m = toks[1]
                .parse::<usize>()
                .map_err(|_| syntax(line_no, format!("bad vertex count `{}`", toks[1])))?;
            builder = Some(GraphBuilder::new(m));
            continue;
        };
        let m = b.m;
        let in_range = |id: usize| -> Result<usize> {
            if id == 0 || id > m {
                Err(syntax(line_no, format!("vertex {id} out of range 1..={m}")))
            } else {
                Ok(id)
            }
        };
        match toks[0] {
            "v" => return Err(syntax(line_no, "duplicate `v` line".into())),
            "u" | "w" => {
                let ids = toks[1..]
                    .iter()
                    .map(|t| parse_id(t).and_then(in_range))
                    .collect::<Result<Vec<_>>>()?;
                if toks[0] == "u" {
                    b.explicit_u.extend(ids);
                } else {
                    b.explicit_w.extend(ids);
                }
            }
            "e" => {
                if toks.len() != 4 {
                    return Err(syntax(line_no, "edge lines look like `e <i> -> <j>`".into()));
                }
                let a = in_range(parse_id(toks[1])?)?;
                let c = in_range(parse_id(toks[3])?)?;
                let kind = match toks[2] {
                    "->" => EdgeKind::Directed,
                    "--" => EdgeKind::Undirected,
                    "<->" => EdgeKind::Bidirected,
                    other => return Err(syntax(line_no, format!("unknown edge type `{other}`"))),
                };
                let key = if kind == EdgeKind::Directed || a <= c { (kind, a, c) } else { (kind, c, a) };
                if !seen.insert(key) {
                    return Err(syntax(
                        line_no,
                        format!("duplicate edge {a} {} {c}", kind.symbol()),
                    ));
                }
                b.edges.push((kind, a, c));
            }
            other => return Err(syntax(line_no, format!("unknown directive `{other}`"))),
        }
    }
    builder.ok_or_else(|| syntax(0, "missing `v <m>` line".into()))?.build()
}
