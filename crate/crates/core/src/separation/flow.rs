//! Vertex-capacitated flow network on three copies of a mixed graph.
//!
//! Every vertex `v` appears as `v'` (left layer, directed edges reversed),
//! `v''` (middle layer, undirected edges in both directions) and `v` (right
//! layer, directed edges as given), with arcs `v' -> v'' -> v`. A path from
//! `a'` to `b` spells out a trek from `a` to `b`. Each copy is split into an
//! in-node and an out-node joined by a unit arc, so a minimum cut is a
//! smallest set of (vertex, layer) pairs meeting every trek.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{MixedGraph, VertexId, VertexSet};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Level {
    /// `v'`: the directed path into the `A` side.
    Left,
    /// `v''`: the middle segment.
    Middle,
    /// `v`: the directed path into the `B` side.
    Right,
}

const LEVELS: [Level; 3] = [Level::Left, Level::Middle, Level::Right];

impl Level {
    fn index(self) -> usize {
        match self {
            Level::Left => 0,
            Level::Middle => 1,
            Level::Right => 2,
        }
    }
}

/// Blocking sets for the left path, middle segment and right path of a trek.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct SeparationTriple {
    pub c_left: VertexSet,
    pub c_mid: VertexSet,
    pub c_right: VertexSet,
}

impl SeparationTriple {
    pub fn new(c_left: VertexSet, c_mid: VertexSet, c_right: VertexSet) -> Self {
        SeparationTriple { c_left, c_mid, c_right }
    }

    /// A pair `(C_A, C_B)` from the directed setting.
    pub fn pair(c_a: VertexSet, c_b: VertexSet) -> Self {
        SeparationTriple::new(c_a, VertexSet::new(), c_b)
    }

    pub fn size(&self) -> usize {
        self.c_left.len() + self.c_mid.len() + self.c_right.len()
    }

    /// `(C_L ∪ C_M, C_R)`. In a DAG a middle cut sits on a top, which also
    /// lies on the left path.
    pub fn dag_pair(&self) -> (VertexSet, VertexSet) {
        (self.c_left.union(&self.c_mid).copied().collect(), self.c_right.clone())
    }

    pub fn get(&self, level: Level) -> &VertexSet {
        match level {
            Level::Left => &self.c_left,
            Level::Middle => &self.c_mid,
            Level::Right => &self.c_right,
        }
    }

    fn get_mut(&mut self, level: Level) -> &mut VertexSet {
        match level {
            Level::Left => &mut self.c_left,
            Level::Middle => &mut self.c_mid,
            Level::Right => &mut self.c_right,
        }
    }

    /// Every `(vertex, layer)` entry.
    pub fn entries(&self) -> Vec<(VertexId, Level)> {
        LEVELS.iter().flat_map(|&l| self.get(l).iter().map(move |&v| (v, l))).collect()
    }

    /// Copy with one entry removed.
    pub fn without(&self, v: VertexId, level: Level) -> Self {
        let mut out = self.clone();
        out.get_mut(level).remove(&v);
        out
    }
}

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: usize,
    flow: isize,
}

/// A flow network built from a graph without bidirected edges.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    m: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    infinite: usize,
    flow_value: usize,
}

impl FlowNetwork {
    fn node(&self, v: usize, level: Level, out: bool) -> usize {
        (level.index() * self.m + v) * 2 + out as usize
    }

    /// Decode a node id into `(vertex, layer, is_out)`; `None` for the
    /// source and sink.
    fn decode(&self, node: usize) -> Option<(VertexId, Level, bool)> {
        if node >= 6 * self.m {
            return None;
        }
        let out = node % 2 == 1;
        let k = node / 2;
        Some((VertexId::from_idx(k % self.m), LEVELS[k / self.m], out))
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: usize) {
        let e = self.arcs.len();
        self.arcs.push(Arc { to, cap, flow: 0 });
        self.arcs.push(Arc { to: from, cap: 0, flow: 0 });
        self.adj[from].push(e);
        self.adj[to].push(e + 1);
    }

    pub(crate) fn new(g: &MixedGraph, a: &VertexSet, b: &VertexSet, cuttable: impl Fn(VertexId) -> bool) -> Result<Self> {
        if !g.bidirected_edges().is_empty() {
            return Err(Error::Unsupported(
                "auxiliary graph needs bidirected edges subdivided first".into(),
            ));
        }
        for v in a.iter().chain(b) {
            g.check_vertex(*v)?;
        }
        let m = g.m();
        let infinite = m + 1;
        let nodes = 6 * m + 2;
        let mut net = FlowNetwork {
            m,
            source: 6 * m,
            sink: 6 * m + 1,
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            infinite,
            flow_value: 0,
        };
        for level in LEVELS {
            for v in 0..m {
                let cap = if cuttable(VertexId::from_idx(v)) { 1 } else { infinite };
                net.add_arc(net.node(v, level, false), net.node(v, level, true), cap);
            }
        }
        for v in 0..m {
            net.add_arc(net.node(v, Level::Left, true), net.node(v, Level::Middle, false), infinite);
            net.add_arc(net.node(v, Level::Middle, true), net.node(v, Level::Right, false), infinite);
        }
        for &(i, j) in g.directed_edges() {
            net.add_arc(net.node(i.idx(), Level::Right, true), net.node(j.idx(), Level::Right, false), infinite);
            net.add_arc(net.node(j.idx(), Level::Left, true), net.node(i.idx(), Level::Left, false), infinite);
        }
        for &(i, j) in g.undirected_edges() {
            net.add_arc(net.node(i.idx(), Level::Middle, true), net.node(j.idx(), Level::Middle, false), infinite);
            net.add_arc(net.node(j.idx(), Level::Middle, true), net.node(i.idx(), Level::Middle, false), infinite);
        }
        for &x in a {
            net.add_arc(net.source, net.node(x.idx(), Level::Left, false), infinite);
        }
        for &y in b {
            net.add_arc(net.node(y.idx(), Level::Right, true), net.sink, infinite);
        }
        let arcs = &net.arcs;
        for list in net.adj.iter_mut() {
            list.sort_by_key(|&e| (arcs[e].to, e));
        }
        Ok(net)
    }

    /// Number of graph vertices (per layer).
    pub fn vertex_count(&self) -> usize {
        self.m
    }

    /// Node count including source and sink.
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn flow_value(&self) -> usize {
        self.flow_value
    }

    /// Whether a source-to-sink path survives after deleting the given
    /// `(vertex, layer)` nodes. Ignores any flow already pushed.
    pub fn path_exists_without(&self, removed: &SeparationTriple) -> bool {
        let mut blocked = vec![false; self.adj.len()];
        for (v, level) in removed.entries() {
            if v.get() <= self.m {
                blocked[self.node(v.idx(), level, false)] = true;
            }
        }
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([self.source]);
        seen[self.source] = true;
        while let Some(x) = queue.pop_front() {
            if x == self.sink {
                return true;
            }
            for &e in &self.adj[x] {
                let arc = &self.arcs[e];
                if arc.cap > 0 && !seen[arc.to] && !blocked[arc.to] {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        false
    }

    pub fn path_exists(&self) -> bool {
        self.path_exists_without(&SeparationTriple::default())
    }

    fn residual(&self, e: usize) -> isize {
        self.arcs[e].cap as isize - self.arcs[e].flow
    }

    /// Shortest augmenting paths (Edmonds–Karp), neighbours scanned in
    /// increasing node order. Returns the maximum flow value.
    pub fn max_flow(&mut self) -> usize {
        loop {
            let mut pred = vec![usize::MAX; self.adj.len()];
            let mut queue = VecDeque::from([self.source]);
            let mut reached = false;
            pred[self.source] = usize::MAX - 1;
            while let Some(x) = queue.pop_front() {
                if x == self.sink {
                    reached = true;
                    break;
                }
                for &e in &self.adj[x] {
                    let to = self.arcs[e].to;
                    if pred[to] == usize::MAX && self.residual(e) > 0 {
                        pred[to] = e;
                        queue.push_back(to);
                    }
                }
            }
            if !reached {
                break;
            }
            let mut bottleneck = isize::MAX;
            let mut x = self.sink;
            while x != self.source {
                let e = pred[x];
                bottleneck = bottleneck.min(self.residual(e));
                x = self.arcs[e ^ 1].to;
            }
            let mut x = self.sink;
            while x != self.source {
                let e = pred[x];
                self.arcs[e].flow += bottleneck;
                self.arcs[e ^ 1].flow -= bottleneck;
                x = self.arcs[e ^ 1].to;
            }
            self.flow_value += bottleneck as usize;
            if self.flow_value >= self.infinite {
                // only reachable when a trek avoids every cuttable vertex
                break;
            }
        }
        self.flow_value
    }

    fn residual_reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([self.source]);
        seen[self.source] = true;
        while let Some(x) = queue.pop_front() {
            for &e in &self.adj[x] {
                let to = self.arcs[e].to;
                if !seen[to] && self.residual(e) > 0 {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
        seen
    }

    /// The minimum cut closest to the source, read off after
    /// [`FlowNetwork::max_flow`]: split arcs leaving the residual-reachable set.
    pub fn min_cut(&self) -> SeparationTriple {
        let seen = self.residual_reachable();
        let mut cut = SeparationTriple::default();
        for level in LEVELS {
            for v in 0..self.m {
                if seen[self.node(v, level, false)] && !seen[self.node(v, level, true)] {
                    cut.get_mut(level).insert(VertexId::from_idx(v));
                }
            }
        }
        cut
    }

    /// Decompose the current flow into source-to-sink paths, each listed as
    /// the `(vertex, layer)` copies it passes through. Circulations are
    /// dropped.
    pub fn flow_paths(&self) -> Vec<Vec<(VertexId, Level)>> {
        let mut remaining: Vec<isize> = self.arcs.iter().map(|a| a.flow).collect();
        let mut out = Vec::new();
        'paths: loop {
            let mut nodes = vec![self.source];
            let mut pos = vec![usize::MAX; self.adj.len()];
            pos[self.source] = 0;
            while *nodes.last().unwrap() != self.sink {
                let x = *nodes.last().unwrap();
                let Some(&e) = self.adj[x].iter().find(|&&e| e % 2 == 0 && remaining[e] > 0) else {
                    break 'paths;
                };
                remaining[e] -= 1;
                let to = self.arcs[e].to;
                if pos[to] != usize::MAX {
                    for n in nodes.drain(pos[to] + 1..) {
                        pos[n] = usize::MAX;
                    }
                } else {
                    pos[to] = nodes.len();
                    nodes.push(to);
                }
            }
            out.push(
                nodes
                    .into_iter()
                    .filter_map(|n| match self.decode(n) {
                        Some((v, level, false)) => Some((v, level)),
                        _ => None,
                    })
                    .collect(),
            );
        }
        out
    }
}

/// The auxiliary network for treks from `A` to `B`.
pub fn build_auxiliary_graph(g: &MixedGraph, a: &VertexSet, b: &VertexSet) -> Result<FlowNetwork> {
    FlowNetwork::new(g, a, b, |_| true)
}
