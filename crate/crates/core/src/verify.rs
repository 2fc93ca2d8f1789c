//! Randomized cross-checks of the combinatorial algorithms against the
//! exact algebraic oracles.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    build_covariance, cauchy_binet_two_ways, generic_rank_oracle, gvl_minor_two_ways, sample_parameters,
    simple_trek_rule_covariance, trek_rule_covariance, TrekRuleContext, DEFAULT_SCALE,
};
use crate::canonical::{choke_graph, choke_sets, spider_graph, spider_sets};
use crate::error::{Error, Result};
use crate::graph::{EdgeKind, GraphBuilder, GraphClass, MixedGraph, VertexId, VertexSet};
use crate::separation::{
    ci_implied, d_sep_via_t_sep, d_separates, generic_rank, is_t_separating, min_t_separator, vanishing_tetrad,
    ChokePoint, SeparationTriple, Side,
};
use crate::trek::{max_noncrossing, DEFAULT_CAP};

/// Largest graph on which [`cross_check_rank`] also runs the brute-force
/// trek-system search.
pub const NONCROSSING_MAX_VERTICES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub max_vertices: usize,
    pub graph_count: usize,
    pub trials_per_instance: u32,
    pub edge_density: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 1, max_vertices: 6, graph_count: 200, trials_per_instance: 5, edge_density: 0.4 }
    }
}

impl SuiteConfig {
    pub fn check(&self) -> Result<()> {
        if self.graph_count == 0 {
            return Err(Error::BadQuery("graph_count must be at least 1".into()));
        }
        if self.max_vertices < 2 {
            return Err(Error::BadQuery("max_vertices must be at least 2".into()));
        }
        if !(self.edge_density > 0.0 && self.edge_density <= 1.0) {
            return Err(Error::BadQuery("edge_density must lie in (0, 1]".into()));
        }
        if self.trials_per_instance == 0 {
            return Err(Error::BadQuery("trials_per_instance must be at least 1".into()));
        }
        Ok(())
    }
}

/// One failed comparison, with enough detail to replay it from the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: String,
    pub graph: String,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub seed: u64,
    pub combinatorial: String,
    pub algebraic: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub passes: usize,
    pub failures: usize,
}

impl CheckSummary {
    pub fn total(&self) -> usize {
        self.passes + self.failures
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckSummary>,
    pub failing: Vec<Failure>,
}

impl SuiteReport {
    pub fn total_failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn ids(s: &VertexSet) -> Vec<usize> {
    s.iter().map(|v| v.get()).collect()
}

/// A seeded random graph on `n` vertices.
///
/// Each pair `i < j` receives an edge with probability `density`. DAG edges
/// point `i -> j`. Mixed graphs put the first `⌈n/2⌉` vertices in `U`; the
/// edge kind is drawn from those legal for the pair, and now and then a
/// second kind is added in parallel.
pub fn random_graph(class: GraphClass, n: usize, seed: u64, density: f64) -> MixedGraph {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u_size = n.div_ceil(2);
    let mut builder = GraphBuilder::new(n);
    builder = match class {
        GraphClass::Dag => builder.in_w(1..=n),
        GraphClass::Undirected => builder.in_u(1..=n),
        GraphClass::Mixed => builder.in_u(1..=u_size).in_w(u_size + 1..=n),
    };
    for i in 1..=n {
        for j in i + 1..=n {
            if !rng.random_bool(density) {
                continue;
            }
            let allowed: &[EdgeKind] = match class {
                GraphClass::Dag => &[EdgeKind::Directed],
                GraphClass::Undirected => &[EdgeKind::Undirected],
                GraphClass::Mixed if j <= u_size => &[EdgeKind::Directed, EdgeKind::Undirected],
                GraphClass::Mixed if i > u_size => &[EdgeKind::Directed, EdgeKind::Bidirected],
                GraphClass::Mixed => &[EdgeKind::Directed],
            };
            let k = rng.random_range(0..allowed.len());
            builder = builder.edge(allowed[k], i, j);
            if allowed.len() > 1 && rng.random_bool(0.15) {
                builder = builder.edge(allowed[1 - k], i, j);
            }
        }
    }
    builder.build().expect("random graphs respect the structural rules")
}

/// A mixed graph with at least one bidirected edge, or `None` when `n < 4`
/// leaves too few vertices in `W`.
pub fn random_bidirected_graph(n: usize, seed: u64, density: f64) -> Option<MixedGraph> {
    if n < 4 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = random_graph(GraphClass::Mixed, n, rng.random(), density);
        if !g.bidirected_edges().is_empty() {
            return Some(g);
        }
    }
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, max: usize) -> VertexSet {
    let k = rng.random_range(1..=max.min(n));
    sample(rng, n, k).into_iter().map(VertexId::from_idx).collect()
}

/// Outcome of comparing the min-cut rank with the algebraic rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankCheck {
    pub combinatorial: usize,
    pub oracle: usize,
    /// Largest noncrossing trek system, on graphs small enough to search.
    pub noncrossing: Option<usize>,
}

impl RankCheck {
    pub fn passed(&self) -> bool {
        self.combinatorial == self.oracle && self.noncrossing.is_none_or(|r| r == self.combinatorial)
    }
}

pub fn cross_check_rank(g: &MixedGraph, a: &VertexSet, b: &VertexSet, seed: u64, trials: u32) -> Result<RankCheck> {
    let combinatorial = generic_rank(g, a, b)?;
    let oracle = generic_rank_oracle(g, a, b, seed, trials)?;
    let noncrossing = if g.m() <= NONCROSSING_MAX_VERTICES {
        match max_noncrossing(g, a, b, DEFAULT_CAP) {
            Ok(r) => Some(r),
            Err(Error::CapExceeded { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(RankCheck { combinatorial, oracle, noncrossing })
}

/// Flow value, certificate size and number of disjoint routes agree, the
/// routes really are disjoint and run from `A` to `B`, and the certificate
/// separates but loses that property when any entry is dropped.
pub fn menger_check(g: &MixedGraph, a: &VertexSet, b: &VertexSet) -> Result<bool> {
    let r = min_t_separator(g, a, b)?;
    let sizes = r.flow_value == r.certificate.size() && r.rank == r.flow_value && r.paths.len() == r.flow_value;
    let mut used = std::collections::BTreeSet::new();
    let mut routes = true;
    for p in &r.paths {
        let ends = matches!(p.first(), Some((x, crate::separation::Level::Left)) if a.contains(x))
            && matches!(p.last(), Some((y, crate::separation::Level::Right)) if b.contains(y));
        routes &= ends;
        for &(v, level) in p {
            if v.get() <= g.m() {
                routes &= used.insert((v, level));
            }
        }
    }
    if !(sizes && routes && is_t_separating(g, a, b, &r.certificate)?) {
        return Ok(false);
    }
    for (v, level) in r.certificate.entries() {
        if is_t_separating(g, a, b, &r.certificate.without(v, level))? {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Tally {
    summary: CheckSummary,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally { summary: CheckSummary { name: name.into(), passes: 0, failures: 0 } }
    }

    fn record(&mut self, ok: bool, failing: &mut Vec<Failure>, failure: impl FnOnce() -> Failure) {
        if ok {
            self.summary.passes += 1;
        } else {
            self.summary.failures += 1;
            failing.push(failure());
        }
    }
}

fn failure(check: &str, g: &MixedGraph, sets: [&VertexSet; 3], seed: u64, comb: String, alg: String) -> Failure {
    Failure {
        check: check.into(),
        graph: g.to_string(),
        a: ids(sets[0]),
        b: ids(sets[1]),
        c: ids(sets[2]),
        seed,
        combinatorial: comb,
        algebraic: alg,
    }
}

struct Suite<'a> {
    cfg: &'a SuiteConfig,
    checks: Vec<CheckSummary>,
    failing: Vec<Failure>,
}

impl Suite<'_> {
    /// Instance seeds for one check, independent of the other checks.
    fn rng(&self, tag: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn finish(&mut self, t: Tally) {
        self.checks.push(t.summary);
    }

    fn trek_rule(&mut self) -> Result<()> {
        let mut t = Tally::new("trek_rule");
        let mut rng = self.rng(1);
        for _ in 0..self.cfg.graph_count {
            let n = rng.random_range(1..=self.cfg.max_vertices);
            let seed = rng.random();
            let g = random_graph(GraphClass::Dag, n, seed, self.cfg.edge_density);
            let p = sample_parameters(&g, seed, DEFAULT_SCALE);
            let sigma = build_covariance(&g, &p)?;
            let ctx = TrekRuleContext::from_covariance(&sigma);
            let mut bad = None;
            for i in g.vertices() {
                for j in g.vertices() {
                    let full = trek_rule_covariance(&g, &p, i, j)?;
                    let simple = simple_trek_rule_covariance(&g, &p, &ctx, i, j)?;
                    let direct = &sigma[(i.idx(), j.idx())];
                    if &full != direct || &simple != direct {
                        bad.get_or_insert((i, j, full, simple, direct.clone()));
                    }
                }
            }
            let none = VertexSet::new();
            t.record(bad.is_none(), &mut self.failing, || {
                let (i, j, full, simple, direct) = bad.clone().unwrap();
                failure(
                    "trek_rule",
                    &g,
                    [&[i].into(), &[j].into(), &none],
                    seed,
                    format!("all treks {full}, simple treks {simple}"),
                    direct.to_string(),
                )
            });
        }
        self.finish(t);
        Ok(())
    }

    fn gvl(&mut self) -> Result<()> {
        let mut t = Tally::new("gvl");
        let mut rng = self.rng(2);
        for _ in 0..self.cfg.graph_count.div_ceil(2) {
            let n = rng.random_range(1..=self.cfg.max_vertices);
            let seed = rng.random();
            let g = random_graph(GraphClass::Dag, n, seed, self.cfg.edge_density);
            let p = sample_parameters(&g, seed, DEFAULT_SCALE);
            let k = rng.random_range(1..=3.min(n));
            let r: VertexSet = sample(&mut rng, n, k).into_iter().map(VertexId::from_idx).collect();
            let s: VertexSet = sample(&mut rng, n, k).into_iter().map(VertexId::from_idx).collect();
            let (det, paths) = gvl_minor_two_ways(&g, &p, &r, &s, DEFAULT_CAP)?;
            t.record(det == paths, &mut self.failing, || {
                failure("gvl", &g, [&r, &s, &VertexSet::new()], seed, paths.to_string(), det.to_string())
            });
        }
        self.finish(t);
        Ok(())
    }

    fn cauchy_binet(&mut self) -> Result<()> {
        let mut t = Tally::new("cauchy_binet");
        let mut rng = self.rng(3);
        let max_n = self.cfg.max_vertices.min(5);
        for _ in 0..self.cfg.graph_count.div_ceil(4) {
            let n = rng.random_range(1..=max_n);
            let seed = rng.random();
            let g = random_graph(GraphClass::Dag, n, seed, self.cfg.edge_density);
            let p = sample_parameters(&g, seed, DEFAULT_SCALE);
            let k = rng.random_range(1..=3.min(n));
            let a: VertexSet = sample(&mut rng, n, k).into_iter().map(VertexId::from_idx).collect();
            let b: VertexSet = sample(&mut rng, n, k).into_iter().map(VertexId::from_idx).collect();
            let (direct, sum) = cauchy_binet_two_ways(&g, &p, &a, &b)?;
            t.record(direct == sum, &mut self.failing, || {
                failure("cauchy_binet", &g, [&a, &b, &VertexSet::new()], seed, sum.to_string(), direct.to_string())
            });
        }
        self.finish(t);
        Ok(())
    }

    /// Rank agreement for one graph class, with the per-instance flow checks
    /// collected into `menger`.
    fn rank(&mut self, name: &str, class: GraphClass, tag: u64, menger: &mut Tally) -> Result<()> {
        let mut t = Tally::new(name);
        let mut rng = self.rng(tag);
        for _ in 0..self.cfg.graph_count {
            let n = rng.random_range(1..=self.cfg.max_vertices);
            let seed = rng.random();
            let g = random_graph(class, n, seed, self.cfg.edge_density);
            let a = random_set(&mut rng, n, 3);
            let b = random_set(&mut rng, n, 3);
            let none = VertexSet::new();
            let rc = cross_check_rank(&g, &a, &b, seed, self.cfg.trials_per_instance)?;
            t.record(rc.passed(), &mut self.failing, || {
                failure(
                    name,
                    &g,
                    [&a, &b, &none],
                    seed,
                    match rc.noncrossing {
                        Some(r) => format!("min cut {}, trek systems {r}", rc.combinatorial),
                        None => format!("min cut {}", rc.combinatorial),
                    },
                    rc.oracle.to_string(),
                )
            });
            let ok = menger_check(&g, &a, &b)?;
            menger.record(ok, &mut self.failing, || {
                failure("menger", &g, [&a, &b, &none], seed, "flow/certificate mismatch".into(), String::new())
            });
        }
        self.finish(t);
        Ok(())
    }

    fn subdivision(&mut self) -> Result<()> {
        let mut t = Tally::new("subdivision");
        let mut rng = self.rng(7);
        if self.cfg.max_vertices >= 4 {
            for _ in 0..self.cfg.graph_count.div_ceil(2) {
                let n = rng.random_range(4..=self.cfg.max_vertices);
                let seed = rng.random();
                let g = random_bidirected_graph(n, seed, self.cfg.edge_density).expect("n >= 4");
                let sub = g.bidirected_subdivision();
                let a = random_set(&mut rng, n, 3);
                let b = random_set(&mut rng, n, 3);
                let trials = self.cfg.trials_per_instance;
                let comb = (generic_rank(&g, &a, &b)?, generic_rank(&sub, &a, &b)?);
                let alg = (generic_rank_oracle(&g, &a, &b, seed, trials)?, generic_rank_oracle(&sub, &a, &b, seed, trials)?);
                let ok = comb.0 == comb.1 && alg.0 == alg.1 && comb.0 == alg.0;
                t.record(ok, &mut self.failing, || {
                    failure(
                        "subdivision",
                        &g,
                        [&a, &b, &VertexSet::new()],
                        seed,
                        format!("graph {}, subdivision {}", comb.0, comb.1),
                        format!("graph {}, subdivision {}", alg.0, alg.1),
                    )
                });
            }
        }
        self.finish(t);
        Ok(())
    }

    fn dsep(&mut self) -> Result<()> {
        let mut t = Tally::new("dsep");
        let mut rng = self.rng(8);
        for _ in 0..self.cfg.graph_count {
            let n = rng.random_range(1..=self.cfg.max_vertices);
            let seed = rng.random();
            let g = random_graph(GraphClass::Dag, n, seed, self.cfg.edge_density);
            for (a, b, c) in disjoint_triples(n) {
                let classic = d_separates(&g, &a, &b, &c)?;
                let partition = d_sep_via_t_sep(&g, &a, &b, &c)?;
                let rank = ci_implied(&g, &a, &b, &c)?;
                t.record(classic == partition && partition == rank, &mut self.failing, || {
                    failure(
                        "dsep",
                        &g,
                        [&a, &b, &c],
                        seed,
                        format!("classic {classic}, partition {partition}"),
                        format!("rank test {rank}"),
                    )
                });
            }
        }
        self.finish(t);
        Ok(())
    }

    fn canonical(&mut self) -> Result<()> {
        let mut t = Tally::new("canonical");
        let seed = self.cfg.seed;
        let trials = self.cfg.trials_per_instance;
        let none = VertexSet::new();
        let v = VertexId::new;

        let g = choke_graph();
        let (a, b) = choke_sets();
        let r = min_t_separator(&g, &a, &b)?;
        let oracle = generic_rank_oracle(&g, &a, &b, seed, trials)?;
        let ok = r.rank == 1 && oracle == 1 && r.certificate.size() == 1 && r.certificate.c_right.contains(&v(4));
        t.record(ok, &mut self.failing, || {
            failure("canonical", &g, [&a, &b, &none], seed, format!("{:?}", r.certificate), oracle.to_string())
        });

        let tetrad = vanishing_tetrad(&g, (v(1), v(3)), (v(4), v(5)))?;
        t.record(tetrad == Some(ChokePoint { vertex: v(4), side: Side::Right }), &mut self.failing, || {
            failure("canonical", &g, [&a, &b, &none], seed, format!("{tetrad:?}"), String::new())
        });

        let g = spider_graph();
        let (a, b) = spider_sets();
        let r = min_t_separator(&g, &a, &b)?;
        let oracle = generic_rank_oracle(&g, &a, &b, seed, trials)?;
        let seven: VertexSet = [v(7)].into();
        let hub = SeparationTriple::pair(seven.clone(), seven);
        let ok = r.rank == 2
            && oracle == 2
            && is_t_separating(&g, &a, &b, &r.certificate)?
            && is_t_separating(&g, &a, &b, &hub)?;
        t.record(ok, &mut self.failing, || {
            failure("canonical", &g, [&a, &b, &none], seed, format!("{:?}", r.certificate), oracle.to_string())
        });
        self.finish(t);
        Ok(())
    }
}

/// All `(A, B, C)` of pairwise disjoint subsets of `[n]` with
/// `1 <= #A, #B <= 2` and `#C <= 3`.
pub fn disjoint_triples(n: usize) -> Vec<(VertexSet, VertexSet, VertexSet)> {
    let mut out = Vec::new();
    // assign each vertex to none/A/B/C
    let total = 4usize.pow(n as u32);
    for code in 0..total {
        let mut sets = [VertexSet::new(), VertexSet::new(), VertexSet::new(), VertexSet::new()];
        let mut x = code;
        for i in 0..n {
            sets[x % 4].insert(VertexId::from_idx(i));
            x /= 4;
        }
        let [_, a, b, c] = sets;
        if (1..=2).contains(&a.len()) && (1..=2).contains(&b.len()) && c.len() <= 3 {
            out.push((a, b, c));
        }
    }
    out
}

/// Run every check. The report depends only on `cfg`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.check()?;
    let mut suite = Suite { cfg, checks: Vec::new(), failing: Vec::new() };
    suite.trek_rule()?;
    suite.gvl()?;
    suite.cauchy_binet()?;
    let mut menger = Tally::new("menger");
    suite.rank("rank_dag", GraphClass::Dag, 4, &mut menger)?;
    suite.rank("rank_undirected", GraphClass::Undirected, 5, &mut menger)?;
    suite.rank("rank_mixed", GraphClass::Mixed, 6, &mut menger)?;
    suite.subdivision()?;
    suite.dsep()?;
    suite.canonical()?;
    suite.finish(menger);
    Ok(SuiteReport { config: cfg.clone(), checks: suite.checks, failing: suite.failing })
}
