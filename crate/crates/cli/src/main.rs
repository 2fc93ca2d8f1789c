use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use treksep::algebra::generic_rank_oracle;
use treksep::trek::{enumerate_simple_treks, trek_monomial, DEFAULT_CAP};
use treksep::verify::{run_suite, SuiteConfig};
use treksep::{
    ci_implied, d_sep_via_t_sep, d_separates, is_t_separating, min_t_separator, parse_graph, Error, GraphClass,
    MixedGraph, SeparationTriple, VertexId, VertexSet,
};

const EXIT_FALSE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DISAGREE: u8 = 3;
const EXIT_CAP: u8 = 4;

/// Trek separation queries on mixed graphs.
#[derive(Parser)]
#[command(name = "treksep", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Output::Text, global = true)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file against the structural rules.
    Validate { graph: PathBuf },
    /// Generic rank of Σ_{A,B} with a minimum separating triple.
    Rank {
        #[command(flatten)]
        q: PairQuery,
        /// Also compute the rank from random exact covariance matrices.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        trials: u32,
    },
    /// Does (C_L, C_M, C_R) t-separate A from B?
    Tsep {
        #[command(flatten)]
        q: PairQuery,
        #[arg(long = "CL", default_value = "")]
        cl: String,
        #[arg(long = "CM", default_value = "")]
        cm: String,
        #[arg(long = "CR", default_value = "")]
        cr: String,
    },
    /// d-separation in a DAG, by path blocking and by trek separation.
    Dsep(CondQuery),
    /// Conditional independence implied by the graph, via the rank criterion.
    Ci(CondQuery),
    /// Simple treks between two vertices with their monomials.
    Treks {
        graph: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Cross-check the combinatorial answers against the algebraic oracle.
    Verify {
        #[arg(long, default_value_t = SuiteConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = SuiteConfig::default().graph_count)]
        graphs: usize,
        #[arg(long, default_value_t = SuiteConfig::default().max_vertices)]
        max_vertices: usize,
        #[arg(long, default_value_t = SuiteConfig::default().trials_per_instance)]
        trials: u32,
        #[arg(long, default_value_t = SuiteConfig::default().edge_density)]
        density: f64,
    },
}

#[derive(Args)]
struct PairQuery {
    graph: PathBuf,
    /// Comma-separated vertex ids.
    #[arg(long = "A")]
    a: String,
    #[arg(long = "B")]
    b: String,
}

#[derive(Args)]
struct CondQuery {
    #[command(flatten)]
    q: PairQuery,
    #[arg(long = "C", default_value = "")]
    c: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn read_graph(path: &PathBuf) -> Result<MixedGraph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(parse_graph(&text)?)
}

fn parse_set(g: &MixedGraph, text: &str, name: &str) -> Result<VertexSet, Failure> {
    let mut out = VertexSet::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let id: usize = part.parse().map_err(|_| input_error(format!("--{name}: not a vertex id: {part:?}")))?;
        if id == 0 || id > g.m() {
            return Err(input_error(format!("--{name}: vertex {id} out of range 1..={}", g.m())));
        }
        out.insert(VertexId::new(id));
    }
    Ok(out)
}

fn load_pair(q: &PairQuery) -> Result<(MixedGraph, VertexSet, VertexSet), Failure> {
    let g = read_graph(&q.graph)?;
    let a = parse_set(&g, &q.a, "A")?;
    let b = parse_set(&g, &q.b, "B")?;
    if a.is_empty() || b.is_empty() {
        return Err(input_error("--A and --B must be nonempty"));
    }
    Ok((g, a, b))
}

fn fmt_set(s: &VertexSet) -> String {
    let ids: Vec<String> = s.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

fn ids(s: &VertexSet) -> Vec<usize> {
    s.iter().map(|v| v.get()).collect()
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict(b: bool) -> u8 {
    if b {
        0
    } else {
        EXIT_FALSE
    }
}

fn validate(path: &PathBuf, out: Output) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let violations: Vec<String> = match parse_graph(&text) {
        Ok(_) => Vec::new(),
        Err(Error::Invalid(v)) => v.iter().map(|x| x.to_string()).collect(),
        Err(e) => return Err(e.into()),
    };
    if out == Output::Json {
        #[derive(Serialize)]
        struct Report<'a> {
            valid: bool,
            violations: &'a [String],
        }
        print_json(&Report { valid: violations.is_empty(), violations: &violations });
    } else {
        for v in &violations {
            println!("{v}");
        }
    }
    Ok(verdict(violations.is_empty()))
}

#[derive(Serialize)]
struct CertificateJson {
    cl: Vec<usize>,
    cm: Vec<usize>,
    cr: Vec<usize>,
}

impl From<&SeparationTriple> for CertificateJson {
    fn from(c: &SeparationTriple) -> Self {
        CertificateJson { cl: ids(&c.c_left), cm: ids(&c.c_mid), cr: ids(&c.c_right) }
    }
}

#[derive(Serialize)]
struct RankJson {
    rank: usize,
    certificate: CertificateJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agrees: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn rank(q: &PairQuery, oracle: bool, seed: u64, trials: u32, out: Output) -> Outcome {
    let (g, a, b) = load_pair(q)?;
    let r = min_t_separator(&g, &a, &b)?;
    let oracle_rank = if oracle { Some(generic_rank_oracle(&g, &a, &b, seed, trials)?) } else { None };
    let agrees = oracle_rank.map(|o| o == r.rank);
    if out == Output::Json {
        print_json(&RankJson {
            rank: r.rank,
            certificate: (&r.certificate).into(),
            oracle_rank,
            agrees,
            seed: oracle.then_some(seed),
        });
    } else {
        let c = &r.certificate;
        println!(
            "rank {}; C_L={} C_M={} C_R={}",
            r.rank,
            fmt_set(&c.c_left),
            fmt_set(&c.c_mid),
            fmt_set(&c.c_right)
        );
        if g.class() == GraphClass::Dag {
            let (c_a, c_b) = c.dag_pair();
            println!("pair C_A={} C_B={}", fmt_set(&c_a), fmt_set(&c_b));
        }
        if let Some(o) = oracle_rank {
            println!("oracle rank {o} (seed {seed}, {trials} trials); {}", if o == r.rank { "agrees" } else { "DISAGREES" });
        }
    }
    Ok(if agrees == Some(false) { EXIT_DISAGREE } else { 0 })
}

fn tsep(q: &PairQuery, cl: &str, cm: &str, cr: &str, out: Output) -> Outcome {
    let (g, a, b) = load_pair(q)?;
    let c = SeparationTriple::new(parse_set(&g, cl, "CL")?, parse_set(&g, cm, "CM")?, parse_set(&g, cr, "CR")?);
    let sep = is_t_separating(&g, &a, &b, &c)?;
    if out == Output::Json {
        print_json(&serde_json::json!({ "separates": sep }));
    } else {
        println!("{}", yes_no(sep));
    }
    Ok(verdict(sep))
}

fn load_cond(q: &CondQuery) -> Result<(MixedGraph, VertexSet, VertexSet, VertexSet), Failure> {
    let (g, a, b) = load_pair(&q.q)?;
    let c = parse_set(&g, &q.c, "C")?;
    if !a.is_disjoint(&b) || !a.is_disjoint(&c) || !b.is_disjoint(&c) {
        return Err(input_error("--A, --B and --C must be pairwise disjoint"));
    }
    Ok((g, a, b, c))
}

fn dsep(q: &CondQuery, out: Output) -> Outcome {
    let (g, a, b, c) = load_cond(q)?;
    let classic = d_separates(&g, &a, &b, &c)?;
    let partition = d_sep_via_t_sep(&g, &a, &b, &c)?;
    if out == Output::Json {
        print_json(&serde_json::json!({ "classic": classic, "partition": partition, "agrees": classic == partition }));
    } else {
        println!("{}/{}", yes_no(classic), yes_no(partition));
    }
    Ok(if classic != partition { EXIT_DISAGREE } else { verdict(classic) })
}

fn ci(q: &CondQuery, out: Output) -> Outcome {
    let (g, a, b, c) = load_cond(q)?;
    let implied = ci_implied(&g, &a, &b, &c)?;
    if out == Output::Json {
        print_json(&serde_json::json!({ "implied": implied }));
    } else {
        println!("{}", yes_no(implied));
    }
    Ok(verdict(implied))
}

fn treks(path: &PathBuf, i: usize, j: usize, cap: usize, out: Output) -> Outcome {
    let g = read_graph(path)?;
    for v in [i, j] {
        if v == 0 || v > g.m() {
            return Err(input_error(format!("vertex {v} out of range 1..={}", g.m())));
        }
    }
    let (i, j) = (VertexId::new(i), VertexId::new(j));
    let list = enumerate_simple_treks(&g, i, j, cap)?;
    let rows: Vec<(String, String)> =
        list.iter().map(|t| (t.to_string(), trek_monomial(&g, t).to_string())).collect();
    if out == Output::Json {
        let v: Vec<_> = rows.iter().map(|(t, m)| serde_json::json!({ "trek": t, "monomial": m })).collect();
        print_json(&v);
    } else {
        for (t, m) in &rows {
            println!("{t}\t{m}");
        }
    }
    Ok(0)
}

fn verify(cfg: SuiteConfig, out: Output) -> Outcome {
    let report = run_suite(&cfg)?;
    if out == Output::Json {
        print_json(&report);
    } else {
        println!("seed {}", cfg.seed);
        for c in &report.checks {
            println!("{:<16} {}/{}", c.name, c.passes, c.total());
        }
        for f in &report.failing {
            println!("FAIL {} A={:?} B={:?} C={:?} seed {}: {} vs {}", f.check, f.a, f.b, f.c, f.seed, f.combinatorial, f.algebraic);
            print!("{}", f.graph);
        }
    }
    Ok(verdict(report.total_failures() == 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.output;
    let result = match &cli.command {
        Command::Validate { graph } => validate(graph, out),
        Command::Rank { q, oracle, seed, trials } => rank(q, *oracle, *seed, *trials, out),
        Command::Tsep { q, cl, cm, cr } => tsep(q, cl, cm, cr, out),
        Command::Dsep(q) => dsep(q, out),
        Command::Ci(q) => ci(q, out),
        Command::Treks { graph, i, j, cap } => treks(graph, *i, *j, *cap, out),
        Command::Verify { seed, graphs, max_vertices, trials, density } => verify(
            SuiteConfig {
                seed: *seed,
                max_vertices: *max_vertices,
                graph_count: *graphs,
                trials_per_instance: *trials,
                edge_density: *density,
            },
            out,
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
