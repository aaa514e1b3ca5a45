//! `eikonal` command-line driver.
//!
//! Every failure exits nonzero and writes one JSON object
//! `{"error": ..., "message": ...}` to stderr. Set `EIKONAL_THREADS` to cap
//! the worker pool.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use graph_eikonal::config::{BenchConfig, ExperimentConfig};
use graph_eikonal::euclid::{convergence_table, kappa_scale, uniform_random_error, GridKind};
use graph_eikonal::io::{
    format_g12, parse_edge_list, parse_node_list, parse_point_csv, parse_trust_edges, write_named_arrival_csv,
    write_label_csv, IdTable,
};
use graph_eikonal::labelprop::{accuracy, classify, knn_graph, sample_seeds, two_moons, KnnWeight, LabeledSeedSets};
use graph_eikonal::pathset::{equivalence_report, fixtures, OracleCaps};
use graph_eikonal::trust::{inject_sybil_cluster, neighbor_average, rank_candidates, CategoryMap};
use graph_eikonal::{solve, Error, Exponent, Graph, ProblemSpec};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "EIKONAL_THREADS";

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
/// A verification (oracle-check) ran but found a mismatch.
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "eikonal", version, about = "Front propagation on weighted directed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for arrival times and write them as CSV.
    Solve(SolveArgs),
    /// Compare the brute-force path-set and value-iteration references with the front solver.
    OracleCheck(OracleArgs),
    /// Convergence errors on regular grids (and optionally random graphs).
    GridBench(BenchArgs),
    /// Rank candidates by distrust arrival time from a team.
    TrustRank(TrustArgs),
    /// Label nodes by the earliest of competing fronts.
    Classify(ClassifyArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Edge list `src,dst,weight`.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    graph: Option<PathBuf>,
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated boundary nodes (value 0).
    #[arg(long, required_unless_present = "config")]
    source: Option<String>,
    /// Exponent: a number >= 1, a fraction like 3/2, or `inf`. Overrides the config.
    #[arg(long)]
    p: Option<Exponent>,
    /// Constant slowness for every node.
    #[arg(long)]
    slowness: Option<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Built-in graph: path, diamond or grid3.
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    fixture: Option<String>,
    #[arg(long, requires = "source")]
    graph: Option<PathBuf>,
    #[arg(long)]
    source: Option<String>,
    #[arg(long, default_value_t = 64)]
    max_paths: usize,
    #[arg(long, default_value_t = 1 << 16)]
    max_subsets: usize,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// JSON bench config; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid kind (square, triangular, hexagonal, rhombus); repeatable.
    #[arg(long = "kind")]
    kinds: Vec<GridKind>,
    /// Grid spacing; repeatable.
    #[arg(long = "h")]
    hs: Vec<f64>,
    #[arg(long)]
    p: Option<Exponent>,
    #[arg(long)]
    probe_seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrustArgs {
    /// Trust edges `truster,trustee,rating` (number or category name).
    #[arg(long)]
    trust: PathBuf,
    #[arg(long)]
    team: String,
    /// Defaults to every node outside the team.
    #[arg(long)]
    candidates: Option<String>,
    #[arg(long, default_value = "1")]
    p: Exponent,
    /// Attach a cluster before ranking: `target,size,rating`.
    #[arg(long)]
    sybil: Option<String>,
    /// JSON object mapping category names to ratings.
    #[arg(long)]
    categories: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Point CSV, one point per row.
    #[arg(long, conflicts_with_all = ["graph", "two_moons"])]
    points: Option<PathBuf>,
    /// The last column of --points holds ground-truth labels.
    #[arg(long)]
    labeled: bool,
    /// Precomputed edge list instead of points.
    #[arg(long, conflicts_with = "two_moons")]
    graph: Option<PathBuf>,
    /// Generate the two-moons data set.
    #[arg(long)]
    two_moons: bool,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    dim: usize,
    /// Noise variance per coordinate.
    #[arg(long, default_value_t = 0.02)]
    noise: f64,
    #[arg(long, default_value_t = 7)]
    data_seed: u64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// zp, inverse, exp:C or dmax:C.
    #[arg(long, default_value = "zp")]
    weight: String,
    /// Seed sets per label, `;`-separated lists of nodes: `0,4;7,9`.
    #[arg(long, conflicts_with = "per_label")]
    seeds: Option<String>,
    /// Draw this many seeds per ground-truth class.
    #[arg(long)]
    per_label: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "1")]
    p: Exponent,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Failure carrying an exit code.
struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        Failure { code: EXIT_FAILURE, kind, message: e.to_string() }
    }
}

fn fail(kind: &str, message: impl Into<String>) -> Failure {
    Failure { code: EXIT_FAILURE, kind: kind.to_string(), message: message.into() }
}

type CmdResult = Result<(), Failure>;

/// Runs the CLI with process stdio.
pub fn run_command<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to the given streams; returns the exit status.
pub fn run_with_io<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.render().to_string();
            let _ = writeln!(err, "{}", error_json("usage", msg.trim()));
            return EXIT_USAGE;
        }
    };
    init_threads();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::OracleCheck(a) => cmd_oracle(a, out),
        Command::GridBench(a) => cmd_bench(a, out),
        Command::TrustRank(a) => cmd_trust(a, out),
        Command::Classify(a) => cmd_classify(a, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", error_json(&f.kind, &f.message));
            f.code
        }
    }
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // A pool may already exist when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail("Io", format!("cannot read {}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| fail("Io", format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| fail("Io", e.to_string())),
    }
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> CmdResult {
    let (graph, mut spec, ids) = if let Some(cfg_path) = &a.config {
        let cfg = ExperimentConfig::from_json(&read(cfg_path)?)?;
        let base = cfg_path.parent().unwrap_or(Path::new("."));
        let r = cfg.resolve(base)?;
        (r.graph, r.spec, r.ids)
    } else {
        let path = a.graph.as_deref().expect("clap enforces --graph");
        let (graph, ids) = parse_edge_list(&read(path)?)?;
        let sources = parse_node_list(a.source.as_deref().unwrap_or(""), &ids)?;
        let spec = ProblemSpec::unit(graph.node_count(), &sources, a.p.unwrap_or(Exponent::TWO))?;
        (graph, spec, ids)
    };
    if let Some(p) = a.p {
        spec = spec.with_p(p);
    }
    if let Some(s) = a.slowness {
        spec = spec.with_slowness(vec![s; graph.node_count()])?;
    }
    let field = solve(&graph, &spec)?;
    let names = (!ids.is_numeric()).then_some(&ids);
    emit(&write_named_arrival_csv(&field, names), a.output.as_deref(), out)
}

fn cmd_oracle(a: OracleArgs, out: &mut dyn Write) -> CmdResult {
    let (graph, sources): (Graph, Vec<usize>) = match (&a.fixture, &a.graph) {
        (Some(name), _) => {
            let (g, x0, _) =
                fixtures::by_name(name).ok_or_else(|| fail("InvalidInput", format!("unknown fixture {name:?}")))?;
            (g, vec![x0])
        }
        (None, Some(path)) => {
            let (g, ids) = parse_edge_list(&read(path)?)?;
            let s = parse_node_list(a.source.as_deref().unwrap_or(""), &ids)?;
            (g, s)
        }
        (None, None) => unreachable!("clap enforces a graph"),
    };
    let spec = ProblemSpec::unit(graph.node_count(), &sources, Exponent::TWO)?;
    let exponents = [
        Exponent::ONE,
        Exponent::new(1.5).expect("valid"),
        Exponent::TWO,
        Exponent::new(3.0).expect("valid"),
        Exponent::Infinity,
    ];
    let caps = OracleCaps { max_paths: a.max_paths, max_subsets: a.max_subsets };
    let report = equivalence_report(&graph, &spec, &exponents, caps)?;
    let mut text = String::new();
    for line in &report {
        writeln!(text, "{line}").expect("String write");
    }
    emit(&text, None, out)?;
    if report.iter().all(|l| l.pass) {
        Ok(())
    } else {
        Err(Failure { code: EXIT_MISMATCH, kind: "Mismatch".into(), message: "oracle and solver disagree".into() })
    }
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> CmdResult {
    let mut cfg = match &a.config {
        Some(p) => BenchConfig::from_json(&read(p)?)?,
        None => BenchConfig::default(),
    };
    if !a.kinds.is_empty() {
        cfg.kinds = a.kinds.clone();
    }
    if !a.hs.is_empty() {
        cfg.hs = a.hs.clone();
    }
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if let Some(s) = a.probe_seed {
        cfg.probes.seed = s;
    }
    let rows = convergence_table(&cfg.kinds, &cfg.hs, cfg.p, cfg.probes)?;
    let mut text = String::from("kind,h,scale,nodes,error\n");
    for r in rows {
        writeln!(text, "{},{},{},{},{}", r.kind.short_name(), r.h, format_g12(r.scale), r.nodes, format_g12(r.error))
            .expect("String write");
    }
    for &m in &cfg.uniform_m {
        let row = uniform_random_error(m, cfg.uniform_realisations, cfg.uniform_seed, cfg.p, cfg.probes)?;
        let spacing = 4.0 / (m as f64).sqrt() / 2f64.sqrt();
        writeln!(
            text,
            "U,{},{},{},{}",
            format_g12(spacing),
            format_g12(kappa_scale(row.mean_degree)),
            m,
            format_g12(row.error)
        )
        .expect("String write");
    }
    emit(&text, a.output.as_deref(), out)
}

fn parse_sybil(spec: &str, ids: &IdTable) -> Result<(usize, usize, f64), Failure> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(fail("InvalidInput", "--sybil expects target,size,rating"));
    }
    let target = ids.resolve(parts[0])?;
    let size = parts[1].parse().map_err(|_| fail("InvalidInput", format!("bad cluster size {:?}", parts[1])))?;
    let rating = parts[2].parse().map_err(|_| fail("InvalidInput", format!("bad rating {:?}", parts[2])))?;
    Ok((target, size, rating))
}

fn cmd_trust(a: TrustArgs, out: &mut dyn Write) -> CmdResult {
    let categories = match &a.categories {
        Some(p) => CategoryMap(serde_json::from_str(&read(p)?).map_err(|e| fail("Config", e.to_string()))?),
        None => CategoryMap::default(),
    };
    let (mut tg, ids) = parse_trust_edges(&read(&a.trust)?, &categories)?;
    let team = parse_node_list(&a.team, &ids)?;
    let candidates = match &a.candidates {
        Some(list) => parse_node_list(list, &ids)?,
        None => (0..tg.node_count()).filter(|v| !team.contains(v)).collect(),
    };
    if let Some(s) = &a.sybil {
        let (target, size, rating) = parse_sybil(s, &ids)?;
        tg = inject_sybil_cluster(&tg, target, size, rating)?;
    }
    let ranking = rank_candidates(&tg, &team, &candidates, a.p)?;
    let mut text = String::from("rank,node,arrival_time,neighbor_average\n");
    for e in &ranking.entries {
        let avg = neighbor_average(&tg, e.node).map_or_else(|_| "nan".to_string(), format_g12);
        writeln!(text, "{},{},{},{avg}", e.rank, ids.name(e.node), format_g12(e.score)).expect("String write");
    }
    emit(&text, a.output.as_deref(), out)
}

fn parse_weight(s: &str) -> Result<KnnWeight, Failure> {
    let (name, arg) = match s.split_once(':') {
        Some((n, v)) => {
            let c: f64 = v.parse().map_err(|_| fail("InvalidInput", format!("bad weight constant {v:?}")))?;
            (n, Some(c))
        }
        None => (s, None),
    };
    match (name, arg) {
        ("zp", None) => Ok(KnnWeight::ZpScaled),
        ("inverse", None) => Ok(KnnWeight::InverseDistance),
        ("exp", Some(c)) => Ok(KnnWeight::ExpScaled(c)),
        ("dmax", c) => Ok(KnnWeight::DmaxScaled(c.unwrap_or(100.0))),
        _ => Err(fail("InvalidInput", format!("unknown weight {s:?}"))),
    }
}

fn cmd_classify(a: ClassifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (graph, ids, truth) = if let Some(path) = &a.graph {
        let (g, ids) = parse_edge_list(&read(path)?)?;
        (g, Some(ids), None)
    } else {
        let cloud = if a.two_moons {
            two_moons(a.n, a.dim, a.noise, a.data_seed)?
        } else {
            let path = a.points.as_ref().ok_or_else(|| fail("InvalidInput", "one of --points, --graph, --two-moons is required"))?;
            parse_point_csv(&read(path)?, a.labeled)?
        };
        let g = knn_graph(&cloud, a.k, parse_weight(&a.weight)?)?;
        (g, None, cloud.labels().map(<[usize]>::to_vec))
    };
    let seeds = match (&a.seeds, a.per_label) {
        (Some(s), _) => {
            let table = ids.clone().unwrap_or_else(|| IdTable::identity(graph.node_count()));
            let sets = s.split(';').map(|part| parse_node_list(part, &table)).collect::<Result<Vec<_>, _>>()?;
            LabeledSeedSets::new(sets)?
        }
        (None, Some(k)) => {
            let t = truth.as_deref().ok_or_else(|| fail("InvalidInput", "--per-label needs ground-truth labels"))?;
            sample_seeds(t, k, a.seed)?
        }
        (None, None) => return Err(fail("InvalidInput", "give --seeds or --per-label")),
    };
    let result = classify(&graph, &seeds, a.p)?;
    emit(&write_label_csv(ids.as_ref(), &result.labels, &result.ties), a.output.as_deref(), out)?;
    if let Some(t) = &truth {
        let acc = accuracy(&result.labels, t, &seeds)?;
        let line = format!("accuracy,{}", format_g12(acc));
        // Keep stdout a clean CSV when it carries the labels.
        let sink: &mut dyn Write = if a.output.is_some() { out } else { err };
        writeln!(sink, "{line}").map_err(|e| fail("Io", e.to_string()))?;
    }
    Ok(())
}
