mod records;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rayon::prelude::*;
use ssexp::calibrate::{calibrate, default_gallery, ConstantsDocument, Gallery};
use ssexp::exact::expansion_profile;
use ssexp::generate::{generate, GraphKind};
use ssexp::graph::{parse_edge_list, write_graph};
use ssexp::local::{local_ss, one_sided_params, sse_test_one_sided, LocalSsParams, TruncationRule};
use ssexp::product::{InnerFamily, ReplacementProduct, DEFAULT_INNER_DEGREE, DEFAULT_INNER_GAP};
use ssexp::rng::trial_seed;
use ssexp::tester::{derive_params, general_params, sse_test_regular, Decision};
use ssexp::walk::PaddedGraph;
use ssexp::{Graph, OracleHandle, QueryCounts};

use records::{
    line, CalibrateBody, Derived, GenerateBody, GraphDigest, LocalBody, ProfileBody, SummaryBody, TestParams,
    TrialBody,
};

const GENERATOR_PREFIX: &str = "generated by ssexp: ";

#[derive(Parser)]
#[command(name = "ssexp", version, about = "Small set expansion testers with an exact desk-scale oracle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it as an edge list.
    Generate(GenerateArgs),
    /// Run a tester for a number of seeded trials.
    Test(TestArgs),
    /// Exact k-expansion profile by exhaustive search.
    Profile(ProfileArgs),
    /// Run LocalSS from one vertex.
    Local(LocalArgs),
    /// Fit the tester constants on an instance gallery.
    Calibrate(CalibrateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    RandomRegular,
    CliqueChain,
    Star,
    Barbell,
    PlantedCut,
    Complete,
    DisjointCliques,
    RandomMultigraph,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    kind: KindArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    clique: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    bridges: Option<usize>,
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long, default_value_t = 0)]
    half_loops: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; the edge list goes to stdout and the record to stderr
    /// when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    OneSided,
    TwoSided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Walk {
    /// Replacement product; needs the rotation map.
    Product,
    /// Half-loop padding to a degree bound; adjacency lists suffice.
    Padded,
}

#[derive(Args)]
struct TestArgs {
    graph: PathBuf,
    #[arg(long)]
    mode: Mode,
    #[arg(long, default_value = "product")]
    walk: Walk,
    /// Degree bound for the padded walk; defaults to the maximum degree.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    phi: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    xi: f64,
    /// Constants document written by `calibrate`.
    #[arg(long)]
    constants: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Add wall time to every record.
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value_t = DEFAULT_INNER_DEGREE)]
    inner_degree: usize,
    #[arg(long, default_value_t = DEFAULT_INNER_GAP)]
    inner_gap: f64,
}

#[derive(Args)]
struct ProfileArgs {
    graph: PathBuf,
    #[arg(long)]
    k: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    PerVertex,
    SeedDegree,
}

#[derive(Args)]
struct LocalArgs {
    graph: PathBuf,
    #[arg(long)]
    vertex: usize,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    rounds: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value = "per-vertex")]
    rule: RuleArg,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Gallery file; the built-in gallery when omitted.
    gallery: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<ssexp::Error> for Failure {
    fn from(e: ssexp::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn input<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Input(msg.into()))
}

/// The command line as given, with the seed made explicit so that the echo
/// replays exactly.
fn echo(seed: Option<u64>) -> Vec<String> {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    if let Some(s) = seed {
        if !args.iter().any(|a| a == "--seed" || a.starts_with("--seed=")) {
            args.push("--seed".into());
            args.push(s.to_string());
        }
    }
    args
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn read_graph(path: &Path) -> CliResult<(Graph, GraphDigest)> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let g = parse_edge_list(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let generator = text
        .lines()
        .find_map(|l| l.strip_prefix("# ").and_then(|l| l.strip_prefix(GENERATOR_PREFIX)))
        .map(str::to_string);
    let digest = GraphDigest::of(&g, generator);
    Ok((g, digest))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => input("--jobs must be at least 1"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Internal(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn need(value: Option<usize>, name: &str, kind: KindArg) -> CliResult<usize> {
    value.ok_or_else(|| Failure::Input(format!("--kind {kind:?} needs --{name}").to_lowercase()))
}

fn graph_kind(a: &GenerateArgs) -> CliResult<GraphKind> {
    let k = a.kind;
    Ok(match k {
        KindArg::RandomRegular => GraphKind::RandomRegular {
            n: need(a.n, "n", k)?,
            d: need(a.d, "d", k)?,
        },
        KindArg::CliqueChain => GraphKind::CliqueChain {
            clique: need(a.clique, "clique", k)?,
            count: need(a.count, "count", k)?,
        },
        KindArg::Star => GraphKind::Star { n: need(a.n, "n", k)? },
        KindArg::Barbell => GraphKind::Barbell {
            clique: need(a.clique, "clique", k)?,
        },
        KindArg::PlantedCut => GraphKind::PlantedCut {
            clique: need(a.clique, "clique", k)?,
            bridges: need(a.bridges, "bridges", k)?,
            n: need(a.n, "n", k)?,
            d: need(a.d, "d", k)?,
        },
        KindArg::Complete => GraphKind::Complete { n: need(a.n, "n", k)? },
        KindArg::DisjointCliques => GraphKind::DisjointCliques {
            clique: need(a.clique, "clique", k)?,
            count: need(a.count, "count", k)?,
        },
        KindArg::RandomMultigraph => GraphKind::RandomMultigraph {
            n: need(a.n, "n", k)?,
            edges: need(a.edges, "edges", k)?,
            half_loops: a.half_loops,
        },
    })
}

fn cmd_generate(a: GenerateArgs, out: &mut impl Write) -> CliResult<()> {
    let seed = resolve_seed(a.seed);
    let command = echo(Some(seed));
    let kind = graph_kind(&a)?;
    let g = generate(&kind, seed)?;
    let generator = format!("{kind} seed={seed}");
    let comment = format!("{GENERATOR_PREFIX}{generator}");
    let body = GenerateBody {
        seed,
        graph: GraphDigest::of(&g, Some(generator)),
        out: a.out.as_ref().map(|p| p.display().to_string()),
    };
    let record = line(&command, "generate", body, None);
    match &a.out {
        Some(path) => {
            write_graph(path, &g, Some(&comment))?;
            writeln!(out, "{record}")?;
        }
        None => {
            write!(out, "# {comment}\n{}", g.to_edge_list())?;
            eprintln!("{record}");
        }
    }
    Ok(())
}

struct TrialResult {
    line: String,
    decision: Decision,
    queries: QueryCounts,
}

fn load_constants(path: Option<&Path>) -> CliResult<ConstantsDocument> {
    match path {
        None => Ok(ConstantsDocument::defaults()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            Ok(ConstantsDocument::from_json(&text)?)
        }
    }
}

fn cmd_test(a: TestArgs, out: &mut impl Write) -> CliResult<()> {
    let seed = resolve_seed(a.seed);
    let command = echo(Some(seed));
    let (g, digest) = read_graph(&a.graph)?;
    let mut constants = load_constants(a.constants.as_deref())?;
    constants.calibration = None;
    if a.trials == 0 {
        return input("--trials must be at least 1");
    }

    let family = match (a.mode, a.walk) {
        (Mode::TwoSided, Walk::Product) => Some(InnerFamily::for_graph(&g, a.inner_degree, a.inner_gap)?),
        _ => None,
    };
    let bound = a.bound.unwrap_or_else(|| g.max_degree().max(1));
    let (walk, derived) = match (a.mode, a.walk) {
        (Mode::TwoSided, Walk::Product) => (
            "product",
            Derived::TwoSided(general_params(g.volume(), a.k, a.eps, a.phi, &constants.two_sided)?),
        ),
        (Mode::TwoSided, Walk::Padded) => (
            "padded",
            Derived::TwoSided(derive_params(g.n() as u64, a.k, a.eps, a.phi, &constants.two_sided)?),
        ),
        (Mode::OneSided, _) => (
            "local",
            Derived::OneSided(one_sided_params(a.k, a.phi, a.eps, a.xi, &constants.one_sided)?),
        ),
    };
    let padded = PaddedGraph::new(bound)?;
    let params = TestParams {
        mode: match a.mode {
            Mode::OneSided => "one-sided",
            Mode::TwoSided => "two-sided",
        },
        walk,
        k: a.k,
        phi: a.phi,
        eps: a.eps,
        xi: (a.mode == Mode::OneSided).then_some(a.xi),
        constants: constants.clone(),
        derived: derived.clone(),
    };

    let run = |t: u64| -> CliResult<TrialResult> {
        let start = Instant::now();
        let ts = trial_seed(seed, t);
        let body = |verdict| TrialBody {
            seed,
            trial: t,
            trial_seed: ts,
            graph: &digest,
            params: &params,
            verdict,
        };
        let wall = || a.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
        let (line, decision, queries) = match (&derived, &family) {
            (Derived::TwoSided(p), Some(fam)) => {
                let mut o = OracleHandle::rotation_map(&g);
                let v = sse_test_regular(&ReplacementProduct::new(fam), &mut o, p, ts)?;
                let (d, q) = (v.decision, v.stats.queries);
                (line(&command, "trial", body(serde_json::to_value(&v).unwrap()), wall()), d, q)
            }
            (Derived::TwoSided(p), None) => {
                let mut o = OracleHandle::adjacency_list(&g);
                let v = sse_test_regular(&padded, &mut o, p, ts)?;
                let (d, q) = (v.decision, v.stats.queries);
                (line(&command, "trial", body(serde_json::to_value(&v).unwrap()), wall()), d, q)
            }
            (Derived::OneSided(_), _) => {
                let mut o = OracleHandle::adjacency_list(&g);
                let c = &constants.one_sided;
                let v = sse_test_one_sided(&mut o, a.k, a.phi, a.eps, a.xi, c, ts)?;
                let (d, q) = (v.decision, v.stats.queries);
                (line(&command, "trial", body(serde_json::to_value(&v).unwrap()), wall()), d, q)
            }
        };
        Ok(TrialResult {
            line,
            decision,
            queries,
        })
    };

    let start = Instant::now();
    let results: Vec<CliResult<TrialResult>> =
        with_jobs(a.jobs, || (0..a.trials).into_par_iter().map(run).collect())?;
    let mut accepts = 0;
    let mut queries = QueryCounts::default();
    for r in results {
        let r = r?;
        writeln!(out, "{}", r.line)?;
        accepts += u64::from(r.decision == Decision::Accept);
        queries += r.queries;
    }
    let rejects = a.trials - accepts;
    let summary = SummaryBody {
        seed,
        graph: &digest,
        params: &params,
        trials: a.trials,
        accepts,
        rejects,
        accept_rate: accepts as f64 / a.trials as f64,
        reject_rate: rejects as f64 / a.trials as f64,
        queries,
    };
    let wall = a.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    writeln!(out, "{}", line(&command, "summary", summary, wall))?;
    Ok(())
}

fn ratio_text(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn cmd_profile(a: ProfileArgs, out: &mut impl Write) -> CliResult<()> {
    let command = echo(None);
    let (g, digest) = read_graph(&a.graph)?;
    let p = expansion_profile(&g, a.k)?;
    let body = ProfileBody {
        graph: digest,
        k: a.k,
        value: p.value().map(ratio_text),
        message: p.minimum.is_none().then_some("no feasible set"),
        witness: p.minimum,
    };
    writeln!(out, "{}", line(&command, "profile", body, None))?;
    Ok(())
}

fn cmd_local(a: LocalArgs, out: &mut impl Write) -> CliResult<()> {
    let command = echo(None);
    let (g, digest) = read_graph(&a.graph)?;
    if a.vertex >= g.n() {
        return input(format!("vertex {} is out of range for n = {}", a.vertex, g.n()));
    }
    let params = LocalSsParams {
        rounds: a.rounds,
        delta: a.delta,
        rule: match a.rule {
            RuleArg::PerVertex => TruncationRule::PerVertex,
            RuleArg::SeedDegree => TruncationRule::SeedDegree,
        },
    };
    let mut o = OracleHandle::adjacency_list(&g);
    let r = local_ss(&mut o, a.vertex, &params, a.k)?;
    let body = LocalBody {
        graph: digest,
        vertex: a.vertex,
        k: a.k,
        params,
        best: r.best,
        best_round: r.best_round,
        rounds_swept: r.rounds_swept,
        queries: o.counts(),
    };
    writeln!(out, "{}", line(&command, "local", body, None))?;
    Ok(())
}

fn cmd_calibrate(a: CalibrateArgs, out: &mut impl Write) -> CliResult<()> {
    let command = echo(None);
    let (gallery, name) = match &a.gallery {
        None => (default_gallery(), "built-in".to_string()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            (Gallery::from_json(&text)?, p.display().to_string())
        }
    };
    let doc = with_jobs(a.jobs, || calibrate(&gallery))??;
    let text = serde_json::to_string_pretty(&doc).expect("constants serialize");
    fs::write(&a.out, format!("{text}\n"))?;
    let body = CalibrateBody {
        gallery: name,
        out: a.out.display().to_string(),
        document: &doc,
    };
    writeln!(out, "{}", line(&command, "calibrate", body, None))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a, &mut out),
        Command::Test(a) => cmd_test(a, &mut out),
        Command::Profile(a) => cmd_profile(a, &mut out),
        Command::Local(a) => cmd_local(a, &mut out),
        Command::Calibrate(a) => cmd_calibrate(a, &mut out),
    };
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(Failure::Input(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        (Err(Failure::Internal(msg)), _) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
        (Ok(()), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
