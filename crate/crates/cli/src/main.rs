//! `rigidlab` — one binary driving the exact-algebra, rigidity, numeric, and
//! census layers; every subcommand emits a JSON report carrying a run
//! manifest, or the same content flattened as text.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rigidlab_core::census::{self, PointSet, ScalingGenerator};
use rigidlab_core::exactpoly::{MonomialOrder, Polynomial, VarTable};
use rigidlab_core::geometry::{self, Configuration, GeometryError};
use rigidlab_core::groebner::{self, GroebnerError, GroebnerLimits};
use rigidlab_core::numeric::{self, CollapseTarget, NewtonSolver, NumericError, SolveResult};
use rigidlab_core::rigidity::{self, RigidityError};
use rigidlab_core::rng::SplitMix64;
use rigidlab_core::varieties::{
    self, ConstraintSystem, Graph, GraphError, Pinning, VarietiesError, VerifyMode,
};

#[derive(Parser)]
#[command(name = "rigidlab", version, about = "exact and numeric planar rigidity toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// write the report to this file instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// exact Cayley-Menger determinant and Gram realizability of a point set
    Cm(CmArgs),
    /// Laman count and pebble-game sparsity check
    Laman(LamanArgs),
    /// rigidity-matrix rank, generic or at a given embedding
    Rank(RankArgs),
    /// pinned unit-length constraint system of a graph
    System(SystemArgs),
    /// reduced Groebner basis of an ideal file
    Groebner(GroebnerArgs),
    /// elimination ideal after dropping variables
    Eliminate(EliminateArgs),
    /// check the degree-5 flatness identity for a shared-neighbor pair
    #[command(name = "verify-eq1")]
    VerifyEq1(VerifyArgs),
    /// Newton-solve the unit system from seeded random starts
    Solve(SolveArgs),
    /// local dimension of the solution variety at a converged solve
    Dim(SolveArgs),
    /// repeated randomized solves classified by neighbor degeneracy
    Collapse(CollapseArgs),
    /// sample the flatness curve at a fixed x2
    Curve(CurveArgs),
    /// count unit-distance pairs of a generated or loaded point set
    Census(CensusArgs),
    /// unit-pair growth table over increasing sizes
    Scaling(ScalingArgs),
}

#[derive(Args)]
struct CmArgs {
    /// point file, one "x y" pair per line, '#' comments
    #[arg(long)]
    points: PathBuf,
    /// zero-based point indices to keep (default: all)
    #[arg(long, value_delimiter = ',')]
    subset: Vec<usize>,
    /// ambient dimension for the Gram realizability check
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// relative eigenvalue tolerance for the Gram check
    #[arg(long, default_value_t = geometry::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct LamanArgs {
    /// graph JSON file or builtin:{k33,k44,triangle,c4,moser}
    #[arg(long)]
    graph: String,
}

#[derive(Args)]
struct RankArgs {
    /// graph JSON file or builtin:{k33,k44,triangle,c4,moser}
    #[arg(long)]
    graph: String,
    /// embedding point file (default: random generic embeddings)
    #[arg(long)]
    points: Option<PathBuf>,
    /// random embeddings to try in generic mode
    #[arg(long, default_value_t = rigidity::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SystemArgs {
    /// graph JSON file or builtin:{k33,k44,triangle,c4,moser}
    #[arg(long)]
    graph: String,
    /// origin and axis vertices, e.g. --pin u1,u2 (default: first two)
    #[arg(long, value_delimiter = ',')]
    pin: Option<Vec<String>>,
}

#[derive(Args)]
struct GroebnerArgs {
    /// ideal file: `vars: x y ...` then one polynomial per line
    #[arg(long)]
    ideal: PathBuf,
    #[arg(long, value_enum, default_value_t = OrderArg::Grevlex)]
    order: OrderArg,
    /// S-pair budget (overrides RIGIDLAB_LIMITS and the default)
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct EliminateArgs {
    /// ideal file: `vars: x y ...` then one polynomial per line
    #[arg(long)]
    ideal: PathBuf,
    /// variables to eliminate
    #[arg(long, value_delimiter = ',', required = true)]
    drop: Vec<String>,
    /// S-pair budget (overrides RIGIDLAB_LIMITS and the default)
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Factorization)]
    mode: ModeArg,
    /// S-pair budget (overrides RIGIDLAB_LIMITS and the default)
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    /// graph JSON file or builtin:{k33,k44,triangle,c4,moser}
    #[arg(long)]
    graph: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// random starts to try before reporting failure
    #[arg(long, default_value_t = 20)]
    attempts: usize,
    #[arg(long, default_value_t = numeric::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = numeric::DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Args)]
struct CollapseArgs {
    #[arg(long, value_enum, default_value_t = TargetArg::K33)]
    target: TargetArg,
    #[arg(long, default_value_t = 100)]
    attempts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// distance below which two solved points count as merged
    #[arg(long, default_value_t = numeric::DEFAULT_MERGE_TOL)]
    merge_tol: f64,
}

#[derive(Args)]
struct CurveArgs {
    /// base separation, must satisfy 0 < |x2| < 2
    #[arg(long)]
    x2: f64,
    /// grid resolution along x3
    #[arg(long, default_value_t = 100)]
    count: usize,
}

#[derive(Args)]
struct CensusArgs {
    /// point-set family to generate (omit when using --points)
    #[arg(long, value_enum)]
    generator: Option<GeneratorArg>,
    /// point file to count instead of generating
    #[arg(long)]
    points: Option<PathBuf>,
    /// lattice grid side
    #[arg(long)]
    side: Option<u32>,
    /// integer squared radius mapped to distance 1
    #[arg(long)]
    radius_sq: Option<u32>,
    /// total points for the lines and random generators
    #[arg(long)]
    n: Option<u32>,
    /// number of lines
    #[arg(long)]
    k: Option<u32>,
    /// deterministic line layout instead of seeded angles
    #[arg(long, default_value_t = false)]
    deterministic: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// slack on the squared distance, within [0, 0.1]
    #[arg(long, default_value_t = census::DEFAULT_EPS)]
    eps: f64,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long, value_enum)]
    generator: GeneratorArg,
    /// ascending sizes: lattice sides, or point counts for lines/random
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<u32>,
    /// integer squared radius mapped to distance 1
    #[arg(long)]
    radius_sq: Option<u32>,
    /// number of lines
    #[arg(long)]
    k: Option<u32>,
    /// deterministic line layout instead of seeded angles
    #[arg(long, default_value_t = false)]
    deterministic: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// slack on the squared distance, within [0, 0.1]
    #[arg(long, default_value_t = census::DEFAULT_EPS)]
    eps: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Lex,
    Grevlex,
}

impl OrderArg {
    fn order(self) -> MonomialOrder {
        match self {
            OrderArg::Lex => MonomialOrder::Lex,
            OrderArg::Grevlex => MonomialOrder::Grevlex,
        }
    }

    fn label(self) -> &'static str {
        match self {
            OrderArg::Lex => "lex",
            OrderArg::Grevlex => "grevlex",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Factorization,
    Membership,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    K33,
    K44,
    Triangle,
}

impl TargetArg {
    fn target(self) -> CollapseTarget {
        match self {
            TargetArg::K33 => CollapseTarget::K33,
            TargetArg::K44 => CollapseTarget::K44,
            TargetArg::Triangle => CollapseTarget::Triangle,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum GeneratorArg {
    Lattice,
    Lines,
    Random,
}

impl GeneratorArg {
    fn label(self) -> &'static str {
        match self {
            GeneratorArg::Lattice => "lattice",
            GeneratorArg::Lines => "lines",
            GeneratorArg::Random => "random",
        }
    }
}

/// Usage problems exit 2, exhausted resource rails exit 3.
enum CliError {
    Usage(String),
    Limit(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<GroebnerError> for CliError {
    fn from(e: GroebnerError) -> CliError {
        match e {
            GroebnerError::PairLimit(_) | GroebnerError::BasisLimit(_) => {
                CliError::Limit(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<RigidityError> for CliError {
    fn from(e: RigidityError) -> CliError {
        match e {
            RigidityError::TooManyVertices { .. } => CliError::Limit(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> CliError {
        usage(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> CliError {
        usage(e.to_string())
    }
}

impl From<VarietiesError> for CliError {
    fn from(e: VarietiesError) -> CliError {
        usage(e.to_string())
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> CliError {
        usage(e.to_string())
    }
}

impl From<census::CensusError> for CliError {
    fn from(e: census::CensusError) -> CliError {
        usage(e.to_string())
    }
}

/// One subcommand's result before the manifest is attached.
struct Report {
    payload: Value,
    params: BTreeMap<String, Value>,
    seed: Option<u64>,
    /// Preformatted table used instead of flattened payload in text mode.
    text: Option<String>,
}

impl Report {
    fn new(payload: Value, params: BTreeMap<String, Value>, seed: Option<u64>) -> Report {
        Report { payload, params, seed, text: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("rigidlab: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Limit(msg)) => {
            eprintln!("rigidlab: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let (name, report) = dispatch(&cli.command)?;
    let manifest = json!({
        "subcommand": name,
        "params": report.params,
        "seed": report.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_ms": started.elapsed().as_millis() as u64,
    });
    let Value::Object(mut payload) = report.payload else {
        unreachable!("reports are JSON objects")
    };
    payload.insert("manifest".into(), manifest.clone());
    let rendered = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Value::Object(payload))
                .expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => match &report.text {
            Some(table) => {
                let mut s = table.clone();
                flatten("manifest", &manifest, &mut s);
                s
            }
            None => {
                let mut s = String::new();
                flatten("", &Value::Object(payload), &mut s);
                s
            }
        },
    };
    match &cli.output {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

/// Dotted-path "key = value" lines carrying the same numbers as the JSON.
fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                flatten(&path, val, out);
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), val, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
        leaf => out.push_str(&format!("{prefix} = {leaf}\n")),
    }
}

fn dispatch(cmd: &Command) -> Result<(&'static str, Report), CliError> {
    match cmd {
        Command::Cm(a) => Ok(("cm", cmd_cm(a)?)),
        Command::Laman(a) => Ok(("laman", cmd_laman(a)?)),
        Command::Rank(a) => Ok(("rank", cmd_rank(a)?)),
        Command::System(a) => Ok(("system", cmd_system(a)?)),
        Command::Groebner(a) => Ok(("groebner", cmd_groebner(a)?)),
        Command::Eliminate(a) => Ok(("eliminate", cmd_eliminate(a)?)),
        Command::VerifyEq1(a) => Ok(("verify-eq1", cmd_verify(a)?)),
        Command::Solve(a) => Ok(("solve", cmd_solve(a)?)),
        Command::Dim(a) => Ok(("dim", cmd_dim(a)?)),
        Command::Collapse(a) => Ok(("collapse", cmd_collapse(a)?)),
        Command::Curve(a) => Ok(("curve", cmd_curve(a)?)),
        Command::Census(a) => Ok(("census", cmd_census(a)?)),
        Command::Scaling(a) => Ok(("scaling", cmd_scaling(a)?)),
    }
}

fn load_graph(arg: &str) -> Result<Graph, CliError> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        Graph::builtin(name).ok_or_else(|| usage(format!("unknown builtin graph `{name}`")))
    } else {
        let text =
            fs::read_to_string(arg).map_err(|e| usage(format!("{arg}: {e}")))?;
        Graph::from_json(&text).map_err(|e| usage(format!("{arg}: {e}")))
    }
}

fn load_points(path: &PathBuf) -> Result<PointSet, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    PointSet::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Ideal file: comments with '#', a `vars: x y ...` header line, then one
/// polynomial per line in the shared text grammar.
fn load_ideal(path: &PathBuf) -> Result<(Arc<VarTable>, Vec<Polynomial>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut vars: Option<Arc<VarTable>> = None;
    let mut polys = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        match &vars {
            None => {
                let rest = body.strip_prefix("vars:").ok_or_else(|| {
                    usage(format!(
                        "{}:{line}: expected a `vars: x y ...` header first",
                        path.display()
                    ))
                })?;
                let names: Vec<&str> = rest
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .collect();
                let table = VarTable::new(names)
                    .map_err(|e| usage(format!("{}:{line}: {e}", path.display())))?;
                vars = Some(table);
            }
            Some(table) => {
                let p = Polynomial::parse(table, body)
                    .map_err(|e| usage(format!("{}:{line}: {e}", path.display())))?;
                polys.push(p);
            }
        }
    }
    let vars = vars.ok_or_else(|| {
        usage(format!("{}: missing `vars: x y ...` header", path.display()))
    })?;
    if polys.is_empty() {
        return Err(usage(format!("{}: no polynomials after the header", path.display())));
    }
    Ok((vars, polys))
}

/// Default limits, overridden by RIGIDLAB_LIMITS="pairs=N,basis=M", then by
/// an explicit --limit on the S-pair budget.
fn resolve_limits(flag: Option<usize>) -> Result<GroebnerLimits, CliError> {
    let mut limits = GroebnerLimits::default();
    if let Ok(spec) = std::env::var("RIGIDLAB_LIMITS") {
        for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| usage(format!("RIGIDLAB_LIMITS: expected key=value in `{part}`")))?;
            let n: usize = value.trim().parse().map_err(|_| {
                usage(format!("RIGIDLAB_LIMITS: bad count `{}`", value.trim()))
            })?;
            match key.trim() {
                "pairs" => limits.max_pairs = n,
                "basis" => limits.max_basis = n,
                other => {
                    return Err(usage(format!("RIGIDLAB_LIMITS: unknown key `{other}`")))
                }
            }
        }
    }
    if let Some(pairs) = flag {
        limits.max_pairs = pairs;
    }
    Ok(limits)
}

fn check_eps(eps: f64) -> Result<(), CliError> {
    if !(0.0..=census::MAX_EPS).contains(&eps) {
        return Err(usage(format!("--eps must lie in [0, {}], got {eps}", census::MAX_EPS)));
    }
    Ok(())
}

fn pinning_for(graph: &Graph, pin: &Option<Vec<String>>) -> Result<Pinning, CliError> {
    match pin {
        Some(ids) if ids.len() == 2 => Ok(Pinning::new(ids[0].as_str(), ids[1].as_str())?),
        Some(_) => Err(usage("--pin takes exactly two vertex ids")),
        None => Ok(Pinning::first_two(graph)?),
    }
}

/// Newton from `attempts` seeded random starts; the result of the first
/// converged attempt, or the last failed one.
fn seeded_solve(
    sys: &ConstraintSystem,
    seed: u64,
    attempts: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(SolveResult, Option<usize>), CliError> {
    if attempts == 0 {
        return Err(usage("--attempts must be at least 1"));
    }
    let solver = NewtonSolver::new(sys);
    let mut last = None;
    for attempt in 0..attempts {
        let mut rng = SplitMix64::stream(seed, attempt as u64);
        let start: Vec<f64> = (0..sys.var_count()).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let result = solver.solve(&start, tol, max_iter);
        if result.converged {
            return Ok((result, Some(attempt)));
        }
        last = Some(result);
    }
    Ok((last.expect("attempts >= 1"), None))
}

fn cmd_cm(args: &CmArgs) -> Result<Report, CliError> {
    let ps = load_points(&args.points)?;
    let pts = ps.points();
    let subset: Vec<usize> =
        if args.subset.is_empty() { (0..pts.len()).collect() } else { args.subset.clone() };
    for &i in &subset {
        if i >= pts.len() {
            return Err(usage(format!("subset index {i} out of range for {} points", pts.len())));
        }
    }
    let ids: Vec<String> = subset.iter().map(|&i| format!("p{i}")).collect();
    let selected: Vec<[f64; 2]> = subset.iter().map(|&i| pts[i]).collect();
    let config = Configuration::new(ids, selected)?;
    let dists = geometry::squared_distances(&config);
    let everything: Vec<usize> = (0..dists.n()).collect();
    let det = geometry::cm_determinant(&dists, &everything)?;
    let gram = geometry::gram_rank_check(&dists, args.dim, args.tol);

    let payload = json!({
        "points": pts.len(),
        "subset": subset,
        "determinant": det.to_string(),
        "gram": { "psd": gram.psd, "rank": gram.rank, "realizable": gram.realizable },
        "dim": args.dim,
    });
    let params = BTreeMap::from([
        ("points".into(), json!(args.points.display().to_string())),
        ("subset".into(), json!(subset)),
        ("dim".into(), json!(args.dim)),
        ("tol".into(), json!(args.tol)),
    ]);
    Ok(Report::new(payload, params, None))
}

fn cmd_laman(args: &LamanArgs) -> Result<Report, CliError> {
    let graph = load_graph(&args.graph)?;
    let count_ok = rigidity::laman_count(&graph);
    let full_ok = rigidity::laman_full(&graph)?;
    let payload = json!({ "count_ok": count_ok, "full_ok": full_ok });
    let params = BTreeMap::from([("graph".into(), json!(args.graph))]);
    Ok(Report::new(payload, params, None))
}

fn cmd_rank(args: &RankArgs) -> Result<Report, CliError> {
    let graph = load_graph(&args.graph)?;
    let n = graph.vertex_count();
    let payload = match &args.points {
        Some(path) => {
            let ps = load_points(path)?;
            if ps.len() != n {
                return Err(usage(format!(
                    "{} points given for a graph with {n} vertices",
                    ps.len()
                )));
            }
            let config = Configuration::new(graph.vertices().to_vec(), ps.points().to_vec())?;
            let m = rigidity::rigidity_matrix(&graph, &config)?;
            let rank = rigidity::matrix_rank(&m, rigidity::RANK_TOL);
            json!({ "mode": "embedding", "rank": rank, "vertices": n, "edges": graph.edge_count() })
        }
        None => {
            let rank = rigidity::generic_rank(&graph, args.trials, args.seed);
            let dof = 2 * n as i64 - 3 - rank as i64;
            json!({
                "mode": "generic",
                "rank": rank,
                "dof": dof,
                "vertices": n,
                "edges": graph.edge_count(),
            })
        }
    };
    let params = BTreeMap::from([
        ("graph".into(), json!(args.graph)),
        ("trials".into(), json!(args.trials)),
        ("points".into(), json!(args.points.as_ref().map(|p| p.display().to_string()))),
    ]);
    Ok(Report::new(payload, params, Some(args.seed)))
}

fn cmd_system(args: &SystemArgs) -> Result<Report, CliError> {
    let graph = load_graph(&args.graph)?;
    let pinning = pinning_for(&graph, &args.pin)?;
    let sys = varieties::build_unit_system(&graph, pinning)?;
    let (var_count, eq_count, slack) = varieties::laman_variable_audit(&sys);
    let payload = json!({
        "variables": sys.vars().names(),
        "equations": sys.equations().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "variable_count": var_count,
        "equation_count": eq_count,
        "slack": slack,
        "pinning": { "origin": sys.pinning().origin(), "axis": sys.pinning().axis() },
    });
    let params = BTreeMap::from([
        ("graph".into(), json!(args.graph)),
        ("origin".into(), json!(sys.pinning().origin())),
        ("axis".into(), json!(sys.pinning().axis())),
    ]);
    Ok(Report::new(payload, params, None))
}

fn cmd_groebner(args: &GroebnerArgs) -> Result<Report, CliError> {
    let (_, gens) = load_ideal(&args.ideal)?;
    let limits = resolve_limits(args.limit)?;
    let basis = groebner::buchberger(&gens, args.order.order(), limits)?;
    let payload = json!({
        "variables": basis.vars.names(),
        "order": args.order.label(),
        "basis": basis.generators.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "size": basis.generators.len(),
        "reduced": basis.reduced,
    });
    let params = BTreeMap::from([
        ("ideal".into(), json!(args.ideal.display().to_string())),
        ("order".into(), json!(args.order.label())),
        ("max_pairs".into(), json!(limits.max_pairs)),
        ("max_basis".into(), json!(limits.max_basis)),
    ]);
    Ok(Report::new(payload, params, None))
}

fn cmd_eliminate(args: &EliminateArgs) -> Result<Report, CliError> {
    let (vars, gens) = load_ideal(&args.ideal)?;
    if args.drop.len() >= vars.len() {
        return Err(usage("cannot eliminate every variable"));
    }
    let limits = resolve_limits(args.limit)?;
    let drop: Vec<&str> = args.drop.iter().map(String::as_str).collect();
    let basis = groebner::eliminate(&gens, &drop, limits)?;
    let payload = json!({
        "dropped": args.drop,
        "kept": basis.vars.names(),
        "basis": basis.generators.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "size": basis.generators.len(),
    });
    let params = BTreeMap::from([
        ("ideal".into(), json!(args.ideal.display().to_string())),
        ("drop".into(), json!(args.drop)),
        ("max_pairs".into(), json!(limits.max_pairs)),
        ("max_basis".into(), json!(limits.max_basis)),
    ]);
    Ok(Report::new(payload, params, None))
}

fn cmd_verify(args: &VerifyArgs) -> Result<Report, CliError> {
    let limits = resolve_limits(args.limit)?;
    let (mode, label) = match args.mode {
        ModeArg::Factorization => (VerifyMode::Factorization, "factorization"),
        ModeArg::Membership => (VerifyMode::Membership, "membership"),
    };
    let report = varieties::verify_eq1(mode, limits)?;
    let payload = json!({
        "mode": label,
        "holds": report.holds,
        "elimination_basis_size": report.elimination_basis_size,
    });
    let params = BTreeMap::from([
        ("mode".into(), json!(label)),
        ("max_pairs".into(), json!(limits.max_pairs)),
        ("max_basis".into(), json!(limits.max_basis)),
    ]);
    Ok(Report::new(payload, params, None))
}

fn cmd_solve(args: &SolveArgs) -> Result<Report, CliError> {
    let graph = load_graph(&args.graph)?;
    let sys = varieties::build_unit_system(&graph, Pinning::first_two(&graph)?)?;
    let (result, attempt) = seeded_solve(&sys, args.seed, args.attempts, args.tol, args.max_iter)?;
    let mut payload = json!({
        "converged": result.converged,
        "attempt": attempt,
        "residual": result.residual,
        "iterations": result.iterations,
    });
    if let Some(config) = &result.config {
        let values: BTreeMap<&str, f64> = sys
            .vars()
            .names()
            .iter()
            .map(String::as_str)
            .zip(result.values.iter().copied())
            .collect();
        payload["values"] = json!(values);
        payload["configuration"] = json!(config
            .ids()
            .iter()
            .zip(config.points())
            .map(|(id, p)| json!({ "id": id, "x": p[0], "y": p[1] }))
            .collect::<Vec<_>>());
    }
    let params = solve_params(args);
    Ok(Report::new(payload, params, Some(args.seed)))
}

fn cmd_dim(args: &SolveArgs) -> Result<Report, CliError> {
    let graph = load_graph(&args.graph)?;
    let sys = varieties::build_unit_system(&graph, Pinning::first_two(&graph)?)?;
    let (result, attempt) = seeded_solve(&sys, args.seed, args.attempts, args.tol, args.max_iter)?;
    let payload = if result.converged {
        let d = numeric::local_dimension(&sys, &result)?;
        json!({
            "converged": true,
            "attempt": attempt,
            "residual": result.residual,
            "local_dimension": d,
        })
    } else {
        json!({ "converged": false, "attempt": attempt, "residual": result.residual })
    };
    let params = solve_params(args);
    Ok(Report::new(payload, params, Some(args.seed)))
}

fn solve_params(args: &SolveArgs) -> BTreeMap<String, Value> {
    BTreeMap::from([
        ("graph".into(), json!(args.graph)),
        ("attempts".into(), json!(args.attempts)),
        ("tol".into(), json!(args.tol)),
        ("max_iter".into(), json!(args.max_iter)),
    ])
}

fn cmd_collapse(args: &CollapseArgs) -> Result<Report, CliError> {
    let report =
        numeric::collapse_experiment(args.target.target(), args.attempts, args.seed, args.merge_tol);
    let payload = serde_json::to_value(&report).expect("report serializes");
    let params = BTreeMap::from([
        ("target".into(), json!(args.target.target().graph_name())),
        ("attempts".into(), json!(args.attempts)),
        ("merge_tol".into(), json!(args.merge_tol)),
    ]);
    Ok(Report::new(payload, params, Some(args.seed)))
}

fn cmd_curve(args: &CurveArgs) -> Result<Report, CliError> {
    let points = numeric::sample_flatness_curve(args.x2, args.count)?;
    let payload = json!({
        "x2": args.x2,
        "count": points.len(),
        "points": points,
    });
    let params = BTreeMap::from([
        ("x2".into(), json!(args.x2)),
        ("count".into(), json!(args.count)),
    ]);
    Ok(Report::new(payload, params, None))
}

fn cmd_census(args: &CensusArgs) -> Result<Report, CliError> {
    check_eps(args.eps)?;
    let mut params = BTreeMap::from([("eps".into(), json!(args.eps))]);
    let (ps, label, seed) = match (&args.points, args.generator) {
        (Some(path), None) => {
            params.insert("points".into(), json!(path.display().to_string()));
            (load_points(path)?, "file", None)
        }
        (None, Some(GeneratorArg::Lattice)) => {
            let side = args.side.ok_or_else(|| usage("lattice needs --side"))?;
            let radius_sq =
                args.radius_sq.ok_or_else(|| usage("lattice needs --radius-sq"))?;
            params.insert("side".into(), json!(side));
            params.insert("radius_sq".into(), json!(radius_sq));
            (census::lattice_config(side, radius_sq)?, "lattice", None)
        }
        (None, Some(GeneratorArg::Lines)) => {
            let n = args.n.ok_or_else(|| usage("lines needs --n"))?;
            let k = args.k.ok_or_else(|| usage("lines needs --k"))?;
            if k == 0 || n < k {
                return Err(usage("lines needs 1 <= --k <= --n"));
            }
            params.insert("n".into(), json!(n));
            params.insert("k".into(), json!(k));
            params.insert("deterministic".into(), json!(args.deterministic));
            (census::lines_config(n, k, args.seed, args.deterministic), "lines", Some(args.seed))
        }
        (None, Some(GeneratorArg::Random)) => {
            let n = args.n.ok_or_else(|| usage("random needs --n"))?;
            let mut rng = SplitMix64::new(args.seed);
            let w = (n as f64).sqrt();
            let pts = (0..n).map(|_| [rng.uniform(0.0, w), rng.uniform(0.0, w)]).collect();
            (PointSet::new(pts), "random", Some(args.seed))
        }
        _ => return Err(usage("give exactly one of --points or --generator")),
    };
    params.insert("generator".into(), json!(label));

    let n = ps.len();
    let count = census::count_unit_pairs(&ps, args.eps);
    let payload = json!({
        "generator": label,
        "n": n,
        "count": count,
        "per_n": if n > 0 { count as f64 / n as f64 } else { 0.0 },
        "per_n43": if n > 0 { count as f64 / (n as f64).powf(4.0 / 3.0) } else { 0.0 },
        "eps": args.eps,
        "duplicate_points": ps.has_duplicates(),
    });
    Ok(Report::new(payload, params, seed))
}

fn cmd_scaling(args: &ScalingArgs) -> Result<Report, CliError> {
    check_eps(args.eps)?;
    let mut params = BTreeMap::from([
        ("eps".into(), json!(args.eps)),
        ("sizes".into(), json!(args.sizes)),
        ("generator".into(), json!(args.generator.label())),
    ]);
    let generator = match args.generator {
        GeneratorArg::Lattice => {
            let radius_sq =
                args.radius_sq.ok_or_else(|| usage("lattice needs --radius-sq"))?;
            params.insert("radius_sq".into(), json!(radius_sq));
            ScalingGenerator::Lattice { radius_sq }
        }
        GeneratorArg::Lines => {
            let k = args.k.ok_or_else(|| usage("lines needs --k"))?;
            if k == 0 {
                return Err(usage("--k must be at least 1"));
            }
            params.insert("k".into(), json!(k));
            params.insert("deterministic".into(), json!(args.deterministic));
            ScalingGenerator::Lines { k, deterministic: args.deterministic }
        }
        GeneratorArg::Random => ScalingGenerator::Random,
    };
    let report = census::scaling_report(generator, &args.sizes, args.seed, args.eps)?;
    let text = report.to_text();
    let payload = serde_json::to_value(&report).expect("report serializes");
    let mut out = Report::new(payload, params, Some(args.seed));
    out.text = Some(text);
    Ok(out)
}
