//! Command-line front end. `run` never exits the process; it returns the
//! exit status and the text for stdout and stderr.
//!
//! Exit status: 0 on success, 1 when a verified property is false (or a
//! reproduction differs from the checked-in files), 2 on errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::Field;
use crate::blocking::{
    is_affine_blocking, is_affine_blocking_sampled, is_strong_blocking, is_strong_blocking_sampled, Outcome, PointKind,
    PointSet,
};
use crate::bounds::{self, BoundReport};
use crate::codes::{self, LinearCode, TrifferenceMode};
use crate::constructions::{self, Strategy};
use crate::error::{Error, Result};
use crate::exact::{self, BPrime, SearchMode, SolveOptions};
use crate::geometry::{check_estimates, n_q_oracle};
use crate::io;

/// Version of every JSON document the CLI emits.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "blockset", version, about = "Blocking sets, minimal codes and trifferent codes over small finite fields")]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true, env = "BLOCKSET_THREADS")]
    pub threads: Option<usize>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// q-binomials, subspace counts and the counting lemmas for (k, s, q).
    Count(CountArgs),
    #[command(subcommand)]
    Verify(VerifyCommand),
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// Lower and upper bounds with their comparisons.
    Bounds(BoundsArgs),
    /// The constant c_q of the strong blocking set lower bound.
    Cq(CqArgs),
    #[command(subcommand)]
    Exact(ExactCommand),
    #[command(subcommand)]
    Table(TableCommand),
    /// Regenerate the reference tables and compare with the checked-in copies.
    Repro(ReproArgs),
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub s: usize,
    /// Also count n_q(k, s) by enumeration.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Whether a set of F_q^k meets every affine subspace of codimension s.
    AffineBlocking(BlockingArgs),
    /// Whether a set of PG(k−1, q) is a strong s-blocking set.
    StrongBlocking(BlockingArgs),
    /// Properties of the linear code generated by a matrix.
    Code(CodeArgs),
}

#[derive(Args, Debug)]
pub struct BlockingArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long)]
    pub s: usize,
    /// Check this many random subspaces instead of all of them.
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long, requires = "sample")]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct CodeArgs {
    #[arg(long)]
    pub file: PathBuf,
    /// minimal, trifferent, distance, nondegenerate or perfect-hash:T.
    #[arg(long)]
    pub check: String,
    /// How to decide trifference.
    #[arg(long, value_enum)]
    pub mode: Option<TriffMode>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum TriffMode {
    Direct,
    Equivalence,
}

#[derive(Subcommand, Debug)]
pub enum ConstructCommand {
    /// Random union of subspaces (or points) that blocks every codimension-s subspace.
    Random(RandomArgs),
    /// Lines through pairs of k points in general position.
    Tetrahedron(TetraArgs),
    /// Lines along the edges of a graph on a point set.
    Graph(GraphArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyArg {
    Subspaces,
    Points,
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "subspaces")]
    pub strategy: StrategyArg,
    /// Dimension of the random subspaces (default s).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of subspaces or points (default: the union-bound count).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = constructions::MAX_ATTEMPTS)]
    pub max_attempts: usize,
    /// Write the affine point set here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the projective points of the set here.
    #[arg(long)]
    pub strong_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TetraArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Projective point set; vertex i is its i-th point in file order after sorting.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the strong blocking check of the result.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, required_unless_present = "trifferent")]
    pub q: Option<u32>,
    #[arg(long, required_unless_present = "trifferent")]
    pub k: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    /// Bounds on trifferent codes of this length instead.
    #[arg(long, conflicts_with_all = ["q", "k", "s"])]
    pub trifferent: Option<usize>,
    #[arg(long, conflicts_with = "json")]
    pub csv: bool,
}

#[derive(Args, Debug)]
pub struct CqArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long, default_value_t = bounds::DEFAULT_TOLERANCE)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum ExactCommand {
    /// b'_3(k, 2), the smallest strong blocking set of PG(k−1, 3), with a certificate.
    Bprime(BprimeArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Exhaustive,
    Bnb,
}

#[derive(Args, Debug)]
pub struct BprimeArgs {
    #[arg(long)]
    pub k: usize,
    /// Seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long, value_enum, default_value = "bnb")]
    pub mode: ModeArg,
}

#[derive(Subcommand, Debug)]
pub enum TableCommand {
    /// T_L(n), the largest linear trifferent code of length n.
    Tl(TlArgs),
}

#[derive(Args, Debug)]
pub struct TlArgs {
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, conflicts_with = "json")]
    pub csv: bool,
}

#[derive(Args, Debug)]
pub struct ReproArgs {
    /// Also solve k = 5 (slow).
    #[arg(long)]
    pub long: bool,
    /// Write the regenerated files here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Compare against the files in this directory instead of the built-in copies.
    #[arg(long)]
    pub expected_dir: Option<PathBuf>,
    /// Time limit in seconds for the k = 5 search.
    #[arg(long, default_value_t = 3600.0)]
    pub time_limit: f64,
}

/// Exit status and output of one invocation.
#[derive(Debug, Default)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(cli: &Cli) -> Output {
    match dispatch(cli) {
        Ok(out) => out,
        Err(e) => {
            let msg = if cli.json {
                let doc = document("error", json!({ "error": error_kind(&e), "message": e.to_string(), "detail": error_detail(&e) }));
                serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
            } else {
                format!("error: {e}\n")
            };
            Output { code: 2, stdout: String::new(), stderr: msg }
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotAPrimePower(_) => "not_a_prime_power",
        Error::UnsupportedSize(_) => "unsupported_size",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::UniverseTooLarge { .. } => "universe_too_large",
        Error::CodeTooLarge(_) => "code_too_large",
        Error::WrongField { .. } => "wrong_field",
        Error::TooManySymbols { .. } => "too_many_symbols",
        Error::DegenerateCode(_) => "degenerate_code",
        Error::NonSpanningPoints { .. } => "non_spanning_points",
        Error::NotSymmetric(_) => "not_symmetric",
        Error::NotBlocking => "not_blocking",
        Error::RankDeficient { .. } => "rank_deficient",
        Error::RetriesExhausted(_) => "retries_exhausted",
        Error::UnsupportedStrategy(_) => "unsupported_strategy",
        Error::GraphTooLarge { .. } => "graph_too_large",
        Error::OutOfDomain { .. } => "out_of_domain",
        Error::BracketFailure(_) => "bracket_failure",
        Error::KTooLarge(_) => "k_too_large",
        Error::TimeLimitExceeded { .. } => "time_limit_exceeded",
        Error::InsufficientData(_) => "insufficient_data",
        Error::Parse { .. } => "parse",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Io(_) => "io",
    }
}

fn error_detail(e: &Error) -> Value {
    match e {
        Error::TimeLimitExceeded { lower, upper } => json!({ "lower": lower, "upper": upper }),
        Error::Parse { line, .. } => json!({ "line": line }),
        _ => Value::Null,
    }
}

/// `payload` with a `schema` field naming its kind and version.
pub fn document(kind: &str, payload: Value) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("schema".into(), json!(format!("blockset/{kind}/v{SCHEMA_VERSION}")));
    match payload {
        Value::Object(m) => map.extend(m),
        other => {
            map.insert("value".into(), other);
        }
    }
    Value::Object(map)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn ok(stdout: String) -> Output {
    Output { code: 0, stdout, stderr: String::new() }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Count(a) => count(cli, a),
        Command::Verify(VerifyCommand::AffineBlocking(a)) => verify_blocking(cli, a, PointKind::Affine),
        Command::Verify(VerifyCommand::StrongBlocking(a)) => verify_blocking(cli, a, PointKind::Projective),
        Command::Verify(VerifyCommand::Code(a)) => verify_code(cli, a),
        Command::Construct(ConstructCommand::Random(a)) => construct_random(cli, a),
        Command::Construct(ConstructCommand::Tetrahedron(a)) => construct_tetrahedron(cli, a),
        Command::Construct(ConstructCommand::Graph(a)) => construct_graph(cli, a),
        Command::Bounds(a) => bounds_cmd(cli, a),
        Command::Cq(a) => cq(cli, a),
        Command::Exact(ExactCommand::Bprime(a)) => bprime(cli, a),
        Command::Table(TableCommand::Tl(a)) => table_tl(cli, a),
        Command::Repro(a) => repro(cli, a),
    }
}

fn count(cli: &Cli, a: &CountArgs) -> Result<Output> {
    let field = Field::new(a.q)?;
    if a.s > a.k || a.s == 0 {
        return Err(Error::InvalidArgument(format!("need 1 <= s <= k, got s = {}, k = {}", a.s, a.k)));
    }
    let report = check_estimates(a.k as i64, a.s as i64, a.q);
    let oracle = if a.oracle { Some(n_q_oracle(&field, a.k, a.s, None)?) } else { None };
    let oracle_ok = oracle.map(|o| o.to_string() == report.n_q);
    if cli.json {
        let mut v = to_value(&report);
        v["oracle"] = json!(oracle.map(|o| o.to_string()));
        v["oracle_matches"] = json!(oracle_ok);
        return Ok(ok(pretty(&document("count", v))));
    }
    let mut s = String::new();
    let _ = writeln!(s, "[{} {}]_{} = {}", a.k, a.s, a.q, report.qbin);
    let _ = writeln!(s, "affine subspaces of codimension {}: {}", a.s, report.affine_count);
    let _ = writeln!(s, "n_q(k, s) = {}", report.n_q);
    if let Some(o) = oracle {
        let _ = writeln!(s, "n_q(k, s) by enumeration = {o} ({})", if oracle_ok == Some(true) { "match" } else { "MISMATCH" });
    }
    for c in &report.estimate_checks {
        let (l, r) = (short_rational(&c.lhs), short_rational(&c.rhs));
        let _ = writeln!(s, "{}: {l} {} {r} ({})", c.name, c.relation, if c.holds { "holds" } else { "fails" });
    }
    Ok(ok(s))
}

/// A rational written `p/q`, shown as a decimal approximation when long.
fn short_rational(r: &str) -> String {
    if r.len() <= 24 {
        return r.to_string();
    }
    let v = match r.split_once('/') {
        Some((p, q)) => p.parse::<f64>().unwrap_or(f64::NAN) / q.parse::<f64>().unwrap_or(f64::NAN),
        None => r.parse::<f64>().unwrap_or(f64::NAN),
    };
    format!("{v:.12} (approx.)")
}

fn verify_blocking(cli: &Cli, a: &BlockingArgs, kind: PointKind) -> Result<Output> {
    let set = io::read_points(&a.file)?;
    if set.kind() != kind {
        return Err(Error::InvalidArgument(format!("expected {kind} points, the file holds {} points", set.kind())));
    }
    let seed = a.seed.unwrap_or(0);
    let verdict = match (kind, a.sample) {
        (PointKind::Affine, None) => is_affine_blocking(&set, a.s)?,
        (PointKind::Affine, Some(n)) => is_affine_blocking_sampled(&set, a.s, n, seed)?,
        (PointKind::Projective, None) => is_strong_blocking(&set, a.s)?,
        (PointKind::Projective, Some(n)) => is_strong_blocking_sampled(&set, a.s, n, seed)?,
    };
    let property = match kind {
        PointKind::Affine => "affine_blocking",
        PointKind::Projective => "strong_blocking",
    };
    let code = if verdict.outcome == Outcome::Fails { 1 } else { 0 };
    let stdout = if cli.json {
        let mut v = to_value(&verdict);
        v["property"] = json!(property);
        v["s"] = json!(a.s);
        v["q"] = json!(set.field().q());
        v["k"] = json!(set.k());
        v["size"] = json!(set.len());
        pretty(&document("blocking_verdict", v))
    } else {
        let mut s = format!(
            "{property} s={} on {} points of {}: {}\n",
            a.s,
            set.len(),
            set.kind(),
            match verdict.outcome {
                Outcome::Holds => "holds",
                Outcome::Fails => "fails",
                Outcome::NoViolationFound => "no violation found in the sample",
            }
        );
        let _ = writeln!(s, "subspaces checked: {}", verdict.checked);
        if let Some(w) = &verdict.witness {
            let _ = writeln!(s, "witness: {w:?}");
        }
        s
    };
    Ok(Output { code, stdout, stderr: String::new() })
}

enum CodeCheck {
    Minimal,
    Trifferent,
    Distance,
    Nondegenerate,
    PerfectHash(usize),
}

fn parse_check(s: &str) -> Result<CodeCheck> {
    Ok(match s {
        "minimal" => CodeCheck::Minimal,
        "trifferent" => CodeCheck::Trifferent,
        "distance" => CodeCheck::Distance,
        "nondegenerate" => CodeCheck::Nondegenerate,
        _ => match s.strip_prefix("perfect-hash:").map(str::parse) {
            Some(Ok(t)) => CodeCheck::PerfectHash(t),
            _ => return Err(Error::InvalidArgument(format!("unknown check {s:?}"))),
        },
    })
}

fn verify_code(cli: &Cli, a: &CodeArgs) -> Result<Output> {
    let check = parse_check(&a.check)?;
    if a.mode.is_some() && !matches!(check, CodeCheck::Trifferent) {
        return Err(Error::InvalidArgument("--mode applies to --check trifferent only".into()));
    }
    let code = LinearCode::new(io::read_matrix(&a.file)?)?;
    let header = json!({ "q": code.field().q(), "n": code.n(), "k": code.k() });
    if let CodeCheck::Distance = check {
        let d = code.min_distance()?;
        let via = codes::distance_via_hyperplanes(&code)?;
        if d != via {
            return Err(Error::InvalidArgument(format!("internal mismatch: distance {d} vs {via} via hyperplanes")));
        }
        let stdout = if cli.json {
            let mut v = header;
            v["check"] = json!("distance");
            v["distance"] = json!(d);
            v["distance_via_hyperplanes"] = json!(via);
            pretty(&document("code_verdict", v))
        } else {
            format!("[{}, {}, {}]_{} code\n", code.n(), code.k(), d, code.field().q())
        };
        return Ok(ok(stdout));
    }
    let verdict = match check {
        CodeCheck::Minimal => codes::is_minimal(&code)?,
        CodeCheck::Trifferent => {
            let mode = match a.mode {
                Some(TriffMode::Equivalence) => TrifferenceMode::Equivalence,
                _ => TrifferenceMode::Direct,
            };
            codes::is_trifferent(&code, mode)?
        }
        CodeCheck::Nondegenerate => codes::check_nondegenerate(&code),
        CodeCheck::PerfectHash(t) => codes::is_perfect_hash(&code, t)?,
        CodeCheck::Distance => unreachable!(),
    };
    let code_status = if verdict.holds { 0 } else { 1 };
    let stdout = if cli.json {
        let mut v = header;
        v["check"] = json!(a.check);
        v["verdict"] = to_value(&verdict);
        pretty(&document("code_verdict", v))
    } else {
        let mut s = format!("{}: {}\n", a.check, if verdict.holds { "holds" } else { "fails" });
        if let Some(w) = &verdict.witness {
            let _ = writeln!(s, "witness: {w:?}");
        }
        s
    };
    Ok(Output { code: code_status, stdout, stderr: String::new() })
}

fn emit_points(set: &PointSet, out: &Option<PathBuf>) -> Result<Option<String>> {
    let text = io::write_points(set);
    match out {
        Some(p) => {
            write_file(p, &text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

fn construct_random(cli: &Cli, a: &RandomArgs) -> Result<Output> {
    let strategy = match a.strategy {
        StrategyArg::Subspaces => Strategy::Subspaces { dim: a.dim.unwrap_or(a.s) },
        StrategyArg::Points => {
            if a.dim.is_some() {
                return Err(Error::InvalidArgument("--dim applies to the subspaces strategy only".into()));
            }
            Strategy::Points
        }
    };
    let r = constructions::random_subspace_blocking(a.q, a.k, a.s, a.seed, strategy, a.m, a.max_attempts)?;
    let strong = r.strong_set();
    let bound = constructions::theorem_bound(a.q, a.k, a.s);
    let points = emit_points(&r.set, &a.out)?;
    if let Some(p) = &a.strong_out {
        write_file(p, &io::write_points(&strong))?;
    }
    if cli.json {
        let v = json!({
            "method": "random",
            "q": r.q, "k": r.k, "s": r.s, "seed": r.seed,
            "strategy": to_value(&r.strategy),
            "m": r.m,
            "attempts": r.attempts,
            "size": r.set.len(),
            "strong_size": strong.len(),
            "size_bound": bound,
            "verified": r.verified,
            "set": to_value(&r.set),
        });
        return Ok(ok(pretty(&document("construction", v))));
    }
    let mut s = format!(
        "affine {}-blocking set of F_{}^{}: {} points from m = {} (attempt {}, seed {}), verified\n",
        r.s,
        r.q,
        r.k,
        r.set.len(),
        r.m,
        r.attempts,
        r.seed
    );
    let _ = writeln!(s, "size bound {bound:.3}; projective points {}", strong.len());
    if let Some(p) = points {
        s.push_str(&p);
    }
    Ok(ok(s))
}

fn construct_tetrahedron(cli: &Cli, a: &TetraArgs) -> Result<Output> {
    let field = Field::new(a.q)?;
    let set = constructions::tetrahedron(&field, a.k)?;
    let formula = a.k * (a.k - 1) / 2 * (a.q as usize - 1) + a.k;
    let verified = if crate::blocking::exhaustive_feasible(&field, a.k, 1, PointKind::Projective) {
        Some(is_strong_blocking(&set, 1)?.holds)
    } else {
        None
    };
    let points = emit_points(&set, &a.out)?;
    if cli.json {
        let v = json!({
            "method": "tetrahedron",
            "q": a.q, "k": a.k,
            "size": set.len(),
            "size_formula": formula,
            "verified": verified,
            "set": to_value(&set),
        });
        return Ok(ok(pretty(&document("construction", v))));
    }
    let mut s = format!("tetrahedron in PG({}, {}): {} points (formula {formula})", a.k - 1, a.q, set.len());
    s.push_str(match verified {
        Some(true) => ", strong blocking\n",
        Some(false) => ", NOT strong blocking\n",
        None => ", not verified (universe too large)\n",
    });
    if let Some(p) = points {
        s.push_str(&p);
    }
    Ok(ok(s))
}

fn construct_graph(cli: &Cli, a: &GraphArgs) -> Result<Output> {
    let p = io::read_points(&a.points)?;
    if p.kind() != PointKind::Projective {
        return Err(Error::InvalidArgument("--points must hold a projective point set".into()));
    }
    let g = io::read_graph(&a.graph)?;
    let r = constructions::graph_lines_construction(&p, &g, !a.no_verify)?;
    let points = emit_points(&r.set, &a.out)?;
    let code = if r.verified == Some(false) { 1 } else { 0 };
    let stdout = if cli.json {
        let mut v = to_value(&r);
        v["method"] = json!("graph");
        v["size"] = json!(r.set.len());
        pretty(&document("construction", v))
    } else {
        let mut s = format!(
            "union of {} lines: {} points; d = {}, vertex integrity {} (condition {})",
            g.edges().len(),
            r.set.len(),
            r.d,
            r.integrity.value,
            if r.condition { "met" } else { "not met" }
        );
        s.push_str(match r.verified {
            Some(true) => ", strong blocking\n",
            Some(false) => ", NOT strong blocking\n",
            None => "\n",
        });
        if let Some(pts) = points {
            s.push_str(&pts);
        }
        s
    };
    Ok(Output { code, stdout, stderr: String::new() })
}

fn report_csv(r: &BoundReport) -> String {
    let mut s = String::from("name,quantity,side,value,exact,asymptotic\n");
    for e in &r.entries {
        let side = match e.side {
            bounds::Side::Lower => "lower",
            bounds::Side::Upper => "upper",
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            e.name,
            e.quantity.replace(',', ";"),
            side,
            e.value,
            e.exact.clone().unwrap_or_default(),
            e.asymptotic
        );
    }
    s
}

fn bounds_cmd(cli: &Cli, a: &BoundsArgs) -> Result<Output> {
    let report = match a.trifferent {
        Some(n) => bounds::trifferent_bounds(n)?,
        None => bounds::bounds(a.q.expect("required"), a.k.expect("required"), a.s)?,
    };
    if a.csv {
        return Ok(ok(report_csv(&report)));
    }
    if cli.json {
        return Ok(ok(pretty(&document("bounds", to_value(&report)))));
    }
    let mut s = String::new();
    for e in &report.entries {
        let side = if e.side == bounds::Side::Lower { ">=" } else { "<=" };
        let value = e.exact.clone().unwrap_or_else(|| format!("{:.6}", e.value));
        let tag = if e.asymptotic { " (asymptotic)" } else { "" };
        let _ = writeln!(s, "{:<28} {} {side} {value}{tag}", e.name, e.quantity);
    }
    for c in &report.comparisons {
        let _ = writeln!(
            s,
            "{} vs {}: better here {}, first better at k = {}, always from k = {}",
            c.better,
            c.worse,
            c.better_at_k,
            c.first_k.map_or("-".into(), |k| k.to_string()),
            c.always_from_k.map_or("-".into(), |k| k.to_string())
        );
    }
    for v in &report.violations {
        let _ = writeln!(s, "inconsistent: {v}");
    }
    Ok(ok(s))
}

/// The inequalities checked alongside c_q.
#[derive(Debug, Clone, Serialize)]
pub struct CqChecks {
    /// c_q > 1 + 1/(2000 q).
    pub above_floor: bool,
    /// M_q((q−1)/(q+1)) < 1/(q+1).
    pub mrrw_at_one: bool,
    pub mrrw_value: f64,
}

pub fn cq_checks(q: u32, c_q: f64) -> Result<CqChecks> {
    let qf = q as f64;
    let m = bounds::mrrw(q, (qf - 1.0) / (qf + 1.0))?;
    Ok(CqChecks { above_floor: c_q > 1.0 + 1.0 / (2000.0 * qf), mrrw_at_one: m < 1.0 / (qf + 1.0), mrrw_value: m })
}

fn cq(cli: &Cli, a: &CqArgs) -> Result<Output> {
    let r = bounds::compute_cq(a.q, a.tol)?;
    let checks = cq_checks(a.q, r.c_q)?;
    if cli.json {
        let mut v = to_value(&r);
        v["checks"] = to_value(&checks);
        return Ok(ok(pretty(&document("cq", v))));
    }
    Ok(ok(format!(
        "c_{} = {:.12} (bracket [{:.12}, {:.12}], {} iterations)\nc_q > 1 + 1/(2000q): {}\nM_q((q-1)/(q+1)) = {:.12} < 1/(q+1): {}\n",
        a.q, r.c_q, r.bracket.0, r.bracket.1, r.iterations, checks.above_floor, checks.mrrw_value, checks.mrrw_at_one
    )))
}

fn threads(cli: &Cli) -> usize {
    cli.threads.unwrap_or_else(rayon::current_num_threads).max(1)
}

fn bprime(cli: &Cli, a: &BprimeArgs) -> Result<Output> {
    let inst = exact::build_instance(a.k)?;
    let opts = SolveOptions {
        mode: match a.mode {
            ModeArg::Bnb => SearchMode::Bnb,
            ModeArg::Exhaustive => SearchMode::Exhaustive,
        },
        time_limit: a.time_limit.map(Duration::from_secs_f64),
        threads: threads(cli),
    };
    let cert = exact::solve_with(&inst, &opts)?;
    let code = if cert.verified { 0 } else { 1 };
    Ok(Output { code, stdout: pretty(&document("certificate", to_value(&cert))), stderr: String::new() })
}

/// b'_3(k, 2) for k <= 4 solved here, larger k from the known values.
pub fn bprime_values(solve_up_to: usize, time_limit: Option<Duration>, threads: usize) -> Result<Vec<(usize, BPrime, &'static str)>> {
    let mut out = vec![(1, BPrime::Exact { value: 1 }, "trivial")];
    let reported = exact::reported_bprime();
    for k in 2..=6 {
        if k <= solve_up_to {
            let inst = exact::build_instance(k)?;
            let opts = SolveOptions { mode: SearchMode::Bnb, time_limit, threads };
            let c = exact::solve_with(&inst, &opts)?;
            out.push((k, BPrime::Exact { value: c.optimum }, "solved"));
        } else {
            out.push((k, reported[&k], "reported"));
        }
    }
    Ok(out)
}

fn tl_rows(solve_up_to: usize, n_max: usize, threads: usize) -> Result<(Vec<exact::TlRow>, Vec<(usize, BPrime, &'static str)>)> {
    let values = bprime_values(solve_up_to, None, threads)?;
    let map = values.iter().map(|(k, b, _)| (*k, *b)).collect();
    Ok((exact::tl_table(n_max, &map)?, values))
}

fn tl_csv(rows: &[exact::TlRow]) -> String {
    let mut s = String::from("n,k_min,k_max,t_l_min,t_l_max\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.n, r.k_min, r.k_max, r.size_min(), r.size_max());
    }
    s
}

fn table_tl(cli: &Cli, a: &TlArgs) -> Result<Output> {
    let (rows, values) = tl_rows(4, a.n_max, threads(cli))?;
    if a.csv {
        return Ok(ok(tl_csv(&rows)));
    }
    if cli.json {
        let v = json!({
            "n_max": a.n_max,
            "bprime": values.iter().map(|(k, b, src)| json!({ "k": k, "value": to_value(b), "source": src })).collect::<Vec<_>>(),
            "rows": to_value(&rows),
        });
        return Ok(ok(pretty(&document("tl_table", v))));
    }
    let mut s = String::new();
    for (from, to, r) in exact::tl_steps(&rows) {
        let range = if from == to { format!("n = {from}") } else { format!("{from} <= n <= {to}") };
        if r.is_exact() {
            let _ = writeln!(s, "T_L(n) = 3^{} for {range}", r.k_min);
        } else {
            let _ = writeln!(s, "3^{} <= T_L(n) <= 3^{} for {range}", r.k_min, r.k_max);
        }
    }
    Ok(ok(s))
}

/// The grid of bound values compared by `repro`.
pub fn bounds_grid() -> Result<String> {
    let mut s = String::from("q,k,lb_affine_s2,ub_fractional_s2,ub_random_s2,strong_lower,strong_upper_random,strong_upper_previous\n");
    for q in [2u32, 3, 4, 5, 7, 8, 9] {
        for k in 2..=12 {
            let _ = writeln!(
                s,
                "{q},{k},{},{:.6},{:.6},{},{:.6},{:.6}",
                bounds::lb_affine(q, k, 2),
                bounds::ub_fractional(q, k, 2),
                bounds::ub_thm_main(q, k, 2),
                bounds::strong_lower(q, k),
                bounds::strong_upper_random(q, k),
                bounds::strong_upper_previous(q, k)
            );
        }
    }
    Ok(s)
}

pub fn cq_table() -> Result<String> {
    let mut s = String::from("q,c_q,above_floor,mrrw_at_one\n");
    for q in [2u32, 3, 4, 5, 7, 8, 9] {
        let r = bounds::compute_cq(q, bounds::DEFAULT_TOLERANCE)?;
        let c = cq_checks(q, r.c_q)?;
        let _ = writeln!(s, "{q},{:.8},{},{}", r.c_q, c.above_floor, c.mrrw_at_one);
    }
    Ok(s)
}

const EXPECTED: [(&str, &str); 5] = [
    ("bprime.csv", include_str!("../expected/bprime.csv")),
    ("bprime_long.csv", include_str!("../expected/bprime_long.csv")),
    ("tl.csv", include_str!("../expected/tl.csv")),
    ("bounds_grid.csv", include_str!("../expected/bounds_grid.csv")),
    ("cq.csv", include_str!("../expected/cq.csv")),
];

fn line_diff(expected: &str, got: &str) -> String {
    let e: Vec<&str> = expected.lines().collect();
    let g: Vec<&str> = got.lines().collect();
    let mut s = String::new();
    for i in 0..e.len().max(g.len()) {
        match (e.get(i), g.get(i)) {
            (Some(a), Some(b)) if a == b => {}
            (a, b) => {
                if let Some(a) = a {
                    let _ = writeln!(s, "-{a}");
                }
                if let Some(b) = b {
                    let _ = writeln!(s, "+{b}");
                }
            }
        }
    }
    s
}

fn repro(cli: &Cli, a: &ReproArgs) -> Result<Output> {
    let threads = threads(cli);
    let mut files: Vec<(&str, String)> = Vec::new();
    let upto = if a.long { 5 } else { 4 };
    let mut bp = String::from("k,bprime\n");
    for k in 2..=upto {
        let inst = exact::build_instance(k)?;
        let limit = if k == 5 { Some(Duration::from_secs_f64(a.time_limit)) } else { None };
        let c = exact::solve_with(&inst, &SolveOptions { mode: SearchMode::Bnb, time_limit: limit, threads })?;
        if !c.verified {
            return Err(Error::InvalidArgument(format!("certificate for k = {k} failed verification")));
        }
        let _ = writeln!(bp, "{k},{}", c.optimum);
    }
    files.push((if a.long { "bprime_long.csv" } else { "bprime.csv" }, bp));
    let (rows, _) = tl_rows(4, 18, threads)?;
    files.push(("tl.csv", tl_csv(&rows)));
    files.push(("bounds_grid.csv", bounds_grid()?));
    files.push(("cq.csv", cq_table()?));

    let mut report = String::new();
    let mut mismatches = 0;
    let mut results = Vec::new();
    for (name, got) in &files {
        if let Some(dir) = &a.out_dir {
            std::fs::create_dir_all(dir)?;
            write_file(&dir.join(name), got)?;
        }
        let expected = match &a.expected_dir {
            Some(dir) => std::fs::read_to_string(dir.join(name))?,
            None => EXPECTED.iter().find(|(n, _)| n == name).expect("known file").1.to_string(),
        };
        let same = &expected == got;
        if !same {
            mismatches += 1;
            let _ = writeln!(report, "{name}: MISMATCH");
            report.push_str(&line_diff(&expected, got));
        } else {
            let _ = writeln!(report, "{name}: ok");
        }
        results.push(json!({ "file": name, "matches": same, "diff": if same { Value::Null } else { json!(line_diff(&expected, got)) } }));
    }
    let code = if mismatches == 0 { 0 } else { 1 };
    let stdout = if cli.json { pretty(&document("repro", json!({ "long": a.long, "files": results }))) } else { report };
    Ok(Output { code, stdout, stderr: String::new() })
}
