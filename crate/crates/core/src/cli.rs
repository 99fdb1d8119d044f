//! The `locsym` command line.
//!
//! Exit codes: 0 success, 1 a verification found a violation, 2 usage or input
//! error, 3 resource limit. Reports are JSON objects `{"config": …, "result": …}`
//! (or CSV where offered); `make` and `fn --op dist|weights` emit plain files
//! that other subcommands read back.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{self, ClassifyOptions};
use crate::dist::{AnyDist, PsiSet, SpecialKind};
use crate::error::{Error, Result};
use crate::hypergraph::{conditional_independence_check, find_independent_neighborhoods, verify_selection, DepHypergraph};
use crate::lab::density::{self, find_anchor};
use crate::lab::{self, DensityInstance, IntPmf, IntPmfFile, SuiteParams};
use crate::localfn::{self, anf_parity, kwise_check, Engine, LocalFn};
use crate::mass::{parse_rational, render_rational, Prob, Rational};
use crate::rng::RNG_ALGORITHM;

#[derive(Debug, Parser, Serialize)]
#[command(name = "locsym", version, about = "Exact analysis of distributions sampled by local functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Worker threads; never changes any reported number.
    #[arg(long, global = true, env = "LSL_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here (atomically) instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output-distribution engine: auto, naive or frontier.
    #[arg(long, global = true, default_value = "auto")]
    pub engine: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Distances and transforms on distribution files.
    Dist(DistArgs),
    /// Evaluate, analyze or sample a local-function file.
    Fn(FnArgs),
    /// Emit a sampler as a local-function file.
    Make(MakeArgs),
    /// Nearest special distribution, best Ψ and the ratio between them.
    Classify(ClassifyArgs),
    /// Random search for large distance ratios.
    Search(SearchArgs),
    /// Independent-neighborhood selection and its verification.
    Decompose(DecomposeArgs),
    /// Run a verification suite by name.
    Verify(VerifyArgs),
    /// Density comparisons for sums of bounded integer variables.
    Llt(LltArgs),
    /// Distance to a single slice or to a tail-regime Ψ.
    Probe(ProbeArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dist(_) => "dist",
            Command::Fn(_) => "fn",
            Command::Make(_) => "make",
            Command::Classify(_) => "classify",
            Command::Search(_) => "search",
            Command::Decompose(_) => "decompose",
            Command::Verify(_) => "verify",
            Command::Llt(_) => "llt",
            Command::Probe(_) => "probe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistOp {
    Distance,
    Kolmogorov,
    Symmetrize,
    Marginal,
    Weights,
}

#[derive(Debug, Args, Serialize)]
pub struct DistArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = DistOp::Distance)]
    pub op: DistOp,
    /// A special name or `psi:<weights>` (e.g. `psi:0,2-4`).
    #[arg(long)]
    pub against: Option<String>,
    /// A second distribution file to compare with.
    #[arg(long)]
    pub other: Option<PathBuf>,
    /// Coordinates kept by `--op marginal`.
    #[arg(long, value_delimiter = ',')]
    pub coords: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FnOp {
    Eval,
    Dist,
    Weights,
    Sample,
    Anf,
    Kwise,
}

#[derive(Debug, Args, Serialize)]
pub struct FnArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FnOp::Dist)]
    pub op: FnOp,
    /// Input bits for `--op eval`, bit 0 first.
    #[arg(long)]
    pub x: Option<String>,
    /// Sample count for `--op sample`.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Independence order for `--op kwise`.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Flips,
    Mixture,
}

#[derive(Debug, Args, Serialize)]
pub struct MakeArgs {
    /// One of zeros, ones, zerones, evens, odds, all.
    #[arg(long, conflicts_with = "remark")]
    pub kind: Option<String>,
    #[arg(long, value_enum)]
    pub remark: Option<Family>,
    #[arg(long)]
    pub n: usize,
    /// Number of flipped outputs for `--remark flips`.
    #[arg(long)]
    pub c: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    /// A local-function or distribution file.
    #[arg(long)]
    pub input: PathBuf,
    /// Work from the weight distribution only.
    #[arg(long)]
    pub symmetric: bool,
    /// Extra Ψ candidates (used when n is beyond exhaustive search).
    #[arg(long)]
    pub psi: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Neighborhood size bound.
    #[arg(long)]
    pub t: usize,
    /// Number of input edges that may be removed.
    #[arg(long, default_value_t = 0)]
    pub budget: usize,
    /// Assignments of the removed inputs to check (all when fewer exist).
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Suite name; see `lab::SUITES`.
    pub suite: String,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub d_max: Option<usize>,
    #[arg(long)]
    pub grid: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct LltArgs {
    /// Instance file `{"t":…,"phi":[…],"pmfs":[{"offset":…,"masses":[…]}],"repeat":…}`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Inline instance: every variable uniform on these values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<i64>,
    /// Inline instance: number of variables.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub t: Option<u64>,
    /// The moduli Φ.
    #[arg(long, value_delimiter = ',')]
    pub phi: Vec<u64>,
    /// Largest |Δ| checked (default 20φ).
    #[arg(long)]
    pub delta_max: Option<u64>,
    /// Explicit shifts; each must be a multiple of φ.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub deltas: Vec<i64>,
    /// Check the simple form with step `--step` and mass floor `--alpha`.
    #[arg(long)]
    pub lemma: bool,
    #[arg(long)]
    pub step: Option<u64>,
    #[arg(long)]
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeKind {
    Slice,
    Tail,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(value_enum)]
    pub kind: ProbeKind,
    #[arg(long)]
    pub input: PathBuf,
    /// Slice weight.
    #[arg(long)]
    pub k: Option<usize>,
    /// Weight set for the tail probe.
    #[arg(long)]
    pub psi: Option<String>,
}

/// What a command produced: the text to emit and the exit code.
struct Outcome {
    body: String,
    code: i32,
}

/// Parses `argv` (including the program name), runs it, prints to standard
/// output/error, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = thread_pool(cli.threads).and_then(|pool| pool.install(|| execute(&cli)));
    match result.and_then(|o| emit(&cli, o, out)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => 3,
        _ => 2,
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::invalid("--threads must be ≥ 1"));
        }
        b = b.num_threads(t);
    }
    b.build().map_err(|e| Error::invalid(format!("thread pool: {e}")))
}

fn emit(cli: &Cli, o: Outcome, out: &mut dyn Write) -> Result<i32> {
    match &cli.out {
        Some(path) => write_atomic(path, o.body.as_bytes())?,
        None => out.write_all(o.body.as_bytes())?,
    }
    Ok(o.code)
}

/// Writes to a temporary file beside `path`, then renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn config(cli: &Cli) -> Value {
    json!({
        "command": cli.command.name(),
        "args": cli.command,
        "seed": cli.seed,
        "mode": cli.mode,
        "threads": cli.threads.unwrap_or_else(rayon::current_num_threads),
        "format": cli.format,
        "engine": cli.engine,
        "rng": RNG_ALGORITHM,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn report(cli: &Cli, result: Value, code: i32) -> Outcome {
    let body = serde_json::to_string_pretty(&json!({ "config": config(cli), "result": result })).expect("serializable");
    Outcome { body: body + "\n", code }
}

fn plain(v: &Value) -> Outcome {
    Outcome { body: serde_json::to_string_pretty(v).expect("serializable") + "\n", code: 0 }
}

fn csv_only(body: String, code: i32) -> Outcome {
    Outcome { body, code }
}

fn no_csv(cli: &Cli) -> Result<()> {
    if cli.format == Format::Csv {
        return Err(Error::invalid(format!("--format csv is not offered by '{}'", cli.command.name())));
    }
    Ok(())
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    // accept a report envelope produced by this tool
    Ok(match v {
        Value::Object(mut m) if m.contains_key("config") && m.contains_key("result") => m.remove("result").expect("checked"),
        other => other,
    })
}

fn annotate<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn read_localfn(path: &Path) -> Result<LocalFn> {
    let v = read_json(path)?;
    let file = serde_json::from_value(v).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    annotate(path, LocalFn::from_file(&file))
}

fn read_dist(path: &Path) -> Result<AnyDist> {
    let v = read_json(path)?;
    let file = serde_json::from_value(v).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    annotate(path, AnyDist::from_file(&file))
}

/// A local function or a distribution, told apart by their keys.
enum Input {
    Fn(LocalFn),
    Dist(AnyDist),
}

fn read_input(path: &Path) -> Result<Input> {
    let v = read_json(path)?;
    if v.get("outputs").is_some() {
        read_localfn(path).map(Input::Fn)
    } else if v.get("pmf").is_some() {
        read_dist(path).map(Input::Dist)
    } else {
        Err(Error::Parse(format!("{}: neither a local-function file (\"outputs\") nor a distribution file (\"pmf\")", path.display())))
    }
}

fn engine(cli: &Cli) -> Result<Engine> {
    cli.engine.parse()
}

fn prob_json(p: &Prob) -> Value {
    json!({ "exact": if let Prob::Exact(_) = p { Value::String(p.render()) } else { Value::Null }, "float": p.to_f64(), "value": p.render() })
}

/// Resolves `--against` for a distribution of the given level.
fn target(name: &str, like: &AnyDist) -> Result<AnyDist> {
    let n = like.n();
    let psi = match name.strip_prefix("psi:") {
        Some(list) => PsiSet::parse(n, list)?,
        None => name.parse::<SpecialKind>()?.psi(n),
    };
    Ok(if like.is_weight_level() {
        AnyDist::ExactWeights(psi.weight_dist())
    } else {
        AnyDist::Exact(psi.dist()?)
    })
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Dist(a) => cmd_dist(cli, a),
        Command::Fn(a) => cmd_fn(cli, a),
        Command::Make(a) => cmd_make(cli, a),
        Command::Classify(a) => cmd_classify(cli, a),
        Command::Search(a) => cmd_search(cli, a),
        Command::Decompose(a) => cmd_decompose(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Llt(a) => cmd_llt(cli, a),
        Command::Probe(a) => cmd_probe(cli, a),
    }
}

fn cmd_dist(cli: &Cli, a: &DistArgs) -> Result<Outcome> {
    no_csv(cli)?;
    let mut p = match read_input(&a.input)? {
        Input::Dist(d) => d,
        Input::Fn(f) => AnyDist::Exact(f.output_distribution(engine(cli)?)?),
    };
    if cli.mode == ModeArg::Float {
        p = p.to_float();
    }
    match a.op {
        DistOp::Distance | DistOp::Kolmogorov => {
            let (q, against) = match (&a.against, &a.other) {
                (Some(s), None) => (target(s, &p)?, s.clone()),
                (None, Some(path)) => (read_dist(path)?, path.display().to_string()),
                _ => return Err(Error::invalid("give exactly one of --against or --other")),
            };
            let (d, promoted) = if a.op == DistOp::Distance { p.tv_distance(&q)? } else { p.kolmogorov_distance(&q)? };
            let mut res = json!({ "against": against, "metric": if a.op == DistOp::Distance { "tv" } else { "kolmogorov" }, "promoted_to_float": promoted });
            res["distance"] = prob_json(&d);
            res["tv"] = Value::String(d.render());
            if a.op == DistOp::Kolmogorov {
                res.as_object_mut().expect("object").remove("tv");
            }
            Ok(report(cli, res, 0))
        }
        DistOp::Symmetrize => Ok(plain(&match &p {
            AnyDist::Exact(d) => AnyDist::Exact(d.symmetrize()?),
            AnyDist::Float(d) => AnyDist::Float(d.symmetrize()?),
            w => w.clone(),
        }
        .to_json())),
        DistOp::Marginal => Ok(plain(&match &p {
            AnyDist::Exact(d) => AnyDist::Exact(d.marginal(&a.coords)?),
            AnyDist::Float(d) => AnyDist::Float(d.marginal(&a.coords)?),
            _ => return Err(Error::invalid("marginals need a string-level distribution")),
        }
        .to_json())),
        DistOp::Weights => Ok(plain(&p.weights().to_json())),
    }
}

fn weights_csv(w: &AnyDist) -> Result<String> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.write_record(["weight", "mass"]).map_err(|e| Error::Io(e.into()))?;
    let rows: Vec<(usize, String)> = match w {
        AnyDist::ExactWeights(w) => w.masses().iter().enumerate().map(|(k, m)| (k, render_rational(m))).collect(),
        AnyDist::FloatWeights(w) => w.masses().iter().enumerate().map(|(k, m)| (k, m.to_string())).collect(),
        _ => unreachable!("weight-level input"),
    };
    for (k, m) in rows {
        wr.write_record([k.to_string(), m]).map_err(|e| Error::Io(e.into()))?;
    }
    let bytes = wr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn cmd_fn(cli: &Cli, a: &FnArgs) -> Result<Outcome> {
    let f = read_localfn(&a.input)?;
    let eng = engine(cli)?;
    let exact = cli.mode == ModeArg::Exact;
    if cli.format == Format::Csv && a.op != FnOp::Weights {
        return Err(Error::invalid("--format csv is offered by 'fn --op weights' only"));
    }
    match a.op {
        FnOp::Eval => {
            let bits = a.x.as_deref().ok_or_else(|| Error::invalid("--op eval needs --x"))?;
            if bits.len() != f.m() {
                return Err(Error::invalid(format!("--x has {} bits, the function reads {}", bits.len(), f.m())));
            }
            let x = bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::invalid(format!("bad bit {c:?} in --x"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let y: String = f.evaluate(&x)?.into_iter().map(|b| if b { '1' } else { '0' }).collect();
            Ok(report(cli, json!({ "x": bits, "output": y }), 0))
        }
        FnOp::Dist => Ok(plain(&if exact {
            AnyDist::Exact(f.output_distribution(eng)?)
        } else {
            AnyDist::Float(f.output_distribution(eng)?)
        }
        .to_json())),
        FnOp::Weights => {
            let w = if exact {
                AnyDist::ExactWeights(f.weight_distribution(eng)?)
            } else {
                AnyDist::FloatWeights(f.weight_distribution(eng)?)
            };
            Ok(match cli.format {
                Format::Json => plain(&w.to_json()),
                Format::Csv => csv_only(weights_csv(&w)?, 0),
            })
        }
        FnOp::Sample => {
            let rows: Vec<String> = localfn::sample(&f, cli.seed, a.count)
                .into_iter()
                .map(|y| y.into_iter().map(|b| if b { '1' } else { '0' }).collect())
                .collect();
            Ok(report(cli, json!({ "count": a.count, "samples": rows }), 0))
        }
        FnOp::Anf => {
            let anf = anf_parity(&f);
            Ok(report(cli, json!({ "parity_anf": anf.render(), "degree": anf.degree(), "constant": anf.degree() == 0 }), 0))
        }
        FnOp::Kwise => {
            let k = a.k.ok_or_else(|| Error::invalid("--op kwise needs --k"))?;
            let r = kwise_check(&f, k)?;
            Ok(report(cli, serde_json::to_value(&r).expect("serializable"), 0))
        }
    }
}

fn cmd_make(cli: &Cli, a: &MakeArgs) -> Result<Outcome> {
    no_csv(cli)?;
    let f = match (&a.kind, a.remark) {
        (Some(k), None) => localfn::canonical(k.parse()?, a.n)?,
        (None, Some(Family::Flips)) => {
            localfn::evens_with_flips(a.n, a.c.ok_or_else(|| Error::invalid("--remark flips needs --c"))?)?
        }
        (None, Some(Family::Mixture)) => localfn::mixture_evens_odds(a.n)?,
        _ => return Err(Error::invalid("give exactly one of --kind or --remark")),
    };
    Ok(plain(&serde_json::to_value(f.to_file()).expect("serializable")))
}

fn cmd_classify(cli: &Cli, a: &ClassifyArgs) -> Result<Outcome> {
    no_csv(cli)?;
    let rep = match read_input(&a.input)? {
        Input::Fn(f) => {
            let extra = a.psi.iter().map(|s| PsiSet::parse(f.n(), s)).collect::<Result<Vec<_>>>()?;
            classify::classify(&f, &ClassifyOptions { engine: engine(cli)?, assume_symmetric: a.symmetric, extra_psi: extra })?
        }
        Input::Dist(d) => {
            let extra = a.psi.iter().map(|s| PsiSet::parse(d.n(), s)).collect::<Result<Vec<_>>>()?;
            match d {
                AnyDist::Exact(p) if !a.symmetric => classify::classify_dist(&p, &extra)?,
                AnyDist::Exact(p) => classify::classify_weights(&p.weight_marginal(), &extra)?,
                AnyDist::ExactWeights(w) => classify::classify_weights(&w, &extra)?,
                _ => return Err(Error::invalid("classification needs an exact distribution")),
            }
        }
    };
    Ok(report(cli, rep.to_json(), 0))
}

fn cmd_search(cli: &Cli, a: &SearchArgs) -> Result<Outcome> {
    let rep = classify::ratio_search(a.n, a.d, a.trials, cli.seed)?;
    Ok(match cli.format {
        Format::Json => report(cli, serde_json::to_value(&rep).expect("serializable"), 0),
        Format::Csv => csv_only(rep.to_csv()?, 0),
    })
}

fn cmd_decompose(cli: &Cli, a: &DecomposeArgs) -> Result<Outcome> {
    no_csv(cli)?;
    let f = read_localfn(&a.input)?;
    let g = DepHypergraph::from_localfn(&f);
    let sel = find_independent_neighborhoods(&g, a.t, a.budget)?;
    let structural = verify_selection(&g, &sel);
    let independence = match &structural {
        Ok(()) if sel.failure.is_none() => Some(conditional_independence_check(&f, &sel, a.samples, cli.seed)?),
        _ => None,
    };
    let ok = structural.is_ok() && independence.as_ref().is_none_or(|r| r.passed);
    let res = json!({
        "selection": sel,
        "postconditions": match &structural { Ok(()) => Value::String("ok".into()), Err(e) => Value::String(e.clone()) },
        "independence": independence,
        "passed": ok,
    });
    Ok(report(cli, res, if ok { 0 } else { 1 }))
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<Outcome> {
    let params = SuiteParams { n_max: a.n_max, trials: a.trials, seed: cli.seed, d_max: a.d_max, grid: a.grid };
    let rep = lab::run_suite(&a.suite, &params)?;
    let code = if rep.passed { 0 } else { 1 };
    Ok(match cli.format {
        Format::Json => report(cli, rep.to_json(), code),
        Format::Csv => csv_only(rep.to_csv()?, code),
    })
}

#[derive(serde::Deserialize)]
struct InstanceFile {
    t: Option<u64>,
    #[serde(default)]
    phi: Vec<u64>,
    pmfs: Vec<IntPmfFile>,
    #[serde(default)]
    repeat: Option<usize>,
}

/// Variables, `t` and Φ of an `llt` request.
type LltInstance = (Vec<IntPmf<Rational>>, Option<u64>, Vec<u64>);

/// Variables from `--input` or from `--values/--count`, with the file's `t`/Φ if present.
fn llt_variables(a: &LltArgs) -> Result<LltInstance> {
    match (&a.input, a.values.is_empty()) {
        (Some(path), true) => {
            let v = read_json(path)?;
            let file: InstanceFile = serde_json::from_value(v).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let base = file
                .pmfs
                .iter()
                .enumerate()
                .map(|(i, p)| IntPmf::from_file(p).map_err(|e| Error::Parse(format!("{}: pmfs[{i}]: {e}", path.display()))))
                .collect::<Result<Vec<_>>>()?;
            let reps = file.repeat.unwrap_or(1);
            let pmfs = (0..reps).flat_map(|_| base.iter().cloned()).collect();
            let phi = if a.phi.is_empty() { file.phi } else { a.phi.clone() };
            Ok((pmfs, a.t.or(file.t), phi))
        }
        (None, false) => {
            let count = a.count.ok_or_else(|| Error::invalid("--values needs --count"))?;
            let p = IntPmf::uniform(&a.values)?;
            Ok((vec![p; count], a.t, a.phi.clone()))
        }
        _ => Err(Error::invalid("give either --input or --values/--count")),
    }
}

fn cmd_llt(cli: &Cli, a: &LltArgs) -> Result<Outcome> {
    let (pmfs, t, phi_set) = llt_variables(a)?;
    let rep = if a.lemma {
        let step = a.step.ok_or_else(|| Error::invalid("--lemma needs --step (φ)"))?;
        let alpha = parse_rational(a.alpha.as_deref().ok_or_else(|| Error::invalid("--lemma needs --alpha"))?)?;
        let anchors = pmfs
            .iter()
            .enumerate()
            .map(|(i, y)| {
                find_anchor(y, step, &alpha).ok_or_else(|| {
                    Error::precondition(format!("Y_{i} has no u with Pr[Y=u], Pr[Y=u+{step}] ≥ {}", render_rational(&alpha)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        density::check_density_lemma(&pmfs, step, &alpha, &anchors, a.delta_max.unwrap_or(20 * step))?
    } else {
        let t = t.ok_or_else(|| Error::invalid("the density theorem needs --t"))?;
        let inst = DensityInstance::new(t, pmfs, phi_set)?;
        if a.deltas.is_empty() {
            let delta_max = match a.delta_max {
                Some(d) => d,
                None => 20 * density::density_params(&inst).map(|p| p.phi).unwrap_or(1),
            };
            density::check_density_theorem(&inst, delta_max)?
        } else {
            density::check_density_deltas(&inst, &a.deltas)?
        }
    };
    let code = if rep.passed { 0 } else { 1 };
    Ok(match cli.format {
        Format::Json => report(cli, rep.to_json(), code),
        Format::Csv => csv_only(rep.to_csv()?, code),
    })
}

fn cmd_probe(cli: &Cli, a: &ProbeArgs) -> Result<Outcome> {
    no_csv(cli)?;
    let f = read_localfn(&a.input)?;
    let eng = engine(cli)?;
    let res = match a.kind {
        ProbeKind::Slice => {
            let k = a.k.ok_or_else(|| Error::invalid("probe slice needs --k"))?;
            serde_json::to_value(classify::slice_probe(&f, k, eng)?).expect("serializable")
        }
        ProbeKind::Tail => {
            let psi = PsiSet::parse(f.n(), a.psi.as_deref().ok_or_else(|| Error::invalid("probe tail needs --psi"))?)?;
            serde_json::to_value(classify::tail_probe(&f, &psi, eng)?).expect("serializable")
        }
    };
    Ok(report(cli, res, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("locsym").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["nonsense"]).0, 2);
        assert_eq!(run_capture(&["verify", "no-such-suite"]).0, 2);
        assert_eq!(run_capture(&["make", "--n", "4"]).0, 2);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("classify"));
    }

    #[test]
    fn make_emits_a_readable_file() {
        let (code, out, _) = run_capture(&["make", "--kind", "odds", "--n", "5"]);
        assert_eq!(code, 0);
        let f = LocalFn::from_json_str(&out).unwrap();
        assert_eq!(f.n(), 5);
    }

    #[test]
    fn malformed_input_is_position_annotated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{\"m\": 2,\n \"n\": }").unwrap();
        let (code, _, err) = run_capture(&["fn", "--input", path.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("line 2"), "{err}");
    }
}
