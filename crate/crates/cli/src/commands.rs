//! Command-line definitions and handlers.

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lovx_core::eigen::{cut_pair, enumerate_eigenvalues, verify_eigenpair, EigenVerdict};
use lovx_core::fracprog::{
    dinkelbach_set_ratio, dinkelbach_solve, frustration_recursive, ipsd_solve,
    ipsd_solve_generalized, ConvexComponent, DinkelbachOptions, FrustrationOptions, IpsdOptions,
    RatioProblem, SolveTrace,
};
use lovx_core::graphcat::{bundled_graph, close, Lift, ProblemInstance, BUNDLED_GRAPHS};
use lovx_core::lovasz::extension_value;
use lovx_core::setfn::decompose_difference_submodular;
use lovx_core::{
    DomainKind, Graph, GraphFormat, Sense, SetArg, SetFunction, SetPair, SubsetId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::checks::{self, Expectation, SuiteOutcome};
use crate::error::{CliError, EXIT_NOT_CERTIFIED};
use crate::input::{load_graph, load_table};
use crate::problems::{build_problem, parse_list, parse_params, PROBLEMS};
use crate::report::{witness, Report};

#[derive(Debug, Parser)]
#[command(name = "lovx", version, about = "Discrete ratio problems through multi-way Lovasz extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub output: OutputFormat,
    /// Diagnostics on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the discrete objective and the continuous forms at a set or point.
    Eval(EvalArgs),
    /// Run an iterative solver and extract a set-tuple.
    Solve(SolveArgs),
    /// Enumerate and optionally certify eigenvalues of a function pair.
    Eigen(EigenArgs),
    /// Exact optimum by enumeration.
    Oracle(OracleArgs),
    /// Run the invariant suites.
    Check(CheckArgs),
    /// List problem names and parameters.
    Problems,
    /// List bundled graphs.
    Graphs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    EdgeList,
    Dimacs,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::EdgeList => GraphFormat::EdgeList,
            FormatArg::Dimacs => GraphFormat::Dimacs,
        }
    }
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph file, or `bundled:NAME`.
    #[arg(long)]
    pub graph: String,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Index of the first vertex in edge lists.
    #[arg(long, default_value_t = 0)]
    pub base: usize,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph, CliError> {
        load_graph(&self.graph, self.format.map(Into::into), self.base)
    }
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long)]
    pub problem: String,
    /// Problem parameter `key=value`; repeatable.
    #[arg(long = "param", short = 'P')]
    pub params: Vec<String>,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ProblemArgs {
    fn build(&self) -> Result<ProblemInstance, CliError> {
        let g = self.graph.load()?;
        build_problem(&self.problem, &g, &parse_params(&self.params)?)
    }
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Argument: `0,2` for a set, `0,1/2` for a pair, blocks separated by `|`.
    #[arg(long, conflicts_with = "point")]
    pub set: Option<String>,
    /// Comma-separated point for the continuous forms.
    #[arg(long)]
    pub point: Option<String>,
    /// Restrict to one continuous form.
    #[arg(long)]
    pub form: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Dinkelbach,
    Ipsd,
    IpsdGen,
    RecursiveFrustration,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "ipsd")]
    pub algo: Algo,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Random ternary starts in addition to the singleton indicators.
    #[arg(long, default_value_t = 0)]
    pub multistart: usize,
    /// Residual below which a terminal point counts as an eigenvector.
    #[arg(long, default_value_t = 1e-6)]
    pub eigen_tol: f64,
    /// Skip eigen certification of terminal points.
    #[arg(long)]
    pub no_verify: bool,
    /// Permit the n^2-dimensional chromatic solve.
    #[arg(long)]
    pub allow_chromatic: bool,
    /// Start argument for Dinkelbach, in the `eval --set` syntax.
    #[arg(long)]
    pub start: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    /// `cut(A) + cut(B)` against the constant 2.
    Cut,
    /// `cut(A) + cut(B)` against `vol(A) + vol(B)`.
    Cheeger,
    /// Tables given by `--f` and `--g`.
    Table,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(long, value_enum, default_value = "cut")]
    pub pair: PairKind,
    /// Graph file, or `bundled:NAME`.
    #[arg(long)]
    pub graph: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long, default_value_t = 0)]
    pub base: usize,
    /// Numerator table for `--pair table`.
    #[arg(long)]
    pub f: Option<String>,
    /// Denominator table for `--pair table`.
    #[arg(long)]
    pub g: Option<String>,
    /// Certify every eigenvalue at its eigenset.
    #[arg(long)]
    pub verify: bool,
    /// Candidate eigenvalue to certify at `--at`.
    #[arg(long, requires = "at", allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Candidate eigenset `pos/neg`, e.g. `0,1/2`.
    #[arg(long, requires = "lambda")]
    pub at: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    CrossForm,
    Tables,
    Identities,
    Discrete,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_values = ["all"])]
    pub suite: Vec<Suite>,
    /// Check a set-function table instead of the built-in suites.
    #[arg(long)]
    pub table: Option<String>,
    /// Lattice property the table must satisfy.
    #[arg(long, value_enum, requires = "table")]
    pub expect: Option<Expectation>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Report and exit code of a completed command.
pub struct Outcome {
    pub code: i32,
    pub report: Report,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut out = match &cli.command {
        Command::Oracle(a) => oracle(a)?,
        Command::Eval(a) => eval(a)?,
        Command::Solve(a) => solve(a, cli.verbose)?,
        Command::Eigen(a) => eigen(a)?,
        Command::Check(a) => check(a)?,
        Command::Problems => listing("problems", PROBLEMS.iter().map(|(n, p, d)| json!({"name": n, "params": p, "about": d})).collect()),
        Command::Graphs => listing(
            "graphs",
            BUNDLED_GRAPHS
                .iter()
                .map(|n| {
                    let g = bundled_graph(n).expect("bundled");
                    json!({"name": n, "n": g.n(), "m": g.m(), "signed": g.is_signed()})
                })
                .collect(),
        ),
    };
    out.report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

fn ok(report: Report) -> Outcome {
    Outcome { code: 0, report }
}

fn listing(what: &'static str, items: Vec<serde_json::Value>) -> Outcome {
    let mut r = Report::new(what, 0);
    r.scalar("count", items.len());
    r.set("items", items);
    ok(r)
}

fn describe(r: &mut Report, p: &ProblemInstance, source: &str) {
    r.set("problem", p.summary());
    r.set("graph", json!({"source": source, "n": p.graph.n(), "m": p.graph.m(), "signed": p.graph.is_signed()}));
    r.scalar("problem", &p.id);
    r.scalar("n", p.graph.n());
    r.scalar("m", p.graph.m());
}

/// Frustration values appear both as edge counts and in the doubled sign-vector scale.
fn frustration_extras(r: &mut Report, p: &ProblemInstance, value: f64) {
    if p.id == "frustration" {
        r.set("raw_value", 2.0 * value);
    }
}

fn oracle(a: &OracleArgs) -> Result<Outcome, CliError> {
    let p = a.problem.build()?;
    let res = p.discrete_optimum()?;
    let mut r = Report::new("oracle", a.problem.seed);
    describe(&mut r, &p, &a.problem.graph.graph);
    let mut consistent = true;
    for w in &res.witnesses {
        consistent &= p.value(w)?.is_some_and(|v| v == res.optimum);
    }
    if !consistent {
        return Err(CliError::Config("a witness does not re-evaluate to the optimum".into()));
    }
    r.set("value", res.optimum);
    r.set("witness", res.witnesses.first().map(witness));
    r.set("witnesses", res.witnesses.iter().map(witness).collect::<Vec<_>>());
    r.set("evaluations", res.evaluations);
    r.set("witnesses_reevaluated", consistent);
    frustration_extras(&mut r, &p, res.optimum);
    r.scalar("value", res.optimum);
    Ok(ok(r))
}

fn parse_pair(text: &str) -> Result<SetPair, CliError> {
    let (pos, neg) = text.split_once('/').unwrap_or((text, ""));
    Ok(SetPair::new(
        SubsetId::from_elems(&parse_list(pos)?),
        SubsetId::from_elems(&parse_list(neg)?),
    )?)
}

/// Parse an argument of the instance's domain.
pub fn parse_arg(p: &ProblemInstance, text: &str) -> Result<SetArg, CliError> {
    let n = p.n();
    let blocks: Vec<&str> = text.split('|').collect();
    let arg = match p.f.kind() {
        DomainKind::Powerset => SetArg::Set(SubsetId::from_elems(&parse_list(text)?)),
        DomainKind::DisjointPair => SetArg::Pair(parse_pair(text)?),
        DomainKind::KWay(k) | DomainKind::KWayPair(k) if blocks.len() > k => {
            return Err(CliError::Config(format!("expected at most {k} blocks, got {}", blocks.len())))
        }
        DomainKind::KWay(k) => {
            let mut t = blocks
                .iter()
                .map(|b| parse_list(b).map(|v| SubsetId::from_elems(&v)))
                .collect::<Result<Vec<_>, _>>()?;
            t.resize(k, SubsetId::EMPTY);
            SetArg::Tuple(t)
        }
        DomainKind::KWayPair(k) => {
            let mut t = blocks.iter().map(|b| parse_pair(b)).collect::<Result<Vec<_>, _>>()?;
            t.resize(k, SetPair::EMPTY);
            SetArg::PairTuple(t)
        }
    };
    let full = SubsetId::full(n);
    let inside = match &arg {
        SetArg::Set(s) => s.is_subset_of(full),
        SetArg::Pair(q) => q.support().is_subset_of(full),
        SetArg::Tuple(t) => t.iter().all(|s| s.is_subset_of(full)),
        SetArg::PairTuple(t) => t.iter().all(|q| q.support().is_subset_of(full)),
    };
    if !inside {
        return Err(CliError::Config(format!("argument `{text}` leaves the ground set of size {n}")));
    }
    Ok(arg)
}

fn parse_point(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("`{s}` is not a number")))
        })
        .collect()
}

fn eval(a: &EvalArgs) -> Result<Outcome, CliError> {
    let p = a.problem.build()?;
    let mut r = Report::new("eval", a.problem.seed);
    describe(&mut r, &p, &a.problem.graph.graph);
    let forms: Vec<_> = match &a.form {
        Some(name) => vec![p.form_named(name)?],
        None => p.forms.iter().collect(),
    };
    let mut values = serde_json::Map::new();
    match (&a.set, &a.point) {
        (Some(text), _) => {
            let arg = parse_arg(&p, text)?;
            let v = p.value(&arg)?;
            r.set("argument", witness(&arg));
            r.set("feasible", v.is_some());
            r.set("value", v);
            r.scalar("value", v.map_or("infeasible".into(), |v| v.to_string()));
            for f in forms {
                let x = p.lift(f, &arg);
                let fv = f.eval(&x);
                r.scalar(&format!("form:{}", f.name), fv.map_or("undefined".into(), |v| v.to_string()));
                values.insert(f.name.clone(), json!({"point": x, "value": fv}));
            }
        }
        (None, Some(text)) => {
            let x = parse_point(text)?;
            let mut any = false;
            for f in forms.into_iter().filter(|f| f.dim == x.len()) {
                any = true;
                let fv = f.eval(&x);
                r.scalar(&format!("form:{}", f.name), fv.map_or("undefined".into(), |v| v.to_string()));
                values.insert(f.name.clone(), json!({"value": fv, "admissible": f.domain.contains(&x)}));
            }
            if !any {
                return Err(CliError::Config(format!("no continuous form of dimension {}", x.len())));
            }
            r.set("point", &x);
        }
        (None, None) => return Err(CliError::Config("give --set or --point".into())),
    }
    r.set("forms", values);
    Ok(ok(r))
}

#[derive(Clone, Debug, Serialize)]
struct RunSummary {
    start: usize,
    origin: String,
    start_value: Option<f64>,
    iterations: usize,
    first_ratio: f64,
    final_ratio: f64,
    monotone: bool,
    termination: String,
    eigen_residual: Option<f64>,
    certified: Option<bool>,
    extracted: Option<serde_json::Value>,
    value: Option<f64>,
    error: Option<String>,
}

fn trace_fields(t: &SolveTrace, sense: Sense) -> (usize, f64, f64, bool, String) {
    (
        t.iterates.len().saturating_sub(1),
        t.iterates.first().map_or(f64::NAN, |i| i.r),
        t.final_ratio(),
        t.is_monotone(sense, 1e-9),
        format!("{:?}", t.termination).to_lowercase(),
    )
}

fn unit_like(f: &SetFunction) -> Result<SetFunction, CliError> {
    let n = f.n();
    Ok(match f.kind() {
        DomainKind::Powerset => SetFunction::constant(n, 1.0)?,
        DomainKind::DisjointPair => SetFunction::constant_pair(n, 1.0)?,
        DomainKind::KWay(k) => SetFunction::kway_from_fn(n, k, |_| 1.0)?,
        DomainKind::KWayPair(k) => SetFunction::kway_pair_from_fn(n, k, |_| 1.0)?,
    })
}

/// Dinkelbach on the instance ratio from an admissible start; a missing denominator counts as 1.
pub fn dinkelbach_instance(
    p: &ProblemInstance,
    start: &SetArg,
    opts: DinkelbachOptions,
) -> Result<(SolveTrace, SetArg), CliError> {
    let g = match &p.g {
        Some(g) => g.clone(),
        None => unit_like(&p.f)?,
    };
    if p.has_candidates() {
        dinkelbach_over_feasible(p, &g, start, opts)
    } else {
        Ok(dinkelbach_set_ratio(&p.f, &g, &p.family, p.sense, start, opts)?)
    }
}

/// Dinkelbach whose inner step scans the instance's feasible arguments.
fn dinkelbach_over_feasible(
    p: &ProblemInstance,
    g: &SetFunction,
    start: &SetArg,
    opts: DinkelbachOptions,
) -> Result<(SolveTrace, SetArg), CliError> {
    let args = p.feasible_args()?;
    let n = p.n();
    let mut last = start.clone();
    let fv = |x: &[f64]| extension_value(&p.f, x).expect("layout");
    let gv = |x: &[f64]| extension_value(g, x).expect("layout");
    let mut inner = |r: f64| -> lovx_core::Result<Vec<f64>> {
        let mut best: Option<(f64, &SetArg)> = None;
        for a in args.iter() {
            let h = p.f.evaluate(a)? - r * g.evaluate(a)?;
            if best.is_none_or(|(b, _)| p.sense.better(h, b)) {
                best = Some((h, a));
            }
        }
        let a = best.ok_or(lovx_core::Error::NoFeasibleLevel)?.1;
        last = a.clone();
        Ok(a.indicator(n))
    };
    let trace = dinkelbach_solve(&fv, &gv, &mut inner, &start.indicator(n), p.sense, opts)?;
    Ok((trace, last))
}

/// Convex split and whether it is the instance's own wiring; otherwise a difference-of-submodular split.
fn convex_split(p: &ProblemInstance) -> Result<(RatioProblem, Lift, bool), CliError> {
    if let Some(w) = p.solver_wiring() {
        return Ok((w.problem.clone(), w.lift.clone(), true));
    }
    if p.f.kind() != DomainKind::Powerset {
        return Err(CliError::Config(format!(
            "problem {} has no convex split for iterative solvers; use --algo dinkelbach",
            p.id
        )));
    }
    let g = match &p.g {
        Some(g) => g.clone(),
        None => unit_like(&p.f)?,
    };
    let df = decompose_difference_submodular(&p.f)?;
    let dg = decompose_difference_submodular(&g)?;
    let prob = RatioProblem::new(
        ConvexComponent::extension(&df.f1),
        ConvexComponent::extension(&df.f2),
        ConvexComponent::extension(&dg.f1),
        ConvexComponent::extension(&dg.f2),
        p.sense,
    )?
    .with_discrete(p.f.clone(), g, p.family.clone());
    Ok((prob, Lift::Indicator, false))
}

fn solve(a: &SolveArgs, verbose: u8) -> Result<Outcome, CliError> {
    if !(a.tol > 0.0) || !(a.eigen_tol > 0.0) {
        return Err(CliError::Config("tolerances must be positive".into()));
    }
    let p = a.problem.build()?;
    if p.id == "chromatic" && !a.allow_chromatic {
        return Err(CliError::Config(format!(
            "the chromatic continuous objective has dimension n^2 = {}; pass --allow-chromatic to solve it",
            p.n() * p.n()
        )));
    }
    let seed = a.problem.seed;
    let mut r = Report::new("solve", seed);
    describe(&mut r, &p, &a.problem.graph.graph);
    r.set("algo", a.algo);
    r.scalar("algo", a.algo.to_possible_value().expect("named").get_name());
    let code = match a.algo {
        Algo::Dinkelbach => solve_dinkelbach(a, &p, &mut r)?,
        Algo::Ipsd | Algo::IpsdGen => solve_ipsd(a, &p, &mut r, verbose)?,
        Algo::RecursiveFrustration => {
            if p.id != "frustration" {
                return Err(CliError::Config("recursive-frustration needs --problem frustration".into()));
            }
            let mut ipsd = FrustrationOptions::default().ipsd;
            ipsd.max_iter = a.max_iter;
            ipsd.tol = a.tol;
            let run = frustration_recursive(
                &p.graph,
                FrustrationOptions {
                    ipsd,
                    starts: a.multistart.max(1),
                    seed,
                },
            )?;
            let plus: Vec<usize> = (0..p.n()).filter(|&i| run.assignment[i] > 0.0).collect();
            let arg = SetArg::Set(SubsetId::from_elems(&plus));
            let check = lovx_core::graphcat::frustration_value(&p.graph, SubsetId::from_elems(&plus));
            if !close(check, run.frustrated) {
                return Err(CliError::Config("assignment does not re-evaluate to the reported value".into()));
            }
            r.set("value", run.frustrated);
            r.set("witness", witness(&arg));
            r.set("rounds", run.rounds);
            r.set("assignment", &run.assignment);
            frustration_extras(&mut r, &p, run.frustrated);
            r.scalar("value", run.frustrated);
            0
        }
    };
    Ok(Outcome { code, report: r })
}

fn solve_dinkelbach(a: &SolveArgs, p: &ProblemInstance, r: &mut Report) -> Result<i32, CliError> {
    let start = match &a.start {
        Some(text) => parse_arg(p, text)?,
        None => p
            .feasible_args()?
            .first()
            .cloned()
            .ok_or(lovx_core::Error::NoFeasibleLevel)?,
    };
    let opts = DinkelbachOptions {
        max_iter: a.max_iter,
        tol: a.tol,
    };
    let (trace, arg) = dinkelbach_instance(p, &start, opts)?;
    let value = p.value(&arg)?.ok_or_else(|| CliError::Config("Dinkelbach ended outside the family".into()))?;
    let (iterations, first, last, monotone, termination) = trace_fields(&trace, p.sense);
    r.set("start", witness(&start));
    r.set("trace", json!({
        "iterations": iterations,
        "ratios": trace.iterates.iter().map(|i| i.r).collect::<Vec<_>>(),
        "first_ratio": first,
        "final_ratio": last,
        "monotone": monotone,
        "termination": termination,
    }));
    r.set("value", value);
    r.set("witness", witness(&arg));
    frustration_extras(r, p, value);
    r.scalar("value", value);
    r.scalar("iterations", iterations);
    Ok(0)
}

fn starts(p: &ProblemInstance, lift: &Lift, dim: usize, extra: usize, seed: u64) -> Vec<(String, Option<SetArg>, Vec<f64>)> {
    let n = p.n();
    let mut out = Vec::new();
    for i in 0..n {
        let s = SubsetId::singleton(i);
        let arg = match p.f.kind() {
            DomainKind::DisjointPair => SetArg::Pair(SetPair { pos: s, neg: SubsetId::EMPTY }),
            _ => SetArg::Set(s),
        };
        out.push((format!("singleton {i}"), Some(arg.clone()), lift.apply(&arg, n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..extra {
        let x: Vec<f64> = loop {
            let x: Vec<f64> = (0..dim).map(|_| f64::from(rng.gen_range(-1i32..=1))).collect();
            if x.iter().any(|&v| v != 0.0) {
                break x;
            }
        };
        out.push((format!("random {k}"), None, x));
    }
    out
}

fn solve_ipsd(a: &SolveArgs, p: &ProblemInstance, r: &mut Report, verbose: u8) -> Result<i32, CliError> {
    let (prob, lift, wired) = convex_split(p)?;
    let seed = a.problem.seed;
    let opts = IpsdOptions {
        max_iter: a.max_iter,
        tol: a.tol,
        verify_eigen: !a.no_verify,
        eigen_tol: a.eigen_tol,
        seed,
        ..IpsdOptions::default()
    };
    let generalized = a.algo == Algo::IpsdGen;
    let list = starts(p, &lift, prob.dim(), a.multistart, seed);
    let runs: Vec<RunSummary> = list
        .par_iter()
        .enumerate()
        .map(|(idx, (origin, arg, x0))| {
            let start_value = arg.as_ref().and_then(|a| p.value(a).ok().flatten());
            let mut o = RunSummary {
                start: idx,
                origin: origin.clone(),
                start_value,
                iterations: 0,
                first_ratio: f64::NAN,
                final_ratio: f64::NAN,
                monotone: true,
                termination: String::new(),
                eigen_residual: None,
                certified: None,
                extracted: None,
                value: None,
                error: None,
            };
            let opts = IpsdOptions { seed: seed.wrapping_add(idx as u64), ..opts };
            let res = if generalized {
                ipsd_solve_generalized(&prob, x0, opts)
            } else {
                ipsd_solve(&prob, x0, opts)
            };
            let t = match res {
                Ok(t) => t,
                Err(e) => {
                    o.error = Some(e.to_string());
                    return o;
                }
            };
            (o.iterations, o.first_ratio, o.final_ratio, o.monotone, o.termination) = trace_fields(&t, p.sense);
            o.eigen_residual = t.eigen_residual;
            o.certified = t.certified(a.eigen_tol);
            let y = t.final_point();
            let extracted = if wired {
                p.extract(y)
            } else {
                lovx_core::fracprog::extract_best_settuple(&prob, y)
            };
            match extracted {
                Ok((arg, v)) => match p.value(&arg) {
                    Ok(Some(w)) if close(w, v) => {
                        o.extracted = Some(witness(&arg));
                        o.value = Some(w);
                    }
                    other => {
                        o.error = Some(format!("extracted value {v} re-evaluates to {other:?}"));
                    }
                },
                Err(e) => o.error = Some(e.to_string()),
            }
            o
        })
        .collect();
    if verbose > 0 {
        for o in &runs {
            eprintln!(
                "start {} ({}): {} iterations, ratio {} -> {}, value {:?}{}",
                o.start,
                o.origin,
                o.iterations,
                o.first_ratio,
                o.final_ratio,
                o.value,
                o.error.as_deref().map_or(String::new(), |e| format!(", error: {e}"))
            );
        }
    }
    let best = runs
        .iter()
        .filter(|o| o.value.is_some())
        .fold(None::<&RunSummary>, |b, o| match b {
            Some(b) if !p.sense.better(o.value.unwrap(), b.value.unwrap()) => Some(b),
            _ => Some(o),
        });
    let certified_runs = runs.iter().filter(|o| o.certified == Some(true)).count();
    r.set("runs", &runs);
    r.set("certified_runs", certified_runs);
    r.scalar("starts", runs.len());
    let Some(best) = best else {
        eprintln!("no start produced a feasible set-tuple");
        r.set("value", None::<f64>);
        r.set("certified", false);
        r.scalar("value", "none");
        r.scalar("certified", false);
        return Ok(EXIT_NOT_CERTIFIED);
    };
    let value = best.value.expect("filtered");
    r.set("best_start", best.start);
    r.set("value", value);
    r.set("witness", &best.extracted);
    r.set("ratio", best.final_ratio);
    r.set("certified", best.certified);
    frustration_extras(r, p, value);
    r.scalar("value", value);
    r.scalar("certified", best.certified.map_or("skipped".into(), |c| c.to_string()));
    Ok(if best.certified == Some(false) { EXIT_NOT_CERTIFIED } else { 0 })
}

fn eigen(a: &EigenArgs) -> Result<Outcome, CliError> {
    let graph = || -> Result<Graph, CliError> {
        let spec = a
            .graph
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("--pair {:?} needs --graph", a.pair).to_lowercase()))?;
        load_graph(spec, a.format.map(Into::into), a.base)
    };
    let (f, g) = match a.pair {
        PairKind::Cut => cut_pair(&graph()?)?,
        PairKind::Cheeger => {
            let gr = graph()?;
            let (h1, h2) = (gr.clone(), gr.clone());
            (
                SetFunction::pair_from_fn(gr.n(), move |p| h1.cut(p.pos) + h1.cut(p.neg))?,
                SetFunction::pair_from_fn(gr.n(), move |p| h2.vol(p.pos) + h2.vol(p.neg))?,
            )
        }
        PairKind::Table => {
            let need = |o: &Option<String>, w: &str| {
                o.clone().ok_or_else(|| CliError::Config(format!("--pair table needs --{w}")))
            };
            (load_table(&need(&a.f, "f")?)?, load_table(&need(&a.g, "g")?)?)
        }
    };
    let eig = enumerate_eigenvalues(&f, &g)?;
    let mut r = Report::new("eigen", a.seed);
    r.set("pair", a.pair);
    let mut entries = Vec::new();
    let mut failed = 0;
    for (lambda, set) in &eig {
        let mut e = json!({"lambda": lambda + 0.0, "eigenset": witness(set)});
        if a.verify {
            let v = verify_eigenpair(&f, &g, *lambda, set)?;
            failed += usize::from(!v.is_accepted());
            e["verdict"] = json!(verdict_name(&v));
        }
        entries.push(e);
    }
    if let (Some(lambda), Some(at)) = (a.lambda, &a.at) {
        let pair = parse_pair(at)?;
        if !pair.support().is_subset_of(SubsetId::full(f.n())) {
            return Err(CliError::Config(format!("eigenset `{at}` leaves the ground set")));
        }
        let v = verify_eigenpair(&f, &g, lambda, &SetArg::Pair(pair))?;
        failed += usize::from(!v.is_accepted());
        r.set("candidate", json!({
            "lambda": lambda,
            "eigenset": witness(&SetArg::Pair(pair)),
            "verdict": verdict_name(&v),
        }));
    }
    let values: Vec<f64> = eig.iter().map(|e| e.0 + 0.0).collect();
    r.set("eigenvalues", &values);
    r.set("entries", entries);
    r.scalar("count", values.len());
    r.scalar(
        "eigenvalues",
        values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
    );
    if a.verify || a.lambda.is_some() {
        r.set("verified", failed == 0);
    }
    Ok(Outcome {
        code: if failed > 0 { EXIT_NOT_CERTIFIED } else { 0 },
        report: r,
    })
}

fn verdict_name(v: &EigenVerdict) -> &'static str {
    match v {
        EigenVerdict::Accepted(_) => "accepted",
        EigenVerdict::Rejected { .. } => "rejected",
        EigenVerdict::NotCertified { .. } => "not-certified",
    }
}

/// Exit code of `check` when a suite fails.
pub const EXIT_CHECK_FAILED: i32 = 3;

fn check(a: &CheckArgs) -> Result<Outcome, CliError> {
    let mut suites: Vec<SuiteOutcome> = Vec::new();
    if let Some(path) = &a.table {
        suites.push(checks::table_file(&load_table(path)?, a.expect, a.seed));
    } else {
        let want = |s: Suite| a.suite.contains(&Suite::All) || a.suite.contains(&s);
        if want(Suite::CrossForm) {
            suites.push(checks::cross_form(10, 100, 4, a.seed));
        }
        if want(Suite::Tables) {
            let graphs: Vec<(&str, Graph)> = ["k3", "p4", "petersen"]
                .into_iter()
                .map(|n| (n, bundled_graph(n).expect("bundled")))
                .collect();
            suites.push(checks::tables(&graphs, 50, a.seed));
        }
        if want(Suite::Identities) {
            suites.push(checks::identities(5, a.seed));
        }
        if want(Suite::Discrete) {
            let graphs: Vec<Graph> = ["k3", "p4", "c5"].into_iter().map(|n| bundled_graph(n).expect("bundled")).collect();
            suites.push(checks::discrete(&graphs, 300, a.seed));
        }
    }
    let passed = suites.iter().all(|s| s.passed);
    let mut r = Report::new("check", a.seed);
    r.set("suites", &suites);
    r.set("passed", passed);
    for s in &suites {
        r.scalar(&s.name, if s.passed { "pass" } else { "fail" });
    }
    Ok(Outcome {
        code: if passed { 0 } else { EXIT_CHECK_FAILED },
        report: r,
    })
}
