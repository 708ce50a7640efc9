//! Catalog of graph problems.
//!
//! Every constructor returns a [`ProblemInstance`] holding the discrete ratio `f / g` over a
//! feasible family, one or more closed-form continuous objectives, and, where the objective
//! splits into convex pieces, a [`RatioProblem`] for the iterative solvers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{too_large, Error, Result};
use crate::fracprog::{extract_best_settuple, AbsTerm, ConvexComponent, RatioProblem};
use crate::graph::Graph;
use crate::lovasz::{extension_value, subgradient_at, ExtensionKind, FeasibleDomain};
use crate::oracle::{
    blocks_of, optimize_signs, optimize_subsets, restricted_growth_strings, vertex_boundary,
    BoundaryKind, OracleResult, Sense, MAX_PAIR_N, MAX_PARTITION_N, MAX_SUBSET_N,
};
use crate::setfn::{is_submodular, DomainKind, SetArg, SetFunction, SetPair, SubsetId};

/// Relative tolerance for indicator agreement and optimum comparisons.
pub const AGREEMENT_TOL: f64 = 1e-9;
/// Largest explicit candidate list.
pub const MAX_CANDIDATES: usize = 2_000_000;

const DEN_EPS: f64 = 1e-12;
const GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

type Eval = Arc<dyn Fn(&[f64]) -> Option<f64> + Send + Sync>;

/// Scalar or set-valued instance parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Number(f64),
    Text(String),
    Set(Vec<usize>),
}

/// Whether the continuous optimum equals the discrete one or only bounds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    Exact,
    Relaxation,
}

/// Map from a feasible argument to a point of a continuous form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lift {
    /// `1_A`, `1_A - 1_B`, or stacked block indicators.
    Indicator,
    /// `1_A - 1_{V \ A}`.
    PlusMinus,
    /// `1_A` minus its weighted mean.
    Centered(Vec<f64>),
    /// `b 1_A - a 1_{V \ A}`.
    Box { a: f64, b: f64 },
    /// Indicators of the first `m` blocks of a tuple.
    LeadingBlocks(usize),
}

impl Lift {
    pub fn apply(&self, arg: &SetArg, n: usize) -> Vec<f64> {
        match self {
            Lift::Indicator => arg.indicator(n),
            Lift::PlusMinus => arg
                .indicator(n)
                .into_iter()
                .map(|v| 2.0 * v - 1.0)
                .collect(),
            Lift::Centered(w) => {
                let x = arg.indicator(n);
                let total: f64 = w.iter().sum();
                let mean = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / total;
                x.into_iter().map(|v| v - mean).collect()
            }
            Lift::Box { a, b } => arg
                .indicator(n)
                .into_iter()
                .map(|v| if v > 0.0 { *b } else { -*a })
                .collect(),
            Lift::LeadingBlocks(m) => match arg {
                SetArg::Tuple(t) => t.iter().take(*m).flat_map(|s| s.indicator(n)).collect(),
                other => other.indicator(n),
            },
        }
    }
}

/// Admissible points of a continuous form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointDomain {
    Free,
    Nonnegative,
    /// `sum x_i = 0`.
    SumZero,
    /// `sum mu_i x_i = 0`.
    WeightedSumZero(Vec<f64>),
    /// `min x + max x = 0`.
    MinMaxBalanced,
    /// Zero outside the listed coordinates.
    Support(Vec<usize>),
    /// At most `k` nonzero coordinates.
    SupportAtMost(usize),
    /// `blocks` nonnegative blocks of length `n` with pairwise disjoint supports.
    DisjointSupports { blocks: usize, n: usize },
    /// `-a <= x_i <= b`.
    Box { a: f64, b: f64 },
    /// Cone generated by chains of lifted feasible arguments.
    Family,
}

impl PointDomain {
    pub fn name(&self) -> String {
        match self {
            PointDomain::Free => "free".into(),
            PointDomain::Nonnegative => "nonnegative".into(),
            PointDomain::SumZero => "sum-zero".into(),
            PointDomain::WeightedSumZero(_) => "weighted-sum-zero".into(),
            PointDomain::MinMaxBalanced => "min-max-balanced".into(),
            PointDomain::Support(s) => format!("support{s:?}"),
            PointDomain::SupportAtMost(k) => format!("support-at-most-{k}"),
            PointDomain::DisjointSupports { blocks, .. } => format!("disjoint-supports-{blocks}"),
            PointDomain::Box { a, b } => format!("box[-{a},{b}]"),
            PointDomain::Family => "family-cone".into(),
        }
    }

    /// Membership test; the family cone is not checked here.
    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = 1e-9 * (1.0 + linf(x));
        match self {
            PointDomain::Free | PointDomain::Family => true,
            PointDomain::Nonnegative => x.iter().all(|&v| v >= -tol),
            PointDomain::SumZero => x.iter().sum::<f64>().abs() <= tol * x.len() as f64,
            PointDomain::WeightedSumZero(mu) => {
                dot(mu, x).abs() <= tol * mu.iter().sum::<f64>()
            }
            PointDomain::MinMaxBalanced => (max_of(x) + min_of(x)).abs() <= tol,
            PointDomain::Support(s) => x
                .iter()
                .enumerate()
                .all(|(i, &v)| v == 0.0 || s.contains(&i)),
            PointDomain::SupportAtMost(k) => x.iter().filter(|&&v| v != 0.0).count() <= *k,
            PointDomain::DisjointSupports { blocks, n } => (0..*n).all(|i| {
                let vals: Vec<f64> = (0..*blocks).map(|l| x[l * n + i]).collect();
                vals.iter().all(|&v| v >= 0.0) && vals.iter().filter(|&&v| v > 0.0).count() <= 1
            }),
            PointDomain::Box { a, b } => x.iter().all(|&v| v >= -a - tol && v <= b + tol),
        }
    }

    /// Random point; `None` for the family cone.
    pub fn sample<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Option<Vec<f64>> {
        let mut x: Vec<f64> = (0..dim).map(|_| raw(rng)).collect();
        if x.iter().all(|&v| v == 0.0) && dim > 0 {
            x[rng.gen_range(0..dim)] = 1.0;
        }
        match self {
            PointDomain::Free => {}
            PointDomain::Nonnegative => x.iter_mut().for_each(|v| *v = v.abs()),
            PointDomain::SumZero => center(&mut x, &vec![1.0; dim]),
            PointDomain::WeightedSumZero(mu) => center(&mut x, mu),
            PointDomain::MinMaxBalanced => {
                let s = (max_of(&x) + min_of(&x)) / 2.0;
                x.iter_mut().for_each(|v| *v -= s);
            }
            PointDomain::Support(s) => {
                for (i, v) in x.iter_mut().enumerate() {
                    if !s.contains(&i) {
                        *v = 0.0;
                    }
                }
                if let Some(&i) = s.choose(rng) {
                    if x[i] == 0.0 {
                        x[i] = 1.0;
                    }
                }
            }
            PointDomain::SupportAtMost(k) => {
                let mut idx: Vec<usize> = (0..dim).collect();
                idx.shuffle(rng);
                let keep = rng.gen_range(1..=(*k).clamp(1, dim.max(1)));
                for &i in &idx[keep..] {
                    x[i] = 0.0;
                }
                if x.iter().all(|&v| v == 0.0) {
                    x[idx[0]] = 1.0;
                }
            }
            PointDomain::DisjointSupports { blocks, n } => {
                x = vec![0.0; blocks * n];
                for i in 0..*n {
                    let l = rng.gen_range(0..=*blocks);
                    if l < *blocks {
                        x[l * n + i] = raw(rng).abs();
                    }
                }
                if x.iter().all(|&v| v == 0.0) {
                    x[rng.gen_range(0..blocks * n)] = 1.0;
                }
            }
            PointDomain::Box { a, b } => {
                for v in x.iter_mut() {
                    *v = if rng.gen_bool(0.5) {
                        if rng.gen_bool(0.5) {
                            -*a
                        } else {
                            *b
                        }
                    } else {
                        rng.gen_range(-*a..=*b)
                    };
                }
            }
            PointDomain::Family => return None,
        }
        Some(x)
    }
}

/// Closed-form continuous objective of a problem.
#[derive(Clone)]
pub struct ContinuousForm {
    pub name: String,
    pub dim: usize,
    pub domain: PointDomain,
    pub lift: Lift,
    pub kind: FormKind,
    /// True when the form reproduces `f / g` at every lifted feasible argument.
    pub indicator_exact: bool,
    eval: Eval,
}

impl fmt::Debug for ContinuousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContinuousForm({}, dim {})", self.name, self.dim)
    }
}

impl ContinuousForm {
    pub fn new(
        name: &str,
        dim: usize,
        domain: PointDomain,
        lift: Lift,
        eval: impl Fn(&[f64]) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            domain,
            lift,
            kind: FormKind::Exact,
            indicator_exact: true,
            eval: Arc::new(eval),
        }
    }

    fn relaxation(mut self) -> Self {
        self.kind = FormKind::Relaxation;
        self
    }

    fn inexact(mut self) -> Self {
        self.indicator_exact = false;
        self
    }

    /// Objective value; `None` where the denominator vanishes.
    pub fn eval(&self, x: &[f64]) -> Option<f64> {
        assert_eq!(x.len(), self.dim, "point dimension mismatch for form {}", self.name);
        (self.eval)(x)
    }

    pub fn summary(&self) -> FormSummary {
        FormSummary {
            name: self.name.clone(),
            dim: self.dim,
            domain: self.domain.name(),
            kind: self.kind,
            indicator_exact: self.indicator_exact,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormSummary {
    pub name: String,
    pub dim: usize,
    pub domain: String,
    pub kind: FormKind,
    pub indicator_exact: bool,
}

/// Convex split of a continuous form for the iterative solvers.
#[derive(Clone, Debug)]
pub struct SolverWiring {
    pub problem: RatioProblem,
    /// Start points are lifted feasible arguments.
    pub lift: Lift,
    /// Shift points to `min x + max x = 0` before extracting level sets.
    pub balance: bool,
}

/// A feasible argument where a form disagrees with the discrete ratio.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub form: String,
    pub arg: SetArg,
    pub discrete: f64,
    pub continuous: Option<f64>,
}

/// Outcome of evaluating a form at random feasible points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RandomCheck {
    pub form: String,
    pub samples: usize,
    pub evaluated: usize,
    /// Best value found in the problem sense.
    pub best: Option<f64>,
    /// Points beating the discrete optimum beyond tolerance.
    pub violations: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub id: String,
    pub n: usize,
    pub m: usize,
    pub sense: Sense,
    pub domain: String,
    pub params: BTreeMap<String, Param>,
    pub forms: Vec<FormSummary>,
    pub solver: bool,
}

/// A graph problem with its discrete and continuous formulations.
#[derive(Clone)]
pub struct ProblemInstance {
    pub id: String,
    pub graph: Graph,
    pub params: BTreeMap<String, Param>,
    pub sense: Sense,
    pub f: SetFunction,
    pub g: Option<SetFunction>,
    pub family: FeasibleDomain,
    pub forms: Vec<ContinuousForm>,
    candidates: Option<Arc<Vec<SetArg>>>,
    solver: Option<SolverWiring>,
    feasible: Arc<OnceLock<Result<Arc<Vec<SetArg>>>>>,
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProblemInstance({}, {})", self.id, self.graph)
    }
}

impl ProblemInstance {
    fn new(
        id: &str,
        graph: &Graph,
        sense: Sense,
        f: SetFunction,
        g: Option<SetFunction>,
        family: FeasibleDomain,
    ) -> Self {
        Self {
            id: id.into(),
            graph: graph.clone(),
            params: BTreeMap::new(),
            sense,
            f,
            g,
            family,
            forms: Vec::new(),
            candidates: None,
            solver: None,
            feasible: Arc::new(OnceLock::new()),
        }
    }

    fn param(mut self, key: &str, value: Param) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    fn form(mut self, form: ContinuousForm) -> Self {
        self.forms.push(form);
        self
    }

    fn candidates(mut self, c: Vec<SetArg>) -> Self {
        self.candidates = Some(Arc::new(c));
        self
    }

    fn solver(mut self, problem: RatioProblem, lift: Lift, balance: bool) -> Self {
        self.solver = Some(SolverWiring {
            problem,
            lift,
            balance,
        });
        self
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    /// Whether the feasible arguments come from an explicit candidate list.
    pub fn has_candidates(&self) -> bool {
        self.candidates.is_some()
    }

    /// Discrete objective at `a`; `None` outside the family or where `g <= 0`.
    pub fn value(&self, a: &SetArg) -> Result<Option<f64>> {
        if a.is_empty() || !self.family.contains(a) {
            return Ok(None);
        }
        let fv = self.f.evaluate(a)?;
        match &self.g {
            None => Ok(Some(fv)),
            Some(g) => {
                let gv = g.evaluate(a)?;
                Ok((gv > 0.0).then(|| fv / gv))
            }
        }
    }

    /// All arguments with a defined objective value, in enumeration order.
    pub fn feasible_args(&self) -> Result<Arc<Vec<SetArg>>> {
        self.feasible
            .get_or_init(|| self.enumerate_feasible().map(Arc::new))
            .clone()
    }

    fn enumerate_feasible(&self) -> Result<Vec<SetArg>> {
        let keep = |a: SetArg| -> Option<SetArg> {
            matches!(self.value(&a), Ok(Some(_))).then_some(a)
        };
        if let Some(c) = &self.candidates {
            return Ok(c.par_iter().cloned().filter_map(keep).collect());
        }
        let n = self.n();
        let full = SubsetId::full(n).0;
        let out = match self.f.kind() {
            DomainKind::Powerset => {
                if n > MAX_SUBSET_N {
                    return Err(too_large("subset enumeration", MAX_SUBSET_N, n));
                }
                (1..1u64 << n)
                    .into_par_iter()
                    .filter_map(|s| keep(SetArg::Set(SubsetId(s))))
                    .collect()
            }
            DomainKind::DisjointPair => {
                if n > MAX_PAIR_N {
                    return Err(too_large("pair enumeration", MAX_PAIR_N, n));
                }
                (1..3usize.pow(n as u32))
                    .into_par_iter()
                    .filter_map(|c| keep(SetArg::Pair(SetPair::from_code(c, n))))
                    .collect()
            }
            DomainKind::KWay(k) => {
                if n * k > MAX_SUBSET_N {
                    return Err(too_large("tuple enumeration", MAX_SUBSET_N, n * k));
                }
                (1..1u64 << (n * k))
                    .into_par_iter()
                    .filter_map(|c| {
                        keep(SetArg::Tuple(
                            (0..k).map(|l| SubsetId(c >> (l * n) & full)).collect(),
                        ))
                    })
                    .collect()
            }
            DomainKind::KWayPair(k) => {
                if n * k > MAX_PAIR_N {
                    return Err(too_large("pair-tuple enumeration", MAX_PAIR_N, n * k));
                }
                let base = 3usize.pow(n as u32);
                (1..base.pow(k as u32))
                    .into_par_iter()
                    .filter_map(|c| {
                        keep(SetArg::PairTuple(
                            (0..k)
                                .map(|l| SetPair::from_code(c / base.pow(l as u32) % base, n))
                                .collect(),
                        ))
                    })
                    .collect()
            }
        };
        Ok(out)
    }

    /// Exact optimum of the discrete ratio.
    pub fn discrete_optimum(&self) -> Result<OracleResult> {
        if self.candidates.is_none() {
            return optimize_subsets(&self.f, self.g.as_ref(), self.sense, &|a| {
                self.family.contains(a)
            });
        }
        let args = self.feasible_args()?;
        let values: Vec<f64> = args
            .par_iter()
            .map(|a| self.value(a).map(|v| v.expect("feasible")))
            .collect::<Result<_>>()?;
        best_of(self.sense, args.iter().cloned().zip(values)).ok_or(Error::NoFeasibleLevel)
    }

    pub fn form_named(&self, name: &str) -> Result<&ContinuousForm> {
        self.forms.iter().find(|f| f.name == name).ok_or_else(|| {
            Error::InvalidArgument(format!("problem {} has no form named {name}", self.id))
        })
    }

    pub fn lift(&self, form: &ContinuousForm, a: &SetArg) -> Vec<f64> {
        form.lift.apply(a, self.graph_dim())
    }

    fn graph_dim(&self) -> usize {
        self.f.n()
    }

    /// Feasible arguments where `form` differs from `f / g` beyond [`AGREEMENT_TOL`].
    pub fn indicator_mismatches(&self, form: &ContinuousForm) -> Result<Vec<Mismatch>> {
        let args = self.feasible_args()?;
        let out: Vec<Option<Mismatch>> = args
            .par_iter()
            .map(|a| -> Result<Option<Mismatch>> {
                let d = self.value(a)?.expect("feasible");
                let c = form.eval(&self.lift(form, a));
                let ok = c.is_some_and(|c| close(c, d));
                Ok((!ok).then(|| Mismatch {
                    form: form.name.clone(),
                    arg: a.clone(),
                    discrete: d,
                    continuous: c,
                }))
            })
            .collect::<Result<_>>()?;
        Ok(out.into_iter().flatten().collect())
    }

    /// Best form value over lifted feasible arguments.
    pub fn best_indicator_value(&self, form: &ContinuousForm) -> Result<Option<(SetArg, f64)>> {
        let args = self.feasible_args()?;
        let vals: Vec<Option<f64>> = args
            .par_iter()
            .map(|a| form.eval(&self.lift(form, a)))
            .collect();
        let mut best: Option<(SetArg, f64)> = None;
        for (a, v) in args.iter().zip(vals) {
            if let Some(v) = v {
                if best.as_ref().is_none_or(|(_, b)| self.sense.better(v, *b)) {
                    best = Some((a.clone(), v));
                }
            }
        }
        Ok(best)
    }

    /// Random admissible point of `form`.
    pub fn sample_point<R: Rng + ?Sized>(&self, form: &ContinuousForm, rng: &mut R) -> Result<Vec<f64>> {
        if let Some(x) = form.domain.sample(form.dim, rng) {
            return Ok(x);
        }
        let args = self.feasible_args()?;
        if args.is_empty() {
            return Err(Error::NoFeasibleLevel);
        }
        let mut chain = vec![self.lift(form, args.choose(rng).expect("nonempty"))];
        for _ in 0..3 {
            let last = chain.last().expect("nonempty").clone();
            let next = (0..16).find_map(|_| {
                let v = self.lift(form, args.choose(rng).expect("nonempty"));
                (v != last && v.iter().zip(&last).all(|(a, b)| a >= b)).then_some(v)
            });
            match next {
                Some(v) => chain.push(v),
                None => break,
            }
        }
        let mut x = vec![0.0; form.dim];
        for v in chain {
            let u = rng.gen_range(0.1..1.0);
            x.iter_mut().zip(&v).for_each(|(o, a)| *o += u * a);
        }
        Ok(x)
    }

    /// Evaluate `form` at `samples` random admissible points against `optimum`.
    pub fn random_check(
        &self,
        form: &ContinuousForm,
        optimum: f64,
        samples: usize,
        seed: u64,
    ) -> Result<RandomCheck> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<Vec<f64>> = (0..samples)
            .map(|_| self.sample_point(form, &mut rng))
            .collect::<Result<_>>()?;
        let vals: Vec<Option<f64>> = points.par_iter().map(|x| form.eval(x)).collect();
        let tol = AGREEMENT_TOL * optimum.abs().max(1.0);
        let mut out = RandomCheck {
            form: form.name.clone(),
            samples,
            evaluated: 0,
            best: None,
            violations: Vec::new(),
        };
        for (x, v) in points.into_iter().zip(vals) {
            let Some(v) = v else { continue };
            out.evaluated += 1;
            if out.best.is_none_or(|b| self.sense.better(v, b)) {
                out.best = Some(v);
            }
            let beats = match self.sense {
                Sense::Min => v < optimum - tol,
                Sense::Max => v > optimum + tol,
            };
            if beats && out.violations.len() < 8 {
                out.violations.push(x);
            }
        }
        Ok(out)
    }

    pub fn solver_wiring(&self) -> Option<&SolverWiring> {
        self.solver.as_ref()
    }

    /// Best level argument of a solver point.
    pub fn extract(&self, x: &[f64]) -> Result<(SetArg, f64)> {
        let w = self
            .solver
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("problem {} has no solver wiring", self.id)))?;
        let mut y = x.to_vec();
        if w.balance {
            let s = (max_of(&y) + min_of(&y)) / 2.0;
            y.iter_mut().for_each(|v| *v -= s);
        }
        extract_best_settuple(&w.problem, &y)
    }

    pub fn summary(&self) -> InstanceSummary {
        InstanceSummary {
            id: self.id.clone(),
            n: self.graph.n(),
            m: self.graph.m(),
            sense: self.sense,
            domain: self.f.kind().to_string(),
            params: self.params.clone(),
            forms: self.forms.iter().map(|f| f.summary()).collect(),
            solver: self.solver.is_some(),
        }
    }
}

fn best_of(sense: Sense, items: impl Iterator<Item = (SetArg, f64)>) -> Option<OracleResult> {
    let mut out: Option<OracleResult> = None;
    for (a, v) in items {
        match &mut out {
            None => {
                out = Some(OracleResult {
                    optimum: v,
                    witnesses: vec![a],
                    evaluations: 1,
                })
            }
            Some(r) => {
                r.evaluations += 1;
                if sense.better(v, r.optimum) {
                    r.optimum = v;
                    r.witnesses = vec![a];
                } else if v == r.optimum && r.witnesses.len() < 16 {
                    r.witnesses.push(a);
                }
            }
        }
    }
    out
}

/// Relative closeness at [`AGREEMENT_TOL`].
pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= AGREEMENT_TOL * a.abs().max(b.abs()).max(1.0)
}

fn raw<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        GRID[rng.gen_range(0..GRID.len())]
    } else {
        rng.gen_range(-1.0..=1.0)
    }
}

fn center(x: &mut [f64], w: &[f64]) {
    let m = dot(w, x) / w.iter().sum::<f64>();
    x.iter_mut().for_each(|v| *v -= m);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

fn max_of(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::INFINITY, f64::min)
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > DEN_EPS).then(|| num / den)
}

/// `min_t sum_i w_i |x_i - t|`, attained at a weighted median.
pub fn min_translate(x: &[f64], w: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..x.len()).filter(|&i| w[i] > 0.0).collect();
    if idx.is_empty() {
        return 0.0;
    }
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let total: f64 = idx.iter().map(|&i| w[i]).sum();
    let mut acc = 0.0;
    let mut t = x[idx[0]];
    for &i in &idx {
        acc += w[i];
        if 2.0 * acc >= total {
            t = x[i];
            break;
        }
    }
    idx.iter().map(|&i| w[i] * (x[i] - t).abs()).sum()
}

type WEdge = (usize, usize, f64);

fn wedges(g: &Graph) -> Vec<WEdge> {
    g.edges().iter().map(|e| (e.u, e.v, e.w)).collect()
}

fn edge_sum(edges: &[WEdge], x: &[f64], h: impl Fn(f64, f64) -> f64) -> f64 {
    edges.iter().map(|&(i, j, w)| w * h(x[i], x[j])).sum()
}

fn proper_family(n: usize) -> FeasibleDomain {
    let full = SubsetId::full(n);
    FeasibleDomain::new("proper subsets", move |a| {
        matches!(a, SetArg::Set(s) if !s.is_empty() && *s != full)
    })
}

fn cut_fn(g: &Graph) -> Result<SetFunction> {
    let gc = g.clone();
    SetFunction::from_fn(g.n(), move |a| gc.cut(a))
}

/// `cut(S) / 2`, so a partition sum counts each separating edge once.
fn half_cut_fn(g: &Graph) -> Result<SetFunction> {
    let gc = g.clone();
    SetFunction::from_fn(g.n(), move |a| gc.cut(a) / 2.0)
}

fn edge_count(g: &Graph, a: SubsetId) -> usize {
    g.edges()
        .iter()
        .filter(|e| a.contains(e.u) && a.contains(e.v))
        .count()
}

fn require_edges(g: &Graph, what: &str) -> Result<()> {
    if g.m() == 0 {
        return Err(Error::InvalidArgument(format!("{what} needs at least one edge")));
    }
    Ok(())
}

/// Max cut with the `p`-power pair form and the dual form.
pub fn maxcut(g: &Graph, p: f64) -> Result<ProblemInstance> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("maxcut exponent must be >= 1, got {p}")));
    }
    let n = g.n();
    let f = cut_fn(g)?;
    let e = wedges(g);
    let (e1, e2) = (e.clone(), e.clone());
    let terms: Vec<AbsTerm> = e
        .iter()
        .map(|&(i, j, w)| AbsTerm {
            coefs: vec![(i, 1.0), (j, -1.0)],
            weight: w,
        })
        .collect();
    let problem = RatioProblem::new(
        ConvexComponent::abs_power("sum |x_i - x_j|^p", n, terms, p)?,
        ConvexComponent::zero(n),
        ConvexComponent::linf_power(n, 2.0, p)?,
        ConvexComponent::zero(n),
        Sense::Max,
    )?
    .with_discrete(f.clone(), SetFunction::constant(n, 1.0)?, FeasibleDomain::all());
    Ok(
        ProblemInstance::new("maxcut", g, Sense::Max, f, None, FeasibleDomain::all())
            .param("p", Param::Number(p))
            .form(ContinuousForm::new("pair", n, PointDomain::Free, Lift::PlusMinus, move |x| {
                let num = edge_sum(&e1, x, |a, b| (a - b).abs().powf(p));
                ratio(num, (2.0 * linf(x)).powf(p))
            }))
            .form(ContinuousForm::new("dual", n, PointDomain::Free, Lift::PlusMinus, move |x| {
                let num = edge_sum(&e2, x, |a, b| (a.abs() + b.abs() - (a + b).abs()).powf(p));
                ratio(num, (2.0 * linf(x)).powf(p))
            }))
            .solver(problem, Lift::PlusMinus, false),
    )
}

/// `sum sin^2((t_i - t_j)/2) sin^2((t_i + t_j)/2)` and `1/4 sum (cos t_i - cos t_j)^2` over edges.
pub fn maxcut_angle_identity(g: &Graph, theta: &[f64]) -> (f64, f64) {
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for e in g.edges() {
        let (a, b) = (theta[e.u], theta[e.v]);
        lhs += e.w * ((a - b) / 2.0).sin().powi(2) * ((a + b) / 2.0).sin().powi(2);
        rhs += e.w * 0.25 * (a.cos() - b.cos()).powi(2);
    }
    (lhs, rhs)
}

/// Min cut over disjoint pairs of nonempty sets.
pub fn mincut(g: &Graph) -> Result<ProblemInstance> {
    let n = g.n();
    let gc = g.clone();
    let f = SetFunction::pair_from_fn(n, move |p| (gc.cut(p.pos) + gc.cut(p.neg)) / 2.0)?;
    let family = FeasibleDomain::new("both parts nonempty", |a| {
        matches!(a, SetArg::Pair(p) if !p.pos.is_empty() && !p.neg.is_empty())
    });
    let e = wedges(g);
    let (e1, e2) = (e.clone(), e.clone());
    let problem = RatioProblem::new(
        ConvexComponent::edge_differences(n, &e)?,
        ConvexComponent::zero(n),
        ConvexComponent::range(n),
        ConvexComponent::zero(n),
        Sense::Min,
    )?
    .with_discrete(f.clone(), SetFunction::constant_pair(n, 1.0)?, family.clone());
    Ok(ProblemInstance::new("mincut", g, Sense::Min, f, None, family)
        .form(ContinuousForm::new(
            "pair",
            n,
            PointDomain::MinMaxBalanced,
            Lift::Indicator,
            move |x| ratio(edge_sum(&e1, x, |a, b| (a - b).abs()), 2.0 * linf(x)),
        ))
        .form(ContinuousForm::new("range", n, PointDomain::Free, Lift::Indicator, move |x| {
            ratio(edge_sum(&e2, x, |a, b| (a - b).abs()), max_of(x) - min_of(x))
        }))
        .solver(problem, Lift::Indicator, true))
}

fn pairwise_disjoint(t: &[SubsetId]) -> bool {
    let mut acc = SubsetId(0);
    for s in t {
        if !acc.intersection(*s).is_empty() {
            return false;
        }
        acc = acc.union(*s);
    }
    true
}

fn padded_partitions(n: usize, k: usize) -> Result<Vec<Vec<SubsetId>>> {
    if n > MAX_PARTITION_N {
        return Err(too_large("partition enumeration", MAX_PARTITION_N, n));
    }
    Ok(restricted_growth_strings(n)
        .iter()
        .map(|r| blocks_of(r))
        .filter(|b| b.len() <= k)
        .map(|mut b| {
            b.resize(k, SubsetId(0));
            b
        })
        .collect())
}

/// Max k-cut: largest weight of edges between different blocks of at most `k` parts.
pub fn max_kcut(g: &Graph, k: usize) -> Result<ProblemInstance> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!("max k-cut needs 2 <= k <= n, got k = {k}")));
    }
    let gc = g.clone();
    let f = SetFunction::kway_from_fn(n, k, move |t| t.iter().map(|&s| gc.cut(s)).sum::<f64>() / 2.0)?;
    let family = FeasibleDomain::new("pairwise disjoint", |a| {
        matches!(a, SetArg::Tuple(t) if pairwise_disjoint(t))
    });
    let cands = padded_partitions(n, k)?
        .into_iter()
        .map(SetArg::Tuple)
        .collect();
    let e = wedges(g);
    let e2 = e.clone();
    let kway = move |x: &[f64]| {
        let num: f64 = (0..k)
            .map(|l| edge_sum(&e, &x[l * n..(l + 1) * n], |a, b| (a - b).abs()))
            .sum();
        ratio(num, 2.0 * linf(x))
    };
    let m = k - 1;
    let composition = move |x: &[f64]| {
        let top: Vec<f64> = (0..n)
            .map(|i| (0..m).map(|l| x[l * n + i]).fold(0.0f64, f64::max))
            .collect();
        let blocks: f64 = (0..m)
            .map(|l| edge_sum(&e2, &x[l * n..(l + 1) * n], |a, b| (a - b).abs()))
            .sum();
        ratio(blocks + edge_sum(&e2, &top, |a, b| (a - b).abs()), 2.0 * max_of(x))
    };
    Ok(ProblemInstance::new("max-kcut", g, Sense::Max, f, None, family)
        .param("k", Param::Number(k as f64))
        .candidates(cands)
        .form(ContinuousForm::new(
            "kway",
            n * k,
            PointDomain::DisjointSupports { blocks: k, n },
            Lift::Indicator,
            kway,
        ))
        .form(ContinuousForm::new(
            "composition",
            n * m,
            PointDomain::DisjointSupports { blocks: m, n },
            Lift::LeadingBlocks(m),
            composition,
        )))
}

/// Cheeger cut `min cut(A) / min(vol A, vol A^c)`.
pub fn cheeger_cut(g: &Graph) -> Result<ProblemInstance> {
    let n = g.n();
    let f = cut_fn(g)?;
    let gc = g.clone();
    let gmin = SetFunction::from_fn(n, move |a| gc.vol(a).min(gc.vol(a.complement(gc.n()))))?;
    let problem = RatioProblem::from_set_functions(&f, &gmin, proper_family(n), Sense::Min)?;
    let e = wedges(g);
    let d = g.degrees().to_vec();
    Ok(
        ProblemInstance::new("cheeger", g, Sense::Min, f, Some(gmin), proper_family(n))
            .form(ContinuousForm::new("median", n, PointDomain::Free, Lift::Indicator, move |x| {
                ratio(edge_sum(&e, x, |a, b| (a - b).abs()), min_translate(x, &d))
            }))
            .solver(problem, Lift::Indicator, false),
    )
}

fn outer_boundary(g: &Graph, a: SubsetId) -> SubsetId {
    let mut b = SubsetId(0);
    for e in g.edges() {
        if a.contains(e.u) && !a.contains(e.v) {
            b = b.insert(e.v);
        }
        if a.contains(e.v) && !a.contains(e.u) {
            b = b.insert(e.u);
        }
    }
    b
}

fn check_region(g: &Graph, a: SubsetId) -> Result<()> {
    if a.is_empty() || !a.is_subset_of(SubsetId::full(g.n())) {
        return Err(Error::InvalidArgument("region must be a nonempty vertex subset".into()));
    }
    Ok(())
}

/// Dirichlet Cheeger constant `min_{S in A} cut(S) / vol(S)`.
pub fn dirichlet_cheeger(g: &Graph, a: SubsetId) -> Result<ProblemInstance> {
    check_region(g, a)?;
    let n = g.n();
    let f = cut_fn(g)?;
    let gc = g.clone();
    let vol = SetFunction::from_fn(n, move |s| gc.vol(s))?;
    let family = FeasibleDomain::new("subsets of the region", move |x| {
        matches!(x, SetArg::Set(s) if !s.is_empty() && s.is_subset_of(a))
    });
    let inner: Vec<WEdge> = wedges(g)
        .into_iter()
        .filter(|&(i, j, _)| a.contains(i) && a.contains(j))
        .collect();
    let mut outside = vec![0.0; n];
    for e in g.edges() {
        if a.contains(e.u) && !a.contains(e.v) {
            outside[e.u] += e.w;
        }
        if a.contains(e.v) && !a.contains(e.u) {
            outside[e.v] += e.w;
        }
    }
    let d: Vec<f64> = (0..n)
        .map(|i| if a.contains(i) { g.degree(i) } else { 0.0 })
        .collect();
    let eval = move |x: &[f64]| {
        let num = edge_sum(&inner, x, |p, q| (p - q).abs()) + dot(&outside, &l1v(x));
        ratio(num, dot(&d, &l1v(x)))
    };
    Ok(
        ProblemInstance::new("dirichlet-cheeger", g, Sense::Min, f, Some(vol), family)
            .param("region", Param::Set(a.elems()))
            .param("boundary", Param::Set(outer_boundary(g, a).elems()))
            .form(ContinuousForm::new(
                "dirichlet",
                n,
                PointDomain::Support(a.elems()),
                Lift::Indicator,
                eval,
            )),
    )
}

fn l1v(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v.abs()).collect()
}

/// Neumann Cheeger constant of the region `A` with closure `A u boundary(A)`.
pub fn neumann_cheeger(g: &Graph, a: SubsetId) -> Result<ProblemInstance> {
    check_region(g, a)?;
    let n = g.n();
    let closure = a.union(outer_boundary(g, a));
    let inner: Vec<WEdge> = wedges(g)
        .into_iter()
        .filter(|&(i, j, _)| a.contains(i) || a.contains(j))
        .collect();
    let fe = inner.clone();
    let f = SetFunction::from_fn(n, move |s| {
        fe.iter()
            .filter(|&&(i, j, _)| s.contains(i) != s.contains(j))
            .map(|e| e.2)
            .sum()
    })?;
    let gc = g.clone();
    let den = SetFunction::from_fn(n, move |s| {
        gc.vol(s.intersection(a)).min(gc.vol(a.difference(s)))
    })?;
    let family = FeasibleDomain::new("subsets of the closure", move |x| {
        matches!(x, SetArg::Set(s) if !s.is_empty() && s.is_subset_of(closure))
    });
    let d: Vec<f64> = (0..n)
        .map(|i| if a.contains(i) { g.degree(i) } else { 0.0 })
        .collect();
    let eval = move |x: &[f64]| {
        ratio(edge_sum(&inner, x, |p, q| (p - q).abs()), min_translate(x, &d))
    };
    Ok(
        ProblemInstance::new("neumann-cheeger", g, Sense::Min, f, Some(den), family)
            .param("region", Param::Set(a.elems()))
            .param("closure", Param::Set(closure.elems()))
            .form(ContinuousForm::new(
                "neumann",
                n,
                PointDomain::Support(closure.elems()),
                Lift::Indicator,
                eval,
            )),
    )
}

/// Discrete objective used for the independence number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndependenceForm {
    /// `#S (1 - #E(S))`.
    Product,
    /// `#S - #E(S)`.
    Difference,
}

fn independence_on(
    id: &str,
    original: &Graph,
    h: &Graph,
    form: IndependenceForm,
) -> Result<ProblemInstance> {
    if !h.is_unweighted() {
        return Err(Error::InvalidArgument("independence needs an unweighted graph".into()));
    }
    let n = h.n();
    let hc = h.clone();
    let f = match form {
        IndependenceForm::Product => SetFunction::from_fn(n, move |s| {
            s.len() as f64 * (1.0 - edge_count(&hc, s) as f64)
        })?,
        IndependenceForm::Difference => {
            SetFunction::from_fn(n, move |s| s.len() as f64 - edge_count(&hc, s) as f64)?
        }
    };
    let exact = form == IndependenceForm::Difference;
    let e = wedges(h);
    let deg = h.degrees().to_vec();
    let (e1, e2, e3) = (e.clone(), e.clone(), e);
    let d1 = deg.clone();
    let shifted: Vec<f64> = deg.iter().map(|d| d - 1.0).collect();
    let mut far = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !h.has_edge(i, j) {
                far.push((i, j));
            }
        }
    }
    let mut inst = ProblemInstance::new(id, original, Sense::Max, f, None, FeasibleDomain::all())
        .param("objective", Param::Text(format!("{form:?}").to_lowercase()));
    let forms = [
        ContinuousForm::new("lovasz", n, PointDomain::Free, Lift::Indicator, move |x| {
            let i = edge_sum(&e1, x, |a, b| (a - b).abs() + (a + b).abs());
            ratio(2.0 * l1(x) + i - 2.0 * dot(&d1, &l1v(x)), 2.0 * linf(x))
        }),
        ContinuousForm::new("shifted-degree", n, PointDomain::Free, Lift::Indicator, move |x| {
            let i = edge_sum(&e2, x, |a, b| (a - b).abs() + (a + b).abs());
            ratio(i - 2.0 * dot(&shifted, &l1v(x)), 2.0 * linf(x))
        }),
        ContinuousForm::new("min", n, PointDomain::Free, Lift::Indicator, move |x| {
            ratio(l1(x) - edge_sum(&e3, x, |a, b| a.abs().min(b.abs())), linf(x))
        }),
    ];
    for fm in forms {
        inst = inst.form(if exact { fm } else { fm.inexact() });
    }
    Ok(inst.form(
        ContinuousForm::new("quadratic", n, PointDomain::Free, Lift::Indicator, move |x| {
            let s = l1(x);
            let cross: f64 = far.iter().map(|&(i, j)| x[i] * x[j]).sum();
            ratio(s * s, s * s - 2.0 * cross)
        })
        .inexact(),
    ))
}

/// Independence number through the product or difference objective.
pub fn independence_number(g: &Graph, form: IndependenceForm) -> Result<ProblemInstance> {
    independence_on("independence", g, g, form)
}

/// Graph joining vertices at hop distance at most `k`.
pub fn power_graph(g: &Graph, k: usize) -> Graph {
    let n = g.n();
    let mut e = Vec::new();
    for i in 0..n {
        let d = g.bfs_distances(i);
        for j in i + 1..n {
            if d[j] <= k {
                e.push((i, j, 1.0));
            }
        }
    }
    Graph::new(n, e).expect("power graph")
}

/// Largest set with pairwise hop distance above `k`.
pub fn k_independence(g: &Graph, k: usize) -> Result<ProblemInstance> {
    if k == 0 {
        return Err(Error::InvalidArgument("k-independence needs k >= 1".into()));
    }
    let h = power_graph(g, k);
    let n = g.n();
    let mut near = Vec::new();
    let mut degk = vec![0.0; n];
    for i in 0..n {
        let d = g.bfs_distances(i);
        for j in i..n {
            if d[j] <= k {
                near.push((i, j));
            }
        }
        degk[i] = d.iter().filter(|&&v| v <= k).count() as f64;
    }
    let literal = move |x: &[f64]| {
        let s: f64 = near
            .iter()
            .map(|&(i, j)| (x[i] - x[j]).abs() + (x[i] + x[j]).abs())
            .sum();
        let t: f64 = (0..x.len()).map(|i| (degk[i] - 1.0) * x[i].abs()).sum();
        ratio(s - 2.0 * t, 2.0 * linf(x))
    };
    Ok(independence_on("k-independence", g, &h, IndependenceForm::Difference)?
        .param("k", Param::Number(k as f64))
        .form(ContinuousForm::new("distance", n, PointDomain::Free, Lift::Indicator, literal)))
}

/// Maximum matching as independence on the line graph; ground set is the edge list.
pub fn matching_number(g: &Graph) -> Result<ProblemInstance> {
    require_edges(g, "matching")?;
    if !g.is_unweighted() {
        return Err(Error::InvalidArgument("matching needs an unweighted graph".into()));
    }
    independence_on("matching", g, &g.line_graph(), IndependenceForm::Difference)
}

fn check_submodular(f: &SetFunction) -> Result<()> {
    if f.kind() != DomainKind::Powerset {
        return Err(Error::DomainMismatch {
            expected: "powerset".into(),
            got: f.kind().to_string(),
        });
    }
    if f.n() <= 16 && !is_submodular(f)?.holds {
        return Err(Error::Hypothesis("set function is not submodular".into()));
    }
    Ok(())
}

/// Vertex cover minimizing a submodular cost (cardinality by default).
pub fn vertex_cover(g: &Graph, cost: Option<SetFunction>) -> Result<ProblemInstance> {
    let n = g.n();
    let f = match cost {
        Some(f) => f,
        None => SetFunction::cardinality(n)?,
    };
    if f.n() != n {
        return Err(Error::InvalidArgument("cost ground set differs from the graph".into()));
    }
    check_submodular(&f)?;
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let family = FeasibleDomain::new("vertex covers", move |a| {
        matches!(a, SetArg::Set(s) if edges.iter().all(|&(u, v)| s.contains(u) || s.contains(v)))
    });
    let fc = f.clone();
    Ok(
        ProblemInstance::new("vertex-cover", g, Sense::Min, f, None, family).form(
            ContinuousForm::new("lovasz", n, PointDomain::Family, Lift::Indicator, move |x| {
                ratio(extension_value(&fc, x).ok()?, max_of(x))
            }),
        ),
    )
}

/// Minimum of `f^L` over the covering polytope `{x in [0,1]^n : x_i + x_j >= 1}`.
///
/// Minimizers are searched over half-integral points, where one always exists.
pub fn vertex_cover_relaxation(g: &Graph, cost: Option<SetFunction>) -> Result<(f64, Vec<f64>)> {
    let n = g.n();
    if n > MAX_PAIR_N {
        return Err(too_large("half-integral enumeration", MAX_PAIR_N, n));
    }
    let f = match cost {
        Some(f) => f,
        None => SetFunction::cardinality(n)?,
    };
    check_submodular(&f)?;
    let total = 3usize.pow(n as u32);
    let best = (0..total)
        .into_par_iter()
        .filter_map(|c| {
            let x: Vec<f64> = (0..n)
                .map(|i| (c / 3usize.pow(i as u32) % 3) as f64 / 2.0)
                .collect();
            g.edges()
                .iter()
                .all(|e| x[e.u] + x[e.v] >= 1.0)
                .then(|| (extension_value(&f, &x).expect("dimension"), c, x))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .ok_or(Error::NoFeasibleLevel)?;
    Ok((best.0, best.2))
}

fn check_terminals(n: usize, terminals: &[usize]) -> Result<()> {
    let k = terminals.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n terminals, got {k}")));
    }
    let mut seen = SubsetId(0);
    for &t in terminals {
        if t >= n || seen.contains(t) {
            return Err(Error::InvalidArgument("terminals must be distinct vertices".into()));
        }
        seen = seen.insert(t);
    }
    Ok(())
}

/// Partition into `k` blocks, block `l` holding terminal `l`, minimizing `sum_l f(V_l)`.
///
/// The default cost is half the cut, giving the weight of edges between blocks.
pub fn multiway_partition(
    g: &Graph,
    cost: Option<SetFunction>,
    terminals: &[usize],
) -> Result<ProblemInstance> {
    let n = g.n();
    check_terminals(n, terminals)?;
    let base = match cost {
        Some(f) => f,
        None => half_cut_fn(g)?,
    };
    check_submodular(&base)?;
    let k = terminals.len();
    let free: Vec<usize> = (0..n).filter(|i| !terminals.contains(i)).collect();
    let count = (k as f64).powi(free.len() as i32);
    if count > MAX_CANDIDATES as f64 {
        return Err(too_large("terminal assignments", MAX_CANDIDATES, count));
    }
    let mut cands = Vec::with_capacity(count as usize);
    for mut c in 0..count as usize {
        let mut t: Vec<SubsetId> = terminals.iter().map(|&v| SubsetId::singleton(v)).collect();
        for &i in &free {
            t[c % k] = t[c % k].insert(i);
            c /= k;
        }
        cands.push(SetArg::Tuple(t));
    }
    let bf = base.clone();
    let f = SetFunction::kway_from_fn(n, k, move |t| t.iter().map(|&s| bf.set_value(s)).sum())?;
    let term = terminals.to_vec();
    let full = SubsetId::full(n);
    let family = FeasibleDomain::new("terminal partitions", move |a| match a {
        SetArg::Tuple(t) => {
            pairwise_disjoint(t)
                && t.iter().fold(SubsetId(0), |u, s| u.union(*s)) == full
                && term.iter().zip(t).all(|(&v, s)| s.contains(v))
        }
        _ => false,
    });
    let bc = base;
    let eval = move |x: &[f64]| {
        let num: f64 = (0..k)
            .map(|l| extension_value(&bc, &x[l * n..(l + 1) * n]).expect("dimension"))
            .sum();
        ratio(num, linf(x))
    };
    Ok(
        ProblemInstance::new("multiway", g, Sense::Min, f, None, family)
            .param("terminals", Param::Set(terminals.to_vec()))
            .candidates(cands)
            .form(ContinuousForm::new("kway", n * k, PointDomain::Family, Lift::Indicator, eval)),
    )
}

/// Certified bound from Frank-Wolfe on the product of simplices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelaxationBound {
    /// Lower bound on the relaxed, hence the discrete, optimum.
    pub lower: f64,
    /// Relaxed objective at the final iterate.
    pub relaxed: f64,
    /// Best discrete value among roundings of the iterates.
    pub rounded: f64,
    pub iterations: usize,
}

/// Convex relaxation of [`multiway_partition`]: `min sum_l f^L(x^l)` with rows in the simplex.
pub fn multiway_relaxation(
    g: &Graph,
    cost: Option<SetFunction>,
    terminals: &[usize],
    iterations: usize,
) -> Result<RelaxationBound> {
    let n = g.n();
    check_terminals(n, terminals)?;
    let f = match cost {
        Some(f) => f,
        None => half_cut_fn(g)?,
    };
    check_submodular(&f)?;
    let k = terminals.len();
    let owner: Vec<Option<usize>> = (0..n)
        .map(|i| terminals.iter().position(|&t| t == i))
        .collect();
    let mut x = vec![0.0; n * k];
    for i in 0..n {
        match owner[i] {
            Some(l) => x[l * n + i] = 1.0,
            None => (0..k).for_each(|l| x[l * n + i] = 1.0 / k as f64),
        }
    }
    let objective = |x: &[f64]| -> Result<f64> {
        (0..k).map(|l| extension_value(&f, &x[l * n..(l + 1) * n])).sum()
    };
    let rounded_value = |x: &[f64]| -> f64 {
        let mut blocks = vec![SubsetId(0); k];
        for i in 0..n {
            let l = owner[i].unwrap_or_else(|| {
                (0..k)
                    .max_by(|&a, &b| x[a * n + i].total_cmp(&x[b * n + i]).then(b.cmp(&a)))
                    .expect("k >= 1")
            });
            blocks[l] = blocks[l].insert(i);
        }
        blocks.iter().map(|&s| f.set_value(s)).sum()
    };
    let mut lower = f64::NEG_INFINITY;
    let mut rounded = rounded_value(&x);
    let mut relaxed = objective(&x)?;
    for t in 0..iterations {
        let mut s = vec![0.0; n * k];
        for l in 0..k {
            let sl = subgradient_at(&f, ExtensionKind::Original, &x[l * n..(l + 1) * n])?;
            s[l * n..(l + 1) * n].copy_from_slice(&sl);
        }
        let mut y = vec![0.0; n * k];
        for i in 0..n {
            let l = owner[i].unwrap_or_else(|| {
                (0..k)
                    .min_by(|&a, &b| s[a * n + i].total_cmp(&s[b * n + i]))
                    .expect("k >= 1")
            });
            y[l * n + i] = 1.0;
        }
        relaxed = objective(&x)?;
        let gap: f64 = s.iter().zip(&x).zip(&y).map(|((si, xi), yi)| si * (xi - yi)).sum();
        lower = lower.max(relaxed - gap);
        rounded = rounded.min(rounded_value(&y));
        if gap <= 1e-12 {
            return Ok(RelaxationBound {
                lower,
                relaxed,
                rounded,
                iterations: t + 1,
            });
        }
        let step = 2.0 / (t as f64 + 2.0);
        x.iter_mut().zip(&y).for_each(|(xi, yi)| *xi += step * (yi - *xi));
        rounded = rounded.min(rounded_value(&x));
    }
    Ok(RelaxationBound {
        lower,
        relaxed,
        rounded,
        iterations,
    })
}

/// Coloring objective over pair tuples; its minimum is the chromatic number.
pub fn chromatic_number(g: &Graph) -> Result<ProblemInstance> {
    let n = g.n();
    let gc = g.clone();
    let nf = n as f64;
    let f = SetFunction::kway_pair_from_fn(n, n, move |t| {
        let mut union = SubsetId(0);
        let mut total = 0.0;
        for p in t {
            let s = p.support();
            union = union.union(s);
            total += nf * edge_count(&gc, s) as f64 + if s.is_empty() { 0.0 } else { 1.0 };
        }
        total + nf * (nf - union.len() as f64)
    })?;
    let cands = padded_partitions(n, n)?
        .into_iter()
        .map(|b| {
            SetArg::PairTuple(
                b.into_iter()
                    .map(|s| SetPair::new(s, SubsetId(0)).expect("disjoint"))
                    .collect(),
            )
        })
        .collect();
    let e: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let e2 = e.clone();
    let deg: Vec<f64> = (0..n).map(|j| g.degree_count(j) as f64).collect();
    let tail = move |x: &[f64]| -> f64 {
        let rows: f64 = (0..n).map(|i| linf(&x[i * n..(i + 1) * n])).sum();
        let cols: f64 = (0..n)
            .map(|j| (0..n).fold(0.0f64, |a, i| a.max(x[i * n + j].abs())))
            .sum();
        nf * nf * linf(x) + rows - nf * cols
    };
    let tail2 = tail;
    let closed = move |x: &[f64]| {
        let mins: f64 = (0..n)
            .map(|i| {
                e.iter()
                    .map(|&(a, b)| x[i * n + a].abs().min(x[i * n + b].abs()))
                    .sum::<f64>()
            })
            .sum();
        ratio(nf * mins + tail(x), linf(x))
    };
    let expanded = move |x: &[f64]| {
        let mut s = 0.0;
        let mut d = 0.0;
        for i in 0..n {
            let r = &x[i * n..(i + 1) * n];
            d += (0..n).map(|j| deg[j] * r[j].abs()).sum::<f64>();
            s += e2
                .iter()
                .map(|&(a, b)| (r[a] + r[b]).abs() + (r[a] - r[b]).abs())
                .sum::<f64>();
        }
        ratio(nf * d - nf * s / 2.0 + tail2(x), linf(x))
    };
    Ok(
        ProblemInstance::new("chromatic", g, Sense::Min, f, None, FeasibleDomain::all())
            .candidates(cands)
            .form(ContinuousForm::new("closed", n * n, PointDomain::Free, Lift::Indicator, closed))
            .form(ContinuousForm::new(
                "expanded",
                n * n,
                PointDomain::Free,
                Lift::Indicator,
                expanded,
            )),
    )
}

/// Coloring objective with the squared coverage penalty, over tuples of sets.
pub fn chromatic_sum_objective(g: &Graph, blocks: &[SubsetId]) -> f64 {
    let n = g.n() as f64;
    let inner: f64 = blocks.iter().map(|&s| edge_count(g, s) as f64).sum();
    let used = blocks.iter().filter(|s| !s.is_empty()).count() as f64;
    let covered: f64 = blocks.iter().map(|s| s.len() as f64).sum();
    n * inner + used + n * (n - covered).powi(2)
}

fn split_signed(g: &Graph) -> (Vec<WEdge>, Vec<WEdge>) {
    let (pos, neg): (Vec<_>, Vec<_>) = g.edges().iter().partition(|e| e.sign > 0);
    let conv = |v: Vec<&crate::graph::Edge>| v.into_iter().map(|e| (e.u, e.v, e.w)).collect();
    (conv(pos), conv(neg))
}

/// Frustrated weight of the assignment `1_A - 1_{V \ A}`.
pub fn frustration_value(g: &Graph, a: SubsetId) -> f64 {
    g.edges()
        .iter()
        .filter(|e| (a.contains(e.u) == a.contains(e.v)) != (e.sign > 0))
        .map(|e| e.w)
        .sum()
}

/// Frustration index as the least frustrated edge weight over sign assignments.
///
/// Graphs without negative edges are accepted; their index is `0`.
pub fn frustration_index(g: &Graph) -> Result<ProblemInstance> {
    let n = g.n();
    let gc = g.clone();
    let f = SetFunction::from_fn(n, move |a| frustration_value(&gc, a))?;
    let (pos, neg) = split_signed(g);
    let wneg: f64 = neg.iter().map(|e| e.2).sum();
    let mut f1 = vec![(1.0, ConvexComponent::edge_differences(n, &pos)?)];
    if wneg > 0.0 {
        f1.push((wneg, ConvexComponent::linf(n, 2.0)?));
    }
    let problem = RatioProblem::new(
        ConvexComponent::sum("split numerator", f1)?,
        ConvexComponent::edge_differences(n, &neg)?,
        ConvexComponent::linf(n, 2.0)?,
        ConvexComponent::zero(n),
        Sense::Min,
    )?
    .with_discrete(f.clone(), SetFunction::constant(n, 1.0)?, FeasibleDomain::all());
    let signed: Vec<(usize, usize, f64, f64)> = g
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.w, f64::from(e.sign)))
        .collect();
    let (p1, n1) = (pos.clone(), neg.clone());
    let split = move |x: &[f64]| {
        let d = edge_sum(&p1, x, |a, b| (a - b).abs()) - edge_sum(&n1, x, |a, b| (a - b).abs());
        ratio(d, 2.0 * linf(x)).map(|r| wneg + r)
    };
    let pair = move |x: &[f64]| {
        let s: f64 = signed
            .iter()
            .map(|&(i, j, w, s)| w * (x[i] - s * x[j]).abs())
            .sum();
        ratio(s, 2.0 * linf(x))
    };
    let power = |alpha: f64, pos: Vec<WEdge>, neg: Vec<WEdge>| {
        move |x: &[f64]| {
            let m2 = 2.0 * linf(x);
            let s = edge_sum(&pos, x, |a, b| (a - b).abs().powf(alpha))
                + edge_sum(&neg, x, |a, b| (m2 - (a - b).abs()).max(0.0).powf(alpha));
            ratio(s, m2.powf(alpha))
        }
    };
    let (p2, n2) = (pos.clone(), neg.clone());
    let sign = move |x: &[f64]| {
        let m2 = 2.0 * linf(x);
        if m2 <= DEN_EPS {
            return None;
        }
        let tol = 1e-12 * m2;
        let s = edge_sum(&p2, x, |a, b| f64::from((a - b).abs() > tol))
            + edge_sum(&n2, x, |a, b| f64::from(m2 - (a - b).abs() > tol));
        Some(s)
    };
    Ok(
        ProblemInstance::new("frustration", g, Sense::Min, f, None, FeasibleDomain::all())
            .form(ContinuousForm::new("split", n, PointDomain::Free, Lift::PlusMinus, split))
            .form(
                ContinuousForm::new("signed-pair", n, PointDomain::Free, Lift::PlusMinus, pair)
                    .relaxation(),
            )
            .form(ContinuousForm::new(
                "power-0.5",
                n,
                PointDomain::Free,
                Lift::PlusMinus,
                power(0.5, pos.clone(), neg.clone()),
            ))
            .form(ContinuousForm::new(
                "power-1",
                n,
                PointDomain::Free,
                Lift::PlusMinus,
                power(1.0, pos, neg),
            ))
            .form(ContinuousForm::new("sign", n, PointDomain::Free, Lift::PlusMinus, sign))
            .solver(problem, Lift::PlusMinus, false),
    )
}

/// Same graph with the signs at `v` negated; the frustration index is unchanged.
pub fn switching_preserves_frustration(g: &Graph, v: usize) -> Result<bool> {
    let a = frustration_index(g)?.discrete_optimum()?.optimum;
    let b = frustration_index(&g.switch_at(v))?.discrete_optimum()?.optimum;
    Ok(a == b)
}

/// `c_ij = d_i d_j / vol - w_ij` over unordered pairs `i < j`.
fn modularity_pairs(g: &Graph) -> Vec<WEdge> {
    let n = g.n();
    let vol = g.total_volume();
    let mut w = vec![0.0; n * n];
    for e in g.edges() {
        w[e.u * n + e.v] = e.w;
    }
    let d = g.degrees();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j, d[i] * d[j] / vol - w[i * n + j]));
        }
    }
    out
}

fn check_volume(g: &Graph) -> Result<()> {
    if g.total_volume() <= 0.0 {
        return Err(Error::InvalidArgument("modularity needs positive total volume".into()));
    }
    Ok(())
}

fn modularity_fn(g: &Graph) -> Result<SetFunction> {
    let gc = g.clone();
    SetFunction::from_fn(g.n(), move |a| {
        gc.vol(a) * gc.vol(a.complement(gc.n())) / gc.total_volume() - gc.cut(a)
    })
}

/// Box half-widths used by the modularity box form.
pub const MODULARITY_BOX: (f64, f64) = (1.0, 2.0);

/// Modularity `Q(A) = vol(A) vol(A^c) / vol(V) - cut(A)`, maximized over all subsets.
pub fn modularity(g: &Graph) -> Result<ProblemInstance> {
    check_volume(g)?;
    let n = g.n();
    let c = modularity_pairs(g);
    let c2 = c.clone();
    let (a, b) = MODULARITY_BOX;
    Ok(
        ProblemInstance::new("modularity", g, Sense::Max, modularity_fn(g)?, None, FeasibleDomain::all())
            .form(ContinuousForm::new("ordered-pair", n, PointDomain::Free, Lift::PlusMinus, move |x| {
                ratio(2.0 * edge_sum(&c, x, |p, q| (p - q).abs()), 4.0 * linf(x))
            }))
            .form(ContinuousForm::new(
                "box",
                n,
                PointDomain::Box { a, b },
                Lift::Box { a, b },
                move |x| Some(edge_sum(&c2, x, |p, q| (p - q).abs()) / (a + b)),
            )),
    )
}

/// `Q(A) / (mu(A) mu(A^c))` over proper subsets; `mu` defaults to all ones.
pub fn modularity_normalized(g: &Graph, mu: Option<Vec<f64>>) -> Result<ProblemInstance> {
    check_volume(g)?;
    let n = g.n();
    let mu = mu.unwrap_or_else(|| vec![1.0; n]);
    if mu.len() != n || mu.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument("mu must be positive with one entry per vertex".into()));
    }
    let mc = mu.clone();
    let den = SetFunction::from_fn(n, move |a| {
        let s: f64 = a.elems().iter().map(|&i| mc[i]).sum();
        s * (mc.iter().sum::<f64>() - s)
    })?;
    let c = modularity_pairs(g);
    let c2 = c.clone();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j, mu[i] * mu[j]));
        }
    }
    let m2 = mu.clone();
    let total: f64 = mu.iter().sum();
    Ok(ProblemInstance::new(
        "modularity-normalized",
        g,
        Sense::Max,
        modularity_fn(g)?,
        Some(den),
        proper_family(n),
    )
    .param("mu", Param::Text(format!("{mu:?}")))
    .form(ContinuousForm::new(
        "pair",
        n,
        PointDomain::SumZero,
        Lift::Centered(vec![1.0; n]),
        move |x| {
            ratio(
                edge_sum(&c, x, |p, q| (p - q).abs()),
                edge_sum(&pairs, x, |p, q| (p - q).abs()),
            )
        },
    ))
    .form(ContinuousForm::new(
        "weighted",
        n,
        PointDomain::WeightedSumZero(mu.clone()),
        Lift::Centered(mu),
        move |x| {
            ratio(
                2.0 * edge_sum(&c2, x, |p, q| (p - q).abs()),
                total * dot(&m2, &l1v(x)),
            )
        },
    )
    .relaxation()))
}

/// Integer-scaled sides of the modularity and frustration relation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModularityFrustration {
    /// `vol(V)` times the frustration index of the pair weights `w_ij - d_i d_j / vol`.
    pub frustration: f64,
    /// `vol(V)` times `2 (sum of negative pair weights - max Q)`.
    pub relation: f64,
    pub holds: bool,
}

/// Both sides of the modularity and frustration relation, scaled by `vol(V)`.
pub fn modularity_frustration_relation(g: &Graph) -> Result<ModularityFrustration> {
    check_volume(g)?;
    let n = g.n();
    let vol = g.total_volume();
    let scaled: Vec<WEdge> = modularity_pairs(g)
        .into_iter()
        .map(|(i, j, _)| {
            let w = g
                .edge_index(i, j)
                .map_or(0.0, |k| g.edges()[k].w);
            (i, j, w * vol - g.degree(i) * g.degree(j))
        })
        .collect();
    let frus = optimize_signs(
        n,
        &|x| {
            scaled
                .iter()
                .map(|&(i, j, w)| w.abs() * (x[i] - w.signum() * x[j]).abs())
                .sum()
        },
        Sense::Min,
    )?
    .optimum;
    let full = SubsetId::full(n);
    let best_q = (0..1u64 << n)
        .map(|s| {
            let a = SubsetId(s);
            g.vol(a) * g.vol(a.complement(n)) - vol * g.cut(a)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let _ = full;
    let neg: f64 = scaled.iter().filter(|e| e.2 < 0.0).map(|e| -e.2).sum();
    let relation = 2.0 * (neg - best_q);
    Ok(ModularityFrustration {
        frustration: frus,
        relation,
        holds: frus == relation,
    })
}

/// Variants of Cheeger-type isoperimetric problems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheegerVariant {
    /// `cut(A) / (#A #A^c)`.
    NormalizedCut,
    /// `cut(A) / mu(A, A^c)`; pair weights default to every pair with weight 1.
    SparsestCut(Option<Vec<(usize, usize, f64)>>),
    /// `min cut(A) / #A` over `#A <= k`.
    IsoperimetricProfile(usize),
    /// `min |boundary(A)| / min(#A, #A^c)`.
    VertexBoundary(BoundaryKind),
    /// `max` over edge sets of the mean of `1/deg u + 1/deg v`.
    CheegerLike,
    /// `max 2 w(A, B)^(1/p) / vol(A u B)` over disjoint pairs.
    DualCheeger(f64),
}

impl CheegerVariant {
    pub fn id(&self) -> String {
        match self {
            CheegerVariant::NormalizedCut => "normalized-cut".into(),
            CheegerVariant::SparsestCut(_) => "sparsest-cut".into(),
            CheegerVariant::IsoperimetricProfile(k) => format!("isoperimetric-{k}"),
            CheegerVariant::VertexBoundary(b) => format!("vertex-cheeger-{}", boundary_name(*b)),
            CheegerVariant::CheegerLike => "cheeger-like".into(),
            CheegerVariant::DualCheeger(_) => "dual-cheeger".into(),
        }
    }
}

fn boundary_name(b: BoundaryKind) -> &'static str {
    match b {
        BoundaryKind::Inner => "inner",
        BoundaryKind::Outer => "outer",
        BoundaryKind::Vertex => "vertex",
    }
}

/// Lovasz extension of a vertex-boundary size, using closed neighborhoods.
pub fn vertex_boundary_extension(g: &Graph, kind: BoundaryKind, x: &[f64]) -> f64 {
    (0..g.n())
        .map(|i| {
            let nb = g.closed_neighborhood(i);
            let hi = nb.iter().map(|&j| x[j]).fold(f64::NEG_INFINITY, f64::max);
            let lo = nb.iter().map(|&j| x[j]).fold(f64::INFINITY, f64::min);
            match kind {
                BoundaryKind::Outer => hi - x[i],
                BoundaryKind::Inner => x[i] - lo,
                BoundaryKind::Vertex => hi - lo,
            }
        })
        .sum()
}

/// Cheeger-type problem selected by `variant`.
pub fn cheeger_variant(g: &Graph, variant: CheegerVariant) -> Result<ProblemInstance> {
    let n = g.n();
    let id = variant.id();
    let e = wedges(g);
    match variant {
        CheegerVariant::NormalizedCut => {
            let den = SetFunction::from_fn(n, move |a| (a.len() * (n - a.len())) as f64)?;
            let mut all = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    all.push((i, j, 1.0));
                }
            }
            Ok(ProblemInstance::new(&id, g, Sense::Min, cut_fn(g)?, Some(den), proper_family(n))
                .form(ContinuousForm::new(
                    "pair",
                    n,
                    PointDomain::SumZero,
                    Lift::Centered(vec![1.0; n]),
                    move |x| {
                        ratio(
                            edge_sum(&e, x, |a, b| (a - b).abs()),
                            edge_sum(&all, x, |a, b| (a - b).abs()),
                        )
                    },
                )))
        }
        CheegerVariant::SparsestCut(mu) => {
            let mu = match mu {
                Some(m) => m,
                None => {
                    let mut all = Vec::new();
                    for i in 0..n {
                        for j in i + 1..n {
                            all.push((i, j, 1.0));
                        }
                    }
                    all
                }
            };
            if mu.iter().any(|&(i, j, w)| i >= n || j >= n || i == j || w < 0.0) {
                return Err(Error::InvalidArgument("demand pairs must be distinct vertices with weight >= 0".into()));
            }
            let m2 = mu.clone();
            let den = SetFunction::from_fn(n, move |a| {
                m2.iter()
                    .filter(|&&(i, j, _)| a.contains(i) != a.contains(j))
                    .map(|p| p.2)
                    .sum()
            })?;
            Ok(ProblemInstance::new(&id, g, Sense::Min, cut_fn(g)?, Some(den), proper_family(n))
                .form(ContinuousForm::new("pair", n, PointDomain::Free, Lift::Indicator, move |x| {
                    ratio(
                        edge_sum(&e, x, |a, b| (a - b).abs()),
                        edge_sum(&mu, x, |a, b| (a - b).abs()),
                    )
                })))
        }
        CheegerVariant::IsoperimetricProfile(k) => {
            if k == 0 || k > n {
                return Err(Error::InvalidArgument(format!("profile needs 1 <= k <= n, got {k}")));
            }
            let gc = g.clone();
            let f = SetFunction::pair_from_fn(n, move |p| gc.cut(p.pos) + gc.cut(p.neg))?;
            let den = SetFunction::pair_from_fn(n, |p| (p.pos.len() + p.neg.len()) as f64)?;
            let family = FeasibleDomain::new("small support", move |a| {
                matches!(a, SetArg::Pair(p) if p.support().len() <= k)
            });
            Ok(ProblemInstance::new(&id, g, Sense::Min, f, Some(den), family)
                .param("k", Param::Number(k as f64))
                .form(ContinuousForm::new(
                    "l1",
                    n,
                    PointDomain::SupportAtMost(k),
                    Lift::Indicator,
                    move |x| ratio(edge_sum(&e, x, |a, b| (a - b).abs()), l1(x)),
                )))
        }
        CheegerVariant::VertexBoundary(kind) => {
            let gc = g.clone();
            let f = SetFunction::from_fn(n, move |a| vertex_boundary(&gc, a, kind) as f64)?;
            let den = SetFunction::from_fn(n, move |a| a.len().min(n - a.len()) as f64)?;
            let gc = g.clone();
            let ones = vec![1.0; n];
            Ok(ProblemInstance::new(&id, g, Sense::Min, f, Some(den), proper_family(n))
                .param("boundary", Param::Text(boundary_name(kind).into()))
                .form(ContinuousForm::new("lovasz", n, PointDomain::Free, Lift::Indicator, move |x| {
                    ratio(vertex_boundary_extension(&gc, kind, x), min_translate(x, &ones))
                })))
        }
        CheegerVariant::CheegerLike => {
            let m = g.m();
            if m == 0 || m > MAX_SUBSET_N {
                return Err(Error::InvalidArgument(format!(
                    "edge ground set must have 1..={MAX_SUBSET_N} edges, got {m}"
                )));
            }
            let w: Vec<f64> = g
                .edges()
                .iter()
                .map(|e| 1.0 / g.degree(e.u) + 1.0 / g.degree(e.v))
                .collect();
            let f = SetFunction::modular(w)?;
            let den = SetFunction::cardinality(m)?;
            let inv: Vec<f64> = (0..n).map(|v| 1.0 / g.degree(v)).collect();
            let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
            let eval = move |x: &[f64]| {
                let mut flow = vec![0.0; n];
                for (k, &(u, v)) in ends.iter().enumerate() {
                    flow[v] += x[k];
                    flow[u] -= x[k];
                }
                ratio(dot(&inv, &l1v(&flow)), l1(x))
            };
            Ok(ProblemInstance::new(&id, g, Sense::Max, f, Some(den), FeasibleDomain::all())
                .form(ContinuousForm::new("flow", m, PointDomain::Free, Lift::Indicator, eval).inexact()))
        }
        CheegerVariant::DualCheeger(p) => {
            if !(p >= 1.0) {
                return Err(Error::InvalidArgument(format!("exponent must be >= 1, got {p}")));
            }
            let gc = g.clone();
            let f = SetFunction::pair_from_fn(n, move |q| 2.0 * gc.edges_between(q.pos, q.neg).powf(1.0 / p))?;
            let gc = g.clone();
            let den = SetFunction::pair_from_fn(n, move |q| gc.vol(q.support()))?;
            let d = g.degrees().to_vec();
            Ok(ProblemInstance::new(&id, g, Sense::Max, f, Some(den), FeasibleDomain::all())
                .param("p", Param::Number(p))
                .form(ContinuousForm::new("pair", n, PointDomain::Free, Lift::Indicator, move |x| {
                    let s = edge_sum(&e, x, |a, b| (a.abs() + b.abs() - (a + b).abs()).powf(p));
                    ratio(s.powf(1.0 / p), dot(&d, &l1v(x)))
                })))
        }
    }
}

/// Bounds around the first Poincare constant `inf sum_i max_{j~i} |x_i - x_j| / ||x||_1` on `<x, 1> = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareReport {
    pub h_inner: f64,
    pub h_outer: f64,
    pub h_vertex: f64,
    /// Smallest sampled quotient; an upper estimate of the constant.
    pub estimate: f64,
    /// Smallest quotient over centered indicators.
    pub indicator_min: f64,
    /// `max(h_inner, h_outer) / 2 <= estimate`.
    pub lower_holds: bool,
    /// `indicator_min <= h_vertex`.
    pub upper_holds: bool,
}

/// Raw quotient `sum_i max_{j~i} |x_i - x_j| / ||x||_1`.
pub fn poincare_quotient(g: &Graph, x: &[f64]) -> Option<f64> {
    let num: f64 = (0..g.n())
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|&(j, _)| (x[i] - x[j]).abs())
                .fold(0.0, f64::max)
        })
        .sum();
    ratio(num, l1(x))
}

/// Sandwich check for the Poincare constant using `samples` random centered points.
pub fn poincare_report(g: &Graph, samples: usize, seed: u64) -> Result<PoincareReport> {
    let n = g.n();
    if !(2..=MAX_SUBSET_N).contains(&n) {
        return Err(too_large("Poincare enumeration", MAX_SUBSET_N, n));
    }
    let h = |k| crate::oracle::vertex_cheeger_constant(g, k);
    let (h_inner, h_outer, h_vertex) = (h(BoundaryKind::Inner)?, h(BoundaryKind::Outer)?, h(BoundaryKind::Vertex)?);
    let full = SubsetId::full(n);
    let ones = vec![1.0; n];
    let indicator_min = (1..full.0)
        .filter_map(|s| poincare_quotient(g, &Lift::Centered(ones.clone()).apply(&SetArg::Set(SubsetId(s)), n)))
        .fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimate = indicator_min;
    for _ in 0..samples {
        let x = PointDomain::SumZero.sample(n, &mut rng).expect("sampled");
        if let Some(q) = poincare_quotient(g, &x) {
            estimate = estimate.min(q);
        }
    }
    Ok(PoincareReport {
        h_inner,
        h_outer,
        h_vertex,
        estimate,
        indicator_min,
        lower_holds: h_inner.max(h_outer) / 2.0 <= estimate + AGREEMENT_TOL,
        upper_holds: indicator_min <= h_vertex + AGREEMENT_TOL,
    })
}

/// Names accepted by [`bundled_graph`].
pub const BUNDLED_GRAPHS: &[&str] = &[
    "k3", "p3", "p4", "c4", "c5", "k4", "star3", "petersen", "two-triangles", "two-edges", "neg-k3",
    "neg-c4",
];

/// Small named test graphs.
pub fn bundled_graph(name: &str) -> Option<Graph> {
    let neg = |g: Graph| g.with_signs(&vec![-1; g.m()]).expect("signs");
    Some(match name {
        "k3" => Graph::complete(3),
        "p3" => Graph::path(3),
        "p4" => Graph::path(4),
        "c4" => Graph::cycle(4),
        "c5" => Graph::cycle(5),
        "k4" => Graph::complete(4),
        "star3" => Graph::star(3),
        "petersen" => Graph::petersen(),
        "two-triangles" => Graph::new(
            6,
            [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)].map(|(u, v)| (u, v, 1.0)),
        )
        .expect("static graph"),
        "two-edges" => Graph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).expect("static graph"),
        "neg-k3" => neg(Graph::complete(3)),
        "neg-c4" => neg(Graph::cycle(4)),
        _ => return None,
    })
}

/// Connected unweighted graph: a random spanning tree plus each other pair with probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut present = vec![false; n * n];
    let mut e = Vec::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        let (u, v) = (order[k].min(parent), order[k].max(parent));
        present[u * n + v] = true;
        e.push((u, v, 1.0));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u * n + v] && rng.gen_bool(p) {
                e.push((u, v, 1.0));
            }
        }
    }
    Graph::new(n, e).expect("random graph")
}

/// [`random_graph`] with each edge negative with probability `q`.
pub fn random_signed_graph(n: usize, p: f64, q: f64, seed: u64) -> Graph {
    let g = random_graph(n, p, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5157_4e45_4400);
    let signs: Vec<i8> = (0..g.m()).map(|_| if rng.gen_bool(q) { -1 } else { 1 }).collect();
    g.with_signs(&signs).expect("signs")
}

/// Every catalog problem applicable to an unweighted graph, with default parameters.
pub fn standard_catalog(g: &Graph, seed: u64) -> Result<Vec<ProblemInstance>> {
    let n = g.n();
    let half = SubsetId::from_elems(&(0..n.div_ceil(2)).collect::<Vec<_>>());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signs: Vec<i8> = (0..g.m()).map(|_| if rng.gen_bool(0.5) { -1 } else { 1 }).collect();
    let mut out = vec![
        maxcut(g, 1.0)?,
        maxcut(g, 2.0)?,
        mincut(g)?,
        cheeger_cut(g)?,
        dirichlet_cheeger(g, half)?,
        neumann_cheeger(g, half)?,
        independence_number(g, IndependenceForm::Product)?,
        independence_number(g, IndependenceForm::Difference)?,
        k_independence(g, 2)?,
        vertex_cover(g, None)?,
        chromatic_number(g)?,
        frustration_index(&g.with_signs(&signs)?)?,
        modularity(g)?,
        modularity_normalized(g, None)?,
    ];
    for k in 2..=3.min(n) {
        out.push(max_kcut(g, k)?);
    }
    if n >= 2 {
        out.push(multiway_partition(g, None, &[0, n - 1])?);
    }
    if g.m() >= 1 && g.m() <= MAX_SUBSET_N {
        out.push(matching_number(g)?);
        out.push(cheeger_variant(g, CheegerVariant::CheegerLike)?);
    }
    for v in [
        CheegerVariant::NormalizedCut,
        CheegerVariant::SparsestCut(None),
        CheegerVariant::IsoperimetricProfile(2.min(n)),
        CheegerVariant::VertexBoundary(BoundaryKind::Inner),
        CheegerVariant::VertexBoundary(BoundaryKind::Outer),
        CheegerVariant::VertexBoundary(BoundaryKind::Vertex),
        CheegerVariant::DualCheeger(1.0),
        CheegerVariant::DualCheeger(2.0),
    ] {
        out.push(cheeger_variant(g, v)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::enumerate_eigenvalues;
    use crate::lovasz::extension_value;

    fn opt(p: &ProblemInstance) -> f64 {
        p.discrete_optimum().unwrap().optimum
    }

    fn g(name: &str) -> Graph {
        bundled_graph(name).unwrap()
    }

    fn assert_consistent(p: &ProblemInstance) {
        let o = opt(p);
        for form in &p.forms {
            if form.indicator_exact {
                let bad = p.indicator_mismatches(form).unwrap();
                assert!(bad.is_empty(), "{} {}: {:?}", p.id, form.name, &bad[..bad.len().min(2)]);
            }
            let (_, best) = p.best_indicator_value(form).unwrap().unwrap();
            assert!(close(best, o), "{} {}: best indicator {best} vs {o}", p.id, form.name);
            if form.kind == FormKind::Exact {
                let r = p.random_check(form, o, 300, 3).unwrap();
                assert!(r.violations.is_empty(), "{} {}: {:?}", p.id, form.name, r.violations[0]);
            }
        }
    }

    #[test]
    fn cut_examples() {
        assert_eq!(opt(&maxcut(&g("k3"), 1.0).unwrap()), 2.0);
        assert_eq!(opt(&maxcut(&g("c4"), 1.0).unwrap()), 4.0);
        assert_eq!(opt(&mincut(&g("k3")).unwrap()), 2.0);
        assert_eq!(opt(&mincut(&g("p3")).unwrap()), 1.0);
        assert_eq!(opt(&mincut(&g("two-edges")).unwrap()), 0.0);
        assert_eq!(opt(&max_kcut(&g("k3"), 2).unwrap()), 2.0);
        assert_eq!(opt(&max_kcut(&g("k3"), 3).unwrap()), 3.0);
        assert_eq!(opt(&max_kcut(&g("k4"), 3).unwrap()), 5.0);
        assert_eq!(opt(&cheeger_cut(&g("k3")).unwrap()), 1.0);
        assert_eq!(opt(&dirichlet_cheeger(&g("p3"), SubsetId::singleton(1)).unwrap()), 1.0);
    }

    #[test]
    fn maxcut_power_two_angles() {
        let k3 = g("k3");
        let p = maxcut(&k3, 2.0).unwrap();
        let theta = [0.0, std::f64::consts::PI, 0.0];
        let x: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
        assert!((p.form_named("pair").unwrap().eval(&x).unwrap() - 2.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let t: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.2..3.2)).collect();
            let (l, r) = maxcut_angle_identity(&k3, &t);
            assert!((l - r).abs() < 1e-12);
        }
    }

    #[test]
    fn counting_examples() {
        let ind = |n: &str| opt(&independence_number(&g(n), IndependenceForm::Difference).unwrap());
        assert_eq!((ind("k3"), ind("p3"), ind("c5")), (1.0, 2.0, 2.0));
        assert_eq!(opt(&independence_number(&g("c5"), IndependenceForm::Product).unwrap()), 2.0);
        assert_eq!(opt(&vertex_cover(&g("k3"), None).unwrap()), 2.0);
        assert_eq!(opt(&vertex_cover(&g("star3"), None).unwrap()), 1.0);
        assert_eq!(opt(&multiway_partition(&g("p3"), None, &[0, 2]).unwrap()), 1.0);
        let mt = |n: &str| opt(&matching_number(&g(n)).unwrap());
        assert_eq!((mt("k3"), mt("p4"), mt("c4")), (1.0, 2.0, 2.0));
        let chi = |n: &str| opt(&chromatic_number(&g(n)).unwrap());
        assert_eq!((chi("k3"), chi("p3"), chi("c5")), (3.0, 2.0, 3.0));
        assert_eq!(opt(&k_independence(&g("c5"), 2).unwrap()), 1.0);
        assert_eq!(opt(&k_independence(&Graph::path(5), 2).unwrap()), 2.0);
    }

    #[test]
    fn signed_and_modularity_examples() {
        assert_eq!(opt(&frustration_index(&g("p4")).unwrap()), 0.0);
        assert_eq!(opt(&frustration_index(&g("neg-k3")).unwrap()), 1.0);
        assert_eq!(opt(&frustration_index(&g("neg-c4")).unwrap()), 0.0);
        let tt = g("two-triangles");
        let q = modularity_fn(&tt).unwrap();
        assert_eq!(q.set_value(SubsetId::full(6)), 0.0);
        let m = modularity(&tt).unwrap();
        let r = m.discrete_optimum().unwrap();
        assert!(r.optimum > 0.0);
        assert!(r
            .witnesses
            .iter()
            .any(|w| *w == SetArg::Set(SubsetId::from_elems(&[0, 1, 2]))));
        let rel = modularity_frustration_relation(&tt).unwrap();
        assert!(rel.holds, "{rel:?}");
    }

    #[test]
    fn weighted_modularity_form_is_only_an_upper_bound() {
        let p = modularity_normalized(&g("c5"), None).unwrap();
        let form = p.form_named("weighted").unwrap();
        assert_eq!(form.kind, FormKind::Relaxation);
        let x = [
            -0.6533139438669964,
            0.7719112144035789,
            0.7256015560424645,
            -0.22808878559642104,
            -0.6161100409826257,
        ];
        let best = opt(&p);
        assert!((best - 1.0 / 15.0).abs() < 1e-12);
        assert!(form.eval(&x).unwrap() > best + 5e-4);
        let (_, ind) = p.best_indicator_value(form).unwrap().unwrap();
        assert!(close(ind, best));
    }

    #[test]
    fn variant_examples() {
        let k3 = g("k3");
        assert_eq!(opt(&cheeger_variant(&k3, CheegerVariant::NormalizedCut).unwrap()), 1.0);
        assert_eq!(opt(&cheeger_variant(&k3, CheegerVariant::IsoperimetricProfile(1)).unwrap()), 2.0);
        assert_eq!(opt(&cheeger_variant(&g("p3"), CheegerVariant::CheegerLike).unwrap()), 1.5);
        let p = poincare_report(&g("p4"), 500, 1).unwrap();
        assert!(p.lower_holds && p.upper_holds, "{p:?}");
    }

    #[test]
    fn catalog_consistent_on_small_graphs() {
        for name in ["k3", "p4", "c5"] {
            for p in standard_catalog(&g(name), 1).unwrap() {
                assert_consistent(&p);
            }
        }
    }

    #[test]
    fn chromatic_forms_match_generic_extension() {
        let c4 = g("c4");
        let p = chromatic_number(&c4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = PointDomain::Free.sample(16, &mut rng).unwrap();
            let m = linf(&x);
            let generic = extension_value(&p.f, &x).unwrap() / m;
            for name in ["closed", "expanded"] {
                let v = p.form_named(name).unwrap().eval(&x).unwrap();
                assert!((v - generic).abs() < 1e-9, "{name}: {v} vs {generic}");
            }
        }
    }

    #[test]
    fn catalog_forms_match_generic_extension() {
        let pet = g("petersen");
        let gr = g("p4");
        let n = gr.n();
        let cut = cut_fn(&gr).unwrap();
        let support = |f: SetFunction| {
            SetFunction::pair_from_fn(n, move |p| f.set_value(p.support())).unwrap()
        };
        let ind = independence_number(&gr, IndependenceForm::Difference).unwrap();
        let ind_pair = support(ind.f.clone());
        let cheeger = cheeger_cut(&gr).unwrap();
        let kcut = max_kcut(&gr, 3).unwrap();
        let q = modularity(&gr).unwrap();
        let ncut = cheeger_variant(&gr, CheegerVariant::NormalizedCut).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x = PointDomain::Free.sample(n, &mut rng).unwrap();
            let m = linf(&x);
            let ext = |f: &SetFunction, y: &[f64]| extension_value(f, y).unwrap();
            let pairs = [
                (maxcut(&gr, 1.0).unwrap().form_named("pair").unwrap().eval(&x), ext(&cut, &x) / (2.0 * m)),
                (mincut(&gr).unwrap().form_named("range").unwrap().eval(&x), ext(&cut, &x) / (max_of(&x) - min_of(&x))),
                (cheeger.forms[0].eval(&x), ext(&cut, &x) / ext(cheeger.g.as_ref().unwrap(), &x)),
                (ind.form_named("lovasz").unwrap().eval(&x), ext(&ind_pair, &x) / m),
                (ind.form_named("min").unwrap().eval(&x), ext(&ind_pair, &x) / m),
                (q.form_named("ordered-pair").unwrap().eval(&x), ext(&q.f, &x) / (2.0 * m)),
                (ncut.forms[0].eval(&x), ext(&cut, &x) / ext(ncut.g.as_ref().unwrap(), &x)),
            ];
            for (i, (a, b)) in pairs.into_iter().enumerate() {
                assert!((a.unwrap() - b).abs() < 1e-9, "form {i}: {a:?} vs {b}");
            }
            for kind in [BoundaryKind::Inner, BoundaryKind::Outer, BoundaryKind::Vertex] {
                let gp = pet.clone();
                let f = SetFunction::from_fn(10, move |a| vertex_boundary(&gp, a, kind) as f64).unwrap();
                let y = PointDomain::Free.sample(10, &mut rng).unwrap();
                assert!((vertex_boundary_extension(&pet, kind, &y) - ext(&f, &y)).abs() < 1e-9);
            }
            let y = PointDomain::DisjointSupports { blocks: 3, n }.sample(3 * n, &mut rng).unwrap();
            let a = kcut.form_named("kway").unwrap().eval(&y).unwrap();
            assert!((a - ext(&kcut.f, &y) / linf(&y)).abs() < 1e-9);
        }
    }

    #[test]
    fn chromatic_over_all_pair_tuples() {
        let k3 = g("k3");
        let p = chromatic_number(&k3).unwrap();
        let r = optimize_subsets(&p.f, None, Sense::Min, &|_| true).unwrap();
        assert_eq!(r.optimum, 3.0);
        let best = restricted_growth_strings(3)
            .iter()
            .map(|r| {
                let mut b = blocks_of(r);
                b.resize(3, SubsetId(0));
                chromatic_sum_objective(&k3, &b)
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best, 3.0);
    }

    #[test]
    fn relaxations_bound_the_discrete_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for s in 0..20 {
            let gr = random_graph(6, 0.4, s);
            let cover = opt(&vertex_cover(&gr, None).unwrap());
            let (relaxed, _) = vertex_cover_relaxation(&gr, None).unwrap();
            assert!(relaxed <= cover + 1e-12);
            let t = [0, 1 + rng.gen_range(0..5)];
            let disc = opt(&multiway_partition(&gr, None, &t).unwrap());
            let b = multiway_relaxation(&gr, None, &t, 200).unwrap();
            assert!(b.lower <= disc + 1e-9 && b.rounded >= disc - 1e-9, "{b:?} vs {disc}");
        }
        let b = multiway_relaxation(&g("p3"), None, &[0, 1, 2], 10).unwrap();
        assert_eq!(b.rounded, 2.0);
    }

    #[test]
    fn cheeger_constants_are_eigenvalues() {
        for name in ["p3", "p4", "k3", "c4", "star3"] {
            let gr = g(name);
            let n = gr.n();
            let (gc, gd) = (gr.clone(), gr.clone());
            let f = SetFunction::pair_from_fn(n, move |p| gc.cut(p.pos) + gc.cut(p.neg)).unwrap();
            let v = SetFunction::pair_from_fn(n, move |p| gd.vol(p.pos) + gd.vol(p.neg)).unwrap();
            let eig = enumerate_eigenvalues(&f, &v).unwrap();
            let h = opt(&cheeger_cut(&gr).unwrap());
            assert!((eig[1].0 - h).abs() < 1e-9, "{name}: {:?} vs {h}", eig);
        }
        let p4 = g("p4");
        let a = SubsetId::from_elems(&[1, 2]);
        let (sub, _) = p4.induced(a);
        let (pc, pv) = (p4.clone(), p4.clone());
        let lift = move |s: SubsetId| SubsetId::from_elems(&s.elems().iter().map(|&i| i + 1).collect::<Vec<_>>());
        let f = SetFunction::pair_from_fn(sub.n(), move |p| pc.cut(lift(p.pos)) + pc.cut(lift(p.neg))).unwrap();
        let v = SetFunction::pair_from_fn(sub.n(), move |p| pv.vol(lift(p.pos)) + pv.vol(lift(p.neg))).unwrap();
        let eig = enumerate_eigenvalues(&f, &v).unwrap();
        let h1 = opt(&dirichlet_cheeger(&p4, a).unwrap());
        assert!((eig[0].0 - h1).abs() < 1e-9, "{eig:?} vs {h1}");
    }

    #[test]
    fn switching_keeps_frustration() {
        for s in 0..10 {
            let gr = random_signed_graph(6, 0.5, 0.4, s);
            assert!(switching_preserves_frustration(&gr, (s % 6) as usize).unwrap());
        }
    }

    #[test]
    fn solver_extraction_for_maxcut() {
        let p = maxcut(&g("c5"), 1.0).unwrap();
        let w = p.solver_wiring().unwrap();
        let x = w.lift.apply(&SetArg::Set(SubsetId::from_elems(&[0, 2])), 5);
        let (a, v) = p.extract(&x).unwrap();
        assert_eq!(v, 4.0);
        assert_eq!(p.value(&a).unwrap(), Some(4.0));
        let m = mincut(&g("p4")).unwrap();
        let (_, v) = m.extract(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(v, 1.0);
    }
}
