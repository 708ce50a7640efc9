//! Set functions on power sets, disjoint pairs and set-tuples.
//!
//! Subsets are bitmasks over the ground set `0..n`. Disjoint pairs are
//! encoded in base 3 (digit 0 = neither, 1 = positive part, 2 = negative part).
//! Every function evaluates to 0 at the all-empty argument.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{too_large, Error, Result};

/// Largest ground set for full power-set enumeration.
pub const MAX_POWERSET_N: usize = 24;
/// Largest ground set for pair-of-pairs enumeration.
pub const MAX_BISUBMODULAR_N: usize = 15;
/// Largest `n * k` for k-way lattice enumeration.
pub const MAX_KWAY_NK: usize = 18;
/// Largest ground set for the pair-gap enumeration.
pub const MAX_GAP_N: usize = 20;

/// Finite ground set `{0, .., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidArgument(format!(
                "ground set size must be in 1..=63, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> SubsetId {
        SubsetId::full(self.n)
    }
}

/// Subset of the ground set as a bitmask.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct SubsetId(pub u64);

impl SubsetId {
    pub const EMPTY: SubsetId = SubsetId(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            SubsetId(u64::MAX)
        } else {
            SubsetId((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        SubsetId(1u64 << i)
    }

    pub fn from_elems(elems: &[usize]) -> Self {
        SubsetId(elems.iter().fold(0u64, |m, &i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(self, i: usize) -> Self {
        SubsetId(self.0 | (1u64 << i))
    }

    pub fn remove(self, i: usize) -> Self {
        SubsetId(self.0 & !(1u64 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        SubsetId(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        SubsetId(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        SubsetId(self.0 & !o.0)
    }

    pub fn complement(self, n: usize) -> Self {
        SubsetId(!self.0 & SubsetId::full(n).0)
    }

    pub fn is_subset_of(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn elems(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut m = self.0;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            out.push(i);
            m &= m - 1;
        }
        out
    }

    /// Indicator vector `1_A`.
    pub fn indicator(self, n: usize) -> Vec<f64> {
        (0..n).map(|i| if self.contains(i) { 1.0 } else { 0.0 }).collect()
    }
}

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.elems())
    }
}

/// Ordered pair of disjoint subsets.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct SetPair {
    pub pos: SubsetId,
    pub neg: SubsetId,
}

impl SetPair {
    pub const EMPTY: SetPair = SetPair {
        pos: SubsetId::EMPTY,
        neg: SubsetId::EMPTY,
    };

    pub fn new(pos: SubsetId, neg: SubsetId) -> Result<Self> {
        if !pos.intersection(neg).is_empty() {
            return Err(Error::InvalidArgument(format!(
                "set pair parts intersect: {pos} and {neg}"
            )));
        }
        Ok(Self { pos, neg })
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn support(&self) -> SubsetId {
        self.pos.union(self.neg)
    }

    pub fn swap(&self) -> Self {
        Self {
            pos: self.neg,
            neg: self.pos,
        }
    }

    /// Base-3 code, digit `i` is 0, 1 (pos) or 2 (neg).
    pub fn code(&self, n: usize) -> usize {
        let mut c = 0usize;
        for i in (0..n).rev() {
            c *= 3;
            if self.pos.contains(i) {
                c += 1;
            } else if self.neg.contains(i) {
                c += 2;
            }
        }
        c
    }

    pub fn from_code(mut code: usize, n: usize) -> Self {
        let mut pos = 0u64;
        let mut neg = 0u64;
        for i in 0..n {
            match code % 3 {
                1 => pos |= 1 << i,
                2 => neg |= 1 << i,
                _ => {}
            }
            code /= 3;
        }
        Self {
            pos: SubsetId(pos),
            neg: SubsetId(neg),
        }
    }

    /// Join of the bisubmodular lattice.
    pub fn join(&self, o: &Self) -> Self {
        let p = self.pos.union(o.pos);
        let q = self.neg.union(o.neg);
        Self {
            pos: p.difference(q),
            neg: q.difference(p),
        }
    }

    /// Meet of the bisubmodular lattice.
    pub fn meet(&self, o: &Self) -> Self {
        Self {
            pos: self.pos.intersection(o.pos),
            neg: self.neg.intersection(o.neg),
        }
    }

    /// Ternary indicator `1_A - 1_B`.
    pub fn indicator(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                if self.pos.contains(i) {
                    1.0
                } else if self.neg.contains(i) {
                    -1.0
                } else {
                    0.0
                }
            })
            .collect()
    }
}

impl fmt::Display for SetPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.pos, self.neg)
    }
}

/// Argument of a set function: a set, a pair, or a tuple of either.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetArg {
    Set(SubsetId),
    Pair(SetPair),
    Tuple(Vec<SubsetId>),
    PairTuple(Vec<SetPair>),
}

impl SetArg {
    pub fn is_empty(&self) -> bool {
        match self {
            SetArg::Set(a) => a.is_empty(),
            SetArg::Pair(p) => p.is_empty(),
            SetArg::Tuple(t) => t.iter().all(|a| a.is_empty()),
            SetArg::PairTuple(t) => t.iter().all(|p| p.is_empty()),
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            SetArg::Set(_) => "set".into(),
            SetArg::Pair(_) => "pair".into(),
            SetArg::Tuple(t) => format!("{}-tuple", t.len()),
            SetArg::PairTuple(t) => format!("{}-pair-tuple", t.len()),
        }
    }

    /// Indicator vector of the argument (block layout for tuples).
    pub fn indicator(&self, n: usize) -> Vec<f64> {
        match self {
            SetArg::Set(a) => a.indicator(n),
            SetArg::Pair(p) => p.indicator(n),
            SetArg::Tuple(t) => t.iter().flat_map(|a| a.indicator(n)).collect(),
            SetArg::PairTuple(t) => t.iter().flat_map(|p| p.indicator(n)).collect(),
        }
    }

    /// Parts as sorted vertex lists, positive and negative parts listed separately.
    pub fn parts(&self) -> Vec<Vec<usize>> {
        match self {
            SetArg::Set(a) => vec![a.elems()],
            SetArg::Pair(p) => vec![p.pos.elems(), p.neg.elems()],
            SetArg::Tuple(t) => t.iter().map(|a| a.elems()).collect(),
            SetArg::PairTuple(t) => t
                .iter()
                .flat_map(|p| [p.pos.elems(), p.neg.elems()])
                .collect(),
        }
    }
}

impl fmt::Display for SetArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetArg::Set(a) => write!(f, "{a}"),
            SetArg::Pair(p) => write!(f, "{p}"),
            SetArg::Tuple(t) => {
                let s: Vec<String> = t.iter().map(|a| a.to_string()).collect();
                write!(f, "({})", s.join(", "))
            }
            SetArg::PairTuple(t) => {
                let s: Vec<String> = t.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", s.join(", "))
            }
        }
    }
}

/// Domain of a set function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    Powerset,
    DisjointPair,
    KWay(usize),
    KWayPair(usize),
}

impl DomainKind {
    pub fn k(&self) -> usize {
        match self {
            DomainKind::Powerset | DomainKind::DisjointPair => 1,
            DomainKind::KWay(k) | DomainKind::KWayPair(k) => *k,
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, DomainKind::DisjointPair | DomainKind::KWayPair(_))
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Powerset => write!(f, "powerset"),
            DomainKind::DisjointPair => write!(f, "disjoint-pair"),
            DomainKind::KWay(k) => write!(f, "{k}-way"),
            DomainKind::KWayPair(k) => write!(f, "{k}-way-disjoint-pair"),
        }
    }
}

type SetFn = Arc<dyn Fn(SubsetId) -> f64 + Send + Sync>;
type PairFn = Arc<dyn Fn(SetPair) -> f64 + Send + Sync>;
type TupleFn = Arc<dyn Fn(&[SubsetId]) -> f64 + Send + Sync>;
type PairTupleFn = Arc<dyn Fn(&[SetPair]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Table(Arc<[f64]>),
    Set(SetFn),
    Pair(PairFn),
    Tuple(TupleFn),
    PairTuple(PairTupleFn),
}

struct Memo {
    budget: usize,
    map: Mutex<HashMap<SetArg, f64>>,
}

/// Real-valued function on one of the four set domains.
#[derive(Clone)]
pub struct SetFunction {
    n: usize,
    kind: DomainKind,
    repr: Repr,
    memo: Option<Arc<Memo>>,
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let repr = match &self.repr {
            Repr::Table(t) => format!("table[{}]", t.len()),
            _ => "callback".to_string(),
        };
        f.debug_struct("SetFunction")
            .field("n", &self.n)
            .field("kind", &self.kind)
            .field("repr", &repr)
            .finish()
    }
}

pub(crate) fn pow3(n: usize) -> usize {
    3usize.pow(n as u32)
}

fn check_n(n: usize) -> Result<()> {
    GroundSet::new(n).map(|_| ())
}

impl SetFunction {
    /// Dense table on the power set, indexed by bitmask.
    pub fn from_table(n: usize, mut values: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        if n > MAX_POWERSET_N {
            return Err(too_large("power-set table", MAX_POWERSET_N, n));
        }
        if values.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "power-set table needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        values[0] = 0.0;
        Ok(Self {
            n,
            kind: DomainKind::Powerset,
            repr: Repr::Table(values.into()),
            memo: None,
        })
    }

    /// Dense table on disjoint pairs, indexed by base-3 code.
    pub fn pair_from_table(n: usize, mut values: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        if n > MAX_POWERSET_N {
            return Err(too_large("pair table", MAX_POWERSET_N, n));
        }
        if values.len() != pow3(n) {
            return Err(Error::InvalidArgument(format!(
                "pair table needs {} values, got {}",
                pow3(n),
                values.len()
            )));
        }
        values[0] = 0.0;
        Ok(Self {
            n,
            kind: DomainKind::DisjointPair,
            repr: Repr::Table(values.into()),
            memo: None,
        })
    }

    /// Dense table on k-tuples of subsets, index `sum_l mask_l << (l*n)`.
    pub fn kway_from_table(n: usize, k: usize, mut values: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        if k == 0 || n * k > MAX_POWERSET_N {
            return Err(too_large("k-way table", MAX_POWERSET_N, n * k));
        }
        if values.len() != 1 << (n * k) {
            return Err(Error::InvalidArgument(format!(
                "k-way table needs {} values, got {}",
                1usize << (n * k),
                values.len()
            )));
        }
        values[0] = 0.0;
        Ok(Self {
            n,
            kind: DomainKind::KWay(k),
            repr: Repr::Table(values.into()),
            memo: None,
        })
    }

    pub fn from_fn(n: usize, f: impl Fn(SubsetId) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            kind: DomainKind::Powerset,
            repr: Repr::Set(Arc::new(f)),
            memo: None,
        })
    }

    pub fn pair_from_fn(
        n: usize,
        f: impl Fn(SetPair) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            kind: DomainKind::DisjointPair,
            repr: Repr::Pair(Arc::new(f)),
            memo: None,
        })
    }

    pub fn kway_from_fn(
        n: usize,
        k: usize,
        f: impl Fn(&[SubsetId]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_n(n)?;
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        Ok(Self {
            n,
            kind: DomainKind::KWay(k),
            repr: Repr::Tuple(Arc::new(f)),
            memo: None,
        })
    }

    pub fn kway_pair_from_fn(
        n: usize,
        k: usize,
        f: impl Fn(&[SetPair]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_n(n)?;
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        Ok(Self {
            n,
            kind: DomainKind::KWayPair(k),
            repr: Repr::PairTuple(Arc::new(f)),
            memo: None,
        })
    }

    /// Modular function `A -> sum_{i in A} c_i`.
    pub fn modular(c: Vec<f64>) -> Result<Self> {
        let n = c.len();
        Self::from_fn(n, move |a| a.elems().iter().map(|&i| c[i]).sum())
    }

    pub fn cardinality(n: usize) -> Result<Self> {
        Self::from_fn(n, |a| a.len() as f64)
    }

    /// `c` on every nonempty pair.
    pub fn constant_pair(n: usize, c: f64) -> Result<Self> {
        Self::pair_from_fn(n, move |_| c)
    }

    /// `c` on every nonempty subset.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::from_fn(n, move |_| c)
    }

    /// Memoize callback values up to `budget` distinct arguments.
    pub fn with_cache(mut self, budget: usize) -> Self {
        self.memo = Some(Arc::new(Memo {
            budget,
            map: Mutex::new(HashMap::new()),
        }));
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet { n: self.n }
    }

    /// True for tables whose entries are all integers.
    pub fn is_integral(&self) -> bool {
        match &self.repr {
            Repr::Table(t) => t.iter().all(|v| v.fract() == 0.0 && v.abs() < 9.0e15),
            _ => false,
        }
    }

    pub fn is_table(&self) -> bool {
        matches!(self.repr, Repr::Table(_))
    }

    /// Comparison tolerance for lattice checks.
    pub fn tolerance(&self) -> f64 {
        if self.is_integral() {
            0.0
        } else {
            1e-9
        }
    }

    fn memo_get(&self, key: impl FnOnce() -> SetArg, compute: impl FnOnce() -> f64) -> f64 {
        match &self.memo {
            None => compute(),
            Some(m) => {
                let key = key();
                if let Some(v) = m.map.lock().expect("memo lock").get(&key) {
                    return *v;
                }
                let v = compute();
                let mut map = m.map.lock().expect("memo lock");
                if map.len() < m.budget {
                    map.insert(key, v);
                }
                v
            }
        }
    }

    /// Value on a subset (power-set domain).
    pub fn set_value(&self, a: SubsetId) -> f64 {
        if a.is_empty() {
            return 0.0;
        }
        match &self.repr {
            Repr::Table(t) => t[a.0 as usize],
            Repr::Set(f) => self.memo_get(|| SetArg::Set(a), || f(a)),
            _ => panic!("set_value called on a {} function", self.kind),
        }
    }

    /// Value on a disjoint pair.
    pub fn pair_value(&self, p: SetPair) -> f64 {
        if p.is_empty() {
            return 0.0;
        }
        match &self.repr {
            Repr::Table(t) => t[p.code(self.n)],
            Repr::Pair(f) => self.memo_get(|| SetArg::Pair(p), || f(p)),
            _ => panic!("pair_value called on a {} function", self.kind),
        }
    }

    /// Value on a k-tuple of subsets.
    pub fn tuple_value(&self, t: &[SubsetId]) -> f64 {
        if t.iter().all(|a| a.is_empty()) {
            return 0.0;
        }
        match &self.repr {
            Repr::Table(tab) => {
                let idx = t
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (l, a)| acc | ((a.0 as usize) << (l * self.n)));
                tab[idx]
            }
            Repr::Tuple(f) => self.memo_get(|| SetArg::Tuple(t.to_vec()), || f(t)),
            _ => panic!("tuple_value called on a {} function", self.kind),
        }
    }

    /// Value on a k-tuple of disjoint pairs.
    pub fn pair_tuple_value(&self, t: &[SetPair]) -> f64 {
        if t.iter().all(|p| p.is_empty()) {
            return 0.0;
        }
        match &self.repr {
            Repr::Table(tab) => {
                let base = pow3(self.n);
                let idx = t
                    .iter()
                    .rev()
                    .fold(0usize, |acc, p| acc * base + p.code(self.n));
                tab[idx]
            }
            Repr::PairTuple(f) => self.memo_get(|| SetArg::PairTuple(t.to_vec()), || f(t)),
            _ => panic!("pair_tuple_value called on a {} function", self.kind),
        }
    }

    /// Checked evaluation on any argument.
    pub fn evaluate(&self, a: &SetArg) -> Result<f64> {
        let full = SubsetId::full(self.n);
        let in_ground = |s: SubsetId| s.is_subset_of(full);
        let mismatch = || Error::DomainMismatch {
            expected: self.kind.to_string(),
            got: a.kind_name(),
        };
        match (self.kind, a) {
            (DomainKind::Powerset, SetArg::Set(s)) if in_ground(*s) => Ok(self.set_value(*s)),
            (DomainKind::DisjointPair, SetArg::Pair(p))
                if in_ground(p.support()) && p.pos.intersection(p.neg).is_empty() =>
            {
                Ok(self.pair_value(*p))
            }
            (DomainKind::KWay(k), SetArg::Tuple(t))
                if t.len() == k && t.iter().all(|s| in_ground(*s)) =>
            {
                Ok(self.tuple_value(t))
            }
            (DomainKind::KWayPair(k), SetArg::PairTuple(t))
                if t.len() == k
                    && t.iter().all(|p| {
                        in_ground(p.support()) && p.pos.intersection(p.neg).is_empty()
                    }) =>
            {
                Ok(self.pair_tuple_value(t))
            }
            _ => Err(mismatch()),
        }
    }

    /// Materialize a callback as a dense table.
    pub fn tabulate(&self) -> Result<Self> {
        match self.kind {
            DomainKind::Powerset => {
                if self.n > MAX_POWERSET_N {
                    return Err(too_large("tabulate", MAX_POWERSET_N, self.n));
                }
                let v: Vec<f64> = (0..1u64 << self.n)
                    .into_par_iter()
                    .map(|m| self.set_value(SubsetId(m)))
                    .collect();
                Self::from_table(self.n, v)
            }
            DomainKind::DisjointPair => {
                if self.n > 15 {
                    return Err(too_large("tabulate pairs", 15, self.n));
                }
                let v: Vec<f64> = (0..pow3(self.n))
                    .into_par_iter()
                    .map(|c| self.pair_value(SetPair::from_code(c, self.n)))
                    .collect();
                Self::pair_from_table(self.n, v)
            }
            DomainKind::KWay(k) => {
                if self.n * k > MAX_POWERSET_N {
                    return Err(too_large("tabulate k-way", MAX_POWERSET_N, self.n * k));
                }
                let n = self.n;
                let mask = SubsetId::full(n).0;
                let v: Vec<f64> = (0..1u64 << (n * k))
                    .into_par_iter()
                    .map(|m| {
                        let t: Vec<SubsetId> =
                            (0..k).map(|l| SubsetId((m >> (l * n)) & mask)).collect();
                        self.tuple_value(&t)
                    })
                    .collect();
                Self::kway_from_table(n, k, v)
            }
            DomainKind::KWayPair(_) => Err(Error::InvalidArgument(
                "k-way pair functions are callback-only".into(),
            )),
        }
    }

    /// Pointwise `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SetFunction, b: f64) -> Result<Self> {
        if self.n != other.n || self.kind != other.kind {
            return Err(Error::DomainMismatch {
                expected: format!("{} on n={}", self.kind, self.n),
                got: format!("{} on n={}", other.kind, other.n),
            });
        }
        let (f, g) = (self.clone(), other.clone());
        let n = self.n;
        match self.kind {
            DomainKind::Powerset if f.is_table() && g.is_table() => {
                let v = (0..1u64 << n)
                    .map(|m| a * f.set_value(SubsetId(m)) + b * g.set_value(SubsetId(m)))
                    .collect();
                Self::from_table(n, v)
            }
            DomainKind::DisjointPair if f.is_table() && g.is_table() => {
                let v = (0..pow3(n))
                    .map(|c| {
                        let p = SetPair::from_code(c, n);
                        a * f.pair_value(p) + b * g.pair_value(p)
                    })
                    .collect();
                Self::pair_from_table(n, v)
            }
            DomainKind::Powerset => {
                Self::from_fn(n, move |s| a * f.set_value(s) + b * g.set_value(s))
            }
            DomainKind::DisjointPair => {
                Self::pair_from_fn(n, move |p| a * f.pair_value(p) + b * g.pair_value(p))
            }
            DomainKind::KWay(k) => Self::kway_from_fn(n, k, move |t| {
                a * f.tuple_value(t) + b * g.tuple_value(t)
            }),
            DomainKind::KWayPair(k) => Self::kway_pair_from_fn(n, k, move |t| {
                a * f.pair_tuple_value(t) + b * g.pair_tuple_value(t)
            }),
        }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.combine(c, self, 0.0)
    }

    /// Value at the full argument (`V`, or `(V, .., V)` for k-way).
    pub fn full_value(&self) -> f64 {
        let full = SubsetId::full(self.n);
        match self.kind {
            DomainKind::Powerset => self.set_value(full),
            DomainKind::KWay(k) => self.tuple_value(&vec![full; k]),
            _ => 0.0,
        }
    }
}

/// All subsets of `{0..n-1}` in bitmask order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = SubsetId> {
    (0..1u64 << n).map(SubsetId)
}

/// All disjoint pairs in base-3 code order.
pub fn all_pairs(n: usize) -> impl Iterator<Item = SetPair> {
    (0..pow3(n)).map(move |c| SetPair::from_code(c, n))
}

/// Outcome of a lattice-inequality check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeCheck {
    pub holds: bool,
    /// A violating pair `(a, b)` with `f(a)+f(b) < f(a v b)+f(a ^ b)`.
    pub witness: Option<(SetArg, SetArg)>,
    /// The violating gap `f(a)+f(b)-f(a v b)-f(a ^ b)`.
    pub gap: f64,
}

impl LatticeCheck {
    fn ok() -> Self {
        Self {
            holds: true,
            witness: None,
            gap: 0.0,
        }
    }
}

fn expect_kind(f: &SetFunction, kind: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::DomainMismatch {
            expected: kind.into(),
            got: f.kind.to_string(),
        })
    }
}

/// Local second differences on the Boolean lattice of `m` elements.
/// Returns the first `(S, i, j)` with a negative gap below `-tol`.
fn local_boolean_check(
    m: usize,
    tol: f64,
    val: &(dyn Fn(u64) -> f64 + Sync),
) -> Option<(u64, usize, usize, f64)> {
    (0..1u64 << m).into_par_iter().find_map_first(|s| {
        let fs = val(s);
        for i in 0..m {
            if s >> i & 1 == 1 {
                continue;
            }
            let si = s | 1 << i;
            let fsi = val(si);
            for j in i + 1..m {
                if s >> j & 1 == 1 {
                    continue;
                }
                let sj = s | 1 << j;
                let gap = fsi + val(sj) - val(si | 1 << j) - fs;
                if gap < -tol {
                    return Some((s, i, j, gap));
                }
            }
        }
        None
    })
}

/// Submodularity `f(A)+f(B) >= f(A u B)+f(A n B)` over all pairs.
///
/// Checked through the equivalent local condition on covering squares,
/// whose violations are themselves violating pairs.
pub fn is_submodular(f: &SetFunction) -> Result<LatticeCheck> {
    expect_kind(f, "powerset", f.kind == DomainKind::Powerset)?;
    if f.n > MAX_POWERSET_N {
        return Err(too_large("is_submodular", MAX_POWERSET_N, f.n));
    }
    let tol = f.tolerance();
    let hit = local_boolean_check(f.n, tol, &|m| f.set_value(SubsetId(m)));
    Ok(match hit {
        None => LatticeCheck::ok(),
        Some((s, i, j, gap)) => LatticeCheck {
            holds: false,
            witness: Some((
                SetArg::Set(SubsetId(s).insert(i)),
                SetArg::Set(SubsetId(s).insert(j)),
            )),
            gap,
        },
    })
}

/// k-way submodularity under componentwise union and intersection.
///
/// The lattice `P(V)^k` is the Boolean lattice on `n*k` elements.
pub fn is_kway_submodular(f: &SetFunction) -> Result<LatticeCheck> {
    let k = match f.kind {
        DomainKind::KWay(k) => k,
        _ => return expect_kind(f, "k-way", false).map(|_| LatticeCheck::ok()),
    };
    if f.n * k > MAX_KWAY_NK {
        return Err(too_large("is_kway_submodular", MAX_KWAY_NK, f.n * k));
    }
    let n = f.n;
    let mask = SubsetId::full(n).0;
    let split = move |m: u64| -> Vec<SubsetId> {
        (0..k).map(|l| SubsetId((m >> (l * n)) & mask)).collect()
    };
    let tol = f.tolerance();
    let hit = local_boolean_check(n * k, tol, &|m| f.tuple_value(&split(m)));
    Ok(match hit {
        None => LatticeCheck::ok(),
        Some((s, i, j, gap)) => LatticeCheck {
            holds: false,
            witness: Some((
                SetArg::Tuple(split(s | 1 << i)),
                SetArg::Tuple(split(s | 1 << j)),
            )),
            gap,
        },
    })
}

/// Bisubmodularity over all pairs of disjoint pairs.
pub fn is_bisubmodular(f: &SetFunction) -> Result<LatticeCheck> {
    expect_kind(f, "disjoint-pair", f.kind == DomainKind::DisjointPair)?;
    if f.n > MAX_BISUBMODULAR_N {
        return Err(too_large("is_bisubmodular", MAX_BISUBMODULAR_N, f.n));
    }
    let n = f.n;
    let tol = f.tolerance();
    let total = pow3(n);
    let hit = (0..total).into_par_iter().find_map_first(|ca| {
        let a = SetPair::from_code(ca, n);
        let fa = f.pair_value(a);
        for cb in ca + 1..total {
            let b = SetPair::from_code(cb, n);
            let gap = fa + f.pair_value(b) - f.pair_value(a.join(&b)) - f.pair_value(a.meet(&b));
            if gap < -tol {
                return Some((a, b, gap));
            }
        }
        None
    });
    Ok(match hit {
        None => LatticeCheck::ok(),
        Some((a, b, gap)) => LatticeCheck {
            holds: false,
            witness: Some((SetArg::Pair(a), SetArg::Pair(b))),
            gap,
        },
    })
}

/// Minimum of `f(A)+f(B)-f(A u B)-f(A n B)` over unordered pairs of
/// incomparable subsets. Returns `+inf` when no such pair exists (`n = 1`).
pub fn delta_submodularity_gap(f: &SetFunction) -> Result<f64> {
    expect_kind(f, "powerset", f.kind == DomainKind::Powerset)?;
    if f.n > MAX_GAP_N {
        return Err(too_large("delta_submodularity_gap", MAX_GAP_N, f.n));
    }
    let n = f.n;
    let total = 1u64 << n;
    let gap = (0..total)
        .into_par_iter()
        .map(|a| {
            let fa = f.set_value(SubsetId(a));
            let mut best = f64::INFINITY;
            for b in a + 1..total {
                if a & !b == 0 || b & !a == 0 {
                    continue;
                }
                let g = fa + f.set_value(SubsetId(b))
                    - f.set_value(SubsetId(a | b))
                    - f.set_value(SubsetId(a & b));
                if g < best {
                    best = g;
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(gap)
}

/// Result of writing `f = f1 - f2` with `f1` submodular and `f2` strictly submodular.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub f1: SetFunction,
    pub f2: SetFunction,
    pub c: f64,
    pub delta_f: f64,
    pub delta_g: f64,
}

/// Reference strictly submodular function `A -> #A * #(V \ A)`.
pub fn default_strict_submodular(n: usize) -> Result<SetFunction> {
    let v = all_subsets(n)
        .map(|a| (a.len() * (n - a.len())) as f64)
        .collect();
    SetFunction::from_table(n, v)
}

/// Decompose with the default reference function.
pub fn decompose_difference_submodular(f: &SetFunction) -> Result<Decomposition> {
    let g = default_strict_submodular(f.n)?;
    decompose_difference_submodular_with(f, &g)
}

/// Decompose `f = f1 - f2` with `f2 = C g`, `C = max(ceil(-delta(f)/delta(g)), 0) + 1`.
pub fn decompose_difference_submodular_with(
    f: &SetFunction,
    g: &SetFunction,
) -> Result<Decomposition> {
    expect_kind(f, "powerset", f.kind == DomainKind::Powerset)?;
    if f.n > MAX_GAP_N {
        return Err(too_large("decompose_difference_submodular", MAX_GAP_N, f.n));
    }
    let delta_f = delta_submodularity_gap(f)?;
    let delta_g = delta_submodularity_gap(g)?;
    if delta_g <= 0.0 {
        return Err(Error::Hypothesis(format!(
            "reference function is not strictly submodular (gap {delta_g})"
        )));
    }
    let c = if delta_f.is_finite() && delta_g.is_finite() {
        (-delta_f / delta_g).ceil().max(0.0) + 1.0
    } else {
        1.0
    };
    let f = f.tabulate()?;
    let f2 = g.tabulate()?.scale(c)?;
    let f1 = f.combine(1.0, &f2, 1.0)?;
    Ok(Decomposition {
        f1,
        f2,
        c,
        delta_f,
        delta_g,
    })
}
