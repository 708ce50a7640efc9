//! Lovász extensions of set functions on power sets, disjoint pairs and tuples.
//!
//! Points for k-way domains use a block layout: coordinate `l * n + i` is
//! element `i` of block `l`.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{too_large, Error, Result};
use crate::graph::Graph;
use crate::setfn::{all_subsets, DomainKind, SetArg, SetFunction, SetPair, SubsetId};

/// Largest point dimension for subdifferential vertex enumeration.
pub const MAX_SUBDIFF_DIM: usize = 8;
/// Largest ground set for the Möbius form.
pub const MAX_MOBIUS_N: usize = 16;
const MAX_PIECES: usize = 4_000_000;

/// Which extension applies; follows the domain of the set function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtensionKind {
    Original,
    DisjointPair,
    KWay(usize),
    KWayPair(usize),
}

impl ExtensionKind {
    pub fn of(kind: DomainKind) -> Self {
        match kind {
            DomainKind::Powerset => Self::Original,
            DomainKind::DisjointPair => Self::DisjointPair,
            DomainKind::KWay(k) => Self::KWay(k),
            DomainKind::KWayPair(k) => Self::KWayPair(k),
        }
    }

    pub fn is_pair(self) -> bool {
        matches!(self, Self::DisjointPair | Self::KWayPair(_))
    }

    pub fn k(self) -> usize {
        match self {
            Self::Original | Self::DisjointPair => 1,
            Self::KWay(k) | Self::KWayPair(k) => k,
        }
    }
}

impl fmt::Display for ExtensionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Original => write!(f, "original"),
            Self::DisjointPair => write!(f, "disjoint-pair"),
            Self::KWay(k) => write!(f, "{k}-way"),
            Self::KWayPair(k) => write!(f, "{k}-way-disjoint-pair"),
        }
    }
}

/// One level set crossed by the sorted chain with its interval length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainLink {
    pub arg: SetArg,
    pub length: f64,
}

/// Value of an extension with the level chain and one piece gradient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PLValue {
    pub value: f64,
    pub chain: Vec<ChainLink>,
    pub subgradient: Vec<f64>,
}

fn check_layout(f: &SetFunction, x: &[f64]) -> Result<()> {
    let d = f.n() * f.kind().k();
    if x.len() != d {
        return Err(Error::InvalidArgument(format!(
            "point has length {}, expected {d} for a {} function on n = {}",
            x.len(),
            f.kind(),
            f.n()
        )));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("coordinate {i} is not finite")));
    }
    Ok(())
}

fn expect_ext(f: &SetFunction, want: &[ExtensionKind], name: &str) -> Result<ExtensionKind> {
    let e = ExtensionKind::of(f.kind());
    if want.contains(&e) {
        Ok(e)
    } else {
        Err(Error::DomainMismatch {
            expected: name.into(),
            got: f.kind().to_string(),
        })
    }
}

/// Level-set masks: `pos[l]` and `neg[l]` for block `l`.
#[derive(Clone)]
struct Level {
    n: usize,
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl Level {
    fn empty(n: usize, k: usize) -> Self {
        Self {
            n,
            pos: vec![0; k],
            neg: vec![0; k],
        }
    }

    fn add(&mut self, c: usize, sign: i8) {
        let (l, i) = (c / self.n, c % self.n);
        if sign >= 0 {
            self.pos[l] |= 1 << i;
        } else {
            self.neg[l] |= 1 << i;
        }
    }

    fn arg(&self, ext: ExtensionKind) -> SetArg {
        let p = |l: usize| SetPair {
            pos: SubsetId(self.pos[l]),
            neg: SubsetId(self.neg[l]),
        };
        match ext {
            ExtensionKind::Original => SetArg::Set(SubsetId(self.pos[0])),
            ExtensionKind::DisjointPair => SetArg::Pair(p(0)),
            ExtensionKind::KWay(_) => SetArg::Tuple(self.pos.iter().map(|&m| SubsetId(m)).collect()),
            ExtensionKind::KWayPair(k) => SetArg::PairTuple((0..k).map(p).collect()),
        }
    }

    fn value(&self, f: &SetFunction, ext: ExtensionKind) -> f64 {
        match ext {
            ExtensionKind::Original => f.set_value(SubsetId(self.pos[0])),
            ExtensionKind::DisjointPair => f.pair_value(SetPair {
                pos: SubsetId(self.pos[0]),
                neg: SubsetId(self.neg[0]),
            }),
            ExtensionKind::KWay(_) => {
                let t: Vec<SubsetId> = self.pos.iter().map(|&m| SubsetId(m)).collect();
                f.tuple_value(&t)
            }
            ExtensionKind::KWayPair(k) => {
                let t: Vec<SetPair> = (0..k)
                    .map(|l| SetPair {
                        pos: SubsetId(self.pos[l]),
                        neg: SubsetId(self.neg[l]),
                    })
                    .collect();
                f.pair_tuple_value(&t)
            }
        }
    }
}

fn sort_key(ext: ExtensionKind, v: f64) -> f64 {
    if ext.is_pair() {
        v.abs()
    } else {
        v
    }
}

fn canonical_order(ext: ExtensionKind, x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| sort_key(ext, x[a]).total_cmp(&sort_key(ext, x[b])));
    order
}

fn canonical_signs(x: &[f64]) -> Vec<i8> {
    x.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect()
}

/// Values `f(R_i)` of the top sets `R_i = {order[i..]}`, and the piece gradient.
fn piece(
    f: &SetFunction,
    ext: ExtensionKind,
    order: &[usize],
    signs: &[i8],
) -> (Vec<f64>, Vec<f64>, Vec<Level>) {
    let d = order.len();
    let mut lvl = Level::empty(f.n(), ext.k());
    let mut vals = vec![0.0; d + 1];
    let mut levels = vec![lvl.clone(); d];
    let mut grad = vec![0.0; d];
    for i in (0..d).rev() {
        let c = order[i];
        lvl.add(c, if ext.is_pair() { signs[c] } else { 1 });
        vals[i] = lvl.value(f, ext);
        levels[i] = lvl.clone();
        let s = if ext.is_pair() { signs[c] as f64 } else { 1.0 };
        grad[c] = s * (vals[i] - vals[i + 1]);
    }
    (vals, grad, levels)
}

fn chain_eval(f: &SetFunction, ext: ExtensionKind, x: &[f64]) -> PLValue {
    let order = canonical_order(ext, x);
    let signs = canonical_signs(x);
    let (vals, grad, levels) = piece(f, ext, &order, &signs);
    let mut value = 0.0;
    let mut prev = 0.0;
    let mut chain = Vec::new();
    for (i, &c) in order.iter().enumerate() {
        let key = sort_key(ext, x[c]);
        let len = key - prev;
        prev = key;
        if len != 0.0 {
            value += len * vals[i];
            chain.push(ChainLink {
                arg: levels[i].arg(ext),
                length: len,
            });
        }
    }
    PLValue {
        value,
        chain,
        subgradient: grad,
    }
}

/// Original extension by the sorted sum form.
pub fn eval_original(f: &SetFunction, x: &[f64]) -> Result<PLValue> {
    let ext = expect_ext(f, &[ExtensionKind::Original], "powerset")?;
    check_layout(f, x)?;
    Ok(chain_eval(f, ext, x))
}

/// Original extension by breakpoint integration over strict level sets.
pub fn eval_original_integral(f: &SetFunction, x: &[f64]) -> Result<f64> {
    expect_ext(f, &[ExtensionKind::Original], "powerset")?;
    check_layout(f, x)?;
    Ok(integral_nonpair(f, ExtensionKind::Original, x))
}

fn distinct_sorted(vals: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = vals.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn integral_nonpair(f: &SetFunction, ext: ExtensionKind, x: &[f64]) -> f64 {
    let n = f.n();
    let levels = distinct_sorted(x.iter().copied());
    let above = |t: f64| {
        let mut lvl = Level::empty(n, ext.k());
        for (c, &v) in x.iter().enumerate() {
            if v > t {
                lvl.add(c, 1);
            }
        }
        lvl.value(f, ext)
    };
    let mut full = Level::empty(n, ext.k());
    (0..x.len()).for_each(|c| full.add(c, 1));
    let mut total = levels[0] * full.value(f, ext);
    for w in levels.windows(2) {
        total += (w[1] - w[0]) * above(w[0]);
    }
    total
}

fn integral_pair(f: &SetFunction, ext: ExtensionKind, x: &[f64]) -> f64 {
    let n = f.n();
    let mut levels = distinct_sorted(x.iter().map(|v| v.abs()));
    if levels[0] != 0.0 {
        levels.insert(0, 0.0);
    }
    let mut total = 0.0;
    for w in levels.windows(2) {
        let mut lvl = Level::empty(n, ext.k());
        for (c, &v) in x.iter().enumerate() {
            if v > w[0] {
                lvl.add(c, 1);
            } else if v < -w[0] {
                lvl.add(c, -1);
            }
        }
        total += (w[1] - w[0]) * lvl.value(f, ext);
    }
    total
}

/// Möbius coefficients `m(A) = sum_{B subset A} (-1)^{|A\B|} f(B)`.
pub fn mobius_coefficients(f: &SetFunction) -> Result<Vec<f64>> {
    expect_ext(f, &[ExtensionKind::Original], "powerset")?;
    let n = f.n();
    if n > MAX_MOBIUS_N {
        return Err(too_large("Möbius form", MAX_MOBIUS_N, n));
    }
    let mut m: Vec<f64> = all_subsets(n).map(|a| f.set_value(a)).collect();
    for i in 0..n {
        for s in 0..m.len() {
            if s >> i & 1 == 1 {
                m[s] -= m[s ^ (1 << i)];
            }
        }
    }
    Ok(m)
}

/// Original extension as `sum_A m(A) min_{i in A} x_i`.
pub fn eval_original_mobius(f: &SetFunction, x: &[f64]) -> Result<f64> {
    let m = mobius_coefficients(f)?;
    check_layout(f, x)?;
    let mut mins = vec![f64::INFINITY; m.len()];
    let mut total = 0.0;
    for s in 1..m.len() {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        mins[s] = if rest == 0 { x[low] } else { mins[rest].min(x[low]) };
        if m[s] != 0.0 {
            total += m[s] * mins[s];
        }
    }
    Ok(total)
}

/// Disjoint-pair extension by sorting absolute values.
pub fn eval_disjoint_pair(f: &SetFunction, x: &[f64]) -> Result<PLValue> {
    let ext = expect_ext(f, &[ExtensionKind::DisjointPair], "disjoint-pair")?;
    check_layout(f, x)?;
    Ok(chain_eval(f, ext, x))
}

/// Disjoint-pair extension by integration over signed level sets.
pub fn eval_disjoint_pair_integral(f: &SetFunction, x: &[f64]) -> Result<f64> {
    expect_ext(f, &[ExtensionKind::DisjointPair], "disjoint-pair")?;
    check_layout(f, x)?;
    Ok(integral_pair(f, ExtensionKind::DisjointPair, x))
}

/// k-way extension (`disjoint` selects the disjoint-pair variant).
pub fn eval_kway(f: &SetFunction, x: &[f64], disjoint: bool) -> Result<PLValue> {
    let ext = ExtensionKind::of(f.kind());
    let ok = match ext {
        ExtensionKind::KWay(_) => !disjoint,
        ExtensionKind::KWayPair(_) => disjoint,
        _ => false,
    };
    if !ok {
        return Err(Error::DomainMismatch {
            expected: if disjoint { "k-way-disjoint-pair" } else { "k-way" }.into(),
            got: f.kind().to_string(),
        });
    }
    check_layout(f, x)?;
    Ok(chain_eval(f, ext, x))
}

/// k-way extension by integration over the global threshold.
pub fn eval_kway_integral(f: &SetFunction, x: &[f64]) -> Result<f64> {
    let ext = ExtensionKind::of(f.kind());
    check_layout(f, x)?;
    match ext {
        ExtensionKind::KWay(_) => Ok(integral_nonpair(f, ext, x)),
        ExtensionKind::KWayPair(_) => Ok(integral_pair(f, ext, x)),
        _ => Err(Error::DomainMismatch {
            expected: "k-way".into(),
            got: f.kind().to_string(),
        }),
    }
}

/// Extension matching the domain of `f`.
pub fn extension(f: &SetFunction, x: &[f64]) -> Result<PLValue> {
    check_layout(f, x)?;
    Ok(chain_eval(f, ExtensionKind::of(f.kind()), x))
}

/// Value of the extension matching the domain of `f`.
pub fn extension_value(f: &SetFunction, x: &[f64]) -> Result<f64> {
    extension(f, x).map(|v| v.value)
}

/// Canonical piece gradient at `x` (stable index tie-break, sign `+` at zeros).
pub fn subgradient_at(f: &SetFunction, kind: ExtensionKind, x: &[f64]) -> Result<Vec<f64>> {
    if kind != ExtensionKind::of(f.kind()) {
        return Err(Error::DomainMismatch {
            expected: kind.to_string(),
            got: f.kind().to_string(),
        });
    }
    check_layout(f, x)?;
    let order = canonical_order(kind, x);
    Ok(piece(f, kind, &order, &canonical_signs(x)).1)
}

/// Gradient of the piece active at `x - eps * d` for small `eps > 0`.
///
/// For a convex extension this minimizes `<v, d>` over the subdifferential at `x`.
pub fn directional_piece(f: &SetFunction, x: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    check_layout(f, x)?;
    if d.len() != x.len() {
        return Err(Error::InvalidArgument("direction length mismatch".into()));
    }
    let ext = ExtensionKind::of(f.kind());
    let mut order: Vec<usize> = (0..x.len()).collect();
    let signs: Vec<i8> = if ext.is_pair() {
        x.iter()
            .zip(d)
            .map(|(&xi, &di)| {
                if xi > 0.0 || (xi == 0.0 && di <= 0.0) {
                    1
                } else {
                    -1
                }
            })
            .collect()
    } else {
        vec![1; x.len()]
    };
    let second = |c: usize| -> f64 {
        if ext.is_pair() {
            if x[c] == 0.0 {
                d[c].abs()
            } else {
                -(signs[c] as f64) * d[c]
            }
        } else {
            -d[c]
        }
    };
    order.sort_by(|&a, &b| {
        sort_key(ext, x[a])
            .total_cmp(&sort_key(ext, x[b]))
            .then(second(a).total_cmp(&second(b)))
    });
    Ok(piece(f, ext, &order, &signs).1)
}

/// Piece gradients for all orderings and zero-sign choices consistent with `x`.
pub fn subdifferential_vertices_at(f: &SetFunction, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_layout(f, x)?;
    let d = x.len();
    if d > MAX_SUBDIFF_DIM {
        return Err(too_large("subdifferential enumeration", MAX_SUBDIFF_DIM, d));
    }
    let ext = ExtensionKind::of(f.kind());
    let base = canonical_order(ext, x);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &c in &base {
        match groups.last_mut() {
            Some(g) if sort_key(ext, x[g[0]]) == sort_key(ext, x[c]) => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    let zeros: Vec<usize> = if ext.is_pair() {
        (0..d).filter(|&c| x[c] == 0.0).collect()
    } else {
        Vec::new()
    };
    let mut count: usize = 1 << zeros.len();
    for g in &groups {
        count = count.saturating_mul((1..=g.len()).product());
    }
    if count > MAX_PIECES {
        return Err(too_large("subdifferential pieces", MAX_PIECES, count));
    }
    let group_perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| permutations(g)).collect();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut out = Vec::new();
    let mut idx = vec![0usize; groups.len()];
    let mut signs = canonical_signs(x);
    loop {
        let order: Vec<usize> = idx
            .iter()
            .zip(&group_perms)
            .flat_map(|(&i, p)| p[i].iter().copied())
            .collect();
        for mask in 0..(1usize << zeros.len()) {
            for (b, &c) in zeros.iter().enumerate() {
                signs[c] = if mask >> b & 1 == 1 { -1 } else { 1 };
            }
            let g = piece(f, ext, &order, &signs).1;
            let key: Vec<u64> = g.iter().map(|v| (v + 0.0).to_bits()).collect();
            if seen.insert(key) {
                out.push(g);
            }
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                out.sort_by(|a, b| {
                    a.iter()
                        .zip(b)
                        .map(|(p, q)| p.total_cmp(q))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < group_perms[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Vertices of the subdifferential of the extension at the indicator of `a`.
pub fn subdifferential_vertices(f: &SetFunction, a: &SetArg) -> Result<Vec<Vec<f64>>> {
    f.evaluate(a)?;
    subdifferential_vertices_at(f, &a.indicator(f.n()))
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Level-set arguments of `x` at each distinct threshold (positive ones for pair kinds).
pub fn associated_set_tuples(f: &SetFunction, x: &[f64]) -> Result<Vec<SetArg>> {
    check_layout(f, x)?;
    let ext = ExtensionKind::of(f.kind());
    let mut keys = distinct_sorted(x.iter().map(|&v| sort_key(ext, v)));
    if ext.is_pair() {
        keys.retain(|&t| t > 0.0);
    }
    Ok(keys
        .iter()
        .map(|&t| {
            let mut lvl = Level::empty(f.n(), ext.k());
            for (c, &v) in x.iter().enumerate() {
                if sort_key(ext, v) >= t {
                    lvl.add(c, if ext.is_pair() && v < 0.0 { -1 } else { 1 });
                }
            }
            lvl.arg(ext)
        })
        .collect())
}

type FamilyFn = Arc<dyn Fn(&SetArg) -> bool + Send + Sync>;

/// Restricted family of arguments and the induced point predicate.
#[derive(Clone)]
pub struct FeasibleDomain {
    name: String,
    family: FamilyFn,
}

impl fmt::Debug for FeasibleDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeasibleDomain({})", self.name)
    }
}

impl FeasibleDomain {
    pub fn new(name: &str, family: impl Fn(&SetArg) -> bool + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            family: Arc::new(family),
        }
    }

    /// Every argument is admissible.
    pub fn all() -> Self {
        Self::new("all", |_| true)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Family membership; the all-empty argument is always a member.
    pub fn contains(&self, a: &SetArg) -> bool {
        a.is_empty() || (self.family)(a)
    }

    /// True when every associated level argument of `x` is in the family.
    pub fn contains_point(&self, f: &SetFunction, x: &[f64]) -> Result<bool> {
        let args = associated_set_tuples(f, x)?;
        let ext = ExtensionKind::of(f.kind());
        let n = f.n();
        Ok(args.iter().all(|a| {
            let full = !ext.is_pair()
                && match a {
                    SetArg::Set(s) => *s == SubsetId::full(n),
                    SetArg::Tuple(t) => t.iter().all(|s| *s == SubsetId::full(n)),
                    _ => false,
                };
            full || self.contains(a)
        }))
    }
}

/// Rules turning `h` on subsets into a function on disjoint pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairRule {
    /// `h(A) + h(V \ B) - h(V)`; same extension as `h`.
    Complement,
    /// `h(A) + h(B)` for symmetric `h`; same extension as `h`.
    Symmetric,
    /// `h(A)`; same extension as `h` on the nonnegative orthant.
    Positive,
    /// `h(A u B)`; extension `h^L(|x|)`.
    Union,
    /// `h(A) + h(B)`; extension `h^L(x+) + h^L(x-)`.
    Sum,
    /// `h(A) - h(B)`; extension `h^L(x+) - h^L(x-)`.
    Difference,
}

/// Build the disjoint-pair function obtained from `h` by `rule`.
pub fn transform_original_to_pair(h: &SetFunction, rule: PairRule) -> Result<SetFunction> {
    expect_ext(h, &[ExtensionKind::Original], "powerset")?;
    let n = h.n();
    let full = SubsetId::full(n);
    if rule == PairRule::Symmetric {
        if n > crate::setfn::MAX_POWERSET_N {
            return Err(too_large("symmetry check", crate::setfn::MAX_POWERSET_N, n));
        }
        let tol = h.tolerance();
        if let Some(a) = all_subsets(n).find(|&a| (h.set_value(a) - h.set_value(a.complement(n))).abs() > tol) {
            return Err(Error::Hypothesis(format!(
                "rule requires a symmetric function; h({a}) != h(complement)"
            )));
        }
    }
    let h = h.clone();
    let hv = h.set_value(full);
    SetFunction::pair_from_fn(n, move |p: SetPair| match rule {
        PairRule::Complement => {
            h.set_value(p.pos) + h.set_value(p.neg.complement(n)) - hv
        }
        PairRule::Symmetric | PairRule::Sum => h.set_value(p.pos) + h.set_value(p.neg),
        PairRule::Positive => h.set_value(p.pos),
        PairRule::Union => h.set_value(p.support()),
        PairRule::Difference => h.set_value(p.pos) - h.set_value(p.neg),
    })
}

/// Lattice sense for join and meet of points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeSense {
    /// Componentwise max and min.
    S2,
    /// Sign-aware join and meet; mixed signs collapse to zero.
    BS2,
}

pub fn lattice_join_meet(x: &[f64], y: &[f64], sense: LatticeSense) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument("points differ in length".into()));
    }
    let pairs = x.iter().zip(y);
    Ok(match sense {
        LatticeSense::S2 => (
            pairs.clone().map(|(a, b)| a.max(*b)).collect(),
            pairs.map(|(a, b)| a.min(*b)).collect(),
        ),
        LatticeSense::BS2 => pairs
            .map(|(&a, &b)| {
                if a * b < 0.0 {
                    (0.0, 0.0)
                } else if a >= 0.0 && b >= 0.0 {
                    (a.max(b), a.min(b))
                } else {
                    (a.min(b), a.max(b))
                }
            })
            .unzip(),
    })
}

/// Comonotonic or absolutely comonotonic sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comonotonicity {
    Plain,
    Absolute,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComonotonicCheck {
    pub holds: bool,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Draw a (absolutely) comonotonic pair of length `n`.
pub fn sample_comonotonic_pair<R: Rng + ?Sized>(
    n: usize,
    mode: Comonotonicity,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut draw = |lo: f64| {
        let mut v: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    lo.max(0.0)
                } else {
                    rng.gen_range(lo..2.0)
                }
            })
            .collect();
        v.sort_by(f64::total_cmp);
        let mut out = vec![0.0; n];
        for (r, &c) in perm.iter().enumerate() {
            out[c] = v[r];
        }
        out
    };
    match mode {
        Comonotonicity::Plain => (draw(-2.0), draw(-2.0)),
        Comonotonicity::Absolute => {
            let (mut a, mut b) = (draw(0.0), draw(0.0));
            for c in 0..n {
                if rng.gen_bool(0.5) {
                    a[c] = -a[c];
                    b[c] = -b[c];
                }
            }
            (a, b)
        }
    }
}

/// Sample pairs and test `F(x) + F(y) = F(x + y)`; refutation only.
pub fn check_comonotonic_additivity<R: Rng + ?Sized>(
    func: &dyn Fn(&[f64]) -> f64,
    n: usize,
    trials: usize,
    mode: Comonotonicity,
    rng: &mut R,
) -> ComonotonicCheck {
    for _ in 0..trials {
        let (x, y) = sample_comonotonic_pair(n, mode, rng);
        let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let (fx, fy, fs) = (func(&x), func(&y), func(&s));
        if (fx + fy - fs).abs() > 1e-9 * (1.0 + fx.abs() + fy.abs()) {
            return ComonotonicCheck {
                holds: false,
                witness: Some((x, y)),
            };
        }
    }
    ComonotonicCheck {
        holds: true,
        witness: None,
    }
}

/// Rows of the closed-form catalogs for original and disjoint-pair extensions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TableEntry {
    Cut,
    Constant(f64),
    Volume,
    MinVolume,
    PairCount,
    CardinalityPower(u32),
    VolumePower(u32),
    VertexBoundary,
    CutSum,
    EdgesBetween,
    PairConstant(f64),
    PairVolume,
    PairMinVolume,
    InnerEdges,
    UnionTimesInner,
    UnionTimesOuter,
}

impl TableEntry {
    /// All sixteen rows with representative parameters.
    pub fn all() -> Vec<Self> {
        use TableEntry::*;
        vec![
            Cut,
            Constant(2.5),
            Volume,
            MinVolume,
            PairCount,
            CardinalityPower(2),
            VolumePower(2),
            VertexBoundary,
            CutSum,
            EdgesBetween,
            PairConstant(2.5),
            PairVolume,
            PairMinVolume,
            InnerEdges,
            UnionTimesInner,
            UnionTimesOuter,
        ]
    }

    pub fn is_pair(&self) -> bool {
        use TableEntry::*;
        matches!(
            self,
            CutSum | EdgesBetween | PairConstant(_) | PairVolume | PairMinVolume | InnerEdges
                | UnionTimesInner | UnionTimesOuter
        )
    }

    pub fn name(&self) -> &'static str {
        use TableEntry::*;
        match self {
            Cut => "cut",
            Constant(_) => "const",
            Volume => "vol",
            MinVolume => "minvol",
            PairCount => "pairs",
            CardinalityPower(_) => "card-pow",
            VolumePower(_) => "vol-pow",
            VertexBoundary => "vertex-boundary",
            CutSum => "pair-cut",
            EdgesBetween => "pair-between",
            PairConstant(_) => "pair-const",
            PairVolume => "pair-vol",
            PairMinVolume => "pair-minvol",
            InnerEdges => "pair-inner",
            UnionTimesInner => "pair-union-inner",
            UnionTimesOuter => "pair-union-outer",
        }
    }

    /// Parse a row name; `param` supplies the constant or exponent where used.
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self> {
        use TableEntry::*;
        let c = param.unwrap_or(1.0);
        let k = param.unwrap_or(2.0);
        let exp = || {
            if k >= 1.0 && k.fract() == 0.0 {
                Ok(k as u32)
            } else {
                Err(Error::InvalidArgument(format!("exponent must be a positive integer, got {k}")))
            }
        };
        Ok(match name {
            "cut" => Cut,
            "const" => Constant(c),
            "vol" => Volume,
            "minvol" => MinVolume,
            "pairs" => PairCount,
            "card-pow" => CardinalityPower(exp()?),
            "vol-pow" => VolumePower(exp()?),
            "vertex-boundary" => VertexBoundary,
            "pair-cut" => CutSum,
            "pair-between" => EdgesBetween,
            "pair-const" => PairConstant(c),
            "pair-vol" => PairVolume,
            "pair-minvol" => PairMinVolume,
            "pair-inner" => InnerEdges,
            "pair-union-inner" => UnionTimesInner,
            "pair-union-outer" => UnionTimesOuter,
            other => return Err(Error::UnknownEntry(other.into())),
        })
    }
}

fn weighted_l1_center(x: &[f64], w: &[f64]) -> f64 {
    x.iter()
        .map(|&t| x.iter().zip(w).map(|(&xi, &wi)| wi * (xi - t).abs()).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Closed-form continuous objective of a catalog row on a graph.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    entry: TableEntry,
    graph: Graph,
}

/// Closed-form evaluator for `entry` on `graph`.
pub fn closed_form(entry: TableEntry, graph: &Graph) -> ClosedForm {
    ClosedForm {
        entry,
        graph: graph.clone(),
    }
}

impl ClosedForm {
    pub fn entry(&self) -> TableEntry {
        self.entry
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        use TableEntry::*;
        let g = &self.graph;
        let n = g.n();
        assert_eq!(x.len(), n, "point length must equal the vertex count");
        let deg = g.degrees();
        let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        let sum_edges = |h: &dyn Fn(f64, f64) -> f64| -> f64 {
            g.edges().iter().map(|e| e.w * h(x[e.u], x[e.v])).sum()
        };
        let sorted_power = |weights: &[f64], k: u32| -> f64 {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
            let mut tail: Vec<f64> = vec![0.0; n + 1];
            for p in (0..n).rev() {
                tail[p] = tail[p + 1] + weights[idx[p]];
            }
            (0..n)
                .map(|p| x[idx[p]] * (tail[p].powi(k as i32) - tail[p + 1].powi(k as i32)))
                .sum()
        };
        match self.entry {
            Cut | CutSum => sum_edges(&|a, b| (a - b).abs()),
            Constant(c) => c * x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Volume => x.iter().zip(deg).map(|(a, d)| a * d).sum(),
            MinVolume | PairMinVolume => weighted_l1_center(x, deg),
            PairCount => {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..i {
                        s += (x[i] - x[j]).abs();
                    }
                }
                s
            }
            CardinalityPower(k) => sorted_power(&vec![1.0; n], k),
            VolumePower(k) => sorted_power(deg, k),
            VertexBoundary => (0..n)
                .map(|i| {
                    let nb = g.closed_neighborhood(i);
                    let hi = nb.iter().map(|&j| x[j]).fold(f64::NEG_INFINITY, f64::max);
                    let lo = nb.iter().map(|&j| x[j]).fold(f64::INFINITY, f64::min);
                    hi - lo
                })
                .sum(),
            EdgesBetween => {
                let a: f64 = abs.iter().zip(deg).map(|(a, d)| a * d).sum();
                0.5 * (a - sum_edges(&|p, q| (p + q).abs()))
            }
            PairConstant(c) => c * abs.iter().copied().fold(0.0, f64::max),
            PairVolume => abs.iter().zip(deg).map(|(a, d)| a * d).sum(),
            InnerEdges => sum_edges(&|p, q| p.abs().min(q.abs())),
            UnionTimesInner => (0..n)
                .map(|k| sum_edges(&|p, q| abs[k].min(p.abs()).min(q.abs())))
                .sum(),
            UnionTimesOuter => {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..i {
                        s += (abs[i] - abs[j]).abs();
                    }
                }
                s
            }
        }
    }
}

/// The set function whose extension a catalog row describes.
pub fn table_set_function(entry: TableEntry, graph: &Graph) -> Result<SetFunction> {
    use TableEntry::*;
    let g = graph.clone();
    let n = g.n();
    let nb: Vec<SubsetId> = (0..n)
        .map(|i| SubsetId::from_elems(&g.closed_neighborhood(i)))
        .collect();
    let minvol = {
        let g = g.clone();
        move |a: SubsetId| g.vol(a).min(g.vol(a.complement(n)))
    };
    match entry {
        Cut => SetFunction::from_fn(n, move |a| g.cut(a)),
        Constant(c) => SetFunction::constant(n, c),
        Volume => SetFunction::modular(g.degrees().to_vec()),
        MinVolume => SetFunction::from_fn(n, minvol),
        PairCount => SetFunction::from_fn(n, move |a| (a.len() * (n - a.len())) as f64),
        CardinalityPower(k) => SetFunction::from_fn(n, move |a| (a.len() as f64).powi(k as i32)),
        VolumePower(k) => SetFunction::from_fn(n, move |a| g.vol(a).powi(k as i32)),
        VertexBoundary => SetFunction::from_fn(n, move |a| {
            nb.iter()
                .filter(|&&s| !s.intersection(a).is_empty() && !s.is_subset_of(a))
                .count() as f64
        }),
        CutSum => SetFunction::pair_from_fn(n, move |p| g.cut(p.pos) + g.cut(p.neg)),
        EdgesBetween => SetFunction::pair_from_fn(n, move |p| g.edges_between(p.pos, p.neg)),
        PairConstant(c) => SetFunction::constant_pair(n, c),
        PairVolume => SetFunction::pair_from_fn(n, move |p| g.vol(p.pos) + g.vol(p.neg)),
        PairMinVolume => SetFunction::pair_from_fn(n, move |p| minvol(p.pos) + minvol(p.neg)),
        InnerEdges => SetFunction::pair_from_fn(n, move |p| g.inner_weight(p.support())),
        UnionTimesInner => SetFunction::pair_from_fn(n, move |p| {
            let s = p.support();
            s.len() as f64 * g.inner_weight(s)
        }),
        UnionTimesOuter => SetFunction::pair_from_fn(n, move |p| {
            let s = p.support().len();
            (s * (n - s)) as f64
        }),
    }
}
