//! Exhaustive solvers used as ground truth.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{too_large, Error, Result};
use crate::graph::Graph;
use crate::lovasz::eval_original;
use crate::setfn::{pow3, DomainKind, SetArg, SetFunction, SetPair, SubsetId};

pub const MAX_SUBSET_N: usize = 20;
pub const MAX_PAIR_N: usize = 13;
pub const MAX_PARTITION_N: usize = 12;
const MAX_WITNESSES: usize = 16;
const CHUNK: u64 = 1 << 12;

/// Optimization sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }

    pub fn worst(self) -> f64 {
        match self {
            Sense::Min => f64::INFINITY,
            Sense::Max => f64::NEG_INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub optimum: f64,
    /// Optimal arguments in enumeration order (at most 16).
    pub witnesses: Vec<SetArg>,
    pub evaluations: u64,
}

struct Best {
    value: f64,
    idx: Vec<u64>,
    count: u64,
}

fn merge(sense: Sense, mut a: Best, b: Best) -> Best {
    a.count += b.count;
    if sense.better(b.value, a.value) {
        a.value = b.value;
        a.idx = b.idx;
    } else if b.value == a.value {
        a.idx.extend(b.idx);
        a.idx.sort_unstable();
        a.idx.truncate(MAX_WITNESSES);
    }
    a
}

/// Deterministic parallel scan of `0..total`; `eval` returns `None` to skip.
fn scan(total: u64, sense: Sense, eval: &(dyn Fn(u64) -> Option<f64> + Sync)) -> Best {
    let chunks = total.div_ceil(CHUNK);
    let empty = || Best {
        value: sense.worst(),
        idx: Vec::new(),
        count: 0,
    };
    let parts: Vec<Best> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut b = empty();
            for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                if let Some(v) = eval(i) {
                    b.count += 1;
                    if sense.better(v, b.value) {
                        b.value = v;
                        b.idx.clear();
                        b.idx.push(i);
                    } else if v == b.value && b.idx.len() < MAX_WITNESSES {
                        b.idx.push(i);
                    }
                }
            }
            b
        })
        .collect();
    parts.into_iter().fold(empty(), |a, b| merge(sense, a, b))
}

fn ratio(fv: f64, g: Option<f64>) -> Option<f64> {
    match g {
        None => Some(fv),
        Some(gv) if gv > 0.0 => Some(fv / gv),
        Some(_) => None,
    }
}

/// Optimum of `f/g` (or `f` when `g` is absent) over nonempty family members of any domain.
///
/// Arguments with `g <= 0` are skipped.
pub fn optimize_subsets(
    f: &SetFunction,
    g: Option<&SetFunction>,
    sense: Sense,
    family: &(dyn Fn(&SetArg) -> bool + Sync),
) -> Result<OracleResult> {
    if let Some(g) = g {
        if g.kind() != f.kind() || g.n() != f.n() {
            return Err(Error::DomainMismatch {
                expected: format!("{} on n = {}", f.kind(), f.n()),
                got: format!("{} on n = {}", g.kind(), g.n()),
            });
        }
    }
    let n = f.n();
    let (total, decode): (u64, Box<dyn Fn(u64) -> SetArg + Sync>) = match f.kind() {
        DomainKind::Powerset => {
            if n > MAX_SUBSET_N {
                return Err(too_large("subset enumeration", MAX_SUBSET_N, n));
            }
            (1 << n, Box::new(|i| SetArg::Set(SubsetId(i))))
        }
        DomainKind::DisjointPair => {
            if n > MAX_PAIR_N {
                return Err(too_large("pair enumeration", MAX_PAIR_N, n));
            }
            (
                pow3(n) as u64,
                Box::new(move |i| SetArg::Pair(SetPair::from_code(i as usize, n))),
            )
        }
        DomainKind::KWay(k) => {
            if n * k > MAX_SUBSET_N {
                return Err(too_large("k-way enumeration", MAX_SUBSET_N, n * k));
            }
            let mask = (1u64 << n) - 1;
            (
                1 << (n * k),
                Box::new(move |i| {
                    SetArg::Tuple((0..k).map(|l| SubsetId((i >> (l * n)) & mask)).collect())
                }),
            )
        }
        DomainKind::KWayPair(k) => {
            if n * k > MAX_PAIR_N {
                return Err(too_large("k-way pair enumeration", MAX_PAIR_N, n * k));
            }
            let base = pow3(n) as u64;
            (
                base.pow(k as u32),
                Box::new(move |mut i| {
                    let mut t = Vec::with_capacity(k);
                    for _ in 0..k {
                        t.push(SetPair::from_code((i % base) as usize, n));
                        i /= base;
                    }
                    SetArg::PairTuple(t)
                }),
            )
        }
    };
    let eval = |i: u64| -> Option<f64> {
        if i == 0 {
            return None;
        }
        let a = decode(i);
        if !family(&a) {
            return None;
        }
        let fv = f.evaluate(&a).ok()?;
        ratio(fv, g.map(|g| g.evaluate(&a).expect("same domain")))
    };
    let best = scan(total, sense, &eval);
    if best.idx.is_empty() {
        return Err(Error::NoFeasibleLevel);
    }
    Ok(OracleResult {
        optimum: best.value,
        witnesses: best.idx.iter().map(|&i| decode(i)).collect(),
        evaluations: best.count,
    })
}

/// Set partitions of `0..n` as restricted growth strings.
pub fn restricted_growth_strings(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut s = vec![0usize; n];
    fn rec(i: usize, maxb: usize, s: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == s.len() {
            out.push(s.clone());
            return;
        }
        for b in 0..=maxb + 1 {
            s[i] = b;
            rec(i + 1, maxb.max(b), s, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(1, 0, &mut s, &mut out);
    out
}

/// Blocks of a restricted growth string.
pub fn blocks_of(rgs: &[usize]) -> Vec<SubsetId> {
    let k = rgs.iter().max().map_or(0, |m| m + 1);
    let mut b = vec![SubsetId::EMPTY; k];
    for (i, &l) in rgs.iter().enumerate() {
        b[l] = b[l].insert(i);
    }
    b
}

/// Block-count restriction for partition enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockCount {
    Any,
    AtMost(usize),
    Exactly(usize),
}

/// Optimum of `objective` over set partitions of `0..n` (nonempty blocks).
pub fn optimize_partitions(
    objective: &(dyn Fn(&[SubsetId]) -> f64 + Sync),
    n: usize,
    blocks: BlockCount,
    constraint: &(dyn Fn(&[SubsetId]) -> bool + Sync),
    sense: Sense,
) -> Result<OracleResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("empty ground set".into()));
    }
    if n > MAX_PARTITION_N {
        return Err(too_large("partition enumeration", MAX_PARTITION_N, n));
    }
    let all = restricted_growth_strings(n);
    let eval = |i: u64| -> Option<f64> {
        let b = blocks_of(&all[i as usize]);
        let ok = match blocks {
            BlockCount::Any => true,
            BlockCount::AtMost(k) => b.len() <= k,
            BlockCount::Exactly(k) => b.len() == k,
        };
        (ok && constraint(&b)).then(|| objective(&b))
    };
    let best = scan(all.len() as u64, sense, &eval);
    if best.idx.is_empty() {
        return Err(Error::NoFeasibleLevel);
    }
    Ok(OracleResult {
        optimum: best.value,
        witnesses: best
            .idx
            .iter()
            .map(|&i| SetArg::Tuple(blocks_of(&all[i as usize])))
            .collect(),
        evaluations: best.count,
    })
}

/// Optimum over `{-1, 1}^n`; witnesses are the negative sets.
pub fn optimize_signs(
    n: usize,
    objective: &(dyn Fn(&[f64]) -> f64 + Sync),
    sense: Sense,
) -> Result<OracleResult> {
    if n > MAX_SUBSET_N {
        return Err(too_large("sign enumeration", MAX_SUBSET_N, n));
    }
    let eval = |i: u64| -> Option<f64> { Some(objective(&sign_vector(n, i))) };
    let best = scan(1 << n, sense, &eval);
    Ok(OracleResult {
        optimum: best.value,
        witnesses: best.idx.iter().map(|&i| SetArg::Set(SubsetId(i))).collect(),
        evaluations: best.count,
    })
}

/// `x_i = -1` for bits set in `mask`, else `+1`.
pub fn sign_vector(n: usize, mask: u64) -> Vec<f64> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
        .collect()
}

/// Reduction identities between discrete ratio problems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Identity {
    /// Single sets versus pairs of sets and disjoint pairs.
    OneToTwo,
    /// Single sets versus k-tuples, k-th root of products, disjoint k-tuples.
    OneToK(usize),
    /// Disjoint pairs versus k-tuples of pairs and disjoint 2k-tuples.
    TwoToK(usize),
    /// Minimum and maximum of the extension on `{a, b}^n`.
    Box { a: f64, b: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub holds: bool,
    /// Compared values; all must agree.
    pub values: Vec<f64>,
}

fn agree(values: &[f64]) -> bool {
    let r = values[0];
    values.iter().all(|v| (v - r).abs() <= 1e-9 * (1.0 + r.abs()))
}

fn check_positive(f: &SetFunction, g: &SetFunction) -> Result<()> {
    let n = f.n();
    let bad = |h: &SetFunction, strict: bool| -> Option<SetArg> {
        let total = match h.kind() {
            DomainKind::Powerset => 1u64 << n,
            _ => pow3(n) as u64,
        };
        (1..total).find_map(|i| {
            let a = match h.kind() {
                DomainKind::Powerset => SetArg::Set(SubsetId(i)),
                _ => SetArg::Pair(SetPair::from_code(i as usize, n)),
            };
            let v = h.evaluate(&a).ok()?;
            ((strict && v <= 0.0) || v < 0.0).then_some(a)
        })
    };
    if let Some(a) = bad(f, false) {
        return Err(Error::Hypothesis(format!("numerator is negative at {a}")));
    }
    if let Some(a) = bad(g, true) {
        return Err(Error::Hypothesis(format!("denominator is not positive at {a}")));
    }
    Ok(())
}

/// Verify a reduction identity by enumerating both sides.
pub fn check_reduction_identities(
    f: &SetFunction,
    g: &SetFunction,
    which: Identity,
) -> Result<IdentityCheck> {
    let n = f.n();
    let values = match which {
        Identity::OneToTwo | Identity::OneToK(_) => {
            if f.kind() != DomainKind::Powerset || g.kind() != DomainKind::Powerset {
                return Err(Error::DomainMismatch {
                    expected: "powerset".into(),
                    got: format!("{} / {}", f.kind(), g.kind()),
                });
            }
            check_positive(f, g)?;
            let k = match which {
                Identity::OneToTwo => 2,
                Identity::OneToK(k) => k,
                _ => unreachable!(),
            };
            if k < 2 || n * k > 16 {
                return Err(too_large("tuple enumeration", 16, n * k));
            }
            let fv: Vec<f64> = (0..1u64 << n).map(|i| f.set_value(SubsetId(i))).collect();
            let gv: Vec<f64> = (0..1u64 << n).map(|i| g.set_value(SubsetId(i))).collect();
            let with_root = matches!(which, Identity::OneToK(_));
            let group = if with_root { 4 } else { 3 };
            let mut out = Vec::new();
            for sense in [Sense::Min, Sense::Max] {
                let single = scan(1 << n, sense, &|i| (i > 0).then(|| fv[i as usize] / gv[i as usize]));
                let mask = (1u64 << n) - 1;
                let part = |t: u64, l: usize| ((t >> (l * n)) & mask) as usize;
                let tuples = scan(1 << (n * k), sense, &|t| {
                    (t > 0).then(|| {
                        let (a, b) = (0..k).fold((0.0, 0.0), |(a, b), l| {
                            (a + fv[part(t, l)], b + gv[part(t, l)])
                        });
                        a / b
                    })
                });
                let disjoint = scan(1 << (n * k), sense, &|t| {
                    let mut seen = 0usize;
                    for l in 0..k {
                        let p = part(t, l);
                        if p & seen != 0 {
                            return None;
                        }
                        seen |= p;
                    }
                    (t > 0).then(|| {
                        let (a, b) = (0..k).fold((0.0, 0.0), |(a, b), l| {
                            (a + fv[part(t, l)], b + gv[part(t, l)])
                        });
                        a / b
                    })
                });
                out.extend([single.value, tuples.value, disjoint.value]);
                if with_root {
                    let root = scan(1 << (n * k), sense, &|t| {
                        if (0..k).any(|l| part(t, l) == 0) {
                            return None;
                        }
                        let (a, b) = (0..k).fold((1.0, 1.0), |(a, b), l| {
                            (a * fv[part(t, l)], b * gv[part(t, l)])
                        });
                        Some((a / b).powf(1.0 / k as f64))
                    });
                    out.push(root.value);
                }
                if !agree(&out[out.len() - group..]) {
                    return Ok(IdentityCheck { holds: false, values: out });
                }
            }
            return Ok(IdentityCheck { holds: true, values: out });
        }
        Identity::TwoToK(k) => {
            if f.kind() != DomainKind::DisjointPair || g.kind() != DomainKind::DisjointPair {
                return Err(Error::DomainMismatch {
                    expected: "disjoint-pair".into(),
                    got: format!("{} / {}", f.kind(), g.kind()),
                });
            }
            check_positive(f, g)?;
            let m = pow3(n);
            if k < 2 || (m as f64).powi(k as i32) > 2e6 {
                return Err(too_large("pair-tuple enumeration", "3^(n k) <= 2e6", format!("n = {n}, k = {k}")));
            }
            let pairs: Vec<SetPair> = (0..m).map(|c| SetPair::from_code(c, n)).collect();
            let fv: Vec<f64> = pairs.iter().map(|&p| f.pair_value(p)).collect();
            let gv: Vec<f64> = pairs.iter().map(|&p| g.pair_value(p)).collect();
            let digits = |t: u64| -> Vec<usize> {
                let mut t = t as usize;
                (0..k)
                    .map(|_| {
                        let d = t % m;
                        t /= m;
                        d
                    })
                    .collect()
            };
            let total = (m as u64).pow(k as u32);
            let mut out = Vec::new();
            for sense in [Sense::Min, Sense::Max] {
                let single = scan(m as u64, sense, &|i| (i > 0).then(|| fv[i as usize] / gv[i as usize]));
                let sum = |ds: &[usize]| {
                    let (a, b) = ds.iter().fold((0.0, 0.0), |(a, b), &d| (a + fv[d], b + gv[d]));
                    a / b
                };
                let tuples = scan(total, sense, &|t| (t > 0).then(|| sum(&digits(t))));
                let disjoint = scan(total, sense, &|t| {
                    let ds = digits(t);
                    let mut seen = SubsetId::EMPTY;
                    for &d in &ds {
                        let s = pairs[d].support();
                        if !s.intersection(seen).is_empty() {
                            return None;
                        }
                        seen = seen.union(s);
                    }
                    (t > 0).then(|| sum(&ds))
                });
                out.extend([single.value, tuples.value, disjoint.value]);
                if !agree(&out[out.len() - 3..]) {
                    return Ok(IdentityCheck { holds: false, values: out });
                }
            }
            return Ok(IdentityCheck { holds: true, values: out });
        }
        Identity::Box { a, b } => {
            if f.kind() != DomainKind::Powerset {
                return Err(Error::DomainMismatch {
                    expected: "powerset".into(),
                    got: f.kind().to_string(),
                });
            }
            if a >= b {
                return Err(Error::InvalidArgument(format!("box needs a < b, got [{a}, {b}]")));
            }
            if n > MAX_SUBSET_N {
                return Err(too_large("box enumeration", MAX_SUBSET_N, n));
            }
            let fv_full = f.set_value(SubsetId::full(n));
            let mut out = Vec::new();
            for sense in [Sense::Min, Sense::Max] {
                let vertex = scan(1 << n, sense, &|i| {
                    let x: Vec<f64> = (0..n).map(|j| if i >> j & 1 == 1 { b } else { a }).collect();
                    Some(eval_original(f, &x).expect("powerset").value)
                });
                let discrete = scan(1 << n, sense, &|i| Some(f.set_value(SubsetId(i))));
                out.push(vertex.value);
                out.push(a * fv_full + (b - a) * discrete.value);
            }
            out
        }
    };
    Ok(IdentityCheck {
        holds: agree(&values[..2]) && agree(&values[2..]),
        values,
    })
}

/// Largest independent set size.
pub fn independence_number(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > MAX_SUBSET_N {
        return Err(too_large("independence enumeration", MAX_SUBSET_N, n));
    }
    let best = scan(1 << n, Sense::Max, &|s| {
        let a = SubsetId(s);
        g.edges()
            .iter()
            .all(|e| !(a.contains(e.u) && a.contains(e.v)))
            .then_some(a.len() as f64)
    });
    Ok(best.value as usize)
}

/// Smallest number of colors in a proper coloring.
pub fn chromatic_number(g: &Graph) -> Result<usize> {
    let r = optimize_partitions(
        &|b| b.len() as f64,
        g.n(),
        BlockCount::Any,
        &|b| b.iter().all(|&s| g.inner_weight(s) == 0.0),
        Sense::Min,
    )?;
    Ok(r.optimum as usize)
}

/// Largest number of pairwise disjoint edges.
pub fn matching_number(g: &Graph) -> Result<usize> {
    let m = g.m();
    if m > MAX_SUBSET_N + 4 {
        return Err(too_large("matching enumeration", MAX_SUBSET_N + 4, m));
    }
    let e = g.edges();
    let best = scan(1 << m, Sense::Max, &|s| {
        let mut used = 0u64;
        for (k, ed) in e.iter().enumerate() {
            if s >> k & 1 == 1 {
                let b = 1 << ed.u | 1 << ed.v;
                if used & b != 0 {
                    return None;
                }
                used |= b;
            }
        }
        Some(s.count_ones() as f64)
    });
    Ok(best.value as usize)
}

/// Frustrated-edge weight of a sign assignment.
pub fn frustration_of(g: &Graph, x: &[f64]) -> f64 {
    g.edges()
        .iter()
        .filter(|e| x[e.u] * x[e.v] * e.sign as f64 <= 0.0)
        .map(|e| e.w)
        .sum()
}

/// Minimum frustrated-edge weight over all sign assignments.
pub fn frustration_index(g: &Graph) -> Result<f64> {
    Ok(optimize_signs(g.n(), &|x| frustration_of(g, x), Sense::Min)?.optimum)
}

/// Largest cut weight with at most `k` parts.
pub fn max_kcut(g: &Graph, k: usize) -> Result<f64> {
    let r = optimize_partitions(
        &|b| {
            let inner: f64 = b.iter().map(|&s| g.inner_weight(s)).sum();
            g.edges().iter().map(|e| e.w).sum::<f64>() - inner
        },
        g.n(),
        BlockCount::AtMost(k),
        &|_| true,
        Sense::Max,
    )?;
    Ok(r.optimum)
}

fn subset_scan(g: &Graph, sense: Sense, h: &(dyn Fn(SubsetId) -> Option<f64> + Sync)) -> Result<f64> {
    let n = g.n();
    if n > MAX_SUBSET_N {
        return Err(too_large("subset enumeration", MAX_SUBSET_N, n));
    }
    let best = scan(1 << n, sense, &|s| h(SubsetId(s)));
    if best.idx.is_empty() {
        return Err(Error::NoFeasibleLevel);
    }
    Ok(best.value)
}

/// Smallest cut over proper nonempty subsets.
pub fn min_cut(g: &Graph) -> Result<f64> {
    let full = SubsetId::full(g.n());
    subset_scan(g, Sense::Min, &|a| (!a.is_empty() && a != full).then(|| g.cut(a)))
}

/// Largest cut.
pub fn max_cut(g: &Graph) -> Result<f64> {
    subset_scan(g, Sense::Max, &|a| Some(g.cut(a)))
}

/// `min cut(A) / min(vol A, vol A^c)` over proper subsets.
pub fn cheeger_constant(g: &Graph) -> Result<f64> {
    let n = g.n();
    subset_scan(g, Sense::Min, &|a| {
        let d = g.vol(a).min(g.vol(a.complement(n)));
        (d > 0.0).then(|| g.cut(a) / d)
    })
}

/// Modularity `vol(A) vol(A^c) / vol(V) - w(A, A^c)`.
pub fn modularity_of(g: &Graph, a: SubsetId) -> f64 {
    let n = g.n();
    g.vol(a) * g.vol(a.complement(n)) / g.total_volume() - g.cut(a)
}

/// Largest modularity over all subsets.
pub fn max_modularity(g: &Graph) -> Result<f64> {
    subset_scan(g, Sense::Max, &|a| Some(modularity_of(g, a)))
}

/// Vertex-boundary notion for isoperimetric constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// Vertices of `A` with a neighbor outside `A`.
    Inner,
    /// Vertices outside `A` with a neighbor in `A`.
    Outer,
    /// Union of both.
    Vertex,
}

/// Size of the vertex boundary of `a`.
pub fn vertex_boundary(g: &Graph, a: SubsetId, kind: BoundaryKind) -> usize {
    (0..g.n())
        .filter(|&i| {
            let inside = a.contains(i);
            let crosses = g.neighbors(i).iter().any(|&(j, _)| a.contains(j) != inside);
            crosses
                && match kind {
                    BoundaryKind::Inner => inside,
                    BoundaryKind::Outer => !inside,
                    BoundaryKind::Vertex => true,
                }
        })
        .count()
}

/// `min |boundary(A)| / min(#A, #A^c)` over proper subsets.
pub fn vertex_cheeger_constant(g: &Graph, kind: BoundaryKind) -> Result<f64> {
    let n = g.n();
    subset_scan(g, Sense::Min, &|a| {
        let d = a.len().min(n - a.len());
        (d > 0).then(|| vertex_boundary(g, a, kind) as f64 / d as f64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn graph_quantities() {
        assert_eq!(min_cut(&Graph::path(3)).unwrap(), 1.0);
        assert_eq!(independence_number(&Graph::cycle(5)).unwrap(), 2);
        assert_eq!(chromatic_number(&Graph::complete(3)).unwrap(), 3);
        assert_eq!(chromatic_number(&Graph::cycle(5)).unwrap(), 3);
        assert_eq!(max_kcut(&Graph::complete(4), 3).unwrap(), 5.0);
        assert_eq!(max_kcut(&Graph::complete(3), 3).unwrap(), 3.0);
        assert_eq!(matching_number(&Graph::path(4)).unwrap(), 2);
        assert_eq!(cheeger_constant(&Graph::complete(3)).unwrap(), 1.0);
        let neg = Graph::new_signed(3, [(0, 1, 1.0, -1), (1, 2, 1.0, -1), (0, 2, 1.0, -1)]).unwrap();
        assert_eq!(frustration_index(&neg).unwrap(), 1.0);
    }

    #[test]
    fn vertex_boundaries_of_path() {
        let p4 = Graph::path(4);
        assert_eq!(vertex_cheeger_constant(&p4, BoundaryKind::Inner).unwrap(), 0.5);
        assert_eq!(vertex_cheeger_constant(&p4, BoundaryKind::Outer).unwrap(), 0.5);
        assert_eq!(vertex_cheeger_constant(&p4, BoundaryKind::Vertex).unwrap(), 1.0);
        assert_eq!(vertex_boundary(&p4, SubsetId::from_elems(&[1]), BoundaryKind::Outer), 2);
    }

    #[test]
    fn rgs_counts_are_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (n, &b) in bell.iter().enumerate().skip(1) {
            assert_eq!(restricted_growth_strings(n).len(), b);
        }
    }

    #[test]
    fn subsets_with_witness() {
        let g = Graph::complete(3);
        let f = SetFunction::from_fn(3, move |a| g.cut(a)).unwrap();
        let r = optimize_subsets(&f, None, Sense::Max, &|_| true).unwrap();
        assert_eq!(r.optimum, 2.0);
        for w in &r.witnesses {
            assert_eq!(f.evaluate(w).unwrap(), 2.0);
        }
    }

    #[test]
    fn terminal_partition_on_path() {
        let g = Graph::path(3);
        let r = optimize_partitions(
            &|b| b.iter().map(|&s| g.cut(s)).sum::<f64>() / 2.0,
            3,
            BlockCount::Exactly(2),
            &|b| b.iter().all(|s| !(s.contains(0) && s.contains(2))),
            Sense::Min,
        )
        .unwrap();
        assert_eq!(r.optimum, 1.0);
    }

    #[test]
    fn identities_hold_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let f = SetFunction::from_table(3, (0..8).map(|_| rng.gen_range(0..6) as f64).collect()).unwrap();
            let g = SetFunction::from_table(3, (0..8).map(|_| rng.gen_range(1..6) as f64).collect()).unwrap();
            assert!(check_reduction_identities(&f, &g, Identity::OneToTwo).unwrap().holds);
            assert!(check_reduction_identities(&f, &g, Identity::OneToK(3)).unwrap().holds);
            assert!(check_reduction_identities(&f, &g, Identity::Box { a: -1.0, b: 2.0 }).unwrap().holds);
            let fp = SetFunction::pair_from_table(2, (0..9).map(|_| rng.gen_range(0..6) as f64).collect()).unwrap();
            let gp = SetFunction::pair_from_table(2, (0..9).map(|_| rng.gen_range(1..6) as f64).collect()).unwrap();
            assert!(check_reduction_identities(&fp, &gp, Identity::TwoToK(2)).unwrap().holds);
        }
        let f = SetFunction::cardinality(2).unwrap();
        let zero = SetFunction::from_table(2, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            check_reduction_identities(&f, &zero, Identity::OneToTwo),
            Err(Error::Hypothesis(_))
        ));
    }
}
