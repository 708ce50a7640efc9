//! Combinatorial eigenvalue problems of extension pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{too_large, Error, Result};
use crate::graph::Graph;
use crate::lovasz::{
    directional_piece, extension_value, subdifferential_vertices_at, MAX_SUBDIFF_DIM,
};
use crate::polytope::{min_norm_point, norm, vertex_lmo, Atom, MnpOptions};
use crate::setfn::{
    all_pairs, all_subsets, is_submodular, DomainKind, SetArg, SetFunction, SetPair, SubsetId,
};

/// Hull distance below which an eigenpair is accepted.
pub const ACCEPT_TOL: f64 = 1e-8;
/// Hull distance above which an eigenpair is rejected.
pub const REJECT_TOL: f64 = 1e-6;
/// Random directions used to sample subdifferential vertices in large dimension.
pub const SAMPLED_DIRECTIONS: usize = 2000;
pub const MAX_CHEEGER_N: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenCertificate {
    pub lambda: f64,
    pub eigenset: SetArg,
    /// Point of `df(1_a)` lying within `residual` of `lambda * dg(1_a)`.
    pub witness: Vec<f64>,
    pub residual: f64,
    /// Vertex lists were complete (otherwise sampled).
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum EigenVerdict {
    Accepted(EigenCertificate),
    Rejected {
        lambda: f64,
        distance: f64,
        /// Normal of a hyperplane separating the two hulls.
        separating: Vec<f64>,
    },
    /// Sampled vertex lists did not meet, or the distance fell between the tolerances.
    NotCertified { lambda: f64, distance: f64 },
}

impl EigenVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, EigenVerdict::Accepted(_))
    }

    pub fn certificate(&self) -> Option<&EigenCertificate> {
        match self {
            EigenVerdict::Accepted(c) => Some(c),
            _ => None,
        }
    }
}

fn check_same_domain(f: &SetFunction, g: &SetFunction) -> Result<()> {
    if f.kind() != g.kind() || f.n() != g.n() {
        return Err(Error::DomainMismatch {
            expected: format!("{} on n = {}", f.kind(), f.n()),
            got: format!("{} on n = {}", g.kind(), g.n()),
        });
    }
    Ok(())
}

fn sampled_vertices(f: &SetFunction, x: &[f64], seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for _ in 0..SAMPLED_DIRECTIONS {
        let d: Vec<f64> = (0..x.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = directional_piece(f, x, &d)?;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Vertices of the subdifferential at `x`; complete when the dimension allows enumeration.
pub fn hull_vertices(f: &SetFunction, x: &[f64]) -> Result<(Vec<Vec<f64>>, bool)> {
    if x.len() <= MAX_SUBDIFF_DIM {
        match subdifferential_vertices_at(f, x) {
            Ok(v) => return Ok((v, true)),
            Err(Error::TooLarge { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((sampled_vertices(f, x, 0)?, false))
}

/// Decide `conv(df(1_a)) ∩ lambda conv(dg(1_a)) ≠ ∅` by a min-norm point of the difference.
pub fn verify_eigenpair(
    f: &SetFunction,
    g: &SetFunction,
    lambda: f64,
    a: &SetArg,
) -> Result<EigenVerdict> {
    check_same_domain(f, g)?;
    f.evaluate(a)?;
    if a.is_empty() {
        return Err(Error::InvalidArgument("eigensets must be nonempty".into()));
    }
    let x = a.indicator(f.n());
    let (vf, ef) = hull_vertices(f, &x)?;
    let (vg, eg) = hull_vertices(g, &x)?;
    Ok(hull_intersection(&vf, &vg, lambda, a, ef && eg))
}

fn hull_intersection(
    vf: &[Vec<f64>],
    vg: &[Vec<f64>],
    lambda: f64,
    a: &SetArg,
    exact: bool,
) -> EigenVerdict {
    let dim = vf[0].len();
    let (lf, lg) = (vertex_lmo(vf), vertex_lmo(vg));
    let lmo = |d: &[f64]| {
        let p = lf(d);
        let q = if lambda == 0.0 {
            vec![0.0; dim]
        } else {
            let dd: Vec<f64> = d.iter().map(|v| -lambda * v).collect();
            lg(&dd)
        };
        Atom {
            point: p.iter().zip(&q).map(|(a, b)| a - lambda * b).collect(),
            parts: vec![p, q],
        }
    };
    let r = min_norm_point(dim, &lmo, MnpOptions::default());
    if r.distance <= ACCEPT_TOL {
        return EigenVerdict::Accepted(EigenCertificate {
            lambda,
            eigenset: a.clone(),
            witness: r.part(0),
            residual: r.distance,
            exact,
        });
    }
    if exact && r.converged && r.lower_bound > REJECT_TOL {
        return EigenVerdict::Rejected {
            lambda,
            distance: r.distance,
            separating: r.point,
        };
    }
    EigenVerdict::NotCertified {
        lambda,
        distance: r.distance,
    }
}

/// Nonempty arguments of a set or pair domain.
pub fn indicator_candidates(f: &SetFunction) -> Result<Vec<SetArg>> {
    let n = f.n();
    if n > MAX_SUBDIFF_DIM {
        return Err(too_large("eigenvalue enumeration", MAX_SUBDIFF_DIM, n));
    }
    match f.kind() {
        DomainKind::Powerset => Ok(all_subsets(n)
            .filter(|a| !a.is_empty())
            .map(SetArg::Set)
            .collect()),
        DomainKind::DisjointPair => Ok(all_pairs(n)
            .filter(|p| !p.is_empty())
            .map(SetArg::Pair)
            .collect()),
        other => Err(Error::DomainMismatch {
            expected: "powerset or disjoint-pair".into(),
            got: other.to_string(),
        }),
    }
}

fn support_size(a: &SetArg) -> usize {
    match a {
        SetArg::Set(s) => s.len(),
        SetArg::Pair(p) => p.support().len(),
        _ => 0,
    }
}

/// Eigenvalues with one representative eigenset each, sorted ascending.
///
/// Candidates with `g(a) = 0` are skipped. Representatives prefer full support.
pub fn enumerate_eigenvalues(f: &SetFunction, g: &SetFunction) -> Result<Vec<(f64, SetArg)>> {
    check_same_domain(f, g)?;
    let mut cands: Vec<(f64, SetArg)> = Vec::new();
    for a in indicator_candidates(f)? {
        let gv = g.evaluate(&a)?;
        if gv != 0.0 {
            cands.push((f.evaluate(&a)? / gv, a));
        }
    }
    cands.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(support_size(&y.1).cmp(&support_size(&x.1)))
            .then(x.1.cmp_key().cmp(&y.1.cmp_key()))
    });
    let mut groups: Vec<Vec<(f64, SetArg)>> = Vec::new();
    for c in cands {
        match groups.last_mut() {
            Some(grp) if (c.0 - grp[0].0).abs() <= 1e-12 * (1.0 + c.0.abs()) => grp.push(c),
            _ => groups.push(vec![c]),
        }
    }
    let found: Vec<Option<(f64, SetArg)>> = groups
        .par_iter()
        .map(|grp| -> Result<Option<(f64, SetArg)>> {
            for (lambda, a) in grp {
                if verify_eigenpair(f, g, *lambda, a)?.is_accepted() {
                    return Ok(Some((*lambda, a.clone())));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

trait CmpKey {
    fn cmp_key(&self) -> (u64, u64);
}

impl CmpKey for SetArg {
    fn cmp_key(&self) -> (u64, u64) {
        match self {
            SetArg::Set(s) => (s.0, 0),
            SetArg::Pair(p) => (p.pos.0, p.neg.0),
            _ => (0, 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheegerReport {
    pub value: f64,
    pub witness: SubsetId,
    /// Smallest variational quotient over the random samples.
    pub sampled_min: f64,
    /// Variational quotient at the centered optimal indicator.
    pub indicator_quotient: f64,
}

/// `min_t g_s^L(x - t 1)` for `g_s(A, B) = g(A) + g(B)` with `g` non-decreasing.
pub fn translated_pair_min(g: &SetFunction, x: &[f64]) -> Result<f64> {
    let gs = pair_sum(g)?;
    let mut best = f64::INFINITY;
    for &t in x {
        let y: Vec<f64> = x.iter().map(|v| v - t).collect();
        best = best.min(extension_value(&gs, &y)?);
    }
    Ok(best)
}

fn pair_sum(f: &SetFunction) -> Result<SetFunction> {
    let h = f.clone();
    SetFunction::pair_from_fn(f.n(), move |p: SetPair| h.set_value(p.pos) + h.set_value(p.neg))
}

/// Largest deviation between `min_t g_s^L(x - t 1)` and the original extension of
/// `A -> min(g(A), g(V \ A))` over the given points.
pub fn translated_pair_identity_gap(g: &SetFunction, points: &[Vec<f64>]) -> Result<f64> {
    let n = g.n();
    let h0 = g.clone();
    let h = SetFunction::from_fn(n, move |a| h0.set_value(a).min(h0.set_value(a.complement(n))))?;
    let mut worst = 0.0f64;
    for x in points {
        let lhs = translated_pair_min(g, x)?;
        let rhs = extension_value(&h, x)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// `min f(A) / min(g(A), g(V \ A))` over proper nonempty `A`, with the variational cross-check.
pub fn second_eigenvalue_cheeger(
    f: &SetFunction,
    g: &SetFunction,
    samples: usize,
    seed: u64,
) -> Result<CheegerReport> {
    check_same_domain(f, g)?;
    if f.kind() != DomainKind::Powerset {
        return Err(Error::DomainMismatch {
            expected: "powerset".into(),
            got: f.kind().to_string(),
        });
    }
    let n = f.n();
    if n > MAX_CHEEGER_N {
        return Err(too_large("Cheeger enumeration", MAX_CHEEGER_N, n));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two elements".into()));
    }
    let full = SubsetId::full(n);
    let tol = f.tolerance().max(g.tolerance());
    for a in all_subsets(n) {
        if (f.set_value(a) - f.set_value(a.complement(n))).abs() > tol {
            return Err(Error::Hypothesis(format!("f is not symmetric at {a}")));
        }
        if !a.is_empty() && g.set_value(a) <= 0.0 {
            return Err(Error::Hypothesis(format!("g is not positive at {a}")));
        }
        for i in 0..n {
            if !a.contains(i) && g.set_value(a.insert(i)) < g.set_value(a) - tol {
                return Err(Error::Hypothesis(format!("g decreases from {a} adding {i}")));
            }
        }
    }
    if !is_submodular(g)?.holds {
        return Err(Error::Hypothesis("g is not submodular".into()));
    }
    let mut best = (f64::INFINITY, SubsetId(0));
    for a in all_subsets(n).filter(|&a| !a.is_empty() && a != full) {
        let v = f.set_value(a) / g.set_value(a).min(g.set_value(a.complement(n)));
        if v < best.0 {
            best = (v, a);
        }
    }
    let fs = pair_sum(f)?;
    let quotient = |x: &[f64]| -> Result<Option<f64>> {
        let d = translated_pair_min(g, x)?;
        if d <= 1e-12 {
            return Ok(None);
        }
        Ok(Some(extension_value(&fs, x)? / d))
    };
    let center = |mut x: Vec<f64>| {
        let m = x.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|v| *v -= m);
        x
    };
    let indicator_quotient = quotient(&center(best.1.indicator(n)))?.unwrap_or(f64::NAN);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled_min = f64::INFINITY;
    for _ in 0..samples {
        let x = center((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        if let Some(q) = quotient(&x)? {
            sampled_min = sampled_min.min(q);
        }
    }
    Ok(CheegerReport {
        value: best.0,
        witness: best.1,
        sampled_min,
        indicator_quotient,
    })
}

/// Feasible edge variables for the signed coordinate system at a ternary point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedEigenSystem {
    pub lambda: f64,
    pub x: Vec<f64>,
    /// `z_uv` per edge in storage order (`u < v`); `z_vu = -s_uv z_uv`.
    pub z: Vec<f64>,
    pub d_plus: Vec<usize>,
    pub d_minus: Vec<usize>,
    pub d_zero: Vec<usize>,
    /// `sum_j w_ij z_ij` per vertex.
    pub node_sums: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SignedVerdict {
    Accepted(SignedEigenSystem),
    Rejected { lambda: f64, max_violation: f64 },
}

impl SignedVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, SignedVerdict::Accepted(_))
    }
}

/// Feasibility of the coordinate form of `0 ∈ dF(x) - lambda d||x||_inf`,
/// `F(x) = sum w_ij |x_i - s_ij x_j|`, at `x ∈ {-1, 0, 1}^n`.
pub fn signed_eigen_check(sg: &Graph, lambda: f64, x: &[f64]) -> Result<SignedVerdict> {
    let n = sg.n();
    if x.len() != n {
        return Err(Error::InvalidArgument(format!("x has length {}, expected {n}", x.len())));
    }
    if x.iter().any(|&v| v != 0.0 && v != 1.0 && v != -1.0) || x.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument("x must be a nonzero vector in {-1,0,1}^n".into()));
    }
    let edges = sg.edges();
    let bounds: Vec<(f64, f64)> = edges
        .iter()
        .map(|e| {
            let t = x[e.u] - e.sign as f64 * x[e.v];
            if t > 0.0 {
                (1.0, 1.0)
            } else if t < 0.0 {
                (-1.0, -1.0)
            } else {
                (-1.0, 1.0)
            }
        })
        .collect();
    let sums = |z: &[f64]| {
        let mut s = vec![0.0; n];
        for (e, &ze) in edges.iter().zip(z) {
            s[e.u] += e.w * ze;
            s[e.v] -= e.w * e.sign as f64 * ze;
        }
        s
    };
    let top: Vec<usize> = (0..n).filter(|&i| x[i] != 0.0).collect();
    let lmo = |d: &[f64]| {
        let z: Vec<f64> = edges
            .iter()
            .zip(&bounds)
            .map(|(e, &(lo, hi))| {
                let slope = e.w * (d[e.u] - e.sign as f64 * d[e.v]);
                if slope > 0.0 {
                    lo
                } else {
                    hi
                }
            })
            .collect();
        let mut point = sums(&z);
        let mut sel = vec![0.0; n];
        if lambda != 0.0 {
            let i = *top
                .iter()
                .max_by(|&&a, &&b| (lambda * x[a] * d[a]).total_cmp(&(lambda * x[b] * d[b])).then(b.cmp(&a)))
                .expect("nonzero x");
            sel[i] = x[i];
            point[i] -= lambda * x[i];
        }
        Atom {
            point,
            parts: vec![z, sel],
        }
    };
    let r = min_norm_point(n, &lmo, MnpOptions::default());
    if r.distance > ACCEPT_TOL {
        let max_violation = r.point.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        return Ok(SignedVerdict::Rejected {
            lambda,
            max_violation,
        });
    }
    let z = r.part(0);
    let node_sums = sums(&z);
    Ok(SignedVerdict::Accepted(SignedEigenSystem {
        lambda,
        x: x.to_vec(),
        d_plus: (0..n).filter(|&i| x[i] == 1.0).collect(),
        d_minus: (0..n).filter(|&i| x[i] == -1.0).collect(),
        d_zero: (0..n).filter(|&i| x[i] == 0.0).collect(),
        residual: norm(&r.point),
        node_sums,
        z,
    }))
}

/// `2 (w(E+(A, V \ A)) + w(E-(A)) + w(E-(V \ A)))` for `x = 1_A - 1_{V \ A}`.
pub fn sign_vector_eigenvalue(sg: &Graph, x: &[f64]) -> f64 {
    2.0 * sg
        .edges()
        .iter()
        .filter(|e| x[e.u] * x[e.v] * f64::from(e.sign) < 0.0)
        .map(|e| e.w)
        .sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinMaxCut {
    pub mincut: f64,
    pub maxcut: f64,
    pub eigenvalues: Vec<f64>,
}

/// `(A, B) -> cut(A) + cut(B)` and the constant `2`, whose extensions are
/// `sum w |x_i - x_j|` and `2 ||x||_inf`.
pub fn cut_pair(g: &Graph) -> Result<(SetFunction, SetFunction)> {
    let h = g.clone();
    let f = SetFunction::pair_from_fn(g.n(), move |p| h.cut(p.pos) + h.cut(p.neg))?;
    Ok((f, SetFunction::constant_pair(g.n(), 2.0)?))
}

/// Mincut and maxcut read off the eigenvalues of the cut pair.
///
/// The second smallest eigenvalue is the mincut of a connected graph; disconnected graphs report 0.
pub fn minmaxcut_via_eigen(g: &Graph) -> Result<MinMaxCut> {
    let (f, c) = cut_pair(g)?;
    let eigenvalues: Vec<f64> = enumerate_eigenvalues(&f, &c)?.into_iter().map(|e| e.0).collect();
    let mincut = if g.is_connected() {
        eigenvalues.get(1).copied().unwrap_or(0.0)
    } else {
        0.0
    };
    let maxcut = eigenvalues.last().copied().unwrap_or(0.0);
    Ok(MinMaxCut {
        mincut,
        maxcut,
        eigenvalues,
    })
}
