//! Minimum-norm points of polytopes given by linear minimization oracles.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Point of the polytope together with its per-component summands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub point: Vec<f64>,
    pub parts: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug)]
pub struct MnpOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for MnpOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MnpResult {
    pub point: Vec<f64>,
    pub distance: f64,
    /// Certified lower bound on the distance from the origin.
    pub lower_bound: f64,
    pub atoms: Vec<(f64, Atom)>,
    pub iterations: usize,
    pub converged: bool,
}

impl MnpResult {
    /// Weighted combination of component `j` over the active atoms.
    pub fn part(&self, j: usize) -> Vec<f64> {
        let d = self.atoms.first().map_or(0, |(_, a)| a.parts[j].len());
        let mut out = vec![0.0; d];
        for (w, a) in &self.atoms {
            for (o, v) in out.iter_mut().zip(&a.parts[j]) {
                *o += w * v;
            }
        }
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn combine(atoms: &[(f64, Atom)], dim: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    for (w, a) in atoms {
        for (o, v) in x.iter_mut().zip(&a.point) {
            *o += w * v;
        }
    }
    x
}

/// Affine minimizer weights of `|sum a_i s_i|` subject to `sum a_i = 1`.
fn affine_minimizer(atoms: &[(f64, Atom)]) -> Vec<f64> {
    let m = atoms.len();
    let mut mat = DMatrix::<f64>::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..=i {
            let g = dot(&atoms[i].1.point, &atoms[j].1.point);
            mat[(i, j)] = g;
            mat[(j, i)] = g;
        }
        mat[(i, m)] = 1.0;
        mat[(m, i)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = 1.0;
    let sol = mat
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .unwrap_or_else(|| {
            mat.svd(true, true)
                .solve(&rhs, 1e-12)
                .expect("svd solve")
        });
    let mut a: Vec<f64> = sol.iter().take(m).copied().collect();
    let s: f64 = a.iter().sum();
    if s.abs() > 1e-300 {
        a.iter_mut().for_each(|v| *v /= s);
    }
    a
}

/// Wolfe's algorithm for the point of minimum Euclidean norm.
///
/// `lmo(d)` must return an atom minimizing `<atom.point, d>`.
pub fn min_norm_point(dim: usize, lmo: &dyn Fn(&[f64]) -> Atom, opts: MnpOptions) -> MnpResult {
    let first = lmo(&vec![0.0; dim]);
    let mut scale = dot(&first.point, &first.point);
    let mut atoms = vec![(1.0, first)];
    let mut x = combine(&atoms, dim);
    let mut lower = 0.0f64;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let xx = dot(&x, &x);
        if xx.sqrt() <= opts.tol {
            converged = true;
            break;
        }
        let q = lmo(&x);
        let xq = dot(&x, &q.point);
        lower = lower.max(xq / xx.sqrt());
        scale = scale.max(dot(&q.point, &q.point));
        if xx - xq <= opts.tol * (1.0 + scale) {
            converged = true;
            break;
        }
        if atoms.iter().any(|(_, a)| a.point == q.point) {
            converged = true;
            break;
        }
        atoms.push((0.0, q));
        loop {
            let alpha = affine_minimizer(&atoms);
            if alpha.iter().all(|&a| a > 1e-15) {
                for ((w, _), a) in atoms.iter_mut().zip(&alpha) {
                    *w = *a;
                }
                break;
            }
            let mut theta = 1.0f64;
            for ((w, _), &a) in atoms.iter().zip(&alpha) {
                if a <= 1e-15 && *w - a > 0.0 {
                    theta = theta.min(*w / (*w - a));
                }
            }
            for ((w, _), &a) in atoms.iter_mut().zip(&alpha) {
                *w = theta * a + (1.0 - theta) * *w;
            }
            atoms.retain(|(w, _)| *w > 1e-15);
            let s: f64 = atoms.iter().map(|(w, _)| w).sum();
            atoms.iter_mut().for_each(|(w, _)| *w /= s);
            if atoms.len() <= 1 {
                if let Some(a) = atoms.first_mut() {
                    a.0 = 1.0;
                }
                break;
            }
        }
        x = combine(&atoms, dim);
    }
    let distance = norm(&x);
    MnpResult {
        point: x,
        distance,
        lower_bound: lower.min(distance),
        atoms,
        iterations,
        converged,
    }
}

/// Oracle over an explicit vertex list.
pub fn vertex_lmo(vertices: &[Vec<f64>]) -> impl Fn(&[f64]) -> Vec<f64> + '_ {
    move |d| {
        vertices
            .iter()
            .min_by(|a, b| dot(a, d).total_cmp(&dot(b, d)))
            .expect("nonempty vertex list")
            .clone()
    }
}

/// A scaled convex set given by its minimizing oracle.
pub struct Summand<'a> {
    pub coef: f64,
    pub lmo: &'a dyn Fn(&[f64]) -> Vec<f64>,
}

/// Oracle of the Minkowski sum `sum_j coef_j * C_j`; parts keep the unscaled points.
pub fn minkowski_lmo<'a>(dim: usize, summands: &'a [Summand<'a>]) -> impl Fn(&[f64]) -> Atom + 'a {
    move |d: &[f64]| {
        let mut point = vec![0.0; dim];
        let mut parts = Vec::with_capacity(summands.len());
        for s in summands {
            let v = if s.coef >= 0.0 {
                (s.lmo)(d)
            } else {
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                (s.lmo)(&neg)
            };
            for (p, vi) in point.iter_mut().zip(&v) {
                *p += s.coef * vi;
            }
            parts.push(v);
        }
        Atom { point, parts }
    }
}

/// Distance from `p` to the convex hull of `vertices`.
pub fn distance_to_hull(p: &[f64], vertices: &[Vec<f64>]) -> f64 {
    let shifted: Vec<Vec<f64>> = vertices
        .iter()
        .map(|v| v.iter().zip(p).map(|(a, b)| a - b).collect())
        .collect();
    let lmo = vertex_lmo(&shifted);
    let atom = |d: &[f64]| {
        let v = lmo(d);
        Atom {
            parts: vec![v.clone()],
            point: v,
        }
    };
    min_norm_point(p.len(), &atom, MnpOptions::default()).distance
}
