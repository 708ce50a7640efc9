//! Ratio problems `min/max (F1 - F2) / (G1 - G2)` with convex positively homogeneous parts.
//!
//! Provides the Dinkelbach scheme, the mixed inverse-power / steepest-descent schemes
//! (ball-constrained and normalized variants, plus the sign-handling generalization),
//! the normalized inverse-power step and rounding-free extraction of set-tuples.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{too_large, Error, Result};
use crate::graph::Graph;
use crate::lovasz::{
    associated_set_tuples, directional_piece, extension_value, subgradient_at, ExtensionKind,
    FeasibleDomain,
};
use crate::oracle::{frustration_of, optimize_subsets, Sense};
use crate::polytope::{dot, min_norm_point, minkowski_lmo, norm, MnpOptions, Summand};
use crate::setfn::{SetArg, SetFunction, SubsetId};

/// Largest dimension for the exact ternary inner minimizer.
pub const MAX_TERNARY_DIM: usize = 10;

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type FaceFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
type SolveFn = Arc<dyn Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync>;

/// Convex, positively homogeneous function with subgradient access.
#[derive(Clone)]
pub struct ConvexComponent {
    name: String,
    dim: usize,
    degree: f64,
    fan_linear: bool,
    eval: EvalFn,
    subgrad: GradFn,
    face: FaceFn,
    linear_argmin: Option<SolveFn>,
}

impl fmt::Debug for ConvexComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvexComponent({}, dim {}, degree {})", self.name, self.dim, self.degree)
    }
}

/// One term `weight * |<a, x>|` of an absolute-value sum.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsTerm {
    pub coefs: Vec<(usize, f64)>,
    pub weight: f64,
}

impl AbsTerm {
    fn value(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|&(i, c)| c * x[i]).sum()
    }

    fn fan_compatible(&self) -> bool {
        match self.coefs.as_slice() {
            [_] => true,
            [(_, a), (_, b)] => a.abs() == b.abs(),
            _ => false,
        }
    }
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn linf_face(x: &[f64], d: &[f64], scale: f64) -> Vec<f64> {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut s = vec![0.0; x.len()];
    if m == 0.0 {
        if let Some((i, di)) = d
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
        {
            s[i] = -scale * sgn(*di);
        }
        return s;
    }
    let best = (0..x.len())
        .filter(|&i| x[i].abs() == m)
        .min_by(|&a, &b| (sgn(x[a]) * d[a]).total_cmp(&(sgn(x[b]) * d[b])))
        .expect("nonempty maximizer set");
    s[best] = scale * sgn(x[best]);
    s
}

impl ConvexComponent {
    /// Component from explicit closures; `face(x, d)` minimizes `<s, d>` over the subdifferential at `x`.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: &str,
        dim: usize,
        degree: f64,
        fan_linear: bool,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        subgrad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        face: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            degree,
            fan_linear,
            eval: Arc::new(eval),
            subgrad: Arc::new(subgrad),
            face: Arc::new(face),
            linear_argmin: None,
        }
    }

    pub fn zero(dim: usize) -> Self {
        let mut c = Self::custom(
            "0",
            dim,
            1.0,
            true,
            |_| 0.0,
            move |x| vec![0.0; x.len()],
            move |x, _| vec![0.0; x.len()],
        );
        c.degree = 0.0;
        c
    }

    /// `sum_t w_t |<a_t, x>|` with nonnegative weights.
    pub fn abs_terms(name: &str, dim: usize, terms: Vec<AbsTerm>) -> Result<Self> {
        for t in &terms {
            if t.weight < 0.0 || t.coefs.iter().any(|&(i, _)| i >= dim) {
                return Err(Error::InvalidArgument(format!(
                    "bad term in {name}: weights must be nonnegative and indices below {dim}"
                )));
            }
        }
        let fan = terms.iter().all(AbsTerm::fan_compatible);
        let terms: Arc<[AbsTerm]> = terms.into();
        let (t1, t2, t3) = (terms.clone(), terms.clone(), terms);
        Ok(Self::custom(
            name,
            dim,
            1.0,
            fan,
            move |x| t1.iter().map(|t| t.weight * t.value(x).abs()).sum(),
            move |x| {
                let mut g = vec![0.0; x.len()];
                for t in t2.iter() {
                    let s = t.weight * sgn(t.value(x));
                    for &(i, c) in &t.coefs {
                        g[i] += s * c;
                    }
                }
                g
            },
            move |x, d| {
                let mut g = vec![0.0; x.len()];
                for t in t3.iter() {
                    let z = t.value(x);
                    let s = if z != 0.0 { sgn(z) } else { -sgn(t.value(d)) };
                    for &(i, c) in &t.coefs {
                        g[i] += t.weight * s * c;
                    }
                }
                g
            },
        ))
    }

    /// `sum w |x_i - x_j|` over the given edges.
    pub fn edge_differences(dim: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let terms = edges
            .iter()
            .map(|&(i, j, w)| AbsTerm {
                coefs: vec![(i, 1.0), (j, -1.0)],
                weight: w,
            })
            .collect();
        Self::abs_terms("sum |x_i - x_j|", dim, terms)
    }

    /// `sum w |x_i + x_j|` over the given edges.
    pub fn edge_sums(dim: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let terms = edges
            .iter()
            .map(|&(i, j, w)| AbsTerm {
                coefs: vec![(i, 1.0), (j, 1.0)],
                weight: w,
            })
            .collect();
        Self::abs_terms("sum |x_i + x_j|", dim, terms)
    }

    /// `sum c_i |x_i|`.
    pub fn weighted_l1(c: &[f64]) -> Result<Self> {
        let terms = c
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(i, &w)| AbsTerm {
                coefs: vec![(i, 1.0)],
                weight: w,
            })
            .collect();
        Self::abs_terms("sum c_i |x_i|", c.len(), terms)
    }

    /// `scale * ||x||_inf`.
    pub fn linf(dim: usize, scale: f64) -> Result<Self> {
        if scale < 0.0 {
            return Err(Error::InvalidArgument("negative scale".into()));
        }
        Ok(Self::custom(
            "c ||x||_inf",
            dim,
            1.0,
            true,
            move |x| scale * x.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            move |x| linf_face(x, &vec![0.0; x.len()], scale),
            move |x, d| linf_face(x, d, scale),
        ))
    }

    /// `max x - min x`.
    pub fn range(dim: usize) -> Self {
        fn face(x: &[f64], d: &[f64]) -> Vec<f64> {
            let n = x.len();
            let mut s = vec![0.0; n];
            if n == 0 {
                return s;
            }
            let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
            let top = (0..n)
                .filter(|&i| x[i] == hi)
                .min_by(|&a, &b| d[a].total_cmp(&d[b]))
                .expect("nonempty");
            let bottom = (0..n)
                .filter(|&i| x[i] == lo)
                .max_by(|&a, &b| d[a].total_cmp(&d[b]).then(b.cmp(&a)))
                .expect("nonempty");
            if top != bottom {
                s[top] += 1.0;
                s[bottom] -= 1.0;
            }
            s
        }
        Self::custom(
            "max x - min x",
            dim,
            1.0,
            true,
            |x| {
                let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
                if x.is_empty() {
                    0.0
                } else {
                    hi - lo
                }
            },
            |x| face(x, &vec![0.0; x.len()]),
            face,
        )
    }

    /// `sum_t w_t |<a_t, x>|^p` for `p > 1`.
    pub fn abs_power(name: &str, dim: usize, terms: Vec<AbsTerm>, p: f64) -> Result<Self> {
        if p <= 1.0 {
            return Self::abs_terms(name, dim, terms);
        }
        if terms.iter().any(|t| t.weight < 0.0) {
            return Err(Error::InvalidArgument("negative weight".into()));
        }
        let terms: Arc<[AbsTerm]> = terms.into();
        let (t1, t2) = (terms.clone(), terms);
        let grad = move |x: &[f64]| {
            let mut g = vec![0.0; x.len()];
            for t in t2.iter() {
                let z = t.value(x);
                let s = t.weight * p * z.abs().powf(p - 1.0) * sgn(z);
                for &(i, c) in &t.coefs {
                    g[i] += s * c;
                }
            }
            g
        };
        let grad2 = grad.clone();
        Ok(Self::custom(
            name,
            dim,
            p,
            false,
            move |x| t1.iter().map(|t| t.weight * t.value(x).abs().powf(p)).sum(),
            grad,
            move |x, _| grad2(x),
        ))
    }

    /// `(scale * ||x||_inf)^p`.
    pub fn linf_power(dim: usize, scale: f64, p: f64) -> Result<Self> {
        if p <= 1.0 {
            return Self::linf(dim, scale);
        }
        let face = move |x: &[f64], d: &[f64]| {
            let m = scale * x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let c = p * m.powf(p - 1.0);
            linf_face(x, d, scale).into_iter().map(|v| c * v).collect::<Vec<_>>()
        };
        Ok(Self::custom(
            "(c ||x||_inf)^p",
            dim,
            p,
            false,
            move |x| (scale * x.iter().fold(0.0f64, |a, v| a.max(v.abs()))).powf(p),
            move |x| face(x, &vec![0.0; x.len()]),
            face,
        ))
    }

    /// `x^T A x` for a symmetric positive semidefinite `A`.
    pub fn quadratic(a: DMatrix<f64>) -> Result<Self> {
        let dim = a.nrows();
        if a.ncols() != dim {
            return Err(Error::InvalidArgument("matrix must be square".into()));
        }
        let a = Arc::new(a);
        let (a1, a2, a3) = (a.clone(), a.clone(), a.clone());
        let grad = move |x: &[f64]| {
            let v = DVector::from_column_slice(x);
            (a2.as_ref() * v * 2.0).iter().copied().collect::<Vec<_>>()
        };
        let grad2 = grad.clone();
        let pinv = a3
            .as_ref()
            .clone()
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::InnerSolve(e.to_string()))?;
        let mut c = Self::custom(
            "x^T A x",
            dim,
            2.0,
            false,
            move |x| {
                let v = DVector::from_column_slice(x);
                v.dot(&(a1.as_ref() * &v))
            },
            grad,
            move |x, _| grad2(x),
        );
        let a4 = a;
        c.linear_argmin = Some(Arc::new(move |c: &[f64]| {
            let cv = DVector::from_column_slice(c);
            let x = &pinv * &cv * 0.5;
            let resid = (a4.as_ref() * &x * 2.0 - &cv).norm();
            (resid <= 1e-8 * (1.0 + cv.norm())).then(|| x.iter().copied().collect())
        }));
        Ok(c)
    }

    /// `||x||_2^2`.
    pub fn squared_l2(dim: usize) -> Self {
        let mut c = Self::custom(
            "||x||_2^2",
            dim,
            2.0,
            false,
            |x| dot(x, x),
            |x| x.iter().map(|v| 2.0 * v).collect(),
            |x, _| x.iter().map(|v| 2.0 * v).collect(),
        );
        c.linear_argmin = Some(Arc::new(|c: &[f64]| Some(c.iter().map(|v| v / 2.0).collect())));
        c
    }

    /// Extension of `f`; convex exactly when `f` satisfies the matching submodularity.
    pub fn extension(f: &SetFunction) -> Self {
        let dim = f.n() * f.kind().k();
        let kind = ExtensionKind::of(f.kind());
        let (f1, f2, f3) = (f.clone(), f.clone(), f.clone());
        Self::custom(
            "extension",
            dim,
            1.0,
            true,
            move |x| extension_value(&f1, x).expect("dimension checked"),
            move |x| subgradient_at(&f2, kind, x).expect("dimension checked"),
            move |x, d| directional_piece(&f3, x, d).expect("dimension checked"),
        )
    }

    /// Nonnegative combination of components of equal dimension.
    pub fn sum(name: &str, parts: Vec<(f64, ConvexComponent)>) -> Result<Self> {
        let dim = parts.first().map_or(0, |p| p.1.dim);
        if parts.iter().any(|(c, p)| p.dim != dim || *c < 0.0) {
            return Err(Error::InvalidArgument(
                "sum needs nonnegative coefficients and equal dimensions".into(),
            ));
        }
        let degrees: Vec<f64> = parts
            .iter()
            .filter(|(_, p)| p.degree > 0.0)
            .map(|(_, p)| p.degree)
            .collect();
        if degrees.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::InvalidArgument("mixed homogeneity degrees".into()));
        }
        let degree = degrees.first().copied().unwrap_or(0.0);
        let fan = parts.iter().all(|(_, p)| p.fan_linear);
        let parts: Arc<[(f64, ConvexComponent)]> = parts.into();
        let (p1, p2, p3) = (parts.clone(), parts.clone(), parts);
        let acc = |parts: &[(f64, ConvexComponent)], f: &dyn Fn(&ConvexComponent) -> Vec<f64>, n: usize| {
            let mut g = vec![0.0; n];
            for (c, p) in parts {
                for (o, v) in g.iter_mut().zip(f(p)) {
                    *o += c * v;
                }
            }
            g
        };
        let mut out = Self::custom(
            name,
            dim,
            degree,
            fan,
            move |x| p1.iter().map(|(c, p)| c * p.eval(x)).sum(),
            move |x| acc(&p2, &|p| p.subgrad(x), x.len()),
            move |x, d| acc(&p3, &|p| p.face_lmo(x, d), x.len()),
        );
        out.degree = degree;
        Ok(out)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Homogeneity degree (0 for the zero component).
    pub fn degree(&self) -> f64 {
        self.degree
    }

    /// Linear on every cell of the signed ordering fan (so minimized over the unit cube at ternary points).
    pub fn is_fan_linear(&self) -> bool {
        self.fan_linear && self.degree <= 1.0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn subgrad(&self, x: &[f64]) -> Vec<f64> {
        (self.subgrad)(x)
    }

    /// Minimizer of `<s, d>` over the subdifferential at `x`.
    pub fn face_lmo(&self, x: &[f64], d: &[f64]) -> Vec<f64> {
        (self.face)(x, d)
    }

    /// Exact `argmin_x F(x) - <c, x>` when available.
    pub fn argmin_linear(&self, c: &[f64]) -> Option<Vec<f64>> {
        self.linear_argmin.as_ref().and_then(|f| f(c))
    }

    /// Spot check of `F(t x) = t^p F(x)` on random points.
    pub fn check_homogeneity<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> bool {
        (0..samples).all(|_| {
            let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t: f64 = rng.gen_range(0.1..3.0);
            let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
            let lhs = self.eval(&tx);
            let rhs = t.powf(self.degree.max(1.0)) * self.eval(&x);
            (lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs())
        })
    }

    /// Spot check of `F(y) >= F(x) + <s, y - x>` on random pairs.
    pub fn check_subgradient_inequality<R: Rng + ?Sized>(&self, rng: &mut R, pairs: usize) -> bool {
        (0..pairs).all(|_| {
            let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = self.subgrad(&x);
            let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            self.eval(&y) >= self.eval(&x) + dot(&s, &diff) - 1e-9
        })
    }
}

/// Set functions whose extensions are the numerator and denominator.
#[derive(Clone, Debug)]
pub struct DiscreteRatio {
    pub f: SetFunction,
    pub g: SetFunction,
    pub family: FeasibleDomain,
}

/// `opt (F1 - F2) / (G1 - G2)`.
#[derive(Clone, Debug)]
pub struct RatioProblem {
    pub f1: ConvexComponent,
    pub f2: ConvexComponent,
    pub g1: ConvexComponent,
    pub g2: ConvexComponent,
    pub sense: Sense,
    pub discrete: Option<DiscreteRatio>,
}

impl RatioProblem {
    pub fn new(
        f1: ConvexComponent,
        f2: ConvexComponent,
        g1: ConvexComponent,
        g2: ConvexComponent,
        sense: Sense,
    ) -> Result<Self> {
        let d = f1.dim();
        if [&f2, &g1, &g2].iter().any(|c| c.dim() != d) {
            return Err(Error::InvalidArgument("component dimensions differ".into()));
        }
        Ok(Self {
            f1,
            f2,
            g1,
            g2,
            sense,
            discrete: None,
        })
    }

    /// Problem `opt f^L / g^L` for set functions whose extensions are convex.
    pub fn from_set_functions(
        f: &SetFunction,
        g: &SetFunction,
        family: FeasibleDomain,
        sense: Sense,
    ) -> Result<Self> {
        if f.kind() != g.kind() || f.n() != g.n() {
            return Err(Error::DomainMismatch {
                expected: f.kind().to_string(),
                got: g.kind().to_string(),
            });
        }
        let d = f.n() * f.kind().k();
        Ok(Self::new(
            ConvexComponent::extension(f),
            ConvexComponent::zero(d),
            ConvexComponent::extension(g),
            ConvexComponent::zero(d),
            sense,
        )?
        .with_discrete(f.clone(), g.clone(), family))
    }

    pub fn with_discrete(mut self, f: SetFunction, g: SetFunction, family: FeasibleDomain) -> Self {
        self.discrete = Some(DiscreteRatio { f, g, family });
        self
    }

    pub fn dim(&self) -> usize {
        self.f1.dim()
    }

    pub fn numerator(&self, x: &[f64]) -> f64 {
        self.f1.eval(x) - self.f2.eval(x)
    }

    pub fn denominator(&self, x: &[f64]) -> f64 {
        self.g1.eval(x) - self.g2.eval(x)
    }

    /// `F(x) / G(x)` when `G(x) > 0`.
    pub fn ratio(&self, x: &[f64]) -> Option<f64> {
        let g = self.denominator(x);
        (g > 0.0).then(|| self.numerator(x) / g)
    }

    /// Distance from `0` to `dF1 - dF2 - r (dG1 - dG2)` at `x`.
    pub fn eigen_residual(&self, x: &[f64], r: f64) -> f64 {
        eigen_residual_parts(
            &[(1.0, &self.f1), (-1.0, &self.f2), (-r, &self.g1), (r, &self.g2)],
            x,
        )
    }
}

fn eigen_residual_parts(parts: &[(f64, &ConvexComponent)], x: &[f64]) -> f64 {
    let lmos: Vec<Box<dyn Fn(&[f64]) -> Vec<f64> + '_>> = parts
        .iter()
        .map(|(_, c)| {
            let c = *c;
            Box::new(move |d: &[f64]| c.face_lmo(x, d)) as Box<dyn Fn(&[f64]) -> Vec<f64>>
        })
        .collect();
    let summands: Vec<Summand<'_>> = parts
        .iter()
        .zip(&lmos)
        .filter(|((coef, _), _)| *coef != 0.0)
        .map(|((coef, _), l)| Summand {
            coef: *coef,
            lmo: l.as_ref(),
        })
        .collect();
    if summands.is_empty() {
        return 0.0;
    }
    let lmo = minkowski_lmo(x.len(), &summands);
    min_norm_point(x.len(), &lmo, MnpOptions::default()).distance
}

/// Feasible region of an inner solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Region {
    /// `||x||_inf <= radius`.
    Box(f64),
    /// `||x||_2 <= radius`.
    Ball(f64),
    Free,
}

impl Region {
    fn project(&self, x: &mut [f64]) {
        match *self {
            Region::Box(r) => x.iter_mut().for_each(|v| *v = v.clamp(-r, r)),
            Region::Ball(r) => {
                let nx = norm(x);
                if nx > r {
                    x.iter_mut().for_each(|v| *v *= r / nx);
                }
            }
            Region::Free => {}
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Region::Box(r) => x.iter().all(|v| v.abs() <= r * (1.0 + 1e-12)),
            Region::Ball(r) => norm(x) <= r * (1.0 + 1e-12),
            Region::Free => true,
        }
    }
}

/// `sum_j c_j P_j(x) - <linear, x> + prox ||x - center||^2` with `c_j >= 0`.
#[derive(Clone, Debug)]
pub struct InnerObjective {
    pub parts: Vec<(f64, ConvexComponent)>,
    pub linear: Vec<f64>,
    pub prox: f64,
    pub center: Vec<f64>,
}

impl InnerObjective {
    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v: f64 = self
            .parts
            .iter()
            .filter(|(c, _)| *c != 0.0)
            .map(|(c, p)| c * p.eval(x))
            .sum();
        v -= dot(&self.linear, x);
        if self.prox > 0.0 {
            let d: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
            v += self.prox * d;
        }
        v
    }

    pub fn subgrad(&self, x: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = self.linear.iter().map(|v| -v).collect();
        for (c, p) in &self.parts {
            if *c != 0.0 {
                for (o, v) in g.iter_mut().zip(p.subgrad(x)) {
                    *o += c * v;
                }
            }
        }
        if self.prox > 0.0 {
            for ((o, a), b) in g.iter_mut().zip(x).zip(&self.center) {
                *o += 2.0 * self.prox * (a - b);
            }
        }
        g
    }

    fn homogeneous_pl(&self) -> bool {
        self.parts.iter().all(|(c, p)| *c == 0.0 || p.degree() <= 1.0)
    }
}

/// Inner minimization strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerMethod {
    /// Exact path when the structure allows, projected subgradient otherwise.
    Auto,
    /// Enumeration of scaled ternary points; exact for fan-linear parts on a cube without prox term.
    Ternary,
    /// Dual min-norm-point solve; exact for homogeneous PL parts with a prox term.
    Prox,
    Subgradient,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerOptions {
    pub method: InnerMethod,
    pub budget: usize,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self {
            method: InnerMethod::Auto,
            budget: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InnerResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub exact: bool,
    /// Budget ran out without an optimality certificate.
    pub exhausted: bool,
}

fn ternary_solve(obj: &InnerObjective, radius: f64) -> InnerResult {
    let n = obj.center.len();
    let total = 3usize.pow(n as u32);
    let mut best_x = obj.center.clone();
    let mut best = obj.value(&best_x);
    let mut x = vec![0.0; n];
    for code in 0..total {
        let mut c = code;
        for v in x.iter_mut() {
            *v = radius * ((c % 3) as f64 - 1.0);
            c /= 3;
        }
        let v = obj.value(&x);
        if v < best - 1e-12 * (1.0 + best.abs()) {
            best = v;
            best_x.copy_from_slice(&x);
        }
    }
    InnerResult {
        x: best_x,
        value: best,
        exact: true,
        exhausted: false,
    }
}

fn prox_solve(obj: &InnerObjective) -> Option<InnerResult> {
    let n = obj.center.len();
    let lam = obj.prox;
    let target: Vec<f64> = obj.center.iter().map(|v| 2.0 * lam * v).collect();
    let lmo = |d: &[f64]| {
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        let mut s: Vec<f64> = obj.linear.iter().zip(&target).map(|(l, t)| -l - t).collect();
        for (c, p) in &obj.parts {
            if *c != 0.0 {
                for (o, v) in s.iter_mut().zip(p.subgrad(&neg)) {
                    *o += c * v;
                }
            }
        }
        crate::polytope::Atom {
            parts: vec![],
            point: s,
        }
    };
    let r = min_norm_point(
        n,
        &lmo,
        MnpOptions {
            max_iter: 5000,
            tol: 1e-14,
        },
    );
    if !r.converged {
        return None;
    }
    let x: Vec<f64> = obj
        .center
        .iter()
        .zip(&r.point)
        .zip(&target)
        .map(|((c, p), t)| c - (p + t) / (2.0 * lam))
        .collect();
    Some(InnerResult {
        value: obj.value(&x),
        x,
        exact: true,
        exhausted: false,
    })
}

fn subgradient_solve(obj: &InnerObjective, region: Region, budget: usize) -> InnerResult {
    let n = obj.center.len();
    let mut x = obj.center.clone();
    region.project(&mut x);
    let radius = match region {
        Region::Box(r) => r * (n as f64).sqrt(),
        Region::Ball(r) => r,
        Region::Free => 1.0f64.max(norm(&x)),
    };
    let mut best_x = x.clone();
    let mut best = obj.value(&x);
    let mut avg = vec![0.0; n];
    let mut avg_count = 0.0;
    for t in 1..=budget {
        let g = obj.subgrad(&x);
        let gn = norm(&g);
        if gn == 0.0 {
            return InnerResult {
                value: obj.value(&x),
                x,
                exact: true,
                exhausted: false,
            };
        }
        let step = radius / (t as f64).sqrt() / gn;
        x.iter_mut().zip(&g).for_each(|(v, gi)| *v -= step * gi);
        region.project(&mut x);
        let v = obj.value(&x);
        if v < best {
            best = v;
            best_x.copy_from_slice(&x);
        }
        if 2 * t > budget {
            avg.iter_mut().zip(&x).for_each(|(a, b)| *a += b);
            avg_count += 1.0;
        }
    }
    if avg_count > 0.0 {
        avg.iter_mut().for_each(|a| *a /= avg_count);
        let v = obj.value(&avg);
        if v < best {
            best = v;
            best_x = avg;
        }
    }
    InnerResult {
        x: best_x,
        value: best,
        exact: false,
        exhausted: true,
    }
}

/// Minimize a convex objective over `region`.
///
/// Exact paths: ternary enumeration (fan-linear parts, no prox term, cube region,
/// dimension at most [`MAX_TERNARY_DIM`]) and the dual min-norm-point solve
/// (homogeneous PL parts with a prox term, unconstrained optimum inside `region`).
/// Otherwise projected subgradient descent with step `c / sqrt(t)` and tail averaging.
pub fn inner_convex_solve(
    obj: &InnerObjective,
    region: Region,
    opts: InnerOptions,
) -> Result<InnerResult> {
    let n = obj.center.len();
    if obj.linear.len() != n || obj.parts.iter().any(|(_, p)| p.dim() != n) {
        return Err(Error::InvalidArgument("inner objective dimensions differ".into()));
    }
    if obj.parts.iter().any(|(c, _)| *c < 0.0) {
        return Err(Error::InvalidArgument("inner objective must be convex".into()));
    }
    let ternary_ok = obj.prox == 0.0
        && matches!(region, Region::Box(_))
        && obj.parts.iter().all(|(c, p)| *c == 0.0 || p.is_fan_linear());
    let prox_ok = obj.prox > 0.0 && obj.homogeneous_pl();
    match opts.method {
        InnerMethod::Ternary => {
            if !ternary_ok {
                return Err(Error::InvalidArgument(
                    "ternary enumeration needs fan-linear parts on a cube without prox term".into(),
                ));
            }
            if n > MAX_TERNARY_DIM {
                return Err(too_large("ternary enumeration", MAX_TERNARY_DIM, n));
            }
            let Region::Box(r) = region else { unreachable!() };
            Ok(ternary_solve(obj, r))
        }
        InnerMethod::Prox => {
            if !prox_ok {
                return Err(Error::InvalidArgument(
                    "prox solve needs homogeneous PL parts and a positive prox weight".into(),
                ));
            }
            match prox_solve(obj) {
                Some(r) if region.contains(&r.x) => Ok(r),
                Some(_) => Err(Error::InnerSolve("prox minimizer outside region".into())),
                None => Err(Error::InnerSolve("min-norm-point did not converge".into())),
            }
        }
        InnerMethod::Subgradient => Ok(subgradient_solve(obj, region, opts.budget)),
        InnerMethod::Auto => {
            if ternary_ok && n <= MAX_TERNARY_DIM {
                let Region::Box(r) = region else { unreachable!() };
                return Ok(ternary_solve(obj, r));
            }
            if prox_ok {
                if let Some(r) = prox_solve(obj) {
                    if region.contains(&r.x) {
                        return Ok(r);
                    }
                }
            }
            Ok(subgradient_solve(obj, region, opts.budget))
        }
    }
}

/// Norm defining the ball of the schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallNorm {
    Linf,
    L2,
}

impl BallNorm {
    fn norm(self, x: &[f64]) -> f64 {
        match self {
            BallNorm::Linf => x.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            BallNorm::L2 => norm(x),
        }
    }

    fn region(self) -> Region {
        match self {
            BallNorm::Linf => Region::Box(1.0),
            BallNorm::L2 => Region::Ball(1.0),
        }
    }
}

/// Ball-constrained inner step, or unconstrained step followed by normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    Ball,
    Normalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IpsdOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Consecutive small changes of `r` required to stop.
    pub stall: usize,
    pub prox_weight: f64,
    pub ball: BallNorm,
    pub scheme: Scheme,
    pub inner: InnerOptions,
    pub verify_eigen: bool,
    pub eigen_tol: f64,
    pub seed: u64,
}

impl Default for IpsdOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-10,
            stall: 3,
            prox_weight: 1.0,
            ball: BallNorm::Linf,
            scheme: Scheme::Normalized,
            inner: InnerOptions::default(),
            verify_eigen: true,
            eigen_tol: 1e-6,
            seed: 0,
        }
    }
}

impl IpsdOptions {
    /// Ball scheme without prox term, solved exactly by ternary enumeration.
    pub fn exact_ball() -> Self {
        Self {
            prox_weight: 0.0,
            scheme: Scheme::Ball,
            inner: InnerOptions {
                method: InnerMethod::Ternary,
                budget: 0,
            },
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    GVanished,
    MaxIter,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Iterate {
    pub x: Vec<f64>,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveTrace {
    pub iterates: Vec<Iterate>,
    pub termination: Termination,
    pub eigen_residual: Option<f64>,
    /// `F` at the point where `G` vanished.
    pub vanished_numerator: Option<f64>,
    pub rejected_steps: usize,
    pub inexact_steps: usize,
    pub seed: u64,
}

impl SolveTrace {
    pub fn final_ratio(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |i| i.r)
    }

    pub fn final_point(&self) -> &[f64] {
        self.iterates.last().map_or(&[], |i| &i.x)
    }

    /// `r^k` monotone in the problem sense up to `slack`.
    pub fn is_monotone(&self, sense: Sense, slack: f64) -> bool {
        self.iterates.windows(2).all(|w| match sense {
            Sense::Min => w[1].r <= w[0].r + slack,
            Sense::Max => w[1].r >= w[0].r - slack,
        })
    }

    pub fn certified(&self, tol: f64) -> Option<bool> {
        self.eigen_residual.map(|r| r <= tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DinkelbachOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for DinkelbachOptions {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            tol: 1e-10,
        }
    }
}

/// Dinkelbach scheme: `x <- argopt F - r G`, `r <- F(x) / G(x)`.
///
/// `inner(r)` must return an optimizer of `F - r G` over the compact set.
pub fn dinkelbach_solve(
    f: &dyn Fn(&[f64]) -> f64,
    g: &dyn Fn(&[f64]) -> f64,
    inner: &mut dyn FnMut(f64) -> Result<Vec<f64>>,
    x0: &[f64],
    sense: Sense,
    opts: DinkelbachOptions,
) -> Result<SolveTrace> {
    let g0 = g(x0);
    if g0 <= 0.0 {
        return Err(Error::InvalidArgument("G(x0) must be positive".into()));
    }
    let mut r = f(x0) / g0;
    let mut iterates = vec![Iterate { x: x0.to_vec(), r }];
    let mut termination = Termination::MaxIter;
    for _ in 0..opts.max_iter {
        let x = inner(r)?;
        let gx = g(&x);
        if gx <= 0.0 {
            return Err(Error::InnerSolve("inner optimizer left the set G > 0".into()));
        }
        let next = f(&x) / gx;
        iterates.push(Iterate { x, r: next });
        let done = (next - r).abs() <= opts.tol;
        r = next;
        if done {
            termination = Termination::Converged;
            break;
        }
    }
    let _ = sense;
    Ok(SolveTrace {
        iterates,
        termination,
        eigen_residual: None,
        vanished_numerator: None,
        rejected_steps: 0,
        inexact_steps: 0,
        seed: 0,
    })
}

/// Dinkelbach on `f / g` over a family, inner step by exhaustive enumeration.
///
/// Returns the trace (points are indicator vectors) and the final argument.
pub fn dinkelbach_set_ratio(
    f: &SetFunction,
    g: &SetFunction,
    family: &FeasibleDomain,
    sense: Sense,
    start: &SetArg,
    opts: DinkelbachOptions,
) -> Result<(SolveTrace, SetArg)> {
    let n = f.n();
    let x0 = start.indicator(n);
    let mut last = start.clone();
    let fam = family.clone();
    let gg = g.clone();
    let admissible = move |a: &SetArg| fam.contains(a) && gg.evaluate(a).is_ok_and(|v| v > 0.0);
    if !admissible(start) || start.is_empty() {
        return Err(Error::InvalidArgument(format!("start {start} is not admissible")));
    }
    let fv = |x: &[f64]| extension_value(f, x).expect("layout");
    let gv = |x: &[f64]| extension_value(g, x).expect("layout");
    let mut inner = |r: f64| -> Result<Vec<f64>> {
        let h = f.combine(1.0, g, -r)?;
        let res = optimize_subsets(&h, None, sense, &admissible)?;
        last = res.witnesses[0].clone();
        Ok(last.indicator(n))
    };
    let trace = dinkelbach_solve(&fv, &gv, &mut inner, &x0, sense, opts)?;
    Ok((trace, last))
}

struct Internal<'a> {
    f1: &'a ConvexComponent,
    f2: &'a ConvexComponent,
    g1: &'a ConvexComponent,
    g2: &'a ConvexComponent,
}

impl Internal<'_> {
    fn num(&self, x: &[f64]) -> f64 {
        self.f1.eval(x) - self.f2.eval(x)
    }

    fn den(&self, x: &[f64]) -> f64 {
        self.g1.eval(x) - self.g2.eval(x)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Transform {
    Identity,
    Reciprocal,
    Negated,
}

impl Transform {
    fn external(self, r: f64) -> f64 {
        match self {
            Transform::Identity => r,
            Transform::Reciprocal => 1.0 / r,
            Transform::Negated => -r,
        }
    }
}

fn snap(x: &[f64]) -> Vec<f64> {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return x.to_vec();
    }
    let mut vals: Vec<f64> = x.iter().map(|v| v / m).collect();
    let mut sorted = vals.clone();
    sorted.sort_by(f64::total_cmp);
    let mut reps: Vec<(f64, f64, usize)> = Vec::new();
    for v in sorted {
        match reps.last_mut() {
            Some((lo, sum, cnt)) if v - *lo <= 1e-6 => {
                *sum += v;
                *cnt += 1;
            }
            _ => reps.push((v, v, 1)),
        }
    }
    let centers: Vec<(f64, f64)> = reps
        .iter()
        .map(|&(lo, sum, cnt)| {
            let c = sum / cnt as f64;
            let c = if c.abs() <= 1e-6 {
                0.0
            } else if (c.abs() - 1.0).abs() <= 1e-6 {
                c.signum()
            } else {
                c
            };
            (lo, c)
        })
        .collect();
    for v in vals.iter_mut() {
        let idx = centers.partition_point(|&(lo, _)| lo <= *v) - 1;
        *v = centers[idx].1;
    }
    vals
}

fn certify(p: &Internal<'_>, x: &[f64], r: f64) -> f64 {
    let parts = |x: &[f64]| {
        eigen_residual_parts(
            &[(1.0, p.f1), (-1.0, p.f2), (-r, p.g1), (r, p.g2)],
            x,
        )
    };
    let direct = parts(x);
    if direct <= 1e-9 {
        return direct;
    }
    let s = snap(x);
    let g = p.den(&s);
    if g > 0.0 && (p.num(&s) / g - r).abs() <= 1e-9 * (1.0 + r.abs()) {
        direct.min(parts(&s))
    } else {
        direct
    }
}

fn ipsd_core(p: &RatioProblem, x0: &[f64], opts: IpsdOptions, generalized: bool) -> Result<SolveTrace> {
    let n = p.dim();
    if x0.len() != n {
        return Err(Error::InvalidArgument(format!(
            "start has length {}, expected {n}",
            x0.len()
        )));
    }
    if opts.scheme == Scheme::Normalized && opts.prox_weight <= 0.0 {
        return Err(Error::InvalidArgument(
            "the normalized scheme needs a positive prox weight".into(),
        ));
    }
    let (internal, tr) = match (p.sense, generalized) {
        (Sense::Min, _) => (
            Internal {
                f1: &p.f1,
                f2: &p.f2,
                g1: &p.g1,
                g2: &p.g2,
            },
            Transform::Identity,
        ),
        (Sense::Max, false) => (
            Internal {
                f1: &p.g1,
                f2: &p.g2,
                g1: &p.f1,
                g2: &p.f2,
            },
            Transform::Reciprocal,
        ),
        (Sense::Max, true) => (
            Internal {
                f1: &p.f2,
                f2: &p.f1,
                g1: &p.g1,
                g2: &p.g2,
            },
            Transform::Negated,
        ),
    };
    let bn = opts.ball.norm(x0);
    if bn == 0.0 {
        return Err(Error::InvalidArgument("start must be nonzero".into()));
    }
    let mut x: Vec<f64> = x0.iter().map(|v| v / bn).collect();
    let g0 = internal.den(&x);
    if g0 <= 0.0 {
        return Err(Error::InvalidArgument(
            "the denominator must be positive at the start".into(),
        ));
    }
    let mut r = internal.num(&x) / g0;
    if !generalized && r < 0.0 {
        return Err(Error::Hypothesis(
            "negative ratio at the start; use the generalized scheme".into(),
        ));
    }
    let mut iterates = vec![Iterate {
        x: x.clone(),
        r: tr.external(r),
    }];
    let mut termination = Termination::MaxIter;
    let mut vanished = None;
    let (mut rejected, mut inexact, mut stall) = (0, 0, 0);
    let region = match opts.scheme {
        Scheme::Ball => opts.ball.region(),
        Scheme::Normalized => Region::Free,
    };
    for _ in 0..opts.max_iter {
        let u = internal.f2.subgrad(&x);
        let obj = if r >= 0.0 {
            let v = internal.g1.subgrad(&x);
            InnerObjective {
                parts: vec![(1.0, internal.f1.clone()), (r, internal.g2.clone())],
                linear: u.iter().zip(&v).map(|(a, b)| a + r * b).collect(),
                prox: opts.prox_weight,
                center: x.clone(),
            }
        } else {
            let w = internal.g2.subgrad(&x);
            let c = -1.0 / r;
            InnerObjective {
                parts: vec![(1.0, internal.g1.clone()), (c, internal.f1.clone())],
                linear: w.iter().zip(&u).map(|(a, b)| a + c * b).collect(),
                prox: opts.prox_weight,
                center: x.clone(),
            }
        };
        let res = inner_convex_solve(&obj, region, opts.inner)?;
        if !res.exact {
            inexact += 1;
        }
        let here = obj.value(&x);
        if res.value > here + 1e-12 * (1.0 + here.abs()) {
            rejected += 1;
            termination = Termination::Converged;
            break;
        }
        let y = res.x;
        let next_x: Vec<f64> = match opts.scheme {
            Scheme::Ball => y,
            Scheme::Normalized => {
                let b = opts.ball.norm(&y);
                if b == 0.0 {
                    termination = Termination::Converged;
                    break;
                }
                y.iter().map(|v| v / b).collect()
            }
        };
        if opts.ball.norm(&next_x) == 0.0 {
            termination = Termination::Converged;
            break;
        }
        let g = internal.den(&next_x);
        if g <= 1e-14 {
            vanished = Some(internal.num(&next_x));
            termination = Termination::GVanished;
            break;
        }
        let next_r = internal.num(&next_x) / g;
        if next_r > r + 1e-12 * (1.0 + r.abs()) {
            rejected += 1;
            termination = Termination::Converged;
            break;
        }
        if !generalized && next_r < 0.0 {
            return Err(Error::Hypothesis(
                "ratio became negative; use the generalized scheme".into(),
            ));
        }
        stall = if (next_r - r).abs() <= opts.tol { stall + 1 } else { 0 };
        x = next_x;
        r = next_r;
        iterates.push(Iterate {
            x: x.clone(),
            r: tr.external(r),
        });
        if stall >= opts.stall {
            termination = Termination::Converged;
            break;
        }
    }
    let eigen_residual = (opts.verify_eigen && n <= 8 && termination != Termination::GVanished)
        .then(|| certify(&internal, &x, r));
    Ok(SolveTrace {
        iterates,
        termination,
        eigen_residual,
        vanished_numerator: vanished,
        rejected_steps: rejected,
        inexact_steps: inexact,
        seed: opts.seed,
    })
}

/// Mixed inverse-power / steepest-descent scheme for nonnegative numerators.
///
/// Maximization runs the reciprocal minimization `G / F`.
pub fn ipsd_solve(p: &RatioProblem, x0: &[f64], opts: IpsdOptions) -> Result<SolveTrace> {
    ipsd_core(p, x0, opts, false)
}

/// Variant allowing sign-indefinite numerators; branches on the sign of `r^k`.
///
/// Maximization runs the minimization of `-F / G`.
pub fn ipsd_solve_generalized(p: &RatioProblem, x0: &[f64], opts: IpsdOptions) -> Result<SolveTrace> {
    ipsd_core(p, x0, opts, true)
}

/// One step of the normalized inverse-power scheme for `p`-homogeneous `F`, `G` with `p > 1`.
///
/// Returns `(x_next, r_next)` where `x_next = b * argmin F(x) - a <u, x>` and `u` is a subgradient of `G` at `x`.
pub fn inverse_power_step_normalized(
    f: &ConvexComponent,
    g: &ConvexComponent,
    x: &[f64],
    a: f64,
    b: f64,
) -> Result<(Vec<f64>, f64)> {
    if f.degree() <= 1.0 || g.degree() <= 1.0 {
        return Err(Error::Hypothesis("both functions must be p-homogeneous with p > 1".into()));
    }
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::InvalidArgument("a and b must be positive".into()));
    }
    let c: Vec<f64> = g.subgrad(x).iter().map(|v| a * v).collect();
    let hat = match f.argmin_linear(&c) {
        Some(h) => h,
        None => {
            let radius = 10.0 * (1.0 + norm(&c)) * (1.0 + norm(x));
            let obj = InnerObjective {
                parts: vec![(1.0, f.clone())],
                linear: c,
                prox: 0.0,
                center: x.to_vec(),
            };
            let res = inner_convex_solve(
                &obj,
                Region::Box(radius),
                InnerOptions {
                    method: InnerMethod::Subgradient,
                    budget: 5000,
                },
            )?;
            res.x
        }
    };
    let next: Vec<f64> = hat.iter().map(|v| b * v).collect();
    let gv = g.eval(&next);
    if gv <= 0.0 {
        return Err(Error::InnerSolve("inverse-power step reached G = 0".into()));
    }
    Ok((next.clone(), f.eval(&next) / gv))
}

/// Iterates the normalized inverse-power scheme with `b_k = G(x_hat)^{-1/p}`.
///
/// `a_k` is drawn from `a_of(k)`.
pub fn inverse_power_iterate(
    f: &ConvexComponent,
    g: &ConvexComponent,
    x0: &[f64],
    iters: usize,
    a_of: &mut dyn FnMut(usize) -> f64,
) -> Result<SolveTrace> {
    let p = g.degree();
    let gx = g.eval(x0);
    if gx <= 0.0 {
        return Err(Error::InvalidArgument("G(x0) must be positive".into()));
    }
    let s = gx.powf(-1.0 / p);
    let mut x: Vec<f64> = x0.iter().map(|v| v * s).collect();
    let mut iterates = vec![Iterate {
        r: f.eval(&x) / g.eval(&x),
        x: x.clone(),
    }];
    for k in 0..iters {
        let (hat, _) = inverse_power_step_normalized(f, g, &x, a_of(k), 1.0)?;
        let b = g.eval(&hat).powf(-1.0 / p);
        x = hat.iter().map(|v| v * b).collect();
        iterates.push(Iterate {
            r: f.eval(&x) / g.eval(&x),
            x: x.clone(),
        });
    }
    Ok(SolveTrace {
        iterates,
        termination: Termination::MaxIter,
        eigen_residual: None,
        vanished_numerator: None,
        rejected_steps: 0,
        inexact_steps: 0,
        seed: 0,
    })
}

/// Best associated set-tuple of `x` by the discrete ratio.
pub fn extract_best_settuple(p: &RatioProblem, x: &[f64]) -> Result<(SetArg, f64)> {
    let d = p
        .discrete
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("problem has no underlying set functions".into()))?;
    let mut best: Option<(SetArg, f64)> = None;
    for a in associated_set_tuples(&d.f, x)? {
        if a.is_empty() || !d.family.contains(&a) {
            continue;
        }
        let gv = d.g.evaluate(&a)?;
        if gv <= 0.0 {
            continue;
        }
        let v = d.f.evaluate(&a)? / gv;
        if best.as_ref().is_none_or(|(_, b)| p.sense.better(v, *b)) {
            best = Some((a, v));
        }
    }
    best.ok_or(Error::NoFeasibleLevel)
}

/// Result of the recursive frustration heuristic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrustrationRun {
    pub assignment: Vec<f64>,
    pub frustrated: f64,
    pub rounds: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrustrationOptions {
    pub ipsd: IpsdOptions,
    /// Random `{-1, 1}` starts per round in addition to the all-ones start.
    pub starts: usize,
    pub seed: u64,
}

impl Default for FrustrationOptions {
    fn default() -> Self {
        Self {
            ipsd: IpsdOptions {
                verify_eigen: false,
                ..IpsdOptions::exact_ball()
            },
            starts: 4,
            seed: 0,
        }
    }
}

/// `sum |x_i - s_ij x_j|` over `||x||_inf` on a signed graph.
pub fn signed_pair_problem(g: &Graph) -> Result<RatioProblem> {
    let n = g.n();
    let terms = g
        .edges()
        .iter()
        .map(|e| AbsTerm {
            coefs: vec![(e.u, 1.0), (e.v, -(e.sign as f64))],
            weight: e.w,
        })
        .collect();
    RatioProblem::new(
        ConvexComponent::abs_terms("sum |x_i - s_ij x_j|", n, terms)?,
        ConvexComponent::zero(n),
        ConvexComponent::linf(n, 1.0)?,
        ConvexComponent::zero(n),
        Sense::Min,
    )
}

/// Recursive frustration heuristic: peel off `(D+(x), D-(x))` of a smallest-ratio point and recurse.
pub fn frustration_recursive(g: &Graph, opts: FrustrationOptions) -> Result<FrustrationRun> {
    use rand::SeedableRng;
    let n = g.n();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let mut assign = vec![0.0f64; n];
    let mut remaining = SubsetId::full(n);
    let mut rounds = 0;
    while !remaining.is_empty() {
        rounds += 1;
        let (sub, map) = g.induced(remaining);
        if sub.m() == 0 {
            for &v in &map {
                assign[v] = 1.0;
            }
            break;
        }
        let prob = signed_pair_problem(&sub)?;
        let k = sub.n();
        let mut starts = vec![vec![1.0; k]];
        for _ in 0..opts.starts {
            starts.push((0..k).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect());
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for s in &starts {
            let t = ipsd_solve(&prob, s, opts.ipsd)?;
            let r = t.final_ratio();
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                best = Some((r, t.final_point().to_vec()));
            }
        }
        let (_, x) = best.expect("at least one start");
        let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let plus: Vec<usize> = (0..k).filter(|&i| x[i] == m).map(|i| map[i]).collect();
        let minus: Vec<usize> = (0..k).filter(|&i| x[i] == -m).map(|i| map[i]).collect();
        let score = |flip: f64, assign: &[f64]| {
            let mut a = assign.to_vec();
            plus.iter().for_each(|&v| a[v] = flip);
            minus.iter().for_each(|&v| a[v] = -flip);
            let placed = |v: usize| a[v] != 0.0;
            g.edges()
                .iter()
                .filter(|e| placed(e.u) && placed(e.v) && a[e.u] * a[e.v] * e.sign as f64 <= 0.0)
                .map(|e| e.w)
                .sum::<f64>()
        };
        let flip = if score(-1.0, &assign) < score(1.0, &assign) { -1.0 } else { 1.0 };
        for &v in &plus {
            assign[v] = flip;
            remaining = remaining.remove(v);
        }
        for &v in &minus {
            assign[v] = -flip;
            remaining = remaining.remove(v);
        }
        if plus.is_empty() && minus.is_empty() {
            return Err(Error::InnerSolve("recursive step made no progress".into()));
        }
    }
    Ok(FrustrationRun {
        frustrated: frustration_of(g, &assign),
        assignment: assign,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::frustration_index;
    use crate::setfn::SetPair;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cut_pair(g: &Graph) -> (SetFunction, SetFunction) {
        let g1 = g.clone();
        let f = SetFunction::pair_from_fn(g.n(), move |p| g1.cut(p.pos) + g1.cut(p.neg)).unwrap();
        (f, SetFunction::constant_pair(g.n(), 2.0).unwrap())
    }

    fn edge_list(g: &Graph) -> Vec<(usize, usize, f64)> {
        g.edges().iter().map(|e| (e.u, e.v, e.w)).collect()
    }

    fn maxcut_problem(g: &Graph) -> RatioProblem {
        let n = g.n();
        let (f, c) = cut_pair(g);
        RatioProblem::new(
            ConvexComponent::edge_differences(n, &edge_list(g)).unwrap(),
            ConvexComponent::zero(n),
            ConvexComponent::linf(n, 2.0).unwrap(),
            ConvexComponent::zero(n),
            Sense::Max,
        )
        .unwrap()
        .with_discrete(f, c, FeasibleDomain::all())
    }

    #[test]
    fn dinkelbach_mincut_k3() {
        let g = Graph::complete(3);
        let (f, c) = cut_pair(&g);
        let fam = FeasibleDomain::new("A,B nonempty", |a| match a {
            SetArg::Pair(p) => !p.pos.is_empty() && !p.neg.is_empty(),
            _ => false,
        });
        let start = SetArg::Pair(SetPair::new(SubsetId(1), SubsetId(2)).unwrap());
        let (t, arg) =
            dinkelbach_set_ratio(&f, &c, &fam, Sense::Min, &start, DinkelbachOptions::default()).unwrap();
        assert_eq!(t.final_ratio(), 2.0);
        assert!(t.iterates.len() <= 4);
        assert_eq!(f.evaluate(&arg).unwrap() / 2.0, 2.0);
    }

    #[test]
    fn dinkelbach_identical_pair() {
        let f = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>() + 1.0;
        let mut inner = |_r: f64| Ok(vec![0.3, -0.2]);
        let t = dinkelbach_solve(&f, &f, &mut inner, &[1.0, 2.0], Sense::Min, DinkelbachOptions::default())
            .unwrap();
        assert_eq!(t.iterates.len(), 2);
        assert_eq!(t.final_ratio(), 1.0);
    }

    #[test]
    fn dinkelbach_independence_p3() {
        let g = Graph::path(3);
        let g1 = g.clone();
        let f = SetFunction::from_fn(3, move |s| s.len() as f64 - g1.inner_weight(s)).unwrap();
        let one = SetFunction::constant(3, 1.0).unwrap();
        let start = SetArg::Set(SubsetId::from_elems(&[1]));
        let (t, _) = dinkelbach_set_ratio(
            &f,
            &one,
            &FeasibleDomain::all(),
            Sense::Max,
            &start,
            DinkelbachOptions::default(),
        )
        .unwrap();
        assert_eq!(t.final_ratio(), 2.0);
        assert!(t.is_monotone(Sense::Max, 0.0));
    }

    #[test]
    fn ipsd_maxcut_k3() {
        let g = Graph::complete(3);
        let p = maxcut_problem(&g);
        let x0 = [1.0, -1.0, -1.0];
        for opts in [IpsdOptions::exact_ball(), IpsdOptions::default()] {
            let t = ipsd_solve(&p, &x0, opts).unwrap();
            assert!(t.is_monotone(Sense::Max, 1e-12));
            let (arg, v) = extract_best_settuple(&p, t.final_point()).unwrap();
            assert_eq!(v, 2.0, "{arg}");
            assert!((t.final_ratio() - 2.0).abs() < 1e-9);
            assert!(t.eigen_residual.unwrap() <= 1e-6);
        }
    }

    #[test]
    fn ipsd_maxcut_improves_bad_start() {
        let g = Graph::cycle(6);
        let p = maxcut_problem(&g);
        let x0 = [1.0, 1.0, 1.0, -1.0, -1.0, -1.0];
        let t = ipsd_solve(&p, &x0, IpsdOptions::exact_ball()).unwrap();
        assert!(t.is_monotone(Sense::Max, 1e-12));
        let (_, v) = extract_best_settuple(&p, t.final_point()).unwrap();
        assert!(v >= 2.0);
        assert!(t.final_ratio() >= t.iterates[0].r);
    }

    #[test]
    fn ipsd_cheeger_p3_matches_enumeration() {
        let g = Graph::path(3);
        let g1 = g.clone();
        let f = SetFunction::from_fn(3, move |s| g1.cut(s)).unwrap();
        let g2 = g.clone();
        let den = SetFunction::from_fn(3, move |s| g2.vol(s).min(g2.vol(s.complement(3)))).unwrap();
        let p = RatioProblem::from_set_functions(&f, &den, FeasibleDomain::all(), Sense::Min).unwrap();
        let t = ipsd_solve(&p, &[1.0, 0.0, 0.0], IpsdOptions::exact_ball()).unwrap();
        let (_, v) = extract_best_settuple(&p, t.final_point()).unwrap();
        let h = crate::oracle::cheeger_constant(&g).unwrap();
        assert_eq!(v, h);
        assert!(t.eigen_residual.unwrap() <= 1e-6);
    }

    #[test]
    fn ipsd_start_at_optimum_is_constant() {
        let g = Graph::complete(4);
        let p = maxcut_problem(&g);
        let t = ipsd_solve(&p, &[1.0, 1.0, -1.0, -1.0], IpsdOptions::exact_ball()).unwrap();
        assert!(t.iterates.iter().all(|i| (i.r - 4.0).abs() < 1e-12));
    }

    #[test]
    fn generalized_matches_plain_when_positive() {
        let g = Graph::path(4);
        let f = {
            let g1 = g.clone();
            SetFunction::from_fn(4, move |s| g1.cut(s)).unwrap()
        };
        let den = SetFunction::from_fn(4, |s| (s.len().min(4 - s.len())) as f64).unwrap();
        let p = RatioProblem::from_set_functions(&f, &den, FeasibleDomain::all(), Sense::Min).unwrap();
        let x0 = [1.0, 0.5, -0.25, 0.0];
        let a = ipsd_solve(&p, &x0, IpsdOptions::exact_ball()).unwrap();
        let b = ipsd_solve_generalized(&p, &x0, IpsdOptions::exact_ball()).unwrap();
        assert_eq!(a.iterates, b.iterates);
    }

    #[test]
    fn generalized_handles_negative_numerator() {
        let sg = Graph::new_signed(3, [(0, 1, 1.0, -1), (1, 2, 1.0, -1), (0, 2, 1.0, -1)]).unwrap();
        let pos: Vec<_> = sg.edges().iter().filter(|e| e.sign > 0).map(|e| (e.u, e.v, e.w)).collect();
        let neg: Vec<_> = sg.edges().iter().filter(|e| e.sign < 0).map(|e| (e.u, e.v, e.w)).collect();
        let p = RatioProblem::new(
            ConvexComponent::edge_differences(3, &pos).unwrap(),
            ConvexComponent::edge_differences(3, &neg).unwrap(),
            ConvexComponent::linf(3, 2.0).unwrap(),
            ConvexComponent::zero(3),
            Sense::Min,
        )
        .unwrap();
        let t = ipsd_solve_generalized(&p, &[1.0, 0.0, 0.0], IpsdOptions::exact_ball()).unwrap();
        assert!(t.is_monotone(Sense::Min, 1e-12));
        assert_eq!(t.termination, Termination::Converged);
        assert_eq!(3.0 + t.final_ratio(), frustration_index(&sg).unwrap());
    }

    #[test]
    fn inner_linear_on_cube_hits_vertex() {
        let obj = InnerObjective {
            parts: vec![],
            linear: vec![1.0, -2.0, 0.5],
            prox: 0.0,
            center: vec![0.0; 3],
        };
        let r = inner_convex_solve(&obj, Region::Box(1.0), InnerOptions::default()).unwrap();
        assert_eq!(r.x, vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn inner_pl_minimum_zero() {
        let l1 = ConvexComponent::weighted_l1(&[1.0, 1.0]).unwrap();
        let obj = InnerObjective {
            parts: vec![(1.0, l1)],
            linear: vec![0.5, 0.5],
            prox: 0.0,
            center: vec![0.7, -0.3],
        };
        let r = inner_convex_solve(&obj, Region::Box(1.0), InnerOptions::default()).unwrap();
        assert!(r.value <= 1e-6 && r.value >= 0.0);
    }

    #[test]
    fn inner_prox_matches_piece_enumeration() {
        // 2D: |x1 - x2| + 0.5 ||x||_inf - <(1, 0), x> + ||x - y||^2, y = (0.3, -0.1)
        let diff = ConvexComponent::edge_differences(2, &[(0, 1, 1.0)]).unwrap();
        let linf = ConvexComponent::linf(2, 0.5).unwrap();
        let obj = InnerObjective {
            parts: vec![(1.0, diff), (1.0, linf)],
            linear: vec![1.0, 0.0],
            prox: 1.0,
            center: vec![0.3, -0.1],
        };
        let r = inner_convex_solve(&obj, Region::Free, InnerOptions::default()).unwrap();
        assert!(r.exact);
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        let steps = 2000;
        for i in 0..=steps {
            for j in 0..=steps {
                let p = [-1.0 + 2.0 * i as f64 / steps as f64, -1.0 + 2.0 * j as f64 / steps as f64];
                let v = obj.value(&p);
                if v < best.0 {
                    best = (v, p);
                }
            }
        }
        let dist = ((r.x[0] - best.1[0]).powi(2) + (r.x[1] - best.1[1]).powi(2)).sqrt();
        assert!(dist <= 2e-3, "{:?} vs {:?}", r.x, best.1);
        assert!(r.value <= best.0 + 1e-12);
    }

    #[test]
    fn inverse_power_identity_pair_fixed() {
        let f = ConvexComponent::squared_l2(2);
        let x0 = [0.6, 0.8];
        let (x, r) = inverse_power_step_normalized(&f, &f, &x0, 1.0, 1.0).unwrap();
        assert_eq!(r, 1.0);
        assert!((x[0] - 0.6).abs() < 1e-15 && (x[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn inverse_power_laplacian_p3() {
        let l = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        let f = ConvexComponent::quadratic(l.clone()).unwrap();
        let g = ConvexComponent::squared_l2(3);
        let x0 = [0.9, 0.2, -1.1];
        let t = inverse_power_iterate(&f, &g, &x0, 60, &mut |_| 1.0).unwrap();
        assert!(t.is_monotone(Sense::Min, 1e-12));
        let x = DVector::from_column_slice(t.final_point());
        let r = t.final_ratio();
        assert!((&l * &x - &x * r).norm() <= 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t2 = inverse_power_iterate(&f, &g, &x0, 60, &mut |_| rng.gen_range(0.5..2.0)).unwrap();
        assert!((t2.final_ratio() - r).abs() < 1e-9);
    }

    #[test]
    fn extraction_on_indicator_and_threshold_scan() {
        let g = Graph::path(3);
        let (f, c) = cut_pair(&g);
        let fam = FeasibleDomain::new("A,B nonempty", |a| match a {
            SetArg::Pair(p) => !p.pos.is_empty() && !p.neg.is_empty(),
            _ => false,
        });
        let p = RatioProblem::new(
            ConvexComponent::edge_differences(3, &edge_list(&g)).unwrap(),
            ConvexComponent::zero(3),
            ConvexComponent::linf(3, 2.0).unwrap(),
            ConvexComponent::zero(3),
            Sense::Min,
        )
        .unwrap()
        .with_discrete(f, c, fam);
        let (a, v) = extract_best_settuple(&p, &[1.0, 0.2, -1.0]).unwrap();
        assert_eq!(v, 1.0, "{a}");
        let (_, v) = extract_best_settuple(&p, &[1.0, -1.0, -1.0]).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn components_are_homogeneous_and_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let comps = vec![
            ConvexComponent::edge_differences(4, &[(0, 1, 1.0), (2, 3, 2.0)]).unwrap(),
            ConvexComponent::edge_sums(4, &[(0, 2, 1.0)]).unwrap(),
            ConvexComponent::linf(4, 2.0).unwrap(),
            ConvexComponent::range(4),
            ConvexComponent::abs_power("p", 4, vec![AbsTerm { coefs: vec![(0, 1.0), (3, -1.0)], weight: 1.0 }], 2.0)
                .unwrap(),
            ConvexComponent::linf_power(4, 2.0, 3.0).unwrap(),
        ];
        for c in comps {
            assert!(c.check_homogeneity(&mut rng, 50), "{}", c.name());
            assert!(c.check_subgradient_inequality(&mut rng, 200), "{}", c.name());
        }
    }

    #[test]
    fn recursive_frustration() {
        let neg = Graph::new_signed(3, [(0, 1, 1.0, -1), (1, 2, 1.0, -1), (0, 2, 1.0, -1)]).unwrap();
        let r = frustration_recursive(&neg, FrustrationOptions::default()).unwrap();
        assert_eq!(r.frustrated, 1.0);
        let bal = Graph::new_signed(4, [(0, 1, 1.0, 1), (1, 2, 1.0, -1), (2, 3, 1.0, -1), (0, 3, 1.0, 1)]).unwrap();
        let r = frustration_recursive(&bal, FrustrationOptions::default()).unwrap();
        assert_eq!(r.frustrated, 0.0);
    }
}
