//! Invariant suites shared by `lovx check` and the acceptance target.

use lovx_core::graphcat::{close, standard_catalog, FormKind};
use lovx_core::lovasz::{
    closed_form, eval_disjoint_pair, eval_disjoint_pair_integral, eval_original,
    eval_original_integral, eval_original_mobius, extension_value, table_set_function,
};
use lovx_core::oracle::{check_reduction_identities, Identity};
use lovx_core::setfn::{is_bisubmodular, is_submodular, LatticeCheck};
use lovx_core::{DomainKind, Graph, SetFunction, TableEntry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

const MAX_REPORTED: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    /// First few counterexamples.
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            passed: true,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.passed = false;
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(what());
            }
        }
    }

    fn merge(&mut self, other: SuiteOutcome) {
        self.cases += other.cases;
        self.passed &= other.passed;
        for f in other.failures {
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(f);
            }
        }
    }
}

/// Point mixing a coarse grid with uniform values, so ties occur.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.4) {
                [-1.0, -0.5, 0.0, 0.5, 1.0][rng.gen_range(0..5)]
            } else {
                rng.gen_range(-1.0..1.0)
            }
        })
        .collect()
}

/// Integer table in `[lo, hi]`.
pub fn random_table<R: Rng + ?Sized>(rng: &mut R, size: usize, lo: i32, hi: i32) -> Vec<f64> {
    (0..size).map(|_| f64::from(rng.gen_range(lo..=hi))).collect()
}

/// Sum, integral and Moebius forms agree; pair sum and integral agree; one-block tuples match.
pub fn cross_form(functions: usize, points: usize, n: usize, seed: u64) -> SuiteOutcome {
    let parts: Vec<SuiteOutcome> = (0..functions)
        .into_par_iter()
        .map(|i| {
            let mut out = SuiteOutcome::new("cross-form");
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let f = SetFunction::from_table(n, random_table(&mut rng, 1 << n, -5, 5)).expect("table");
            let g = SetFunction::pair_from_table(n, random_table(&mut rng, 3usize.pow(n as u32), -5, 5))
                .expect("table");
            let (f1, g1) = (f.clone(), g.clone());
            let fk = SetFunction::kway_from_fn(n, 1, move |t| f1.set_value(t[0])).expect("kway");
            let gk = SetFunction::kway_pair_from_fn(n, 1, move |t| g1.pair_value(t[0])).expect("kway");
            for _ in 0..points {
                let x = random_point(&mut rng, n);
                let a = eval_original(&f, &x).expect("eval").value;
                let b = eval_original_integral(&f, &x).expect("eval");
                let c = eval_original_mobius(&f, &x).expect("eval");
                let d = extension_value(&fk, &x).expect("eval");
                out.record(close(a, b) && close(a, c) && close(a, d), || {
                    format!("function {i} at {x:?}: sum {a}, integral {b}, moebius {c}, one-block {d}")
                });
                let p = eval_disjoint_pair(&g, &x).expect("eval").value;
                let q = eval_disjoint_pair_integral(&g, &x).expect("eval");
                let r = extension_value(&gk, &x).expect("eval");
                out.record(close(p, q) && close(p, r), || {
                    format!("pair function {i} at {x:?}: sum {p}, integral {q}, one-block {r}")
                });
            }
            out
        })
        .collect();
    let mut out = SuiteOutcome::new("cross-form");
    parts.into_iter().for_each(|p| out.merge(p));
    out
}

/// Each closed form equals the generic extension of its set function.
pub fn tables(graphs: &[(&str, Graph)], points: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("tables");
    for (gi, (name, g)) in graphs.iter().enumerate() {
        for (ei, entry) in TableEntry::all().into_iter().enumerate() {
            let f = table_set_function(entry, g).expect("table entry");
            let cf = closed_form(entry, g);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((gi as u64) << 32) ^ ei as u64);
            for _ in 0..points {
                let x = random_point(&mut rng, g.n());
                let a = cf.eval(&x);
                let b = extension_value(&f, &x).expect("eval");
                out.record(close(a, b), || {
                    format!("{} on {name} at {x:?}: closed {a}, generic {b}", entry.name())
                });
            }
        }
    }
    out
}

/// Reduction and box identities on random positive instances.
pub fn identities(instances: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("identities");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let f = SetFunction::from_table(4, random_table(&mut rng, 16, 0, 6)).expect("table");
        let g = SetFunction::from_table(4, random_table(&mut rng, 16, 1, 6)).expect("table");
        let fp = SetFunction::pair_from_table(2, random_table(&mut rng, 9, 0, 6)).expect("table");
        let gp = SetFunction::pair_from_table(2, random_table(&mut rng, 9, 1, 6)).expect("table");
        let a = f64::from(rng.gen_range(1..4));
        let b = f64::from(rng.gen_range(1..4));
        let checks = [
            ("one-to-two", check_reduction_identities(&f, &g, Identity::OneToTwo)),
            ("one-to-three", check_reduction_identities(&f, &g, Identity::OneToK(3))),
            ("box", check_reduction_identities(&f, &g, Identity::Box { a: -a, b })),
            ("two-to-two", check_reduction_identities(&fp, &gp, Identity::TwoToK(2))),
        ];
        for (name, r) in checks {
            out.record(matches!(&r, Ok(c) if c.holds), || format!("instance {i} {name}: {r:?}"));
        }
    }
    out
}

/// Discrete optimum equals the best indicator value and random admissible points never beat it.
pub fn discrete(graphs: &[Graph], samples: usize, seed: u64) -> SuiteOutcome {
    let parts: Vec<SuiteOutcome> = graphs
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut out = SuiteOutcome::new("discrete");
            let catalog = match standard_catalog(g, seed ^ gi as u64) {
                Ok(c) => c,
                Err(e) => {
                    out.record(false, || format!("graph {gi}: {e}"));
                    return out;
                }
            };
            for p in catalog {
                let opt = match p.discrete_optimum() {
                    Ok(r) => r.optimum,
                    Err(e) => {
                        out.record(false, || format!("graph {gi} {}: {e}", p.id));
                        continue;
                    }
                };
                for form in &p.forms {
                    let tag = || format!("graph {gi} {} form {}", p.id, form.name);
                    if form.indicator_exact {
                        let bad = p.indicator_mismatches(form).expect("feasible args");
                        out.record(bad.is_empty(), || format!("{}: mismatch {:?}", tag(), bad[0]));
                    }
                    let best = p.best_indicator_value(form).expect("feasible args").map(|b| b.1);
                    out.record(best.is_some_and(|b| close(b, opt)), || {
                        format!("{}: best indicator {best:?}, optimum {opt}", tag())
                    });
                    if form.kind == FormKind::Exact {
                        let seed = seed.wrapping_mul(31).wrapping_add(gi as u64);
                        let r = p.random_check(form, opt, samples, seed).expect("sampling");
                        out.record(r.violations.is_empty(), || {
                            format!("{}: point {:?} beats {opt}", tag(), r.violations[0])
                        });
                    }
                }
            }
            out
        })
        .collect();
    let mut out = SuiteOutcome::new("discrete");
    parts.into_iter().for_each(|p| out.merge(p));
    out
}

/// Lattice property claimed for a user table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Submodular,
    Bisubmodular,
}

/// Indicator exactness and cross-form agreement for a table, plus an optional lattice claim.
pub fn table_file(f: &SetFunction, expect: Option<Expectation>, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("table");
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let x = random_point(&mut rng, n);
        let (a, b) = match f.kind() {
            DomainKind::Powerset => (
                eval_original(f, &x).expect("eval").value,
                eval_original_integral(f, &x).expect("eval"),
            ),
            _ => (
                eval_disjoint_pair(f, &x).expect("eval").value,
                eval_disjoint_pair_integral(f, &x).expect("eval"),
            ),
        };
        out.record(close(a, b), || format!("at {x:?}: sum {a}, integral {b}"));
    }
    let report = |c: LatticeCheck, what: &str, out: &mut SuiteOutcome| {
        out.record(c.holds, || match &c.witness {
            Some((a, b)) => format!("not {what}: witness ({a}, {b}) with gap {}", c.gap),
            None => format!("not {what}"),
        });
    };
    match expect {
        Some(Expectation::Submodular) => match is_submodular(f) {
            Ok(c) => report(c, "submodular", &mut out),
            Err(e) => out.record(false, || e.to_string()),
        },
        Some(Expectation::Bisubmodular) => match is_bisubmodular(f) {
            Ok(c) => report(c, "bisubmodular", &mut out),
            Err(e) => out.record(false, || e.to_string()),
        },
        None => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(cross_form(3, 20, 3, 1).passed);
        assert!(identities(2, 1).passed);
        let t = tables(&[("k3", Graph::complete(3))], 10, 1);
        assert!(t.passed, "{:?}", t.failures);
    }

    #[test]
    fn planted_violation_is_reported() {
        let f = SetFunction::from_table(2, vec![0.0, 1.0, 1.0, 3.0]).unwrap();
        let out = table_file(&f, Some(Expectation::Submodular), 0);
        assert!(!out.passed);
        assert!(out.failures[0].contains("witness"));
    }
}
