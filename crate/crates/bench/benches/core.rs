use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lovx_core::fracprog::{ipsd_solve, IpsdOptions};
use lovx_core::graph::{read_graph, GraphFormat};
use lovx_core::graphcat::{cheeger_cut, maxcut, random_graph};
use lovx_core::lovasz::{eval_disjoint_pair, eval_original, eval_original_mobius};
use lovx_core::{oracle, Graph, SetArg, SetFunction, SubsetId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_function(n: usize, pairs: bool, seed: u64) -> SetFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = if pairs { 3usize.pow(n as u32) } else { 1 << n };
    let mut table: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    table[0] = 0.0;
    if pairs {
        SetFunction::pair_from_table(n, table).unwrap()
    } else {
        SetFunction::from_table(n, table).unwrap()
    }
}

fn point(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn extensions(c: &mut Criterion) {
    let mut group = c.benchmark_group("extension");
    for n in [4, 8, 12] {
        let f = random_function(n, false, 1);
        let x = point(n, 2);
        group.bench_with_input(BenchmarkId::new("chain", n), &n, |b, _| {
            b.iter(|| eval_original(black_box(&f), black_box(&x)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("mobius", n), &n, |b, _| {
            b.iter(|| eval_original_mobius(black_box(&f), black_box(&x)).unwrap())
        });
    }
    for n in [4, 8] {
        let f = random_function(n, true, 3);
        let x = point(n, 4);
        group.bench_with_input(BenchmarkId::new("disjoint_pair", n), &n, |b, _| {
            b.iter(|| eval_disjoint_pair(black_box(&f), black_box(&x)).unwrap())
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    let petersen = Graph::petersen();
    group.bench_function("max_cut/petersen", |b| b.iter(|| oracle::max_cut(black_box(&petersen)).unwrap()));
    group.bench_function("cheeger/petersen", |b| {
        b.iter(|| oracle::cheeger_constant(black_box(&petersen)).unwrap())
    });
    let g = random_graph(8, 0.5, 7);
    group.bench_function("chromatic/random8", |b| b.iter(|| oracle::chromatic_number(black_box(&g)).unwrap()));
    group.finish();
}

fn ipsd(c: &mut Criterion) {
    let mut group = c.benchmark_group("ipsd");
    group.sample_size(20);
    for (name, p) in [
        ("maxcut", maxcut(&Graph::petersen(), 1.0).unwrap()),
        ("cheeger", cheeger_cut(&random_graph(8, 0.4, 11)).unwrap()),
    ] {
        let w = p.solver_wiring().expect("wired");
        let n = p.n();
        let start = w.lift.apply(&SetArg::Set(SubsetId(0b1011)), n);
        let opts = IpsdOptions { verify_eigen: false, ..IpsdOptions::default() };
        group.bench_function(name, |b| b.iter(|| ipsd_solve(&w.problem, black_box(&start), opts).unwrap()));
    }
    group.finish();
}

fn parsing(c: &mut Criterion) {
    let g = random_graph(200, 0.05, 5);
    let text: String = g.edges().iter().map(|e| format!("{} {} {}\n", e.u, e.v, e.w)).collect();
    c.bench_function("parse/edge_list_200", |b| {
        b.iter(|| read_graph(black_box(&text), GraphFormat::EdgeList, 0).unwrap())
    });
}

criterion_group!(benches, extensions, oracles, ipsd, parsing);
criterion_main!(benches);
