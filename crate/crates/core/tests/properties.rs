use lovx_core::eigen::enumerate_eigenvalues;
use lovx_core::graphcat::{
    frustration_index, modularity_frustration_relation, random_graph, random_signed_graph,
    standard_catalog,
};
use lovx_core::lovasz::{
    eval_disjoint_pair, eval_disjoint_pair_integral, eval_original, eval_original_integral,
    eval_original_mobius, extension_value, subgradient_at,
};
use lovx_core::oracle::optimize_subsets;
use lovx_core::setfn::{
    all_pairs, all_subsets, decompose_difference_submodular, delta_submodularity_gap,
    is_submodular,
};
use lovx_core::{ExtensionKind, Sense, SetArg, SetFunction, SetPair, SubsetId};
use proptest::prelude::*;

const N: usize = 4;

fn table(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5i32..=5, 1usize << n)
        .prop_map(|v| v.into_iter().map(f64::from).collect())
}

fn pair_table(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5i32..=5, 3usize.pow(n as u32))
        .prop_map(|v| v.into_iter().map(f64::from).collect())
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![(-2i32..=2).prop_map(|v| f64::from(v) / 2.0), -1.0..1.0f64], n)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn empty_argument_is_zero(t in table(N), p in pair_table(N)) {
        let f = SetFunction::from_table(N, t).unwrap();
        let g = SetFunction::pair_from_table(N, p).unwrap();
        prop_assert_eq!(f.evaluate(&SetArg::Set(SubsetId::EMPTY)).unwrap(), 0.0);
        prop_assert_eq!(g.evaluate(&SetArg::Pair(SetPair::EMPTY)).unwrap(), 0.0);
    }

    #[test]
    fn submodularity_matches_gap_sign(t in table(N)) {
        let f = SetFunction::from_table(N, t).unwrap();
        let holds = is_submodular(&f).unwrap().holds;
        prop_assert_eq!(holds, delta_submodularity_gap(&f).unwrap() >= 0.0);
    }

    #[test]
    fn decomposition_is_exact(t in table(N)) {
        let f = SetFunction::from_table(N, t).unwrap();
        let d = decompose_difference_submodular(&f).unwrap();
        for a in all_subsets(N) {
            prop_assert_eq!(d.f1.set_value(a) - d.f2.set_value(a), f.set_value(a));
        }
        prop_assert!(is_submodular(&d.f1).unwrap().holds);
        prop_assert!(is_submodular(&d.f2).unwrap().holds);
    }

    #[test]
    fn pair_lattice_is_idempotent(a in 0usize..81, b in 0usize..81) {
        let (p, q) = (SetPair::from_code(a, N), SetPair::from_code(b, N));
        prop_assert_eq!(p.join(&p), p);
        prop_assert_eq!(p.meet(&p), p);
        let (j, m) = (p.join(&q), p.meet(&q));
        prop_assert!(j.pos.intersection(j.neg).is_empty());
        prop_assert!(m.pos.intersection(m.neg).is_empty());
    }

    #[test]
    fn extensions_are_homogeneous_and_scale(t in table(N), x in point(N), s in 0.0..3.0f64, c in -2.0..2.0f64) {
        let f = SetFunction::from_table(N, t).unwrap();
        let fx = extension_value(&f, &x).unwrap();
        let sx: Vec<f64> = x.iter().map(|v| s * v).collect();
        prop_assert!(close(extension_value(&f, &sx).unwrap(), s * fx));
        let cf = f.scale(c).unwrap();
        prop_assert!(close(extension_value(&cf, &x).unwrap(), c * fx));
    }

    #[test]
    fn original_extension_translates(t in table(N), x in point(N), s in -3.0..3.0f64) {
        let f = SetFunction::from_table(N, t).unwrap();
        let y: Vec<f64> = x.iter().map(|v| v + s).collect();
        let lhs = extension_value(&f, &y).unwrap();
        prop_assert!(close(lhs, extension_value(&f, &x).unwrap() + s * f.full_value()));
    }

    #[test]
    fn indicators_are_exact(t in table(N), p in pair_table(N)) {
        let f = SetFunction::from_table(N, t).unwrap();
        for a in all_subsets(N) {
            prop_assert_eq!(extension_value(&f, &a.indicator(N)).unwrap(), f.set_value(a));
        }
        let g = SetFunction::pair_from_table(N, p).unwrap();
        for a in all_pairs(N) {
            prop_assert_eq!(extension_value(&g, &a.indicator(N)).unwrap(), g.pair_value(a));
        }
    }

    #[test]
    fn lipschitz_bounds(t in table(N), x in point(N), y in point(N)) {
        let f = SetFunction::from_table(N, t).unwrap();
        let fmax = all_subsets(N).map(|a| f.set_value(a).abs()).fold(0.0, f64::max);
        let fsum: f64 = all_subsets(N).map(|a| f.set_value(a).abs()).sum();
        let diff = (extension_value(&f, &x).unwrap() - extension_value(&f, &y).unwrap()).abs();
        let l1: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        let linf = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(diff <= 2.0 * fmax * l1 + 1e-9);
        prop_assert!(diff <= 2.0 * fsum * linf + 1e-9);
    }

    #[test]
    fn symmetric_pairs_give_even_extensions(p in pair_table(N), x in point(N), odd in any::<bool>()) {
        let s = if odd { -1.0 } else { 1.0 };
        let raw = SetFunction::pair_from_table(N, p).unwrap();
        let r2 = raw.clone();
        let g = SetFunction::pair_from_fn(N, move |q| r2.pair_value(q) + s * r2.pair_value(q.swap())).unwrap();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert!(close(extension_value(&g, &neg).unwrap(), s * extension_value(&g, &x).unwrap()));
    }

    #[test]
    fn cross_forms_agree(t in table(N), p in pair_table(N), x in point(N)) {
        let f = SetFunction::from_table(N, t).unwrap();
        let v = eval_original(&f, &x).unwrap().value;
        prop_assert!(close(v, eval_original_integral(&f, &x).unwrap()));
        prop_assert!(close(v, eval_original_mobius(&f, &x).unwrap()));
        let g = SetFunction::pair_from_table(N, p).unwrap();
        let w = eval_disjoint_pair(&g, &x).unwrap().value;
        prop_assert!(close(w, eval_disjoint_pair_integral(&g, &x).unwrap()));
    }

    #[test]
    fn subgradient_euler_identity(t in table(N), p in pair_table(N), x in point(N)) {
        let f = SetFunction::from_table(N, t).unwrap();
        let s = subgradient_at(&f, ExtensionKind::Original, &x).unwrap();
        let dot: f64 = s.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!(close(dot, extension_value(&f, &x).unwrap()));
        prop_assert_eq!(s.iter().sum::<f64>(), f.full_value());
        let g = SetFunction::pair_from_table(N, p).unwrap();
        let s = subgradient_at(&g, ExtensionKind::DisjointPair, &x).unwrap();
        let dot: f64 = s.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!(close(dot, extension_value(&g, &x).unwrap()));
    }

    #[test]
    fn witnesses_reevaluate_and_bound_the_cube(t in table(N), x in prop::collection::vec(0.0..=1.0f64, N)) {
        let f = SetFunction::from_table(N, t).unwrap();
        let r = optimize_subsets(&f, None, Sense::Min, &|_| true).unwrap();
        for w in &r.witnesses {
            prop_assert_eq!(f.evaluate(w).unwrap(), r.optimum);
        }
        let m = r.optimum.min(0.0);
        prop_assert!(extension_value(&f, &x).unwrap() >= m - 1e-9);
    }

    #[test]
    fn original_pair_has_single_eigenvalue(t in table(3), c in prop::collection::vec(1i32..=4, 3)) {
        let f = SetFunction::from_table(3, t).unwrap();
        let g = SetFunction::modular(c.into_iter().map(f64::from).collect()).unwrap();
        let eig = enumerate_eigenvalues(&f, &g).unwrap();
        prop_assert!(eig.len() <= 1);
        if let Some((l, _)) = eig.first() {
            prop_assert!(close(*l, f.full_value() / g.full_value()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn catalog_indicator_agreement(n in 3usize..=5, seed in any::<u64>()) {
        let g = random_graph(n, 0.4, seed);
        for p in standard_catalog(&g, seed).unwrap() {
            for form in p.forms.iter().filter(|f| f.indicator_exact) {
                let bad = p.indicator_mismatches(form).unwrap();
                prop_assert!(bad.is_empty(), "{} {}: {:?}", p.id, form.name, bad.first());
            }
        }
    }

    #[test]
    fn switching_keeps_frustration(n in 3usize..=7, seed in any::<u64>(), v in 0usize..7) {
        let g = random_signed_graph(n, 0.5, 0.4, seed);
        let a = frustration_index(&g).unwrap().discrete_optimum().unwrap().optimum;
        let b = frustration_index(&g.switch_at(v % n)).unwrap().discrete_optimum().unwrap().optimum;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn modularity_frustration_relation_holds(n in 3usize..=7, seed in any::<u64>()) {
        let r = modularity_frustration_relation(&random_graph(n, 0.3, seed)).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }
}
