//! Invariants over random small complexes and functions.

use hdx_core::calculus::globalness;
use hdx_core::decomposition::es_all;
use hdx_core::generators::{
    gen_eta_correlated, gen_function, gen_perturbed_product, gen_product, gen_sparse_random, FnKind, FnSpec, GenSpec,
    Marginals, MeasureKind,
};
use hdx_core::operators::{avg, check_avg_contraction, check_avg_intersection, opnorm_perp};
use hdx_core::walks::{noise_direct, updown_direct};
use hdx_core::{Fn, Subset, WeightedComplex};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = WeightedComplex> {
    (prop::collection::vec(2usize..=3, 2..=4), 0u8..4, any::<u64>(), 0.0f64..0.9).prop_map(|(sizes, kind, seed, t)| {
        match kind {
            0 => gen_product(&sizes, &Marginals::Random, seed).unwrap(),
            1 => gen_perturbed_product(&sizes, t * 0.3, seed).unwrap(),
            2 => gen_sparse_random(&sizes, 0.3 + 0.6 * t, seed).unwrap(),
            _ => gen_eta_correlated(t).unwrap(),
        }
    })
}

fn with_fn() -> impl Strategy<Value = (WeightedComplex, Fn)> {
    (complex(), any::<u64>(), any::<bool>()).prop_map(|(mu, seed, boolean)| {
        let kind = if boolean { FnKind::RandomBoolean { p: 0.4 } } else { FnKind::RandomLowDegree { d: mu.k() } };
        let f = gen_function(&mu, &FnSpec::new(kind, seed)).unwrap();
        (mu, f)
    })
}

fn close(a: &Fn, b: &Fn, scale: f64) -> bool {
    a.max_abs_diff(b).unwrap() <= 1e-9 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn components_sum_to_the_function((mu, f) in with_fn()) {
        let fam = es_all(&mu, &f).unwrap();
        prop_assert!(close(&fam.reconstruct(&mu).unwrap(), &f, mu.norm_inf(&f)));
    }

    #[test]
    fn averages_are_sums_of_inner_components((mu, f) in with_fn(), bits in any::<u32>()) {
        let k = mu.k();
        let s = Subset::from_bits(bits & ((1 << k) - 1));
        let fam = es_all(&mu, &f).unwrap();
        let inside = fam.filter(|t| t.is_subset_of(s)).reconstruct(&mu).unwrap();
        let want = mu.lift(&avg(&mu, &f, s).unwrap()).unwrap();
        prop_assert!(close(&inside, &want, mu.norm_inf(&f)));
    }

    #[test]
    fn averaging_contracts((mu, f) in with_fn(), bits in any::<u32>()) {
        let t = Subset::from_bits(bits & ((1 << mu.k()) - 1));
        for r in check_avg_contraction(&mu, &f, t).unwrap() {
            prop_assert!(r.passed(), "{:?}", r);
        }
        prop_assert!(check_avg_intersection(&mu, &f, t, 0.0).unwrap().lhs.is_finite());
    }

    #[test]
    fn averaging_twice_onto_nested_sets((mu, f) in with_fn(), a in any::<u32>(), b in any::<u32>()) {
        let full = (1 << mu.k()) - 1;
        let outer = Subset::from_bits(a & full);
        let inner = Subset::from_bits(a & b & full);
        let twice = avg(&mu, &avg(&mu, &f, outer).unwrap(), inner).unwrap();
        prop_assert!(close(&twice, &avg(&mu, &f, inner).unwrap(), mu.norm_inf(&f)));
    }

    #[test]
    fn marginal_of_marginal((mu, _f) in with_fn(), a in any::<u32>(), b in any::<u32>()) {
        let full = (1 << mu.k()) - 1;
        let s = Subset::from_bits(a & full);
        let t = Subset::from_bits(a & b & full);
        let direct = mu.marginal(t);
        let total: f64 = direct.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let via = mu.marginal_complex(s);
        let idx: Vec<usize> = s.iter().collect();
        let inner = Subset::from_indices(t.iter().map(|i| idx.iter().position(|&j| j == i).unwrap()));
        let got = via.marginal(inner);
        for (x, y) in got.weights().iter().zip(direct.weights()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn norms_are_ordered((mu, f) in with_fn()) {
        let n2 = mu.norm2(&f);
        let n4 = mu.norm4_pow4(&f).powf(0.25);
        let ninf = mu.norm_inf(&f);
        prop_assert!(n2 <= n4 * (1.0 + 1e-12) + 1e-15);
        prop_assert!(n4 <= ninf * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn averaging_preserves_expectation_and_is_self_adjoint((mu, f) in with_fn(), seed in any::<u64>(), bits in any::<u32>()) {
        let t = Subset::from_bits(bits & ((1 << mu.k()) - 1));
        let g = gen_function(&mu, &FnSpec::new(FnKind::RandomLowDegree { d: mu.k() }, seed)).unwrap();
        let af = mu.lift(&avg(&mu, &f, t).unwrap()).unwrap();
        let ag = mu.lift(&avg(&mu, &g, t).unwrap()).unwrap();
        prop_assert!((mu.expectation(&af).unwrap() - mu.expectation(&f).unwrap()).abs() < 1e-12);
        let lhs = mu.inner(&af, &g).unwrap();
        let rhs = mu.inner(&f, &ag).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn deflated_norm_is_symmetric((mu, _f) in with_fn(), a in any::<u32>(), b in any::<u32>()) {
        let full = (1 << mu.k()) - 1;
        let s = Subset::from_bits(a & full);
        let t = Subset::from_bits(b & full);
        let st = opnorm_perp(&mu, s, t);
        prop_assert!((st - opnorm_perp(&mu, t, s)).abs() < 1e-10);
        prop_assert!(st <= 1.0 + 1e-10);
    }

    #[test]
    fn globalness_grows_with_degree((mu, f) in with_fn()) {
        let mut prev = 0.0;
        for d in 0..=mu.k() {
            let g = globalness(&mu, &f, d).unwrap().delta_min;
            prop_assert!(g >= prev - 1e-12);
            prev = g;
        }
        prop_assert!((globalness(&mu, &f, 0).unwrap().delta_min - mu.norm2(&f)).abs() < 1e-12);
    }

    #[test]
    fn walks_contract_and_are_positive((mu, f) in with_fn(), rho in 0.0f64..=1.0) {
        let n = mu.norm2(&f);
        for g in [noise_direct(&mu, &f, rho).unwrap(), updown_direct(&mu, &f).unwrap()] {
            prop_assert!(mu.norm2(&g) <= n * (1.0 + 1e-12) + 1e-15);
            prop_assert!(mu.inner(&f.sub(&g).unwrap(), &f).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn generators_are_deterministic(sizes in prop::collection::vec(2usize..=4, 2..=4), seed in any::<u64>(), gamma in 0.0f64..0.3) {
        let spec = GenSpec::new(MeasureKind::PerturbedProduct { sizes, gamma }, seed);
        prop_assert_eq!(spec.build().unwrap().to_json(), spec.build().unwrap().to_json());
        let mu = spec.build().unwrap();
        let fs = FnSpec::new(FnKind::RandomBoolean { p: 0.3 }, seed);
        let (a, b) = (fs.build(&mu).unwrap(), fs.build(&mu).unwrap());
        prop_assert_eq!(a.values(), b.values());
    }
}
