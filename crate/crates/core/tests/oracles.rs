//! Library results against the brute-force face-list oracles in `common`.

mod common;

use common::{face_values, max_diff, Table};
use hdx_core::calculus::{derivative_es_family, influence_profile, laplacian};
use hdx_core::decomposition::{es_all, es_component};
use hdx_core::generators::{
    gen_function, gen_perturbed_product, gen_product, gen_sparse_random, FnKind, FnSpec, Marginals,
};
use hdx_core::measure::PartiteUniverse;
use hdx_core::operators::{avg_lifted, certify_epsilon};
use hdx_core::{Subset, WeightedComplex};

fn instances() -> Vec<WeightedComplex> {
    vec![
        gen_product(&[3, 2, 2], &Marginals::Random, 5).unwrap(),
        common::eta(0.3),
        gen_perturbed_product(&[3, 3, 3], 0.1, 2).unwrap(),
        gen_perturbed_product(&[2, 2, 2, 2], 0.2, 7).unwrap(),
        gen_sparse_random(&[3, 3, 2], 0.5, 4).unwrap(),
    ]
}

fn random_fn(mu: &WeightedComplex, seed: u64) -> hdx_core::Fn {
    gen_function(mu, &FnSpec::new(FnKind::RandomLowDegree { d: mu.k() }, seed)).unwrap()
}

#[test]
fn averages_match_grouped_face_sums() {
    for mu in instances() {
        let table = Table::of(&mu);
        let f = random_fn(&mu, 3);
        let v = face_values(&mu, &f);
        for t in Subset::all(mu.k()) {
            let got = face_values(&mu, &avg_lifted(&mu, &f, t).unwrap());
            assert!(max_diff(&got, &table.cond(&v, t)) < 1e-12, "T={t}");
        }
    }
}

#[test]
fn components_match_alternating_face_sums() {
    for mu in instances() {
        let table = Table::of(&mu);
        let f = random_fn(&mu, 11);
        let v = face_values(&mu, &f);
        let family = es_all(&mu, &f).unwrap();
        for s in Subset::all(mu.k()) {
            let want = table.es(&v, s);
            assert!(max_diff(&face_values(&mu, family.get(s).unwrap()), &want) < 1e-12);
            assert!(max_diff(&face_values(&mu, &es_component(&mu, &f, s).unwrap()), &want) < 1e-12);
        }
    }
}

#[test]
fn certificate_matches_jacobi_eigenvalues() {
    for mu in instances() {
        let got = certify_epsilon(&mu).epsilon;
        // Squares are compared: a square root turns 1e-17 rounding into 1e-9.
        let want = Table::of(&mu).certificate_sq();
        assert!((got * got - want).abs() < 1e-12, "{got} vs sqrt({want})");
    }
}

#[test]
fn single_heavy_face_on_three_bits() {
    // Uniform bits with face (0,0,0) scaled by 1 + γ.
    let gamma = 0.3;
    let faces: Vec<Vec<u32>> = (0..8u32).map(|n| vec![n >> 2 & 1, n >> 1 & 1, n & 1]).collect();
    let masses: Vec<f64> = (0..8).map(|n| if n == 0 { 1.0 + gamma } else { 1.0 }).collect();
    let mu = WeightedComplex::from_masses(PartiteUniverse::with_sizes(&[2, 2, 2]).unwrap(), faces, masses).unwrap();
    let got = certify_epsilon(&mu).epsilon;
    assert!(got > 0.0);
    assert!((got * got - Table::of(&mu).certificate_sq()).abs() < 1e-12);
}

/// `f_S(x, ·)` as the `(S∖T)`-component of `D_{T,x} f` computed inside the materialized link.
#[test]
fn derivative_family_matches_link_components() {
    for mu in instances() {
        let table = Table::of(&mu);
        let k = mu.k();
        let f = random_fn(&mu, 21);
        for t in Subset::all(k) {
            let h = face_values(&mu, &laplacian(&mu, &f, t).unwrap());
            let w = derivative_es_family(&mu, &f, t).unwrap();
            for u in t.complement(k).subsets() {
                let s = t.union(u);
                let got = face_values(&mu, w.family.get(s).unwrap());
                let mut want = vec![0.0; got.len()];
                for x in table.points(t) {
                    let (idx, wts) = table.link(t, &x);
                    let link = Table { k, faces: idx.iter().map(|&n| table.faces[n].clone()).collect(), weights: wts };
                    let d: Vec<f64> = idx.iter().map(|&n| h[n]).collect();
                    // Inside the link the coordinates of T are constant, so conditioning
                    // on R ⊆ S∖T is conditioning on T ∪ R.
                    for (&n, v) in idx.iter().zip(link.es(&d, u)) {
                        want[n] = v;
                    }
                }
                assert!(max_diff(&got, &want) < 1e-12, "T={t} S={s}");
            }
        }
    }
}

#[test]
fn influence_is_squared_norm_of_restricted_laplacian() {
    for mu in instances() {
        let table = Table::of(&mu);
        let f = random_fn(&mu, 8);
        for s in Subset::up_to_size(mu.k(), 2) {
            let l = face_values(&mu, &laplacian(&mu, &f, s).unwrap());
            let prof = influence_profile(&mu, &f, s, mu.k()).unwrap();
            for row in &prof.rows {
                let (idx, w) = table.link(s, &row.point);
                let want: f64 = idx.iter().zip(&w).map(|(&n, wn)| wn * l[n] * l[n]).sum();
                assert!((row.influence - want).abs() < 1e-12);
                // d = k, so the truncation is vacuous.
                assert!((row.influence_trunc - want).abs() < 1e-12);
            }
        }
    }
}
