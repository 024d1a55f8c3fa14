//! Fourth-moment bounds: product-space hypercontractivity and its ε-product analogues.

use crate::calculus::{
    globalness, influence_profile_from, laplacian_from_family, laplacian_trunc_from_family, require_global,
    InfluenceProfile,
};
use crate::check::{ids, CheckRecord};
use crate::decomposition::{es_all, EfronSteinFamily};
use crate::error::Result;
use crate::measure::{Fn, WeightedComplex};
use crate::numeric::{pairwise_sum, powu};
use crate::subset::Subset;

fn profiles(mu: &WeightedComplex, family: &EfronSteinFamily, d: usize) -> Result<Vec<InfluenceProfile>> {
    Subset::up_to_size(mu.k(), d).into_iter().map(|s| influence_profile_from(mu, family, s, d)).collect()
}

fn weighted_total(
    ps: &[InfluenceProfile],
    weight: impl std::ops::Fn(usize) -> f64,
    value: impl std::ops::Fn(&InfluenceProfile) -> f64,
) -> f64 {
    let terms: Vec<f64> = ps.iter().map(|p| weight(p.subset.len()) * value(p)).collect();
    pairwise_sum(&terms)
}

/// Product-space bounds for the degree-`d` part `g = f^{≤d}`.
///
/// * `‖g‖₄⁴ ≤ 2·9^d Σ_{|T|≤d} (9d)^{|T|} E I_T[g]²`
/// * `‖g‖₄⁴ ≤ 1000^d Σ_S E I_S[g]²`
/// * `Σ_S E I_S[g] ≤ 2^d ‖g‖₂²`
/// * `‖g‖₄⁴ ≤ δ_I 2000^d ‖g‖₂²` with `δ_I = max_{|S|≤d, x} I_{S,x}[g]`
/// * `½‖g‖₄⁴ ≤ 9^d ‖g‖₂⁴ + Σ_{T≠∅} (4d)^{|T|} ‖L_T g‖₄⁴`
///
/// All are exact statements on product measures; off-product they are reported.
pub fn check_product_hypercontractivity(
    mu: &WeightedComplex,
    f: &Fn,
    d: usize,
    eps: f64,
    ceiling: f64,
) -> Result<Vec<CheckRecord>> {
    let g = es_all(mu, f)?.low_degree(mu, d)?;
    let family = es_all(mu, &g)?;
    let ps = profiles(mu, &family, d)?;
    let df = d as f64;
    let l4 = mu.norm4_pow4(&g);
    let l2 = mu.norm2_sq(&g);
    let rec = |name: &str, lhs: f64, rhs: f64| {
        CheckRecord::tracked(ids::PRODUCT_HYPERCONTRACTIVITY, lhs, rhs, 0.0, eps, ceiling)
            .detail(format!("{name} d={d}"))
    };
    let mut out = Vec::new();
    out.push(rec(
        "4-norm via squared influences",
        l4,
        2.0 * powu(9.0, d) * weighted_total(&ps, |t| powu(9.0 * df, t), |p| p.mean_sq),
    ));
    out.push(rec(
        "4-norm via influences, constant 1000^d",
        l4,
        powu(1000.0, d) * weighted_total(&ps, |_| 1.0, |p| p.mean_sq),
    ));
    out.push(rec("sum of influences", weighted_total(&ps, |_| 1.0, |p| p.mean), powu(2.0, d) * l2));
    let delta_i = ps.iter().fold(0.0f64, |m, p| m.max(p.max));
    out.push(rec("4-norm of influence-global", l4, delta_i * powu(2000.0, d) * l2));
    let mut lap_terms = Vec::new();
    for t in Subset::all(mu.k()).filter(|t| !t.is_empty()) {
        lap_terms.push(powu(4.0 * df, t.len()) * mu.norm4_pow4(&laplacian_from_family(mu, &family, t)?));
    }
    out.push(rec("inductive 4-norm", 0.5 * l4, powu(9.0, d) * l2 * l2 + pairwise_sum(&lap_terms)));
    Ok(out)
}

/// Influence and restriction globalness agree up to `4^r` on products.
///
/// With `R = max_{|S|≤r,x} ‖f(x,·)‖₂²` and `I = max_{|S|≤r,x} I_{S,x}[f]`:
/// `R ≤ 4^r I` and `I ≤ 4^r R`.
pub fn check_globalness_equivalence(
    mu: &WeightedComplex,
    f: &Fn,
    r: usize,
    eps: f64,
    ceiling: f64,
) -> Result<Vec<CheckRecord>> {
    let restr = globalness(mu, f, r)?.delta_min.powi(2);
    let family = es_all(mu, f)?;
    let infl = profiles(mu, &family, r)?.iter().fold(0.0f64, |m, p| m.max(p.max));
    let c = powu(4.0, r);
    let rec = |name: &str, lhs: f64, rhs: f64| {
        CheckRecord::tracked(ids::PRODUCT_HYPERCONTRACTIVITY, lhs, rhs, 0.0, eps, ceiling)
            .detail(format!("{name} r={r}"))
    };
    Ok(vec![
        rec("restriction from influence globalness", restr, c * infl),
        rec("influence from restriction globalness", infl, c * restr),
    ])
}

/// `‖g‖₄ ≤ √3^d ‖g‖₂` for `g = f^{≤d}` on the uniform cube.
pub fn check_bonami(mu: &WeightedComplex, f: &Fn, d: usize) -> Result<CheckRecord> {
    let g = es_all(mu, f)?.low_degree(mu, d)?;
    let lhs = mu.norm4_pow4(&g).powf(0.25);
    let rhs = 3f64.sqrt().powi(d as i32) * mu.norm2(&g);
    Ok(CheckRecord::hard(ids::PRODUCT_HYPERCONTRACTIVITY, lhs, rhs).detail(format!("cube 4-norm d={d}")))
}

/// Fourth-moment bounds for `f^{≤d}` on ε-product measures.
///
/// * `‖f^{≤d}‖₄⁴ ≤ 20^d Σ_{|S|≤d} (4d)^{|S|} E (I^{≤d}_S)²`, residual shape `ε²‖f‖₂²‖f‖∞²`
///
/// and, when `f` is `(d, δ)`-global,
///
/// * the same with `20^{d+1}`, shape `ε²δ²‖f‖₂²`
/// * `‖f^{≤d}‖₄⁴ ≤ (100d)^d δ² ‖f^{≤d}‖₂²`, shape `δ²ε²‖f‖₂²`
/// * `½‖f^{≤d}‖₄⁴ ≤ 9^d‖f^{≤d}‖₂⁴ + 4Σ_{0<|T|≤d} (4d)^{|T|}‖L^{≤d}_T f‖₄⁴`, shape `ε‖f‖₂²‖f‖∞²`
pub fn check_hdx_hypercontractivity(
    mu: &WeightedComplex,
    f: &Fn,
    d: usize,
    delta: Option<f64>,
    eps: f64,
    ceiling: f64,
) -> Result<Vec<CheckRecord>> {
    let full = mu.lift(f)?;
    let family = es_all(mu, &full)?;
    let low = family.low_degree(mu, d)?;
    let ps = profiles(mu, &family, d)?;
    let df = d as f64;
    let l4 = mu.norm4_pow4(&low);
    let l2 = mu.norm2_sq(&low);
    let (f2, finf2) = (mu.norm2_sq(&full), mu.norm_inf(&full).powi(2));
    let main = weighted_total(&ps, |s| powu(4.0 * df, s), |p| p.mean_sq_trunc);
    let rec = |name: &str, lhs: f64, rhs: f64, shape: f64| {
        CheckRecord::tracked(ids::HDX_HYPERCONTRACTIVITY, lhs, rhs, shape, eps, ceiling).detail(format!("{name} d={d}"))
    };
    let mut out = vec![rec("truncated influences 20^d", l4, powu(20.0, d) * main, eps * eps * f2 * finf2)];
    if let Some(delta) = delta {
        require_global(mu, &full, d, delta)?;
        let dd = delta * delta;
        out.push(rec("truncated influences 20^(d+1)", l4, powu(20.0, d + 1) * main, eps * eps * dd * f2));
        out.push(rec("global 4-norm", l4, powu(100.0 * df, d) * dd * l2, dd * eps * eps * f2));
        let mut lap_terms = Vec::new();
        for t in Subset::up_to_size(mu.k(), d).into_iter().filter(|t| !t.is_empty()) {
            lap_terms.push(powu(4.0 * df, t.len()) * mu.norm4_pow4(&laplacian_trunc_from_family(mu, &family, t, d)?));
        }
        out.push(rec(
            "inductive truncated 4-norm",
            0.5 * l4,
            powu(9.0, d) * l2 * l2 + 4.0 * pairwise_sum(&lap_terms),
            eps * f2 * finf2,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_function, gen_product, FnKind, FnSpec, Marginals};

    #[test]
    fn product_bounds_hold_on_random_low_degree() {
        let mu = gen_product(&[3, 2, 3], &Marginals::Random, 4).unwrap();
        for d in 0..=3 {
            let f = gen_function(&mu, &FnSpec::new(FnKind::RandomLowDegree { d }, 9)).unwrap();
            for r in check_product_hypercontractivity(&mu, &f, d, 0.0, 1.0).unwrap() {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn bonami_on_cube() {
        let mu = gen_product(&[2, 2, 2, 2], &Marginals::Uniform, 0).unwrap();
        let f = gen_function(&mu, &FnSpec::new(FnKind::RandomLowDegree { d: 2 }, 1)).unwrap();
        assert!(check_bonami(&mu, &f, 2).unwrap().passed());
    }
}
