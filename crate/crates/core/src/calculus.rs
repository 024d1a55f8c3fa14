//! Laplacians, derivatives, influences and globalness.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::{ids, worst, CheckRecord};
use crate::decomposition::{es_all, validate_approx_es, ApproxESWitness, EfronSteinFamily};
use crate::error::{Error, Result};
use crate::measure::{Fn, PartialAssignment, Restriction, WeightedComplex};
use crate::numeric::{leq_tol, pairwise_sum, powu};
use crate::operators::{avg, avg_lifted, lifted_averages};
use crate::subset::Subset;

/// `L_S f = Σ_{T⊆S} (−1)^{|T|} A_{[k]∖T} f`, on the full support.
pub fn laplacian(mu: &WeightedComplex, f: &Fn, s: Subset) -> Result<Fn> {
    mu.check(f)?;
    let k = mu.k();
    let mut acc = vec![0.0; mu.len()];
    for t in s.subsets() {
        let g = avg_lifted(mu, f, t.complement(k))?;
        for (a, v) in acc.iter_mut().zip(g.values()) {
            *a += t.sign() * v;
        }
    }
    mu.function(mu.full(), acc)
}

/// `Σ_{T⊇S} lift(f^{=T})`.
pub fn laplacian_from_family(mu: &WeightedComplex, family: &EfronSteinFamily, s: Subset) -> Result<Fn> {
    family.sum_where(mu, |t| s.is_subset_of(t))
}

/// `L_S^{≤d} f = Σ_{T⊇S, |T|≤d} lift(f^{=T})`.
pub fn laplacian_trunc(mu: &WeightedComplex, f: &Fn, s: Subset, d: usize) -> Result<Fn> {
    laplacian_trunc_from_family(mu, &es_all(mu, f)?, s, d)
}

pub fn laplacian_trunc_from_family(mu: &WeightedComplex, family: &EfronSteinFamily, s: Subset, d: usize) -> Result<Fn> {
    if s.len() > d {
        return Err(Error::DegreeTooSmall { size: s.len(), degree: d });
    }
    family.sum_where(mu, |t| s.is_subset_of(t) && t.len() <= d)
}

/// `D_{S,x} f = L_S f (x, ·)` on the link at `x`.
pub fn derivative(mu: &WeightedComplex, f: &Fn, x: &PartialAssignment) -> Result<Restriction> {
    mu.restrict_fix(&laplacian(mu, f, x.subset)?, x)
}

/// `D^{≤d}_{S,x} f = L^{≤d}_S f (x, ·)` on the link at `x`.
pub fn derivative_trunc(mu: &WeightedComplex, f: &Fn, x: &PartialAssignment, d: usize) -> Result<Restriction> {
    mu.restrict_fix(&laplacian_trunc(mu, f, x.subset, d)?, x)
}

/// `I_{S,x} f = ‖D_{S,x} f‖²` in the link measure.
pub fn influence(mu: &WeightedComplex, f: &Fn, x: &PartialAssignment) -> Result<f64> {
    let r = derivative(mu, f, x)?;
    Ok(r.link.norm2_sq(&r.func))
}

pub fn influence_trunc(mu: &WeightedComplex, f: &Fn, x: &PartialAssignment, d: usize) -> Result<f64> {
    let r = derivative_trunc(mu, f, x, d)?;
    Ok(r.link.norm2_sq(&r.func))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfluenceRow {
    pub point: Vec<u32>,
    pub influence: f64,
    pub influence_trunc: f64,
}

/// `I_{S,x}` and `I^{≤d}_{S,x}` over `x ∈ supp μ_S`, with their `μ_S` aggregates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfluenceProfile {
    pub subset: Subset,
    pub d: usize,
    pub rows: Vec<InfluenceRow>,
    pub mean: f64,
    pub mean_sq: f64,
    pub max: f64,
    pub mean_trunc: f64,
    pub mean_sq_trunc: f64,
    pub max_trunc: f64,
}

pub fn influence_profile(mu: &WeightedComplex, f: &Fn, s: Subset, d: usize) -> Result<InfluenceProfile> {
    influence_profile_from(mu, &es_all(mu, f)?, s, d)
}

/// Profile from a precomputed family, through `I_{S,·} = A_S((L_S f)²)`.
pub fn influence_profile_from(
    mu: &WeightedComplex,
    family: &EfronSteinFamily,
    s: Subset,
    d: usize,
) -> Result<InfluenceProfile> {
    let full = laplacian_from_family(mu, family, s)?;
    let trunc = laplacian_trunc_from_family(mu, family, s, d)?;
    let inf = avg(mu, &full.map(|v| v * v), s)?;
    let inf_t = avg(mu, &trunc.map(|v| v * v), s)?;
    let m = mu.marginal(s);
    let rows = (0..m.len())
        .map(|p| InfluenceRow {
            point: m.point(p).to_vec(),
            influence: inf.values()[p],
            influence_trunc: inf_t.values()[p],
        })
        .collect();
    let sq = |g: &Fn| g.map(|v| v * v);
    Ok(InfluenceProfile {
        subset: s,
        d,
        rows,
        mean: mu.expectation(&inf)?,
        mean_sq: mu.expectation(&sq(&inf))?,
        max: mu.norm_inf(&inf),
        mean_trunc: mu.expectation(&inf_t)?,
        mean_sq_trunc: mu.expectation(&sq(&inf_t))?,
        max_trunc: mu.norm_inf(&inf_t),
    })
}

/// The smallest `δ` for which `f` is `(d, δ)`-global, with its first maximizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalnessReport {
    pub d: usize,
    pub delta_min: f64,
    pub witness: PartialAssignment,
}

/// `max_{|S|≤d, x} ‖f(x,·)‖₂` over links, scanning subsets by size then mask and points canonically.
pub fn globalness(mu: &WeightedComplex, f: &Fn, d: usize) -> Result<GlobalnessReport> {
    if d > mu.k() {
        return Err(Error::InvalidArgument(format!("degree {d} exceeds k = {}", mu.k())));
    }
    let sq = mu.lift(f)?.map(|v| v * v);
    let per_subset: Vec<(Subset, Fn)> =
        Subset::up_to_size(mu.k(), d).into_par_iter().map(|s| Ok((s, avg(mu, &sq, s)?))).collect::<Result<_>>()?;
    let mut best = (-1.0f64, PartialAssignment::empty());
    for (s, g) in &per_subset {
        let m = mu.marginal(*s);
        for (p, &v) in g.values().iter().enumerate() {
            if v > best.0 {
                best = (v, PartialAssignment::new(*s, m.point(p).to_vec()));
            }
        }
    }
    Ok(GlobalnessReport { d, delta_min: best.0.max(0.0).sqrt(), witness: best.1 })
}

/// `globalness`, failing with `NotGlobal` when `delta_min > δ`.
pub fn require_global(mu: &WeightedComplex, f: &Fn, d: usize, delta: f64) -> Result<GlobalnessReport> {
    let report = globalness(mu, f, d)?;
    if !leq_tol(report.delta_min, delta) {
        return Err(Error::NotGlobal { d, delta, delta_min: report.delta_min });
    }
    Ok(report)
}

/// C13 and C14 for a `(d, δ)`-global `f`.
///
/// Per `|T| ≤ d`: `‖f^{=T}‖∞ ≤ 2^{|T|}δ`, `E[I²] ≤ 2^{d+1}δ²E[I]` and
/// `E[(I^{≤d})²] ≤ 2^{d+4}δ²E[I^{≤d}]`. The two influence bounds carry
/// `O(ε²‖f‖₄⁴)` and `O(ε²‖f‖∞²‖f‖₂²)` residuals.
pub fn check_global_bounds(
    mu: &WeightedComplex,
    f: &Fn,
    d: usize,
    delta: f64,
    eps: f64,
    ceiling: f64,
) -> Result<Vec<CheckRecord>> {
    require_global(mu, f, d, delta)?;
    let family = es_all(mu, f)?;
    let full = mu.lift(f)?;
    let shape_plain = eps * eps * mu.norm4_pow4(&full);
    let shape_trunc = eps * eps * mu.norm_inf(&full).powi(2) * mu.norm2_sq(&full);
    let (mut comp, mut plain, mut trunc) = (Vec::new(), Vec::new(), Vec::new());
    let d2 = delta * delta;
    for t in Subset::up_to_size(mu.k(), d) {
        let ft = family.get(t).expect("es_all covers every subset");
        comp.push(
            CheckRecord::hard(ids::GLOBAL_COMPONENT_BOUND, mu.norm_inf(ft), powu(2.0, t.len()) * delta)
                .eps(eps)
                .detail(format!("d={d} T={t}")),
        );
        let prof = influence_profile_from(mu, &family, t, d)?;
        plain.push(
            CheckRecord::tracked(
                ids::INFLUENCE_BOUNDS,
                prof.mean_sq,
                powu(2.0, d + 1) * d2 * prof.mean,
                shape_plain,
                eps,
                ceiling,
            )
            .detail(format!("influence d={d} T={t}")),
        );
        trunc.push(
            CheckRecord::tracked(
                ids::INFLUENCE_BOUNDS,
                prof.mean_sq_trunc,
                powu(2.0, d + 4) * d2 * prof.mean_trunc,
                shape_trunc,
                eps,
                ceiling,
            )
            .detail(format!("truncated influence d={d} T={t}")),
        );
    }
    Ok([worst(comp), worst(plain), worst(trunc)].into_iter().flatten().collect())
}

/// C2: the alternating Laplacian equals the sum of components above `S`, for every `S`.
pub fn check_laplacian_equivalence(mu: &WeightedComplex, f: &Fn, family: &EfronSteinFamily) -> Result<CheckRecord> {
    let k = mu.k();
    let avgs = lifted_averages(mu, f)?;
    let scale = mu.norm_inf(f);
    let mut recs = Vec::new();
    for s in Subset::all(k) {
        let mut acc = vec![0.0; mu.len()];
        for t in s.subsets() {
            let g = &avgs[t.complement(k).bits() as usize];
            for (a, v) in acc.iter_mut().zip(g.values()) {
                *a += t.sign() * v;
            }
        }
        let alt = mu.function(mu.full(), acc)?;
        let diff = alt.max_abs_diff(&laplacian_from_family(mu, family, s)?)?;
        recs.push(CheckRecord::exact(ids::LAPLACIAN_EQUIVALENCE, diff, scale).detail(format!("S={s}")));
    }
    Ok(worst(recs).expect("at least one subset"))
}

/// Family `{f_S}_{S⊇T}` with `f_S(x, y) = (D_{T,x} f)^{=S∖T}(y)` computed in each link, witnessed by `L_T f`.
///
/// Within the link at `x`, averaging onto `R` is `A_{T∪R}` restricted to `x`, so
/// `f_S = Σ_{R⊆S∖T} (−1)^{|S∖T∖R|} A_{T∪R}(L_T f)` with no link materialized.
pub fn derivative_es_family(mu: &WeightedComplex, f: &Fn, t: Subset) -> Result<ApproxESWitness> {
    let h = laplacian(mu, f, t)?;
    let k = mu.k();
    let free = t.complement(k);
    let mut averaged: BTreeMap<Subset, Fn> = BTreeMap::new();
    for r in free.subsets() {
        averaged.insert(r, avg(mu, &h, t.union(r))?);
    }
    let mut family = EfronSteinFamily::new(mu);
    let mut witnesses = BTreeMap::new();
    for u in free.subsets() {
        let s = t.union(u);
        let mut acc = vec![0.0; mu.marginal(s).len()];
        for r in u.subsets() {
            let g = mu.lift_to(&averaged[&r], s)?;
            let sign = u.difference(r).sign();
            for (a, v) in acc.iter_mut().zip(g.values()) {
                *a += sign * v;
            }
        }
        family.insert(mu.function(s, acc)?)?;
        witnesses.insert(s, h.clone());
    }
    Ok(ApproxESWitness::undeclared(family, witnesses))
}

/// C21: the derivative family is an approximate decomposition of `L_T f`.
///
/// The family sums to `L_T f` exactly; its approximation error `ε′` is tracked
/// against `ε‖f‖₂`, and its scale parameters are reported against `‖f‖₂` and `‖f‖∞`.
pub fn check_derivative_family(
    mu: &WeightedComplex,
    f: &Fn,
    t: Subset,
    eps: f64,
    ceiling: f64,
) -> Result<Vec<CheckRecord>> {
    let w = derivative_es_family(mu, f, t)?;
    let h = laplacian(mu, f, t)?;
    let sum_diff = w.family.reconstruct(mu)?.max_abs_diff(&h)?;
    let p = validate_approx_es(mu, &h, &w)?;
    let n2 = mu.norm2(f);
    let ninf = mu.norm_inf(f);
    let alpha_ratio = if n2 > 0.0 { p.alpha / n2 } else { 0.0 };
    let beta_ratio = if ninf > 0.0 { p.beta / ninf } else { 0.0 };
    Ok(vec![
        CheckRecord::exact(ids::DERIVATIVE_FAMILY, sum_diff, ninf).eps(eps).detail(format!("sum T={t}")),
        CheckRecord::tracked(ids::DERIVATIVE_FAMILY, p.eps_prime, 0.0, eps * n2, eps, ceiling)
            .detail(format!("eps' T={t} alpha/|f|2={alpha_ratio:.3} beta/|f|inf={beta_ratio:.3}")),
    ])
}

/// `Σ_S E_x I_{S,x}` over `|S| ≤ d`, computed from `Σ_S ‖L_S f‖₂²`.
pub fn total_influence(mu: &WeightedComplex, family: &EfronSteinFamily, d: usize) -> Result<f64> {
    let terms: Vec<f64> = Subset::up_to_size(mu.k(), d)
        .into_iter()
        .map(|s| Ok(mu.norm2_sq(&laplacian_from_family(mu, family, s)?)))
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms))
}
