//! Efron–Stein components, truncations, and exact and approximate decomposition checks.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::{ids, worst, CheckRecord};
use crate::error::{Error, Result};
use crate::measure::{Fn, WeightedComplex};
use crate::numeric::{pairwise_sum, powu};
use crate::operators::{avg, avg_lifted, lifted_averages};
use crate::subset::Subset;

/// Components indexed by subset, each stored on its own home.
#[derive(Clone, Debug, PartialEq)]
pub struct EfronSteinFamily {
    complex_id: u64,
    components: BTreeMap<Subset, Fn>,
}

impl EfronSteinFamily {
    pub fn new(mu: &WeightedComplex) -> Self {
        Self { complex_id: mu.id(), components: BTreeMap::new() }
    }

    /// Add a component; its index is its home.
    pub fn insert(&mut self, f: Fn) -> Result<()> {
        if f.complex_id() != self.complex_id {
            return Err(Error::DomainMismatch("component belongs to another complex".into()));
        }
        self.components.insert(f.home(), f);
        Ok(())
    }

    pub fn get(&self, s: Subset) -> Option<&Fn> {
        self.components.get(&s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, &Fn)> {
        self.components.iter().map(|(s, f)| (*s, f))
    }

    pub fn indices(&self) -> Vec<Subset> {
        self.components.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The sub-family whose indices satisfy `keep`.
    pub fn filter(&self, keep: impl std::ops::Fn(Subset) -> bool) -> Self {
        Self {
            complex_id: self.complex_id,
            components: self.components.iter().filter(|(s, _)| keep(**s)).map(|(s, f)| (*s, f.clone())).collect(),
        }
    }

    /// `Σ_S lift(f_S)` over the indices satisfying `keep`.
    pub fn sum_where(&self, mu: &WeightedComplex, keep: impl std::ops::Fn(Subset) -> bool) -> Result<Fn> {
        let mut acc = vec![0.0; mu.len()];
        for (s, f) in self.iter().filter(|(s, _)| keep(*s)) {
            let idx = mu.marginal(s).face_index().to_vec();
            for (a, &p) in acc.iter_mut().zip(&idx) {
                *a += f.values()[p as usize];
            }
        }
        mu.function(mu.full(), acc)
    }

    /// `Σ_S lift(f_S)` over every component.
    pub fn reconstruct(&self, mu: &WeightedComplex) -> Result<Fn> {
        self.sum_where(mu, |_| true)
    }

    /// `f^{≤d} = Σ_{|S|≤d} lift(f_S)`.
    pub fn low_degree(&self, mu: &WeightedComplex, d: usize) -> Result<Fn> {
        self.sum_where(mu, |s| s.len() <= d)
    }

    /// JSON map from subset bitmask to value array.
    pub fn to_json_map(&self) -> BTreeMap<String, Vec<f64>> {
        self.iter().map(|(s, f)| (s.bits().to_string(), f.values().to_vec())).collect()
    }
}

/// `f^{=S} = Σ_{T⊆S} (−1)^{|S∖T|} A_T f`, evaluated literally.
pub fn es_component(mu: &WeightedComplex, f: &Fn, s: Subset) -> Result<Fn> {
    mu.check(f)?;
    if !s.fits(mu.k()) {
        return Err(Error::InvalidArgument(format!("subset {s} out of range")));
    }
    let mut acc = vec![0.0; mu.marginal(s).len()];
    for t in s.subsets() {
        let sign = s.difference(t).sign();
        let g = mu.lift_to(&avg(mu, f, t)?, s)?;
        for (a, v) in acc.iter_mut().zip(g.values()) {
            *a += sign * v;
        }
    }
    mu.function(s, acc)
}

/// Every component `f^{=S}`, sharing the `2^k` averages `A_T f` through a Möbius transform.
pub fn es_all(mu: &WeightedComplex, f: &Fn) -> Result<EfronSteinFamily> {
    mu.check(f)?;
    let k = mu.k();
    let mut table: Vec<Vec<f64>> = lifted_averages(mu, f)?.into_iter().map(Fn::into_values).collect();
    for i in 0..k {
        let bit = 1usize << i;
        for mask in 0..table.len() {
            if mask & bit != 0 {
                let (lo, hi) = table.split_at_mut(mask);
                for (a, b) in hi[0].iter_mut().zip(&lo[mask ^ bit]) {
                    *a -= b;
                }
            }
        }
    }
    let components: Vec<Fn> = table
        .into_par_iter()
        .enumerate()
        .map(|(mask, lifted)| {
            let s = Subset::from_bits(mask as u32);
            let m = mu.marginal(s);
            let mut values = vec![0.0; m.len()];
            for (&p, v) in m.face_index().iter().zip(lifted) {
                values[p as usize] = v;
            }
            mu.function(s, values)
        })
        .collect::<Result<_>>()?;
    let mut family = EfronSteinFamily::new(mu);
    for c in components {
        family.insert(c)?;
    }
    Ok(family)
}

/// `f^{≤d}` on the full support.
pub fn low_degree(mu: &WeightedComplex, f: &Fn, d: usize) -> Result<Fn> {
    es_all(mu, f)?.low_degree(mu, d)
}

/// `|⟨f, g⟩ − Σ_S ⟨f^{=S}, g^{=S}⟩_{μ_S}|`.
pub fn parseval_defect(mu: &WeightedComplex, f: &Fn, g: &Fn) -> Result<f64> {
    let (ff, gf) = (es_all(mu, f)?, es_all(mu, g)?);
    parseval_defect_from(mu, f, g, &ff, &gf)
}

pub fn parseval_defect_from(
    mu: &WeightedComplex,
    f: &Fn,
    g: &Fn,
    ff: &EfronSteinFamily,
    gf: &EfronSteinFamily,
) -> Result<f64> {
    let mut terms = Vec::with_capacity(ff.len());
    for (s, fs) in ff.iter() {
        if let Some(gs) = gf.get(s) {
            terms.push(mu.inner(fs, gs)?);
        }
    }
    Ok((mu.inner_lifted(f, g)? - pairwise_sum(&terms)).abs())
}

/// `|⟨f^{=S}, g^{=T}⟩|` after lifting both to the full support.
pub fn near_orthogonality_defect(mu: &WeightedComplex, f: &Fn, g: &Fn, s: Subset, t: Subset) -> Result<f64> {
    Ok(mu.inner_lifted(&es_component(mu, f, s)?, &es_component(mu, g, t)?)?.abs())
}

/// `‖(f^{=S})^{=T}‖₂` for `T ≠ S`, or `‖(f^{=S})^{=S} − f^{=S}‖₂` for `T = S`.
pub fn idempotence_defect(mu: &WeightedComplex, f: &Fn, s: Subset, t: Subset) -> Result<f64> {
    let g = es_component(mu, f, s)?;
    let gt = es_component(mu, &g, t)?;
    if s == t {
        Ok(mu.norm2(&gt.sub(&g)?))
    } else {
        Ok(mu.norm2(&gt))
    }
}

/// C1: `Σ_S lift(f^{=S}) = f`.
pub fn check_reconstruction(mu: &WeightedComplex, f: &Fn, family: &EfronSteinFamily) -> Result<CheckRecord> {
    let back = family.reconstruct(mu)?;
    let diff = back.max_abs_diff(&mu.lift(f)?)?;
    Ok(CheckRecord::exact(ids::RECONSTRUCTION, diff, mu.norm_inf(f)).detail("sum of components"))
}

/// `A_S f = Σ_{T⊆S} f^{=T}` for every `S`, worst case.
pub fn check_average_expansion(mu: &WeightedComplex, f: &Fn, family: &EfronSteinFamily) -> Result<CheckRecord> {
    let mut recs = Vec::new();
    for s in Subset::all(mu.k()) {
        let direct = avg_lifted(mu, f, s)?;
        let expanded = family.sum_where(mu, |t| t.is_subset_of(s))?;
        let diff = direct.max_abs_diff(&expanded)?;
        recs.push(CheckRecord::exact(ids::RECONSTRUCTION, diff, mu.norm_inf(f)).detail(format!("A_S expansion S={s}")));
    }
    Ok(worst(recs).expect("at least one subset"))
}

/// C5: `‖f^{=S}‖₂ ≤ 2^{|S|}‖f‖₂`, worst over `S`.
pub fn check_component_norms(mu: &WeightedComplex, f: &Fn, family: &EfronSteinFamily) -> CheckRecord {
    let nf = mu.norm2(f);
    let recs = family
        .iter()
        .map(|(s, c)| {
            CheckRecord::hard(ids::CONTRACTION, mu.norm2(c), powu(2.0, s.len()) * nf)
                .detail(format!("component norm S={s}"))
        })
        .collect();
    worst(recs).expect("nonempty family")
}

/// C8: `|⟨f^{=S}, g^{=T}⟩| ≤ 2^{2|S|+2|T|} ε ‖f‖₂‖g‖₂` over all `S ≠ T`, worst case.
pub fn check_near_orthogonality(
    mu: &WeightedComplex,
    f: &Fn,
    g: &Fn,
    ff: &EfronSteinFamily,
    gf: &EfronSteinFamily,
    eps: f64,
) -> Result<CheckRecord> {
    let scale = mu.norm2(f) * mu.norm2(g);
    let lifted_f = lift_all(mu, ff)?;
    let lifted_g = lift_all(mu, gf)?;
    let mut recs = Vec::new();
    for (s, fs) in &lifted_f {
        for (t, gt) in &lifted_g {
            if s == t {
                continue;
            }
            let lhs = mu.inner(fs, gt)?.abs();
            let rhs = powu(2.0, 2 * s.len() + 2 * t.len()) * eps * scale;
            recs.push(CheckRecord::hard(ids::NEAR_ORTHOGONALITY, lhs, rhs).eps(eps).detail(format!("S={s} T={t}")));
        }
    }
    Ok(worst(recs).unwrap_or_else(|| CheckRecord::hard(ids::NEAR_ORTHOGONALITY, 0.0, 0.0).eps(eps)))
}

/// Largest `|⟨f^{=S}, f^{=T}⟩|` over `S ≠ T`.
pub fn max_cross_inner(mu: &WeightedComplex, family: &EfronSteinFamily) -> Result<f64> {
    let lifted = lift_all(mu, family)?;
    let mut best = 0.0f64;
    for (a, (s, fs)) in lifted.iter().enumerate() {
        for (t, ft) in &lifted[a + 1..] {
            debug_assert_ne!(s, t);
            best = best.max(mu.inner(fs, ft)?.abs());
        }
    }
    Ok(best)
}

fn lift_all(mu: &WeightedComplex, family: &EfronSteinFamily) -> Result<Vec<(Subset, Fn)>> {
    family.iter().map(|(s, c)| Ok((s, mu.lift(c)?))).collect()
}

/// C9: `|⟨f,g⟩ − Σ_S ⟨f^{=S},g^{=S}⟩| ≤ 2^{4k} ε ‖f‖₂‖g‖₂`.
pub fn check_parseval(
    mu: &WeightedComplex,
    f: &Fn,
    g: &Fn,
    ff: &EfronSteinFamily,
    gf: &EfronSteinFamily,
    eps: f64,
) -> Result<CheckRecord> {
    let lhs = parseval_defect_from(mu, f, g, ff, gf)?;
    let rhs = powu(2.0, 4 * mu.k()) * eps * mu.norm2(f) * mu.norm2(g);
    Ok(CheckRecord::hard(ids::APPROX_PARSEVAL, lhs, rhs).eps(eps).detail("full"))
}

/// C9, junta form: for a `T`-junta `f`, `|⟨f,g⟩ − Σ_{S⊆T} ⟨f^{=S},g^{=S}⟩| ≤ 2^{4|T|} ε ‖f‖₂‖g‖₂`.
pub fn check_parseval_junta(mu: &WeightedComplex, f: &Fn, g: &Fn, eps: f64) -> Result<CheckRecord> {
    let t = f.home();
    let mut terms = Vec::new();
    for s in t.subsets() {
        terms.push(mu.inner(&es_component(mu, f, s)?, &es_component(mu, g, s)?)?);
    }
    let lhs = (mu.inner_lifted(f, g)? - pairwise_sum(&terms)).abs();
    let rhs = powu(2.0, 4 * t.len()) * eps * mu.norm2(f) * mu.norm2(g);
    Ok(CheckRecord::hard(ids::APPROX_PARSEVAL, lhs, rhs).eps(eps).detail(format!("junta T={t}")))
}

/// C10: for `g = f^{=S}`, `‖g^{=T}‖₂² ≤ 2^{8k}ε²‖f‖₂²` (`T ≠ S`) and `‖g^{=S} − g‖₂² ≤ 2^{10k}ε²‖f‖₂²`.
pub fn check_idempotence(
    mu: &WeightedComplex,
    f: &Fn,
    family: &EfronSteinFamily,
    eps: f64,
) -> Result<Vec<CheckRecord>> {
    let k = mu.k();
    let nf2 = mu.norm2_sq(f);
    let mut off = Vec::new();
    let mut diag = Vec::new();
    for (s, g) in family.iter() {
        let inner = es_all(mu, g)?;
        for (t, gt) in inner.iter() {
            if t == s {
                let lhs = mu.norm2_sq(&gt.sub(g)?);
                let rhs = powu(2.0, 10 * k) * eps * eps * nf2;
                diag.push(CheckRecord::hard(ids::IDEMPOTENCE, lhs, rhs).eps(eps).detail(format!("diagonal S={s}")));
            } else {
                let lhs = mu.norm2_sq(gt);
                let rhs = powu(2.0, 8 * k) * eps * eps * nf2;
                off.push(
                    CheckRecord::hard(ids::IDEMPOTENCE, lhs, rhs).eps(eps).detail(format!("off-diagonal S={s} T={t}")),
                );
            }
        }
    }
    Ok([worst(off), worst(diag)].into_iter().flatten().collect())
}

/// C11: `|⟨f^{=S}, g⟩| ≤ ε √(|S||T|) 2^{|S|} ‖f‖₂‖g‖₂` for a `T`-junta `g` with `S ⊄ T`.
pub fn check_junta_orthogonality(
    mu: &WeightedComplex,
    f: &Fn,
    family: &EfronSteinFamily,
    g: &Fn,
    eps: f64,
) -> Result<CheckRecord> {
    let t = g.home();
    let lifted_g = mu.lift(g)?;
    let scale = mu.norm2(f) * mu.norm2(g);
    let mut recs = Vec::new();
    for (s, fs) in family.iter() {
        if s.is_subset_of(t) {
            continue;
        }
        let lhs = mu.inner(&mu.lift(fs)?, &lifted_g)?.abs();
        let rhs = eps * ((s.len() * t.len()) as f64).sqrt() * powu(2.0, s.len()) * scale;
        recs.push(CheckRecord::hard(ids::JUNTA_ORTHOGONALITY, lhs, rhs).eps(eps).detail(format!("S={s} T={t}")));
    }
    Ok(worst(recs).unwrap_or_else(|| CheckRecord::hard(ids::JUNTA_ORTHOGONALITY, 0.0, 0.0).eps(eps)))
}

/// A candidate family `{f_S}` with witnesses `h_S` and declared `(α, ε′, β)`.
#[derive(Clone, Debug)]
pub struct ApproxESWitness {
    pub family: EfronSteinFamily,
    pub witnesses: BTreeMap<Subset, Fn>,
    pub alpha: f64,
    pub eps_prime: f64,
    pub beta: Option<f64>,
}

/// The tightest parameters a witness satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxParams {
    pub alpha: f64,
    pub eps_prime: f64,
    pub beta: f64,
}

impl ApproxESWitness {
    /// A witness with nothing declared yet.
    pub fn undeclared(family: EfronSteinFamily, witnesses: BTreeMap<Subset, Fn>) -> Self {
        Self { family, witnesses, alpha: 0.0, eps_prime: 0.0, beta: None }
    }

    /// `{f^{=S}}` over the indices kept, each witnessed by `f` itself.
    pub fn exact(mu: &WeightedComplex, f: &Fn, keep: impl std::ops::Fn(Subset) -> bool) -> Result<Self> {
        let family = es_all(mu, f)?.filter(keep);
        let lifted = mu.lift(f)?;
        let witnesses = family.indices().into_iter().map(|s| (s, lifted.clone())).collect();
        Ok(Self::undeclared(family, witnesses))
    }

    /// Declare the given parameters.
    pub fn declare(mut self, p: ApproxParams) -> Self {
        self.alpha = p.alpha;
        self.eps_prime = p.eps_prime;
        self.beta = Some(p.beta);
        self
    }

    /// True when the declared parameters dominate the computed minima.
    pub fn admits(&self, minima: &ApproxParams) -> bool {
        let ok = |declared: f64, min: f64| crate::numeric::leq_tol(min, declared);
        ok(self.alpha, minima.alpha)
            && ok(self.eps_prime, minima.eps_prime)
            && self.beta.is_none_or(|b| ok(b, minima.beta))
    }
}

/// Minimal `(α, ε′, β)` for which `{f_S}` with witnesses `h_S` is a bounded approximate decomposition of `f`.
pub fn validate_approx_es(mu: &WeightedComplex, f: &Fn, w: &ApproxESWitness) -> Result<ApproxParams> {
    let f_full = mu.lift(f)?;
    let mut alpha = mu.norm2(&f_full);
    let mut beta = mu.norm_inf(&f_full);
    let mut eps_prime = mu.norm2(&f_full.sub(&w.family.reconstruct(mu)?)?);
    for (s, fs) in w.family.iter() {
        let h = w.witnesses.get(&s).ok_or(Error::MissingWitness(s))?;
        let hs = es_component(mu, h, s)?;
        alpha = alpha.max(mu.norm2(h));
        eps_prime = eps_prime.max(mu.norm2(&hs.sub(fs)?));
        beta = beta.max(mu.norm_inf(&hs)).max(mu.norm_inf(fs));
    }
    Ok(ApproxParams { alpha, eps_prime, beta })
}

/// `|⟨f,g⟩ − Σ_S ⟨f_S, g_S⟩|` over the indices both families share.
pub fn strong_parseval_defect(
    mu: &WeightedComplex,
    f: &Fn,
    g: &Fn,
    wf: &ApproxESWitness,
    wg: &ApproxESWitness,
) -> Result<f64> {
    parseval_defect_from(mu, f, g, &wf.family, &wg.family)
}

/// C12: strong Parseval with the computed minimal parameters of both witnesses.
pub fn check_strong_parseval(
    mu: &WeightedComplex,
    f: &Fn,
    g: &Fn,
    wf: &ApproxESWitness,
    wg: &ApproxESWitness,
    eps: f64,
) -> Result<CheckRecord> {
    let pf = validate_approx_es(mu, f, wf)?;
    let pg = validate_approx_es(mu, g, wg)?;
    let lhs = strong_parseval_defect(mu, f, g, wf, wg)?;
    let rhs = powu(2.0, 6 * mu.k()) * (pf.eps_prime * pg.alpha + pg.eps_prime * pf.alpha + eps * pf.alpha * pg.alpha);
    Ok(CheckRecord::hard(ids::STRONG_PARSEVAL, lhs, rhs)
        .eps(eps)
        .detail(format!("eps1={:.3e} eps2={:.3e}", pf.eps_prime, pg.eps_prime)))
}

/// Measured sides of the four closeness bounds between two decompositions of one function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L4Closeness {
    /// `‖f_S − f′_S‖₂²`, `‖f_S − f′_S‖₄⁴`, `‖Σ(f_S − f′_S)‖₄⁴`, `‖f − Σ f_S‖₄⁴`.
    pub lhs: [f64; 4],
    /// `ε′² + εα²`, `(ε′² + εα²)β²`, `(ε′² + ε²α²)β²`, `ε²β²(α² + ‖f‖₂²)`.
    pub shapes: [f64; 4],
    pub params: ApproxParams,
}

/// Closeness of two bounded approximate decompositions `w1`, `w2` of `f` at index `S`.
pub fn l4_closeness_defect(
    mu: &WeightedComplex,
    f: &Fn,
    w1: &ApproxESWitness,
    w2: &ApproxESWitness,
    s: Subset,
    eps: f64,
) -> Result<L4Closeness> {
    let p1 = validate_approx_es(mu, f, w1)?;
    let p2 = validate_approx_es(mu, f, w2)?;
    let p = ApproxParams {
        alpha: p1.alpha.max(p2.alpha),
        eps_prime: p1.eps_prime.max(p2.eps_prime),
        beta: p1.beta.max(p2.beta),
    };
    let component = |w: &ApproxESWitness| w.family.get(s).cloned().unwrap_or_else(|| mu.constant(s, 0.0));
    let diff_s = component(w1).sub(&component(w2))?;
    let diff_all = w1.family.reconstruct(mu)?.sub(&w2.family.reconstruct(mu)?)?;
    let rest = mu.lift(f)?.sub(&w1.family.reconstruct(mu)?)?;
    let lhs = [mu.norm2_sq(&diff_s), mu.norm4_pow4(&diff_s), mu.norm4_pow4(&diff_all), mu.norm4_pow4(&rest)];
    let (a2, b2, e2) = (p.alpha * p.alpha, p.beta * p.beta, p.eps_prime * p.eps_prime);
    let shapes =
        [e2 + eps * a2, (e2 + eps * a2) * b2, (e2 + eps * eps * a2) * b2, eps * eps * b2 * (a2 + mu.norm2_sq(f))];
    Ok(L4Closeness { lhs, shapes, params: p })
}

/// C20 records for one index: each part is `lhs ≤ 0 + O(shape)`.
pub fn check_l4_closeness(c: &L4Closeness, s: Subset, eps: f64, ceiling: f64) -> Vec<CheckRecord> {
    (0..4)
        .map(|n| {
            CheckRecord::tracked(ids::L4_CLOSENESS, c.lhs[n], 0.0, c.shapes[n], eps, ceiling)
                .detail(format!("part {} S={s}", n + 1))
        })
        .collect()
}
