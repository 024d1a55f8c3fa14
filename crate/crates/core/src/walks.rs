//! Noise and up-down operators, shadows, and the expansion bounds built on them.

use serde::{Deserialize, Serialize};

use crate::calculus::require_global;
use crate::check::{ids, CheckRecord};
use crate::decomposition::{es_all, EfronSteinFamily};
use crate::error::{Error, Result};
use crate::measure::{Fn, WeightedComplex};
use crate::numeric::{pairwise_sum, powu};
use crate::operators::lifted_averages;
use crate::subset::Subset;

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho = {rho} is outside [0, 1]")));
    }
    Ok(())
}

fn combine(mu: &WeightedComplex, terms: impl Iterator<Item = (f64, Fn)>) -> Result<Fn> {
    let mut acc = vec![0.0; mu.len()];
    for (c, g) in terms {
        for (a, v) in acc.iter_mut().zip(g.values()) {
            *a += c * v;
        }
    }
    mu.function(mu.full(), acc)
}

/// `T_ρ f = Σ_S ρ^{|S|}(1−ρ)^{k−|S|} A_S f`.
pub fn noise_direct(mu: &WeightedComplex, f: &Fn, rho: f64) -> Result<Fn> {
    check_rho(rho)?;
    let k = mu.k();
    let avgs = lifted_averages(mu, f)?;
    combine(mu, Subset::all(k).zip(avgs).map(|(s, g)| (powu(rho, s.len()) * powu(1.0 - rho, k - s.len()), g)))
}

/// `T_ρ f = Σ_S ρ^{|S|} f^{=S}`.
pub fn noise_spectral(mu: &WeightedComplex, f: &Fn, rho: f64) -> Result<Fn> {
    noise_from_family(mu, &es_all(mu, f)?, rho)
}

pub fn noise_from_family(mu: &WeightedComplex, family: &EfronSteinFamily, rho: f64) -> Result<Fn> {
    check_rho(rho)?;
    let terms: Vec<(f64, Fn)> =
        family.iter().map(|(s, c)| Ok((powu(rho, s.len()), mu.lift(c)?))).collect::<Result<_>>()?;
    combine(mu, terms.into_iter())
}

/// `‖T_ρ f‖₂²`.
pub fn stability(mu: &WeightedComplex, f: &Fn, rho: f64) -> Result<f64> {
    Ok(mu.norm2_sq(&noise_direct(mu, f, rho)?))
}

/// `T f = (1/k) Σ_i A_{[k]∖{i}} f`.
pub fn updown_direct(mu: &WeightedComplex, f: &Fn) -> Result<Fn> {
    mu.check(f)?;
    let k = mu.k();
    let full = mu.full();
    let terms: Vec<(f64, Fn)> = (0..k)
        .map(|i| Ok((1.0 / k as f64, crate::operators::avg_lifted(mu, f, full.difference(Subset::singleton(i)))?)))
        .collect::<Result<_>>()?;
    combine(mu, terms.into_iter())
}

/// `T f = Σ_S ((k−|S|)/k) f^{=S}`.
pub fn updown_spectral(mu: &WeightedComplex, f: &Fn) -> Result<Fn> {
    updown_from_family(mu, &es_all(mu, f)?)
}

pub fn updown_from_family(mu: &WeightedComplex, family: &EfronSteinFamily) -> Result<Fn> {
    let k = mu.k() as f64;
    let terms: Vec<(f64, Fn)> =
        family.iter().map(|(s, c)| Ok(((k - s.len() as f64) / k, mu.lift(c)?))).collect::<Result<_>>()?;
    combine(mu, terms.into_iter())
}

/// Codimension-one faces below a set of top faces.
///
/// `members[i][p]` marks the point `p` of `supp μ_{[k]∖{i}}`; each carries down-mass
/// `μ_{[k]∖{i}}(p) / k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowSet {
    pub k: usize,
    pub members: Vec<Vec<bool>>,
    pub mass: f64,
}

impl ShadowSet {
    pub fn len(&self) -> usize {
        self.members.iter().map(|m| m.iter().filter(|&&b| b).count()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn require_boolean(mu: &WeightedComplex, a: &Fn) -> Result<Fn> {
    if !a.is_boolean() {
        return Err(Error::NotBoolean);
    }
    mu.lift(a)
}

/// `∂A` for Boolean `A` on top faces, with its down-measure.
pub fn shadow(mu: &WeightedComplex, a: &Fn) -> Result<ShadowSet> {
    let a = require_boolean(mu, a)?;
    let k = mu.k();
    let mut members = Vec::with_capacity(k);
    let mut masses = Vec::new();
    for i in 0..k {
        let s = mu.full().difference(Subset::singleton(i));
        let m = mu.marginal(s);
        let mut hit = vec![false; m.len()];
        for (&p, &v) in m.face_index().iter().zip(a.values()) {
            if v == 1.0 {
                hit[p as usize] = true;
            }
        }
        masses.extend(hit.iter().zip(m.weights()).filter(|(h, _)| **h).map(|(_, w)| w / k as f64));
        members.push(hit);
    }
    Ok(ShadowSet { k, members, mass: pairwise_sum(&masses) })
}

/// Fourier concentration: `‖f^{≤d}‖₂² ≤ (200d)^d δ^{1/2} ‖f‖₂² + O(√ε‖f‖₂²)` for Boolean `(d, δ)`-global `f`.
pub fn check_fourier_concentration(
    mu: &WeightedComplex,
    f: &Fn,
    d: usize,
    delta: f64,
    eps: f64,
    ceiling: f64,
) -> Result<CheckRecord> {
    let full = require_boolean(mu, f)?;
    require_global(mu, &full, d, delta)?;
    let low = es_all(mu, &full)?.low_degree(mu, d)?;
    let n2 = mu.norm2_sq(&full);
    let rhs = powu(200.0 * d as f64, d) * delta.sqrt() * n2;
    Ok(CheckRecord::tracked(ids::FOURIER_CONCENTRATION, mu.norm2_sq(&low), rhs, eps.sqrt() * n2, eps, ceiling)
        .detail(format!("d={d} delta={delta}")))
}

/// Small-set expansion: `‖T_ρ f‖₂² ≤ (ρ^d + (100d)^d δ²)‖f‖₂² + O(√ε‖f‖₂²)` for Boolean `(d, δ)`-global `f`.
pub fn check_sse(
    mu: &WeightedComplex,
    f: &Fn,
    rho: f64,
    d: usize,
    delta: f64,
    eps: f64,
    ceiling: f64,
) -> Result<CheckRecord> {
    let full = require_boolean(mu, f)?;
    require_global(mu, &full, d, delta)?;
    let n2 = mu.norm2_sq(&full);
    let rhs = (powu(rho, d) + powu(100.0 * d as f64, d) * delta * delta) * n2;
    Ok(CheckRecord::tracked(ids::SMALL_SET_EXPANSION, stability(mu, &full, rho)?, rhs, eps.sqrt() * n2, eps, ceiling)
        .detail(format!("rho={rho} d={d} delta={delta}")))
}

/// `‖T_ρ f‖₂² ≤ ‖f^{≤d}‖₂² + (ρ^d + 2^{4k} ε)‖f‖₂²`, for any `f`.
pub fn check_noise_bound(mu: &WeightedComplex, f: &Fn, rho: f64, d: usize, eps: f64) -> Result<CheckRecord> {
    let full = mu.lift(f)?;
    let family = es_all(mu, &full)?;
    let lhs = mu.norm2_sq(&noise_from_family(mu, &family, rho)?);
    let rhs =
        mu.norm2_sq(&family.low_degree(mu, d)?) + (powu(rho, d) + powu(2.0, 4 * mu.k()) * eps) * mu.norm2_sq(&full);
    Ok(CheckRecord::hard(ids::SMALL_SET_EXPANSION, lhs, rhs).eps(eps).detail(format!("noise bound rho={rho} d={d}")))
}

/// Kruskal–Katona for a Boolean `(d, δ)`-global `A` with `δ ≤ (200d)^{−d}`.
///
/// Returns the shadow bound `μ(A)(1 + d/(2k)) ≤ μ↓(∂A)` and the walk inequality
/// `⟨f − Tf, f⟩ ≤ μ↓(∂A) − μ(A)`, which holds on every measure.
pub fn check_kk(
    mu: &WeightedComplex,
    a: &Fn,
    d: usize,
    delta: f64,
    eps: f64,
    ceiling: f64,
) -> Result<Vec<CheckRecord>> {
    let f = require_boolean(mu, a)?;
    if d == 0 {
        return Err(Error::InvalidArgument("Kruskal-Katona needs d >= 1".into()));
    }
    let required = powu(200.0 * d as f64, d).recip();
    if delta > required {
        return Err(Error::PreconditionDelta { delta, required });
    }
    require_global(mu, &f, d, delta)?;
    let k = mu.k() as f64;
    let measure = mu.expectation(&f)?;
    let down = shadow(mu, &f)?.mass;
    let walk = mu.inner(&f.sub(&updown_direct(mu, &f)?)?, &f)?;
    Ok(vec![
        CheckRecord::tracked(
            ids::KRUSKAL_KATONA,
            measure * (1.0 + d as f64 / (2.0 * k)),
            down,
            eps.sqrt() * measure,
            eps,
            ceiling,
        )
        .detail(format!("shadow d={d} mu(A)={measure:.6e}")),
        CheckRecord::hard(ids::KRUSKAL_KATONA, walk, down - measure).eps(eps).detail("walk identity"),
    ])
}

/// C3: both noise formulas agree at `ρ`.
pub fn check_noise_equivalence(
    mu: &WeightedComplex,
    f: &Fn,
    family: &EfronSteinFamily,
    rho: f64,
) -> Result<CheckRecord> {
    let diff = noise_direct(mu, f, rho)?.max_abs_diff(&noise_from_family(mu, family, rho)?)?;
    Ok(CheckRecord::exact(ids::NOISE_EQUIVALENCE, diff, mu.norm_inf(f)).detail(format!("rho={rho}")))
}

/// C4: both up-down formulas agree.
pub fn check_updown_equivalence(mu: &WeightedComplex, f: &Fn, family: &EfronSteinFamily) -> Result<CheckRecord> {
    let diff = updown_direct(mu, f)?.max_abs_diff(&updown_from_family(mu, family)?)?;
    Ok(CheckRecord::exact(ids::UPDOWN_EQUIVALENCE, diff, mu.norm_inf(f)).detail("up-down"))
}
