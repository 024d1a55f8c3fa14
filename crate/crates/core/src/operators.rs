//! Averaging operators `A_{S,T}`, their norms on `1^⊥`, and ε-certificates.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::{ids, CheckRecord};
use crate::error::{Error, Result};
use crate::measure::{Fn, PartialAssignment, WeightedComplex};
use crate::subset::Subset;

/// Singular values below this are reported as zero.
pub const SIGMA_FLOOR: f64 = 1e-12;

/// `A_{S,T} f (y) = E[f(x_S) | x_T = y]` for `f` with home `S`; the result has home `T`.
pub fn avg(mu: &WeightedComplex, f: &Fn, t: Subset) -> Result<Fn> {
    mu.check(f)?;
    if !t.fits(mu.k()) {
        return Err(Error::DomainMismatch(format!("target {t} out of range")));
    }
    let s = f.home();
    if s.is_subset_of(t) {
        return mu.lift_to(f, t);
    }
    let ms = mu.marginal(s);
    let mt = mu.marginal(t);
    let mut acc = vec![0.0; mt.len()];
    for ((w, &si), &ti) in mu.weights().iter().zip(ms.face_index()).zip(mt.face_index()) {
        acc[ti as usize] += w * f.values()[si as usize];
    }
    for (a, m) in acc.iter_mut().zip(mt.weights()) {
        *a /= m;
    }
    mu.function(t, acc)
}

/// `A_T f` lifted back to the full support.
pub fn avg_lifted(mu: &WeightedComplex, f: &Fn, t: Subset) -> Result<Fn> {
    mu.lift(&avg(mu, f, t)?)
}

/// `A_T f` lifted to the full support for every `T`, indexed by bitmask.
pub fn lifted_averages(mu: &WeightedComplex, f: &Fn) -> Result<Vec<Fn>> {
    mu.check(f)?;
    Subset::all(mu.k()).collect::<Vec<_>>().par_iter().map(|&t| avg_lifted(mu, f, t)).collect()
}

/// Largest singular value of `A_{S,T}` restricted to `1^⊥`, in weighted-orthonormal coordinates.
pub fn opnorm_perp(mu: &WeightedComplex, s: Subset, t: Subset) -> f64 {
    let ms = mu.marginal(s);
    let mt = mu.marginal(t);
    let mut joint = DMatrix::<f64>::zeros(mt.len(), ms.len());
    for ((w, &si), &ti) in mu.weights().iter().zip(ms.face_index()).zip(mt.face_index()) {
        joint[(ti as usize, si as usize)] += w;
    }
    deflated_sigma(&joint, mt.weights(), ms.weights())
}

/// Top singular value of `J_ab / √(p_a q_b) − √p_a √q_b` for a joint table with marginals `p`, `q`.
fn deflated_sigma(joint: &DMatrix<f64>, p: &[f64], q: &[f64]) -> f64 {
    if p.len() < 2 || q.len() < 2 {
        return 0.0;
    }
    let m = DMatrix::from_fn(p.len(), q.len(), |a, b| joint[(a, b)] / (p[a] * q[b]).sqrt() - p[a].sqrt() * q[b].sqrt());
    let sigma = m.singular_values().iter().fold(0.0f64, |acc, &v| acc.max(v));
    if sigma < SIGMA_FLOOR {
        0.0
    } else {
        sigma
    }
}

/// One link skeleton: `σ₂` of parts `{i, j}` in the link at `assignment`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub assignment: PartialAssignment,
    pub pair: [usize; 2],
    pub sigma2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsCertificate {
    pub epsilon: f64,
    pub witnesses: Vec<Witness>,
}

impl EpsCertificate {
    /// The `n` largest witnesses, ties kept in canonical order.
    pub fn top(&self, n: usize) -> Vec<&Witness> {
        let mut v: Vec<&Witness> = self.witnesses.iter().collect();
        v.sort_by(|a, b| b.sigma2.total_cmp(&a.sigma2));
        v.truncate(n);
        v
    }

    pub fn argmax(&self) -> Option<&Witness> {
        self.top(1).into_iter().next()
    }
}

/// Exhaustive certificate over every link with `|S| ≤ k − 2` and every pair of free parts.
///
/// For `k < 2` there are no skeletons and the certificate is `0`.
pub fn certify_epsilon(mu: &WeightedComplex) -> EpsCertificate {
    let k = mu.k();
    if k < 2 {
        return EpsCertificate { epsilon: 0.0, witnesses: Vec::new() };
    }
    let mut tasks = Vec::new();
    for s in Subset::up_to_size(k, k - 2) {
        let free = s.complement(k).to_vec();
        for (a, &i) in free.iter().enumerate() {
            for &j in &free[a + 1..] {
                tasks.push((s, i, j));
            }
        }
    }
    let mut witnesses: Vec<Witness> =
        tasks.par_iter().flat_map_iter(|&(s, i, j)| link_skeletons(mu, s, i, j)).collect();
    witnesses.sort_by(|a, b| {
        (a.assignment.subset.len(), a.assignment.subset, &a.assignment.values, a.pair).cmp(&(
            b.assignment.subset.len(),
            b.assignment.subset,
            &b.assignment.values,
            b.pair,
        ))
    });
    let epsilon = witnesses.iter().fold(0.0f64, |m, w| m.max(w.sigma2));
    EpsCertificate { epsilon, witnesses }
}

fn link_skeletons(mu: &WeightedComplex, s: Subset, i: usize, j: usize) -> Vec<Witness> {
    let u = s.union(Subset::singleton(i)).union(Subset::singleton(j));
    let mu_u = mu.marginal(u);
    let mu_s = mu.marginal(s);
    let proj = mu.projection_map(u, s);
    let coords = u.to_vec();
    let pi = coords.iter().position(|&c| c == i).expect("i in u");
    let pj = coords.iter().position(|&c| c == j).expect("j in u");
    let (ni, nj) = (mu.universe().part_size(i), mu.universe().part_size(j));
    let mut tables: Vec<Vec<f64>> = vec![vec![0.0; ni * nj]; mu_s.len()];
    for p in 0..mu_u.len() {
        let pt = mu_u.point(p);
        tables[proj[p] as usize][pt[pi] as usize * nj + pt[pj] as usize] += mu_u.weights()[p];
    }
    tables
        .into_iter()
        .enumerate()
        .map(|(x, table)| {
            let mass = mu_s.weights()[x];
            let rows: Vec<usize> = (0..ni).filter(|&a| (0..nj).any(|b| table[a * nj + b] > 0.0)).collect();
            let cols: Vec<usize> = (0..nj).filter(|&b| (0..ni).any(|a| table[a * nj + b] > 0.0)).collect();
            let joint = DMatrix::from_fn(rows.len(), cols.len(), |r, c| table[rows[r] * nj + cols[c]] / mass);
            let p: Vec<f64> = (0..rows.len()).map(|r| joint.row(r).sum()).collect();
            let q: Vec<f64> = (0..cols.len()).map(|c| joint.column(c).sum()).collect();
            Witness {
                assignment: PartialAssignment::new(s, mu_s.point(x).to_vec()),
                pair: [i, j],
                sigma2: deflated_sigma(&joint, &p, &q),
            }
        })
        .collect()
}

/// `‖A_{S,T} f − E f‖₂² ≤ |S||T| ε² ‖f‖₂²` for disjoint `S = home(f)` and `T`.
pub fn check_disjoint_avg(mu: &WeightedComplex, f: &Fn, t: Subset, eps: f64) -> Result<CheckRecord> {
    let s = f.home();
    if !s.is_disjoint(t) {
        return Err(Error::InvalidArgument(format!("{s} and {t} are not disjoint")));
    }
    let mean = mu.expectation(f)?;
    let g = avg(mu, f, t)?.map(|v| v - mean);
    let lhs = mu.norm2_sq(&g);
    let rhs = (s.len() * t.len()) as f64 * eps * eps * mu.norm2_sq(f);
    Ok(CheckRecord::hard(ids::DISJOINT_AVERAGING, lhs, rhs).eps(eps).detail(format!("S={s} T={t}")))
}

/// `‖A_{S,T} f − A_{S,S∩T} f‖₂² ≤ |S||T| ε² ‖f‖₂²` for `S = home(f)`.
pub fn check_avg_intersection(mu: &WeightedComplex, f: &Fn, t: Subset, eps: f64) -> Result<CheckRecord> {
    let s = f.home();
    let a = avg(mu, f, t)?;
    let b = mu.lift_to(&avg(mu, f, s.intersection(t))?, t)?;
    let lhs = mu.norm2_sq(&a.sub(&b)?);
    let rhs = (s.len() * t.len()) as f64 * eps * eps * mu.norm2_sq(f);
    Ok(CheckRecord::hard(ids::COMPOSITION, lhs, rhs).eps(eps).detail(format!("intersection S={s} T={t}")))
}

/// `‖A_{T₂}A_{T₁} f − A_{T₁∩T₂} f‖₂ ≤ |T₁||T₂| ε ‖f‖₂` for `f` on the full support.
pub fn check_composition(mu: &WeightedComplex, f: &Fn, t1: Subset, t2: Subset, eps: f64) -> Result<CheckRecord> {
    if f.home() != mu.full() {
        return Err(Error::DomainMismatch("composition check needs a function on the full support".into()));
    }
    let composed = avg(mu, &avg(mu, f, t1)?, t2)?;
    let direct = mu.lift_to(&avg(mu, f, t1.intersection(t2))?, t2)?;
    let lhs = mu.norm2(&composed.sub(&direct)?);
    let rhs = (t1.len() * t2.len()) as f64 * eps * mu.norm2(f);
    Ok(CheckRecord::hard(ids::COMPOSITION, lhs, rhs).eps(eps).detail(format!("T1={t1} T2={t2}")))
}

/// `‖A_{S,T} f‖_p ≤ ‖f‖_p` for `p = 2` and `p = ∞`.
pub fn check_avg_contraction(mu: &WeightedComplex, f: &Fn, t: Subset) -> Result<Vec<CheckRecord>> {
    let g = avg(mu, f, t)?;
    let s = f.home();
    Ok(vec![
        CheckRecord::hard(ids::CONTRACTION, mu.norm2(&g), mu.norm2(f)).detail(format!("avg L2 S={s} T={t}")),
        CheckRecord::hard(ids::CONTRACTION, mu.norm_inf(&g), mu.norm_inf(f)).detail(format!("avg Linf S={s} T={t}")),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::PartiteUniverse;

    fn eta_pair(eta: f64) -> WeightedComplex {
        let (a, b) = ((1.0 + eta) / 4.0, (1.0 - eta) / 4.0);
        WeightedComplex::new(
            PartiteUniverse::with_sizes(&[2, 2]).unwrap(),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
            vec![a, b, b, a],
        )
        .unwrap()
    }

    #[test]
    fn dictator_average_on_eta_pair() {
        let eta = 0.3;
        let mu = eta_pair(eta);
        let f = mu.tabulate(Subset::singleton(0), |x| (x[0] == 1) as u8 as f64);
        let g = avg(&mu, &f, Subset::singleton(1)).unwrap();
        assert!((g.values()[0] - (1.0 - eta) / 2.0).abs() < 1e-15);
        assert!((g.values()[1] - (1.0 + eta) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn avg_to_own_home_is_identity() {
        let mu = eta_pair(0.2);
        let f = mu.tabulate(mu.full(), |x| x[0] as f64 - 2.0 * x[1] as f64);
        assert_eq!(avg(&mu, &f, mu.full()).unwrap(), f);
    }

    #[test]
    fn opnorm_of_eta_pair_is_eta() {
        for eta in [0.0, 0.1, 0.5, 0.9] {
            let mu = eta_pair(eta);
            let v = opnorm_perp(&mu, Subset::singleton(0), Subset::singleton(1));
            assert!((v - eta).abs() < 1e-12, "eta {eta}: {v}");
        }
        let mu = eta_pair(0.4);
        let s = Subset::singleton(0);
        assert!((opnorm_perp(&mu, s, s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn certificate_of_eta_pair() {
        let mu = eta_pair(0.25);
        let cert = certify_epsilon(&mu);
        assert_eq!(cert.witnesses.len(), 1);
        assert!((cert.epsilon - 0.25).abs() < 1e-12);
        assert_eq!(cert.argmax().unwrap().pair, [0, 1]);
    }

    #[test]
    fn disjoint_avg_on_eta_pair_dictator() {
        let eta = 0.2;
        let mu = eta_pair(eta);
        let f = mu.tabulate(Subset::singleton(0), |x| (x[0] == 1) as u8 as f64);
        let rec = check_disjoint_avg(&mu, &f, Subset::singleton(1), eta).unwrap();
        assert!((rec.lhs - eta * eta / 4.0).abs() < 1e-15);
        assert!((rec.rhs_explicit - eta * eta / 2.0).abs() < 1e-15);
        assert!(rec.passed());
    }
}
