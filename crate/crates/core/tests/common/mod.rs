//! Brute-force oracles that work on raw `(face, weight)` lists, independent of the
//! marginal tables and SVD code in the library.

#![allow(dead_code)]

use std::collections::BTreeMap;

use hdx_core::generators::{gen_eta_correlated, gen_product, Marginals};
use hdx_core::{Fn, Subset, WeightedComplex};

pub fn uniform(sizes: &[usize]) -> WeightedComplex {
    gen_product(sizes, &Marginals::Uniform, 0).unwrap()
}

pub fn eta(eta: f64) -> WeightedComplex {
    gen_eta_correlated(eta).unwrap()
}

/// `1[x_i = a]` on the full support.
pub fn dictator(mu: &WeightedComplex, i: usize, a: u32) -> Fn {
    mu.tabulate(mu.full(), |x| f64::from(u8::from(x[i] == a)))
}

/// Faces and weights copied out of the complex.
pub struct Table {
    pub k: usize,
    pub faces: Vec<Vec<u32>>,
    pub weights: Vec<f64>,
}

impl Table {
    pub fn of(mu: &WeightedComplex) -> Self {
        Self { k: mu.k(), faces: mu.faces().map(<[u32]>::to_vec).collect(), weights: mu.weights().to_vec() }
    }

    fn key(face: &[u32], s: Subset) -> Vec<u32> {
        s.iter().map(|i| face[i]).collect()
    }

    /// `E[v | y_T]` evaluated at every face.
    pub fn cond(&self, v: &[f64], t: Subset) -> Vec<f64> {
        let mut num: BTreeMap<Vec<u32>, (f64, f64)> = BTreeMap::new();
        for ((face, w), x) in self.faces.iter().zip(&self.weights).zip(v) {
            let e = num.entry(Self::key(face, t)).or_default();
            e.0 += w * x;
            e.1 += w;
        }
        self.faces
            .iter()
            .map(|face| {
                let (a, m) = num[&Self::key(face, t)];
                a / m
            })
            .collect()
    }

    /// `Σ_{T⊆S} (−1)^{|S∖T|} E[v | y_T]` at every face.
    pub fn es(&self, v: &[f64], s: Subset) -> Vec<f64> {
        let mut acc = vec![0.0; v.len()];
        for t in s.subsets() {
            let sign = if (s.len() - t.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
            for (a, c) in acc.iter_mut().zip(self.cond(v, t)) {
                *a += sign * c;
            }
        }
        acc
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
    }

    /// Faces agreeing with `x` on `s`, with renormalized weights.
    pub fn link(&self, s: Subset, x: &[u32]) -> (Vec<usize>, Vec<f64>) {
        let idx: Vec<usize> = (0..self.faces.len()).filter(|&n| Self::key(&self.faces[n], s) == x).collect();
        let mass: f64 = idx.iter().map(|&n| self.weights[n]).sum();
        let w = idx.iter().map(|&n| self.weights[n] / mass).collect();
        (idx, w)
    }

    /// Distinct values of `y_S` over the support.
    pub fn points(&self, s: Subset) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = self.faces.iter().map(|f| Self::key(f, s)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `σ₂²` of the `{i, j}` skeleton of the link at `(s, x)`.
    pub fn skeleton_sigma2_sq(&self, s: Subset, x: &[u32], i: usize, j: usize) -> f64 {
        let (idx, w) = self.link(s, x);
        let mut joint: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        let mut pi: BTreeMap<u32, f64> = BTreeMap::new();
        let mut pj: BTreeMap<u32, f64> = BTreeMap::new();
        for (&n, &wn) in idx.iter().zip(&w) {
            let (a, b) = (self.faces[n][i], self.faces[n][j]);
            *joint.entry((a, b)).or_default() += wn;
            *pi.entry(a).or_default() += wn;
            *pj.entry(b).or_default() += wn;
        }
        let rows: Vec<u32> = pi.keys().copied().collect();
        let cols: Vec<u32> = pj.keys().copied().collect();
        let m: Vec<Vec<f64>> = rows
            .iter()
            .map(|a| {
                cols.iter().map(|b| joint.get(&(*a, *b)).copied().unwrap_or(0.0) / (pi[a] * pj[b]).sqrt()).collect()
            })
            .collect();
        // Gram matrix MᵀM; its top eigenvalue is 1 with eigenvector √p_j.
        let n = cols.len();
        let mut g = vec![vec![0.0; n]; n];
        for (p, gp) in g.iter_mut().enumerate() {
            for (q, gpq) in gp.iter_mut().enumerate() {
                *gpq = m.iter().map(|r| r[p] * r[q]).sum();
            }
        }
        let mut ev = jacobi_eigenvalues(g);
        ev.sort_by(|a, b| b.total_cmp(a));
        ev.get(1).map_or(0.0, |v| v.max(0.0))
    }

    /// Max `σ₂²` over every link with `|S| ≤ k − 2` and every pair of free parts.
    pub fn certificate_sq(&self) -> f64 {
        let mut best = 0.0f64;
        if self.k < 2 {
            return 0.0;
        }
        for s in Subset::up_to_size(self.k, self.k - 2) {
            let free = s.complement(self.k).to_vec();
            for x in self.points(s) {
                for a in 0..free.len() {
                    for b in a + 1..free.len() {
                        best = best.max(self.skeleton_sigma2_sq(s, &x, free[a], free[b]));
                    }
                }
            }
        }
        best
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (arp, arq) = (row[p], row[q]);
                    row[p] = c * arp - s * arq;
                    row[q] = s * arp + c * arq;
                }
                let (rp, rq) = (a[p].clone(), a[q].clone());
                for r in 0..n {
                    a[p][r] = c * rp[r] - s * rq[r];
                    a[q][r] = s * rp[r] + c * rq[r];
                }
            }
        }
    }
    (0..n).map(|p| a[p][p]).collect()
}

/// Values of a full-support function in face order.
pub fn face_values(mu: &WeightedComplex, f: &Fn) -> Vec<f64> {
    mu.lift(f).unwrap().into_values()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
