//! Weighted k-partite complexes, their marginals and links, and functions on them.
//!
//! A [`WeightedComplex`] is a probability measure on `V_1 × ⋯ × V_k` given by its
//! support (the top faces) and positive weights. Faces are kept in lexicographic
//! order of their part-element indices, and every summation in this crate walks
//! that order, so results are bit-reproducible across runs.
//!
//! Marginals `μ_S` are computed lazily and cached per subset. A [`Fn`] is a dense
//! value vector over the support of `μ_home`, aligned to the marginal's canonical
//! point order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, weighted_sum};
use crate::subset::{Subset, MAX_PARTS};

/// Tolerance on the raw weight sum of a complex read from input.
pub const WEIGHT_SUM_TOL: f64 = 1e-6;

/// The vertex sets `V_1, .., V_k`, each a list of unique labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartiteUniverse {
    parts: Vec<Vec<String>>,
}

impl PartiteUniverse {
    pub fn new(parts: Vec<Vec<String>>) -> Result<Self> {
        if parts.len() > MAX_PARTS {
            return Err(Error::TooManyParts { k: parts.len(), max: MAX_PARTS });
        }
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::MalformedComplex(format!("part {i} is empty")));
            }
            let mut sorted: Vec<&String> = part.iter().collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedComplex(format!("part {i} has duplicate labels")));
            }
        }
        Ok(Self { parts })
    }

    /// Parts labelled `0, .., n_i - 1`.
    pub fn with_sizes(sizes: &[usize]) -> Result<Self> {
        Self::new(sizes.iter().map(|&n| (0..n).map(|v| v.to_string()).collect()).collect())
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<String>] {
        &self.parts
    }

    pub fn part_size(&self, i: usize) -> usize {
        self.parts[i].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    fn select(&self, s: Subset) -> PartiteUniverse {
        PartiteUniverse { parts: s.iter().map(|i| self.parts[i].clone()).collect() }
    }
}

/// The marginal `μ_S`: its support points in lexicographic order, their masses, and
/// for every top face the index of its projection.
#[derive(Debug)]
pub struct Marginal {
    subset: Subset,
    width: usize,
    points: Vec<u32>,
    weights: Vec<f64>,
    face_index: Vec<u32>,
}

impl Marginal {
    pub fn subset(&self) -> Subset {
        self.subset
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Element indices of point `p`, one per member of the subset in increasing order.
    pub fn point(&self, p: usize) -> &[u32] {
        &self.points[p * self.width..(p + 1) * self.width]
    }

    /// For each top face, the index of its projection onto the subset.
    pub fn face_index(&self) -> &[u32] {
        &self.face_index
    }

    /// Locate a point of the support by its element indices.
    pub fn find(&self, values: &[u32]) -> Option<usize> {
        if values.len() != self.width {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.point(mid).cmp(values) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// A probability measure on the top faces of a k-partite universe.
#[derive(Clone)]
pub struct WeightedComplex {
    id: u64,
    universe: PartiteUniverse,
    faces: Vec<u32>,
    weights: Vec<f64>,
    marginals: Vec<OnceLock<Arc<Marginal>>>,
    certificate: OnceLock<Arc<crate::operators::EpsCertificate>>,
}

impl fmt::Debug for WeightedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedComplex")
            .field("id", &format_args!("{:016x}", self.id))
            .field("sizes", &self.universe.sizes())
            .field("faces", &self.len())
            .finish()
    }
}

impl WeightedComplex {
    /// Build from faces and weights whose raw sum must be within [`WEIGHT_SUM_TOL`] of 1.
    ///
    /// Zero-weight faces are dropped, the rest are normalized and sorted.
    pub fn new(universe: PartiteUniverse, faces: Vec<Vec<u32>>, weights: Vec<f64>) -> Result<Self> {
        let total = check_weights(&weights)?;
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::MalformedComplex(format!("weights sum to {total}, expected 1 within {WEIGHT_SUM_TOL}")));
        }
        Self::build(universe, faces, weights, total)
    }

    /// Build from arbitrary positive masses, normalizing them to a probability measure.
    pub fn from_masses(universe: PartiteUniverse, faces: Vec<Vec<u32>>, masses: Vec<f64>) -> Result<Self> {
        let total = check_weights(&masses)?;
        if total <= 0.0 {
            return Err(Error::MalformedComplex("total mass is zero".into()));
        }
        Self::build(universe, faces, masses, total)
    }

    fn build(universe: PartiteUniverse, faces: Vec<Vec<u32>>, weights: Vec<f64>, total: f64) -> Result<Self> {
        let k = universe.k();
        if faces.len() != weights.len() {
            return Err(Error::MalformedComplex(format!("{} faces but {} weights", faces.len(), weights.len())));
        }
        let mut rows: Vec<(Vec<u32>, f64)> = Vec::with_capacity(faces.len());
        for (n, (face, w)) in faces.into_iter().zip(weights).enumerate() {
            if face.len() != k {
                return Err(Error::MalformedComplex(format!("face {n} has {} entries, expected {k}", face.len())));
            }
            for (i, &v) in face.iter().enumerate() {
                if v as usize >= universe.part_size(i) {
                    return Err(Error::MalformedComplex(format!("face {n}: index {v} out of range for part {i}")));
                }
            }
            if w > 0.0 {
                rows.push((face, w / total));
            }
        }
        if rows.is_empty() {
            return Err(Error::MalformedComplex("support is empty".into()));
        }
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::MalformedComplex("duplicate faces".into()));
        }
        let mut flat = Vec::with_capacity(rows.len() * k);
        let mut ws = Vec::with_capacity(rows.len());
        for (face, w) in rows {
            flat.extend_from_slice(&face);
            ws.push(w);
        }
        let id = content_id(&universe, &flat, &ws);
        Ok(Self {
            id,
            marginals: (0..1usize << k).map(|_| OnceLock::new()).collect(),
            universe,
            faces: flat,
            weights: ws,
            certificate: OnceLock::new(),
        })
    }

    /// Content hash; two complexes with the same universe, support and weights share it.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn k(&self) -> usize {
        self.universe.k()
    }

    pub fn universe(&self) -> &PartiteUniverse {
        &self.universe
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.k())
    }

    /// Number of top faces in the support.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn face(&self, n: usize) -> &[u32] {
        let k = self.k();
        &self.faces[n * k..(n + 1) * k]
    }

    pub fn faces(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.len()).map(|n| self.face(n))
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The cached marginal `μ_S`.
    pub fn marginal(&self, s: Subset) -> Arc<Marginal> {
        assert!(s.fits(self.k()), "subset {s} out of range for k = {}", self.k());
        self.marginals[s.bits() as usize].get_or_init(|| Arc::new(self.compute_marginal(s))).clone()
    }

    fn compute_marginal(&self, s: Subset) -> Marginal {
        let n = self.len();
        let coords = s.to_vec();
        let width = coords.len();
        if s == self.full() {
            return Marginal {
                subset: s,
                width,
                points: self.faces.clone(),
                weights: self.weights.clone(),
                face_index: (0..n as u32).collect(),
            };
        }
        let keys: Vec<u32> = self.faces().flat_map(|face| coords.iter().map(move |&i| face[i])).collect();
        let key = |f: usize| &keys[f * width..(f + 1) * width];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| key(a).cmp(key(b)));
        let mut points = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut face_index = vec![0u32; n];
        let mut prev: Option<usize> = None;
        for &f in &order {
            if prev.is_none_or(|p| key(p) != key(f)) {
                points.extend_from_slice(key(f));
                weights.push(0.0);
            }
            let p = weights.len() - 1;
            weights[p] += self.weights[f];
            face_index[f] = p as u32;
            prev = Some(f);
        }
        Marginal { subset: s, width, points, weights, face_index }
    }

    /// For `sub ⊆ sup`, the index of each `μ_sup` point's projection onto `sub`.
    pub fn projection_map(&self, sup: Subset, sub: Subset) -> Vec<u32> {
        assert!(sub.is_subset_of(sup), "{sub} is not a subset of {sup}");
        let big = self.marginal(sup);
        let small = self.marginal(sub);
        let mut map = vec![0u32; big.len()];
        for (bi, si) in big.face_index.iter().zip(&small.face_index) {
            map[*bi as usize] = *si;
        }
        map
    }

    /// `μ_S` as a complex on the parts in `S`.
    pub fn marginal_complex(&self, s: Subset) -> WeightedComplex {
        let m = self.marginal(s);
        let faces = (0..m.len()).map(|p| m.point(p).to_vec()).collect();
        WeightedComplex::from_masses(self.universe.select(s), faces, m.weights.clone())
            .expect("marginal of a valid complex is valid")
    }

    /// Locate a partial assignment in `supp μ_S`.
    pub fn locate(&self, x: &PartialAssignment) -> Result<usize> {
        if !x.subset.fits(self.k()) {
            return Err(Error::InvalidArgument(format!("assignment on {} out of range", x.subset)));
        }
        self.marginal(x.subset).find(&x.values).ok_or_else(|| Error::ZeroMassPoint(x.to_string()))
    }

    /// The link `μ_x` on the complementary parts.
    pub fn link(&self, x: &PartialAssignment) -> Result<WeightedComplex> {
        let p = self.locate(x)?;
        let m = self.marginal(x.subset);
        let mass = m.weights[p];
        let rest = x.subset.complement(self.k());
        let rest_coords = rest.to_vec();
        let mut faces = Vec::new();
        let mut weights = Vec::new();
        for (n, &fi) in m.face_index.iter().enumerate() {
            if fi as usize == p {
                let face = self.face(n);
                faces.push(rest_coords.iter().map(|&i| face[i]).collect());
                weights.push(self.weights[n] / mass);
            }
        }
        WeightedComplex::new(self.universe.select(rest), faces, weights)
    }

    /// The ε-certificate of this complex, computed once.
    pub fn certificate(&self) -> Arc<crate::operators::EpsCertificate> {
        self.certificate.get_or_init(|| Arc::new(crate::operators::certify_epsilon(self))).clone()
    }

    /// Constant function on `μ_S`.
    pub fn constant(&self, s: Subset, c: f64) -> Fn {
        Fn { complex_id: self.id, home: s, values: vec![c; self.marginal(s).len()] }
    }

    /// Function on `μ_S` from values aligned to the canonical point order.
    pub fn function(&self, home: Subset, values: Vec<f64>) -> Result<Fn> {
        if !home.fits(self.k()) {
            return Err(Error::InvalidArgument(format!("home {home} out of range")));
        }
        let n = self.marginal(home).len();
        if values.len() != n {
            return Err(Error::DomainMismatch(format!("{} values for a support of size {n}", values.len())));
        }
        Ok(Fn { complex_id: self.id, home, values })
    }

    /// Function on `μ_S` evaluated pointwise from element indices.
    pub fn tabulate(&self, home: Subset, g: impl FnMut(&[u32]) -> f64) -> Fn {
        let m = self.marginal(home);
        let values = (0..m.len()).map(|p| m.point(p)).map(g).collect();
        Fn { complex_id: self.id, home, values }
    }

    pub(crate) fn check(&self, f: &Fn) -> Result<()> {
        if f.complex_id != self.id {
            return Err(Error::DomainMismatch(format!(
                "function belongs to complex {:016x}, not {:016x}",
                f.complex_id, self.id
            )));
        }
        Ok(())
    }

    pub(crate) fn check_pair(&self, f: &Fn, g: &Fn) -> Result<()> {
        self.check(f)?;
        self.check(g)?;
        if f.home != g.home {
            return Err(Error::DomainMismatch(format!("homes {} and {} differ", f.home, g.home)));
        }
        Ok(())
    }

    /// `⟨f, g⟩ = Σ μ_home(x) f(x) g(x)`.
    pub fn inner(&self, f: &Fn, g: &Fn) -> Result<f64> {
        self.check_pair(f, g)?;
        let m = self.marginal(f.home);
        let terms: Vec<f64> = m.weights.iter().zip(&f.values).zip(&g.values).map(|((w, a), b)| w * a * b).collect();
        Ok(pairwise_sum(&terms))
    }

    /// Inner product after lifting both functions to the full support.
    pub fn inner_lifted(&self, f: &Fn, g: &Fn) -> Result<f64> {
        if f.home == g.home {
            return self.inner(f, g);
        }
        let home = f.home.union(g.home);
        self.inner(&self.lift_to(f, home)?, &self.lift_to(g, home)?)
    }

    pub fn expectation(&self, f: &Fn) -> Result<f64> {
        self.check(f)?;
        Ok(weighted_sum(&self.marginal(f.home).weights, &f.values, |v| v))
    }

    /// `‖f‖_p` for real `p ≥ 1`, or the sup norm over the support for `p = ∞`.
    pub fn norm_p(&self, f: &Fn, p: f64) -> Result<f64> {
        self.check(f)?;
        if p.is_infinite() {
            return Ok(f.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!("norm exponent {p} < 1")));
        }
        let w = &self.marginal(f.home).weights;
        let s = if p == 2.0 {
            weighted_sum(w, &f.values, |v| v * v)
        } else if p == 4.0 {
            weighted_sum(w, &f.values, |v| (v * v) * (v * v))
        } else {
            weighted_sum(w, &f.values, |v| v.abs().powf(p))
        };
        Ok(s.powf(1.0 / p))
    }

    pub fn norm2(&self, f: &Fn) -> f64 {
        self.norm_p(f, 2.0).expect("checked function")
    }

    pub fn norm2_sq(&self, f: &Fn) -> f64 {
        self.check(f).expect("checked function");
        weighted_sum(&self.marginal(f.home).weights, &f.values, |v| v * v)
    }

    pub fn norm4_pow4(&self, f: &Fn) -> f64 {
        self.check(f).expect("checked function");
        weighted_sum(&self.marginal(f.home).weights, &f.values, |v| (v * v) * (v * v))
    }

    pub fn norm_inf(&self, f: &Fn) -> f64 {
        f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// View `g` (home `S`) as a function on `μ_R` for `R ⊇ S`.
    pub fn lift_to(&self, g: &Fn, target: Subset) -> Result<Fn> {
        self.check(g)?;
        if !g.home.is_subset_of(target) || !target.fits(self.k()) {
            return Err(Error::DomainMismatch(format!("cannot lift from {} to {target}", g.home)));
        }
        if g.home == target {
            return Ok(g.clone());
        }
        let values = if target == self.full() {
            self.marginal(g.home).face_index.iter().map(|&p| g.values[p as usize]).collect()
        } else {
            self.projection_map(target, g.home).iter().map(|&p| g.values[p as usize]).collect()
        };
        Ok(Fn { complex_id: self.id, home: target, values })
    }

    /// View `g` as a function on the full support.
    pub fn lift(&self, g: &Fn) -> Result<Fn> {
        self.lift_to(g, self.full())
    }

    /// `y ↦ f(x, y)` on the link of `μ_home` at `x`, where `x` fixes `S ⊆ home`.
    pub fn restrict_fix(&self, f: &Fn, x: &PartialAssignment) -> Result<Restriction> {
        self.check(f)?;
        if !x.subset.is_subset_of(f.home) {
            return Err(Error::DomainMismatch(format!("assignment on {} is not inside home {}", x.subset, f.home)));
        }
        self.locate(x)?;
        let home_complex = self.marginal_complex(f.home);
        // coordinates of x relative to the home complex
        let rel =
            Subset::from_indices(f.home.iter().enumerate().filter(|(_, i)| x.subset.contains(*i)).map(|(n, _)| n));
        let rel_x = PartialAssignment::new(rel, x.values.clone());
        let link = home_complex.link(&rel_x)?;
        let hm = home_complex.marginal(home_complex.full());
        let rm = home_complex.marginal(rel);
        let p = rm.find(&x.values).expect("located above");
        let values: Vec<f64> = (0..hm.len()).filter(|&q| rm.face_index[q] as usize == p).map(|q| f.values[q]).collect();
        let func = link.function(link.full(), values)?;
        Ok(Restriction { link, func })
    }

    /// `supp μ_S` points as partial assignments.
    pub fn points(&self, s: Subset) -> Vec<PartialAssignment> {
        let m = self.marginal(s);
        (0..m.len()).map(|p| PartialAssignment::new(s, m.point(p).to_vec())).collect()
    }

    pub fn to_file(&self) -> ComplexFile {
        ComplexFile {
            parts: self.universe.parts.clone(),
            faces: self.faces().map(<[u32]>::to_vec).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn from_file(file: ComplexFile) -> Result<Self> {
        if file.parts.is_empty() {
            return Err(Error::MalformedComplex("a complex needs at least one part".into()));
        }
        Self::new(PartiteUniverse::new(file.parts)?, file.faces, file.weights)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("complex serializes")
    }

    pub fn fn_from_file(&self, file: FnFile) -> Result<Fn> {
        let home = Subset::from_indices(file.home.iter().copied());
        if file.home.iter().any(|&i| i >= self.k()) {
            return Err(Error::InvalidArgument("home index out of range".into()));
        }
        self.function(home, file.values)
    }
}

fn check_weights(weights: &[f64]) -> Result<f64> {
    for (face, &weight) in weights.iter().enumerate() {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::NegativeWeight { face, weight });
        }
    }
    Ok(weights.iter().sum())
}

fn content_id(universe: &PartiteUniverse, faces: &[u32], weights: &[f64]) -> u64 {
    let mut h = Sha256::new();
    h.update((universe.k() as u64).to_le_bytes());
    for part in &universe.parts {
        h.update((part.len() as u64).to_le_bytes());
        for label in part {
            h.update((label.len() as u64).to_le_bytes());
            h.update(label.as_bytes());
        }
    }
    for v in faces {
        h.update(v.to_le_bytes());
    }
    for w in weights {
        h.update(w.to_bits().to_le_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Element indices for the coordinates of a subset, in increasing coordinate order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartialAssignment {
    pub subset: Subset,
    pub values: Vec<u32>,
}

impl PartialAssignment {
    pub fn new(subset: Subset, values: Vec<u32>) -> Self {
        assert_eq!(subset.len(), values.len(), "assignment width mismatch");
        Self { subset, values }
    }

    pub fn empty() -> Self {
        Self { subset: Subset::EMPTY, values: Vec::new() }
    }

    /// Assignment from `(coordinate, element)` pairs in any order.
    pub fn from_pairs(pairs: &[(usize, u32)]) -> Self {
        let mut sorted = pairs.to_vec();
        sorted.sort();
        let subset = Subset::from_indices(sorted.iter().map(|p| p.0));
        Self::new(subset, sorted.into_iter().map(|p| p.1).collect())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.subset.iter().zip(self.values.iter().copied())
    }

    /// Union of two assignments on disjoint coordinates.
    pub fn join(&self, other: &PartialAssignment) -> PartialAssignment {
        assert!(self.subset.is_disjoint(other.subset));
        let pairs: Vec<(usize, u32)> = self.pairs().chain(other.pairs()).collect();
        Self::from_pairs(&pairs)
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (n, (i, v)) in self.pairs().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "x{i}={v}")?;
        }
        f.write_str(")")
    }
}

/// A real function on `supp μ_home`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fn {
    complex_id: u64,
    home: Subset,
    values: Vec<f64>,
}

impl Fn {
    pub fn complex_id(&self) -> u64 {
        self.complex_id
    }

    pub fn home(&self) -> Subset {
        self.home
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    fn compatible(&self, other: &Fn) -> Result<()> {
        if self.complex_id != other.complex_id || self.home != other.home {
            return Err(Error::DomainMismatch(format!(
                "cannot combine functions on {}@{:016x} and {}@{:016x}",
                self.home, self.complex_id, other.home, other.complex_id
            )));
        }
        Ok(())
    }

    /// `self + c · other`.
    pub fn axpy(&self, c: f64, other: &Fn) -> Result<Fn> {
        self.compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Ok(Fn { values, ..self.clone() })
    }

    pub fn add(&self, other: &Fn) -> Result<Fn> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Fn) -> Result<Fn> {
        self.axpy(-1.0, other)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Fn) -> Result<Fn> {
        self.compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Fn { values, ..self.clone() })
    }

    pub fn scale(&self, c: f64) -> Fn {
        self.map(|v| c * v)
    }

    pub fn map(&self, g: impl FnMut(f64) -> f64) -> Fn {
        Fn { values: self.values.iter().copied().map(g).collect(), ..self.clone() }
    }

    pub fn max_abs_diff(&self, other: &Fn) -> Result<f64> {
        self.compatible(other)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    pub fn to_file(&self) -> FnFile {
        FnFile { home: self.home.to_vec(), values: self.values.clone() }
    }
}

/// A function on a link together with the link complex itself.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub link: WeightedComplex,
    pub func: Fn,
}

/// On-disk complex format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    #[serde(deserialize_with = "labels::deserialize")]
    pub parts: Vec<Vec<String>>,
    pub faces: Vec<Vec<u32>>,
    pub weights: Vec<f64>,
}

/// On-disk function format, aligned to the canonical order of its complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnFile {
    pub home: Vec<usize>,
    pub values: Vec<f64>,
}

mod labels {
    use serde::{Deserialize, Deserializer};
    use serde_json::Value;

    /// Labels may be strings or any other JSON scalar.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<String>>, D::Error> {
        let raw: Vec<Vec<Value>> = Vec::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|part| {
                part.into_iter()
                    .map(|v| match v {
                        Value::String(s) => s,
                        other => other.to_string(),
                    })
                    .collect()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits2(weights: [f64; 4]) -> WeightedComplex {
        WeightedComplex::new(
            PartiteUniverse::with_sizes(&[2, 2]).unwrap(),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
            weights.to_vec(),
        )
        .unwrap()
    }

    fn eta_pair(eta: f64) -> WeightedComplex {
        let (a, b) = ((1.0 + eta) / 4.0, (1.0 - eta) / 4.0);
        bits2([a, b, b, a])
    }

    #[test]
    fn uniform_marginal_is_uniform() {
        let mu = bits2([0.25; 4]);
        let m = mu.marginal(Subset::singleton(0));
        assert_eq!(m.weights(), &[0.5, 0.5]);
        let full = mu.marginal(mu.full());
        assert_eq!(full.weights(), mu.weights());
    }

    #[test]
    fn eta_pair_marginal_sums_faces() {
        let mu = eta_pair(0.3);
        let m = mu.marginal(Subset::singleton(1));
        assert!((m.weights()[0] - 0.5).abs() < 1e-15);
        assert!((m.weights()[1] - 0.5).abs() < 1e-15);
        let e = mu.marginal(Subset::EMPTY);
        assert_eq!(e.len(), 1);
        assert!((e.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eta_pair_link_is_biased() {
        let eta = 0.3;
        let mu = eta_pair(eta);
        let link = mu.link(&PartialAssignment::from_pairs(&[(0, 1)])).unwrap();
        assert_eq!(link.k(), 1);
        assert!((link.weights()[1] - (1.0 + eta) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn link_rejects_zero_mass_point() {
        let mu = bits2([0.5, 0.0, 0.0, 0.5]);
        assert_eq!(mu.len(), 2);
        let err = mu.link(&PartialAssignment::from_pairs(&[(0, 0), (1, 1)])).unwrap_err();
        assert!(matches!(err, Error::ZeroMassPoint(_)));
    }

    #[test]
    fn construction_validates_input() {
        let u = PartiteUniverse::with_sizes(&[2]).unwrap();
        let e = WeightedComplex::new(u.clone(), vec![vec![0], vec![1]], vec![0.5, 0.6]).unwrap_err();
        assert!(matches!(e, Error::MalformedComplex(_)));
        let e = WeightedComplex::new(u.clone(), vec![vec![0], vec![1]], vec![1.5, -0.5]).unwrap_err();
        assert!(matches!(e, Error::NegativeWeight { face: 1, .. }));
        let e = WeightedComplex::new(u.clone(), vec![vec![0], vec![0]], vec![0.5, 0.5]).unwrap_err();
        assert!(matches!(e, Error::MalformedComplex(_)));
        let e = WeightedComplex::new(u, vec![vec![2]], vec![1.0]).unwrap_err();
        assert!(matches!(e, Error::MalformedComplex(_)));
        let too_many = PartiteUniverse::with_sizes(&[1; 13]).unwrap_err();
        assert!(matches!(too_many, Error::TooManyParts { k: 13, .. }));
    }

    #[test]
    fn faces_are_sorted_and_normalized() {
        let u = PartiteUniverse::with_sizes(&[2, 2]).unwrap();
        let mu = WeightedComplex::new(u, vec![vec![1, 1], vec![0, 1]], vec![0.5000001, 0.5]).unwrap();
        assert_eq!(mu.face(0), &[0, 1]);
        let total: f64 = mu.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dictator_norms() {
        let mu = bits2([0.25; 4]);
        let f = mu.tabulate(mu.full(), |x| (x[0] == 1) as u8 as f64);
        assert!((mu.norm2_sq(&f) - 0.5).abs() < 1e-15);
        assert!((mu.norm4_pow4(&f) - 0.5).abs() < 1e-15);
        assert_eq!(mu.norm_inf(&f), 1.0);
        let one = mu.constant(mu.full(), 1.0);
        assert_eq!(mu.inner(&f, &one).unwrap(), mu.expectation(&f).unwrap());
    }

    #[test]
    fn constant_norms() {
        let mu = eta_pair(0.2);
        let c = mu.constant(mu.full(), -3.0);
        assert!((mu.expectation(&c).unwrap() + 3.0).abs() < 1e-14);
        assert!((mu.norm2(&c) - 3.0).abs() < 1e-14);
        let lifted = mu.lift(&mu.constant(Subset::EMPTY, 2.0)).unwrap();
        assert!(lifted.values().iter().all(|&v| v == 2.0));
    }

    #[test]
    fn inner_rejects_mismatched_homes() {
        let mu = bits2([0.25; 4]);
        let f = mu.constant(Subset::singleton(0), 1.0);
        let g = mu.constant(Subset::singleton(1), 1.0);
        assert!(matches!(mu.inner(&f, &g), Err(Error::DomainMismatch(_))));
        let other = eta_pair(0.1);
        let h = other.constant(Subset::singleton(0), 1.0);
        assert!(matches!(mu.inner(&f, &h), Err(Error::DomainMismatch(_))));
        assert!(f.add(&h).is_err());
    }

    #[test]
    fn dictator_restriction_is_constant_one() {
        let mu = bits2([0.25; 4]);
        let f = mu.tabulate(mu.full(), |x| (x[0] == 1) as u8 as f64);
        let r = mu.restrict_fix(&f, &PartialAssignment::from_pairs(&[(0, 1)])).unwrap();
        assert!(r.func.values().iter().all(|&v| v == 1.0));
        assert_eq!(r.link.k(), 1);
    }

    #[test]
    fn json_roundtrip_accepts_numeric_labels() {
        let text = r#"{"parts": [[0, 1], ["a", "b"]], "faces": [[0,0],[1,1]], "weights": [0.5, 0.5]}"#;
        let mu = WeightedComplex::from_json(text).unwrap();
        assert_eq!(mu.universe().parts()[0], vec!["0".to_string(), "1".to_string()]);
        let back = WeightedComplex::from_json(&mu.to_json()).unwrap();
        assert_eq!(back.id(), mu.id());
    }
}
