//! Seeded instance generators for complexes and functions.
//!
//! Every generator draws from `ChaCha8Rng` seeded with the spec's seed; measures use
//! stream 0 and functions use stream 1, so a complex and a function drawn with the
//! same seed are independent.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::require_global;
use crate::decomposition::es_component;
use crate::error::{Error, Result};
use crate::measure::{Fn, PartiteUniverse, WeightedComplex};
use crate::subset::Subset;

const MEASURE_STREAM: u64 = 0;
const FUNCTION_STREAM: u64 = 1;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Single-coordinate marginals of a product measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Marginals {
    Uniform,
    /// Seeded weights drawn from `[0.1, 1]`, normalized.
    Random,
    Explicit {
        weights: Vec<Vec<f64>>,
    },
    /// The first `light` atoms of every part carry mass `mass`; the rest share the remainder.
    Light {
        light: usize,
        mass: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureKind {
    Product { sizes: Vec<usize>, marginals: Marginals },
    EtaCorrelated { eta: f64 },
    PerturbedProduct { sizes: Vec<usize>, gamma: f64 },
    SparseRandom { sizes: Vec<usize>, density: f64 },
}

/// A reproducible complex: the same spec always builds the same bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub kind: MeasureKind,
    #[serde(default)]
    pub seed: u64,
}

impl GenSpec {
    pub fn new(kind: MeasureKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    pub fn build(&self) -> Result<WeightedComplex> {
        match &self.kind {
            MeasureKind::Product { sizes, marginals } => gen_product(sizes, marginals, self.seed),
            MeasureKind::EtaCorrelated { eta } => gen_eta_correlated(*eta),
            MeasureKind::PerturbedProduct { sizes, gamma } => gen_perturbed_product(sizes, *gamma, self.seed),
            MeasureKind::SparseRandom { sizes, density } => gen_sparse_random(sizes, *density, self.seed),
        }
    }
}

fn sizes_label(sizes: &[usize]) -> String {
    sizes.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MeasureKind::Product { sizes, marginals } => {
                let m = match marginals {
                    Marginals::Uniform => "uniform".to_string(),
                    Marginals::Random => "random".to_string(),
                    Marginals::Explicit { .. } => "explicit".to_string(),
                    Marginals::Light { light, mass } => format!("light{light}@{mass}"),
                };
                write!(f, "product({},{m},seed={})", sizes_label(sizes), self.seed)
            }
            MeasureKind::EtaCorrelated { eta } => write!(f, "eta-correlated(eta={eta})"),
            MeasureKind::PerturbedProduct { sizes, gamma } => {
                write!(f, "perturbed({},gamma={gamma},seed={})", sizes_label(sizes), self.seed)
            }
            MeasureKind::SparseRandom { sizes, density } => {
                write!(f, "sparse({},density={density},seed={})", sizes_label(sizes), self.seed)
            }
        }
    }
}

/// All tuples of `V_1 × ⋯ × V_k` in lexicographic order.
fn grid(sizes: &[usize]) -> Vec<Vec<u32>> {
    let mut faces = vec![Vec::new()];
    for &n in sizes {
        faces = faces
            .into_iter()
            .flat_map(|f: Vec<u32>| {
                (0..n as u32).map(move |a| {
                    let mut g = f.clone();
                    g.push(a);
                    g
                })
            })
            .collect();
    }
    faces
}

fn marginal_weights(sizes: &[usize], marginals: &Marginals, r: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    let normalize = |w: Vec<f64>| {
        let t: f64 = w.iter().sum();
        w.into_iter().map(|v| v / t).collect::<Vec<_>>()
    };
    match marginals {
        Marginals::Uniform => Ok(sizes.iter().map(|&n| vec![1.0 / n as f64; n]).collect()),
        Marginals::Random => {
            Ok(sizes.iter().map(|&n| normalize((0..n).map(|_| r.gen_range(0.1..=1.0)).collect())).collect())
        }
        Marginals::Explicit { weights } => {
            if weights.len() != sizes.len() || weights.iter().zip(sizes).any(|(w, &n)| w.len() != n) {
                return Err(Error::InvalidArgument("explicit marginals do not match part sizes".into()));
            }
            for (i, w) in weights.iter().enumerate() {
                if w.iter().any(|&v| v.is_nan() || v < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidArgument(format!("marginal {i} is not a probability vector")));
                }
            }
            Ok(weights.clone())
        }
        Marginals::Light { light, mass } => sizes.iter().map(|&n| light_marginal(n, *light, *mass)).collect(),
    }
}

/// A marginal on `n` atoms whose first `light` atoms have mass `mass` each.
pub fn light_marginal(n: usize, light: usize, mass: f64) -> Result<Vec<f64>> {
    if light >= n || mass.is_nan() || mass <= 0.0 || mass * light as f64 >= 1.0 {
        return Err(Error::InvalidArgument(format!("cannot put {light} atoms of mass {mass} among {n}")));
    }
    let heavy = (1.0 - mass * light as f64) / (n - light) as f64;
    Ok((0..n).map(|a| if a < light { mass } else { heavy }).collect())
}

/// Product of the given marginals over all of `V_1 × ⋯ × V_k`.
pub fn gen_product(sizes: &[usize], marginals: &Marginals, seed: u64) -> Result<WeightedComplex> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidArgument("part sizes must be positive".into()));
    }
    let m = marginal_weights(sizes, marginals, &mut rng(seed, MEASURE_STREAM))?;
    let faces = grid(sizes);
    let masses = faces.iter().map(|f| f.iter().enumerate().map(|(i, &a)| m[i][a as usize]).product()).collect();
    WeightedComplex::from_masses(PartiteUniverse::with_sizes(sizes)?, faces, masses)
}

/// Two correlated uniform bits: `μ(00) = μ(11) = (1+η)/4`, `μ(01) = μ(10) = (1−η)/4`.
pub fn gen_eta_correlated(eta: f64) -> Result<WeightedComplex> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("eta = {eta} is outside [0, 1)")));
    }
    let (a, b) = ((1.0 + eta) / 4.0, (1.0 - eta) / 4.0);
    WeightedComplex::new(
        PartiteUniverse::with_sizes(&[2, 2])?,
        vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
        vec![a, b, b, a],
    )
}

/// Uniform product with weights scaled by `1 + γ u(face)` for seeded `u ∈ [−1, 1]`.
pub fn gen_perturbed_product(sizes: &[usize], gamma: f64, seed: u64) -> Result<WeightedComplex> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be nonnegative")));
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidArgument("part sizes must be positive".into()));
    }
    let mut r = rng(seed, MEASURE_STREAM);
    let faces = grid(sizes);
    let mut masses = Vec::with_capacity(faces.len());
    for n in 0..faces.len() {
        let w = 1.0 + gamma * r.gen_range(-1.0..=1.0);
        if w < 0.0 {
            return Err(Error::NegativeWeight { face: n, weight: w });
        }
        masses.push(w);
    }
    WeightedComplex::from_masses(PartiteUniverse::with_sizes(sizes)?, faces, masses)
}

/// Each face of the grid kept with probability `density` and given a seeded weight in `[0.5, 1.5]`.
///
/// One seeded face is always kept, so the support is never empty.
pub fn gen_sparse_random(sizes: &[usize], density: f64, seed: u64) -> Result<WeightedComplex> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!("density = {density} is outside (0, 1]")));
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidArgument("part sizes must be positive".into()));
    }
    let mut r = rng(seed, MEASURE_STREAM);
    let all = grid(sizes);
    let fallback = r.gen_range(0..all.len());
    let (mut faces, mut masses) = (Vec::new(), Vec::new());
    for (n, f) in all.into_iter().enumerate() {
        let keep = r.gen_bool(density);
        let w = r.gen_range(0.5..=1.5);
        if keep || n == fallback {
            faces.push(f);
            masses.push(w);
        }
    }
    WeightedComplex::from_masses(PartiteUniverse::with_sizes(sizes)?, faces, masses)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FnKind {
    /// `1[x_coord = value]`.
    Dictator {
        coord: usize,
        value: u32,
    },
    /// `Σ_{|S|≤d} lift(h_S^{=S})` for seeded `h_S` with values in `[−1, 1]`.
    RandomLowDegree {
        d: usize,
    },
    /// Independent `p`-coins per face, required to be `(d, δ)`-global.
    RandomGlobalSet {
        p: f64,
        d: usize,
        delta: f64,
    },
    RandomBoolean {
        p: f64,
    },
    /// Independent `p`-coins on faces whose every coordinate is below `light`; zero elsewhere.
    LightCornerSet {
        p: f64,
        light: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnSpec {
    #[serde(flatten)]
    pub kind: FnKind,
    #[serde(default)]
    pub seed: u64,
}

impl FnSpec {
    pub fn new(kind: FnKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    pub fn build(&self, mu: &WeightedComplex) -> Result<Fn> {
        gen_function(mu, self)
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FnKind::Dictator { coord, value } => write!(f, "dictator(x{coord}={value})"),
            FnKind::RandomLowDegree { d } => write!(f, "low-degree(d={d},seed={})", self.seed),
            FnKind::RandomGlobalSet { p, d, delta } => {
                write!(f, "global-set(p={p},d={d},delta={delta},seed={})", self.seed)
            }
            FnKind::RandomBoolean { p } => write!(f, "boolean(p={p},seed={})", self.seed),
            FnKind::LightCornerSet { p, light } => write!(f, "light-corner(p={p},light={light},seed={})", self.seed),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} is outside [0, 1]")));
    }
    Ok(())
}

/// A function on the full support of `mu` drawn from `spec`.
pub fn gen_function(mu: &WeightedComplex, spec: &FnSpec) -> Result<Fn> {
    let mut r = rng(spec.seed, FUNCTION_STREAM);
    match spec.kind {
        FnKind::Dictator { coord, value } => {
            if coord >= mu.k() {
                return Err(Error::InvalidArgument(format!("coordinate {coord} out of range")));
            }
            Ok(mu.tabulate(mu.full(), |x| (x[coord] == value) as u8 as f64))
        }
        FnKind::RandomLowDegree { d } => {
            let mut acc = vec![0.0; mu.len()];
            for s in Subset::up_to_size(mu.k(), d) {
                let n = mu.marginal(s).len();
                let h = mu.function(s, (0..n).map(|_| r.gen_range(-1.0..=1.0)).collect())?;
                let c = mu.lift(&es_component(mu, &h, s)?)?;
                for (a, v) in acc.iter_mut().zip(c.values()) {
                    *a += v;
                }
            }
            mu.function(mu.full(), acc)
        }
        FnKind::RandomGlobalSet { p, d, delta } => {
            check_p(p)?;
            let f = mu.tabulate(mu.full(), |_| r.gen_bool(p) as u8 as f64);
            require_global(mu, &f, d, delta)?;
            Ok(f)
        }
        FnKind::RandomBoolean { p } => {
            check_p(p)?;
            Ok(mu.tabulate(mu.full(), |_| r.gen_bool(p) as u8 as f64))
        }
        FnKind::LightCornerSet { p, light } => {
            check_p(p)?;
            Ok(mu.tabulate(mu.full(), |x| {
                let coin = r.gen_bool(p);
                (coin && x.iter().all(|&a| a < light)) as u8 as f64
            }))
        }
    }
}
