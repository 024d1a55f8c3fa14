//! Named check suites over seeded instance grids, and their reports.

mod report;
mod suites;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::check::{ids, CheckRecord};
use crate::error::{Error, Result};

pub use report::{write_csv, write_jsonl, write_markdown, ReportHeader};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Suites runnable by name; `default` runs all of them.
pub const SUITES: [&str; 5] = ["exact-identities", "product-oracle", "eps-sweep", "applications", "tracking"];

/// Ceiling on `residual / shape` for a reported check: `2^(base_log2 + per_k_log2 · k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ceiling {
    pub base_log2: f64,
    pub per_k_log2: f64,
}

impl Ceiling {
    pub fn at(&self, k: usize) -> f64 {
        (self.base_log2 + self.per_k_log2 * k as f64).exp2()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative slack on exact identities and explicit-constant bounds.
    pub relative: f64,
    /// Absolute bound on cross inner products and Parseval defects on products.
    pub product_oracle: f64,
    /// Absolute error allowed on certified `ε` for known instances.
    pub certificate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grids {
    pub seeds: Vec<u64>,
    pub etas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub rhos: Vec<f64>,
    pub degrees: Vec<usize>,
    pub set_densities: Vec<f64>,
    pub identity_pairs: usize,
    pub identity_sizes: Vec<Vec<usize>>,
    pub product_sizes: Vec<Vec<usize>>,
    pub perturbed_sizes: Vec<Vec<usize>>,
    pub application_sizes: Vec<Vec<usize>>,
    pub kk_sizes: Vec<usize>,
    pub kk_sets: usize,
    pub kk_light_atoms: usize,
    pub kk_light_mass: f64,
    pub kk_density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub ceilings: BTreeMap<String, Ceiling>,
    pub tolerances: Tolerances,
    pub grids: Grids,
}

/// Checks whose status is REPORT off-product and therefore need a ceiling.
pub const REPORTED: [&str; 8] = [
    ids::INFLUENCE_BOUNDS,
    ids::PRODUCT_HYPERCONTRACTIVITY,
    ids::HDX_HYPERCONTRACTIVITY,
    ids::FOURIER_CONCENTRATION,
    ids::SMALL_SET_EXPANSION,
    ids::KRUSKAL_KATONA,
    ids::L4_CLOSENESS,
    ids::DERIVATIVE_FAMILY,
];

impl Default for SuiteConfig {
    fn default() -> Self {
        let ceilings =
            REPORTED.iter().map(|id| (id.to_string(), Ceiling { base_log2: 0.0, per_k_log2: 10.0 })).collect();
        Self {
            ceilings,
            tolerances: Tolerances { relative: crate::numeric::ABS_TOL, product_oracle: 1e-10, certificate: 1e-9 },
            grids: Grids {
                seeds: vec![1, 2, 3],
                etas: vec![0.01, 0.02, 0.05, 0.1],
                gammas: vec![0.02, 0.05, 0.1],
                rhos: vec![0.25, 0.5, 0.9],
                degrees: vec![0, 1, 2, 3],
                set_densities: vec![0.05, 0.1],
                identity_pairs: 60,
                identity_sizes: vec![vec![3, 2, 2], vec![2, 3, 2, 2], vec![2, 2, 2, 2, 2], vec![3, 3, 3], vec![4, 3]],
                product_sizes: vec![
                    vec![2, 2, 2],
                    vec![3, 2, 4],
                    vec![2, 2, 2, 2],
                    vec![3, 3, 2, 2],
                    vec![2, 2, 2, 2, 2],
                ],
                perturbed_sizes: vec![vec![3, 3, 3], vec![2, 2, 2, 2]],
                application_sizes: vec![vec![6, 6, 6], vec![4, 4, 4, 4]],
                kk_sizes: vec![4, 4, 4, 4],
                kk_sets: 12,
                kk_light_atoms: 2,
                kk_light_mass: 0.005,
                kk_density: 0.5,
            },
        }
    }
}

impl SuiteConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for id in REPORTED {
            if !self.ceilings.contains_key(id) {
                return Err(Error::InvalidArgument(format!("config has no ceiling for {id}")));
            }
        }
        if self.tolerances.relative != crate::numeric::ABS_TOL {
            return Err(Error::InvalidArgument(format!("relative tolerance is fixed at {}", crate::numeric::ABS_TOL)));
        }
        Ok(())
    }

    pub fn ceiling(&self, id: &str, k: usize) -> f64 {
        self.ceilings.get(id).map_or(f64::INFINITY, |c| c.at(k))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_string(self).expect("config serializes").as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// One catalog entry: a check id and the statement it verifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub kind: &'static str,
    pub statement: &'static str,
}

pub const CATALOG: [CatalogEntry; 21] = [
    CatalogEntry {
        id: ids::RECONSTRUCTION,
        kind: "exact",
        statement: "f = sum of its Efron-Stein components; A_S f = sum of components inside S",
    },
    CatalogEntry {
        id: ids::LAPLACIAN_EQUIVALENCE,
        kind: "exact",
        statement: "alternating-average Laplacian = sum of components above S",
    },
    CatalogEntry {
        id: ids::NOISE_EQUIVALENCE,
        kind: "exact",
        statement: "binomial average form of T_rho = sum rho^|S| f^{=S}",
    },
    CatalogEntry {
        id: ids::UPDOWN_EQUIVALENCE,
        kind: "exact",
        statement: "(1/k) sum_i A_{[k]-i} f = sum (k-|S|)/k f^{=S}",
    },
    CatalogEntry {
        id: ids::CONTRACTION,
        kind: "hard",
        statement: "averaging contracts L2 and Linf; |f^{=S}| <= 2^|S| |f|",
    },
    CatalogEntry {
        id: ids::DISJOINT_AVERAGING,
        kind: "hard",
        statement: "|A_{S,T} f - E f|^2 <= |S||T| eps^2 |f|^2 for disjoint S, T",
    },
    CatalogEntry {
        id: ids::COMPOSITION,
        kind: "hard",
        statement:
            "|A_{S,T} f - A_{S,S&T} f|^2 <= |S||T| eps^2 |f|^2 and |A_T2 A_T1 f - A_{T1&T2} f| <= |T1||T2| eps |f|",
    },
    CatalogEntry {
        id: ids::NEAR_ORTHOGONALITY,
        kind: "hard",
        statement: "|<f^{=S}, g^{=T}>| <= 2^(2|S|+2|T|) eps |f||g| for S != T",
    },
    CatalogEntry {
        id: ids::APPROX_PARSEVAL,
        kind: "hard",
        statement: "|<f,g> - sum <f^{=S}, g^{=S}>| <= 2^(4k) eps |f||g|, and 2^(4|T|) for T-juntas",
    },
    CatalogEntry {
        id: ids::IDEMPOTENCE,
        kind: "hard",
        statement:
            "|(f^{=S})^{=T}|^2 <= 2^(8k) eps^2 |f|^2 for T != S; |(f^{=S})^{=S} - f^{=S}|^2 <= 2^(10k) eps^2 |f|^2",
    },
    CatalogEntry {
        id: ids::JUNTA_ORTHOGONALITY,
        kind: "hard",
        statement: "|<f^{=S}, g>| <= eps sqrt(|S||T|) 2^|S| |f||g| for a T-junta g with S not inside T",
    },
    CatalogEntry {
        id: ids::STRONG_PARSEVAL,
        kind: "hard",
        statement: "Parseval for approximate decompositions within 2^(6k)(eps1 a2 + eps2 a1 + eps a1 a2)",
    },
    CatalogEntry {
        id: ids::GLOBAL_COMPONENT_BOUND,
        kind: "hard",
        statement: "|f^{=T}|inf <= 2^|T| delta for (d, delta)-global f",
    },
    CatalogEntry {
        id: ids::INFLUENCE_BOUNDS,
        kind: "tracked",
        statement: "E I^2 <= 2^(d+1) delta^2 E I and E (I^{<=d})^2 <= 2^(d+4) delta^2 E I^{<=d} for global f",
    },
    CatalogEntry {
        id: ids::PRODUCT_HYPERCONTRACTIVITY,
        kind: "tracked",
        statement:
            "product-space 4-norm bounds via influences, influence sum bound, globalness equivalence, cube 4-norm",
    },
    CatalogEntry {
        id: ids::HDX_HYPERCONTRACTIVITY,
        kind: "tracked",
        statement:
            "4-norm of f^{<=d} via truncated influences (20^d, 20^(d+1)), (100d)^d delta^2 bound, inductive 9^d bound",
    },
    CatalogEntry {
        id: ids::FOURIER_CONCENTRATION,
        kind: "tracked",
        statement: "|f^{<=d}|^2 <= (200d)^d delta^(1/2) |f|^2 for Boolean global f",
    },
    CatalogEntry {
        id: ids::SMALL_SET_EXPANSION,
        kind: "tracked",
        statement: "|T_rho f|^2 <= (rho^d + (100d)^d delta^2)|f|^2 for Boolean global f; noise bound via f^{<=d}",
    },
    CatalogEntry {
        id: ids::KRUSKAL_KATONA,
        kind: "tracked",
        statement: "shadow mass >= mu(A)(1 + d/(2k)) for global A; <f - Tf, f> <= shadow mass - mu(A)",
    },
    CatalogEntry {
        id: ids::L4_CLOSENESS,
        kind: "tracked",
        statement: "two approximate decompositions of f are close in L2 and L4",
    },
    CatalogEntry {
        id: ids::DERIVATIVE_FAMILY,
        kind: "tracked",
        statement: "link-wise components of derivatives form an approximate decomposition of L_T f",
    },
];

/// The output of one suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRun {
    pub suite: String,
    pub config_hash: String,
    pub records: Vec<CheckRecord>,
}

impl SuiteRun {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.failed())
    }

    pub fn any_failed(&self) -> bool {
        self.failures().next().is_some()
    }

    pub fn header(&self) -> ReportHeader {
        ReportHeader::new(&self.suite, &self.config_hash, self.records.len())
    }
}

pub(crate) type TaskFn = Box<dyn std::ops::Fn() -> Result<Vec<CheckRecord>> + Send + Sync>;

/// A unit of parallel work: one instance and the checks run on it.
pub(crate) struct Task {
    pub suite: &'static str,
    pub check_id: &'static str,
    pub instance: String,
    pub run: TaskFn,
}

impl Task {
    pub fn new(
        suite: &'static str,
        check_id: &'static str,
        instance: String,
        run: impl std::ops::Fn() -> Result<Vec<CheckRecord>> + Send + Sync + 'static,
    ) -> Self {
        Self { suite, check_id, instance, run: Box::new(run) }
    }

    /// Run, stamping instance and runtime; an error becomes a single FAIL record.
    fn execute(&self) -> Vec<CheckRecord> {
        let start = Instant::now();
        let out = (self.run)();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let records = match out {
            Ok(recs) => recs,
            Err(e) => vec![CheckRecord::hard(self.check_id, f64::INFINITY, 0.0).detail(format!("error: {e}"))],
        };
        let n = records.len().max(1) as f64;
        records
            .into_iter()
            .map(|mut r| {
                r.instance = format!("{}/{}", self.suite, self.instance);
                r.runtime_ms = ms / n;
                r
            })
            .collect()
    }
}

fn tasks_for(name: &str, cfg: &SuiteConfig) -> Result<Vec<Task>> {
    Ok(match name {
        "exact-identities" => suites::exact_identities(cfg),
        "product-oracle" => suites::product_oracle(cfg),
        "eps-sweep" => suites::eps_sweep(cfg),
        "applications" => suites::applications(cfg),
        "tracking" => suites::tracking(cfg),
        "default" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(tasks_for(s, cfg)?);
            }
            all
        }
        other => return Err(Error::UnknownSuite(other.to_string())),
    })
}

/// Run a named suite; records come back in canonical order (FAIL first, then by id).
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteRun> {
    cfg.validate()?;
    let tasks = tasks_for(name, cfg)?;
    let mut records: Vec<CheckRecord> = tasks.par_iter().flat_map_iter(|t| t.execute()).collect();
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(SuiteRun { suite: name.to_string(), config_hash: cfg.hash(), records })
}

/// Number of (instance, function) pairs a suite draws; used by the identity-suite contract.
pub fn instance_count(name: &str, cfg: &SuiteConfig) -> Result<usize> {
    Ok(tasks_for(name, cfg)?.len())
}
