//! Check records: one verified inequality or identity on one instance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numeric::{leq_tol, ABS_TOL};

/// `PASS`/`FAIL` for explicit constants, `REPORT` for residuals against hidden constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Fail,
    Report,
    Pass,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Report => "REPORT",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub instance: String,
    pub detail: String,
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs_explicit: f64,
    pub residual: f64,
    pub residual_ratio: Option<f64>,
    pub ceiling: Option<f64>,
    pub status: Status,
    pub runtime_ms: f64,
}

impl CheckRecord {
    fn base(id: &str, lhs: f64, rhs: f64, status: Status) -> Self {
        Self {
            check_id: id.to_string(),
            instance: String::new(),
            detail: String::new(),
            epsilon: 0.0,
            lhs,
            rhs_explicit: rhs,
            residual: lhs - rhs,
            residual_ratio: None,
            ceiling: None,
            status,
            runtime_ms: 0.0,
        }
    }

    /// `lhs ≤ rhs` with an explicit constant: PASS or FAIL.
    pub fn hard(id: &str, lhs: f64, rhs: f64) -> Self {
        let status = if leq_tol(lhs, rhs) { Status::Pass } else { Status::Fail };
        Self::base(id, lhs, rhs, status)
    }

    /// An exact identity whose absolute discrepancy is `diff` on values of size `scale`.
    pub fn exact(id: &str, diff: f64, scale: f64) -> Self {
        let rhs = ABS_TOL * scale.abs().max(1.0);
        let status = if diff <= rhs { Status::Pass } else { Status::Fail };
        Self::base(id, diff, rhs, status)
    }

    /// `value ≤ tol` with a fixed absolute tolerance and no extra slack.
    pub fn within(id: &str, value: f64, tol: f64) -> Self {
        let status = if value <= tol { Status::Pass } else { Status::Fail };
        Self::base(id, value, tol, status)
    }

    /// `lhs ≤ rhs + O(shape)`: hard when `eps = 0`, otherwise REPORT with `residual / shape`.
    pub fn tracked(id: &str, lhs: f64, rhs: f64, shape: f64, eps: f64, ceiling: f64) -> Self {
        let mut rec = if eps == 0.0 { Self::hard(id, lhs, rhs) } else { Self::base(id, lhs, rhs, Status::Report) };
        rec.epsilon = eps;
        rec.ceiling = Some(ceiling);
        if eps != 0.0 && shape > 0.0 {
            rec.residual_ratio = Some(rec.residual / shape);
        }
        rec
    }

    pub fn on(mut self, instance: impl Into<String>) -> Self {
        self.instance = instance.into();
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    /// A REPORT record is within its ceiling when its ratio (if any) does not exceed it.
    pub fn within_ceiling(&self) -> bool {
        match (self.residual_ratio, self.ceiling) {
            (Some(r), Some(c)) => r <= c,
            _ => true,
        }
    }

    /// Canonical order: FAIL first, then by id, instance and detail.
    pub fn sort_key(&self) -> (Status, &str, &str, &str) {
        (self.status, &self.check_id, &self.instance, &self.detail)
    }
}

/// Collapse many records of one check into the tightest one, noting how many were merged.
///
/// A failing record always wins, then a reported one; ties go to the largest residual
/// ratio, else the largest `lhs / rhs` (or residual when `rhs = 0`).
pub fn worst(records: Vec<CheckRecord>) -> Option<CheckRecord> {
    let n = records.len();
    let tightness = |r: &CheckRecord| {
        if let Some(q) = r.residual_ratio {
            q
        } else if r.rhs_explicit > 0.0 {
            r.lhs / r.rhs_explicit
        } else if r.lhs > 0.0 {
            f64::INFINITY
        } else {
            r.residual
        }
    };
    let mut best: Option<CheckRecord> = None;
    for r in records {
        let replace = match &best {
            None => true,
            Some(b) => (r.status, -tightness(&r)) < (b.status, -tightness(b)),
        };
        if replace {
            best = Some(r);
        }
    }
    best.map(|mut r| {
        if n > 1 {
            r.detail = format!("{} (worst of {n})", r.detail);
        }
        r
    })
}

/// Catalog identifiers.
pub mod ids {
    pub const RECONSTRUCTION: &str = "C1-reconstruction";
    pub const LAPLACIAN_EQUIVALENCE: &str = "C2-laplacian-equivalence";
    pub const NOISE_EQUIVALENCE: &str = "C3-noise-equivalence";
    pub const UPDOWN_EQUIVALENCE: &str = "C4-updown-equivalence";
    pub const CONTRACTION: &str = "C5-contraction";
    pub const DISJOINT_AVERAGING: &str = "C6-disjoint-averaging";
    pub const COMPOSITION: &str = "C7-composition";
    pub const NEAR_ORTHOGONALITY: &str = "C8-near-orthogonality";
    pub const APPROX_PARSEVAL: &str = "C9-approx-parseval";
    pub const IDEMPOTENCE: &str = "C10-idempotence";
    pub const JUNTA_ORTHOGONALITY: &str = "C11-junta-orthogonality";
    pub const STRONG_PARSEVAL: &str = "C12-strong-parseval";
    pub const GLOBAL_COMPONENT_BOUND: &str = "C13-global-component-bound";
    pub const INFLUENCE_BOUNDS: &str = "C14-influence-bounds";
    pub const PRODUCT_HYPERCONTRACTIVITY: &str = "C15-product-hypercontractivity";
    pub const HDX_HYPERCONTRACTIVITY: &str = "C16-hdx-hypercontractivity";
    pub const FOURIER_CONCENTRATION: &str = "C17-fourier-concentration";
    pub const SMALL_SET_EXPANSION: &str = "C18-small-set-expansion";
    pub const KRUSKAL_KATONA: &str = "C19-kruskal-katona";
    pub const L4_CLOSENESS: &str = "C20-l4-closeness";
    pub const DERIVATIVE_FAMILY: &str = "C21-derivative-family";

    pub const ALL: [&str; 21] = [
        RECONSTRUCTION,
        LAPLACIAN_EQUIVALENCE,
        NOISE_EQUIVALENCE,
        UPDOWN_EQUIVALENCE,
        CONTRACTION,
        DISJOINT_AVERAGING,
        COMPOSITION,
        NEAR_ORTHOGONALITY,
        APPROX_PARSEVAL,
        IDEMPOTENCE,
        JUNTA_ORTHOGONALITY,
        STRONG_PARSEVAL,
        GLOBAL_COMPONENT_BOUND,
        INFLUENCE_BOUNDS,
        PRODUCT_HYPERCONTRACTIVITY,
        HDX_HYPERCONTRACTIVITY,
        FOURIER_CONCENTRATION,
        SMALL_SET_EXPANSION,
        KRUSKAL_KATONA,
        L4_CLOSENESS,
        DERIVATIVE_FAMILY,
    ];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_uses_scaled_slack() {
        assert!(CheckRecord::hard("x", 1.0 + 1e-10, 1.0).passed());
        assert!(CheckRecord::hard("x", 1.0 + 1e-6, 1.0).failed());
        assert!(CheckRecord::hard("x", 1e6 + 1e-4, 1e6).passed());
    }

    #[test]
    fn tracked_is_hard_at_zero_eps() {
        let r = CheckRecord::tracked("x", 2.0, 1.0, 1.0, 0.0, 10.0);
        assert!(r.failed());
        let r = CheckRecord::tracked("x", 2.0, 1.0, 0.5, 0.1, 10.0);
        assert_eq!(r.status, Status::Report);
        assert_eq!(r.residual_ratio, Some(2.0));
        assert!(r.within_ceiling());
    }

    #[test]
    fn worst_prefers_failures_then_tightness() {
        let a = CheckRecord::hard("x", 0.5, 1.0).detail("a");
        let b = CheckRecord::hard("x", 0.9, 1.0).detail("b");
        let c = CheckRecord::hard("x", 2.0, 1.0).detail("c");
        assert_eq!(worst(vec![a.clone(), b.clone()]).unwrap().detail, "b (worst of 2)");
        assert!(worst(vec![a, c, b]).unwrap().failed());
        assert!(worst(Vec::new()).is_none());
    }

    #[test]
    fn status_orders_fail_first() {
        assert!(Status::Fail < Status::Report && Status::Report < Status::Pass);
        assert_eq!(serde_json::to_string(&Status::Report).unwrap(), "\"REPORT\"");
    }
}
