//! Deterministic summation and the shared tolerance scheme.

const PAIRWISE_BLOCK: usize = 16;

/// Pairwise (tree) summation over a slice in its given order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `Σ w_i g(v_i)` with pairwise summation.
pub fn weighted_sum(weights: &[f64], values: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    let terms: Vec<f64> = weights.iter().zip(values).map(|(w, v)| w * g(*v)).collect();
    pairwise_sum(&terms)
}

/// Absolute tolerance used by every exact-identity and explicit-constant check.
pub const ABS_TOL: f64 = 1e-9;

/// `ABS_TOL · max(1, |a|, |b|)`.
pub fn scaled_tol(a: f64, b: f64) -> f64 {
    ABS_TOL * 1f64.max(a.abs()).max(b.abs())
}

/// `lhs ≤ rhs` up to the scaled tolerance.
pub fn leq_tol(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + scaled_tol(lhs, rhs)
}

/// Integer power with the convention `0^0 = 1`.
pub fn powu(base: f64, exp: usize) -> f64 {
    base.powi(exp as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn zero_to_zero_is_one() {
        assert_eq!(powu(0.0, 0), 1.0);
        assert_eq!(powu(0.0, 2), 0.0);
    }
}
