//! The eigenvalue-free threshold and its corollary variants.

use serde::Serialize;

/// Which endpoint splitting `V₁ = sV` attains the smaller threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitChoice {
    /// `s = 0`: the whole potential is treated through its virial.
    AllVirial,
    /// `s = 1`: the whole potential is treated through `|x V|`.
    AllDecay,
    /// Both endpoints give the same threshold.
    Constant,
}

impl SplitChoice {
    pub fn parameter(&self) -> Option<f64> {
        match self {
            SplitChoice::AllVirial => Some(0.0),
            SplitChoice::AllDecay => Some(1.0),
            SplitChoice::Constant => None,
        }
    }
}

/// Where an input to the threshold came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Manual,
    Estimator(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub beta: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub lambda: f64,
    pub split: Option<SplitChoice>,
    pub provenance: [Provenance; 3],
}

impl ThresholdReport {
    pub fn new(beta: f64, omega1: f64, omega2: f64) -> Self {
        Self {
            beta,
            omega1,
            omega2,
            lambda: compute_lambda(beta, omega1, omega2),
            split: None,
            provenance: [Provenance::Manual, Provenance::Manual, Provenance::Manual],
        }
    }

    pub fn with_provenance(mut self, provenance: [Provenance; 3]) -> Self {
        self.provenance = provenance;
        self
    }

    /// `true` when `lambda` is finite, so some interval `(Λ, ∞)` is excluded.
    pub fn excludes_anything(&self) -> bool {
        self.lambda.is_finite()
    }
}

/// `Λ = ¼(β + ω₁ + √((β + ω₁)² + 2ω₂))²`; `+∞` if any input is.
///
/// Panics on negative or NaN input.
pub fn compute_lambda(beta: f64, omega1: f64, omega2: f64) -> f64 {
    for (name, v) in [("beta", beta), ("omega1", omega1), ("omega2", omega2)] {
        assert!(v >= 0.0, "{name} must be non-negative, got {v}");
    }
    if beta.is_infinite() || omega1.is_infinite() || omega2.is_infinite() {
        return f64::INFINITY;
    }
    // expanded square, exact when β + ω₁ = 0
    let a = beta + omega1;
    0.5 * (a * a + a * (a * a + 2.0 * omega2).sqrt() + omega2)
}

/// `g(s) = b + s + √((b + s)² + 2c(1 - s))`.
pub fn bang_bang_g(b: f64, c: f64, s: f64) -> f64 {
    let a = b + s;
    a + (a * a + 2.0 * c * (1.0 - s)).sqrt()
}

/// Minimizes `Λ` over `V₁ = sV`, `s ∈ [0, 1]`, by comparing the endpoints.
pub fn optimize_split(beta: f64, omega1: f64, omega2: f64) -> ThresholdReport {
    let all_virial = compute_lambda(beta, 0.0, omega2);
    let all_decay = compute_lambda(beta, omega1, 0.0);
    let (lambda, choice) = if all_virial.is_finite()
        && all_decay.is_finite()
        && (all_virial - all_decay).abs() <= 1e-12 * all_virial.max(all_decay).max(1.0)
    {
        (all_virial.min(all_decay), SplitChoice::Constant)
    } else if all_virial < all_decay {
        (all_virial, SplitChoice::AllVirial)
    } else {
        (all_decay, SplitChoice::AllDecay)
    };
    ThresholdReport {
        beta,
        omega1,
        omega2,
        lambda,
        split: Some(choice),
        provenance: [Provenance::Manual, Provenance::Manual, Provenance::Manual],
    }
}

/// `Λ_P = min{4β², ¼(β + ω + √((β + ω)² + 2ω))²}`.
pub fn pauli_threshold(beta: f64, omega: f64) -> f64 {
    (4.0 * beta * beta).min(compute_lambda(beta, omega, omega))
}

/// Eigenvalues of the Dirac operator lie in `[-√(Λ_P + m²), √(Λ_P + m²)]`.
pub fn dirac_window(beta: f64, omega: f64, mass: f64) -> (f64, f64) {
    let edge = (pauli_threshold(beta, omega) + mass * mass).sqrt();
    (-edge, edge)
}

/// `¼(ω₁ + √(ω₁² + 2ω₂))²`, the threshold with `β = 0`.
pub fn aharonov_bohm_threshold(omega1: f64, omega2: f64) -> f64 {
    compute_lambda(0.0, omega1, omega2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn lambda_examples() {
        assert_eq!(compute_lambda(0.0, 0.0, 16.0), 8.0);
        assert_eq!(compute_lambda(0.0, 0.0, 0.0), 0.0);
        assert_eq!(compute_lambda(0.0, 0.0, 1.0), 0.5);
        assert_eq!(compute_lambda(2.0, 0.0, 0.0), 4.0);
        assert!(compute_lambda(f64::INFINITY, 0.0, 1.0).is_infinite());
    }

    #[test]
    #[should_panic(expected = "omega2")]
    fn lambda_rejects_negative() {
        compute_lambda(0.0, 0.0, -1.0);
    }

    #[test]
    fn g_examples() {
        for s in [0.0, 0.3, 0.7, 1.0] {
            assert_relative_eq!(bang_bang_g(0.0, 2.0, s), 2.0, epsilon = 1e-12);
        }
        assert_eq!(bang_bang_g(1.5, 3.0, 1.0), 5.0);
        assert_eq!(bang_bang_g(1.0, 0.0, 0.0), 2.0);
    }

    #[test]
    fn split_examples() {
        let r = optimize_split(0.0, 8.0, 16.0);
        assert_eq!(r.lambda, 8.0);
        assert_eq!(r.split, Some(SplitChoice::AllVirial));
        let r = optimize_split(0.0, 1.0, 2.0);
        assert_eq!(r.lambda, 1.0);
        assert_eq!(r.split, Some(SplitChoice::Constant));
        let r = optimize_split(1.0, 0.0, 6.0);
        assert_eq!(r.lambda, 1.0);
        assert_eq!(r.split, Some(SplitChoice::AllDecay));
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(pauli_threshold(1.0, 0.0), 1.0);
        assert_eq!(pauli_threshold(0.0, 0.0), 0.0);
        assert_eq!(pauli_threshold(1.0, 2.0), 4.0);
        assert_eq!(dirac_window(0.0, 0.0, 1.0), (-1.0, 1.0));
        assert_eq!(dirac_window(1.0, 0.0, 0.0), (-1.0, 1.0));
        let (lo, hi) = dirac_window(1.0, 0.0, 2.0);
        assert_relative_eq!(hi, 5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(lo, -hi);
        assert_eq!(aharonov_bohm_threshold(0.0, 0.0), 0.0);
        assert_eq!(aharonov_bohm_threshold(0.0, 2.0), 1.0);
        assert_eq!(aharonov_bohm_threshold(2.0, 0.0), 4.0);
    }

    proptest! {
        #[test]
        fn lambda_monotone(b in 0.0..10.0f64, w1 in 0.0..10.0f64, w2 in 0.0..10.0f64, d in 0.0..1.0f64) {
            let l = compute_lambda(b, w1, w2);
            prop_assert!(compute_lambda(b + d, w1, w2) >= l);
            prop_assert!(compute_lambda(b, w1 + d, w2) >= l);
            prop_assert!(compute_lambda(b, w1, w2 + d) >= l);
        }

        #[test]
        fn lambda_scale_covariant(b in 0.0..10.0f64, w1 in 0.0..10.0f64, w2 in 0.0..10.0f64, t in 0.01..10.0f64) {
            let l = compute_lambda(b, w1, w2);
            let lt = compute_lambda(t * b, t * w1, t * t * w2);
            prop_assert!((lt - t * t * l).abs() <= 1e-10 * (1.0 + lt.abs()));
        }

        #[test]
        fn endpoint_form_identity(b in 0.0..10.0f64, w2 in 0.0..10.0f64) {
            let lhs = compute_lambda(b, 0.0, w2);
            let rhs = 0.5 * (b * b + w2 + b * (b * b + 2.0 * w2).sqrt());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs));
        }

        #[test]
        fn g_minimized_at_endpoint(b in 1e-6..10.0f64, c in 1e-6..10.0f64) {
            let g0 = bang_bang_g(b, c, 0.0);
            let g1 = bang_bang_g(b, c, 1.0);
            let grid_min = (0..=1000).map(|k| bang_bang_g(b, c, k as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
            prop_assert!(grid_min >= g0.min(g1) - 1e-12);
            let pivot = c - (2.0 * b + 2.0);
            if pivot.abs() > 1e-9 {
                prop_assert_eq!(g0 < g1, pivot < 0.0);
            }
        }

        #[test]
        fn split_never_worse_than_endpoints(b in 0.0..5.0f64, w1 in 0.0..5.0f64, w2 in 0.0..5.0f64) {
            let r = optimize_split(b, w1, w2);
            prop_assert!(r.lambda <= compute_lambda(b, w1, 0.0));
            prop_assert!(r.lambda <= compute_lambda(b, 0.0, w2));
        }
    }
}
