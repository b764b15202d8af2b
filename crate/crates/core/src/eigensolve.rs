//! Finite-difference half-line eigensolver with Sturm bisection, and the
//! box-state filter that separates genuine eigenvalues from continuum
//! stand-ins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::RadialChannel;
use crate::error::{Error, Result};
use crate::par;

/// Windows holding more eigenvalues than this are refused.
pub const MAX_WINDOW_COUNT: usize = 100_000;

const EIGENVECTOR_SEED: u64 = 0x005e_ed0f_b0a7;

/// `-u'' + W u` on `(0, R)` with Dirichlet ends, nodes `r_i = i h`,
/// `h = R/(N + 1)`.
#[derive(Debug, Clone)]
pub struct TridiagonalOperator {
    pub diagonal: Vec<f64>,
    pub offdiagonal: f64,
    pub h: f64,
    pub r_max: f64,
}

impl TridiagonalOperator {
    pub fn n(&self) -> usize {
        self.diagonal.len()
    }

    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let e = 2.0 * self.offdiagonal.abs();
        let lo = self.diagonal.iter().fold(f64::INFINITY, |a, &d| a.min(d)) - e;
        let hi = self
            .diagonal
            .iter()
            .fold(f64::NEG_INFINITY, |a, &d| a.max(d))
            + e;
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let e2 = self.offdiagonal * self.offdiagonal;
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + self.offdiagonal.abs());
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diagonal.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - e2 / q };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// [`sturm_count`](Self::sturm_count) at four shifts in one pass; the
    /// independent recurrences overlap their divisions.
    pub fn sturm_counts4(&self, x: [f64; 4]) -> [usize; 4] {
        let e2 = self.offdiagonal * self.offdiagonal;
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + self.offdiagonal.abs());
        let mut count = [0usize; 4];
        let mut q = [1.0f64; 4];
        let mut first = true;
        for &d in &self.diagonal {
            for k in 0..4 {
                let mut v = if first {
                    d - x[k]
                } else {
                    d - x[k] - e2 / q[k]
                };
                if v == 0.0 {
                    v = -tiny;
                }
                count[k] += (v < 0.0) as usize;
                q[k] = v;
            }
            first = false;
        }
        count
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut v = self.diagonal[i] * x[i];
                if i > 0 {
                    v += self.offdiagonal * x[i - 1];
                }
                if i + 1 < n {
                    v += self.offdiagonal * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Solves `(T - shift) x = rhs` by Gaussian elimination with partial
    /// pivoting (the shifted matrix is nearly singular by design).
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.n();
        let e = self.offdiagonal;
        // rows hold (diag, upper, upper2) after pivoting
        let mut d: Vec<f64> = self.diagonal.iter().map(|v| v - shift).collect();
        let mut u = vec![e; n];
        let mut u2 = vec![0.0; n];
        let mut l = vec![e; n];
        let mut b = rhs.to_vec();
        let floor =
            f64::EPSILON * (self.diagonal.iter().fold(0.0f64, |a, v| a.max(v.abs())) + e.abs());
        for i in 0..n.saturating_sub(1) {
            let below = l[i + 1];
            if below.abs() > d[i].abs() {
                // swap rows i and i+1
                let (di, ui, u2i, bi) = (d[i], u[i], u2[i], b[i]);
                d[i] = below;
                u[i] = d[i + 1];
                u2[i] = if i + 1 < n - 1 { u[i + 1] } else { 0.0 };
                b[i] = b[i + 1];
                let m = di / d[i];
                d[i + 1] = ui - m * u[i];
                u[i + 1] = u2i - m * u2[i];
                b[i + 1] = bi - m * b[i];
            } else {
                if d[i] == 0.0 {
                    d[i] = floor;
                }
                let m = below / d[i];
                d[i + 1] -= m * u[i];
                u[i + 1] -= m * u2[i];
                b[i + 1] -= m * b[i];
            }
            if i + 2 < n {
                l[i + 2] = e;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = floor;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= u[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * x[i + 2];
            }
            x[i] = s / d[i];
        }
        x
    }
}

/// Builds the three-point discretization of `channel` on `N` interior nodes.
pub fn discretize(channel: &RadialChannel, r_max: f64, n: usize) -> Result<TridiagonalOperator> {
    if n < 100 {
        return Err(Error::InvalidInput(format!(
            "need at least 100 nodes, got {n}"
        )));
    }
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "domain length must be positive, got {r_max}"
        )));
    }
    let h = r_max / (n + 1) as f64;
    let kinetic = 2.0 / (h * h);
    let diagonal = par::map_range(n, |i| kinetic + channel.w((i + 1) as f64 * h));
    if let Some(i) = diagonal.iter().position(|v| !v.is_finite()) {
        return Err(Error::Discretization {
            node: i + 1,
            radius: (i + 1) as f64 * h,
        });
    }
    Ok(TridiagonalOperator {
        diagonal,
        offdiagonal: -1.0 / (h * h),
        h,
        r_max,
    })
}

/// All eigenvalues of `op` in `(a, b)` to absolute accuracy `tol`, ascending.
pub fn eigen_in_window(op: &TridiagonalOperator, window: (f64, f64), tol: f64) -> Result<Vec<f64>> {
    let (a, b) = window;
    if !(a < b) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need a < b and tol > 0, got ({a}, {b}), tol {tol}"
        )));
    }
    let (glo, ghi) = op.gershgorin();
    let a = a.max(glo - 1.0);
    let b = b.min(ghi + 1.0);
    if a >= b {
        return Ok(Vec::new());
    }
    let ca = op.sturm_count(a);
    let cb = op.sturm_count(b);
    let count = cb.saturating_sub(ca);
    if count > MAX_WINDOW_COUNT {
        return Err(Error::PathologicalWindow {
            lower: a,
            upper: b,
            count,
            limit: MAX_WINDOW_COUNT,
        });
    }
    // Split the window into intervals that each isolate eigenvalue indices,
    // then bisect each index independently.
    let indices: Vec<usize> = (ca..cb).collect();
    let values = par::map_collect(&indices, |&k| {
        // k-th eigenvalue (0-based) is where sturm_count crosses k+1
        let (mut lo, mut hi) = (a, b);
        while hi - lo > tol * 0.25 {
            let step = (hi - lo) / 5.0;
            let probes = [lo + step, lo + 2.0 * step, lo + 3.0 * step, lo + 4.0 * step];
            if probes[0] <= lo || probes[3] >= hi {
                break;
            }
            let counts = op.sturm_counts4(probes);
            let (mut nlo, mut nhi) = (lo, hi);
            for (p, c) in probes.iter().zip(counts) {
                if c > k {
                    nhi = *p;
                    break;
                }
                nlo = *p;
            }
            lo = nlo;
            hi = nhi;
        }
        0.5 * (lo + hi)
    });
    // an eigenvalue sitting on the endpoint a is counted by sturm_count(b) but excluded
    Ok(values
        .into_iter()
        .filter(|&v| v > window.0 && v < window.1)
        .collect())
}

/// Distance from `x` to the nearest eigenvalue of `op`, to relative
/// accuracy about `1e-3` (absolute `tol`), or `+∞` beyond `reach`.
pub fn nearest_distance(op: &TridiagonalOperator, x: f64, tol: f64, reach: f64) -> f64 {
    // is there an eigenvalue within d1, within d2?
    let inside = |d1: f64, d2: f64| {
        let c = op.sturm_counts4([x - d1, x + d1, x - d2, x + d2]);
        (c[1] > c[0], c[3] > c[2])
    };
    let mut lo = 0.0;
    let mut hi = tol;
    loop {
        let (near, far) = inside(hi, 2.0 * hi);
        if near {
            break;
        }
        lo = hi;
        if far {
            hi *= 2.0;
            break;
        }
        lo = 2.0 * hi;
        hi *= 4.0;
        if lo > reach {
            return f64::INFINITY;
        }
    }
    while hi - lo > (1e-3 * hi).max(tol) {
        let third = (hi - lo) / 3.0;
        let (m1, m2) = (lo + third, lo + 2.0 * third);
        match inside(m1, m2) {
            (true, _) => hi = m1,
            (false, true) => {
                lo = m1;
                hi = m2;
            }
            (false, false) => lo = m2,
        }
    }
    hi
}

/// Normalized eigenvector for the eigenvalue nearest `lambda`, by inverse
/// iteration from a fixed-seed random start. Sign is fixed so the first
/// non-negligible component is positive.
pub fn eigenvector(op: &TridiagonalOperator, lambda: f64) -> Result<Vec<f64>> {
    let n = op.n();
    let mut rng = ChaCha8Rng::seed_from_u64(EIGENVECTOR_SEED);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut x);
    for iteration in 0..20 {
        let mut y = op.solve_shifted(lambda, &x);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(
                "inverse iteration produced non-finite values".into(),
            ));
        }
        normalize(&mut y);
        fix_sign(&mut y);
        let change = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        x = y;
        if iteration >= 1 && change < 1e-10 {
            return Ok(x);
        }
    }
    // accept a converged direction even if the last step was not quite tight
    let residual = rayleigh_residual(op, &x);
    if residual < 1e-6 * (1.0 + lambda.abs()) {
        return Ok(x);
    }
    Err(Error::Numerical(format!(
        "inverse iteration at {lambda} did not converge in 20 steps (residual {residual:.3e})"
    )))
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

fn fix_sign(x: &mut [f64]) {
    let peak = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-8 * peak) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// `‖T x - (xᵀT x) x‖` for normalized `x`.
pub fn rayleigh_residual(op: &TridiagonalOperator, x: &[f64]) -> f64 {
    let tx = op.apply(x);
    let rq: f64 = x.iter().zip(&tx).map(|(a, b)| a * b).sum();
    tx.iter()
        .zip(x)
        .map(|(t, v)| (t - rq * v).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Number of sign changes, ignoring components below `1e-10` of the peak.
pub fn sign_changes(x: &[f64]) -> usize {
    let peak = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in x {
        if v.abs() <= 1e-10 * peak {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Fraction of `‖x‖²` in the outer `fraction` of the nodes.
pub fn outer_mass(x: &[f64], fraction: f64) -> f64 {
    let n = x.len();
    let start = ((1.0 - fraction) * n as f64).floor() as usize;
    let total: f64 = x.iter().map(|v| v * v).sum();
    let outer: f64 = x[start.min(n)..].iter().map(|v| v * v).sum();
    if total > 0.0 {
        outer / total
    } else {
        0.0
    }
}

/// Thresholds that decide whether an eigenvalue is a box artifact.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpuriousPolicy {
    /// Spurious if the shift under domain doubling exceeds `drift_factor · tol`.
    pub drift_factor: f64,
    /// Width of the outer band, as a fraction of the domain.
    pub outer_fraction: f64,
    /// Spurious if the outer band holds more than this share of the mass.
    pub outer_mass_limit: f64,
}

impl Default for SpuriousPolicy {
    fn default() -> Self {
        Self {
            drift_factor: 100.0,
            outer_fraction: 0.1,
            outer_mass_limit: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub label: String,
    pub window: (f64, f64),
    pub r_max: f64,
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub localization_ratio: Vec<f64>,
    pub drift: Vec<f64>,
    pub spurious: Vec<bool>,
    /// `Some(true)` when no genuine eigenvalue lies above the supplied threshold.
    pub consistent_with_threshold: Option<bool>,
}

impl SpectralReport {
    pub fn genuine(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.spurious)
            .filter(|(_, &s)| !s)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Re-evaluates the threshold verdict.
    pub fn check_threshold(&mut self, threshold: f64) {
        self.consistent_with_threshold = Some(self.genuine().iter().all(|&e| e <= threshold));
    }
}

/// Solves on `(0, R)` and `(0, 2R)` with the same spacing and flags
/// eigenvalues that move or live near the outer wall.
pub fn classify_spurious(
    channel: &RadialChannel,
    window: (f64, f64),
    r_max: f64,
    n: usize,
    tol: f64,
    policy: SpuriousPolicy,
) -> Result<SpectralReport> {
    let op = discretize(channel, r_max, n)?;
    let op2 = discretize(channel, 2.0 * r_max, 2 * n + 1)?;
    let eigenvalues = eigen_in_window(&op, window, tol)?;
    let reach = window.1 - window.0;
    let drift = par::map_collect(&eigenvalues, |&e| nearest_distance(&op2, e, tol, reach));
    let vectors = par::map_collect(&eigenvalues, |&e| eigenvector(&op, e));
    let mut localization_ratio = Vec::with_capacity(eigenvalues.len());
    for v in vectors {
        localization_ratio.push(outer_mass(&v?, policy.outer_fraction));
    }
    let spurious = drift
        .iter()
        .zip(&localization_ratio)
        .map(|(&d, &l)| d > policy.drift_factor * tol || l > policy.outer_mass_limit)
        .collect();
    Ok(SpectralReport {
        label: channel.label.clone(),
        window,
        r_max,
        n,
        eigenvalues,
        localization_ratio,
        drift,
        spurious,
        consistent_with_threshold: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{self, RadialChannel};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn free() -> RadialChannel {
        RadialChannel::bare(Arc::new(|_| 0.0), "free")
    }

    fn hydrogen() -> RadialChannel {
        RadialChannel::bare(Arc::new(|r| -2.0 / r), "hydrogen")
    }

    fn free_closed_form(n: usize, r_max: f64, k: usize) -> f64 {
        let h = r_max / (n + 1) as f64;
        (2.0 / (h * h)) * (1.0 - (k as f64 * PI * h / r_max).cos())
    }

    #[test]
    fn free_laplacian_matches_closed_form() {
        let op = discretize(&free(), PI, 200).unwrap();
        let ev = eigen_in_window(&op, (0.0, 5.0), 1e-12).unwrap();
        assert_eq!(ev.len(), 2);
        for (k, e) in ev.iter().enumerate() {
            assert_relative_eq!(*e, free_closed_form(200, PI, k + 1), epsilon = 1e-11);
        }
        let v = eigenvector(&op, ev[0]).unwrap();
        let mut s: Vec<f64> = (1..=200).map(|i| (i as f64 * PI / 201.0).sin()).collect();
        let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        s.iter_mut().for_each(|x| *x /= norm);
        for (a, b) in v.iter().zip(&s) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_window_below_spectrum() {
        let op = discretize(&free(), 10.0, 300).unwrap();
        assert!(eigen_in_window(&op, (-10.0, -1.0), 1e-10)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn bad_inputs() {
        assert!(discretize(&free(), 1.0, 50).is_err());
        let singular =
            RadialChannel::bare(Arc::new(|r| if r > 0.5 { f64::NAN } else { 0.0 }), "nan");
        match discretize(&singular, 1.0, 100) {
            Err(Error::Discretization { node, .. }) => assert_eq!(node, 51),
            other => panic!("{other:?}"),
        }
        let op = discretize(&free(), 1.0, 200_001).unwrap();
        assert!(matches!(
            eigen_in_window(&op, (-1.0, 1e12), 1e-6),
            Err(Error::PathologicalWindow { .. })
        ));
    }

    #[test]
    fn hydrogen_levels_and_nodes() {
        let op = discretize(&hydrogen(), 60.0, 12_000).unwrap();
        let ev = eigen_in_window(&op, (-1.1, -0.05), 1e-10).unwrap();
        assert_eq!(ev.len(), 4);
        for (k, e) in ev.iter().enumerate() {
            let exact = -1.0 / ((k + 1) as f64).powi(2);
            assert!(
                (e - exact).abs() < 2e-3 / ((k + 1) as f64).powi(2),
                "level {k}: {e}"
            );
        }
        for (k, e) in ev.iter().enumerate() {
            let v = eigenvector(&op, *e).unwrap();
            assert_eq!(sign_changes(&v), k);
            assert!(rayleigh_residual(&op, &v) < 1e-6);
        }
        // positive first component
        let v = eigenvector(&op, ev[0]).unwrap();
        assert!(v.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn hydrogen_second_order_convergence() {
        // use R large enough that truncation is negligible
        let err = |n: usize| {
            let op = discretize(&hydrogen(), 40.0, n).unwrap();
            let ev = eigen_in_window(&op, (-0.5, -0.2), 1e-13).unwrap();
            (ev[0] + 0.25).abs()
        };
        let e1 = err(4000);
        let e2 = err(8001);
        let slope = (e1 / e2).log2();
        assert!((1.8..=2.2).contains(&slope), "slope {slope}");
    }

    #[test]
    fn coulomb_oracle_for_miller_simon() {
        let ch = channels::miller_simon_channel_with_h(Arc::new(|_| 1.0), 1);
        let op = discretize(&ch, 200.0, 20_000).unwrap();
        let ev = eigen_in_window(&op, (0.0, 0.9), 1e-10).unwrap();
        assert!((ev[0] - 5.0 / 9.0).abs() < 2e-3);
        assert!((ev[1] - 0.84).abs() < 2e-3);
    }

    #[test]
    fn box_states_are_flagged() {
        // a short-range bump gives the continuum a phase shift, so box states move
        let bump = RadialChannel::bare(Arc::new(|r: f64| 3.0 * (-r * r).exp()), "bump");
        let report = classify_spurious(
            &bump,
            (0.5, 2.0),
            50.0,
            2000,
            1e-9,
            SpuriousPolicy::default(),
        )
        .unwrap();
        assert!(!report.eigenvalues.is_empty());
        assert!(report.spurious.iter().all(|&s| s));
    }

    #[test]
    fn bound_state_is_genuine() {
        let mut report = classify_spurious(
            &hydrogen(),
            (-1.1, -0.5),
            30.0,
            6000,
            1e-9,
            SpuriousPolicy::default(),
        )
        .unwrap();
        assert_eq!(report.genuine().len(), 1);
        report.check_threshold(0.0);
        assert_eq!(report.consistent_with_threshold, Some(true));
        report.check_threshold(-2.0);
        assert_eq!(report.consistent_with_threshold, Some(false));
    }

    #[test]
    fn nearest_distance_brackets() {
        let op = discretize(&free(), PI, 200).unwrap();
        let e1 = free_closed_form(200, PI, 1);
        for off in [0.0, 3e-7, 0.01, 0.4] {
            let d = nearest_distance(&op, e1 + off, 1e-9, 1.0);
            assert!((d - off).abs() <= 1e-3 * off + 2e-9, "{off}: {d}");
        }
        assert!(nearest_distance(&op, -5.0, 1e-9, 1.0).is_infinite());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn four_lane_count_matches_scalar(x in proptest::array::uniform4(-100.0..3000.0f64)) {
            let ch = RadialChannel::bare(Arc::new(|r: f64| 3.0 * (r * 1.7).sin() - 2.0 / (1.0 + r)), "wavy");
            let op = discretize(&ch, 20.0, 400).unwrap();
            let lanes = op.sturm_counts4(x);
            for k in 0..4 {
                prop_assert_eq!(lanes[k], op.sturm_count(x[k]));
            }
        }

        #[test]
        fn sturm_count_matches_returned(a in -50.0..2000.0f64, width in 0.1..2000.0f64) {
            let ch = RadialChannel::bare(Arc::new(|r: f64| 3.0 * (r * 1.7).sin() - 2.0 / (1.0 + r)), "wavy");
            let op = discretize(&ch, 20.0, 400).unwrap();
            let b = a + width;
            let ev = eigen_in_window(&op, (a, b), 1e-9).unwrap();
            let expected = op.sturm_count(b) - op.sturm_count(a);
            prop_assert_eq!(ev.len(), expected);
            prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn free_interlacing(k in 1usize..60) {
            // refinement raises the k-th eigenvalue toward (kπ)²
            let fine = free_closed_form(201, 1.0, k);
            let coarse = free_closed_form(100, 1.0, k);
            prop_assert!(coarse <= fine && fine <= (k as f64 * PI).powi(2));
            let op = discretize(&free(), 1.0, 201).unwrap();
            prop_assert_eq!(op.sturm_count(fine - 1e-9), k - 1);
            prop_assert_eq!(op.sturm_count(fine + 1e-9), k);
        }
    }
}
