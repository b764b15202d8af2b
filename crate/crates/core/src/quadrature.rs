//! One-dimensional quadrature: Gauss–Legendre panels, geometric clustering
//! toward a singular endpoint, adaptive Gauss–Kronrod, and dyadic radial
//! integration with divergence detection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Panel breakpoints on [a, b] that shrink geometrically (ratio 1/2)
/// toward `a`, `levels` panels deep.
pub fn clustered_breakpoints(a: f64, b: f64, levels: usize) -> Vec<f64> {
    graded_breakpoints(a, b, levels, 0.5)
}

/// Breakpoints shrinking toward `a` by `ratio` per panel.
pub fn graded_breakpoints(a: f64, b: f64, levels: usize, ratio: f64) -> Vec<f64> {
    let len = b - a;
    let mut points = vec![a];
    for k in (0..levels).rev() {
        points.push(a + len * ratio.powi(k as i32 + 1));
    }
    points.push(b);
    points
}

/// Composite Gauss–Legendre over panels clustered toward `a`.
pub fn integrate_clustered<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    mut f: F,
    a: f64,
    b: f64,
    levels: usize,
) -> f64 {
    let bp = clustered_breakpoints(a, b, levels);
    bp.windows(2)
        .map(|w| rule.integrate(&mut f, w[0], w[1]))
        .sum()
}

/// Composite Gauss–Legendre over uniform panels.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
) -> f64 {
    let panels = panels.max(1);
    let step = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + step * k as f64;
            rule.integrate(&mut f, lo, lo + step)
        })
        .sum()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive 15-point Gauss–Kronrod on [a, b]. Returns (value, error estimate).
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut total_err = e;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= max_segments {
            return Err(Error::Quadrature(format!(
                "adaptive rule on [{a}, {b}] exceeded {max_segments} segments (error {total_err:.3e})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        if !total.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of the incremental updates.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok((value, error))
}

/// Settings for [`radial_integral`].
#[derive(Debug, Clone, Copy)]
pub struct RadialRule {
    pub rel_tol: f64,
    pub max_shells: usize,
}

impl Default for RadialRule {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            max_shells: 400,
        }
    }
}

/// `∫_0^rho f(r) dr` for integrands that may be singular at `r = 0`.
///
/// Integrates dyadic shells `[rho 2^{-k-1}, rho 2^{-k}]` inward until the
/// shell contributions are negligible. Returns `+∞` when they stop
/// shrinking, which is how non-integrable singularities show up.
pub fn radial_integral<F: FnMut(f64) -> f64>(
    gl: &GaussLegendre,
    mut f: F,
    rho: f64,
    rule: RadialRule,
) -> f64 {
    radial_integral_with(|lo, hi| gl.integrate(&mut f, lo, hi), rho, rule)
}

/// [`radial_integral`] with a caller-supplied rule for each shell.
pub fn radial_integral_with<S: FnMut(f64, f64) -> f64>(
    mut shell: S,
    rho: f64,
    rule: RadialRule,
) -> f64 {
    let mut total = 0.0;
    let mut quiet = 0;
    let mut growing = 0;
    let mut previous = f64::INFINITY;
    for k in 0..rule.max_shells {
        let hi = rho * 0.5f64.powi(k as i32);
        let lo = 0.5 * hi;
        let c = shell(lo, hi);
        if !c.is_finite() {
            return f64::INFINITY;
        }
        total += c;
        let mag = c.abs();
        if total == 0.0 {
            // nothing seen yet; the support may lie further in
            if k >= 64 {
                return 0.0;
            }
            continue;
        }
        if mag <= rule.rel_tol * total.abs() || mag < 1e-300 {
            quiet += 1;
            if quiet >= 3 {
                return total;
            }
        } else {
            quiet = 0;
        }
        if k > 0 && mag >= previous * (1.0 - 1e-9) && mag > 0.0 {
            growing += 1;
            if growing >= 8 {
                return f64::INFINITY;
            }
        } else {
            growing = 0;
        }
        previous = mag;
    }
    f64::INFINITY
}

/// Product quadrature on the unit circle (`dim == 2`) or sphere (`dim == 3`).
/// Weights sum to the surface measure (2π or 4π).
pub fn angular_rule(dim: usize, nodes: usize) -> Vec<(crate::geometry::Point, f64)> {
    use std::f64::consts::{PI, TAU};
    match dim {
        2 => {
            let m = 4 * nodes.max(2);
            (0..m)
                .map(|j| {
                    let th = TAU * (j as f64 + 0.5) / m as f64;
                    ([th.cos(), th.sin(), 0.0], TAU / m as f64)
                })
                .collect()
        }
        3 => {
            let gl = GaussLegendre::new(nodes.max(2));
            let m = 2 * nodes.max(2);
            let mut out = Vec::with_capacity(gl.len() * m);
            for (&mu, &w) in gl.nodes().iter().zip(gl.weights()) {
                let s = (1.0 - mu * mu).sqrt();
                for j in 0..m {
                    let ph = TAU * (j as f64 + 0.5) / m as f64;
                    out.push(([s * ph.cos(), s * ph.sin(), mu], w * 2.0 * PI / m as f64));
                }
            }
            out
        }
        _ => panic!("angular rule only for dimension 2 or 3"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        // degree 15 is the exactness limit
        let v = gl.integrate(|x| x.powi(14) + x.powi(15), -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 15.0, epsilon = 1e-14);
        let s: f64 = gl.weights().iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let gl = GaussLegendre::new(7);
        assert!(gl.nodes()[3].abs() < 1e-15);
        assert_relative_eq!(
            gl.integrate(|x| x.exp(), 0.0, 1.0),
            1f64.exp() - 1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn clustered_handles_sqrt_singularity() {
        let gl = GaussLegendre::new(16);
        let v = integrate_clustered(&gl, |t| 1.0 / t.sqrt(), 0.0, 1.0, 80);
        assert_relative_eq!(v, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn adaptive_matches_known_integrals() {
        let (v, _) = adaptive(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-14, 1e-13, 200).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-12);
        let (v, _) = adaptive(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-14, 1e-13, 500).unwrap();
        assert_relative_eq!(v, 0.5 * (0.09 + 0.49), epsilon = 1e-12);
    }

    #[test]
    fn radial_integral_detects_divergence() {
        let gl = GaussLegendre::new(12);
        let finite = radial_integral(
            &gl,
            |r| r.powi(3) * (1.0 / r).ln().powi(2),
            1.0,
            RadialRule::default(),
        );
        assert_relative_eq!(finite, 2.0 / 64.0, epsilon = 1e-13);
        let div = radial_integral(
            &gl,
            |r| (1.0 / r).ln().powi(2) / r,
            1.0,
            RadialRule::default(),
        );
        assert!(div.is_infinite());
        let div = radial_integral(&gl, |r| 1.0 / r, 1.0, RadialRule::default());
        assert!(div.is_infinite());
        let weak = radial_integral(&gl, |r| r.powf(-0.5), 1.0, RadialRule::default());
        assert_relative_eq!(weak, 2.0, epsilon = 1e-11);
    }

    #[test]
    fn angular_rules_carry_surface_measure() {
        let s2: f64 = angular_rule(2, 8).iter().map(|(_, w)| w).sum();
        assert_relative_eq!(s2, std::f64::consts::TAU, epsilon = 1e-13);
        let r3 = angular_rule(3, 8);
        let s3: f64 = r3.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(s3, 4.0 * std::f64::consts::PI, epsilon = 1e-12);
        // <z^2> over the sphere is 4π/3
        let z2: f64 = r3.iter().map(|(p, w)| w * p[2] * p[2]).sum();
        assert_relative_eq!(z2, 4.0 * std::f64::consts::PI / 3.0, epsilon = 1e-12);
    }
}
