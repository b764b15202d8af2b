//! Tail estimators for `β`, `ω₁`, `ω₂`, Kato and locally uniform `Lᵖ`
//! norms, and the vanishing diagnostics.
//!
//! A `limsup` at infinity is approximated by suprema over sampled shells
//! `R ≤ |x| ≤ 10 max(radii)`. Shells are `SHELL_STEP` apart, each with
//! rotated low-discrepancy directions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{self, FieldSpec, PotentialSpec, ScalarFn};
use crate::geometry::{self, Point};
use crate::par;
use crate::quadrature::{self, GaussLegendre, RadialRule};

const SHELL_STEP: f64 = 0.05;
const CUTOFF_FACTOR: f64 = 10.0;
const STABLE_REL_TOL: f64 = 1e-3;
const GROWTH_REL_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticEstimate {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub limit: f64,
    pub stabilized: bool,
}

impl AsymptoticEstimate {
    fn from_values(radii: Vec<f64>, values: Vec<f64>, growing: bool) -> Self {
        let (limit, stabilized) = if growing || values.iter().any(|v| v.is_infinite()) {
            (f64::INFINITY, false)
        } else {
            tail_limit(&radii, &values)
        };
        Self {
            radii,
            values,
            limit,
            stabilized,
        }
    }

    /// `true` when the limit is stabilized and at most `tol`.
    pub fn vanishes(&self, tol: f64) -> bool {
        self.stabilized && self.limit <= tol
    }
}

/// Limit of a non-increasing tail sequence: `0` for power-law decay over
/// the last three radii, the last value when the last two agree, `+∞`
/// otherwise.
fn tail_limit(radii: &[f64], values: &[f64]) -> (f64, bool) {
    let n = values.len();
    let last = values[n - 1];
    if last == 0.0 {
        return (0.0, true);
    }
    if n >= 3 {
        let slope = |i: usize| (values[i + 1] / values[i]).ln() / (radii[i + 1] / radii[i]).ln();
        let (s1, s2) = (slope(n - 3), slope(n - 2));
        if s1 < -0.25 && s2 < -0.25 {
            return (0.0, true);
        }
    }
    if n >= 2 {
        let prev = values[n - 2];
        if (prev - last).abs() <= STABLE_REL_TOL * last.abs() {
            return (last, true);
        }
    }
    (f64::INFINITY, false)
}

/// Shell radii from `r0` to `r1` in steps of about `SHELL_STEP`.
fn shell_radii(r0: f64, r1: f64) -> Vec<f64> {
    let count = (((r1 - r0) / SHELL_STEP).ceil() as usize).max(1);
    (0..=count)
        .map(|k| r0 + (r1 - r0) * k as f64 / count as f64)
        .collect()
}

/// Sup of `f` over sampled shells, returned per shell.
fn shell_sups<F>(dim: usize, shells: &[f64], samples: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&Point) -> Result<f64> + Sync,
{
    let golden = 0.618_033_988_749_894_8;
    let per_shell = par::map_range(shells.len(), |k| -> Result<f64> {
        let offset = (k as f64 * golden).fract();
        let mut best = f64::NEG_INFINITY;
        for dir in geometry::directions(dim, samples, offset) {
            let v = f(&geometry::scale(&dir, shells[k]))?;
            if v.is_nan() {
                return Err(Error::NonFinite {
                    context: format!("tail sample at radius {}", shells[k]),
                });
            }
            best = best.max(v);
        }
        Ok(best)
    });
    per_shell.into_iter().collect()
}

/// Tail suprema of `f` at each radius plus a growth flag.
fn tail_estimate<F>(dim: usize, radii: &[f64], samples: usize, f: F) -> Result<AsymptoticEstimate>
where
    F: Fn(&Point) -> Result<f64> + Sync,
{
    if radii.is_empty()
        || radii.iter().any(|r| !(*r > 0.0))
        || radii.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidInput(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    if samples < 16 {
        return Err(Error::InvalidInput(format!(
            "need at least 16 samples per shell, got {samples}"
        )));
    }
    let r_max = radii[radii.len() - 1];
    let shells = shell_radii(radii[0], CUTOFF_FACTOR * r_max);
    let sups = shell_sups(dim, &shells, samples, f)?;
    // suffix maximum: sup over |x| ≥ shells[k]
    let mut suffix = sups.clone();
    for k in (0..suffix.len().saturating_sub(1)).rev() {
        suffix[k] = suffix[k].max(suffix[k + 1]);
    }
    let at = |r: f64| shells.partition_point(|&s| s < r).min(shells.len() - 1);
    let values: Vec<f64> = radii.iter().map(|&r| suffix[at(r)].max(0.0)).collect();
    let band = |lo: f64, hi: f64| sups[at(lo)..=at(hi)].iter().fold(0.0f64, |a, &v| a.max(v));
    let inner = band(r_max, 2.0 * r_max);
    let outer = band(5.0 * r_max, CUTOFF_FACTOR * r_max);
    let growing = outer > inner * (1.0 + GROWTH_REL_TOL) && outer > 0.0;
    Ok(AsymptoticEstimate::from_values(
        radii.to_vec(),
        values,
        growing,
    ))
}

/// Tail estimate of `β` from `sup |B̃(x)|`.
pub fn beta_estimate(
    field: &FieldSpec,
    radii: &[f64],
    samples_per_shell: usize,
) -> Result<AsymptoticEstimate> {
    tail_estimate(field.dim(), radii, samples_per_shell, |x| {
        Ok(geometry::norm(&fields::btilde(field, x)?))
    })
}

/// Tail estimate of `ω₁` from `sup |x| |V₁(x)|`.
pub fn omega1_estimate(
    v1: &ScalarFn,
    dim: usize,
    radii: &[f64],
    samples_per_shell: usize,
) -> Result<AsymptoticEstimate> {
    tail_estimate(dim, radii, samples_per_shell, |x| {
        Ok(geometry::norm(x) * v1(x).abs())
    })
}

/// Tail estimate of `ω₂` from `sup (x·∇V₂(x))₊`.
pub fn omega2_estimate(
    v2: &PotentialSpec,
    radii: &[f64],
    samples_per_shell: usize,
) -> Result<AsymptoticEstimate> {
    tail_estimate(v2.dim(), radii, samples_per_shell, |x| {
        Ok(v2.virial_at(x)?.max(0.0))
    })
}

/// Kernel of the Kato class: `|z|^{2-d}` for `d ≥ 3`, `|ln |z||` for `d = 2`.
pub fn kato_kernel(d: usize, r: f64) -> f64 {
    if d == 2 {
        r.ln().abs()
    } else {
        r.powi(2 - d as i32)
    }
}

/// Radius of the ball in the Kato norm: `1/2` in the plane (where the
/// logarithm keeps its sign), `1` otherwise.
pub fn kato_radius(d: usize) -> f64 {
    if d == 2 {
        0.5
    } else {
        1.0
    }
}

/// Integrals of `f(r) r^{d-1}` over `|z| ≤ α_k` around `center`, along
/// rays of an angular rule, for every `α_k` (ascending). Each ray is
/// integrated piecewise between consecutive radii, so the result is
/// non-decreasing in `α` whenever the integrand is non-negative.
fn ball_profile<F>(
    center: &Point,
    d: usize,
    alphas: &[f64],
    gl: &GaussLegendre,
    sphere: &[(Point, f64)],
    f: F,
) -> Vec<f64>
where
    F: Fn(&Point, f64) -> f64,
{
    let mut out = vec![0.0; alphas.len()];
    for (dir, w) in sphere {
        let ray = |r: f64| {
            let y = geometry::add(center, &geometry::scale(dir, r));
            f(&y, r) * r.powi(d as i32 - 1)
        };
        let mut acc = quadrature::radial_integral(gl, ray, alphas[0], RadialRule::default());
        out[0] += w * acc;
        for k in 1..alphas.len() {
            if acc.is_finite() {
                acc += gl.integrate(ray, alphas[k - 1], alphas[k]);
            }
            out[k] += w * acc;
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct KatoNormReport {
    pub dimension: usize,
    pub norm: f64,
    /// `(α, sup_x ∫_{|x-y|≤α} g_d(x-y)|V(y)| dy)`, ascending in `α`.
    pub alpha_profile: Vec<(f64, f64)>,
    pub stabilized: bool,
}

impl KatoNormReport {
    /// The small-`α` end of the profile, relative to the norm, is below `tol`.
    pub fn in_kato_class(&self, tol: f64) -> bool {
        self.stabilized
            && self
                .alpha_profile
                .first()
                .is_some_and(|&(_, v)| v <= tol * self.norm.max(1.0))
    }
}

/// Cubic lattice `{-k, ..., k}^d` with spacing `step`.
pub fn lattice(d: usize, k: i32, step: f64) -> Vec<Point> {
    let mut out = Vec::new();
    let range: Vec<f64> = (-k..=k).map(|i| i as f64 * step).collect();
    match d {
        2 => {
            for &x in &range {
                for &y in &range {
                    out.push([x, y, 0.0]);
                }
            }
        }
        3 => {
            for &x in &range {
                for &y in &range {
                    for &z in &range {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        _ => panic!("lattice only for dimension 2 or 3"),
    }
    out
}

/// Kato norm over the default lattice `{-1, -½, 0, ½, 1}^d` with
/// `α ∈ {2^{-12}, ..., 2^{-1}} · radius`.
pub fn kato_norm(v: &ScalarFn, d: usize, quad_nodes: usize) -> Result<KatoNormReport> {
    let centers = lattice(d, 2, 0.5);
    kato_norm_with(v, d, quad_nodes, &centers)
}

pub fn kato_norm_with(
    v: &ScalarFn,
    d: usize,
    quad_nodes: usize,
    centers: &[Point],
) -> Result<KatoNormReport> {
    if d != 2 && d != 3 {
        return Err(Error::InvalidInput(format!(
            "Kato norms implemented for d = 2, 3, got {d}"
        )));
    }
    if centers.is_empty() {
        return Err(Error::InvalidInput("no lattice centers".into()));
    }
    let radius = kato_radius(d);
    let alphas: Vec<f64> = (0..=12).rev().map(|k| radius * 0.5f64.powi(k)).collect();
    let gl = GaussLegendre::new(quad_nodes.max(8));
    let sphere = quadrature::angular_rule(d, quad_nodes.max(8));
    let profiles = par::map_collect(centers, |c| {
        ball_profile(c, d, &alphas, &gl, &sphere, |y, r| {
            kato_kernel(d, r) * v(y).abs()
        })
    });
    let mut sup = vec![0.0f64; alphas.len()];
    for p in &profiles {
        for (s, v) in sup.iter_mut().zip(p) {
            if v.is_nan() {
                return Err(Error::Quadrature("non-finite Kato integrand".into()));
            }
            *s = s.max(*v);
        }
    }
    let norm = sup[sup.len() - 1];
    Ok(KatoNormReport {
        dimension: d,
        norm,
        alpha_profile: alphas.into_iter().zip(sup).collect(),
        stabilized: norm.is_finite(),
    })
}

/// `sup_x (∫_{|x-y|≤1} |V(y)|ᵖ dy)^{1/p}` over `centers`, or `+∞` on divergence.
pub fn lp_locunif_norm(
    v: &ScalarFn,
    d: usize,
    p: f64,
    centers: &[Point],
    quad_nodes: usize,
) -> Result<f64> {
    tail_lp(v, d, p, centers, 0.0, quad_nodes)
}

/// Ball integrals of `|1_{|y|≥R} V|ᵖ`. Rays are split where they cross
/// `|y| = R` so the cutoff does not spoil the quadrature.
fn tail_lp(
    v: &ScalarFn,
    d: usize,
    p: f64,
    centers: &[Point],
    cut: f64,
    quad_nodes: usize,
) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("need finite p ≥ 1, got {p}")));
    }
    if centers.is_empty() {
        return Err(Error::InvalidInput("no lattice centers".into()));
    }
    let gl = GaussLegendre::new(quad_nodes.max(8));
    let sphere = quadrature::angular_rule(d, quad_nodes.max(8));
    let values = par::map_collect(centers, |c| {
        let mut total = 0.0;
        for (dir, w) in &sphere {
            let ray = |r: f64| {
                let y = geometry::add(c, &geometry::scale(dir, r));
                if geometry::norm(&y) < cut {
                    0.0
                } else {
                    v(&y).abs().powf(p) * r.powi(d as i32 - 1)
                }
            };
            // crossings of |c + r ω| = cut on (0, 1)
            let mut breaks = vec![0.0];
            if cut > 0.0 {
                let b = geometry::dot(c, dir);
                let disc = b * b - (geometry::dot(c, c) - cut * cut);
                if disc > 0.0 {
                    for r in [-b - disc.sqrt(), -b + disc.sqrt()] {
                        if r > 0.0 && r < 1.0 {
                            breaks.push(r);
                        }
                    }
                }
            }
            breaks.push(1.0);
            let mut ray_total =
                quadrature::radial_integral(&gl, ray, breaks[1], RadialRule::default());
            for seg in breaks.windows(2).skip(1) {
                ray_total += quadrature::integrate_panels(&gl, ray, seg[0], seg[1], 4);
            }
            total += w * ray_total;
        }
        total
    });
    let mut sup = 0.0f64;
    for t in values {
        if t.is_nan() {
            return Err(Error::Quadrature("non-finite Lp integrand".into()));
        }
        sup = sup.max(t);
    }
    Ok(sup.powf(1.0 / p))
}

/// Centers for the tail norm at radius `R`: rings at `R - 1 + {0, ½, 1, 2, 4}`.
fn tail_centers(d: usize, r: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for off in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let rho = (r - 1.0 + off).max(0.0);
        for dir in geometry::directions(d, 8, 0.125) {
            out.push(geometry::scale(&dir, rho));
        }
    }
    out
}

/// `R ↦ ‖1_{≥R} W‖_{Lᵖ_loc,unif}` over a tail lattice; a pass has limit 0.
pub fn vanishing_certificate(
    w: &ScalarFn,
    d: usize,
    p: f64,
    radii: &[f64],
    quad_nodes: usize,
) -> Result<AsymptoticEstimate> {
    if radii.is_empty() || radii.windows(2).any(|x| x[0] >= x[1]) {
        return Err(Error::InvalidInput(
            "radii must be strictly increasing".into(),
        ));
    }
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        values.push(tail_lp(w, d, p, &tail_centers(d, r), r, quad_nodes)?);
    }
    // monotone envelope
    for k in (0..values.len().saturating_sub(1)).rev() {
        values[k] = values[k].max(values[k + 1]);
    }
    Ok(AsymptoticEstimate::from_values(
        radii.to_vec(),
        values,
        false,
    ))
}

/// `sup_x ∫_{|x-y|≤α} g_d |W| + e^{-√λ α/4}/(√λ α) ‖W‖_{L¹_loc,unif}`, an
/// upper-envelope surrogate with unit implicit constant.
pub fn resolvent_kato_bound(
    w: &ScalarFn,
    d: usize,
    lambda: f64,
    alpha: f64,
    centers: &[Point],
    quad_nodes: usize,
) -> Result<f64> {
    if !(lambda > 0.0) || !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "need λ > 0 and α ∈ (0, 1], got {lambda}, {alpha}"
        )));
    }
    let gl = GaussLegendre::new(quad_nodes.max(8));
    let sphere = quadrature::angular_rule(d, quad_nodes.max(8));
    let local = par::map_collect(centers, |c| {
        ball_profile(c, d, &[alpha], &gl, &sphere, |y, r| {
            kato_kernel(d, r) * w(y).abs()
        })[0]
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    let global = lp_locunif_norm(w, d, 1.0, centers, quad_nodes)?;
    let s = lambda.sqrt() * alpha;
    Ok(local + (-s / 4.0).exp() / s * global)
}

/// One term of the Weyl vanishing sequence.
#[derive(Debug, Clone, Serialize)]
pub struct WeylTerm {
    pub center: Point,
    pub radius: f64,
    /// `R^{-d} ∫_{|y|<R} (|y|/R)^{2-d} log²(R/|y|) |B(x_n+y)[y]|² dy`
    pub c_n: f64,
    /// `‖∇φ‖²` of the normalized tent state
    pub gradient_term: f64,
    /// `‖A_n φ‖²` with `A_n` the Poincaré gauge centered at `x_n`
    pub gauge_term: f64,
    /// `‖(P - A_n)φ‖²`, equal to the sum of the two terms above for real `φ`
    pub rayleigh: f64,
}

/// Normalization constant `C_d` of the tent `C_d R^{-d/2}(1 - |y|/R)₊`.
pub fn tent_normalization(d: usize) -> f64 {
    // ∫ (1 - |y|)₊² dy = |S^{d-1}| ∫_0^1 (1-r)² r^{d-1} dr
    let surface = if d == 2 {
        std::f64::consts::TAU
    } else {
        4.0 * std::f64::consts::PI
    };
    let moment = if d == 2 { 1.0 / 12.0 } else { 1.0 / 30.0 };
    (1.0 / (surface * moment)).sqrt()
}

/// `∫_{S^{d-1}} ∫_0^R f(r, ω) dr dω`, panels graded toward `r = 0`.
fn ball_rays<F>(gl: &GaussLegendre, sphere: &[(Point, f64)], radius: f64, f: F) -> Result<f64>
where
    F: Fn(f64, &Point) -> Result<f64>,
{
    let mut total = 0.0;
    for (dir, w) in sphere {
        let mut failure = None;
        let v = quadrature::integrate_clustered(
            gl,
            |r| match f(r, dir) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            radius,
            40,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        total += w * v;
    }
    Ok(total)
}

/// Weyl vanishing quantities `C_n` and the tent-state Rayleigh quotients.
///
/// With `(|y|/R)^{2-d} |y|^{d-1} = R^{d-2} |y|`, the quantity reduces to
/// `C_n = R^{-2} ∫∫ r log²(R/r) |B̃(rω)|² dr dω`.
pub fn weyl_vanishing(
    field: &FieldSpec,
    centers: &[Point],
    radii: &[f64],
    quad_nodes: usize,
) -> Result<Vec<WeylTerm>> {
    if centers.len() != radii.len() {
        return Err(Error::InvalidInput(format!(
            "{} centers but {} radii",
            centers.len(),
            radii.len()
        )));
    }
    if field.is_aharonov_bohm() {
        return Err(Error::InvalidInput(
            "Weyl quantities need a pointwise field".into(),
        ));
    }
    let d = field.dim();
    let gl = GaussLegendre::new(quad_nodes.max(8));
    let sphere = quadrature::angular_rule(d, quad_nodes.max(8));
    let surface: f64 = sphere.iter().map(|(_, w)| w).sum();
    let cd2 = tent_normalization(d).powi(2);
    let mut out = Vec::with_capacity(radii.len());
    for (c, &rn) in centers.iter().zip(radii) {
        if !(rn > 0.0) {
            return Err(Error::InvalidInput(format!(
                "radius must be positive, got {rn}"
            )));
        }
        let shifted = field.clone().with_base_point(*c);
        let c_integral = ball_rays(&gl, &sphere, rn, |r, dir| {
            if r == 0.0 {
                return Ok(0.0);
            }
            let b = fields::btilde(&shifted, &geometry::scale(dir, r))?;
            Ok(r * (rn / r).ln().powi(2) * geometry::dot(&b, &b))
        })?;
        let c_n = c_integral / (rn * rn);
        let gauge = fields::poincare_gauge(&shifted, quad_nodes.max(8))?;
        let gauge_integral = ball_rays(&gl, &sphere, rn, |r, dir| {
            let a = gauge.eval(&geometry::scale(dir, r))?;
            let tent = (1.0 - r / rn).max(0.0);
            Ok(geometry::dot(&a, &a) * tent * tent * r.powi(d as i32 - 1))
        })?;
        let gauge_term = cd2 * gauge_integral / rn.powi(d as i32);
        // |∇φ|² = C_d² R^{-d-2} on the ball
        let gradient_term = cd2 * surface / (d as f64 * rn * rn);
        if !gauge_term.is_finite() || !c_n.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite Weyl quantity at radius {rn}"
            )));
        }
        out.push(WeylTerm {
            center: *c,
            radius: rn,
            c_n,
            gradient_term,
            gauge_term,
            rayleigh: gradient_term + gauge_term,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{self, FieldProfile};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn radial(f: fn(f64) -> f64) -> ScalarFn {
        Arc::new(move |x: &Point| f(geometry::norm(x)))
    }

    #[test]
    fn beta_examples() {
        let radii = [50.0, 100.0, 200.0];
        let e = beta_estimate(
            &FieldProfile::InversePower {
                b0: 1.0,
                alpha: 1.0,
            }
            .field(),
            &radii,
            16,
        )
        .unwrap();
        assert!(e.stabilized);
        assert_relative_eq!(e.limit, 1.0, epsilon = 1e-12);
        let e = beta_estimate(
            &FieldProfile::InversePower {
                b0: 1.0,
                alpha: 2.0,
            }
            .field(),
            &radii,
            16,
        )
        .unwrap();
        assert!(e.stabilized);
        assert_eq!(e.limit, 0.0);
        let e = beta_estimate(
            &FieldProfile::InversePower {
                b0: 1.0,
                alpha: 0.5,
            }
            .field(),
            &radii,
            16,
        )
        .unwrap();
        assert!(!e.stabilized);
        assert!(e.limit.is_infinite());
    }

    #[test]
    fn values_are_non_increasing() {
        let f = FieldProfile::Gaussian {
            amplitude: 1.0,
            width: 3.0,
        }
        .field();
        let e = beta_estimate(&f, &[1.0, 2.0, 4.0, 8.0], 16).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn omega1_examples() {
        let radii = [100.0, 200.0, 400.0];
        let tail: ScalarFn = radial(|r| -8.0 * (2.0 * r).sin() / r);
        let e = omega1_estimate(&tail, 2, &radii, 16).unwrap();
        assert!((e.limit - 8.0).abs() < 0.01, "{e:?}");
        let compact: ScalarFn = radial(|r| if r < 3.0 { 1.0 } else { 0.0 });
        assert_eq!(omega1_estimate(&compact, 2, &radii, 16).unwrap().limit, 0.0);
        let inv_sq: ScalarFn = radial(|r| r.powi(-2));
        let e = omega1_estimate(&inv_sq, 3, &radii, 16).unwrap();
        assert!(e.stabilized && e.limit == 0.0);
    }

    #[test]
    fn omega2_examples() {
        let radii = [100.0, 200.0, 400.0];
        let v = PotentialSpec::radial(2, Arc::new(|r: f64| -8.0 * (2.0 * r).sin() / r));
        let e = omega2_estimate(&v, &radii, 16).unwrap();
        assert!((e.limit - 16.0).abs() < 0.01, "{e:?}");
        assert_eq!(
            omega2_estimate(&PotentialSpec::zero(2), &radii, 16)
                .unwrap()
                .limit,
            0.0
        );
        let sin2 = profiles::PotentialProfile::SinSquared { omega0: 1.0 }.potential(2);
        let e = omega2_estimate(&sin2, &radii, 16).unwrap();
        assert!(!e.stabilized && e.limit.is_infinite());
    }

    #[test]
    fn estimator_input_checks() {
        let f = FieldProfile::Constant { b0: 1.0 }.field();
        assert!(beta_estimate(&f, &[2.0, 1.0], 16).is_err());
        assert!(beta_estimate(&f, &[1.0, 2.0], 8).is_err());
    }

    #[test]
    fn kato_examples() {
        let one: ScalarFn = Arc::new(|_| 1.0);
        let k3 = kato_norm(&one, 3, 16).unwrap();
        assert_relative_eq!(k3.norm, 2.0 * PI, epsilon = 1e-10);
        let k2 = kato_norm(&one, 2, 16).unwrap();
        assert_relative_eq!(k2.norm, PI * 2f64.ln() / 4.0 + PI / 8.0, epsilon = 1e-10);
        let zero: ScalarFn = Arc::new(|_| 0.0);
        assert_eq!(kato_norm(&zero, 3, 16).unwrap().norm, 0.0);
        for r in [&k2, &k3] {
            assert!(r.alpha_profile.windows(2).all(|w| w[0].1 <= w[1].1));
            assert!(r.in_kato_class(1e-3));
        }
    }

    #[test]
    fn kato_class_failure_is_visible() {
        // |x|^{-2} in d = 3 is not Kato: the α-integral does not shrink
        let v: ScalarFn = radial(|r| r.powi(-2));
        let report = kato_norm_with(&v, 3, 16, &[[0.0; 3]]).unwrap();
        assert!(!report.in_kato_class(1e-3));
    }

    #[test]
    fn lp_examples() {
        let c: ScalarFn = Arc::new(|_| 3.0);
        let origin = [[0.0; 3]];
        assert_relative_eq!(
            lp_locunif_norm(&c, 3, 2.0, &origin, 16).unwrap(),
            3.0 * (4.0 * PI / 3.0).sqrt(),
            epsilon = 1e-10
        );
        let inv: ScalarFn = radial(|r| 1.0 / r);
        assert_relative_eq!(
            lp_locunif_norm(&inv, 3, 2.0, &origin, 16).unwrap(),
            (4.0 * PI).sqrt(),
            epsilon = 1e-10
        );
        let inv2: ScalarFn = radial(|r| r.powi(-2));
        assert!(lp_locunif_norm(&inv2, 3, 2.0, &origin, 16)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn vanishing_examples() {
        let radii = [20.0, 40.0, 80.0];
        let compact: ScalarFn = radial(|r| if r < 5.0 { 1.0 } else { 0.0 });
        let e = vanishing_certificate(&compact, 2, 1.0, &radii, 16).unwrap();
        assert!(e.values.iter().all(|&v| v == 0.0) && e.vanishes(0.0));
        let inv: ScalarFn = radial(|r| 1.0 / r);
        let e = vanishing_certificate(&inv, 2, 1.0, &radii, 16).unwrap();
        for (r, v) in radii.iter().zip(&e.values) {
            assert!((v * r / PI - 1.0).abs() < 0.1, "{r}: {v}");
        }
        assert!(e.vanishes(0.0));
        let one: ScalarFn = Arc::new(|_| 1.0);
        let e = vanishing_certificate(&one, 2, 1.0, &radii, 16).unwrap();
        assert_relative_eq!(e.limit, PI, epsilon = 1e-8);
        assert!(!e.vanishes(1e-3));
    }

    #[test]
    fn resolvent_examples() {
        let origin = [[0.0; 3]];
        let zero: ScalarFn = Arc::new(|_| 0.0);
        assert_eq!(
            resolvent_kato_bound(&zero, 3, 16.0, 1.0, &origin, 16).unwrap(),
            0.0
        );
        let one: ScalarFn = Arc::new(|_| 1.0);
        let v = resolvent_kato_bound(&one, 3, 16.0, 1.0, &origin, 16).unwrap();
        // the locally uniform L¹ norm of 1 is the unit-ball volume 4π/3
        assert_relative_eq!(
            v,
            2.0 * PI + (-1f64).exp() / 4.0 * 4.0 * PI / 3.0,
            epsilon = 1e-10
        );
        let mut last = f64::INFINITY;
        for lambda in [1.0, 4.0, 16.0, 64.0, 256.0] {
            let v = resolvent_kato_bound(&one, 3, lambda, 0.5, &origin, 16).unwrap();
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn weyl_constant_field() {
        let f = FieldProfile::Constant { b0: 2.0 }.field();
        let radii = [1.0, 2.0, 4.0];
        let centers = [[10.0, 0.0, 0.0], [20.0, 0.0, 0.0], [40.0, 0.0, 0.0]];
        let terms = weyl_vanishing(&f, &centers, &radii, 16).unwrap();
        for t in &terms {
            assert_relative_eq!(
                t.c_n,
                PI * 4.0 * t.radius * t.radius / 16.0,
                max_relative = 1e-8
            );
            assert!(t.gauge_term <= 4.0 * tent_normalization(2).powi(2) * t.c_n * (1.0 + 1e-8));
        }
        let zero = weyl_vanishing(
            &FieldProfile::Constant { b0: 0.0 }.field(),
            &centers,
            &radii,
            16,
        )
        .unwrap();
        assert!(zero.iter().all(|t| t.c_n == 0.0 && t.gauge_term == 0.0));
    }

    #[test]
    fn tent_normalization_in_the_plane() {
        assert_relative_eq!(tent_normalization(2).powi(2), 6.0 / PI, epsilon = 1e-14);
    }
}
