//! Magnetic fields, potentials and the Poincaré (transversal) gauge.
//!
//! A field is stored as the antisymmetric matrix `B(x)` with
//! `B(x)[v] = M v`; in the plane `M = [[0, -b], [b, 0]]`, in space
//! `M v = B ∧ v`. The derived vector field `B̃_w(x) = B(x + w)[x]` drives
//! both the gauge construction and the asymptotic bound `β`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{self, Matrix3, Point, ORIGIN};
use crate::par;
use crate::quadrature::{self, GaussLegendre, RadialRule};

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&Point) -> Matrix3 + Send + Sync>;

#[derive(Clone)]
pub enum FieldKind {
    /// Planar field depending only on `|x|`.
    RadialProfile(RadialFn),
    /// General field given as an antisymmetric matrix at each point.
    Sampler(MatrixFn),
    /// Idealized flux tube at the origin, `A = flux (-y, x) / r²`.
    AharonovBohm { flux: f64 },
}

#[derive(Clone)]
pub struct FieldSpec {
    dim: usize,
    kind: FieldKind,
    base_point: Point,
    label: String,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            FieldKind::RadialProfile(_) => "radial_profile".to_string(),
            FieldKind::Sampler(_) => "sampler".to_string(),
            FieldKind::AharonovBohm { flux } => format!("aharonov_bohm({flux})"),
        };
        f.debug_struct("FieldSpec")
            .field("dim", &self.dim)
            .field("kind", &kind)
            .field("base_point", &self.base_point)
            .field("label", &self.label)
            .finish()
    }
}

fn planar_matrix(b: f64) -> Matrix3 {
    [[0.0, -b, 0.0], [b, 0.0, 0.0], [0.0, 0.0, 0.0]]
}

impl FieldSpec {
    pub fn new(dim: usize, kind: FieldKind) -> Result<Self> {
        match (&kind, dim) {
            (_, d) if d != 2 && d != 3 => Err(Error::InvalidInput(format!(
                "field dimension must be 2 or 3, got {d}"
            ))),
            (FieldKind::RadialProfile(_), 3) => Err(Error::InvalidInput(
                "radial profiles are planar (dimension 2) only".into(),
            )),
            (FieldKind::AharonovBohm { .. }, 3) => Err(Error::InvalidInput(
                "Aharonov–Bohm fluxes are planar (dimension 2) only".into(),
            )),
            _ => Ok(Self {
                dim,
                kind,
                base_point: ORIGIN,
                label: String::new(),
            }),
        }
    }

    pub fn radial(b: RadialFn) -> Self {
        Self::new(2, FieldKind::RadialProfile(b)).expect("planar radial field")
    }

    /// Planar field from a scalar `b(x)`.
    pub fn planar(b: ScalarFn) -> Self {
        let m: MatrixFn = Arc::new(move |x| planar_matrix(b(x)));
        Self::new(2, FieldKind::Sampler(m)).expect("planar sampler")
    }

    /// Spatial field from its axial vector `B(x)`.
    pub fn spatial(b: VectorFn) -> Self {
        let m: MatrixFn = Arc::new(move |x| geometry::cross_matrix(&b(x)));
        Self::new(3, FieldKind::Sampler(m)).expect("spatial sampler")
    }

    pub fn sampler(dim: usize, m: MatrixFn) -> Result<Self> {
        Self::new(dim, FieldKind::Sampler(m))
    }

    pub fn aharonov_bohm(flux: f64) -> Self {
        Self::new(2, FieldKind::AharonovBohm { flux }).expect("planar flux")
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, FieldKind::Sampler(Arc::new(|_| [[0.0; 3]; 3]))).expect("zero field")
    }

    pub fn with_base_point(mut self, w: Point) -> Self {
        self.base_point = w;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn base_point(&self) -> Point {
        self.base_point
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_aharonov_bohm(&self) -> bool {
        matches!(self.kind, FieldKind::AharonovBohm { .. })
    }

    /// The matrix `B(y)` at the absolute position `y`.
    pub fn matrix_at(&self, y: &Point) -> Result<Matrix3> {
        let m = match &self.kind {
            FieldKind::RadialProfile(b) => planar_matrix(b(geometry::norm(y))),
            FieldKind::Sampler(m) => m(y),
            FieldKind::AharonovBohm { .. } => {
                return Err(Error::InvalidInput(
                    "Aharonov–Bohm flux has no pointwise field; use the channel reduction".into(),
                ))
            }
        };
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("field sample at {y:?}"),
            });
        }
        Ok(m)
    }

    /// Field strength as an axial vector: `(0, 0, b)` in the plane.
    pub fn axial_at(&self, y: &Point) -> Result<Point> {
        let m = self.matrix_at(y)?;
        Ok(if self.dim == 2 {
            [0.0, 0.0, m[1][0]]
        } else {
            geometry::axial_vector(&m)
        })
    }

    /// Largest `|B_jm + B_mj|` over `samples` Halton points in `[-extent, extent]^d`.
    pub fn antisymmetry_defect(&self, samples: usize, extent: f64) -> Result<f64> {
        let lo = [-extent; 3];
        let hi = [extent; 3];
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let y = geometry::halton_point(i, self.dim, &lo, &hi);
            let m = self.matrix_at(&y)?;
            for j in 0..self.dim {
                for k in 0..self.dim {
                    worst = worst.max((m[j][k] + m[k][j]).abs());
                }
            }
        }
        Ok(worst)
    }
}

fn check_dim(field_dim: usize, x: &Point) -> Result<()> {
    if field_dim == 2 && x[2] != 0.0 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: 3,
        });
    }
    Ok(())
}

/// `B̃_w(x) = B(x + w)[x]`.
pub fn btilde(field: &FieldSpec, x: &Point) -> Result<Point> {
    check_dim(field.dim, x)?;
    if !geometry::is_finite(x) {
        return Err(Error::InvalidInput(format!("non-finite point {x:?}")));
    }
    let y = geometry::add(x, &field.base_point);
    let v = match &field.kind {
        FieldKind::RadialProfile(b) => {
            let s = b(geometry::norm(&y));
            if !s.is_finite() {
                if x == &ORIGIN {
                    return Ok(ORIGIN);
                }
                return Err(Error::NonFinite {
                    context: format!("radial profile at {y:?}"),
                });
            }
            [-s * x[1], s * x[0], 0.0]
        }
        _ => {
            if x == &ORIGIN {
                return Ok(ORIGIN);
            }
            let m = field.matrix_at(&y)?;
            geometry::mat_vec(&m, x)
        }
    };
    if !geometry::is_finite(&v) {
        return Err(Error::NonFinite {
            context: format!("B-tilde at {x:?}"),
        });
    }
    Ok(v)
}

/// Scalar potential with optional closed-form virial `x·∇V` and an
/// optional splitting `V = V₁ + V₂`.
#[derive(Clone)]
pub struct PotentialSpec {
    dim: usize,
    v: ScalarFn,
    virial: Option<ScalarFn>,
    split: Option<(ScalarFn, ScalarFn)>,
    label: String,
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("dim", &self.dim)
            .field("virial", &self.virial.is_some())
            .field("split", &self.split.is_some())
            .field("label", &self.label)
            .finish()
    }
}

impl PotentialSpec {
    pub fn new(dim: usize, v: ScalarFn) -> Self {
        Self {
            dim,
            v,
            virial: None,
            split: None,
            label: String::new(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, Arc::new(|_| 0.0)).with_virial(Arc::new(|_| 0.0))
    }

    pub fn radial(dim: usize, v: RadialFn) -> Self {
        Self::new(dim, Arc::new(move |x| v(geometry::norm(x))))
    }

    pub fn with_virial(mut self, virial: ScalarFn) -> Self {
        self.virial = Some(virial);
        self
    }

    /// Attach `r V'(r)` for a radial potential.
    pub fn with_radial_virial(self, rv: RadialFn) -> Self {
        self.with_virial(Arc::new(move |x| rv(geometry::norm(x))))
    }

    /// Attach a splitting and check `V = V₁ + V₂` on sample points.
    pub fn with_split(mut self, v1: ScalarFn, v2: ScalarFn) -> Result<Self> {
        let lo = [-10.0; 3];
        let hi = [10.0; 3];
        for i in 0..256 {
            let x = geometry::halton_point(i, self.dim, &lo, &hi);
            let v = (self.v)(&x);
            let defect = (v - v1(&x) - v2(&x)).abs();
            if defect > 1e-12 * (1.0 + v.abs()) {
                return Err(Error::InvalidInput(format!(
                    "split does not add up to V at {x:?} (defect {defect:.3e})"
                )));
            }
        }
        self.split = Some((v1, v2));
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: &Point) -> f64 {
        (self.v)(x)
    }

    pub fn function(&self) -> ScalarFn {
        self.v.clone()
    }

    pub fn has_virial(&self) -> bool {
        self.virial.is_some()
    }

    pub fn split(&self) -> Option<&(ScalarFn, ScalarFn)> {
        self.split.as_ref()
    }

    /// `x·∇V(x)`, closed form if attached, else a central difference along
    /// `x` with step `1e-5 (1 + |x|)`.
    pub fn virial_at(&self, x: &Point) -> Result<f64> {
        if let Some(vir) = &self.virial {
            return Ok(vir(x));
        }
        radial_difference(&self.v, x)
    }
}

/// `x·∇f(x)` by a central difference along the ray through `x`.
pub fn radial_difference(f: &ScalarFn, x: &Point) -> Result<f64> {
    let r = geometry::norm(x);
    if r == 0.0 {
        return Ok(0.0);
    }
    let step = 1e-5 * (1.0 + r);
    let unit = geometry::scale(x, 1.0 / r);
    let plus = f(&geometry::add(x, &geometry::scale(&unit, step)));
    let minus = f(&geometry::sub(x, &geometry::scale(&unit, step)));
    let q = r * (plus - minus) / (2.0 * step);
    if q.is_finite() {
        Ok(q)
    } else {
        Err(Error::Estimator(format!(
            "non-finite difference quotient of x·∇V at {x:?}"
        )))
    }
}

#[derive(Clone)]
enum GaugeRepr {
    Poincare {
        field: FieldSpec,
        rule: Arc<GaussLegendre>,
    },
    Analytic(VectorFn),
}

/// Vector potential. Points are measured from the field's base point.
#[derive(Clone)]
pub struct GaugePotential {
    dim: usize,
    repr: GaugeRepr,
    quadrature_nodes: usize,
    transversal: bool,
}

impl fmt::Debug for GaugePotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugePotential")
            .field("dim", &self.dim)
            .field("quadrature_nodes", &self.quadrature_nodes)
            .field("transversal", &self.transversal)
            .finish()
    }
}

/// Panels in the Poincaré line integral shrink by this factor toward `t = 0`.
const GAUGE_PANEL_RATIO: f64 = 0.25;
const GAUGE_LEVELS: usize = 30;

impl GaugePotential {
    /// Closed-form potential; `transversal` records whether `x·A(x) = 0`.
    pub fn analytic(dim: usize, a: VectorFn, transversal: bool) -> Self {
        Self {
            dim,
            repr: GaugeRepr::Analytic(a),
            quadrature_nodes: 0,
            transversal,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.quadrature_nodes
    }

    pub fn transversal(&self) -> bool {
        self.transversal
    }

    pub fn eval(&self, x: &Point) -> Result<Point> {
        match &self.repr {
            GaugeRepr::Analytic(a) => {
                let v = a(x);
                if geometry::is_finite(&v) {
                    Ok(v)
                } else {
                    Err(Error::NonFinite {
                        context: format!("gauge at {x:?}"),
                    })
                }
            }
            GaugeRepr::Poincare { field, rule } => poincare_line_integral(field, rule, x),
        }
    }
}

/// `∫_0^1 B̃(t x) dt` on panels graded toward `t = 0`, summed from the
/// outside in and cut off once the inner panels stop contributing.
fn poincare_line_integral(field: &FieldSpec, rule: &GaussLegendre, x: &Point) -> Result<Point> {
    if x == &ORIGIN {
        return Ok(ORIGIN);
    }
    let mut total = ORIGIN;
    let mut quiet = 0;
    let mut hi = 1.0;
    for level in 0..=GAUGE_LEVELS {
        let lo = if level == GAUGE_LEVELS {
            0.0
        } else {
            hi * GAUGE_PANEL_RATIO
        };
        let mut panel = ORIGIN;
        for (t, w) in rule.mapped(lo, hi) {
            let b = btilde(field, &geometry::scale(x, t))?;
            panel = geometry::add(&panel, &geometry::scale(&b, w));
        }
        total = geometry::add(&total, &panel);
        if geometry::norm(&panel) <= 1e-17 * geometry::norm(&total) {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        hi = lo;
    }
    Ok(total)
}

/// Vector potential in the Poincaré gauge, `A(x) = ∫_0^1 B(tx)[tx] dt`.
///
/// Refuses the Aharonov–Bohm kind (its potential is closed form) and
/// fields whose line integral does not settle when the node count doubles.
pub fn poincare_gauge(field: &FieldSpec, nodes: usize) -> Result<GaugePotential> {
    if nodes < 8 {
        return Err(Error::InvalidInput(format!(
            "need at least 8 quadrature nodes, got {nodes}"
        )));
    }
    if field.is_aharonov_bohm() {
        return Err(Error::Gauge(
            "Aharonov–Bohm potential is closed form; quadrature is not applicable".into(),
        ));
    }
    let coarse = GaussLegendre::new(nodes);
    let fine = GaussLegendre::new(2 * nodes);
    let lo = [-4.0; 3];
    let hi = [4.0; 3];
    for i in 0..16 {
        let x = geometry::halton_point(i, field.dim, &lo, &hi);
        let a1 =
            poincare_line_integral(field, &coarse, &x).map_err(|e| Error::Gauge(e.to_string()))?;
        let a2 =
            poincare_line_integral(field, &fine, &x).map_err(|e| Error::Gauge(e.to_string()))?;
        let diff = geometry::norm(&geometry::sub(&a1, &a2));
        let scale = geometry::norm(&a2);
        if !(diff <= 1e-8 * scale.max(1e-8)) {
            return Err(Error::Gauge(format!(
                "line integral at {x:?} changes by {diff:.3e} when nodes double (|A| = {scale:.3e})"
            )));
        }
    }
    Ok(GaugePotential {
        dim: field.dim,
        repr: GaugeRepr::Poincare {
            field: field.clone(),
            rule: Arc::new(coarse),
        },
        quadrature_nodes: nodes,
        transversal: true,
    })
}

/// Axis-aligned box sampled by a Halton sequence.
#[derive(Debug, Clone, Copy)]
pub struct SampleBox {
    pub lo: Point,
    pub hi: Point,
    pub samples: usize,
}

impl SampleBox {
    pub fn cube(dim: usize, half_width: f64, samples: usize) -> Self {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for k in 0..dim {
            lo[k] = -half_width;
            hi[k] = half_width;
        }
        Self { lo, hi, samples }
    }
}

/// Max over sampled points of `|curl A - B| / (1 + |B|)`, with the curl
/// taken by second-order central differences of step `h`. Points within
/// `10 h` of the origin are skipped. Returns `+∞` on any non-finite sample.
pub fn curl_check(
    gauge: &GaugePotential,
    field: &FieldSpec,
    h: f64,
    sample_box: &SampleBox,
) -> f64 {
    let dim = field.dim;
    let w = field.base_point;
    let residual = |i: usize| -> f64 {
        let x = geometry::halton_point(i, dim, &sample_box.lo, &sample_box.hi);
        if geometry::norm(&x) < 10.0 * h {
            return 0.0;
        }
        let partial = |axis: usize| -> Result<Point> {
            let mut xp = x;
            let mut xm = x;
            xp[axis] += h;
            xm[axis] -= h;
            let ap = gauge.eval(&xp)?;
            let am = gauge.eval(&xm)?;
            Ok(geometry::scale(&geometry::sub(&ap, &am), 0.5 / h))
        };
        let result = (|| -> Result<f64> {
            let b = field.axial_at(&geometry::add(&x, &w))?;
            let d: Vec<Point> = (0..dim).map(partial).collect::<Result<_>>()?;
            let curl = if dim == 2 {
                [0.0, 0.0, d[0][1] - d[1][0]]
            } else {
                [d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]]
            };
            Ok(geometry::norm(&geometry::sub(&curl, &b)) / (1.0 + geometry::norm(&b)))
        })();
        result.unwrap_or(f64::NAN)
    };
    let worst = par::max_range(sample_box.samples, residual);
    if worst.is_finite() {
        worst.max(0.0)
    } else {
        f64::INFINITY
    }
}

/// Largest `|x·A(x)| / (|x| |A(x)|)` over sampled points.
pub fn transversality_defect(gauge: &GaugePotential, sample_box: &SampleBox) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..sample_box.samples {
        let x = geometry::halton_point(i, gauge.dim, &sample_box.lo, &sample_box.hi);
        let a = gauge.eval(&x)?;
        let denom = geometry::norm(&x) * geometry::norm(&a);
        if denom > 0.0 {
            worst = worst.max(geometry::dot(&x, &a).abs() / denom);
        }
    }
    Ok(worst)
}

/// `(∫_{|x|<R} |x|^{2-d} log²(R/|x|) |B̃(x)|² dx)^{1/2}`, or `+∞` when the
/// radial integral diverges at the origin.
pub fn gauge_regularity_norm(field: &FieldSpec, radius: f64, nodes: usize) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let dim = field.dim;
    let gl = GaussLegendre::new(nodes.max(8));
    let sphere = quadrature::angular_rule(dim, nodes.max(8));
    let mut failure = None;
    let integrand = |r: f64| -> f64 {
        let mut shell = 0.0;
        for (dir, w) in &sphere {
            match btilde(field, &geometry::scale(dir, r)) {
                Ok(b) => shell += w * geometry::dot(&b, &b),
                Err(e) => {
                    failure.get_or_insert(e);
                    return f64::NAN;
                }
            }
        }
        // |x|^{2-d} dx = r^{2-d} r^{d-1} dr dΩ
        r * (radius / r).ln().powi(2) * shell
    };
    let v = quadrature::radial_integral(&gl, integrand, radius, RadialRule::default());
    if let Some(e) = failure {
        if !matches!(e, Error::NonFinite { .. }) {
            return Err(e);
        }
        return Ok(f64::INFINITY);
    }
    Ok(v.sqrt())
}

/// `∫_{|x|<R} |x|^{2-d} |A(x)|² dx`, the left side of the weighted gauge bound.
pub fn gauge_weighted_l2(gauge: &GaugePotential, radius: f64, nodes: usize) -> Result<f64> {
    let dim = gauge.dim;
    let gl = GaussLegendre::new(nodes.max(8));
    let sphere = quadrature::angular_rule(dim, nodes.max(8));
    let mut failure = None;
    let v = quadrature::radial_integral(
        &gl,
        |r| {
            let mut shell = 0.0;
            for (dir, w) in &sphere {
                match gauge.eval(&geometry::scale(dir, r)) {
                    Ok(a) => shell += w * geometry::dot(&a, &a),
                    Err(e) => {
                        failure.get_or_insert(e);
                        return f64::NAN;
                    }
                }
            }
            r * shell
        },
        radius,
        RadialRule::default(),
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn constant_planar(b0: f64) -> FieldSpec {
        FieldSpec::radial(Arc::new(move |_| b0))
    }

    #[test]
    fn btilde_examples() {
        let f = constant_planar(1.0);
        assert_eq!(btilde(&f, &[1.0, 0.0, 0.0]).unwrap(), [0.0, 1.0, 0.0]);
        assert_eq!(btilde(&f, &ORIGIN).unwrap(), ORIGIN);
        let f3 = FieldSpec::spatial(Arc::new(|_| [0.0, 0.0, 1.0]));
        assert_eq!(btilde(&f3, &[1.0, 0.0, 0.0]).unwrap(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn btilde_rejects_bad_input() {
        let f = constant_planar(1.0);
        assert!(matches!(
            btilde(&f, &[1.0, 0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = FieldSpec::planar(Arc::new(|_| f64::NAN));
        assert!(matches!(
            btilde(&bad, &[1.0, 0.0, 0.0]),
            Err(Error::NonFinite { .. })
        ));
        assert!(btilde(&FieldSpec::aharonov_bohm(0.5), &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn radial_profile_is_planar_only() {
        let r: RadialFn = Arc::new(|_| 1.0);
        assert!(FieldSpec::new(3, FieldKind::RadialProfile(r)).is_err());
    }

    #[test]
    fn btilde_is_orthogonal_to_x() {
        let f = FieldSpec::spatial(Arc::new(|x| [x[1].sin(), x[0] * x[2], 1.0 + x[0]]));
        for i in 0..200 {
            let x = geometry::halton_point(i, 3, &[-3.0; 3], &[3.0; 3]);
            let b = btilde(&f, &x).unwrap();
            assert!(
                geometry::dot(&x, &b).abs()
                    <= 1e-14 * (1.0 + geometry::norm(&x) * geometry::norm(&b))
            );
        }
        assert_eq!(f.antisymmetry_defect(64, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_gauge_is_symmetric_gauge() {
        let g = poincare_gauge(&constant_planar(1.0), 16).unwrap();
        let a = g.eval(&[0.3, -1.7, 0.0]).unwrap();
        assert_relative_eq!(a[0], 1.7 / 2.0, epsilon = 1e-13);
        assert_relative_eq!(a[1], 0.3 / 2.0, epsilon = 1e-13);
        assert_eq!(g.eval(&ORIGIN).unwrap(), ORIGIN);
        assert!(g.transversal());
    }

    #[test]
    fn inverse_r_profile_gives_unit_h() {
        let f = FieldSpec::radial(Arc::new(|r| 1.0 / r));
        let g = poincare_gauge(&f, 16).unwrap();
        let x = [2.0, 1.0, 0.0];
        let a = g.eval(&x).unwrap();
        let r = geometry::norm(&x);
        assert_relative_eq!(a[0], -1.0 / r, epsilon = 1e-13);
        assert_relative_eq!(a[1], 2.0 / r, epsilon = 1e-13);
    }

    #[test]
    fn gauge_construction_errors() {
        assert!(matches!(
            poincare_gauge(&FieldSpec::aharonov_bohm(1.0), 16),
            Err(Error::Gauge(_))
        ));
        assert!(matches!(
            poincare_gauge(&constant_planar(1.0), 4),
            Err(Error::InvalidInput(_))
        ));
        let singular = FieldSpec::radial(Arc::new(|r| r.powi(-2)));
        assert!(matches!(
            poincare_gauge(&singular, 16),
            Err(Error::Gauge(_))
        ));
    }

    #[test]
    fn integrable_singularity_is_absorbed() {
        // b = r^{-3/2}: B̃(tx) ~ t^{-1/2}, A = 2 (-y, x) r^{-3/2}
        let f = FieldSpec::radial(Arc::new(|r| r.powf(-1.5)));
        let g = poincare_gauge(&f, 16).unwrap();
        let x = [1.0, 2.0, 0.0];
        let r = geometry::norm(&x);
        let a = g.eval(&x).unwrap();
        assert_relative_eq!(a[1], 2.0 * r.powf(-1.5), max_relative = 1e-9);
    }

    #[test]
    fn node_doubling_is_stable_on_smooth_fields() {
        let f = FieldSpec::radial(Arc::new(|r: f64| (-r * r).exp()));
        let g16 = poincare_gauge(&f, 16).unwrap();
        let g32 = poincare_gauge(&f, 32).unwrap();
        for i in 0..50 {
            let x = geometry::halton_point(i, 2, &[-5.0; 3], &[5.0; 3]);
            let a = g16.eval(&x).unwrap();
            let b = g32.eval(&x).unwrap();
            assert!(geometry::norm(&geometry::sub(&a, &b)) <= 1e-8 * geometry::norm(&b).max(1e-12));
        }
    }

    #[test]
    fn curl_check_controls() {
        let f = constant_planar(2.0);
        let g = poincare_gauge(&f, 16).unwrap();
        let bx = SampleBox::cube(2, 3.0, 200);
        assert!(curl_check(&g, &f, 1e-3, &bx) < 1e-6);
        let wrong = constant_planar(1.0);
        assert!(curl_check(&g, &wrong, 1e-3, &bx) > 0.1);
        let nan_gauge = GaugePotential::analytic(2, Arc::new(|_| [f64::NAN; 3]), false);
        assert!(curl_check(&nan_gauge, &f, 1e-3, &bx).is_infinite());
    }

    #[test]
    fn curl_check_in_three_dimensions() {
        let f = FieldSpec::spatial(Arc::new(|x: &Point| {
            let e = (-geometry::dot(x, x)).exp();
            // divergence-free: curl of (0, 0, e^{-|x|^2}) = (-2y e, 2x e, 0)
            [-2.0 * x[1] * e, 2.0 * x[0] * e, 0.0]
        }));
        let g = poincare_gauge(&f, 16).unwrap();
        let bx = SampleBox::cube(3, 1.5, 60);
        assert!(curl_check(&g, &f, 1e-3, &bx) < 1e-5);
    }

    #[test]
    fn regularity_norm_examples() {
        // b ≡ 1, d = 2, R = 1: 2π ∫ r^3 log²(1/r) dr = 2π/32
        let v = gauge_regularity_norm(&constant_planar(1.0), 1.0, 16).unwrap();
        assert_relative_eq!(v, (std::f64::consts::TAU / 32.0).sqrt(), epsilon = 1e-12);
        assert_eq!(
            gauge_regularity_norm(&constant_planar(0.0), 1.0, 16).unwrap(),
            0.0
        );
        let singular = FieldSpec::radial(Arc::new(|r| r.powi(-2)));
        assert!(gauge_regularity_norm(&singular, 1.0, 16)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn split_is_validated() {
        let v = PotentialSpec::radial(2, Arc::new(|r| r.sin()));
        let ok = v
            .clone()
            .with_split(Arc::new(|x| geometry::norm(x).sin()), Arc::new(|_| 0.0));
        assert!(ok.is_ok());
        let bad = v.with_split(Arc::new(|_| 1.0), Arc::new(|_| 0.0));
        assert!(bad.is_err());
    }

    #[test]
    fn numerical_virial_matches_closed_form() {
        let v = PotentialSpec::radial(2, Arc::new(|r: f64| (-r * r).exp()));
        let x = [0.6, -0.8, 0.0];
        let r2: f64 = 1.0;
        assert_relative_eq!(
            v.virial_at(&x).unwrap(),
            -2.0 * r2 * (-r2).exp(),
            epsilon = 1e-9
        );
        let bad = PotentialSpec::radial(
            2,
            Arc::new(|r: f64| if r > 0.9 { f64::INFINITY } else { 0.0 }),
        );
        assert!(matches!(bad.virial_at(&x), Err(Error::Estimator(_))));
    }
}
