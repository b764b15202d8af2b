//! Grid quadratic forms and the identities built on them: the magnetic
//! virial, its Kato form, the exponentially weighted virial pair, the
//! energy boost and IMS localization.
//!
//! All sums carry the node weight `hᵈ`. Grid coordinates are the
//! coordinates of the gauge, so fields passed here must have their base
//! point at the origin.

mod grid;
mod hamiltonian;
mod weight;

pub use grid::{dilation_adjoint, dilation_apply, Grid, GridState};
pub use hamiltonian::{Eigenpair, Hamiltonian};
pub use weight::WeightFunction;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{self, FieldSpec, GaugePotential, SampleBox, ScalarFn, VectorFn};
use crate::geometry::{self, Point, ORIGIN};
use crate::par;

/// `q(φ, φ)` for an admissible state.
pub fn form_q(ham: &Hamiltonian, phi: &GridState) -> Result<f64> {
    phi.check_admissible()?;
    Ok(ham.form(phi, phi).re)
}

/// `iD_t φ = (U_t φ - U_{-t} φ) / (2t)` with `U_{-t}` taken as the discrete
/// adjoint of `U_t`, so `iD_t` is exactly anti-Hermitian on the grid.
pub fn dilation_difference(phi: &GridState, t: f64) -> Result<GridState> {
    if t <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "dilation step must be positive, got {t}"
        )));
    }
    let plus = dilation_apply(phi, t)?;
    let minus = dilation_adjoint(phi, t)?;
    let inv = 0.5 / t;
    Ok(phi.with_values(
        plus.values
            .iter()
            .zip(&minus.values)
            .map(|(a, b)| (a - b) * inv)
            .collect(),
    ))
}

/// `2 Re q(φ, iD_t φ)`.
pub fn commutator_quotient(ham: &Hamiltonian, phi: &GridState, t: f64) -> Result<f64> {
    phi.check_admissible()?;
    let d = dilation_difference(phi, t)?;
    Ok(2.0 * ham.form(phi, &d).re)
}

fn ensure_origin(field: Option<&FieldSpec>, grid: Grid) -> Result<()> {
    let Some(field) = field else {
        return Ok(());
    };
    if field.dim() != grid.dim {
        return Err(Error::DimensionMismatch {
            expected: grid.dim,
            got: field.dim(),
        });
    }
    if field.base_point() != ORIGIN {
        return Err(Error::InvalidInput(format!(
            "field base point must be the origin, got {:?}",
            field.base_point()
        )));
    }
    Ok(())
}

fn expectation<F>(phi: &GridState, f: F) -> Result<f64>
where
    F: Fn(&Point) -> f64 + Sync + Send,
{
    let g = phi.grid;
    let values = par::map_range(g.len(), |i| {
        let x = g.point(i);
        let v = f(&x);
        if v.is_finite() {
            Ok(v * phi.values[i].norm_sqr())
        } else {
            Err(Error::NonFinite {
                context: format!("expectation weight at {x:?}"),
            })
        }
    });
    let mut total = 0.0;
    for v in values {
        total += v?;
    }
    Ok(total * g.weight())
}

/// `Re ⟨B̃φ, Πφ⟩` with `Πφ` already computed; zero without a field.
fn btilde_term(
    field: Option<&FieldSpec>,
    phi: &GridState,
    momentum: &[Vec<Complex64>],
) -> Result<f64> {
    let Some(field) = field else {
        return Ok(0.0);
    };
    let g = phi.grid;
    let terms = par::map_range(g.len(), |i| -> Result<f64> {
        let b = fields::btilde(field, &g.point(i))?;
        let mut s = Complex64::new(0.0, 0.0);
        for (j, p) in momentum.iter().enumerate() {
            s += (phi.values[i] * b[j]).conj() * p[i];
        }
        Ok(s.re)
    });
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total * g.weight())
}

/// `Im ⟨x f φ, Πφ⟩` with `Πφ` already computed.
fn kato_im(f: &ScalarFn, phi: &GridState, momentum: &[Vec<Complex64>]) -> Result<f64> {
    let g = phi.grid;
    let terms = par::map_range(g.len(), |i| -> Result<f64> {
        let x = g.point(i);
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: format!("x V₁ at {x:?}"),
            });
        }
        let mut s = Complex64::new(0.0, 0.0);
        for (j, p) in momentum.iter().enumerate() {
            s += (phi.values[i] * (x[j] * v)).conj() * p[i];
        }
        Ok(s.im)
    });
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total * g.weight())
}

/// Rejects a gauge whose curl does not reproduce the field.
fn check_curl(
    ham: &Hamiltonian,
    gauge: Option<&GaugePotential>,
    field: Option<&FieldSpec>,
) -> Result<()> {
    if let (Some(a), Some(field)) = (gauge, field) {
        let half = 0.5 * ham.grid().half_width();
        let residual =
            fields::curl_check(a, field, 1e-3, &SampleBox::cube(ham.grid().dim, half, 64));
        if !(residual < 1e-4) {
            return Err(Error::InvalidInput(format!(
                "gauge and field disagree: curl residual {residual:.3e}"
            )));
        }
    }
    Ok(())
}

/// How `⟨φ, x·∇V φ⟩` was obtained in [`virial_rhs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VirialSource {
    Analytic,
    /// Kato form for `V₁`, differences for `V₂`
    KatoSplit,
    /// Kato form for the whole potential
    KatoWhole,
}

/// `⟨φ, x·∇V φ⟩`: closed form if attached, else the Kato form.
pub fn potential_virial(ham: &Hamiltonian, phi: &GridState) -> Result<(f64, VirialSource)> {
    let pot = ham.potential();
    if pot.has_virial() {
        return Ok((
            expectation(phi, |x| pot.virial_at(x).unwrap_or(f64::NAN))?,
            VirialSource::Analytic,
        ));
    }
    let momentum = ham.momentum(phi);
    let d = ham.grid().dim as f64;
    match pot.split() {
        Some((v1, v2)) => {
            let k = 2.0 * kato_im(v1, phi, &momentum)? - d * expectation(phi, |x| v1(x))?;
            let v2 = v2.clone();
            let rest = expectation(phi, |x| {
                fields::radial_difference(&v2, x).unwrap_or(f64::NAN)
            })?;
            Ok((k + rest, VirialSource::KatoSplit))
        }
        None => {
            let v = pot.function();
            let k = 2.0 * kato_im(&v, phi, &momentum)? - d * expectation(phi, |x| v(x))?;
            Ok((k, VirialSource::KatoWhole))
        }
    }
}

/// `2‖Πφ‖² + 2 Re⟨B̃φ, Πφ⟩ - ⟨φ, x·∇V φ⟩`. Pass no field for `B = 0`.
pub fn virial_rhs(
    ham: &Hamiltonian,
    gauge: Option<&GaugePotential>,
    field: Option<&FieldSpec>,
    phi: &GridState,
) -> Result<f64> {
    ensure_origin(field, ham.grid())?;
    check_curl(ham, gauge, field)?;
    phi.check_admissible()?;
    let momentum = ham.momentum(phi);
    let w = phi.grid.weight();
    let kinetic: f64 = momentum
        .iter()
        .map(|p| par::sum_range(p.len(), |i| p[i].norm_sqr()))
        .sum::<f64>()
        * w;
    let magnetic = btilde_term(field, phi, &momentum)?;
    let (xv, _) = potential_virial(ham, phi)?;
    Ok(2.0 * kinetic + 2.0 * magnetic - xv)
}

/// `⟨φ, x·∇V₁ φ⟩` in the form `2 Im⟨xV₁φ, Πφ⟩ - d⟨φ, V₁φ⟩`.
///
/// Only the gauge of `ham` is used; its potential plays no role.
pub fn kato_virial(ham: &Hamiltonian, v1: &ScalarFn, phi: &GridState) -> Result<f64> {
    let momentum = ham.momentum(phi);
    let d = ham.grid().dim as f64;
    Ok(2.0 * kato_im(v1, phi, &momentum)? - d * expectation(phi, |x| v1(x))?)
}

/// `⟨φ, f φ⟩` on the grid.
pub fn grid_expectation(phi: &GridState, f: &ScalarFn) -> Result<f64> {
    expectation(phi, |x| f(x))
}

/// Both sides of the exponentially weighted virial identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedVirial {
    /// energy form of the commutator
    pub rhs1: f64,
    /// dilation form of the commutator
    pub rhs2: f64,
    pub norm_sqr: f64,
}

impl WeightedVirial {
    pub fn mismatch(&self) -> f64 {
        (self.rhs1 - self.rhs2).abs()
    }
}

/// `ψ_F = e^F ψ`.
pub fn weighted_state(psi: &GridState, w: &WeightFunction) -> GridState {
    psi.multiply(|x| w.f(x).exp())
}

/// `Dψ = -i(x·∇ψ + (d/2)ψ)` with central differences.
fn generator(psi: &GridState) -> Vec<Complex64> {
    let g = psi.grid;
    let partials: Vec<Vec<Complex64>> = (0..g.dim).map(|j| psi.partial(j)).collect();
    let half_d = 0.5 * g.dim as f64;
    par::map_range(g.len(), |i| {
        let x = g.point(i);
        let mut s = psi.values[i] * half_d;
        for (j, p) in partials.iter().enumerate() {
            s += p[i] * x[j];
        }
        -Complex64::new(0.0, 1.0) * s
    })
}

/// Evaluates both expressions for `⟨ψ_F, i[H, D] ψ_F⟩` at an approximate
/// eigenpair `(ψ, E)`:
///
/// * `rhs1 = ⟨(E + |∇F|²)⟩ + 2 Re⟨Πψ_F, B̃ψ_F⟩ + 2 Im⟨Πψ_F, xV₁ψ_F⟩
///   + ‖Πψ_F‖² + ⟨(dV₁ - V)⟩ - ⟨x·∇V₂⟩`
/// * `rhs2 = -4‖√g Dψ_F‖² + ⟨((x·∇)²g - x·∇|∇F|²)⟩`
///
/// Without a splitting `V₁ = 0` and `V₂ = V`.
pub fn exp_weighted_virial(
    ham: &Hamiltonian,
    field: Option<&FieldSpec>,
    psi: &GridState,
    energy: f64,
    w: &WeightFunction,
) -> Result<WeightedVirial> {
    ensure_origin(field, ham.grid())?;
    psi.check_admissible()?;
    let psi_f = weighted_state(psi, w);
    let g = psi.grid;
    let d = g.dim as f64;
    let wt = g.weight();
    let pot = ham.potential();
    let momentum = ham.momentum(&psi_f);
    let kinetic: f64 = momentum
        .iter()
        .map(|p| par::sum_range(p.len(), |i| p[i].norm_sqr()))
        .sum::<f64>()
        * wt;
    let boost = expectation(&psi_f, |x| energy + w.grad_f_sqr(x))?;
    let magnetic = btilde_term(field, &psi_f, &momentum)?;
    let (v1_term, xv2) = match pot.split() {
        Some((v1, v2)) => {
            let im = -kato_im(v1, &psi_f, &momentum)?;
            let dv1 = expectation(&psi_f, |x| d * v1(x))?;
            let v2 = v2.clone();
            let xv2 = expectation(&psi_f, |x| {
                fields::radial_difference(&v2, x).unwrap_or(f64::NAN)
            })?;
            (2.0 * im + dv1, xv2)
        }
        None => (
            0.0,
            expectation(&psi_f, |x| pot.virial_at(x).unwrap_or(f64::NAN))?,
        ),
    };
    let v = expectation(&psi_f, |x| pot.value(x))?;
    let rhs1 = boost + 2.0 * magnetic + v1_term + kinetic - v - xv2;

    let dpsi = generator(&psi_f);
    let dilation = par::sum_range(g.len(), |i| w.g(&g.point(i)) * dpsi[i].norm_sqr()) * wt;
    let radial = expectation(&psi_f, |x| w.x_grad_sq_g(x) - w.x_grad_grad_f_sqr(x))?;
    let rhs2 = -4.0 * dilation + radial;
    Ok(WeightedVirial {
        rhs1,
        rhs2,
        norm_sqr: psi_f.norm_sqr(),
    })
}

/// `q(ψ_F, ψ_F) - ⟨ψ_F, (E + |∇F|²) ψ_F⟩`.
pub fn energy_boost_residual(
    ham: &Hamiltonian,
    psi: &GridState,
    energy: f64,
    w: &WeightFunction,
) -> Result<f64> {
    psi.check_admissible()?;
    let psi_f = weighted_state(psi, w);
    let q = ham.form(&psi_f, &psi_f).re;
    Ok(q - expectation(&psi_f, |x| energy + w.grad_f_sqr(x))?)
}

/// `|Re q(ξ²φ, φ) - q(ξφ, ξφ) + ⟨φ, |∇ξ|² φ⟩|`.
pub fn ims_check(
    ham: &Hamiltonian,
    xi: &ScalarFn,
    grad_xi: &VectorFn,
    phi: &GridState,
) -> Result<f64> {
    phi.check_admissible()?;
    let xi_phi = phi.multiply(|x| xi(x));
    let xi2_phi = phi.multiply(|x| xi(x).powi(2));
    let localization = expectation(phi, |x| {
        let g = grad_xi(x);
        geometry::dot(&g, &g)
    })?;
    let lhs = ham.form(&xi2_phi, phi).re;
    let split = ham.form(&xi_phi, &xi_phi).re;
    Ok((lhs - split + localization).abs())
}

/// Least-squares slope of `log|e|` against `log x`.
pub fn log_slope(xs: &[f64], errors: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(errors)
        .map(|(x, e)| (x.ln(), e.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

/// Commutator quotients over a halving `t` sequence with Richardson
/// extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientSweep {
    pub t: Vec<f64>,
    pub quotient: Vec<f64>,
    pub rhs: f64,
    /// `|quotient - rhs|`
    pub gap: Vec<f64>,
    /// slope of `log gap` against `log t`
    pub gap_slope: f64,
    /// order from successive differences of the quotient
    pub self_order: f64,
    /// `(4 Q(t/2) - Q(t)) / 3` on the last two steps
    pub extrapolated: f64,
    pub relative_residual: f64,
}

pub fn quotient_sweep(
    ham: &Hamiltonian,
    gauge: Option<&GaugePotential>,
    field: Option<&FieldSpec>,
    phi: &GridState,
    t_list: &[f64],
) -> Result<QuotientSweep> {
    if t_list.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two dilation steps".into(),
        ));
    }
    let rhs = virial_rhs(ham, gauge, field, phi)?;
    let quotient = t_list
        .iter()
        .map(|&t| commutator_quotient(ham, phi, t))
        .collect::<Result<Vec<_>>>()?;
    let gap: Vec<f64> = quotient.iter().map(|q| (q - rhs).abs()).collect();
    let gap_slope = log_slope(t_list, &gap);
    let n = quotient.len();
    let self_order = if n >= 3 {
        let d1 = quotient[n - 3] - quotient[n - 2];
        let d2 = quotient[n - 2] - quotient[n - 1];
        (d1 / d2).abs().ln() / (t_list[n - 3] / t_list[n - 2]).ln()
    } else {
        f64::NAN
    };
    let ratio = t_list[n - 2] / t_list[n - 1];
    let r2 = ratio * ratio;
    let extrapolated = (r2 * quotient[n - 1] - quotient[n - 2]) / (r2 - 1.0);
    let relative_residual = (extrapolated - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    Ok(QuotientSweep {
        t: t_list.to_vec(),
        quotient,
        rhs,
        gap,
        gap_slope,
        self_order,
        extrapolated,
        relative_residual,
    })
}
