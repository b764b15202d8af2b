//! Half-line channel operators `-u'' + W(r) u` for radially symmetric
//! planar problems, the s-wave Wigner–von Neumann operator and the
//! Aharonov–Bohm flux.
//!
//! Planar channels use the reduction `u = √r ψ` on angular momentum `m`,
//! which contributes `(m² - ¼)/r²`.

use std::fmt;
use std::sync::Arc;

use crate::fields::RadialFn;
use crate::profiles;
use crate::quadrature::{self, GaussLegendre, RadialRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    /// Planar channel with `(m² - ¼)/r² + h² - 2mh/r`.
    Planar,
    /// Plain half-line operator, no centrifugal or magnetic term.
    Bare,
}

#[derive(Clone)]
pub struct RadialChannel {
    pub m: f64,
    pub label: String,
    reduction: Reduction,
    h: RadialFn,
    potential: Option<RadialFn>,
}

impl fmt::Debug for RadialChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialChannel")
            .field("m", &self.m)
            .field("label", &self.label)
            .field("reduction", &self.reduction)
            .field("potential", &self.potential.is_some())
            .finish()
    }
}

impl RadialChannel {
    /// Planar channel from a magnetic `h(r)` and an optional radial potential.
    pub fn planar(
        m: f64,
        h: RadialFn,
        potential: Option<RadialFn>,
        label: impl Into<String>,
    ) -> Self {
        Self {
            m,
            label: label.into(),
            reduction: Reduction::Planar,
            h,
            potential,
        }
    }

    /// `-u'' + W u` with a user-supplied `W`.
    pub fn bare(w: RadialFn, label: impl Into<String>) -> Self {
        Self {
            m: 0.0,
            label: label.into(),
            reduction: Reduction::Bare,
            h: Arc::new(|_| 0.0),
            potential: Some(w),
        }
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction
    }

    pub fn h(&self, r: f64) -> f64 {
        (self.h)(r)
    }

    /// Effective potential `W(r)`.
    pub fn w(&self, r: f64) -> f64 {
        let v = self.potential.as_ref().map_or(0.0, |p| p(r));
        match self.reduction {
            Reduction::Bare => v,
            Reduction::Planar => {
                let m = self.m;
                let h = (self.h)(r);
                (m * m - 0.25) / (r * r) + h * h - 2.0 * m * h / r + v
            }
        }
    }
}

/// `h(r) = r^{-1} ∫_0^r b(s) s ds`, computed as `r ∫_0^1 b(rt) t dt` on
/// dyadic shells toward `t = 0`, each shell adaptive so kinks in `b` are
/// resolved. Returns `+∞` if the integral diverges.
pub fn h_profile(b: &(dyn Fn(f64) -> f64 + Send + Sync), r: f64, quad_nodes: usize) -> f64 {
    assert!(r > 0.0, "h_profile needs r > 0, got {r}");
    let gl = GaussLegendre::new(quad_nodes.max(8));
    h_with_rule(b, r, &gl)
}

fn h_with_rule(b: &(dyn Fn(f64) -> f64 + Send + Sync), r: f64, gl: &GaussLegendre) -> f64 {
    let f = |t: f64| b(r * t) * t;
    let shell = |lo: f64, hi: f64| {
        let coarse = gl.integrate(f, lo, hi);
        match quadrature::adaptive(f, lo, hi, 1e-15 * coarse.abs(), 1e-13, 200) {
            Ok((v, _)) => v,
            Err(_) => f64::NAN,
        }
    };
    r * quadrature::radial_integral_with(shell, 1.0, RadialRule::default())
}

/// Miller–Simon channel `m` of the planar field `b(|x|)`, with `h` by quadrature.
pub fn miller_simon_channel(b: RadialFn, m: i64, quad_nodes: usize) -> RadialChannel {
    let gl = Arc::new(GaussLegendre::new(quad_nodes.max(8)));
    let h: RadialFn = Arc::new(move |r| h_with_rule(b.as_ref(), r, &gl));
    RadialChannel::planar(m as f64, h, None, format!("miller_simon(m={m})"))
}

/// Miller–Simon channel with a known `h(r)`.
pub fn miller_simon_channel_with_h(h: RadialFn, m: i64) -> RadialChannel {
    RadialChannel::planar(m as f64, h, None, format!("miller_simon(m={m})"))
}

/// s-wave half-line operator with the Wigner–von Neumann potential.
pub fn wigner_von_neumann_channel() -> RadialChannel {
    RadialChannel::bare(Arc::new(profiles::wigner_von_neumann), "wigner_von_neumann")
}

/// Channel `m` of the flux `A = B₀(-y, x)/r²`: `h = B₀/r`, so
/// `W = ((m - B₀)² - ¼)/r² + V`.
pub fn aharonov_bohm_channel(b0: f64, m: i64, potential: Option<RadialFn>) -> RadialChannel {
    RadialChannel::planar(
        m as f64,
        Arc::new(move |r| b0 / r),
        potential,
        format!("aharonov_bohm(b0={b0}, m={m})"),
    )
}
