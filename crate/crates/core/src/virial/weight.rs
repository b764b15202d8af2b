//! The weight family `F(x) = (μ/ε)(1 - e^{-ε⟨x⟩_λ})`, `⟨x⟩_λ = √(λ + |x|²)`.
//!
//! `∇F = g x` with `g = μ e^{-ε s}/s`, `s = ⟨x⟩_λ`. Radial derivatives are
//! closed form: with `u = x·∇s = r²/s = s - λ/s`,
//! `x·∇f(s) = u f'(s)` and `(x·∇)² f = u (u' f' + u f'')`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFunction {
    pub mu: f64,
    pub eps: f64,
    pub lam: f64,
}

impl WeightFunction {
    pub fn new(mu: f64, eps: f64, lam: f64) -> Result<Self> {
        if !(mu >= 0.0 && eps > 0.0 && lam > 0.0) {
            return Err(Error::InvalidInput(format!(
                "weight needs μ ≥ 0, ε > 0, λ > 0; got {mu}, {eps}, {lam}"
            )));
        }
        Ok(Self { mu, eps, lam })
    }

    fn s(&self, x: &Point) -> f64 {
        (self.lam + geometry::dot(x, x)).sqrt()
    }

    pub fn f(&self, x: &Point) -> f64 {
        self.mu / self.eps * (1.0 - (-self.eps * self.s(x)).exp())
    }

    pub fn g(&self, x: &Point) -> f64 {
        let s = self.s(x);
        self.mu * (-self.eps * s).exp() / s
    }

    pub fn grad_f(&self, x: &Point) -> Point {
        geometry::scale(x, self.g(x))
    }

    /// `|∇F|² = g² r²`
    pub fn grad_f_sqr(&self, x: &Point) -> f64 {
        let g = self.g(x);
        g * g * geometry::dot(x, x)
    }

    fn derivatives(&self, x: &Point) -> (f64, f64, f64, f64, f64) {
        let s = self.s(x);
        let g = self.g(x);
        let k = self.eps + 1.0 / s;
        let g_s = -g * k;
        let g_ss = g * k * k + g / (s * s);
        let u = s - self.lam / s;
        (s, g, g_s, g_ss, u)
    }

    /// `x·∇g`
    pub fn x_grad_g(&self, x: &Point) -> f64 {
        let (_, _, g_s, _, u) = self.derivatives(x);
        u * g_s
    }

    /// `(x·∇)² g`
    pub fn x_grad_sq_g(&self, x: &Point) -> f64 {
        let (s, _, g_s, g_ss, u) = self.derivatives(x);
        let u_s = 1.0 + self.lam / (s * s);
        u * (u_s * g_s + u * g_ss)
    }

    /// `x·∇|∇F|²`
    pub fn x_grad_grad_f_sqr(&self, x: &Point) -> f64 {
        let (s, g, g_s, _, u) = self.derivatives(x);
        u * (2.0 * g * g_s * (s * s - self.lam) + 2.0 * s * g * g)
    }
}
