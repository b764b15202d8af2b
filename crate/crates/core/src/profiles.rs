//! Named radial profiles for magnetic fields and potentials. These are the
//! building blocks the scenario files refer to, and they double as the
//! analytic test inputs throughout the crate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fields::{FieldSpec, PotentialSpec, RadialFn};

/// Wigner–von Neumann potential, the s-wave potential with an embedded
/// eigenvalue at `E = 1`.
pub fn wigner_von_neumann(r: f64) -> f64 {
    let (s, c) = r.sin_cos();
    let g = 2.0 * r - (2.0 * r).sin();
    let s3 = s * s * s;
    let bracket = g * g * g * c - 3.0 * g * g * s3 + g * c + s3;
    let denom = 1.0 + g * g;
    -32.0 * s * bracket / (denom * denom)
}

/// Radial magnetic field profiles `b(r)` in two dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldProfile {
    /// `b(r) = b0`
    Constant { b0: f64 },
    /// `b(r) = b0 r^{-alpha}`
    InversePower { b0: f64, alpha: f64 },
    /// `b(r) = b0 (1 + r)^{-alpha}`, regular at the origin
    Decaying { b0: f64, alpha: f64 },
    /// `b(r) = amplitude e^{-(r/width)^2}`
    Gaussian { amplitude: f64, width: f64 },
    /// `b(r) = amplitude (1 - (r/radius)^2)^2` inside `radius`, zero outside
    CompactBump { amplitude: f64, radius: f64 },
}

impl FieldProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Self::Constant { b0 } => b0,
            Self::InversePower { b0, alpha } => b0 * r.powf(-alpha),
            Self::Decaying { b0, alpha } => b0 * (1.0 + r).powf(-alpha),
            Self::Gaussian { amplitude, width } => amplitude * (-(r / width).powi(2)).exp(),
            Self::CompactBump { amplitude, radius } => {
                if r < radius {
                    let u = 1.0 - (r / radius).powi(2);
                    amplitude * u * u
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed form of `h(r) = r^{-1} ∫_0^r b(s) s ds` where one exists.
    pub fn h_closed_form(&self, r: f64) -> Option<f64> {
        match *self {
            Self::Constant { b0 } => Some(0.5 * b0 * r),
            Self::InversePower { b0, alpha } if alpha < 2.0 => {
                Some(b0 * r.powf(1.0 - alpha) / (2.0 - alpha))
            }
            Self::Gaussian { amplitude, width } => {
                let w2 = width * width;
                Some(amplitude * w2 * (1.0 - (-(r * r) / w2).exp()) / (2.0 * r))
            }
            Self::CompactBump { amplitude, radius } => {
                let rr = r.min(radius);
                let x = rr / radius;
                // ∫_0^rr (1 - s²/R²)² s ds
                let integral = radius * radius * (x * x / 2.0 - x.powi(4) / 2.0 + x.powi(6) / 6.0);
                Some(amplitude * integral / r)
            }
            _ => None,
        }
    }

    pub fn radial_fn(&self) -> RadialFn {
        let p = self.clone();
        Arc::new(move |r| p.eval(r))
    }

    pub fn field(&self) -> FieldSpec {
        FieldSpec::radial(self.radial_fn()).with_label(self.label())
    }

    pub fn label(&self) -> String {
        match self {
            Self::Constant { b0 } => format!("constant(b0={b0})"),
            Self::InversePower { b0, alpha } => format!("inverse_power(b0={b0}, alpha={alpha})"),
            Self::Decaying { b0, alpha } => format!("decaying(b0={b0}, alpha={alpha})"),
            Self::Gaussian { amplitude, width } => {
                format!("gaussian(amplitude={amplitude}, width={width})")
            }
            Self::CompactBump { amplitude, radius } => {
                format!("compact_bump(amplitude={amplitude}, radius={radius})")
            }
        }
    }
}

/// Radial potential profiles `V(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialProfile {
    Zero,
    Constant {
        c: f64,
    },
    /// `amplitude e^{-(r/width)^2}`
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    /// `strength / r`
    Coulomb {
        strength: f64,
    },
    /// `c r^{-alpha}`
    InversePower {
        c: f64,
        alpha: f64,
    },
    /// `k r^2`
    Harmonic {
        k: f64,
    },
    /// `amplitude sin(k r) / r`
    SinOverR {
        amplitude: f64,
        k: f64,
    },
    /// `omega0 sin^2(r)`
    SinSquared {
        omega0: f64,
    },
    WignerVonNeumann,
}

impl PotentialProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Constant { c } => c,
            Self::Gaussian { amplitude, width } => amplitude * (-(r / width).powi(2)).exp(),
            Self::Coulomb { strength } => strength / r,
            Self::InversePower { c, alpha } => c * r.powf(-alpha),
            Self::Harmonic { k } => k * r * r,
            Self::SinOverR { amplitude, k } => {
                if r == 0.0 {
                    amplitude * k
                } else {
                    amplitude * (k * r).sin() / r
                }
            }
            Self::SinSquared { omega0 } => omega0 * r.sin().powi(2),
            Self::WignerVonNeumann => wigner_von_neumann(r),
        }
    }

    /// `r V'(r)` in closed form; `None` defers to numerical differentiation.
    pub fn virial(&self, r: f64) -> Option<f64> {
        match *self {
            Self::Zero | Self::Constant { .. } => Some(0.0),
            Self::Gaussian { width, .. } => Some(-2.0 * (r / width).powi(2) * self.eval(r)),
            Self::Coulomb { .. } => Some(-self.eval(r)),
            Self::InversePower { alpha, .. } => Some(-alpha * self.eval(r)),
            Self::Harmonic { .. } => Some(2.0 * self.eval(r)),
            Self::SinOverR { amplitude, k } => {
                if r == 0.0 {
                    Some(0.0)
                } else {
                    Some(amplitude * (k * (k * r).cos() - (k * r).sin() / r))
                }
            }
            Self::SinSquared { omega0 } => Some(omega0 * r * (2.0 * r).sin()),
            Self::WignerVonNeumann => None,
        }
    }

    pub fn radial_fn(&self) -> RadialFn {
        let p = self.clone();
        Arc::new(move |r| p.eval(r))
    }

    /// Radially symmetric potential in `dim` dimensions, carrying the
    /// closed-form virial when available.
    pub fn potential(&self, dim: usize) -> PotentialSpec {
        let v = self.clone();
        let mut spec = PotentialSpec::radial(dim, Arc::new(move |r| v.eval(r)));
        if self.virial(1.0).is_some() {
            let w = self.clone();
            spec = spec.with_radial_virial(Arc::new(move |r| w.virial(r).unwrap_or(f64::NAN)));
        }
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn wvn_special_values() {
        assert_eq!(wigner_von_neumann(0.0), 0.0);
        assert!(wigner_von_neumann(PI).abs() < 1e-13);
        let g = PI; // g(π/2) = π - sin π
        let expected =
            -32.0 * (g * g * g * 0.0 - 3.0 * g * g + g * 0.0 + 1.0) / (1.0 + g * g).powi(2);
        assert_relative_eq!(wigner_von_neumann(PI / 2.0), expected, epsilon = 1e-12);
        assert_relative_eq!(
            expected,
            -32.0 * (1.0 - 3.0 * PI * PI) / (1.0 + PI * PI).powi(2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn closed_form_virials_match_differences() {
        let profiles = [
            PotentialProfile::Gaussian {
                amplitude: 1.3,
                width: 0.7,
            },
            PotentialProfile::Coulomb { strength: -2.0 },
            PotentialProfile::InversePower { c: 0.5, alpha: 1.5 },
            PotentialProfile::Harmonic { k: 0.25 },
            PotentialProfile::SinOverR {
                amplitude: -8.0,
                k: 2.0,
            },
            PotentialProfile::SinSquared { omega0: 3.0 },
        ];
        for p in &profiles {
            for &r in &[0.3, 1.1, 4.0] {
                let h = 1e-6;
                let fd = r * (p.eval(r + h) - p.eval(r - h)) / (2.0 * h);
                assert_relative_eq!(
                    p.virial(r).unwrap(),
                    fd,
                    epsilon = 1e-6,
                    max_relative = 1e-6
                );
            }
        }
    }

    #[test]
    fn h_closed_forms_match_quadrature() {
        let gl = crate::quadrature::GaussLegendre::new(20);
        let profiles = [
            FieldProfile::Constant { b0: 0.7 },
            FieldProfile::InversePower {
                b0: 1.0,
                alpha: 1.0,
            },
            FieldProfile::Gaussian {
                amplitude: 2.0,
                width: 1.5,
            },
            FieldProfile::CompactBump {
                amplitude: 1.0,
                radius: 2.0,
            },
        ];
        for p in &profiles {
            for &r in &[0.5, 1.7, 3.0] {
                let brk: Vec<f64> = if r > 2.0 {
                    vec![0.0, 2.0, r]
                } else {
                    vec![0.0, r]
                };
                let q: f64 = brk
                    .windows(2)
                    .map(|w| gl.integrate(|s| p.eval(s) * s, w[0], w[1]))
                    .sum::<f64>()
                    / r;
                assert_relative_eq!(p.h_closed_form(r).unwrap(), q, epsilon = 1e-12);
            }
        }
    }
}
