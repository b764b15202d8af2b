//! Discrete magnetic Schrödinger operator on a [`Grid`].
//!
//! `Π_j = -i∂_j - A_j` with `∂_j` the central difference, so each `Π_j` is
//! Hermitian for the node inner product and `H = Σ Π_j Π_j + V` satisfies
//! `⟨φ, Hψ⟩ = q(φ, ψ)` exactly.

use num_complex::Complex64;

use super::grid::{Grid, GridState};
use crate::error::{Error, Result};
use crate::fields::{GaugePotential, PotentialSpec};
use crate::par;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    grid: Grid,
    /// `A_j` at the nodes, one vector per axis; empty without a gauge
    a: Vec<Vec<f64>>,
    v: Vec<f64>,
    potential: PotentialSpec,
}

impl Hamiltonian {
    pub fn new(
        grid: Grid,
        gauge: Option<&GaugePotential>,
        potential: &PotentialSpec,
    ) -> Result<Self> {
        if potential.dim() != grid.dim {
            return Err(Error::DimensionMismatch {
                expected: grid.dim,
                got: potential.dim(),
            });
        }
        let points = grid.points();
        let v = par::map_collect(&points, |x| potential.value(x));
        if let Some(k) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("potential at {:?}", points[k]),
            });
        }
        let a = match gauge {
            None => Vec::new(),
            Some(g) => {
                if g.dim() != grid.dim {
                    return Err(Error::DimensionMismatch {
                        expected: grid.dim,
                        got: g.dim(),
                    });
                }
                let values: Vec<_> = par::map_collect(&points, |x| g.eval(x))
                    .into_iter()
                    .collect::<Result<_>>()?;
                (0..grid.dim)
                    .map(|j| values.iter().map(|p| p[j]).collect())
                    .collect()
            }
        };
        Ok(Self {
            grid,
            a,
            v,
            potential: potential.clone(),
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn has_gauge(&self) -> bool {
        !self.a.is_empty()
    }

    pub fn potential_values(&self) -> &[f64] {
        &self.v
    }

    /// `Π_j u` for a raw node vector.
    fn momentum_axis(&self, u: &[Complex64], axis: usize) -> Vec<Complex64> {
        let g = self.grid;
        let zero = Complex64::new(0.0, 0.0);
        let inv = 0.5 / g.h;
        par::map_range(g.len(), |i| {
            let up = g.neighbour(i, axis, 1).map_or(zero, |k| u[k]);
            let down = g.neighbour(i, axis, -1).map_or(zero, |k| u[k]);
            let mut p = -I * (up - down) * inv;
            if let Some(a) = self.a.get(axis) {
                p -= u[i] * a[i];
            }
            p
        })
    }

    /// Components of `(P - A)φ`.
    pub fn momentum(&self, phi: &GridState) -> Vec<Vec<Complex64>> {
        (0..self.grid.dim)
            .map(|j| self.momentum_axis(&phi.values, j))
            .collect()
    }

    /// Sesquilinear form `q(φ, ψ) = ⟨Πφ, Πψ⟩ + ⟨φ, Vψ⟩`.
    pub fn form(&self, phi: &GridState, psi: &GridState) -> Complex64 {
        let w = self.grid.weight();
        let pp = self.momentum(phi);
        let pq = if std::ptr::eq(phi, psi) {
            pp.clone()
        } else {
            self.momentum(psi)
        };
        let kinetic: Complex64 = pp
            .iter()
            .zip(&pq)
            .map(|(a, b)| par::sum_range(a.len(), |i| a[i].conj() * b[i]))
            .sum();
        let potential = par::sum_range(self.v.len(), |i| {
            phi.values[i].conj() * psi.values[i] * self.v[i]
        });
        (kinetic + potential) * w
    }

    fn apply_raw(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = u.iter().zip(&self.v).map(|(x, v)| x * v).collect();
        for axis in 0..self.grid.dim {
            let p = self.momentum_axis(u, axis);
            let pp = self.momentum_axis(&p, axis);
            for (o, x) in out.iter_mut().zip(pp) {
                *o += x;
            }
        }
        out
    }

    pub fn apply(&self, phi: &GridState) -> GridState {
        phi.with_values(self.apply_raw(&phi.values))
    }

    /// `‖(H - E)ψ‖ / ‖ψ‖`.
    pub fn residual(&self, psi: &GridState, energy: f64) -> f64 {
        let hpsi = self.apply(psi);
        let diff = hpsi.with_values(
            hpsi.values
                .iter()
                .zip(&psi.values)
                .map(|(a, b)| a - b * energy)
                .collect(),
        );
        diff.norm() / psi.norm()
    }

    /// Solves `(H - σ)x = b` by conjugate gradients; `H - σ` must be
    /// positive definite.
    fn solve_shifted(&self, b: &[Complex64], sigma: f64, rel_tol: f64) -> Result<Vec<Complex64>> {
        let n = b.len();
        let dot = |x: &[Complex64], y: &[Complex64]| par::sum_range(n, |i| x[i].conj() * y[i]);
        let b_norm = dot(b, b).re.sqrt();
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        let mut r = b.to_vec();
        let mut p = r.clone();
        let mut rs = b_norm * b_norm;
        let max_iter = 20 * self.grid.n.max(50);
        for _ in 0..max_iter {
            if rs.sqrt() <= rel_tol * b_norm {
                return Ok(x);
            }
            let mut ap = self.apply_raw(&p);
            for (a, q) in ap.iter_mut().zip(&p) {
                *a -= q * sigma;
            }
            let curvature = dot(&p, &ap).re;
            if !(curvature > 0.0) {
                return Err(Error::Numerical(format!(
                    "shift {sigma} is not below the spectrum"
                )));
            }
            let alpha = rs / curvature;
            for i in 0..n {
                x[i] += p[i] * alpha;
                r[i] -= ap[i] * alpha;
            }
            let rs_new = dot(&r, &r).re;
            let beta = rs_new / rs;
            rs = rs_new;
            for i in 0..n {
                p[i] = r[i] + p[i] * beta;
            }
        }
        Err(Error::Numerical(format!(
            "conjugate gradients did not reach {rel_tol:e} in {max_iter} steps"
        )))
    }

    /// Lowest eigenpair by shift-invert iteration from `start`.
    ///
    /// The shift starts at `min V - 1` and moves to `ρ - 0.1` once the
    /// residual drops below `0.05`. At most 200 outer steps.
    pub fn ground_state(&self, start: &GridState, tol: f64) -> Result<Eigenpair> {
        let floor = self.v.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
        let mut psi = start.normalized();
        let mut sigma = floor;
        let mut energy = self.form(&psi, &psi).re;
        let mut residual = self.residual(&psi, energy);
        for iteration in 1..=200 {
            let y = self.solve_shifted(&psi.values, sigma, 1e-13)?;
            psi = psi.with_values(y).normalized();
            energy = self.form(&psi, &psi).re / psi.norm_sqr();
            residual = self.residual(&psi, energy);
            if residual < tol {
                return Ok(Eigenpair {
                    state: psi,
                    energy,
                    residual,
                    iterations: iteration,
                });
            }
            if residual < 0.05 {
                sigma = energy - 0.1;
            }
        }
        Err(Error::Numerical(format!(
            "inverse iteration stalled at residual {residual:.3e}"
        )))
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub state: GridState,
    pub energy: f64,
    /// `‖(H - E)ψ‖ / ‖ψ‖`
    pub residual: f64,
    pub iterations: usize,
}
