//! Uniform grids and complex grid functions.
//!
//! Grids cover `[-L, L]ᵈ` (d = 1, 2) including the boundary nodes. Outside
//! the nodes every state is zero (Dirichlet padding).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dim: usize,
    /// nodes per axis
    pub n: usize,
    pub h: f64,
    /// coordinate of node 0 on every axis
    pub origin: f64,
}

impl Grid {
    pub fn square(half_width: f64, h: f64) -> Result<Self> {
        if !(half_width > 0.0 && h > 0.0 && h < half_width) {
            return Err(Error::InvalidInput(format!(
                "bad grid L = {half_width}, h = {h}"
            )));
        }
        let n = (2.0 * half_width / h).round() as usize + 1;
        Ok(Self {
            dim: 2,
            n,
            h,
            origin: -half_width,
        })
    }

    pub fn line(half_width: f64, h: f64) -> Result<Self> {
        let square = Self::square(half_width, h)?;
        Ok(Self { dim: 1, ..square })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Node weight `hᵈ`.
    pub fn weight(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn half_width(&self) -> f64 {
        -self.origin
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.h
    }

    pub fn point(&self, idx: usize) -> Point {
        match self.dim {
            1 => [self.coord(idx), 0.0, 0.0],
            _ => [self.coord(idx / self.n), self.coord(idx % self.n), 0.0],
        }
    }

    /// Per-axis indices of a flat index.
    pub fn split(&self, idx: usize) -> [usize; 2] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.n, idx % self.n],
        }
    }

    /// Flat index of the neighbour `offset` steps along `axis`, if on the grid.
    pub fn neighbour(&self, idx: usize, axis: usize, offset: isize) -> Option<usize> {
        let ij = self.split(idx);
        let k = ij[axis] as isize + offset;
        if k < 0 || k >= self.n as isize {
            return None;
        }
        Some(match (self.dim, axis) {
            (1, _) => k as usize,
            (_, 0) => k as usize * self.n + ij[1],
            _ => ij[0] * self.n + k as usize,
        })
    }

    /// Nodes on the outer edge.
    pub fn is_boundary(&self, idx: usize) -> bool {
        let ij = self.split(idx);
        let edge = |k: usize| k == 0 || k == self.n - 1;
        match self.dim {
            1 => edge(ij[0]),
            _ => edge(ij[0]) || edge(ij[1]),
        }
    }

    /// Visits the on-grid nodes of the cubic interpolation stencil at `x`
    /// with their weights.
    pub fn stencil(&self, x: &Point, mut visit: impl FnMut(usize, f64)) {
        let mut axes = [[(usize::MAX, 0.0f64); 4]; 2];
        for (axis, slot) in axes.iter_mut().enumerate().take(self.dim) {
            let s = (x[axis] - self.origin) / self.h;
            let base = s.floor();
            let f = s - base;
            // Lagrange weights on nodes base-1 .. base+2
            let w = [
                -f * (f - 1.0) * (f - 2.0) / 6.0,
                (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
                -(f + 1.0) * f * (f - 2.0) / 2.0,
                (f + 1.0) * f * (f - 1.0) / 6.0,
            ];
            for k in 0..4 {
                let node = base as isize - 1 + k as isize;
                if node >= 0 && (node as usize) < self.n {
                    slot[k] = (node as usize, w[k]);
                }
            }
        }
        for &(i, wi) in &axes[0] {
            if i == usize::MAX {
                continue;
            }
            if self.dim == 1 {
                visit(i, wi);
                continue;
            }
            for &(j, wj) in &axes[1] {
                if j != usize::MAX {
                    visit(i * self.n + j, wi * wj);
                }
            }
        }
    }

    pub fn points(&self) -> Vec<Point> {
        par::map_range(self.len(), |i| self.point(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl GridState {
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(&Point) -> Complex64 + Sync + Send,
    {
        let values = par::map_range(grid.len(), |i| f(&grid.point(i)));
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Self {
        Self {
            grid: self.grid,
            values,
        }
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let w = self.grid.weight();
        par::sum_range(self.values.len(), |i| {
            self.values[i].conj() * other.values[i]
        }) * w
    }

    pub fn norm_sqr(&self) -> f64 {
        let w = self.grid.weight();
        par::sum_range(self.values.len(), |i| self.values[i].norm_sqr()) * w
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Pointwise product with a real function of position.
    pub fn multiply<F>(&self, f: F) -> Self
    where
        F: Fn(&Point) -> f64 + Sync + Send,
    {
        let g = self.grid;
        self.with_values(par::map_range(g.len(), |i| self.values[i] * f(&g.point(i))))
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.with_values(self.values.iter().map(|v| v * s).collect())
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.scaled(1.0 / n)
        } else {
            self.clone()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.norm()))
    }

    /// Admissible test states are finite and negligible (`< 1e-8` of the
    /// peak) on the outer boundary.
    pub fn check_admissible(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::StateRejected("state has non-finite values".into()));
        }
        let peak = self.peak();
        let edge = (0..self.grid.len())
            .filter(|&i| self.grid.is_boundary(i))
            .fold(0.0f64, |a, i| a.max(self.values[i].norm()));
        if edge > 1e-8 * peak {
            return Err(Error::StateRejected(format!(
                "boundary values {edge:.3e} exceed 1e-8 of the peak {peak:.3e}"
            )));
        }
        Ok(())
    }

    /// Central difference along `axis`, zero outside the grid.
    pub fn partial(&self, axis: usize) -> Vec<Complex64> {
        let g = self.grid;
        let zero = Complex64::new(0.0, 0.0);
        let inv = 0.5 / g.h;
        par::map_range(g.len(), |i| {
            let up = g.neighbour(i, axis, 1).map_or(zero, |k| self.values[k]);
            let down = g.neighbour(i, axis, -1).map_or(zero, |k| self.values[k]);
            (up - down) * inv
        })
    }

    /// Value at an arbitrary point by tensor-product cubic Lagrange
    /// interpolation; zero outside the grid.
    pub fn interpolate(&self, x: &Point) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        self.grid.stencil(x, |k, w| acc += self.values[k] * w);
        acc
    }

    /// Radius beyond which the state is below `1e-8` of its peak.
    pub fn support_radius(&self) -> f64 {
        let peak = self.peak();
        let g = self.grid;
        (0..g.len())
            .filter(|&i| self.values[i].norm() > 1e-8 * peak)
            .map(|i| crate::geometry::norm(&g.point(i)))
            .fold(0.0, f64::max)
    }
}

/// Dilation `(U_t φ)(x) = e^{td/2} φ(eᵗx)` by cubic interpolation.
///
/// Requires `|t| ≤ 0.5` and `e^{|t|}·support ≤ 0.9 L` so the dilated state
/// stays on the grid.
pub fn dilation_apply(phi: &GridState, t: f64) -> Result<GridState> {
    check_dilation(phi, t)?;
    if t == 0.0 {
        return Ok(phi.clone());
    }
    let g = phi.grid;
    let scale = t.exp();
    let amplitude = (0.5 * t * g.dim as f64).exp();
    let values = par::map_range(g.len(), |i| {
        let x = g.point(i);
        phi.interpolate(&[scale * x[0], scale * x[1], 0.0]) * amplitude
    });
    Ok(phi.with_values(values))
}

fn check_dilation(phi: &GridState, t: f64) -> Result<()> {
    if !(t.abs() <= 0.5) {
        return Err(Error::InvalidInput(format!(
            "dilation parameter must satisfy |t| ≤ 0.5, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(());
    }
    let g = phi.grid;
    let reach = t.abs().exp() * phi.support_radius();
    if reach > 0.9 * g.half_width() {
        return Err(Error::StateRejected(format!(
            "dilated support {reach:.3} exceeds 0.9 L = {:.3}",
            0.9 * g.half_width()
        )));
    }
    Ok(())
}

/// Exact adjoint of [`dilation_apply`] for the node inner product, the
/// discrete stand-in for `U_{-t} = U_t*`.
pub fn dilation_adjoint(phi: &GridState, t: f64) -> Result<GridState> {
    check_dilation(phi, t)?;
    if t == 0.0 {
        return Ok(phi.clone());
    }
    let g = phi.grid;
    let scale = t.exp();
    let amplitude = (0.5 * t * g.dim as f64).exp();
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    for (i, v) in phi.values.iter().enumerate() {
        if v.norm_sqr() == 0.0 {
            continue;
        }
        let x = g.point(i);
        let y = [scale * x[0], scale * x[1], 0.0];
        g.stencil(&y, |k, w| out[k] += v * (w * amplitude));
    }
    Ok(phi.with_values(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(grid: Grid, sigma: f64) -> GridState {
        GridState::from_fn(grid, |x| {
            Complex64::new(
                (-(x[0] * x[0] + x[1] * x[1]) / (2.0 * sigma * sigma)).exp(),
                0.0,
            )
        })
    }

    #[test]
    fn grid_shapes() {
        let g = Grid::square(2.0, 0.5).unwrap();
        assert_eq!(g.n, 9);
        assert_eq!(g.point(0), [-2.0, -2.0, 0.0]);
        assert_eq!(g.point(g.len() - 1), [2.0, 2.0, 0.0]);
        assert_eq!(g.neighbour(0, 0, -1), None);
        assert_eq!(g.neighbour(0, 1, 1), Some(1));
        assert_eq!(g.neighbour(0, 0, 1), Some(9));
        let l = Grid::line(1.0, 0.1).unwrap();
        assert_eq!(l.n, 21);
        assert_eq!(l.len(), 21);
        assert!(l.is_boundary(0) && l.is_boundary(20) && !l.is_boundary(10));
        assert!(Grid::square(1.0, 2.0).is_err());
    }

    #[test]
    fn gaussian_norm_matches_continuum() {
        let g = Grid::square(8.0, 0.1).unwrap();
        let phi = gaussian(g, 1.0);
        // ∫ e^{-r²} = π
        assert_relative_eq!(phi.norm_sqr(), std::f64::consts::PI, epsilon = 1e-12);
        phi.check_admissible().unwrap();
        let wide = gaussian(g, 3.0);
        assert!(matches!(
            wide.check_admissible(),
            Err(Error::StateRejected(_))
        ));
    }

    #[test]
    fn interpolation_is_exact_on_cubics() {
        let g = Grid::square(3.0, 0.25).unwrap();
        let cubic = |x: &Point| {
            Complex64::new(x[0].powi(3) - 2.0 * x[0] * x[1] + x[1] * x[1], x[1].powi(3))
        };
        let s = GridState::from_fn(g, cubic);
        for p in [[0.13, -0.77, 0.0], [1.01, 1.99, 0.0], [-2.3, 0.4, 0.0]] {
            let v = s.interpolate(&p);
            assert!((v - cubic(&p)).norm() < 1e-12);
        }
    }

    #[test]
    fn dilation_examples() {
        let g = Grid::square(10.0, 0.05).unwrap();
        let phi = gaussian(g, 1.0);
        assert_eq!(dilation_apply(&phi, 0.0).unwrap(), phi);
        for t in [0.1, -0.25] {
            let u = dilation_apply(&phi, t).unwrap();
            assert_relative_eq!(u.norm(), phi.norm(), max_relative = 1e-6);
            let sigma = (-t).exp();
            let exact = gaussian(g, sigma).scaled((0.5 * t * 2.0).exp());
            let diff = u.with_values(
                u.values
                    .iter()
                    .zip(&exact.values)
                    .map(|(a, b)| a - b)
                    .collect(),
            );
            assert!(diff.norm() < 1e-6 * phi.norm());
        }
        assert!(dilation_apply(&phi, 0.6).is_err());
        let wide = gaussian(g, 1.6);
        assert!(matches!(
            dilation_apply(&wide, -0.5),
            Err(Error::StateRejected(_))
        ));
    }

    #[test]
    fn adjoint_pairs_with_dilation() {
        let g = Grid::square(10.0, 0.1).unwrap();
        let phi = GridState::from_fn(g, |x| {
            Complex64::new(
                (-(x[0] * x[0] + x[1] * x[1])).exp(),
                x[0] * (-(x[0] * x[0] + x[1] * x[1])).exp(),
            )
        });
        let psi = GridState::from_fn(g, |x| {
            Complex64::new(x[1], 0.5) * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp()
        });
        let t = 0.2;
        let lhs = psi.inner(&dilation_apply(&phi, t).unwrap());
        let rhs = dilation_adjoint(&psi, t).unwrap().inner(&phi);
        assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
        // weakly the adjoint is U_{-t}
        let weak = psi.inner(&dilation_adjoint(&phi, t).unwrap());
        let direct = psi.inner(&dilation_apply(&phi, -t).unwrap());
        assert!(
            (weak - direct).norm() < 1e-5 * direct.norm(),
            "{weak} {direct}"
        );
    }
}
