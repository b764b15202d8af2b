//! Small fixed-size vector helpers. Points live in `[f64; 3]`; planar
//! problems leave the third component at zero.

pub type Point = [f64; 3];

pub const ORIGIN: Point = [0.0; 3];

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn is_finite(a: &Point) -> bool {
    a.iter().all(|c| c.is_finite())
}

/// Antisymmetric 3x3 matrix acting on a point.
pub type Matrix3 = [[f64; 3]; 3];

#[inline]
pub fn mat_vec(m: &Matrix3, x: &Point) -> Point {
    [dot(&m[0], x), dot(&m[1], x), dot(&m[2], x)]
}

/// Matrix `M` with `M x = b ∧ x`.
pub fn cross_matrix(b: &Point) -> Matrix3 {
    [[0.0, -b[2], b[1]], [b[2], 0.0, -b[0]], [-b[1], b[0], 0.0]]
}

/// Inverse of [`cross_matrix`]: reads the axial vector back.
pub fn axial_vector(m: &Matrix3) -> Point {
    [m[2][1], m[0][2], m[1][0]]
}

/// Deterministic direction set on the unit circle (`dim == 2`) or sphere
/// (`dim == 3`), rotated by `offset` in [0, 1).
pub fn directions(dim: usize, count: usize, offset: f64) -> Vec<Point> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    match dim {
        2 => (0..count)
            .map(|j| {
                let theta = std::f64::consts::TAU * (j as f64 + offset) / count as f64;
                [theta.cos(), theta.sin(), 0.0]
            })
            .collect(),
        _ => (0..count)
            .map(|j| {
                // Fibonacci lattice
                let z = 1.0 - 2.0 * (j as f64 + 0.5) / count as f64;
                let rho = (1.0 - z * z).max(0.0).sqrt();
                let phi = std::f64::consts::TAU * ((j as f64 * golden + offset).fract());
                [rho * phi.cos(), rho * phi.sin(), z]
            })
            .collect(),
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// `i`-th point of the Halton sequence in the box `[lo, hi]` (first `dim`
/// coordinates populated).
pub fn halton_point(i: usize, dim: usize, lo: &Point, hi: &Point) -> Point {
    const BASES: [usize; 3] = [2, 3, 5];
    let mut p = ORIGIN;
    for k in 0..dim.min(3) {
        p[k] = lo[k] + (hi[k] - lo[k]) * radical_inverse(i + 1, BASES[k]);
    }
    p
}
