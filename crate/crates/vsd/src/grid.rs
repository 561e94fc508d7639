//! Uniform discretization of the unit square with homogeneous Dirichlet
//! boundary: fields on interior nodes, the 5-point Laplacian, region masks
//! and a matrix-free conjugate-gradient solver for the implicit steps.

use crate::error::{Error, Result};

/// Uniform N x N grid on [0,1]^2; unknowns live on the (N-1)^2 interior nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid2D {
    n_cells: usize,
}

impl Grid2D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 4 {
            return Err(Error::Argument(format!(
                "grid needs at least 4 cells per axis, got {n_cells}"
            )));
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    /// Interior nodes per axis.
    pub fn n_interior(&self) -> usize {
        self.n_cells - 1
    }

    pub fn interior_count(&self) -> usize {
        self.n_interior() * self.n_interior()
    }

    /// Flat index of interior node (ix, iy), 1 <= ix, iy <= N-1.
    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix >= 1 && ix <= self.n_interior());
        debug_assert!(iy >= 1 && iy <= self.n_interior());
        (ix - 1) * self.n_interior() + (iy - 1)
    }

    /// Coordinates of the interior node with flat index `idx`.
    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let m = self.n_interior();
        let ix = idx / m + 1;
        let iy = idx % m + 1;
        (ix as f64 * self.h(), iy as f64 * self.h())
    }
}

/// Scalar field on the interior nodes; zero Dirichlet values are implied.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.interior_count()],
        }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut v = Vec::with_capacity(grid.interior_count());
        for idx in 0..grid.interior_count() {
            let (x, y) = grid.coords(idx);
            v.push(f(x, y));
        }
        Self { grid, values: v }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_same_grid(&self, other: &GridField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Argument(format!(
                "grid mismatch: {} vs {} cells",
                self.grid.n_cells(),
                other.grid.n_cells()
            )));
        }
        Ok(())
    }

    /// Discrete L2(Omega) inner product h^2 * sum u v.
    pub fn inner(&self, other: &GridField) -> Result<f64> {
        self.check_same_grid(other)?;
        let h2 = self.grid.h() * self.grid.h();
        Ok(h2 * dot(&self.values, &other.values))
    }

    pub fn norm2(&self) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        (h2 * dot(&self.values, &self.values)).sqrt()
    }

    pub fn scaled(&self, s: f64) -> GridField {
        GridField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// self += s * other
    pub fn axpy(&mut self, s: f64, other: &GridField) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn has_non_finite(&self) -> bool {
        self.values.iter().any(|v| !v.is_finite())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Discrete negative Laplacian (5-point stencil, Dirichlet zero outside).
pub fn apply_laplacian(u: &GridField) -> GridField {
    let g = u.grid;
    let m = g.n_interior();
    let inv_h2 = (g.n_cells() * g.n_cells()) as f64;
    let mut out = vec![0.0; u.values.len()];
    for ix in 0..m {
        let row = ix * m;
        for iy in 0..m {
            let idx = row + iy;
            let c = u.values[idx];
            let left = if ix > 0 { u.values[idx - m] } else { 0.0 };
            let right = if ix + 1 < m { u.values[idx + m] } else { 0.0 };
            let down = if iy > 0 { u.values[idx - 1] } else { 0.0 };
            let up = if iy + 1 < m { u.values[idx + 1] } else { 0.0 };
            out[idx] = (4.0 * c - left - right - down - up) * inv_h2;
        }
    }
    GridField {
        grid: g,
        values: out,
    }
}

/// Smallest discrete eigenvalue-style identity helper:
/// lambda_h(n,m) = (4/h^2)(sin^2(n pi h/2) + sin^2(m pi h/2)).
pub fn discrete_eigenvalue(grid: Grid2D, n: usize, m: usize) -> f64 {
    let h = grid.h();
    let s = |k: usize| (k as f64 * std::f64::consts::PI * h / 2.0).sin().powi(2);
    4.0 / (h * h) * (s(n) + s(m))
}

/// Solve ((shift + conv_diag) I + (-Laplacian_h)) w = rhs by Jacobi-
/// preconditioned conjugate gradients, optionally warm-started from `x0`.
pub fn solve_spd(
    shift: f64,
    conv_diag: f64,
    rhs: &GridField,
    tol: f64,
    x0: Option<&GridField>,
) -> Result<GridField> {
    let sigma = shift + conv_diag;
    if !(sigma >= 0.0) {
        return Err(Error::Argument(format!(
            "shift + conv_diag = {sigma} must be nonnegative"
        )));
    }
    let g = rhs.grid;
    let apply = |u: &GridField| -> GridField {
        let mut out = apply_laplacian(u);
        for (o, v) in out.values.iter_mut().zip(&u.values) {
            *o += sigma * v;
        }
        out
    };

    let rhs_norm = dot(&rhs.values, &rhs.values).sqrt();
    if rhs_norm == 0.0 {
        return Ok(GridField::zeros(g));
    }

    let mut x = match x0 {
        Some(v) => {
            v.check_same_grid(rhs)?;
            v.clone()
        }
        None => GridField::zeros(g),
    };
    let mut r = rhs.clone();
    let ax = apply(&x);
    for (ri, a) in r.values.iter_mut().zip(&ax.values) {
        *ri -= a;
    }

    let inv_diag = 1.0 / (sigma + 4.0 * (g.n_cells() * g.n_cells()) as f64);
    let mut z: Vec<f64> = r.values.iter().map(|v| v * inv_diag).collect();
    let mut p = GridField {
        grid: g,
        values: z.clone(),
    };
    let mut rz = dot(&r.values, &z);

    let cap = 10 * g.interior_count();
    let mut res = dot(&r.values, &r.values).sqrt() / rhs_norm;
    for _ in 0..cap {
        if res <= tol {
            return Ok(x);
        }
        let ap = apply(&p);
        let pap = dot(&p.values, &ap.values);
        if pap <= 0.0 {
            return Err(Error::SolverDiverged {
                iterations: cap,
                residual: res,
            });
        }
        let alpha = rz / pap;
        for ((xi, pi), (ri, api)) in x
            .values
            .iter_mut()
            .zip(&p.values)
            .zip(r.values.iter_mut().zip(&ap.values))
        {
            *xi += alpha * pi;
            *ri -= alpha * api;
        }
        res = dot(&r.values, &r.values).sqrt() / rhs_norm;
        for (zi, ri) in z.iter_mut().zip(&r.values) {
            *zi = ri * inv_diag;
        }
        let rz_new = dot(&r.values, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.values.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    if res <= tol {
        Ok(x)
    } else {
        Err(Error::SolverDiverged {
            iterations: cap,
            residual: res,
        })
    }
}

/// Indicator of an axis-aligned observation box on the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    pub grid: Grid2D,
    pub indicator: Vec<bool>,
    count: usize,
}

impl RegionMask {
    pub fn count(&self) -> usize {
        self.count
    }

    /// Flat indices of the masked interior nodes, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indicator
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }
}

/// Nodes with x0 <= x <= x1 and y0 <= y <= y1; box-edge ties are included.
pub fn region_mask(grid: Grid2D, bounds: (f64, f64, f64, f64)) -> Result<RegionMask> {
    let (x0, x1, y0, y1) = bounds;
    if !(0.0 <= x0 && x0 < x1 && x1 <= 1.0 && 0.0 <= y0 && y0 < y1 && y1 <= 1.0) {
        return Err(Error::Argument(format!(
            "invalid observation box ({x0},{x1},{y0},{y1})"
        )));
    }
    let eps = 1e-9;
    let mut indicator = vec![false; grid.interior_count()];
    let mut count = 0;
    for (idx, flag) in indicator.iter_mut().enumerate() {
        let (x, y) = grid.coords(idx);
        if x >= x0 - eps && x <= x1 + eps && y >= y0 - eps && y <= y1 + eps {
            *flag = true;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Argument(format!(
            "observation box ({x0},{x1},{y0},{y1}) contains no interior node of the {}-cell grid",
            grid.n_cells()
        )));
    }
    Ok(RegionMask {
        grid,
        indicator,
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sine_mode(grid: Grid2D, n: usize, m: usize) -> GridField {
        GridField::from_fn(grid, |x, y| {
            (n as f64 * PI * x).sin() * (m as f64 * PI * y).sin()
        })
    }

    fn random_field(grid: Grid2D, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridField {
            grid,
            values: (0..grid.interior_count())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        }
    }

    #[test]
    fn grid_construction() {
        let g = Grid2D::new(50).unwrap();
        assert_eq!(g.h(), 0.02);
        assert_eq!(g.interior_count(), 2401);
        assert_eq!(Grid2D::new(4).unwrap().interior_count(), 9);
        assert!(Grid2D::new(3).is_err());
    }

    #[test]
    fn laplacian_of_zero() {
        let g = Grid2D::new(16).unwrap();
        let out = apply_laplacian(&GridField::zeros(g));
        assert!(out.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_eigenfunction() {
        let g = Grid2D::new(64).unwrap();
        let u = sine_mode(g, 1, 1);
        let lu = apply_laplacian(&u);
        let lambda_h = discrete_eigenvalue(g, 1, 1);
        // Exact discrete eigenpair.
        for (a, b) in lu.values.iter().zip(&u.values) {
            assert!((a - lambda_h * b).abs() <= 1e-9 * lambda_h);
        }
        // Close to the continuum eigenvalue 2 pi^2.
        assert_relative_eq!(lambda_h, 2.0 * PI * PI, max_relative = 2e-3);
    }

    #[test]
    fn discrete_eigenpairs_identity() {
        let g = Grid2D::new(24).unwrap();
        for &(n, m) in &[(1usize, 1usize), (2, 3), (5, 1)] {
            let u = sine_mode(g, n, m);
            let lu = apply_laplacian(&u);
            let lam = discrete_eigenvalue(g, n, m);
            let unorm = u.norm2();
            let mut diff = lu.clone();
            diff.axpy(-lam, &u).unwrap();
            assert!(diff.norm2() <= 1e-12 * lam * unorm);
        }
    }

    #[test]
    fn laplacian_symmetric_positive() {
        let g = Grid2D::new(20).unwrap();
        let u = random_field(g, 1);
        let v = random_field(g, 2);
        let a = apply_laplacian(&u).inner(&v).unwrap();
        let b = u.inner(&apply_laplacian(&v)).unwrap();
        assert!((a - b).abs() <= 1e-12 * u.norm2() * v.norm2() * 1e4);
        assert!(apply_laplacian(&u).inner(&u).unwrap() > 0.0);
    }

    #[test]
    fn inner_product_properties() {
        let g = Grid2D::new(64).unwrap();
        let u = sine_mode(g, 1, 1);
        assert_relative_eq!(u.inner(&u).unwrap(), 0.25, epsilon = 1e-3);
        let v = random_field(g, 3);
        assert_eq!(u.inner(&v).unwrap(), v.inner(&u).unwrap());
        let g2 = Grid2D::new(32).unwrap();
        assert!(u.inner(&GridField::zeros(g2)).is_err());
    }

    #[test]
    fn solve_spd_zero_rhs() {
        let g = Grid2D::new(16).unwrap();
        let w = solve_spd(1.0, 0.0, &GridField::zeros(g), 1e-12, None).unwrap();
        assert!(w.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn solve_spd_eigenmode() {
        let g = Grid2D::new(32).unwrap();
        let rhs = sine_mode(g, 2, 2);
        let lam = discrete_eigenvalue(g, 2, 2);
        let w = solve_spd(0.0, 0.0, &rhs, 1e-12, None).unwrap();
        let mut diff = w;
        diff.axpy(-1.0 / lam, &rhs).unwrap();
        assert!(diff.norm2() <= 1e-10 * rhs.norm2() / lam);
    }

    #[test]
    fn solve_spd_random_residual() {
        let g = Grid2D::new(32).unwrap();
        let rhs = random_field(g, 7);
        let w = solve_spd(3.0, 0.5, &rhs, 1e-10, None).unwrap();
        let mut res = apply_laplacian(&w);
        res.axpy(3.5, &w).unwrap();
        res.axpy(-1.0, &rhs).unwrap();
        assert!(res.norm2() / rhs.norm2() <= 1e-9);
    }

    #[test]
    fn solve_spd_rejects_negative_shift() {
        let g = Grid2D::new(8).unwrap();
        assert!(solve_spd(-1.0, 0.5, &GridField::zeros(g), 1e-10, None).is_err());
    }

    #[test]
    fn observation_box_counts() {
        let g = Grid2D::new(50).unwrap();
        let m = region_mask(g, (0.3, 0.7, 0.3, 0.7)).unwrap();
        assert_eq!(m.count(), 441);
        let all = region_mask(g, (0.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(all.count(), g.interior_count());
        let g4 = Grid2D::new(4).unwrap();
        assert!(region_mask(g4, (0.9, 0.95, 0.9, 0.95)).is_err());
        assert!(region_mask(g, (0.7, 0.3, 0.0, 1.0)).is_err());
    }
}
