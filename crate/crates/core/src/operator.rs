//! Discrete radial Dirichlet Laplacian on the unit disk.
//!
//! The operator is the finite-volume (flux) form of u ↦ -(1/r)(r u')' with
//! u'(0) = 0 and u(1) = 0: a tridiagonal matrix over the unknowns
//! i = 0..n (center included, boundary row eliminated) that is exactly
//! self-adjoint in the grid's cell-area inner product and positive definite
//! on Dirichlet fields.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};

// Error-free transforms. Stencil rows cancel from O(|u|/h²) products down to
// O(λ|u|); accumulating the product/sum errors keeps the evaluation floor at
// ~ε·|row value| instead of ~ε·|u|/h².
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

/// Compensated a·x + b·y + c·z + r.
#[inline]
fn stencil_row(a: f64, x: f64, b: f64, y: f64, c: f64, z: f64, r: f64) -> f64 {
    let (p1, e1) = two_prod(a, x);
    let (p2, e2) = two_prod(b, y);
    let (p3, e3) = two_prod(c, z);
    let (s1, t1) = two_sum(p1, p2);
    let (s2, t2) = two_sum(s1, p3);
    let (s3, t3) = two_sum(s2, r);
    s3 + (t1 + t2 + t3 + e1 + e2 + e3)
}

/// A near-zero pivot met during elimination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub row: usize,
    pub pivot: f64,
    pub scale: f64,
}

/// Symmetric-in-weighted-inner-product tridiagonal system over the solver
/// unknowns. `sub[0]` and `sup[order-1]` are not part of the system; the
/// latter slot is kept by the Laplacian for its eliminated boundary column.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Self {
        assert_eq!(sub.len(), diag.len());
        assert_eq!(sup.len(), diag.len());
        Self { sub, diag, sup }
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// diag[i] -= delta[i]; used to form Jacobians A - diag(c).
    pub fn subtract_from_diag(&mut self, delta: &[f64]) {
        debug_assert_eq!(delta.len(), self.diag.len());
        for (d, c) in self.diag.iter_mut().zip(delta) {
            *d -= c;
        }
    }

    /// Matrix-vector product over the system unknowns (x beyond the last row
    /// is taken as zero).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.order();
        debug_assert_eq!(x.len(), m);
        let mut y = vec![0.0; m];
        for i in 0..m {
            let xl = if i > 0 { x[i - 1] } else { 0.0 };
            let xr = if i + 1 < m { x[i + 1] } else { 0.0 };
            let sup = if i + 1 < m { self.sup[i] } else { 0.0 };
            y[i] = stencil_row(self.sub[i], xl, self.diag[i], x[i], sup, xr, 0.0);
        }
        y
    }

    fn infinity_scale(&self) -> f64 {
        let m = self.order();
        let mut scale = 0.0f64;
        for i in 0..m {
            let sup = if i + 1 < m { self.sup[i].abs() } else { 0.0 };
            scale = scale.max(self.sub[i].abs() + self.diag[i].abs() + sup);
        }
        scale
    }

    fn sweep(&self, rhs: &[f64], scale: f64) -> core::result::Result<Vec<f64>, SingularPivot> {
        let m = self.order();
        debug_assert_eq!(rhs.len(), m);
        let mut d = vec![0.0; m];
        let mut c = vec![0.0; m];
        let mut y = vec![0.0; m];

        let guard = 1e-14 * scale;
        let mut pivot = self.diag[0];
        if pivot.abs() < guard {
            return Err(SingularPivot {
                row: 0,
                pivot,
                scale,
            });
        }
        d[0] = pivot;
        c[0] = self.sup[0];
        y[0] = rhs[0];
        for i in 1..m {
            let l = self.sub[i] / d[i - 1];
            pivot = self.diag[i] - l * c[i - 1];
            if pivot.abs() < guard {
                return Err(SingularPivot {
                    row: i,
                    pivot,
                    scale,
                });
            }
            d[i] = pivot;
            if i + 1 < m {
                c[i] = self.sup[i];
            }
            y[i] = rhs[i] - l * y[i - 1];
        }

        let mut x = vec![0.0; m];
        x[m - 1] = y[m - 1] / d[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = (y[i] - c[i] * x[i + 1]) / d[i];
        }

        // A pivot can ride just above the guard while the matrix is
        // numerically singular; solution growth beyond 1/(1e-14·scale)
        // catches that case.
        let x_inf = x.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let rhs_inf = rhs.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if x_inf * guard > rhs_inf {
            return Err(SingularPivot {
                row: m - 1,
                pivot: d[m - 1],
                scale,
            });
        }
        Ok(x)
    }

    /// Direct solve by elimination, followed by one iterative-refinement
    /// pass with a compensated residual; the refined solution satisfies the
    /// system to ~ε·‖rhs‖.
    pub fn solve(&self, rhs: &[f64]) -> core::result::Result<Vec<f64>, SingularPivot> {
        let m = self.order();
        let scale = self.infinity_scale();
        let mut x = self.sweep(rhs, scale)?;

        let mut resid = vec![0.0; m];
        for i in 0..m {
            let xl = if i > 0 { x[i - 1] } else { 0.0 };
            let xr = if i + 1 < m { x[i + 1] } else { 0.0 };
            let sup = if i + 1 < m { self.sup[i] } else { 0.0 };
            resid[i] = -stencil_row(self.sub[i], xl, self.diag[i], x[i], sup, xr, -rhs[i]);
        }
        let correction = self.sweep(&resid, scale)?;
        for (xi, di) in x.iter_mut().zip(&correction) {
            *xi += di;
        }
        Ok(x)
    }
}

/// The assembled radial Laplacian, tied to its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialLaplacian {
    tri: Tridiagonal,
    grid: RadialGrid,
}

impl RadialLaplacian {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn tridiagonal(&self) -> &Tridiagonal {
        &self.tri
    }

    /// Number of unknowns, n + 1 (center plus interior).
    pub fn order(&self) -> usize {
        self.tri.order()
    }

    /// Multiply the operator by a constant; the spectrum scales with it.
    pub fn rescale(&mut self, c: f64) {
        for v in self
            .tri
            .sub
            .iter_mut()
            .chain(self.tri.diag.iter_mut())
            .chain(self.tri.sup.iter_mut())
        {
            *v *= c;
        }
    }
}

/// Assemble the flux-form stencil
/// (A u)_i = -[r_{i+1/2}(u_{i+1}-u_i) - r_{i-1/2}(u_i-u_{i-1})]/(r_i h²)
/// with the center row (A u)_0 = -4(u_1-u_0)/h² (the flux over the cell of
/// area πh²/4 around the coordinate singularity).
pub fn assemble_laplacian(grid: &RadialGrid) -> RadialLaplacian {
    let n = grid.n_interior();
    let h = grid.spacing();
    let h2 = h * h;
    let m = n + 1;
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];

    diag[0] = 4.0 / h2;
    sup[0] = -4.0 / h2;
    for i in 1..m {
        let fi = i as f64;
        sub[i] = -(fi - 0.5) / (fi * h2);
        diag[i] = 2.0 / h2;
        sup[i] = -(fi + 0.5) / (fi * h2);
    }

    RadialLaplacian {
        tri: Tridiagonal::new(sub, diag, sup),
        grid: grid.clone(),
    }
}

/// A·u as a field. The product uses the field's actual boundary value in the
/// last row, so constants are annihilated; Dirichlet states carry 0 there
/// anyway. The output boundary entry is zero.
pub fn apply(a: &RadialLaplacian, u: &RadialField) -> Result<RadialField> {
    a.grid.check_len(u)?;
    let m = a.order();
    let x = u.values();
    let mut out = RadialField::zeros_on(&a.grid);
    {
        let y = out.values_mut();
        let tri = &a.tri;
        for i in 0..m {
            let xl = if i > 0 { x[i - 1] } else { 0.0 };
            y[i] = stencil_row(tri.sub[i], xl, tri.diag[i], x[i], tri.sup[i], x[i + 1], 0.0);
        }
    }
    Ok(out)
}

/// Solve (A - shift·I) u = rhs with Dirichlet elimination; the rhs boundary
/// entry is ignored and the solution carries u(1) = 0.
pub fn solve_shifted(a: &RadialLaplacian, shift: f64, rhs: &RadialField) -> Result<RadialField> {
    a.grid.check_len(rhs)?;
    let m = a.order();
    let mut tri = a.tri.clone();
    for d in tri.diag.iter_mut() {
        *d -= shift;
    }
    let x = tri
        .solve(&rhs.values()[..m])
        .map_err(|_| Error::SingularSystem { shift })?;
    let mut out = RadialField::zeros_on(&a.grid);
    out.values_mut()[..m].copy_from_slice(&x);
    Ok(out)
}
