//! Discrete eigenpairs of the radial Laplacian: the resonance data (λ₁, φ₁),
//! the radial spectral gap, and the Morse index of linearized operators,
//! which fixes the degree sign (-1)^index.

use crate::error::{Error, Result};
use crate::grid::{disk_norm, inner, RadialField};
use crate::operator::{apply, solve_shifted, RadialLaplacian};
use crate::specfun;

const MAX_ITER: usize = 500;
const EIGEN_TOL: f64 = 1e-12;

/// Convergence tolerance for the eigen iterations on a given operator:
/// 1e-12, floored by the f64 representation limit.
///
/// Rounding an eigenvector to f64 perturbs every entry by ~ε, and the
/// operator amplifies that noise by up to its largest eigenvalue ≈ 4/h², so
/// no representable vector has a residual below ~ε/h²; the floor ε·2/h²
/// leaves a factor ≈ 2 above the observed noise level.
pub fn residual_tolerance(a: &RadialLaplacian) -> f64 {
    let h = a.grid().spacing();
    EIGEN_TOL.max(f64::EPSILON * 2.0 / (h * h))
}

/// The discrete first eigenpair, normalized to unit disk-L² norm, together
/// with the closed-form Bessel reference.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// Discrete first eigenvalue.
    pub lambda1: f64,
    /// Discrete first eigenfunction, positive inside, φ₁(1) = 0, ‖φ₁‖ = 1.
    pub phi1: RadialField,
    /// Closed-form reference j₀,₁².
    pub lambda1_ref: f64,
    /// One-sided discrete φ₁'(1); negative.
    pub phi1_deriv_boundary: f64,
}

/// Smallest eigenpair by inverse iteration with shift 0.
///
/// Stops when ‖Aφ - λφ‖ meets [`residual_tolerance`] in the disk norm (φ is
/// kept at unit norm); the sign is fixed positive at the center.
pub fn first_eigenpair(a: &RadialLaplacian) -> Result<EigenPair> {
    let grid = a.grid();
    let tol = residual_tolerance(a);
    let mut x = RadialField::from_fn(grid, |r| 1.0 - r * r);
    let norm = disk_norm(grid, &x)?;
    x.scale(1.0 / norm);

    for _ in 0..MAX_ITER {
        let mut y = solve_shifted(a, 0.0, &x)?;
        let norm = disk_norm(grid, &y)?;
        if norm == 0.0 {
            return Err(Error::NumericalFailure(
                "inverse iteration collapsed to zero",
            ));
        }
        y.scale(1.0 / norm);
        if y.values()[0] < 0.0 {
            y.scale(-1.0);
        }

        let ay = apply(a, &y)?;
        let lambda = inner(grid, &ay, &y)?;
        let mut resid = ay;
        resid.add_scaled(-lambda, &y);
        if disk_norm(grid, &resid)? <= tol {
            let n = grid.n_interior();
            let h = grid.spacing();
            let phi = y.values();
            let deriv = (phi[n - 1] - 4.0 * phi[n]) / (2.0 * h);
            return Ok(EigenPair {
                lambda1: lambda,
                phi1: y,
                lambda1_ref: specfun::lambda1_reference(),
                phi1_deriv_boundary: deriv,
            });
        }
        x = y;
    }
    Err(Error::NumericalFailure(
        "inverse iteration did not converge in 500 iterations",
    ))
}

/// λ₂(radial) - λ₁ by deflated inverse iteration; positive.
pub fn radial_gap(a: &RadialLaplacian) -> Result<f64> {
    let grid = a.grid();
    let tol = residual_tolerance(a);
    let pair = first_eigenpair(a)?;

    // Sign-changing Dirichlet start with an O(1) second-mode component.
    let mut x = RadialField::from_fn(grid, |r| (1.0 - r * r) * (1.0 - 3.0 * r * r));
    let t = inner(grid, &x, &pair.phi1)?;
    x.add_scaled(-t, &pair.phi1);
    let norm = disk_norm(grid, &x)?;
    x.scale(1.0 / norm);

    for _ in 0..MAX_ITER {
        let mut y = solve_shifted(a, 0.0, &x)?;
        let t = inner(grid, &y, &pair.phi1)?;
        y.add_scaled(-t, &pair.phi1);
        let norm = disk_norm(grid, &y)?;
        if norm == 0.0 {
            return Err(Error::NumericalFailure(
                "deflated iteration collapsed to zero",
            ));
        }
        y.scale(1.0 / norm);

        let ay = apply(a, &y)?;
        let lambda2 = inner(grid, &ay, &y)?;
        let mut resid = ay;
        resid.add_scaled(-lambda2, &y);
        if disk_norm(grid, &resid)? <= tol {
            return Ok(lambda2 - pair.lambda1);
        }
        x = y;
    }
    Err(Error::NumericalFailure(
        "deflated inverse iteration did not converge in 500 iterations",
    ))
}

/// Number of negative eigenvalues of u ↦ A u - potential·u, by Sturm-sequence
/// sign counting on the symmetrized tridiagonal form.
///
/// An eigenvalue within 1e-10 of zero makes the index (and the degree sign)
/// ill-defined and is reported as a degenerate linearization.
pub fn morse_index(a: &RadialLaplacian, potential: &RadialField) -> Result<usize> {
    a.grid().check_len(potential)?;
    const DEGENERACY_TOL: f64 = 1e-10;
    let below_minus = sturm_count(a, potential, -DEGENERACY_TOL);
    let below_plus = sturm_count(a, potential, DEGENERACY_TOL);
    if below_plus != below_minus {
        // Locate the offending eigenvalue for the report.
        let (mut lo, mut hi) = (-DEGENERACY_TOL, DEGENERACY_TOL);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if sturm_count(a, potential, mid) > below_minus {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Err(Error::DegenerateLinearization {
            eigenvalue: 0.5 * (lo + hi),
        });
    }
    Ok(below_minus)
}

/// Eigenvalues of A - diag(potential) strictly below `lambda`, via the LDLᵀ
/// pivot signs of the similarity-symmetrized matrix (off-diagonal squares are
/// the sub·sup products).
fn sturm_count(a: &RadialLaplacian, potential: &RadialField, lambda: f64) -> usize {
    let tri = a.tridiagonal();
    let m = tri.order();
    let diag = tri.diag();
    let sub = tri.sub();
    let sup = tri.sup();
    let pot = potential.values();

    let mut scale = 0.0f64;
    for i in 0..m {
        scale = scale.max(diag[i].abs() + pot[i].abs() + lambda.abs());
    }
    let pivot_guard = 1e-20 * scale.max(1.0);

    let mut count = 0;
    let mut q = diag[0] - pot[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..m {
        let q_safe = if q.abs() < pivot_guard {
            if q >= 0.0 {
                pivot_guard
            } else {
                -pivot_guard
            }
        } else {
            q
        };
        let b2 = sub[i] * sup[i - 1];
        q = (diag[i] - pot[i] - lambda) - b2 / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}
