//! The homotopy residual F_t(u) = A u - λ₁u - t(eᵘ + f) - (1-t)g(u), its
//! Jacobian, the truncated-sine comparison nonlinearity g, and a damped
//! Newton corrector.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::eigen::{radial_gap, EigenPair};
use crate::error::{Error, Result};
use crate::grid::{disk_norm, inner, RadialField, RadialGrid};
use crate::operator::{apply, RadialLaplacian, Tridiagonal};

/// eᵘ overflows f64 near u = 709.78; beyond this guard a nodal value is
/// semantically a blow-up event rather than a number to exponentiate.
pub const OVERFLOW_GUARD: f64 = 700.0;

const MAX_NEWTON_ITER: usize = 50;
const MAX_BACKTRACK: usize = 30;

/// Everything fixed along one homotopy: operator, eigenpair, forcing, and
/// the scaling ε of the comparison nonlinearity.
#[derive(Debug, Clone)]
pub struct ProblemData {
    laplacian: RadialLaplacian,
    eig: EigenPair,
    forcing: RadialField,
    epsilon_g: f64,
    radial_gap: f64,
    forcing_mass: f64,
}

impl ProblemData {
    /// Validates shapes and the comparison-theorem hypothesis ε ≤ λ₂ - λ₁.
    ///
    /// The forcing mass is computed here but only enforced positive by the
    /// continuation driver; the residual itself is well defined for any f.
    pub fn new(
        laplacian: RadialLaplacian,
        eig: EigenPair,
        forcing: RadialField,
        epsilon_g: f64,
    ) -> Result<Self> {
        laplacian.grid().check_len(&forcing)?;
        laplacian.grid().check_len(&eig.phi1)?;
        if !(epsilon_g > 0.0) {
            return Err(Error::Config(format!(
                "epsilon_g must be positive, got {epsilon_g}"
            )));
        }
        let gap = radial_gap(&laplacian)?;
        if epsilon_g > gap {
            return Err(Error::Config(format!(
                "epsilon_g = {epsilon_g} exceeds the radial spectral gap {gap:.6}; \
                 the comparison equation would lose uniqueness"
            )));
        }
        let forcing_mass = crate::forcing::mass(&forcing, &eig, laplacian.grid())?;
        Ok(Self {
            laplacian,
            eig,
            forcing,
            epsilon_g,
            radial_gap: gap,
            forcing_mass,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        self.laplacian.grid()
    }

    pub fn laplacian(&self) -> &RadialLaplacian {
        &self.laplacian
    }

    pub fn eig(&self) -> &EigenPair {
        &self.eig
    }

    pub fn forcing(&self) -> &RadialField {
        &self.forcing
    }

    pub fn epsilon_g(&self) -> f64 {
        self.epsilon_g
    }

    pub fn radial_gap(&self) -> f64 {
        self.radial_gap
    }

    /// m(f) = -∫ f φ₁, fixed at construction.
    pub fn forcing_mass(&self) -> f64 {
        self.forcing_mass
    }
}

/// The comparison nonlinearity: ε·sin(s) on [-π, π], zero outside.
pub fn g_comparison(s: f64, epsilon_g: f64) -> f64 {
    if libm::fabs(s) <= PI {
        epsilon_g * libm::sin(s)
    } else {
        0.0
    }
}

/// Generalized derivative of g: ε·cos(s) on the closed interval [-π, π]
/// (the inside value is kept at the kink), zero outside.
pub fn g_comparison_deriv(s: f64, epsilon_g: f64) -> f64 {
    if libm::fabs(s) <= PI {
        epsilon_g * libm::cos(s)
    } else {
        0.0
    }
}

fn check_overflow(u: &RadialField) -> Result<()> {
    for (node, &v) in u.values().iter().enumerate() {
        if v > OVERFLOW_GUARD {
            return Err(Error::Overflow { node, value: v });
        }
    }
    Ok(())
}

/// F_t(u) on the unknown rows; the boundary entry is zero.
pub fn residual(p: &ProblemData, t: f64, u: &RadialField) -> Result<RadialField> {
    debug_assert!((0.0..=1.0).contains(&t));
    p.grid().check_len(u)?;
    check_overflow(u)?;

    let mut out = apply(&p.laplacian, u)?;
    let m = p.laplacian.order();
    let lambda1 = p.eig.lambda1;
    let eps = p.epsilon_g;
    let f = p.forcing.values();
    let uv = u.values();
    let r = out.values_mut();
    for i in 0..m {
        r[i] -=
            lambda1 * uv[i] + t * (libm::exp(uv[i]) + f[i]) + (1.0 - t) * g_comparison(uv[i], eps);
    }
    Ok(out)
}

/// Jacobian of F_t at u: A - diag(λ₁ + t·eᵘ + (1-t)·g'(u)).
pub fn jacobian(p: &ProblemData, t: f64, u: &RadialField) -> Result<Tridiagonal> {
    debug_assert!((0.0..=1.0).contains(&t));
    p.grid().check_len(u)?;
    check_overflow(u)?;

    let m = p.laplacian.order();
    let lambda1 = p.eig.lambda1;
    let eps = p.epsilon_g;
    let uv = u.values();
    let mut shift = vec![0.0; m];
    for (i, s) in shift.iter_mut().enumerate() {
        *s = lambda1 + t * libm::exp(uv[i]) + (1.0 - t) * g_comparison_deriv(uv[i], eps);
    }
    let mut tri = p.laplacian.tridiagonal().clone();
    tri.subtract_from_diag(&shift);
    Ok(tri)
}

/// |t·∫eᵘφ₁ + t·∫fφ₁ + (1-t)·∫g(u)φ₁| — the residual of the identity
/// obtained by pairing the equation with φ₁; vanishes to solver precision at
/// any root of F_t because the operator is exactly self-adjoint.
pub fn solvability_residual(p: &ProblemData, t: f64, u: &RadialField) -> Result<f64> {
    let grid = p.grid();
    grid.check_len(u)?;
    let exp_u = RadialField::from_values(u.values().iter().map(|&v| libm::exp(v)).collect());
    let g_u = RadialField::from_values(
        u.values()
            .iter()
            .map(|&v| g_comparison(v, p.epsilon_g))
            .collect(),
    );
    let total = t * inner(grid, &exp_u, &p.eig.phi1)?
        + t * inner(grid, &p.forcing, &p.eig.phi1)?
        + (1.0 - t) * inner(grid, &g_u, &p.eig.phi1)?;
    Ok(libm::fabs(total))
}

/// Why a Newton run stopped without meeting its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonFailure {
    /// The Jacobian solve hit a (numerically) singular system.
    SingularJacobian,
    /// Thirty halvings produced no residual decrease.
    LineSearchStall,
    /// Fifty iterations were not enough.
    MaxIterations,
}

/// Outcome of a Newton correction.
#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub converged: bool,
    pub iterations: usize,
    /// Disk-L² norm of F at the returned iterate.
    pub final_residual_norm: f64,
    /// Disk-L² norms of the accepted (damped) steps.
    pub step_norms: Vec<f64>,
    pub failure: Option<NewtonFailure>,
}

/// Damped Newton with residual-norm backtracking.
///
/// Success means the disk-L² residual meets `tol` within fifty iterations;
/// the last iterate and a report are returned either way. A singular
/// Jacobian is reported as non-convergence; an iterate beyond the overflow
/// guard is a blow-up signal and surfaces as `Error::Overflow`. Overflow on
/// a backtracking *trial* only rejects that trial.
pub fn newton_solve(
    p: &ProblemData,
    t: f64,
    u0: &RadialField,
    tol: f64,
) -> Result<(RadialField, NewtonReport)> {
    debug_assert!(tol > 0.0);
    let grid = p.grid();
    let m = p.laplacian.order();
    let weights = grid.weights();

    let mut u = u0.clone();
    let mut resid = residual(p, t, &u)?;
    let mut rnorm = disk_norm(grid, &resid)?;
    let mut step_norms = Vec::new();

    for iter in 0..=MAX_NEWTON_ITER {
        if rnorm <= tol {
            return Ok((
                u,
                NewtonReport {
                    converged: true,
                    iterations: iter,
                    final_residual_norm: rnorm,
                    step_norms,
                    failure: None,
                },
            ));
        }
        if iter == MAX_NEWTON_ITER {
            break;
        }

        let jac = jacobian(p, t, &u)?;
        let mut rhs = vec![0.0; m];
        for (ri, fi) in rhs.iter_mut().zip(resid.values()) {
            *ri = -fi;
        }
        let delta = match jac.solve(&rhs) {
            Ok(d) => d,
            Err(_) => {
                return Ok((
                    u,
                    NewtonReport {
                        converged: false,
                        iterations: iter,
                        final_residual_norm: rnorm,
                        step_norms,
                        failure: Some(NewtonFailure::SingularJacobian),
                    },
                ))
            }
        };

        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_BACKTRACK {
            let mut trial = u.clone();
            for (ti, di) in trial.values_mut()[..m].iter_mut().zip(&delta) {
                *ti += damping * di;
            }
            match residual(p, t, &trial) {
                Err(Error::Overflow { .. }) => {
                    damping *= 0.5;
                    continue;
                }
                Err(e) => return Err(e),
                Ok(trial_resid) => {
                    let trial_norm = disk_norm(grid, &trial_resid)?;
                    if trial_norm < rnorm {
                        let mut step_sq = 0.0;
                        for (i, di) in delta.iter().enumerate() {
                            let s = damping * di;
                            step_sq += weights[i] * s * s;
                        }
                        step_norms.push(libm::sqrt(step_sq));
                        u = trial;
                        resid = trial_resid;
                        rnorm = trial_norm;
                        accepted = true;
                        break;
                    }
                    damping *= 0.5;
                }
            }
        }
        if !accepted {
            return Ok((
                u,
                NewtonReport {
                    converged: false,
                    iterations: iter + 1,
                    final_residual_norm: rnorm,
                    step_norms,
                    failure: Some(NewtonFailure::LineSearchStall),
                },
            ));
        }
    }

    Ok((
        u,
        NewtonReport {
            converged: false,
            iterations: MAX_NEWTON_ITER,
            final_residual_norm: rnorm,
            step_norms,
            failure: Some(NewtonFailure::MaxIterations),
        },
    ))
}

/// Deterministic probe start for the comparison-equation uniqueness check:
/// a combination of Dirichlet-compatible modes cos((k+1/2)πr) rescaled to a
/// prescribed sup norm.
pub fn probe_start(grid: &RadialGrid, coeffs: &[f64], sup: f64) -> RadialField {
    let mut u = RadialField::zeros_on(grid);
    for (k, &c) in coeffs.iter().enumerate() {
        let freq = (k as f64 + 0.5) * PI;
        for (ui, &r) in u.values_mut().iter_mut().zip(grid.nodes()) {
            *ui += c * libm::cos(freq * r);
        }
    }
    let s = u.sup_norm();
    if s > 0.0 {
        u.scale(sup / s);
    }
    let last = u.len() - 1;
    u.values_mut()[last] = 0.0;
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::first_eigenpair;
    use crate::forcing::{build_forcing, ForcingSpec};
    use crate::grid::make_grid;
    use crate::operator::assemble_laplacian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn problem(n: usize, forcing_amp: f64) -> ProblemData {
        let g = make_grid(n).unwrap();
        let a = assemble_laplacian(&g);
        let eig = first_eigenpair(&a).unwrap();
        let f = build_forcing(&ForcingSpec::eigenfunction(forcing_amp), &eig, &g).unwrap();
        ProblemData::new(a, eig, f, 1.0).unwrap()
    }

    #[test]
    fn g_matches_truncated_sine() {
        assert_eq!(g_comparison(PI / 2.0, 1.0), 1.0);
        assert_eq!(g_comparison(2.0 * PI, 1.0), 0.0);
        assert_eq!(g_comparison(-PI / 2.0, 0.5), -0.5);
        assert_eq!(g_comparison(0.0, 3.0), 0.0);
        // Continuous across the truncation points.
        assert!(g_comparison(PI, 1.0).abs() < 1e-15);
        assert!(g_comparison(-PI, 1.0).abs() < 1e-15);
    }

    #[test]
    fn g_derivative_keeps_inside_value_at_kink() {
        assert_eq!(g_comparison_deriv(0.0, 0.7), 0.7);
        assert!((g_comparison_deriv(PI, 1.0) + 1.0).abs() < 1e-15);
        assert!((g_comparison_deriv(-PI, 2.0) + 2.0).abs() < 1e-14);
        assert_eq!(g_comparison_deriv(PI + 1e-12, 1.0), 0.0);
        assert_eq!(g_comparison_deriv(4.0, 1.0), 0.0);
    }

    #[test]
    fn zero_solves_comparison_equation() {
        let p = problem(64, 4.0);
        let u = RadialField::zeros_on(p.grid());
        let r = residual(&p, 0.0, &u).unwrap();
        assert_eq!(r.sup_norm(), 0.0);
    }

    #[test]
    fn target_residual_at_zero_with_zero_forcing() {
        let g = make_grid(64).unwrap();
        let a = assemble_laplacian(&g);
        let eig = first_eigenpair(&a).unwrap();
        let f = RadialField::zeros_on(&g);
        let p = ProblemData::new(a, eig, f, 1.0).unwrap();
        let u = RadialField::zeros_on(&g);
        let r = residual(&p, 1.0, &u).unwrap();
        let m = p.laplacian().order();
        for i in 0..m {
            assert_eq!(r.values()[i], -1.0, "row {i}");
        }
        assert_eq!(r.values()[g.len() - 1], 0.0);
    }

    #[test]
    fn epsilon_above_gap_is_rejected() {
        let g = make_grid(64).unwrap();
        let a = assemble_laplacian(&g);
        let eig = first_eigenpair(&a).unwrap();
        let f = build_forcing(&ForcingSpec::eigenfunction(4.0), &eig, &g).unwrap();
        match ProblemData::new(a, eig, f, 30.0) {
            Err(Error::Config(msg)) => assert!(msg.contains("radial spectral gap")),
            other => panic!("expected config rejection, got {other:?}"),
        }
    }

    #[test]
    fn jacobian_at_origin_shifts_by_lambda_plus_epsilon() {
        let p = problem(64, 4.0);
        let u = RadialField::zeros_on(p.grid());
        let m = p.laplacian().order();
        for (t, slope) in [(0.0, p.epsilon_g()), (1.0, 1.0)] {
            let jac = jacobian(&p, t, &u).unwrap();
            let base = p.laplacian().tridiagonal();
            for i in 0..m {
                let got = base.diag()[i] - jac.diag()[i];
                assert!(
                    (got - (p.eig().lambda1 + slope)).abs() < 1e-12,
                    "t={t}, row {i}"
                );
            }
        }
    }

    fn fd_relative_error(
        p: &ProblemData,
        t: f64,
        u: &RadialField,
        v: &RadialField,
        delta: f64,
    ) -> f64 {
        let g = p.grid();
        let m = p.laplacian().order();
        let f0 = residual(p, t, u).unwrap();
        let mut u_pert = u.clone();
        u_pert.add_scaled(delta, v);
        let f1 = residual(p, t, &u_pert).unwrap();
        let jac = jacobian(p, t, u).unwrap();
        let jv = jac.apply(&v.values()[..m]);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..m {
            let fd = (f1.values()[i] - f0.values()[i]) / delta;
            let w = g.weights()[i];
            num += w * (fd - jv[i]) * (fd - jv[i]);
            den += w * jv[i] * jv[i];
        }
        (num / den).sqrt()
    }

    #[test]
    fn jacobian_matches_directional_finite_differences() {
        // The difference quotient carries an input-rounding noise floor of
        // ~eps*|u|*||A||/delta, which grows like 1/h^2; n = 64 and modest
        // amplitudes keep it well below the 1e-6 tolerance at delta = 1e-7.
        let p = problem(64, 4.0);
        let g = p.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..20 {
            let t: f64 = rng.random_range(0.0..=1.0);
            let cu: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let cv: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let u = probe_start(g, &cu, rng.random_range(0.1..1.0));
            let v = probe_start(g, &cv, 1.0);
            let rel = fd_relative_error(&p, t, &u, &v, 1e-7);
            assert!(rel <= 1e-6, "trial {trial}: relative error {rel}");
        }
        // Larger amplitudes (exp branch dominant, truncated-g branch active)
        // with the step balanced against truncation.
        for trial in 0..10 {
            let t: f64 = rng.random_range(0.0..=1.0);
            let cu: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let cv: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let u = probe_start(g, &cu, rng.random_range(1.0..4.0));
            let v = probe_start(g, &cv, 1.0);
            let rel = fd_relative_error(&p, t, &u, &v, 1e-6);
            assert!(
                rel <= 1e-6,
                "large-amplitude trial {trial}: relative error {rel}"
            );
        }
    }

    #[test]
    fn newton_at_exact_root_returns_immediately() {
        let p = problem(64, 4.0);
        let u0 = RadialField::zeros_on(p.grid());
        let (u, rep) = newton_solve(&p, 0.0, &u0, 1e-10).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 0);
        assert_eq!(u.sup_norm(), 0.0);
    }

    #[test]
    fn newton_pulls_small_perturbations_to_zero() {
        let p = problem(128, 4.0);
        let u0 = p.eig().phi1.scaled(0.1);
        let (u, rep) = newton_solve(&p, 0.0, &u0, 1e-10).unwrap();
        assert!(rep.converged, "report {rep:?}");
        assert!(u.sup_norm() <= 1e-9, "sup {}", u.sup_norm());
    }

    #[test]
    fn comparison_uniqueness_probe_finds_no_nonzero_root() {
        let p = problem(128, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut converged = 0;
        for _ in 0..10 {
            let coeffs: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let sup = rng.random_range(0.0..3.0_f64).max(1e-3);
            let u0 = probe_start(p.grid(), &coeffs, sup);
            let (u, rep) = newton_solve(&p, 0.0, &u0, 1e-10).unwrap();
            if rep.converged {
                converged += 1;
                assert!(
                    u.sup_norm() <= 1e-9,
                    "nonzero root found: sup {}",
                    u.sup_norm()
                );
            }
        }
        assert!(converged > 0, "probe never converged, test is vacuous");
    }

    #[test]
    fn solvability_identity_holds_at_roots() {
        let p = problem(128, 4.0);
        let u0 = RadialField::zeros_on(p.grid());
        let (u, rep) = newton_solve(&p, 0.4, &u0, 1e-10).unwrap();
        assert!(rep.converged, "report {rep:?}");
        let id = solvability_residual(&p, 0.4, &u).unwrap();
        assert!(id <= 1e-9, "identity residual {id}");
    }

    #[test]
    fn residual_is_affine_in_forcing() {
        let g = make_grid(64).unwrap();
        let a = assemble_laplacian(&g);
        let eig = first_eigenpair(&a).unwrap();
        let f1 = build_forcing(&ForcingSpec::eigenfunction(2.0), &eig, &g).unwrap();
        let f2 = RadialField::from_fn(&g, |r| 0.7 * r - 0.2);
        let mut f12 = f1.clone();
        f12.add_scaled(1.0, &f2);

        let p1 = ProblemData::new(a.clone(), eig.clone(), f1, 1.0).unwrap();
        let p12 = ProblemData::new(a, eig, f12, 1.0).unwrap();

        let u = RadialField::from_fn(&g, |r| 0.3 * (1.0 - r * r));
        let t = 0.75;
        let r1 = residual(&p1, t, &u).unwrap();
        let r12 = residual(&p12, t, &u).unwrap();
        let m = p1.laplacian().order();
        for i in 0..m {
            let expected = r1.values()[i] - t * f2.values()[i];
            assert!((r12.values()[i] - expected).abs() < 1e-12, "row {i}");
        }
    }

    #[test]
    fn overflow_guard_signals_blowup() {
        let p = problem(64, 4.0);
        let mut u = RadialField::zeros_on(p.grid());
        u.values_mut()[3] = 701.0;
        match residual(&p, 0.5, &u) {
            Err(Error::Overflow { node: 3, value }) => assert_eq!(value, 701.0),
            other => panic!("expected overflow, got {other:?}"),
        }
        assert!(matches!(
            newton_solve(&p, 0.5, &u, 1e-10),
            Err(Error::Overflow { .. })
        ));
    }
}
