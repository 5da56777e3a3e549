//! The homotopy engine: march t from 0 to 1 with secant prediction, Newton
//! correction, adaptive step control and blow-up detection, carrying the
//! full set of per-step diagnostics (eigen-decomposition, exponential mass,
//! solvability identity, peak radius).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::forcing::{build_forcing, ForcingSpec};
use crate::grid::{disk_norm, inner, RadialField};
use crate::nonlinear::{newton_solve, solvability_residual, NewtonReport, ProblemData};
use crate::{eigen::EigenPair, operator::RadialLaplacian};

/// Step-control and tolerance knobs for one continuation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Newton acceptance tolerance, disk-L² norm.
    pub newton_tol: f64,
    /// Cap on ‖u‖∞; a converged state beyond it counts as blow-up.
    pub blowup_cap: f64,
    /// Step multiplier after an accepted step.
    pub growth: f64,
    /// Step multiplier after a rejected step.
    pub shrink: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-6,
            max_step: 0.1,
            newton_tol: 1e-10,
            blowup_cap: 1e4,
            growth: 2.0,
            shrink: 0.5,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.min_step > 0.0
            && self.min_step <= self.initial_step
            && self.initial_step <= self.max_step
            && self.max_step <= 1.0;
        if !ok {
            return Err(Error::Config(format!(
                "step sizes must satisfy 0 < min_step <= initial_step <= max_step <= 1, \
                 got {} / {} / {}",
                self.min_step, self.initial_step, self.max_step
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::Config(format!(
                "newton_tol must be positive, got {}",
                self.newton_tol
            )));
        }
        if !(self.blowup_cap > 0.0) {
            return Err(Error::Config(format!(
                "blowup_cap must be positive, got {}",
                self.blowup_cap
            )));
        }
        if !(self.growth >= 1.0) || !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::Config(format!(
                "step factors must satisfy growth >= 1 and 0 < shrink < 1, got {} / {}",
                self.growth, self.shrink
            )));
        }
        Ok(())
    }
}

/// How a continuation run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// t = 1 was accepted; the last state solves the target equation.
    ReachedT1,
    /// ‖u‖∞ passed the cap or the exponential guard tripped.
    BlowUp,
    /// The step fell below min_step without an accepted state.
    StepCollapse,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ReachedT1 => "reached_t1",
            Verdict::BlowUp => "blow_up",
            Verdict::StepCollapse => "step_collapse",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One accepted point of the homotopy, with every monitored quantity.
#[derive(Debug, Clone)]
pub struct HomotopyState {
    pub t: f64,
    pub u: RadialField,
    /// Step that led here (0 for the initial state).
    pub step: f64,
    pub newton_iters: usize,
    pub residual_norm: f64,
    /// T = ∫ u φ₁, the φ₁ coefficient of u.
    pub phi1_coeff: f64,
    /// Disk-L² norm of ω = u - Tφ₁.
    pub omega_norm: f64,
    /// t·∫ eᵘ φ₁, monitored against the 4π ceiling.
    pub exp_mass: f64,
    /// |t∫eᵘφ₁ + t∫fφ₁ + (1-t)∫g(u)φ₁|.
    pub identity_residual: f64,
    pub sup_norm: f64,
    /// Radius of the interior maximum of |u| (ties resolve to the smallest).
    pub peak_radius: f64,
}

/// Ordered accepted states plus the termination verdict.
#[derive(Debug, Clone)]
pub struct ContinuationTrace {
    pub states: Vec<HomotopyState>,
    pub verdict: Verdict,
    pub rejected_steps: usize,
}

impl ContinuationTrace {
    pub fn last(&self) -> &HomotopyState {
        self.states
            .last()
            .expect("trace always holds the t=0 state")
    }

    /// Accepted continuation steps (excludes the initial state).
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn total_newton_iterations(&self) -> usize {
        self.states.iter().map(|s| s.newton_iters).sum()
    }
}

fn diagnose(
    p: &ProblemData,
    t: f64,
    u: RadialField,
    step: f64,
    report: &NewtonReport,
) -> Result<HomotopyState> {
    let grid = p.grid();
    let phi = &p.eig().phi1;
    let phi1_coeff = inner(grid, &u, phi)?;
    let mut omega = u.clone();
    omega.add_scaled(-phi1_coeff, phi);
    let omega_norm = disk_norm(grid, &omega)?;

    let exp_u = RadialField::from_values(u.values().iter().map(|&v| libm::exp(v)).collect());
    let exp_mass = t * inner(grid, &exp_u, phi)?;
    let identity_residual = solvability_residual(p, t, &u)?;

    let m = p.laplacian().order();
    let mut peak = 0usize;
    let mut peak_val = 0.0;
    for (i, &v) in u.values().iter().enumerate().take(m) {
        if libm::fabs(v) > peak_val {
            peak_val = libm::fabs(v);
            peak = i;
        }
    }

    Ok(HomotopyState {
        t,
        sup_norm: u.sup_norm(),
        peak_radius: grid.node(peak),
        u,
        step,
        newton_iters: report.iterations,
        residual_norm: report.final_residual_norm,
        phi1_coeff,
        omega_norm,
        exp_mass,
        identity_residual,
    })
}

/// Follow the homotopy from the exact root (t=0, u=0) toward t=1.
///
/// Prediction is secant extrapolation from the last two accepted states
/// (constant for the first step); correction is damped Newton. Accepted
/// steps grow by `growth` up to `max_step`; failed corrections shrink the
/// step by `shrink` until `min_step`, which ends the run as step collapse.
/// A converged state above the sup-norm cap, or an exponential overflow at
/// a predicted point, ends it as blow-up.
///
/// Requires m(f) > 0; zero or negative forcing mass makes the target
/// equation unsolvable (pairing with φ₁ forces ∫eᵘφ₁ = -∫fφ₁ > 0) and is
/// refused before the first step.
pub fn run_continuation(p: &ProblemData, cfg: &ContinuationConfig) -> Result<ContinuationTrace> {
    cfg.validate()?;
    if p.forcing_mass() <= 0.0 {
        return Err(Error::Config(format!(
            "forcing mass {} is not positive: the target equation requires \
             -∫ f φ₁ > 0 (pairing the equation with φ₁ forces ∫ eᵘ φ₁ = -∫ f φ₁)",
            p.forcing_mass()
        )));
    }

    let zero_report = NewtonReport {
        converged: true,
        iterations: 0,
        final_residual_norm: 0.0,
        step_norms: vec![],
        failure: None,
    };
    let initial = diagnose(p, 0.0, RadialField::zeros_on(p.grid()), 0.0, &zero_report)?;
    let mut states = vec![initial];
    let mut step = cfg.initial_step;
    let mut rejected = 0usize;

    loop {
        let t_prev = states.last().expect("nonempty").t;
        let remaining = 1.0 - t_prev;
        let dt = if remaining <= step { remaining } else { step };
        let t_next = if remaining <= step {
            1.0
        } else {
            t_prev + step
        };

        let prediction = predict(&states, t_next);
        match newton_solve(p, t_next, &prediction, cfg.newton_tol) {
            Err(Error::Overflow { .. }) => {
                return Ok(ContinuationTrace {
                    states,
                    verdict: Verdict::BlowUp,
                    rejected_steps: rejected,
                });
            }
            Err(e) => return Err(e),
            Ok((u, report)) => {
                if report.converged && u.sup_norm() <= cfg.blowup_cap {
                    states.push(diagnose(p, t_next, u, dt, &report)?);
                    if t_next >= 1.0 {
                        return Ok(ContinuationTrace {
                            states,
                            verdict: Verdict::ReachedT1,
                            rejected_steps: rejected,
                        });
                    }
                    step = (step * cfg.growth).min(cfg.max_step);
                } else if report.converged {
                    return Ok(ContinuationTrace {
                        states,
                        verdict: Verdict::BlowUp,
                        rejected_steps: rejected,
                    });
                } else {
                    rejected += 1;
                    step *= cfg.shrink;
                    if step < cfg.min_step {
                        return Ok(ContinuationTrace {
                            states,
                            verdict: Verdict::StepCollapse,
                            rejected_steps: rejected,
                        });
                    }
                }
            }
        }
    }
}

fn predict(states: &[HomotopyState], t_next: f64) -> RadialField {
    let last = states.last().expect("nonempty");
    if states.len() < 2 {
        return last.u.clone();
    }
    let prev = &states[states.len() - 2];
    let span = last.t - prev.t;
    if span <= 0.0 {
        return last.u.clone();
    }
    let ratio = (t_next - last.t) / span;
    let mut pred = last.u.clone();
    let mut slope = last.u.clone();
    slope.add_scaled(-1.0, &prev.u);
    pred.add_scaled(ratio, &slope);
    pred
}

/// One row of a threshold scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub mass: f64,
    pub verdict: Option<Verdict>,
    pub sup_norm: f64,
    pub exp_mass: f64,
    pub peak_radius: f64,
    pub steps: usize,
    /// Set when the row failed before (or instead of) producing a verdict.
    pub error: Option<Error>,
}

/// Run one continuation per mass value, rescaling the base forcing so that
/// m(f) hits each target exactly. Rows are independent; a failure in one is
/// recorded in that row and the scan moves on.
pub fn scan_threshold(
    base: &ForcingSpec,
    masses: &[f64],
    laplacian: &RadialLaplacian,
    eig: &EigenPair,
    epsilon_g: f64,
    cfg: &ContinuationConfig,
) -> Vec<ScanRow> {
    masses
        .iter()
        .map(|&mu| {
            let spec = base.clone().with_target_mass(mu);
            let outcome = build_forcing(&spec, eig, laplacian.grid())
                .and_then(|f| ProblemData::new(laplacian.clone(), eig.clone(), f, epsilon_g))
                .and_then(|p| run_continuation(&p, cfg));
            match outcome {
                Ok(trace) => {
                    let last = trace.last();
                    ScanRow {
                        mass: mu,
                        verdict: Some(trace.verdict),
                        sup_norm: last.sup_norm,
                        exp_mass: last.exp_mass,
                        peak_radius: last.peak_radius,
                        steps: trace.steps(),
                        error: None,
                    }
                }
                Err(e) => ScanRow {
                    mass: mu,
                    verdict: None,
                    sup_norm: 0.0,
                    exp_mass: 0.0,
                    peak_radius: 0.0,
                    steps: 0,
                    error: Some(e),
                },
            }
        })
        .collect()
}
