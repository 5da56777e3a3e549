//! The four subcommands: eigen, comparison, continue, scan.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resbratu_core::continuation::{run_continuation, scan_threshold, Verdict};
use resbratu_core::eigen::{first_eigenpair, morse_index, radial_gap, EigenPair};
use resbratu_core::forcing::{build_forcing, MASS_CEILING};
use resbratu_core::grid::{make_grid, RadialField, RadialGrid};
use resbratu_core::nonlinear::{newton_solve, probe_start, ProblemData};
use resbratu_core::operator::{assemble_laplacian, RadialLaplacian};
use resbratu_core::Error as CoreError;

use crate::config::RunConfig;
use crate::csvio::{sig17, write_profile, write_scan, write_trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_FALSIFIED: i32 = 4;
pub const EXIT_BLOWUP: i32 = 5;
pub const EXIT_STEP_COLLAPSE: i32 = 6;
pub const EXIT_SCAN_FAILURE: i32 = 7;

fn exit_for(err: &CoreError) -> i32 {
    match err {
        CoreError::Config(_)
        | CoreError::Shape { .. }
        | CoreError::Domain(_)
        | CoreError::UnscalableForcing => EXIT_CONFIG,
        CoreError::NumericalFailure(_)
        | CoreError::SingularSystem { .. }
        | CoreError::DegenerateLinearization { .. } => EXIT_NUMERICAL,
        CoreError::Overflow { .. } => EXIT_BLOWUP,
    }
}

fn fail(err: &CoreError) -> i32 {
    eprintln!("error: {err}");
    exit_for(err)
}

struct Setup {
    grid: RadialGrid,
    laplacian: RadialLaplacian,
    eig: EigenPair,
}

fn setup(cfg: &RunConfig) -> Result<Setup, i32> {
    let grid = make_grid(cfg.n).map_err(|e| fail(&e))?;
    let laplacian = assemble_laplacian(&grid);
    let eig = first_eigenpair(&laplacian).map_err(|e| fail(&e))?;
    Ok(Setup {
        grid,
        laplacian,
        eig,
    })
}

fn ensure_out_dir(dir: &Path) -> Result<(), i32> {
    fs::create_dir_all(dir).map_err(|e| {
        eprintln!(
            "error: cannot create output directory {}: {e}",
            dir.display()
        );
        EXIT_CONFIG
    })
}

fn write_or_fail(what: &str, res: std::io::Result<()>) -> Result<(), i32> {
    res.map_err(|e| {
        eprintln!("error: cannot write {what}: {e}");
        EXIT_CONFIG
    })
}

/// Print the discrete eigenpair against the closed-form reference and dump
/// the φ₁ profile. Exit 0 iff the relative eigenvalue error is within 1e-3.
pub fn cmd_eigen(cfg: &RunConfig) -> i32 {
    let s = match setup(cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let gap = match radial_gap(&s.laplacian) {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };
    let rel_error = (s.eig.lambda1 - s.eig.lambda1_ref).abs() / s.eig.lambda1_ref;

    println!("n = {}", cfg.n);
    println!("lambda1 = {}", sig17(s.eig.lambda1));
    println!("lambda1_ref = {}", sig17(s.eig.lambda1_ref));
    println!("relative_error = {}", sig17(rel_error));
    println!("radial_gap = {}", sig17(gap));
    println!("phi1_deriv_boundary = {}", sig17(s.eig.phi1_deriv_boundary));

    if ensure_out_dir(&cfg.out_dir).is_err() {
        return EXIT_CONFIG;
    }
    let path = cfg.out_dir.join("phi1.csv");
    if let Err(code) = write_or_fail("phi1 profile", write_profile(&path, &s.grid, &s.eig.phi1)) {
        return code;
    }
    println!("phi1_csv = {}", path.display());

    if rel_error <= 1e-3 {
        EXIT_OK
    } else {
        eprintln!("error: eigenvalue relative error {rel_error:e} exceeds 1e-3");
        EXIT_FALSIFIED
    }
}

/// Uniqueness probe for the comparison equation plus the Morse index (and
/// degree sign) of its linearization at zero.
pub fn cmd_comparison(cfg: &RunConfig) -> i32 {
    let s = match setup(cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let spec = match cfg.forcing_spec(&s.grid) {
        Ok(sp) => sp,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let f = match build_forcing(&spec, &s.eig, &s.grid) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let p = match ProblemData::new(s.laplacian.clone(), s.eig.clone(), f, cfg.epsilon_g) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };

    // Linearization of the comparison equation at 0: A - (λ₁ + ε)·I.
    let potential = RadialField::from_fn(&s.grid, |_| s.eig.lambda1 + cfg.epsilon_g);
    let index = match morse_index(&s.laplacian, &potential) {
        Ok(i) => i,
        Err(e) => return fail(&e),
    };
    let degree: i32 = if index % 2 == 0 { 1 } else { -1 };

    println!("n = {}", cfg.n);
    println!("epsilon_g = {}", sig17(cfg.epsilon_g));
    println!("seed = {}", cfg.seed);
    println!("morse_index = {index}");
    println!("degree = {degree}");

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tol = cfg.continuation.newton_tol;
    let mut zero_roots = 0usize;
    let mut nonzero_roots = 0usize;
    let mut nonconverged = 0usize;
    for k in 0..cfg.probe_starts {
        let coeffs: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let sup: f64 = rng.random_range(0.0..3.0);
        let u0 = probe_start(&s.grid, &coeffs, sup);
        match newton_solve(&p, 0.0, &u0, tol) {
            Err(_) => {
                nonconverged += 1;
                println!(
                    "start {k:02}: nonconverged (overflow), start_sup = {}",
                    sig17(sup)
                );
            }
            Ok((u, rep)) if rep.converged => {
                let root_sup = u.sup_norm();
                if root_sup <= 1e-9 {
                    zero_roots += 1;
                    println!(
                        "start {k:02}: zero_root, start_sup = {}, root_sup = {}",
                        sig17(sup),
                        sig17(root_sup)
                    );
                } else {
                    nonzero_roots += 1;
                    println!(
                        "start {k:02}: NONZERO_ROOT, start_sup = {}, root_sup = {}",
                        sig17(sup),
                        sig17(root_sup)
                    );
                }
            }
            Ok((_, rep)) => {
                nonconverged += 1;
                println!(
                    "start {k:02}: nonconverged ({:?}), start_sup = {}",
                    rep.failure,
                    sig17(sup)
                );
            }
        }
    }
    println!(
        "probe_summary = {} starts, {zero_roots} zero roots, {nonconverged} nonconverged, {nonzero_roots} nonzero roots",
        cfg.probe_starts
    );

    if nonzero_roots > 0 {
        eprintln!("error: probe found a nonzero root of the comparison equation");
        return EXIT_FALSIFIED;
    }
    if index != 1 {
        eprintln!("error: morse index {index} != 1, degree sign check falsified");
        return EXIT_FALSIFIED;
    }
    EXIT_OK
}

/// Follow the homotopy to t = 1 and write the trace and final profile.
pub fn cmd_continue(cfg: &RunConfig) -> i32 {
    let s = match setup(cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let spec = match cfg.forcing_spec(&s.grid) {
        Ok(sp) => sp,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let f = match build_forcing(&spec, &s.eig, &s.grid) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let p = match ProblemData::new(s.laplacian.clone(), s.eig.clone(), f, cfg.epsilon_g) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };

    println!("n = {}", cfg.n);
    println!("forcing_mass = {}", sig17(p.forcing_mass()));
    println!("mass_ceiling = {}", sig17(MASS_CEILING));
    if p.forcing_mass() >= MASS_CEILING {
        println!(
            "warning: forcing mass is at or above 4*pi; existence is not guaranteed, running anyway"
        );
    }

    let trace = match run_continuation(&p, &cfg.continuation) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    let last = trace.last();
    let trivial = last.sup_norm <= 1e-9;

    println!("verdict = {}", trace.verdict);
    println!("steps = {}", trace.steps());
    println!("rejected_steps = {}", trace.rejected_steps);
    println!("final_t = {}", sig17(last.t));
    println!("final_sup_norm = {}", sig17(last.sup_norm));
    println!("final_exp_mass = {}", sig17(last.exp_mass));
    println!(
        "final_identity_residual = {}",
        sig17(last.identity_residual)
    );
    println!("trivial = {trivial}");

    if ensure_out_dir(&cfg.out_dir).is_err() {
        return EXIT_CONFIG;
    }
    let trace_path = cfg.out_dir.join("trace.csv");
    let solution_path = cfg.out_dir.join("solution.csv");
    if let Err(code) = write_or_fail("trace", write_trace(&trace_path, &trace)) {
        return code;
    }
    if let Err(code) = write_or_fail(
        "solution profile",
        write_profile(&solution_path, &s.grid, &last.u),
    ) {
        return code;
    }
    println!("trace_csv = {}", trace_path.display());
    println!("solution_csv = {}", solution_path.display());

    match trace.verdict {
        Verdict::ReachedT1 => EXIT_OK,
        Verdict::BlowUp => EXIT_BLOWUP,
        Verdict::StepCollapse => EXIT_STEP_COLLAPSE,
    }
}

/// Sweep forcing masses; exit 0 iff every mass below 4π - margin reaches
/// t = 1 (rows above the cutoff are observational).
pub fn cmd_scan(cfg: &RunConfig) -> i32 {
    let s = match setup(cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let base = match cfg.forcing_spec(&s.grid) {
        Ok(sp) => sp,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };

    println!("n = {}", cfg.n);
    println!("mass_ceiling = {}", sig17(MASS_CEILING));
    println!("margin = {}", sig17(cfg.scan_margin));

    let rows = scan_threshold(
        &base,
        &cfg.scan_masses,
        &s.laplacian,
        &s.eig,
        cfg.epsilon_g,
        &cfg.continuation,
    );
    for row in &rows {
        let verdict = row.verdict.map(|v| v.as_str()).unwrap_or("rejected");
        match &row.error {
            None => println!(
                "mass {} -> {verdict}, sup_norm = {}, exp_mass = {}, peak_radius = {}, steps = {}",
                sig17(row.mass),
                sig17(row.sup_norm),
                sig17(row.exp_mass),
                sig17(row.peak_radius),
                row.steps
            ),
            Some(e) => println!("mass {} -> rejected: {e}", sig17(row.mass)),
        }
    }

    if ensure_out_dir(&cfg.out_dir).is_err() {
        return EXIT_CONFIG;
    }
    let path = cfg.out_dir.join("scan.csv");
    if let Err(code) = write_or_fail("scan table", write_scan(&path, &rows)) {
        return code;
    }
    println!("scan_csv = {}", path.display());

    let cutoff = MASS_CEILING - cfg.scan_margin;
    let guaranteed_ok = rows
        .iter()
        .filter(|row| row.mass < cutoff)
        .all(|row| row.verdict == Some(Verdict::ReachedT1));
    if guaranteed_ok {
        EXIT_OK
    } else {
        eprintln!("error: a mass below {cutoff} (= 4*pi - margin) failed to reach t = 1");
        EXIT_SCAN_FAILURE
    }
}
