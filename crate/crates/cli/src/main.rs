//! Command-line front end for the radial resonance solver: subcommand
//! dispatch, config resolution (defaults < config file < flags) and exit
//! codes.
//!
//! Exit codes: 0 ok, 2 config, 3 numerical failure, 4 falsified property,
//! 5 blow-up, 6 step collapse, 7 scan acceptance failure.

// Validations use `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod csvio;

use config::{FamilyChoice, RunConfig};

#[derive(Parser)]
#[command(
    name = "resbratu",
    about = "Homotopy-continuation solver for the resonant exponential problem on the unit disk",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Number of interior grid nodes (>= 8)
    #[arg(long)]
    n: Option<usize>,
    /// Config file with key = value lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV files
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the probe's random starts
    #[arg(long)]
    seed: Option<u64>,
    /// Scaling of the comparison nonlinearity (must not exceed the radial gap)
    #[arg(long = "epsilon-g")]
    epsilon_g: Option<f64>,
}

#[derive(Args)]
struct ForcingArgs {
    /// Forcing family: eigenfunction | gaussian-bump | polynomial | from-file
    #[arg(long)]
    family: Option<String>,
    /// Forcing amplitude (eigenfunction and gaussian-bump families)
    #[arg(long, allow_negative_numbers = true)]
    amplitude: Option<f64>,
    /// Rescale the forcing so its mass hits this value exactly
    #[arg(long, allow_negative_numbers = true)]
    mass: Option<f64>,
    /// Gaussian bump center
    #[arg(long, allow_negative_numbers = true)]
    center: Option<f64>,
    /// Gaussian bump width
    #[arg(long)]
    width: Option<f64>,
    /// Polynomial coefficients, comma separated (constant term first)
    #[arg(long)]
    coeffs: Option<String>,
    /// Radial profile CSV (r,value) matching the grid nodes
    #[arg(long = "profile-file")]
    profile_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Discrete first eigenpair against the closed-form Bessel reference
    Eigen {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Comparison-equation uniqueness probe and degree sign
    Comparison {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of random Newton starts
        #[arg(long)]
        starts: Option<usize>,
    },
    /// Follow the homotopy from the comparison equation to the target
    Continue {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        forcing: ForcingArgs,
    },
    /// Sweep forcing masses across the 4π existence threshold
    Scan {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        forcing: ForcingArgs,
        /// Masses to scan, comma separated, positive and ascending
        #[arg(long)]
        masses: Option<String>,
        /// Sub-threshold margin for the exit-code check
        #[arg(long)]
        margin: Option<f64>,
    },
}

fn parse_list(s: &str, what: &str, issues: &mut Vec<String>) -> Option<Vec<f64>> {
    let parsed: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match parsed {
        Ok(v) => Some(v),
        Err(_) => {
            issues.push(format!("cannot parse {what} list '{s}'"));
            None
        }
    }
}

fn apply_common(cfg: &mut RunConfig, common: &CommonArgs, issues: &mut Vec<String>) {
    if let Some(path) = &common.config {
        cfg.apply_file(path, issues);
    }
    if let Some(n) = common.n {
        cfg.n = n;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(eps) = common.epsilon_g {
        cfg.epsilon_g = eps;
    }
}

fn apply_forcing(cfg: &mut RunConfig, forcing: &ForcingArgs, issues: &mut Vec<String>) {
    if let Some(family) = &forcing.family {
        match family.as_str() {
            "eigenfunction" => cfg.forcing.family = FamilyChoice::Eigenfunction,
            "gaussian-bump" => cfg.forcing.family = FamilyChoice::GaussianBump,
            "polynomial" => cfg.forcing.family = FamilyChoice::Polynomial,
            "from-file" => cfg.forcing.family = FamilyChoice::FromFile,
            other => issues.push(format!("unknown forcing family '{other}'")),
        }
    }
    if let Some(a) = forcing.amplitude {
        cfg.forcing.amplitude = a;
    }
    if let Some(m) = forcing.mass {
        cfg.forcing.target_mass = Some(m);
    }
    if let Some(c) = forcing.center {
        cfg.forcing.center = c;
    }
    if let Some(w) = forcing.width {
        cfg.forcing.width = w;
    }
    if let Some(coeffs) = &forcing.coeffs {
        if let Some(v) = parse_list(coeffs, "coefficient", issues) {
            cfg.forcing.coeffs = v;
        }
    }
    if let Some(path) = &forcing.profile_file {
        cfg.forcing.file = Some(path.clone());
    }
}

fn reject(issues: Vec<String>) -> i32 {
    eprintln!("configuration rejected:");
    for issue in &issues {
        eprintln!("  - {issue}");
    }
    commands::EXIT_CONFIG
}

fn run(cli: Cli) -> i32 {
    let mut cfg = RunConfig::default();
    let mut issues = Vec::new();
    match &cli.command {
        Command::Eigen { common } => {
            apply_common(&mut cfg, common, &mut issues);
            cfg.validate(&mut issues);
            if !issues.is_empty() {
                return reject(issues);
            }
            commands::cmd_eigen(&cfg)
        }
        Command::Comparison { common, starts } => {
            apply_common(&mut cfg, common, &mut issues);
            if let Some(k) = starts {
                cfg.probe_starts = *k;
            }
            cfg.validate(&mut issues);
            if !issues.is_empty() {
                return reject(issues);
            }
            commands::cmd_comparison(&cfg)
        }
        Command::Continue { common, forcing } => {
            apply_common(&mut cfg, common, &mut issues);
            apply_forcing(&mut cfg, forcing, &mut issues);
            cfg.validate(&mut issues);
            if !issues.is_empty() {
                return reject(issues);
            }
            commands::cmd_continue(&cfg)
        }
        Command::Scan {
            common,
            forcing,
            masses,
            margin,
        } => {
            apply_common(&mut cfg, common, &mut issues);
            apply_forcing(&mut cfg, forcing, &mut issues);
            if let Some(list) = masses {
                if let Some(v) = parse_list(list, "mass", &mut issues) {
                    cfg.scan_masses = v;
                }
            }
            if let Some(m) = margin {
                cfg.scan_margin = *m;
            }
            cfg.validate(&mut issues);
            cfg.validate_scan(&mut issues);
            if !issues.is_empty() {
                return reject(issues);
            }
            commands::cmd_scan(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let code = run(Cli::parse());
    ExitCode::from(code as u8)
}
