//! Radial forcing terms and the forcing mass m(f) = -∫_B f φ₁.
//!
//! Pairing the equation with φ₁ forces ∫ eᵘ φ₁ = m(f), so solutions need
//! m(f) > 0, and below the 4π ceiling the solution branch stays bounded;
//! the scan driver probes exactly this window.

use alloc::vec::Vec;

use crate::eigen::EigenPair;
use crate::error::{Error, Result};
use crate::grid::{inner, RadialField, RadialGrid};

/// Mass level 4π above which the solver no longer guarantees a bounded
/// branch; runs beyond it are observational.
pub const MASS_CEILING: f64 = 4.0 * core::f64::consts::PI;

/// Shape family of a forcing profile.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingFamily {
    /// f = -a·φ₁, so m(f) = a exactly.
    Eigenfunction,
    /// f = -a·exp(-(r-center)²/width²).
    GaussianBump { center: f64, width: f64 },
    /// f = a·Σ cₖ rᵏ.
    Polynomial { coeffs: Vec<f64> },
    /// Nodal values supplied by the caller (the companion crate reads these
    /// from CSV); must match the grid node count.
    Profile { values: Vec<f64> },
}

/// A forcing request: family, amplitude, and an optional target mass that
/// rescales the amplitude so that m(f) hits it exactly.
///
/// The amplitude applies to the eigenfunction and gaussian families; the
/// polynomial and profile families carry their own scale and respond only
/// to `target_mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec {
    pub family: ForcingFamily,
    pub amplitude: f64,
    pub target_mass: Option<f64>,
}

impl ForcingSpec {
    pub fn eigenfunction(amplitude: f64) -> Self {
        Self {
            family: ForcingFamily::Eigenfunction,
            amplitude,
            target_mass: None,
        }
    }

    pub fn with_target_mass(mut self, mass: f64) -> Self {
        self.target_mass = Some(mass);
        self
    }
}

/// -∫_B f φ₁ in the discrete inner product.
pub fn mass(f: &RadialField, eig: &EigenPair, grid: &RadialGrid) -> Result<f64> {
    Ok(-inner(grid, f, &eig.phi1)?)
}

/// Build the nodal forcing field for a spec.
///
/// When `target_mass` is set the amplitude is replaced by the exact rescale;
/// a base profile orthogonal to φ₁ cannot be rescaled and is rejected.
pub fn build_forcing(
    spec: &ForcingSpec,
    eig: &EigenPair,
    grid: &RadialGrid,
) -> Result<RadialField> {
    let base = match &spec.family {
        ForcingFamily::Eigenfunction => eig.phi1.scaled(-1.0),
        ForcingFamily::GaussianBump { center, width } => {
            if !(*width > 0.0) {
                return Err(Error::Config(alloc::format!(
                    "gaussian bump width must be positive, got {width}"
                )));
            }
            let (c, w) = (*center, *width);
            RadialField::from_fn(grid, |r| -libm::exp(-((r - c) * (r - c)) / (w * w)))
        }
        ForcingFamily::Polynomial { coeffs } => {
            if coeffs.is_empty() {
                return Err(Error::Config(
                    "polynomial forcing needs coefficients".into(),
                ));
            }
            RadialField::from_fn(grid, |r| {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
            })
        }
        ForcingFamily::Profile { values } => {
            if values.len() != grid.len() {
                return Err(Error::Shape {
                    expected: grid.len(),
                    got: values.len(),
                });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(
                    "forcing profile contains non-finite values".into(),
                ));
            }
            RadialField::from_values(values.clone())
        }
    };

    let family_amplitude = match &spec.family {
        ForcingFamily::Eigenfunction | ForcingFamily::GaussianBump { .. } => spec.amplitude,
        ForcingFamily::Polynomial { .. } | ForcingFamily::Profile { .. } => 1.0,
    };
    let amplitude = match spec.target_mass {
        None => family_amplitude,
        Some(target) => {
            let base_mass = mass(&base, eig, grid)?;
            let floor = 1e-14 * crate::grid::disk_norm(grid, &base)?;
            if !base_mass.is_finite() || base_mass.abs() <= floor {
                return Err(Error::UnscalableForcing);
            }
            target / base_mass
        }
    };
    Ok(base.scaled(amplitude))
}
