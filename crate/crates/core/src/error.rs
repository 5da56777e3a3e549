//! Error type shared by all solver modules.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong in the solver core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    Domain(&'static str),
    /// Invalid configuration value (grid size, step bounds, forcing spec, ...).
    Config(String),
    /// A field does not match the grid it is used with.
    Shape { expected: usize, got: usize },
    /// A shifted solve hit a near-zero pivot; the shift is (numerically) an
    /// eigenvalue of the operator.
    SingularSystem { shift: f64 },
    /// An iteration ran out of its budget without meeting its tolerance.
    NumericalFailure(&'static str),
    /// The linearized operator has an eigenvalue within tolerance of zero,
    /// so the Morse index (and the degree sign) is not well defined.
    DegenerateLinearization { eigenvalue: f64 },
    /// A mass rescaling was requested for a profile orthogonal to φ₁.
    UnscalableForcing,
    /// A nodal value exceeded the exponential overflow guard; the
    /// continuation driver reads this as blow-up.
    Overflow { node: usize, value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Shape { expected, got } => {
                write!(
                    f,
                    "shape error: field has {got} nodes, grid expects {expected}"
                )
            }
            Error::SingularSystem { shift } => {
                write!(
                    f,
                    "singular system: shift {shift:e} is an eigenvalue of the operator"
                )
            }
            Error::NumericalFailure(what) => write!(f, "numerical failure: {what}"),
            Error::DegenerateLinearization { eigenvalue } => write!(
                f,
                "degenerate linearization: eigenvalue {eigenvalue:e} within 1e-10 of zero"
            ),
            Error::UnscalableForcing => {
                write!(f, "unscalable forcing: profile has zero mass against φ₁")
            }
            Error::Overflow { node, value } => {
                write!(
                    f,
                    "overflow guard: u = {value:e} at node {node} exceeds exp range"
                )
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
