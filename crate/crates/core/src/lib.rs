//! Radial solver core for the resonance problem `-Δu = λ₁u + eᵘ + f` on the
//! unit disk with homogeneous Dirichlet data.
//!
//! The crate follows one homotopy in the parameter `t`,
//!
//! ```text
//! -Δu_t = λ₁u_t + t(e^{u_t} + f) + (1-t)g(u_t),      u_t = 0 on r = 1,
//! ```
//!
//! from a comparison equation at `t = 0` (truncated-sine nonlinearity `g`,
//! whose only solution is 0) to the target equation at `t = 1`, solving a
//! second-order radial finite-volume discretization at every step and
//! monitoring the quantities that control the branch: the forcing mass
//! `-∫ f φ₁`, the exponential mass `t ∫ eᵘ φ₁` against the 4π ceiling, the
//! eigen-decomposition `u = Tφ₁ + ω`, and the radius of the peak of `|u|`.
//!
//! Everything here is `no_std` + `alloc`; IO, CSV formats and the command
//! line live in the companion crate.

#![cfg_attr(not(test), no_std)]
// Validations use `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod continuation;
pub mod eigen;
pub mod error;
pub mod forcing;
pub mod grid;
pub mod nonlinear;
pub mod operator;
pub mod specfun;

pub use error::{Error, Result};
