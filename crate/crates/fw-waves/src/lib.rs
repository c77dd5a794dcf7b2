//! Discontinuous traveling waves of the Fornberg-Whitham equation
//!
//!   u_t + u u_x + K′∗u = 0,    K(x) = e^{−|x|}/2,
//!
//! built by shooting in the planar system satisfied by (U, V) = (W∘h, W′∘h),
//! patching the two saddle orbits through the reflection condition
//! U₁(b₁) + U₂(b₂) = 2c, V₁(b₁) + V₂(b₂) = 0, transforming back to the wave
//! coordinate ξ, and verifying the result against the weak-solution conditions
//! and against direct time evolution of the nonlocal PDE.
//!
//! Module layout mirrors the pipeline: [`kernel`] (convolutions with exact
//! exponential tails), [`phase_plane`] (parameters, field, saddles, first
//! integral), [`ode`] (embedded Runge-Kutta with dense output), [`shooting`]
//! (the orbits P and Q), [`matcher`] (the patch point), [`profile`] (ξ-space
//! reconstruction and reference profiles), [`verifier`] (residual reports),
//! [`pde`] (finite-volume evolution), [`cli`] (command-line driver).

pub mod cli;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod matcher;
pub mod ode;
pub mod pde;
pub mod phase_plane;
pub mod profile;
pub mod shooting;
pub mod verifier;

pub use error::{Error, Result};
