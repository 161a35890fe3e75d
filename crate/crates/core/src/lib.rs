//! Harmonic analysis and semilinear heat flows on the noncommutative torus.
//!
//! Elements are truncated Fourier series `a = sum_m c_m U^m` over `Z^n` with
//! the twisted product `U^r U^s = omega_theta(r, s) U^{r+s}`. On top of that
//! algebra the crate provides canonical derivations and Sobolev norms, the heat
//! semigroup and its mixed multipliers with exact `L^2` operator norms,
//! classical heat-kernel `L^1` bounds, the Sobolev algebra and polynomial
//! nonlinearities, and a mild-solution solver for `u' + L u = P(u)`.

pub mod calculus;
mod dense;
pub mod element;
pub mod error;
pub mod experiments;
pub mod heat;
pub mod kernel;
pub mod lattice;
pub mod nonlinear;
mod quadrature;
pub mod solver;
pub mod stats;

pub use element::{NCElement, ProductPolicy};
pub use error::{Error, Result};
pub use lattice::{cocycle, LatticeBox, Mode, MultiIndex, ThetaMatrix};
