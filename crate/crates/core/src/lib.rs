//! Numerical laboratory for a reduced model of electron-positron pairs
//! coupled self-consistently to a homogeneous electric field.
//!
//! The crate covers four areas:
//! - [`dynamics`]: the five-variable state space, its vector field and the
//!   two conserved quantities;
//! - [`integrate`]: adaptive Runge-Kutta with dense output and a
//!   Casimir-preserving Strang splitting, plus event location;
//! - [`orbit`]: detection, refinement and certification of periodic
//!   (time-crystal) orbits;
//! - [`chaos`]: Poincare sections on P = 0 and largest Lyapunov exponents;
//! - [`quantum`]: the associated coupled eigenproblem solved by a
//!   bracketing shooting method.

pub mod chaos;
pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod orbit;
pub mod quantum;

pub use error::{Error, Result};
