//! One-dimensional building blocks for quasilinear hyperbolic systems posed
//! on `[-1, 1]` with inflow boundary data.
//!
//! The crate is layered bottom-up:
//!
//! * [`systems`] holds the flux catalog and the eigen-decomposition of the
//!   flux Jacobian.
//! * [`characteristics`] traces characteristic curves of a scalar speed and
//!   classifies where they enter the domain.
//! * [`transport`] evaluates the mild solution of a forced scalar transport
//!   problem and checks the weighted sup-norm estimate.
//! * [`quasilinear`] runs the nested linearization for the full system.
//!
//! [`ode`] and [`field`] are shared numerical utilities.

pub mod characteristics;
pub mod error;
pub mod field;
pub mod ode;
pub mod quasilinear;
pub mod systems;
pub mod transport;

pub use error::{Error, Result};
