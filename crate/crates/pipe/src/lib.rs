//! Small perturbations of a shear flow `(U(x2, x3), 0, 0)` in the square
//! pipe `(-1, 1)^3` with inflow through `x1 = -1` and outflow through
//! `x1 = 1`, solved in vorticity form.
//!
//! The pieces are a compatibility checker for the data, characteristic
//! tracing and mild transport with a small non-characteristic regularization
//! on the lateral walls, a div–curl solver built on reflection parities, and
//! the coupled iteration that alternates between velocity and vorticity.

pub mod boundary;
pub mod compat;
pub mod divcurl;
pub mod error;
pub mod euler;
pub mod grid;
pub mod poisson;
pub mod presets;
pub mod profile;
pub mod slab;
pub mod trace;
pub mod transport;
pub mod vorticity;

pub use error::{PipeError, Result};
