//! Nested linearization for `dt V + A(U_bar + V) dx V = 0` on `[-1, 1]`.

mod presets;
mod shock;
mod slab;
mod solver;

pub use presets::{burgers_small, linear2_small, psystem_small, smooth_bump, Preset};
pub use shock::{periodic_gradient_series, periodic_shock_time, shock_contrast, ShockContrastReport};
pub use slab::{bump_weights, cubic_weights, mollify, Slab};
pub use solver::{
    apply, apply_jacobian, coefficients, data_norm, good_unknown, inner_solve, outer_solve, Coefficients,
    InnerDiagnostics, LevelDiagnostics, SystemConfig, SystemProblem, SystemReport, SystemSolution, VectorFn,
};
