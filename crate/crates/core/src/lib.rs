//! Isoperimetric, concentration and functional-inequality profiles of the
//! curvature-dimension condition CD(ρ,N), including generalized dimensions
//! N < 1, in one dimension.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: extended reals, quadrature, root finding, minimization.
//! - [`model_density`]: the Jacobian functions `J_{H,ρ,N}` and the named
//!   model families.
//! - [`profile1d`]: normalized one-dimensional measures, flat profiles and
//!   brute-force grid oracles.
//! - [`cdd_profiles`]: the Gromov–Lévy and flat CDD profiles.
//! - [`functionals`]: Cheeger, concentration, Sobolev/Nash and Poincaré
//!   constants.
//! - [`comparison`]: Jac-CD checks and Sturm comparison on sampled Jacobians.
//! - [`cli`]: the `cddprof` command-line front end.

pub mod numerics;
pub mod model_density;
pub mod profile1d;
pub mod cdd_profiles;
pub mod functionals;
pub mod comparison;
pub mod cli;
