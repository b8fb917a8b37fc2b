//! Numerical verification of hidden linearity in two-dimensional
//! superintegrable Hamiltonian systems.
//!
//! The crate carries a catalog of nineteen Hamiltonians on non-Euclidean
//! 2D spaces (two Perlick families, Taub-NUT, and the seventeen systems on
//! the four Darboux spaces), integrates their Hamilton equations, rebuilds
//! each paper-style reduction to a low-order ODE numerically, applies the
//! explicit linearizing transformations, and certifies every claimed
//! identity: linear-target residuals, conservation laws, point-symmetry
//! generators, algebra closure, and closed-form solutions.

pub mod integrate;
pub mod jet;
pub mod presets;
pub mod reduce;
pub mod systems;

pub use jet::{fd_check, Jet, JetError, Real};
