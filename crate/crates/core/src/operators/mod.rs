//! Linear diagonals and pseudo-spectral nonlinear terms.

mod linear;
mod nonlinear;

pub use linear::{build_isotropic_linear, build_spatially_mixed_linear, IsotropicLinearCoefficients, SpatialMixSpec};
pub use nonlinear::{build_nonlinear, inverse_laplacian, NonlinearSpec, PseudoSpectralNonlinear};
