//! Grids, real FFTs, wavenumbers, derivative diagonals and dealiasing.

mod dealias;
mod field;
mod grid;
mod operator;
mod transform;
mod wavenumbers;

pub use dealias::{dealias_mask, DealiasMask};
pub use field::{SpatialField, SpectralField};
pub use grid::Grid;
pub(crate) use operator::derivative_values;
pub use operator::{derivative_diagonal, DiagonalLinearOperator};
pub use transform::{forward_transform, inverse_transform, SpectralTransform};
pub use wavenumbers::{build_wavenumber_grid, signed_wavenumber, WavenumberGrid};
