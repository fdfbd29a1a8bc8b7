use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{derivative_values, DiagonalLinearOperator, Grid, WavenumberGrid};

/// Coefficients `a_j` of `sum_j a_j (1 . nabla^j) u`; `a_0` is a plain reaction/drag term.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IsotropicLinearCoefficients(pub Vec<f64>);

impl IsotropicLinearCoefficients {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self(coefficients)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Linear terms whose derivatives couple the spatial axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SpatialMixSpec {
    /// `-(c . nabla) u`
    UnbalancedAdvection { velocity: Vec<f64> },
    /// `sum_d nu_d d^2u/dx_d^2`
    DiagonalDiffusion { diffusivity: Vec<f64> },
    /// `nabla . (A nabla u)`
    AnisotropicDiffusion { matrix: Vec<Vec<f64>> },
    /// `xi (1 . nabla)(nabla . nabla u)`
    MixedDispersion { dispersivity: f64 },
    /// `zeta (nabla . nabla)(nabla . nabla u)`
    MixedHyperDiffusion { hyper_diffusivity: f64 },
}

/// Diagonal of `sum_j a_j sum_axes (i kappa_axis)^j`, `a_0` counted once.
pub fn build_isotropic_linear(coefficients: &[f64], grid: Grid) -> DiagonalLinearOperator {
    let wavenumbers = WavenumberGrid::new(grid);
    let mut values = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
    for (j, &a) in coefficients.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        if j == 0 {
            values.iter_mut().for_each(|v| *v += a);
            continue;
        }
        for axis in 0..grid.num_dims() {
            let d = derivative_values(&wavenumbers, j as u32, axis);
            for (v, dv) in values.iter_mut().zip(&d) {
                *v += a * dv;
            }
        }
    }
    DiagonalLinearOperator::shared(grid, values).expect("length matches grid")
}

fn check_vector(name: &str, v: &[f64], grid: &Grid) -> Result<()> {
    if v.len() != grid.num_dims() {
        return Err(Error::InvalidArgument(format!(
            "{name} needs {} entries for a {}-d grid, got {}",
            grid.num_dims(),
            grid.num_dims(),
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} has non-finite entries")));
    }
    Ok(())
}

/// Diagonal of one of the spatially mixing linear terms.
pub fn build_spatially_mixed_linear(spec: &SpatialMixSpec, grid: Grid) -> Result<DiagonalLinearOperator> {
    let wavenumbers = WavenumberGrid::new(grid);
    let dims = grid.num_dims();
    let first: Vec<Vec<Complex64>> = (0..dims).map(|a| derivative_values(&wavenumbers, 1, a)).collect();
    let second: Vec<Vec<Complex64>> = (0..dims).map(|a| derivative_values(&wavenumbers, 2, a)).collect();
    let laplace: Vec<Complex64> = (0..grid.spectral_len())
        .map(|i| second.iter().map(|s| s[i]).sum())
        .collect();

    let values: Vec<Complex64> = match spec {
        SpatialMixSpec::UnbalancedAdvection { velocity } => {
            check_vector("velocity", velocity, &grid)?;
            (0..grid.spectral_len())
                .map(|i| -(0..dims).map(|d| velocity[d] * first[d][i]).sum::<Complex64>())
                .collect()
        }
        SpatialMixSpec::DiagonalDiffusion { diffusivity } => {
            check_vector("diffusivity", diffusivity, &grid)?;
            if diffusivity.iter().any(|&v| v < 0.0) {
                return Err(Error::InvalidArgument("diffusivities must be nonnegative".into()));
            }
            (0..grid.spectral_len())
                .map(|i| (0..dims).map(|d| diffusivity[d] * second[d][i]).sum())
                .collect()
        }
        SpatialMixSpec::AnisotropicDiffusion { matrix } => {
            check_matrix(matrix, dims)?;
            (0..grid.spectral_len())
                .map(|i| {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for d in 0..dims {
                        for e in 0..dims {
                            sum += matrix[d][e]
                                * if d == e {
                                    second[d][i]
                                } else {
                                    first[d][i] * first[e][i]
                                };
                        }
                    }
                    sum
                })
                .collect()
        }
        SpatialMixSpec::MixedDispersion { dispersivity } => (0..grid.spectral_len())
            .map(|i| *dispersivity * first.iter().map(|f| f[i]).sum::<Complex64>() * laplace[i])
            .collect(),
        SpatialMixSpec::MixedHyperDiffusion { hyper_diffusivity } => laplace
            .iter()
            .map(|l| *hyper_diffusivity * l * l)
            .collect(),
    };
    DiagonalLinearOperator::shared(grid, values)
}

fn check_matrix(matrix: &[Vec<f64>], dims: usize) -> Result<()> {
    if matrix.len() != dims || matrix.iter().any(|row| row.len() != dims) {
        return Err(Error::InvalidArgument(format!("anisotropy matrix must be {dims}x{dims}")));
    }
    let m = nalgebra::DMatrix::from_fn(dims, dims, |r, c| matrix[r][c]);
    if (&m - m.transpose()).abs().max() > 1e-14 * m.abs().max().max(1.0) {
        return Err(Error::InvalidArgument("anisotropy matrix must be symmetric".into()));
    }
    let eigen = nalgebra::SymmetricEigen::new(m.clone());
    if eigen.eigenvalues.iter().any(|&l| l < -1e-14 * m.abs().max().max(1.0)) {
        return Err(Error::InvalidArgument(
            "anisotropy matrix must be positive semi-definite".into(),
        ));
    }
    Ok(())
}
