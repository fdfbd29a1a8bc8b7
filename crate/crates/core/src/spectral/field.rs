use rustfft::num_complex::Complex64;

use super::Grid;
use crate::error::{Error, Result};

/// Real-valued multi-channel state on a [`Grid`], stored C-order as
/// `(channels, N, [N, [N]])`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialField {
    grid: Grid,
    channels: usize,
    data: Vec<f64>,
}

impl SpatialField {
    pub fn zeros(grid: Grid, channels: usize) -> Self {
        assert!(channels >= 1, "a field needs at least one channel");
        Self {
            grid,
            channels,
            data: vec![0.0; channels * grid.spatial_len()],
        }
    }

    pub fn from_vec(grid: Grid, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::ShapeMismatch("a field needs at least one channel".into()));
        }
        if data.len() != channels * grid.spatial_len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values for {channels} channel(s) on {:?}, got {}",
                channels * grid.spatial_len(),
                grid.spatial_shape(),
                data.len()
            )));
        }
        Ok(Self {
            grid,
            channels,
            data,
        })
    }

    /// Samples `f(channel, coordinates)` at every grid point.
    pub fn from_fn(grid: Grid, channels: usize, f: impl Fn(usize, &[f64]) -> f64) -> Self {
        let n = grid.spatial_len();
        let mut data = Vec::with_capacity(channels * n);
        for c in 0..channels {
            for i in 0..n {
                data.push(f(c, &grid.point(i)));
            }
        }
        Self {
            grid,
            channels,
            data,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.grid.spatial_len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.spatial_len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn same_shape(&self, other: &SpatialField) -> bool {
        self.grid == other.grid && self.channels == other.channels
    }

    pub fn check_same_shape(&self, other: &SpatialField) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "fields differ: {} channel(s) on {:?} vs {} channel(s) on {:?}",
                self.channels,
                self.grid,
                other.channels,
                other.grid
            )))
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            channels: self.channels,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Elementwise `self + other`.
    pub fn added(&self, other: &SpatialField) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            grid: self.grid,
            channels: self.channels,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &SpatialField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Complex coefficients in real-FFT half-spectrum layout
/// `(channels, N, [N,] N/2 + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    channels: usize,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, channels: usize) -> Self {
        assert!(channels >= 1, "a field needs at least one channel");
        Self {
            grid,
            channels,
            data: vec![Complex64::new(0.0, 0.0); channels * grid.spectral_len()],
        }
    }

    pub fn from_vec(grid: Grid, channels: usize, data: Vec<Complex64>) -> Result<Self> {
        if channels == 0 || data.len() != channels * grid.spectral_len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} spectral coefficients for {channels} channel(s) with spectral shape {:?}, got {}",
                channels * grid.spectral_len(),
                grid.spectral_shape(),
                data.len()
            )));
        }
        Ok(Self {
            grid,
            channels,
            data,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn channel(&self, c: usize) -> &[Complex64] {
        let n = self.grid.spectral_len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.spectral_len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}
