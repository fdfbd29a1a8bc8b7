use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic Cartesian grid on `(0, L)^D` with `N` points per axis.
///
/// The left end of every interval is a degree of freedom, the right end is
/// excluded, so the spacing is `L / N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    num_dims: usize,
    num_points: usize,
    extent: f64,
}

impl Grid {
    pub fn new(num_dims: usize, num_points: usize, extent: f64) -> Result<Self> {
        if !(1..=3).contains(&num_dims) {
            return Err(Error::InvalidGrid(format!(
                "number of dimensions must be 1, 2 or 3, got {num_dims}"
            )));
        }
        if num_points < 4 || num_points % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "number of points must be even and at least 4, got {num_points}"
            )));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain extent must be positive, got {extent}"
            )));
        }
        Ok(Self {
            num_dims,
            num_points,
            extent,
        })
    }

    /// Unit-extent grid, the domain used by the normalized interfaces.
    pub fn unit(num_dims: usize, num_points: usize) -> Result<Self> {
        Self::new(num_dims, num_points, 1.0)
    }

    pub fn num_dims(&self) -> usize {
        self.num_dims
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn cell_size(&self) -> f64 {
        self.extent / self.num_points as f64
    }

    /// Number of bins along the halved (last) spectral axis.
    pub fn half_points(&self) -> usize {
        self.num_points / 2 + 1
    }

    /// `N^D`
    pub fn spatial_len(&self) -> usize {
        self.num_points.pow(self.num_dims as u32)
    }

    /// `N^(D-1) * (N/2 + 1)`
    pub fn spectral_len(&self) -> usize {
        self.num_points.pow(self.num_dims as u32 - 1) * self.half_points()
    }

    pub fn spatial_shape(&self) -> Vec<usize> {
        vec![self.num_points; self.num_dims]
    }

    pub fn spectral_shape(&self) -> Vec<usize> {
        let mut shape = vec![self.num_points; self.num_dims];
        shape[self.num_dims - 1] = self.half_points();
        shape
    }

    /// Coordinates of the grid point with flat (C-order) index `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let h = self.cell_size();
        let mut coords = vec![0.0; self.num_dims];
        let mut rest = index;
        for axis in (0..self.num_dims).rev() {
            coords[axis] = (rest % self.num_points) as f64 * h;
            rest /= self.num_points;
        }
        coords
    }

    /// Same grid with a different extent.
    pub fn with_extent(&self, extent: f64) -> Result<Self> {
        Self::new(self.num_dims, self.num_points, extent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_grids() {
        assert!(Grid::new(0, 16, 1.0).is_err());
        assert!(Grid::new(4, 16, 1.0).is_err());
        assert!(Grid::new(1, 15, 1.0).is_err());
        assert!(Grid::new(1, 2, 1.0).is_err());
        assert!(Grid::new(1, 16, 0.0).is_err());
        assert!(Grid::new(1, 16, f64::NAN).is_err());
    }

    #[test]
    fn sizes() {
        let g = Grid::new(3, 4, 2.0).unwrap();
        assert_eq!(g.spatial_len(), 64);
        assert_eq!(g.spectral_shape(), vec![4, 4, 3]);
        assert_eq!(g.spectral_len(), 48);
        assert_eq!(g.cell_size(), 0.5);
    }

    #[test]
    fn point_coordinates_exclude_right_boundary() {
        let g = Grid::new(2, 4, 1.0).unwrap();
        assert_eq!(g.point(0), vec![0.0, 0.0]);
        assert_eq!(g.point(1), vec![0.0, 0.25]);
        assert_eq!(g.point(15), vec![0.75, 0.75]);
    }
}
