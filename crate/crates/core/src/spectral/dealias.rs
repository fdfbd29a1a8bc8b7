use rustfft::num_complex::Complex64;

use super::{Grid, SpectralField, WavenumberGrid};
use crate::error::{Error, Result};

/// Boolean mask over the spectral layout retaining modes with
/// `|k_axis| <= floor(keep_fraction * N / 2)` on every axis.
#[derive(Clone, Debug, PartialEq)]
pub struct DealiasMask {
    grid: Grid,
    cutoff: usize,
    keep: Vec<bool>,
}

impl DealiasMask {
    pub fn new(grid: Grid, keep_fraction: f64) -> Result<Self> {
        if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "keep fraction must lie in (0, 1], got {keep_fraction}"
            )));
        }
        // the guard keeps exact products such as 2/3 * 12 from rounding down
        let cutoff = (keep_fraction * (grid.num_points() / 2) as f64 + 1e-12).floor() as usize;
        let wavenumbers = WavenumberGrid::new(grid);
        let keep = (0..grid.spectral_len())
            .map(|i| wavenumbers.max_abs(i) as usize <= cutoff)
            .collect();
        Ok(Self { grid, cutoff, keep })
    }

    /// Mask that retains everything.
    pub fn identity(grid: Grid) -> Self {
        Self {
            grid,
            cutoff: grid.num_points() / 2,
            keep: vec![true; grid.spectral_len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Largest retained `|k|` per axis.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn keeps(&self, index: usize) -> bool {
        self.keep[index]
    }

    pub fn values(&self) -> &[bool] {
        &self.keep
    }

    pub fn is_identity(&self) -> bool {
        self.keep.iter().all(|&k| k)
    }

    /// Zeroes the discarded bins of a single channel in place.
    pub fn apply_in_place(&self, channel: &mut [Complex64]) {
        for (v, &keep) in channel.iter_mut().zip(&self.keep) {
            if !keep {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn apply(&self, field: &SpectralField) -> Result<SpectralField> {
        if field.grid() != &self.grid {
            return Err(Error::ShapeMismatch(format!(
                "mask built for {:?}, spectrum lives on {:?}",
                self.grid,
                field.grid()
            )));
        }
        let mut out = field.clone();
        for c in 0..out.channels() {
            self.apply_in_place(out.channel_mut(c));
        }
        Ok(out)
    }
}

/// Per-axis truncation mask, `keep_fraction = 2/3` being the classic rule.
pub fn dealias_mask(grid: Grid, keep_fraction: f64) -> Result<DealiasMask> {
    DealiasMask::new(grid, keep_fraction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_thirds_of_sixteen() {
        let mask = dealias_mask(Grid::new(1, 16, 1.0).unwrap(), 2.0 / 3.0).unwrap();
        assert_eq!(mask.cutoff(), 5);
        let kept: Vec<usize> = (0..9).filter(|&i| mask.keeps(i)).collect();
        assert_eq!(kept, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn full_keep_is_identity() {
        for d in 1..=3 {
            let g = Grid::new(d, 8, 1.0).unwrap();
            assert!(dealias_mask(g, 1.0).unwrap().is_identity());
        }
    }

    #[test]
    fn rejects_bad_fraction() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        assert!(dealias_mask(g, 0.0).is_err());
        assert!(dealias_mask(g, 1.5).is_err());
    }

    #[test]
    fn idempotent_and_monotone() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let field = SpectralField::from_vec(
            g,
            1,
            (0..g.spectral_len()).map(|i| Complex64::new(i as f64, 1.0)).collect(),
        )
        .unwrap();
        let mask = dealias_mask(g, 2.0 / 3.0).unwrap();
        let once = mask.apply(&field).unwrap();
        assert_eq!(mask.apply(&once).unwrap(), once);

        let small = dealias_mask(g, 0.4).unwrap();
        for i in 0..g.spectral_len() {
            assert!(!small.keeps(i) || mask.keeps(i));
        }
    }

    #[test]
    fn multidimensional_mask_is_tensor_product() {
        let g = Grid::new(2, 12, 1.0).unwrap();
        let mask = dealias_mask(g, 2.0 / 3.0).unwrap();
        let wg = WavenumberGrid::new(g);
        assert_eq!(mask.cutoff(), 4);
        for i in 0..g.spectral_len() {
            let m = wg.mode(i);
            assert_eq!(mask.keeps(i), m[0].abs() <= 4 && m[1].abs() <= 4);
        }
    }
}
