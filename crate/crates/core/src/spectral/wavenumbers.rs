use std::f64::consts::PI;

use super::Grid;

/// Integer wavenumbers of every bin of the half-spectrum layout.
///
/// Full axes use the signed ordering `0, 1, .., N/2-1, -N/2, .., -1`; the
/// last (halved) axis runs `0..=N/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct WavenumberGrid {
    grid: Grid,
    axes: Vec<Vec<i64>>,
    flat: Vec<Vec<i64>>,
}

/// Signed wavenumber of index `i` along a full axis with `n` points.
pub fn signed_wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl WavenumberGrid {
    pub fn new(grid: Grid) -> Self {
        let n = grid.num_points();
        let d = grid.num_dims();
        let axes: Vec<Vec<i64>> = (0..d)
            .map(|axis| {
                if axis == d - 1 {
                    (0..grid.half_points() as i64).collect()
                } else {
                    (0..n).map(|i| signed_wavenumber(i, n)).collect()
                }
            })
            .collect();

        let shape = grid.spectral_shape();
        let len = grid.spectral_len();
        let mut flat = vec![Vec::with_capacity(len); d];
        for index in 0..len {
            let mut rest = index;
            for axis in (0..d).rev() {
                flat[axis].push(axes[axis][rest % shape[axis]]);
                rest /= shape[axis];
            }
        }
        Self { grid, axes, flat }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// The 1-D wavenumber array of `axis` (length `N`, or `N/2 + 1` for the last axis).
    pub fn axis(&self, axis: usize) -> &[i64] {
        &self.axes[axis]
    }

    /// Wavenumber along `axis` for every spectral bin, flattened C-order.
    pub fn broadcast(&self, axis: usize) -> &[i64] {
        &self.flat[axis]
    }

    /// Wavenumber vector of the bin with flat index `index`.
    pub fn mode(&self, index: usize) -> Vec<i64> {
        self.flat.iter().map(|f| f[index]).collect()
    }

    /// Angular wavenumber `2 pi k / L` along `axis` for every bin.
    pub fn kappa(&self, axis: usize) -> Vec<f64> {
        let scale = 2.0 * PI / self.grid.extent();
        self.flat[axis].iter().map(|&k| k as f64 * scale).collect()
    }

    /// Whether bin `index` sits on the Nyquist frequency of `axis`.
    pub fn is_nyquist(&self, axis: usize, index: usize) -> bool {
        self.flat[axis][index].unsigned_abs() as usize == self.grid.num_points() / 2
    }

    /// Largest per-axis `|k|` of bin `index`.
    pub fn max_abs(&self, index: usize) -> i64 {
        self.flat.iter().map(|f| f[index].abs()).max().unwrap_or(0)
    }

    /// Multiplicity of each stored bin in the full spectrum: 1 for the
    /// self-conjugate columns of the halved axis (`k = 0` and Nyquist), 2 otherwise.
    pub fn conjugate_weights(&self) -> Vec<f64> {
        let last = &self.flat[self.grid.num_dims() - 1];
        let nyquist = (self.grid.num_points() / 2) as i64;
        last.iter()
            .map(|&k| if k == 0 || k == nyquist { 1.0 } else { 2.0 })
            .collect()
    }
}

/// Builds the wavenumber arrays of `grid`.
pub fn build_wavenumber_grid(grid: Grid) -> WavenumberGrid {
    WavenumberGrid::new(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_half_axis() {
        let wg = build_wavenumber_grid(Grid::new(1, 8, 1.0).unwrap());
        assert_eq!(wg.axis(0), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn two_dimensional_signed_ordering() {
        let wg = build_wavenumber_grid(Grid::new(2, 8, 1.0).unwrap());
        assert_eq!(wg.axis(0), &[0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(wg.axis(1), &[0, 1, 2, 3, 4]);
        assert_eq!(wg.mode(5 * 5 + 2), vec![-3, 2]);
    }

    #[test]
    fn three_dimensional_shape() {
        let g = Grid::new(3, 4, 1.0).unwrap();
        let wg = build_wavenumber_grid(g);
        assert_eq!(g.spectral_shape(), vec![4, 4, 3]);
        assert_eq!(wg.broadcast(2).len(), 48);
        assert_eq!(wg.mode(47), vec![-1, -1, 2]);
    }

    #[test]
    fn weights_count_full_spectrum() {
        let g = Grid::new(2, 6, 1.0).unwrap();
        let total: f64 = WavenumberGrid::new(g).conjugate_weights().iter().sum();
        assert_eq!(total, 36.0);
    }
}
