use std::fmt;
use std::sync::Arc;

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Grid, SpatialField, SpectralField};
use crate::error::{Error, Result};

/// Multi-dimensional real FFT over all spatial axes of a [`Grid`].
///
/// The forward transform is unnormalized; the inverse carries the `1 / N^D`
/// factor. The last axis is stored halved (`N/2 + 1` bins). Plans are
/// immutable and every call allocates its own scratch, so one transform can
/// be shared freely between threads.
#[derive(Clone)]
pub struct SpectralTransform {
    grid: Grid,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    forward_full: Arc<dyn Fft<f64>>,
    inverse_full: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralTransform")
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl SpectralTransform {
    pub fn new(grid: Grid) -> Self {
        let n = grid.num_points();
        let mut real_planner = RealFftPlanner::<f64>::new();
        let mut planner = FftPlanner::<f64>::new();
        Self {
            grid,
            r2c: real_planner.plan_fft_forward(n),
            c2r: real_planner.plan_fft_inverse(n),
            forward_full: planner.plan_fft_forward(n),
            inverse_full: planner.plan_fft_inverse(n),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn forward(&self, field: &SpatialField) -> Result<SpectralField> {
        if field.grid() != &self.grid {
            return Err(Error::ShapeMismatch(format!(
                "field lives on {:?}, transform on {:?}",
                field.grid(),
                self.grid
            )));
        }
        if !field.is_finite() {
            return Err(Error::NonFiniteField);
        }
        let mut out = SpectralField::zeros(self.grid, field.channels());
        for c in 0..field.channels() {
            self.forward_into(field.channel(c), out.channel_mut(c));
        }
        Ok(out)
    }

    pub fn inverse(&self, field: &SpectralField) -> Result<SpatialField> {
        if field.grid() != &self.grid {
            return Err(Error::ShapeMismatch(format!(
                "spectrum lives on {:?}, transform on {:?}",
                field.grid(),
                self.grid
            )));
        }
        let mut out = SpatialField::zeros(self.grid, field.channels());
        for c in 0..field.channels() {
            self.inverse_into(field.channel(c), out.channel_mut(c));
        }
        Ok(out)
    }

    /// Single-channel forward transform; `input.len() == N^D`,
    /// `output.len() == N^(D-1) (N/2+1)`.
    pub fn forward_into(&self, input: &[f64], output: &mut [Complex64]) {
        let n = self.grid.num_points();
        let h = self.grid.half_points();
        debug_assert_eq!(input.len(), self.grid.spatial_len());
        debug_assert_eq!(output.len(), self.grid.spectral_len());

        let mut row = vec![0.0; n];
        let mut scratch = self.r2c.make_scratch_vec();
        for (src, dst) in input.chunks_exact(n).zip(output.chunks_exact_mut(h)) {
            row.copy_from_slice(src);
            self.r2c
                .process_with_scratch(&mut row, dst, &mut scratch)
                .expect("buffer sizes match the plan");
        }
        for axis in 0..self.grid.num_dims() - 1 {
            self.transform_axis(output, axis, self.forward_full.as_ref());
        }
    }

    /// Single-channel inverse transform including the `1 / N^D` factor.
    ///
    /// The imaginary parts of the self-conjugate bins along the halved axis
    /// are discarded, so the result is the real part of the full inverse.
    pub fn inverse_into(&self, input: &[Complex64], output: &mut [f64]) {
        debug_assert_eq!(input.len(), self.grid.spectral_len());
        debug_assert_eq!(output.len(), self.grid.spatial_len());

        let mut work = input.to_vec();
        self.inverse_consuming(&mut work, output);
    }

    /// Like [`inverse_into`](Self::inverse_into) but uses `work` as scratch,
    /// leaving it in an unspecified state.
    pub fn inverse_consuming(&self, work: &mut [Complex64], output: &mut [f64]) {
        let n = self.grid.num_points();
        let h = self.grid.half_points();
        for axis in 0..self.grid.num_dims() - 1 {
            self.transform_axis(work, axis, self.inverse_full.as_ref());
        }
        let mut scratch = self.c2r.make_scratch_vec();
        for (src, dst) in work.chunks_exact_mut(h).zip(output.chunks_exact_mut(n)) {
            src[0].im = 0.0;
            src[h - 1].im = 0.0;
            self.c2r
                .process_with_scratch(src, dst, &mut scratch)
                .expect("buffer sizes match the plan");
        }
        let norm = 1.0 / self.grid.spatial_len() as f64;
        output.iter_mut().for_each(|v| *v *= norm);
    }

    /// In-place complex FFT along one of the full (non-halved) axes.
    fn transform_axis(&self, data: &mut [Complex64], axis: usize, fft: &dyn Fft<f64>) {
        let n = self.grid.num_points();
        let d = self.grid.num_dims();
        let stride = self.grid.half_points() * n.pow((d - 2 - axis) as u32);
        let block = stride * n;
        let mut lines = vec![Complex64::new(0.0, 0.0); block];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for chunk in data.chunks_exact_mut(block) {
            for j in 0..n {
                for s in 0..stride {
                    lines[s * n + j] = chunk[j * stride + s];
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for j in 0..n {
                for s in 0..stride {
                    chunk[j * stride + s] = lines[s * n + j];
                }
            }
        }
    }
}

/// One-shot forward transform; plans are built per invocation.
pub fn forward_transform(field: &SpatialField) -> Result<SpectralField> {
    SpectralTransform::new(*field.grid()).forward(field)
}

/// One-shot inverse transform; plans are built per invocation.
pub fn inverse_transform(field: &SpectralField) -> Result<SpatialField> {
    SpectralTransform::new(*field.grid()).inverse(field)
}
