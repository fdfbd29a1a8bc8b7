use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etdrk::NonlinearFunction;
use crate::spectral::{
    derivative_values, DealiasMask, Grid, SpectralField, SpectralTransform, WavenumberGrid,
};

/// Catalog of pseudo-spectral nonlinear terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum NonlinearSpec {
    /// `b 1/2 nabla . (u (x) u)` on a `D`-channel velocity, or `b (u . nabla) u`
    /// when not conservative.
    Convection { scale: f64, conservative: bool },
    /// `b 1/2 (1 . nabla)(u^2)` on a single channel.
    SingleChannelConvection { scale: f64 },
    /// `b 1/2 |nabla u|^2` with its mean removed, so the spatial average of `u` is conserved.
    GradientNorm { scale: f64 },
    /// `sum_j c_j u^j`
    Polynomial { coefficients: Vec<f64> },
    /// `-b (v . nabla) w` with `v = (d psi/dy, -d psi/dx)`, `psi = laplace^-1 w`,
    /// plus an optional forcing `amplitude cos(2 pi k y / L)`.
    VorticityConvection {
        scale: f64,
        forcing_wavenumber: Option<f64>,
        forcing_amplitude: f64,
    },
    /// `b0 u^2 + b1 1/2 (1 . nabla)(u^2) + b2 1/2 |nabla u|^2`, gradient norm mean-free as in [`NonlinearSpec::GradientNorm`].
    General { b0: f64, b1: f64, b2: f64 },
    /// Gray-Scott reaction: `-u v^2 + f` and `u v^2` on two channels.
    GrayScott { feed: f64 },
}

impl NonlinearSpec {
    /// Channel count the term operates on for a `dims`-dimensional grid.
    pub fn channels(&self, dims: usize) -> usize {
        match self {
            NonlinearSpec::Convection { .. } => dims,
            NonlinearSpec::GrayScott { .. } => 2,
            _ => 1,
        }
    }
}

/// Evaluated pseudo-spectral nonlinearity built from a [`NonlinearSpec`].
#[derive(Debug)]
pub struct PseudoSpectralNonlinear {
    spec: NonlinearSpec,
    grid: Grid,
    channels: usize,
    mask: DealiasMask,
    transform: SpectralTransform,
    /// first-derivative diagonals per axis
    deriv: Vec<Vec<Complex64>>,
    /// `-1 / |kappa|^2`, zero at the mean mode
    inv_laplace: Vec<f64>,
    /// constant spectral contribution per channel
    forcing: Option<Vec<Complex64>>,
}

/// Builds the nonlinear function of `spec` on `grid`, masking inputs with `dealias`.
pub fn build_nonlinear(spec: &NonlinearSpec, grid: Grid, dealias: DealiasMask) -> Result<Arc<dyn NonlinearFunction>> {
    Ok(Arc::new(PseudoSpectralNonlinear::new(spec.clone(), grid, dealias)?))
}

impl PseudoSpectralNonlinear {
    pub fn new(spec: NonlinearSpec, grid: Grid, mask: DealiasMask) -> Result<Self> {
        if mask.grid() != &grid {
            return Err(Error::ShapeMismatch("dealias mask built for a different grid".into()));
        }
        let finite = match &spec {
            NonlinearSpec::Convection { scale, .. }
            | NonlinearSpec::SingleChannelConvection { scale }
            | NonlinearSpec::GradientNorm { scale } => scale.is_finite(),
            NonlinearSpec::Polynomial { coefficients } => coefficients.iter().all(|c| c.is_finite()),
            NonlinearSpec::VorticityConvection {
                scale,
                forcing_wavenumber,
                forcing_amplitude,
            } => scale.is_finite() && forcing_amplitude.is_finite() && forcing_wavenumber.map_or(true, f64::is_finite),
            NonlinearSpec::General { b0, b1, b2 } => b0.is_finite() && b1.is_finite() && b2.is_finite(),
            NonlinearSpec::GrayScott { feed } => feed.is_finite(),
        };
        if !finite {
            return Err(Error::InvalidArgument("nonlinear parameters must be finite".into()));
        }
        if matches!(spec, NonlinearSpec::VorticityConvection { .. }) && grid.num_dims() != 2 {
            return Err(Error::InvalidArgument(
                "vorticity convection is only defined in two dimensions".into(),
            ));
        }

        let wavenumbers = WavenumberGrid::new(grid);
        let deriv = (0..grid.num_dims())
            .map(|a| derivative_values(&wavenumbers, 1, a))
            .collect();
        let kappa: Vec<Vec<f64>> = (0..grid.num_dims()).map(|a| wavenumbers.kappa(a)).collect();
        let inv_laplace = (0..grid.spectral_len())
            .map(|i| {
                let k2: f64 = kappa.iter().map(|k| k[i] * k[i]).sum();
                if k2 == 0.0 {
                    0.0
                } else {
                    -1.0 / k2
                }
            })
            .collect();

        let transform = SpectralTransform::new(grid);
        let forcing = match &spec {
            NonlinearSpec::VorticityConvection {
                forcing_wavenumber: Some(k),
                forcing_amplitude,
                ..
            } => {
                let l = grid.extent();
                let mut values = vec![0.0; grid.spatial_len()];
                for (i, v) in values.iter_mut().enumerate() {
                    let y = grid.point(i)[1];
                    *v = forcing_amplitude * (k * 2.0 * PI / l * y).cos();
                }
                let mut out = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
                transform.forward_into(&values, &mut out);
                Some(out)
            }
            NonlinearSpec::GrayScott { feed } => {
                let mut out = vec![Complex64::new(0.0, 0.0); 2 * grid.spectral_len()];
                out[0] = Complex64::new(feed * grid.spatial_len() as f64, 0.0);
                Some(out)
            }
            _ => None,
        };
        let channels = spec.channels(grid.num_dims());
        Ok(Self {
            spec,
            grid,
            channels,
            mask,
            transform,
            deriv,
            inv_laplace,
            forcing,
        })
    }

    pub fn spec(&self) -> &NonlinearSpec {
        &self.spec
    }

    fn zeros_c(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.grid.spectral_len()]
    }

    fn masked(&self, channel: &[Complex64]) -> Vec<Complex64> {
        let mut out = channel.to_vec();
        self.mask.apply_in_place(&mut out);
        out
    }

    /// Spatial values of `diag * u_hat` (`diag = None` for the plain field).
    fn spatial(&self, u_hat: &[Complex64], diag: Option<&[Complex64]>) -> Vec<f64> {
        let mut work: Vec<Complex64> = match diag {
            Some(d) => u_hat.iter().zip(d).map(|(u, m)| u * m).collect(),
            None => u_hat.to_vec(),
        };
        let mut out = vec![0.0; self.grid.spatial_len()];
        self.transform.inverse_consuming(&mut work, &mut out);
        out
    }

    fn spectral(&self, values: &[f64]) -> Vec<Complex64> {
        let mut out = self.zeros_c();
        self.transform.forward_into(values, &mut out);
        out
    }

    /// `sum_d deriv_d`
    fn deriv_sum(&self, i: usize) -> Complex64 {
        self.deriv.iter().map(|d| d[i]).sum()
    }

    fn square(values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| v * v).collect()
    }

    fn half_grad_norm_sq(&self, u_hat: &[Complex64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.grid.spatial_len()];
        for d in &self.deriv {
            let du = self.spatial(u_hat, Some(d));
            for (a, v) in acc.iter_mut().zip(&du) {
                *a += 0.5 * v * v;
            }
        }
        acc
    }

    fn eval_channels(&self, input: &[Complex64], output: &mut [Complex64]) {
        let slen = self.grid.spectral_len();
        let masked: Vec<Vec<Complex64>> = input.chunks_exact(slen).map(|c| self.masked(c)).collect();
        match &self.spec {
            NonlinearSpec::Convection { scale, conservative: true } => {
                let dims = self.grid.num_dims();
                let u: Vec<Vec<f64>> = masked.iter().map(|m| self.spatial(m, None)).collect();
                let mut products = vec![Vec::new(); dims * dims];
                for c in 0..dims {
                    for d in c..dims {
                        let p: Vec<f64> = u[c].iter().zip(&u[d]).map(|(a, b)| a * b).collect();
                        products[c * dims + d] = self.spectral(&p);
                    }
                }
                for (c, out) in output.chunks_exact_mut(slen).enumerate() {
                    for (i, o) in out.iter_mut().enumerate() {
                        let mut sum = Complex64::new(0.0, 0.0);
                        for d in 0..dims {
                            let (lo, hi) = if c <= d { (c, d) } else { (d, c) };
                            sum += self.deriv[d][i] * products[lo * dims + hi][i];
                        }
                        *o = 0.5 * scale * sum;
                    }
                }
            }
            NonlinearSpec::Convection { scale, conservative: false } => {
                let dims = self.grid.num_dims();
                let u: Vec<Vec<f64>> = masked.iter().map(|m| self.spatial(m, None)).collect();
                for (c, out) in output.chunks_exact_mut(slen).enumerate() {
                    let mut acc = vec![0.0; self.grid.spatial_len()];
                    for d in 0..dims {
                        let du = self.spatial(&masked[c], Some(&self.deriv[d]));
                        for ((a, v), g) in acc.iter_mut().zip(&u[d]).zip(&du) {
                            *a += scale * v * g;
                        }
                    }
                    out.copy_from_slice(&self.spectral(&acc));
                }
            }
            NonlinearSpec::SingleChannelConvection { scale } => {
                let sq = self.spectral(&Self::square(&self.spatial(&masked[0], None)));
                for (i, o) in output.iter_mut().enumerate() {
                    *o = 0.5 * scale * self.deriv_sum(i) * sq[i];
                }
            }
            NonlinearSpec::GradientNorm { scale } => {
                let g = self.half_grad_norm_sq(&masked[0]);
                let scaled: Vec<f64> = g.iter().map(|v| scale * v).collect();
                output.copy_from_slice(&self.spectral(&scaled));
                output[0] = Complex64::new(0.0, 0.0);
            }
            NonlinearSpec::Polynomial { coefficients } => {
                let u = self.spatial(&masked[0], None);
                let values: Vec<f64> = u
                    .iter()
                    .map(|&x| coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c))
                    .collect();
                output.copy_from_slice(&self.spectral(&values));
            }
            NonlinearSpec::General { b0, b1, b2 } => {
                let u = self.spatial(&masked[0], None);
                let sq = Self::square(&u);
                let mut local: Vec<f64> = sq.iter().map(|v| b0 * v).collect();
                if *b2 != 0.0 {
                    let g = self.half_grad_norm_sq(&masked[0]);
                    let mean = g.iter().sum::<f64>() / g.len() as f64;
                    for (l, v) in local.iter_mut().zip(&g) {
                        *l += b2 * (v - mean);
                    }
                }
                let local_hat = self.spectral(&local);
                let sq_hat = self.spectral(&sq);
                for (i, o) in output.iter_mut().enumerate() {
                    *o = local_hat[i] + 0.5 * b1 * self.deriv_sum(i) * sq_hat[i];
                }
            }
            NonlinearSpec::VorticityConvection { scale, .. } => {
                let psi_hat: Vec<Complex64> = masked[0]
                    .iter()
                    .zip(&self.inv_laplace)
                    .map(|(w, l)| w * l)
                    .collect();
                let vx = self.spatial(&psi_hat, Some(&self.deriv[1]));
                let vy: Vec<f64> = self.spatial(&psi_hat, Some(&self.deriv[0])).iter().map(|v| -v).collect();
                let wx = self.spatial(&masked[0], Some(&self.deriv[0]));
                let wy = self.spatial(&masked[0], Some(&self.deriv[1]));
                let values: Vec<f64> = (0..self.grid.spatial_len())
                    .map(|i| -scale * (vx[i] * wx[i] + vy[i] * wy[i]))
                    .collect();
                output.copy_from_slice(&self.spectral(&values));
            }
            NonlinearSpec::GrayScott { .. } => {
                let u = self.spatial(&masked[0], None);
                let v = self.spatial(&masked[1], None);
                let r: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a * b * b).collect();
                let r_hat = self.spectral(&r);
                let (out0, out1) = output.split_at_mut(slen);
                for i in 0..slen {
                    out0[i] = -r_hat[i];
                    out1[i] = r_hat[i];
                }
            }
        }
    }
}

impl NonlinearFunction for PseudoSpectralNonlinear {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn channels(&self) -> usize {
        self.channels
    }

    fn evaluate_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        debug_assert_eq!(input.len(), self.channels * self.grid.spectral_len());
        debug_assert_eq!(output.len(), input.len());
        self.eval_channels(input, output);
        let slen = self.grid.spectral_len();
        for c in output.chunks_exact_mut(slen) {
            self.mask.apply_in_place(c);
        }
        if let Some(f) = &self.forcing {
            for (o, v) in output.iter_mut().zip(f) {
                *o += v;
            }
        }
    }
}

/// Solves the Poisson problem `laplace psi = u` spectrally with a zero-mean gauge.
pub fn inverse_laplacian(field: &SpectralField) -> SpectralField {
    let grid = *field.grid();
    let wavenumbers = WavenumberGrid::new(grid);
    let kappa: Vec<Vec<f64>> = (0..grid.num_dims()).map(|a| wavenumbers.kappa(a)).collect();
    let mut out = field.clone();
    for c in 0..out.channels() {
        for (i, v) in out.channel_mut(c).iter_mut().enumerate() {
            let k2: f64 = kappa.iter().map(|k| k[i] * k[i]).sum();
            *v = if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { -*v / k2 };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{dealias_mask, forward_transform, inverse_transform, SpatialField};

    fn eval(spec: NonlinearSpec, u: &SpatialField, keep: f64) -> SpatialField {
        let g = *u.grid();
        let nl = build_nonlinear(&spec, g, dealias_mask(g, keep).unwrap()).unwrap();
        inverse_transform(&nl.evaluate(&forward_transform(u).unwrap()).unwrap()).unwrap()
    }

    fn low_modes(g: Grid, channels: usize, seed: u64) -> SpatialField {
        let l = g.extent();
        SpatialField::from_fn(g, channels, move |c, p| {
            let mut v = 0.0;
            for (d, x) in p.iter().enumerate() {
                for k in 1..=4 {
                    let phase = (seed as f64 + 1.3 * c as f64 + 0.7 * d as f64 + 0.37 * k as f64).sin();
                    v += (2.0 * PI * k as f64 * x / l + phase).sin() / k as f64;
                }
            }
            v + 0.1 * (p.iter().map(|x| 2.0 * PI * x / l).sum::<f64>() + seed as f64).cos()
        })
    }

    #[test]
    fn burgers_convection_of_sine() {
        let g = Grid::new(1, 32, 2.0).unwrap();
        let w = 2.0 * PI / 2.0;
        let u = SpatialField::from_fn(g, 1, |_, x| (w * x[0]).sin());
        let out = eval(NonlinearSpec::Convection { scale: -1.0, conservative: true }, &u, 2.0 / 3.0);
        let expected = SpatialField::from_fn(g, 1, |_, x| -0.5 * w * (2.0 * w * x[0]).sin());
        assert!(out.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn conservative_and_advective_forms_agree_in_1d() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let v = low_modes(g, 1, 5);
        let a = eval(NonlinearSpec::Convection { scale: 1.0, conservative: true }, &v, 1.0);
        let b = eval(NonlinearSpec::Convection { scale: 1.0, conservative: false }, &v, 1.0);
        assert!(a.max_abs_diff(&b) < 1e-10 * b.max_abs());
    }

    #[test]
    fn fisher_fixed_point() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let u = SpatialField::from_fn(g, 1, |_, _| 1.0);
        let r = 0.3;
        let out = eval(NonlinearSpec::Polynomial { coefficients: vec![0.0, r, -r] }, &u, 2.0 / 3.0);
        assert!(out.max_abs() < 1e-14);
    }

    #[test]
    fn gradient_norm_of_constant_vanishes() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        let u = SpatialField::from_fn(g, 1, |_, _| 2.5);
        let out = eval(NonlinearSpec::GradientNorm { scale: -6.0 }, &u, 2.0 / 3.0);
        assert!(out.max_abs() < 1e-12);
    }

    #[test]
    fn gradient_norm_of_single_mode() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let w = 2.0 * PI;
        let u = SpatialField::from_fn(g, 1, |_, p| (w * p[0]).sin() + (w * p[1]).cos());
        let out = eval(NonlinearSpec::GradientNorm { scale: 2.0 }, &u, 2.0 / 3.0);
        let expected = SpatialField::from_fn(g, 1, |_, p| {
            w * w * ((w * p[0]).cos().powi(2) + (w * p[1]).sin().powi(2) - 1.0)
        });
        assert!(out.max_abs_diff(&expected) < 1e-9);
    }

    #[test]
    fn dealiased_products_match_double_resolution() {
        for (dims, spec) in [
            (1, NonlinearSpec::Convection { scale: -1.0, conservative: true }),
            (2, NonlinearSpec::GradientNorm { scale: 1.5 }),
            (2, NonlinearSpec::Convection { scale: 0.5, conservative: true }),
            (1, NonlinearSpec::Polynomial { coefficients: vec![0.0, 0.0, 1.0] }),
        ] {
            let coarse = Grid::new(dims, 16, 1.0).unwrap();
            let fine = Grid::new(dims, 32, 1.0).unwrap();
            let channels = spec.channels(dims);
            // band limited to |k| <= 4 < floor(2/3 * 8)
            let u_c = low_modes(coarse, channels, 1);
            let u_f = low_modes(fine, channels, 1);
            let nc = build_nonlinear(&spec, coarse, dealias_mask(coarse, 2.0 / 3.0).unwrap()).unwrap();
            let nf = build_nonlinear(&spec, fine, DealiasMask::identity(fine)).unwrap();
            let hc = nc.evaluate(&forward_transform(&u_c).unwrap()).unwrap();
            let hf = nf.evaluate(&forward_transform(&u_f).unwrap()).unwrap();
            let wc = WavenumberGrid::new(coarse);
            let wf = WavenumberGrid::new(fine);
            let mask = dealias_mask(coarse, 2.0 / 3.0).unwrap();
            let scale = (2f64).powi(dims as i32);
            let mut max_ref: f64 = 0.0;
            let mut max_err: f64 = 0.0;
            for c in 0..channels {
                for i in 0..coarse.spectral_len() {
                    if !mask.keeps(i) {
                        continue;
                    }
                    let k = wc.mode(i);
                    let j = (0..fine.spectral_len()).find(|&j| wf.mode(j) == k).unwrap();
                    let a = hc.channel(c)[i] * scale;
                    let b = hf.channel(c)[j];
                    max_ref = max_ref.max(b.norm());
                    max_err = max_err.max((a - b).norm());
                }
            }
            assert!(max_err <= 1e-10 * max_ref, "{spec:?}: {max_err} vs {max_ref}");
        }
    }

    #[test]
    fn general_reproduces_dedicated_variants() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let u = low_modes(g, 1, 7);
        let cases = [
            ((0.7, 0.0, 0.0), NonlinearSpec::Polynomial { coefficients: vec![0.0, 0.0, 0.7] }),
            ((0.0, -1.2, 0.0), NonlinearSpec::SingleChannelConvection { scale: -1.2 }),
            ((0.0, 0.0, 3.0), NonlinearSpec::GradientNorm { scale: 3.0 }),
        ];
        for ((b0, b1, b2), dedicated) in cases {
            let a = eval(NonlinearSpec::General { b0, b1, b2 }, &u, 2.0 / 3.0);
            let b = eval(dedicated, &u, 2.0 / 3.0);
            assert!(a.max_abs_diff(&b) <= 1e-13 * b.max_abs().max(1.0));
        }
    }

    #[test]
    fn vorticity_of_single_shear_mode_is_steady() {
        // a pure Kolmogorov shear w = cos(k y) is an exact steady state of the advection term
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let u = SpatialField::from_fn(g, 1, |_, p| (4.0 * p[1]).cos());
        let out = eval(
            NonlinearSpec::VorticityConvection { scale: 1.0, forcing_wavenumber: None, forcing_amplitude: 0.0 },
            &u,
            2.0 / 3.0,
        );
        assert!(out.max_abs() < 1e-10);
    }

    #[test]
    fn vorticity_forcing_is_added() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let u = SpatialField::zeros(g, 1);
        let out = eval(
            NonlinearSpec::VorticityConvection { scale: 1.0, forcing_wavenumber: Some(4.0), forcing_amplitude: -4.0 },
            &u,
            2.0 / 3.0,
        );
        let expected = SpatialField::from_fn(g, 1, |_, p| -4.0 * (4.0 * p[1]).cos());
        assert!(out.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn vorticity_velocity_orientation() {
        // psi = sin(x) gives v = (0, -cos x); w = laplace psi = -sin x
        // advected field test: N(w) = -(v . grad) w with w = -sin x + c sin y
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let u = SpatialField::from_fn(g, 1, |_, p| -(p[0]).sin() - (p[1]).sin());
        let out = eval(
            NonlinearSpec::VorticityConvection { scale: 1.0, forcing_wavenumber: None, forcing_amplitude: 0.0 },
            &u,
            2.0 / 3.0,
        );
        // psi = sin x + sin y, vel = (cos y, -cos x), grad w = (-cos x, -cos y)
        // -(vel . grad w) = cos y cos x - cos x cos y = 0
        assert!(out.max_abs() < 1e-10);
        let u2 = SpatialField::from_fn(g, 1, |_, p| -(p[0]).sin() - 4.0 * (2.0 * p[1]).sin());
        let out2 = eval(
            NonlinearSpec::VorticityConvection { scale: 1.0, forcing_wavenumber: None, forcing_amplitude: 0.0 },
            &u2,
            2.0 / 3.0,
        );
        // psi = sin x + sin 2y, vel = (2 cos 2y, -cos x), grad w = (-cos x, -8 cos 2y)
        // -(vel . grad w) = 2 cos 2y cos x - 8 cos x cos 2y = -6 cos x cos 2y
        let expected = SpatialField::from_fn(g, 1, |_, p| -6.0 * p[0].cos() * (2.0 * p[1]).cos());
        assert!(out2.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn gray_scott_reaction() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let u = SpatialField::from_fn(g, 2, |c, _| if c == 0 { 0.5 } else { 0.2 });
        let out = eval(NonlinearSpec::GrayScott { feed: 0.04 }, &u, 2.0 / 3.0);
        let r = 0.5 * 0.2 * 0.2;
        assert!(out.channel(0).iter().all(|v| (v - (0.04 - r)).abs() < 1e-14));
        assert!(out.channel(1).iter().all(|v| (v - r).abs() < 1e-14));
    }

    #[test]
    fn channel_mismatch_is_rejected() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let nl = build_nonlinear(
            &NonlinearSpec::Convection { scale: 1.0, conservative: true },
            g,
            dealias_mask(g, 2.0 / 3.0).unwrap(),
        )
        .unwrap();
        assert!(nl.evaluate(&SpectralField::zeros(g, 1)).is_err());
        let g3 = Grid::new(3, 8, 1.0).unwrap();
        assert!(build_nonlinear(
            &NonlinearSpec::VorticityConvection { scale: 1.0, forcing_wavenumber: None, forcing_amplitude: 0.0 },
            g3,
            dealias_mask(g3, 1.0).unwrap()
        )
        .is_err());
    }

    #[test]
    fn inverse_laplacian_conventions() {
        let g = Grid::new(2, 16, 3.0).unwrap();
        let w = 2.0 * PI / 3.0;
        let u = SpatialField::from_fn(g, 1, |_, p| (w * p[0]).sin());
        let psi = inverse_transform(&inverse_laplacian(&forward_transform(&u).unwrap())).unwrap();
        assert!(psi.max_abs_diff(&u.scaled(-1.0 / (w * w))) < 1e-12);

        let c = SpatialField::from_fn(g, 1, |_, _| 4.0);
        let zero = inverse_transform(&inverse_laplacian(&forward_transform(&c).unwrap())).unwrap();
        assert!(zero.max_abs() < 1e-14);

        let r = low_modes(g, 1, 2);
        let mean = r.data().iter().sum::<f64>() / r.data().len() as f64;
        let lap = crate::operators::build_isotropic_linear(&[0.0, 0.0, 1.0], g);
        let back = inverse_transform(&lap.apply(&inverse_laplacian(&forward_transform(&r).unwrap())).unwrap()).unwrap();
        let centered = SpatialField::from_vec(g, 1, r.data().iter().map(|v| v - mean).collect()).unwrap();
        assert!(back.max_abs_diff(&centered) < 1e-10);
    }
}
