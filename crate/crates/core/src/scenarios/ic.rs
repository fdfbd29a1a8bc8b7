use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::registry::Dynamic;
use super::spec::ScenarioSpec;
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpatialField, SpectralField, SpectralTransform};

/// Initial-condition distribution of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case", deny_unknown_fields)]
pub enum IcConfig {
    /// `o + sum_k a_k sin(k . x 2 pi / L) + b_k cos(k . x 2 pi / L)` over all
    /// modes with `|k_d| <= cutoff`, each channel drawn independently.
    TruncatedFourier {
        cutoff: usize,
        /// `o ~ U(lo, hi)`; no draw when `lo == hi`.
        offset_range: [f64; 2],
        /// Rescale every channel to this maximum absolute value.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_abs: Option<f64>,
        /// Map the normalized field from `[-1, 1]` to `[0, 1]`.
        #[serde(default)]
        unit_interval: bool,
    },
    /// Gaussian blob in channel 0 and its one-complement in channel 1.
    GaussianBlob {
        /// Standard deviation as a fraction of the domain extent.
        std_fraction: f64,
        /// Range of the blob center per axis, as fractions of the extent.
        center_range: [f64; 2],
        peak: f64,
    },
}

impl IcConfig {
    pub fn fourier(cutoff: usize) -> Self {
        Self::TruncatedFourier {
            cutoff,
            offset_range: [0.0, 0.0],
            max_abs: Some(1.0),
            unit_interval: false,
        }
    }

    pub fn for_dynamic(dynamic: Dynamic) -> Self {
        match dynamic {
            Dynamic::Gs | Dynamic::GsType => Self::GaussianBlob {
                std_fraction: 0.1,
                center_range: [0.3, 0.7],
                peak: 1.0,
            },
            Dynamic::Fisher => Self::TruncatedFourier {
                cutoff: 5,
                offset_range: [0.0, 0.0],
                max_abs: Some(1.0),
                unit_interval: true,
            },
            _ => Self::fourier(5),
        }
    }

    pub fn validate(&self, num_points: usize) -> Result<()> {
        match self {
            Self::TruncatedFourier { cutoff, offset_range, max_abs, .. } => {
                if *cutoff == 0 || *cutoff + 1 > num_points / 2 {
                    return Err(Error::InvalidArgument(format!(
                        "cutoff {cutoff} must lie in 1..={} for {num_points} points",
                        (num_points / 2).saturating_sub(1)
                    )));
                }
                if !(offset_range[0].is_finite() && offset_range[1].is_finite() && offset_range[0] <= offset_range[1]) {
                    return Err(Error::InvalidArgument("offset range must be an ordered finite pair".into()));
                }
                if let Some(m) = max_abs {
                    if !(m.is_finite() && *m > 0.0) {
                        return Err(Error::InvalidArgument("max_abs must be positive".into()));
                    }
                }
            }
            Self::GaussianBlob { std_fraction, center_range, peak } => {
                if !(std_fraction.is_finite() && *std_fraction > 0.0) || !peak.is_finite() {
                    return Err(Error::InvalidArgument("blob width must be positive and peak finite".into()));
                }
                if !(0.0..=1.0).contains(&center_range[0])
                    || !(0.0..=1.0).contains(&center_range[1])
                    || center_range[0] > center_range[1]
                {
                    return Err(Error::InvalidArgument("blob center range must be an ordered pair in [0, 1]".into()));
                }
            }
        }
        Ok(())
    }
}

/// Random generator of stream `stream` for a user seed.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws one initial condition of `spec` deterministically from `seed`.
pub fn sample_initial_condition(spec: &ScenarioSpec, seed: u64) -> Result<SpatialField> {
    let grid = spec.grid()?;
    let mut rng = seeded_rng(seed, 0);
    sample_with(&spec.ic, grid, spec.channels(), &mut rng)
}

/// Draws one initial condition from an explicit generator.
pub fn sample_with(config: &IcConfig, grid: Grid, channels: usize, rng: &mut impl Rng) -> Result<SpatialField> {
    config.validate(grid.num_points())?;
    match config {
        IcConfig::TruncatedFourier { cutoff, offset_range, max_abs, unit_interval } => {
            let transform = SpectralTransform::new(grid);
            let mut out = SpatialField::zeros(grid, channels);
            for c in 0..channels {
                let mut u = truncated_fourier(grid, &transform, *cutoff, rng)?;
                if offset_range[0] != offset_range[1] {
                    let o = rng.random_range(offset_range[0]..offset_range[1]);
                    u.iter_mut().for_each(|v| *v += o);
                }
                if let Some(m) = max_abs {
                    let peak = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    if peak > 0.0 {
                        u.iter_mut().for_each(|v| *v *= m / peak);
                    }
                }
                if *unit_interval {
                    u.iter_mut().for_each(|v| *v = 0.5 * (*v + 1.0));
                }
                out.channel_mut(c).copy_from_slice(&u);
            }
            Ok(out)
        }
        IcConfig::GaussianBlob { std_fraction, center_range, peak } => {
            if channels != 2 {
                return Err(Error::InvalidArgument("a blob initial condition needs two channels".into()));
            }
            let extent = grid.extent();
            let center: Vec<f64> = (0..grid.num_dims())
                .map(|_| extent * rng.random_range(center_range[0]..=center_range[1]))
                .collect();
            let sigma = std_fraction * extent;
            Ok(SpatialField::from_fn(grid, 2, |c, x| {
                let r2: f64 = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
                let blob = peak * (-0.5 * r2 / (sigma * sigma)).exp();
                if c == 0 {
                    blob
                } else {
                    1.0 - blob
                }
            }))
        }
    }
}

/// Spectrally assembled truncated Fourier series of one channel.
fn truncated_fourier(grid: Grid, transform: &SpectralTransform, cutoff: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let dims = grid.num_dims();
    let shape = grid.spectral_shape();
    let scale = grid.spatial_len() as f64 / 2.0;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
    let index_of = |k: &[i64]| -> usize {
        let mut idx = 0usize;
        for (d, &kd) in k.iter().enumerate() {
            let n = shape[d] as i64;
            idx = idx * shape[d] + kd.rem_euclid(n) as usize;
        }
        idx
    };
    let k = cutoff as i64;
    let total = (2 * cutoff + 1).pow(dims as u32);
    let mut mode = vec![0i64; dims];
    for flat in 0..total {
        let mut rem = flat;
        for d in (0..dims).rev() {
            mode[d] = (rem % (2 * cutoff + 1)) as i64 - k;
            rem /= 2 * cutoff + 1;
        }
        // one representative per conjugate pair: first nonzero entry from the last axis is positive
        match mode.iter().rev().find(|&&m| m != 0) {
            Some(&m) if m > 0 => {}
            _ => continue,
        }
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        let value = Complex64::new(b, -a) * scale;
        spectrum[index_of(&mode)] = value;
        if mode[dims - 1] == 0 {
            let partner: Vec<i64> = mode.iter().map(|m| -m).collect();
            spectrum[index_of(&partner)] = value.conj();
        }
    }
    let field = SpectralField::from_vec(grid, 1, spectrum)?;
    Ok(transform.inverse(&field)?.into_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, WavenumberGrid};

    fn grid(d: usize, n: usize) -> Grid {
        Grid::new(d, n, 1.0).unwrap()
    }

    #[test]
    fn one_dimensional_spectrum_is_bandlimited() {
        let g = grid(1, 64);
        let mut rng = seeded_rng(3, 0);
        let u = sample_with(&IcConfig::fourier(5), g, 1, &mut rng).unwrap();
        let hat = forward_transform(&u).unwrap();
        for (k, v) in hat.channel(0).iter().enumerate() {
            if k > 5 {
                assert!(v.norm() < 1e-10, "mode {k}: {v}");
            }
        }
        assert!(hat.channel(0)[0].norm() < 1e-10);
        assert!((u.max_abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_dimensional_modes_cover_all_combinations() {
        let g = grid(2, 32);
        let mut rng = seeded_rng(11, 0);
        let u = sample_with(&IcConfig::fourier(3), g, 1, &mut rng).unwrap();
        let hat = forward_transform(&u).unwrap();
        let wg = WavenumberGrid::new(g);
        let mut populated = 0;
        for i in 0..g.spectral_len() {
            let inside = wg.max_abs(i) <= 3;
            if !inside {
                assert!(hat.channel(0)[i].norm() < 1e-9);
            } else if hat.channel(0)[i].norm() > 1e-9 {
                populated += 1;
            }
        }
        // (2K+1)^2 - 1 modes, of which those with k_last > 0 or (k_last = 0, k_0 != 0) are stored
        assert_eq!(populated, 3 * 7 + 6);
        assert!((u.max_abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let spec = ScenarioSpec::resolve("diff_burgers", 2).unwrap();
        let a = sample_initial_condition(&spec, 5).unwrap();
        let b = sample_initial_condition(&spec, 5).unwrap();
        let c = sample_initial_condition(&spec, 6).unwrap();
        assert_eq!(a.data(), b.data());
        assert_ne!(a.data(), c.data());
        assert_eq!(a.channels(), 2);
    }

    #[test]
    fn offset_is_drawn_within_range() {
        let g = grid(1, 32);
        let cfg = IcConfig::TruncatedFourier {
            cutoff: 2,
            offset_range: [-0.5, 0.5],
            max_abs: None,
            unit_interval: false,
        };
        let mut rng = seeded_rng(1, 0);
        let u = sample_with(&cfg, g, 1, &mut rng).unwrap();
        let mean = u.data().iter().sum::<f64>() / 32.0;
        assert!(mean.abs() <= 0.5 && mean != 0.0);
    }

    #[test]
    fn unit_interval_stays_in_range() {
        let spec = ScenarioSpec::resolve("fisher", 1).unwrap();
        let u = sample_initial_condition(&spec, 2).unwrap();
        assert!(u.data().iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn gray_scott_blob_and_complement() {
        let spec = ScenarioSpec::resolve("gs_type", 2).unwrap();
        let u = sample_initial_condition(&spec, 0).unwrap();
        for (a, b) in u.channel(0).iter().zip(u.channel(1)) {
            assert!((a + b - 1.0).abs() < 1e-15);
        }
        assert!(u.channel(0).iter().cloned().fold(0.0, f64::max) > 0.5);
    }

    #[test]
    fn rejects_cutoff_above_nyquist() {
        let g = grid(1, 8);
        let mut rng = seeded_rng(0, 0);
        assert!(sample_with(&IcConfig::fourier(4), g, 1, &mut rng).is_err());
        assert!(sample_with(&IcConfig::fourier(3), g, 1, &mut rng).is_ok());
    }
}
