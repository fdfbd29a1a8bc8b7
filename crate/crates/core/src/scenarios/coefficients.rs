use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of linear orders carried by the isotropic interfaces (`j = 0..=4`).
pub const LINEAR_ORDERS: usize = 5;

/// Nonlinear components addressable by the difficulty and normalized interfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearKind {
    /// `1/2 nabla . (u (x) u)`
    Conv,
    /// `1/2 (1 . nabla) u^2`
    ConvSc,
    /// `1/2 |nabla u|^2`
    Gn,
    /// `u^2`
    Quad,
}

impl NonlinearKind {
    pub const ALL: [NonlinearKind; 4] = [Self::Conv, Self::ConvSc, Self::Gn, Self::Quad];

    /// Total derivative order `l_pre * p + l_post` of the component.
    pub fn derivative_order(self) -> i32 {
        match self {
            Self::Conv | Self::ConvSc => 1,
            Self::Gn => 2,
            Self::Quad => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Conv => "conv",
            Self::ConvSc => "conv_sc",
            Self::Gn => "gn",
            Self::Quad => "quad",
        }
    }
}

/// One value per [`NonlinearKind`], used for both `delta` and `beta`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearCoefficients {
    pub conv: f64,
    pub conv_sc: f64,
    pub gn: f64,
    pub quad: f64,
}

impl NonlinearCoefficients {
    pub fn get(&self, kind: NonlinearKind) -> f64 {
        match kind {
            NonlinearKind::Conv => self.conv,
            NonlinearKind::ConvSc => self.conv_sc,
            NonlinearKind::Gn => self.gn,
            NonlinearKind::Quad => self.quad,
        }
    }

    pub fn get_mut(&mut self, kind: NonlinearKind) -> &mut f64 {
        match kind {
            NonlinearKind::Conv => &mut self.conv,
            NonlinearKind::ConvSc => &mut self.conv_sc,
            NonlinearKind::Gn => &mut self.gn,
            NonlinearKind::Quad => &mut self.quad,
        }
    }

    pub fn single(kind: NonlinearKind, value: f64) -> Self {
        let mut c = Self::default();
        *c.get_mut(kind) = value;
        c
    }

    pub fn map(&self, f: impl Fn(NonlinearKind, f64) -> f64) -> Self {
        let mut out = *self;
        for kind in NonlinearKind::ALL {
            *out.get_mut(kind) = f(kind, self.get(kind));
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        NonlinearKind::ALL.iter().all(|&k| self.get(k).is_finite())
    }
}

/// Difficulty identifiers `gamma_j`, `delta` of a discrete dynamic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifficultyCoefficients {
    pub gammas: Vec<f64>,
    #[serde(default)]
    pub deltas: NonlinearCoefficients,
    pub num_points: usize,
    pub num_dims: usize,
    /// Expected maximum absolute value of the state.
    #[serde(default = "default_max_abs")]
    pub max_abs: f64,
}

fn default_max_abs() -> f64 {
    1.0
}

/// Normalized coefficients `alpha_j = a_j dt / L^j` and `beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizedCoefficients {
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub betas: NonlinearCoefficients,
}

impl NormalizedCoefficients {
    /// Multiplies every coefficient, which amounts to scaling the time step.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            alphas: self.alphas.iter().map(|a| a * factor).collect(),
            betas: self.betas.map(|_, b| b * factor),
        }
    }
}

/// `N^j 2^(j-1) D`
fn linear_factor(j: usize, num_points: usize, num_dims: usize) -> f64 {
    (num_points as f64).powi(j as i32) * 2f64.powi(j as i32 - 1) * num_dims as f64
}

/// `N^e D m`
fn nonlinear_factor(kind: NonlinearKind, num_points: usize, num_dims: usize, max_abs: f64) -> f64 {
    (num_points as f64).powi(kind.derivative_order()) * num_dims as f64 * max_abs
}

fn validate(num_points: usize, num_dims: usize, max_abs: f64) -> Result<()> {
    if num_points == 0 || num_dims == 0 {
        return Err(Error::InvalidArgument("resolution and dimension must be positive".into()));
    }
    if !(max_abs.is_finite() && max_abs > 0.0) {
        return Err(Error::InvalidArgument(format!("max_abs must be positive, got {max_abs}")));
    }
    Ok(())
}

/// `alpha_j = gamma_j / (N^j 2^(j-1) D)`, `beta = delta / (N^e D m)`.
pub fn difficulty_to_normalized(diff: &DifficultyCoefficients) -> Result<NormalizedCoefficients> {
    validate(diff.num_points, diff.num_dims, diff.max_abs)?;
    Ok(NormalizedCoefficients {
        alphas: diff
            .gammas
            .iter()
            .enumerate()
            .map(|(j, g)| g / linear_factor(j, diff.num_points, diff.num_dims))
            .collect(),
        betas: diff
            .deltas
            .map(|k, d| d / nonlinear_factor(k, diff.num_points, diff.num_dims, diff.max_abs)),
    })
}

/// Inverse of [`difficulty_to_normalized`].
pub fn normalized_to_difficulty(
    norm: &NormalizedCoefficients,
    num_points: usize,
    num_dims: usize,
    max_abs: f64,
) -> Result<DifficultyCoefficients> {
    validate(num_points, num_dims, max_abs)?;
    Ok(DifficultyCoefficients {
        gammas: norm
            .alphas
            .iter()
            .enumerate()
            .map(|(j, a)| a * linear_factor(j, num_points, num_dims))
            .collect(),
        deltas: norm
            .betas
            .map(|k, b| b * nonlinear_factor(k, num_points, num_dims, max_abs)),
        num_points,
        num_dims,
        max_abs,
    })
}

/// Physical coefficients from normalized ones: `a_j = alpha_j L^j / dt`, `b = beta L^e / dt`.
pub fn normalized_to_physical(norm: &NormalizedCoefficients, extent: f64, dt: f64) -> (Vec<f64>, NonlinearCoefficients) {
    let linear = norm
        .alphas
        .iter()
        .enumerate()
        .map(|(j, a)| a * extent.powi(j as i32) / dt)
        .collect();
    let nonlinear = norm
        .betas
        .map(|k, b| b * extent.powi(k.derivative_order()) / dt);
    (linear, nonlinear)
}

/// Normalized coefficients from physical ones.
pub fn physical_to_normalized(linear: &[f64], nonlinear: &NonlinearCoefficients, extent: f64, dt: f64) -> NormalizedCoefficients {
    NormalizedCoefficients {
        alphas: linear
            .iter()
            .enumerate()
            .map(|(j, a)| a * dt / extent.powi(j as i32))
            .collect(),
        betas: nonlinear.map(|k, b| b * dt / extent.powi(k.derivative_order())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diff(gammas: Vec<f64>, n: usize, d: usize) -> DifficultyCoefficients {
        DifficultyCoefficients {
            gammas,
            deltas: NonlinearCoefficients::default(),
            num_points: n,
            num_dims: d,
            max_abs: 1.0,
        }
    }

    #[test]
    fn advection_difficulty() {
        let n = difficulty_to_normalized(&diff(vec![0.0, -4.0], 160, 1)).unwrap();
        assert_eq!(n.alphas[1], -0.025);
        let n3 = difficulty_to_normalized(&diff(vec![0.0, -4.0], 32, 3)).unwrap();
        assert!((n3.alphas[1] + 4.0 / 96.0).abs() < 1e-17);
    }

    #[test]
    fn diffusion_difficulty() {
        let n = difficulty_to_normalized(&diff(vec![0.0, 0.0, 4.0], 160, 1)).unwrap();
        assert_eq!(n.alphas[2], 7.8125e-5);
    }

    #[test]
    fn reaction_difficulty_uses_half_factor() {
        let n = difficulty_to_normalized(&diff(vec![0.02], 160, 1)).unwrap();
        assert!((n.alphas[0] - 0.04).abs() < 1e-17);
    }

    #[test]
    fn nonlinear_difficulty() {
        let mut d = diff(vec![0.0; 5], 160, 1);
        d.deltas = NonlinearCoefficients { conv: -1.5, conv_sc: 0.0, gn: -6.0, quad: -0.02 };
        let n = difficulty_to_normalized(&d).unwrap();
        assert!((n.betas.conv + 1.5 / 160.0).abs() < 1e-17);
        assert!((n.betas.gn + 6.0 / 25600.0).abs() < 1e-17);
        assert_eq!(n.betas.quad, -0.02);
    }

    #[test]
    fn inverse_examples() {
        let norm = NormalizedCoefficients { alphas: vec![0.0, -0.025], betas: Default::default() };
        let d = normalized_to_difficulty(&norm, 160, 1, 1.0).unwrap();
        assert_eq!(d.gammas[1], -4.0);
        let zero = NormalizedCoefficients { alphas: vec![0.0; 5], betas: Default::default() };
        let d = normalized_to_difficulty(&zero, 64, 2, 1.0).unwrap();
        assert!(d.gammas.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn rejects_bad_max_abs() {
        let mut d = diff(vec![1.0], 16, 1);
        d.max_abs = 0.0;
        assert!(difficulty_to_normalized(&d).is_err());
    }

    #[test]
    fn physical_roundtrip() {
        let norm = NormalizedCoefficients {
            alphas: vec![0.1, -0.2, 0.3, 0.4, -0.5],
            betas: NonlinearCoefficients { conv: 1.0, conv_sc: 2.0, gn: 3.0, quad: 4.0 },
        };
        let (lin, nl) = normalized_to_physical(&norm, 2.5, 0.1);
        let back = physical_to_normalized(&lin, &nl, 2.5, 0.1);
        for (a, b) in back.alphas.iter().zip(&norm.alphas) {
            assert!((a - b).abs() < 1e-14 * b.abs());
        }
        assert!((back.betas.gn - 3.0).abs() < 1e-14);
    }
}
