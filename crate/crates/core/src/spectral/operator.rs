use rustfft::num_complex::Complex64;

use super::{Grid, SpectralField, WavenumberGrid};
use crate::error::{Error, Result};

/// Elementwise complex multiplier over the half-spectrum layout.
///
/// Either one diagonal shared by every channel or one diagonal per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalLinearOperator {
    grid: Grid,
    diagonals: Vec<Vec<Complex64>>,
    shared: bool,
}

impl DiagonalLinearOperator {
    pub fn zero(grid: Grid) -> Self {
        Self::shared(grid, vec![Complex64::new(0.0, 0.0); grid.spectral_len()])
            .expect("length matches grid")
    }

    /// Same diagonal for every channel.
    pub fn shared(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, &values)?;
        Ok(Self {
            grid,
            diagonals: vec![values],
            shared: true,
        })
    }

    /// One diagonal per channel.
    pub fn per_channel(grid: Grid, diagonals: Vec<Vec<Complex64>>) -> Result<Self> {
        if diagonals.is_empty() {
            return Err(Error::InvalidArgument("no channel diagonals given".into()));
        }
        for d in &diagonals {
            check_len(&grid, d)?;
        }
        Ok(Self {
            grid,
            diagonals,
            shared: false,
        })
    }

    /// Stacks shared operators into a per-channel operator.
    pub fn stack(ops: &[DiagonalLinearOperator]) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("nothing to stack".into()))?;
        let mut diagonals = Vec::new();
        for op in ops {
            if op.grid != first.grid {
                return Err(Error::ShapeMismatch("stacked operators differ in grid".into()));
            }
            diagonals.extend(op.diagonals.iter().cloned());
        }
        Self::per_channel(first.grid, diagonals)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Channel count the operator is tied to; `None` when shared.
    pub fn channels(&self) -> Option<usize> {
        (!self.shared).then_some(self.diagonals.len())
    }

    pub fn channel_values(&self, channel: usize) -> &[Complex64] {
        if self.shared {
            &self.diagonals[0]
        } else {
            &self.diagonals[channel]
        }
    }

    pub fn check_channels(&self, channels: usize) -> Result<()> {
        match self.channels() {
            Some(c) if c != channels => Err(Error::ShapeMismatch(format!(
                "operator has {c} channel diagonal(s), field has {channels} channel(s)"
            ))),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, field: &SpectralField) -> Result<SpectralField> {
        if field.grid() != &self.grid {
            return Err(Error::ShapeMismatch("operator and field grids differ".into()));
        }
        self.check_channels(field.channels())?;
        let mut out = field.clone();
        for c in 0..out.channels() {
            let diag = self.channel_values(c);
            for (v, m) in out.channel_mut(c).iter_mut().zip(diag) {
                *v *= m;
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            diagonals: self
                .diagonals
                .iter()
                .map(|d| d.iter().map(|v| v * factor).collect())
                .collect(),
            shared: self.shared,
        }
    }

    /// Elementwise sum; shared operators broadcast against per-channel ones.
    pub fn added(&self, other: &DiagonalLinearOperator) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch("operator grids differ".into()));
        }
        let channels = match (self.channels(), other.channels()) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::ShapeMismatch(format!(
                    "operators carry {a} and {b} channel diagonals"
                )))
            }
            (Some(a), _) | (_, Some(a)) => Some(a),
            (None, None) => None,
        };
        let count = channels.unwrap_or(1);
        let diagonals = (0..count)
            .map(|c| {
                self.channel_values(c)
                    .iter()
                    .zip(other.channel_values(c))
                    .map(|(a, b)| a + b)
                    .collect()
            })
            .collect();
        Ok(Self {
            grid: self.grid,
            diagonals,
            shared: channels.is_none(),
        })
    }

    /// Adds a constant to every entry.
    pub fn shifted(&self, offset: Complex64) -> Self {
        Self {
            grid: self.grid,
            diagonals: self
                .diagonals
                .iter()
                .map(|d| d.iter().map(|v| v + offset).collect())
                .collect(),
            shared: self.shared,
        }
    }

    /// Elementwise product.
    pub fn multiplied(&self, other: &DiagonalLinearOperator) -> Result<Self> {
        if self.shared != other.shared || self.diagonals.len() != other.diagonals.len() {
            return Err(Error::ShapeMismatch(
                "only operators of equal channel layout can be multiplied".into(),
            ));
        }
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch("operator grids differ".into()));
        }
        Ok(Self {
            grid: self.grid,
            diagonals: self
                .diagonals
                .iter()
                .zip(&other.diagonals)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).collect())
                .collect(),
            shared: self.shared,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.diagonals
            .iter()
            .flatten()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.diagonals.iter().flatten().all(|v| v.norm_sqr() == 0.0)
    }
}

fn check_len(grid: &Grid, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.spectral_len() {
        return Err(Error::ShapeMismatch(format!(
            "diagonal has {} entries, spectral layout {:?} needs {}",
            values.len(),
            grid.spectral_shape(),
            grid.spectral_len()
        )));
    }
    Ok(())
}

/// `(i 2 pi k_axis / L)^order` for every bin. Odd orders zero the Nyquist
/// bins of `axis` so derivatives of real fields stay real.
pub fn derivative_diagonal(grid: Grid, order: u32, axis: usize) -> Result<DiagonalLinearOperator> {
    if order == 0 {
        return Err(Error::InvalidArgument("derivative order must be at least 1".into()));
    }
    if axis >= grid.num_dims() {
        return Err(Error::InvalidArgument(format!(
            "axis {axis} out of range for a {}-d grid",
            grid.num_dims()
        )));
    }
    let wavenumbers = WavenumberGrid::new(grid);
    DiagonalLinearOperator::shared(grid, derivative_values(&wavenumbers, order, axis))
}

pub(crate) fn derivative_values(wavenumbers: &WavenumberGrid, order: u32, axis: usize) -> Vec<Complex64> {
    let kappa = wavenumbers.kappa(axis);
    kappa
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            if order % 2 == 1 && wavenumbers.is_nyquist(axis, i) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k).powi(order as i32)
            }
        })
        .collect()
}
