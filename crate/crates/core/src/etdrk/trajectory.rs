use crate::error::{Error, Result};
use crate::spectral::{Grid, SpatialField};

/// Sequence of snapshots stored flat as `(time, channels, spatial...)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    channels: usize,
    data: Vec<f64>,
}

impl Trajectory {
    pub fn with_capacity(grid: Grid, channels: usize, snapshots: usize) -> Self {
        Self {
            grid,
            channels,
            data: Vec::with_capacity(snapshots * channels * grid.spatial_len()),
        }
    }

    pub fn from_vec(grid: Grid, channels: usize, data: Vec<f64>) -> Result<Self> {
        let frame = channels * grid.spatial_len();
        if channels == 0 || data.is_empty() || data.len() % frame != 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} values do not form whole snapshots of {frame}",
                data.len()
            )));
        }
        Ok(Self {
            grid,
            channels,
            data,
        })
    }

    pub fn from_snapshots(snapshots: &[SpatialField]) -> Result<Self> {
        let first = snapshots
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
        let mut traj = Self::with_capacity(*first.grid(), first.channels(), snapshots.len());
        for s in snapshots {
            first.check_same_shape(s)?;
            traj.push(s.data());
        }
        Ok(traj)
    }

    pub(crate) fn push(&mut self, snapshot: &[f64]) {
        debug_assert_eq!(snapshot.len(), self.frame_len());
        self.data.extend_from_slice(snapshot);
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Values per snapshot.
    pub fn frame_len(&self) -> usize {
        self.channels * self.grid.spatial_len()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.frame_len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn snapshot_slice(&self, t: usize) -> &[f64] {
        let f = self.frame_len();
        &self.data[t * f..(t + 1) * f]
    }

    pub fn snapshot(&self, t: usize) -> SpatialField {
        SpatialField::from_vec(self.grid, self.channels, self.snapshot_slice(t).to_vec())
            .expect("frame length matches grid")
    }

    pub fn last(&self) -> SpatialField {
        self.snapshot(self.len() - 1)
    }
}
