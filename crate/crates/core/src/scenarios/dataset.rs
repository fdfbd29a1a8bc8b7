use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ic::{sample_with, seeded_rng};
use super::spec::{ScenarioSpec, SplitRecipe};
use crate::error::{Error, Result};
use crate::etdrk::{Stepper, Trajectory};
use crate::spectral::{Grid, SpatialField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Split::Train => 0,
            Split::Test => 1,
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidArgument(format!("unknown split {other:?}"))),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Random stream of one dataset sample; stream 0 stays reserved for single draws.
pub fn sample_stream(split: Split, sample: usize) -> u64 {
    ((split.tag() + 1) << 32) | sample as u64
}

/// Human-readable description of the seed derivation.
pub const RNG_DESCRIPTION: &str =
    "ChaCha20 seeded from the u64 seed; stream ((split_tag + 1) << 32) | sample_index, split_tag train=0 test=1";

/// Trajectories of one split, laid out as `(samples, time, channels, spatial...)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySet {
    spec: ScenarioSpec,
    split: Split,
    seed: u64,
    grid: Grid,
    samples: usize,
    time_steps: usize,
    channels: usize,
    data: Vec<f64>,
}

impl TrajectorySet {
    pub fn from_vec(spec: ScenarioSpec, split: Split, seed: u64, samples: usize, time_steps: usize, data: Vec<f64>) -> Result<Self> {
        let grid = spec.grid()?;
        let channels = spec.channels();
        if data.len() != samples * time_steps * channels * grid.spatial_len() || samples == 0 || time_steps == 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} values cannot hold {samples} x {time_steps} snapshots",
                data.len()
            )));
        }
        Ok(Self { spec, split, seed, grid, samples, time_steps, channels, data })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn num_samples(&self) -> usize {
        self.samples
    }

    /// Snapshots per trajectory, initial state included.
    pub fn time_steps(&self) -> usize {
        self.time_steps
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// `[S, T+1, C, N, ..., N]`
    pub fn shape(&self) -> Vec<usize> {
        let mut shape = vec![self.samples, self.time_steps, self.channels];
        shape.extend(self.grid.spatial_shape());
        shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    fn frame_len(&self) -> usize {
        self.channels * self.grid.spatial_len()
    }

    pub fn trajectory_slice(&self, sample: usize) -> &[f64] {
        let len = self.time_steps * self.frame_len();
        &self.data[sample * len..(sample + 1) * len]
    }

    pub fn trajectory(&self, sample: usize) -> Trajectory {
        Trajectory::from_vec(self.grid, self.channels, self.trajectory_slice(sample).to_vec())
            .expect("consistent layout")
    }

    pub fn snapshot(&self, sample: usize, t: usize) -> SpatialField {
        let f = self.frame_len();
        let start = (sample * self.time_steps + t) * f;
        SpatialField::from_vec(self.grid, self.channels, self.data[start..start + f].to_vec())
            .expect("consistent layout")
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

fn recipe(spec: &ScenarioSpec, split: Split) -> SplitRecipe {
    match split {
        Split::Train => spec.train,
        Split::Test => spec.test,
    }
}

/// Draws the initial condition of one dataset sample.
pub fn dataset_initial_condition(spec: &ScenarioSpec, split: Split, seed: u64, sample: usize) -> Result<SpatialField> {
    let mut rng = seeded_rng(seed, sample_stream(split, sample));
    sample_with(&spec.ic, spec.grid()?, spec.channels(), &mut rng)
}

fn simulate(stepper: &Stepper, spec: &ScenarioSpec, split: Split, seed: u64, sample: usize, steps: usize) -> Result<Trajectory> {
    let ic = dataset_initial_condition(spec, split, seed, sample)?;
    stepper.rollout(&ic, steps, spec.warmup).map_err(|e| match e {
        Error::Diverged { step } => Error::SampleDiverged { sample, step },
        other => other,
    })
}

/// Generates a split, handing each trajectory to `sink` in sample order.
///
/// Samples are simulated in parallel in batches of `batch` so only that many
/// trajectories are held in memory at once.
pub fn generate_split_with(
    spec: &ScenarioSpec,
    split: Split,
    seed: u64,
    batch: usize,
    mut sink: impl FnMut(usize, Trajectory) -> Result<()>,
) -> Result<()> {
    let stepper = spec.build_stepper()?;
    let r = recipe(spec, split);
    let batch = batch.max(1);
    for start in (0..r.samples).step_by(batch) {
        let end = (start + batch).min(r.samples);
        let results: Vec<Result<Trajectory>> = (start..end)
            .into_par_iter()
            .map(|i| simulate(&stepper, spec, split, seed, i, r.steps))
            .collect();
        for (offset, traj) in results.into_iter().enumerate() {
            sink(start + offset, traj?)?;
        }
    }
    Ok(())
}

/// Generates the full train or test split of `spec`.
pub fn generate_dataset(spec: &ScenarioSpec, split: Split, seed: u64) -> Result<TrajectorySet> {
    let r = recipe(spec, split);
    let frame = spec.channels() * spec.grid()?.spatial_len();
    let mut data = Vec::with_capacity(r.samples * (r.steps + 1) * frame);
    generate_split_with(spec, split, seed, rayon::current_num_threads().max(1) * 2, |_, traj| {
        data.extend_from_slice(traj.data());
        Ok(())
    })?;
    TrajectorySet::from_vec(spec.clone(), split, seed, r.samples, r.steps + 1, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(id: &str, dims: usize, n: usize) -> ScenarioSpec {
        let mut spec = ScenarioSpec::resolve(id, dims).unwrap();
        spec.set_num_points(n);
        spec.train = SplitRecipe { samples: 3, steps: 4 };
        spec.test = SplitRecipe { samples: 2, steps: 6 };
        spec
    }

    #[test]
    fn shapes_follow_recipe() {
        let spec = small("diff_burgers", 2, 16);
        let train = generate_dataset(&spec, Split::Train, 0).unwrap();
        assert_eq!(train.shape(), vec![3, 5, 2, 16, 16]);
        let test = generate_dataset(&spec, Split::Test, 0).unwrap();
        assert_eq!(test.shape(), vec![2, 7, 2, 16, 16]);
        assert!(train.is_finite() && test.is_finite());
    }

    #[test]
    fn deterministic_and_split_disjoint() {
        let spec = small("diff_adv", 1, 32);
        let a = generate_dataset(&spec, Split::Train, 9).unwrap();
        let b = generate_dataset(&spec, Split::Train, 9).unwrap();
        assert_eq!(a.data(), b.data());
        let test = generate_dataset(&spec, Split::Test, 9).unwrap();
        assert_ne!(a.snapshot(0, 0).data(), test.snapshot(0, 0).data());
    }

    #[test]
    fn batch_size_does_not_change_result() {
        let spec = small("diff_ks", 1, 32);
        let mut one = Vec::new();
        generate_split_with(&spec, Split::Train, 1, 1, |_, t| {
            one.extend_from_slice(t.data());
            Ok(())
        })
        .unwrap();
        let full = generate_dataset(&spec, Split::Train, 1).unwrap();
        assert_eq!(one, full.data());
    }

    #[test]
    fn first_snapshot_is_initial_condition_without_warmup() {
        let spec = small("diff_diff", 1, 32);
        let set = generate_dataset(&spec, Split::Test, 4).unwrap();
        let ic = dataset_initial_condition(&spec, Split::Test, 4, 1).unwrap();
        assert_eq!(set.snapshot(1, 0).data(), ic.data());
    }

    #[test]
    fn divergence_names_sample() {
        let mut spec = small("diff_burgers", 1, 32);
        if let super::super::spec::ScenarioCoefficients::Difficulty(d) = &mut spec.coefficients {
            d.gammas = vec![0.0, 0.0, -500.0];
        }
        match generate_dataset(&spec, Split::Train, 0) {
            Err(Error::SampleDiverged { sample, .. }) => assert_eq!(sample, 0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
