//! Fixtures shared by the benchmarks.

use emubench_core::scenarios::{sample_initial_condition, ScenarioSpec, SplitRecipe};
use emubench_core::SpatialField;

/// Default scenario at resolution `n` with its seed-0 initial condition.
pub fn fixture(id: &str, dims: usize, n: usize) -> (ScenarioSpec, SpatialField) {
    let mut spec = ScenarioSpec::resolve(id, dims).expect("known scenario");
    spec.set_num_points(n);
    let ic = sample_initial_condition(&spec, 0).expect("valid scenario");
    (spec, ic)
}

/// Small train split for generation throughput.
pub fn small_dataset_spec(id: &str, dims: usize, n: usize) -> ScenarioSpec {
    let (mut spec, _) = fixture(id, dims, n);
    spec.train = SplitRecipe { samples: 4, steps: 20 };
    spec
}
