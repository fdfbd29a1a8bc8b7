//! Benchmark registry, default scenarios, initial conditions and datasets.

mod coefficients;
mod dataset;
mod ic;
mod registry;
mod spec;

pub use coefficients::{
    difficulty_to_normalized, normalized_to_difficulty, normalized_to_physical, physical_to_normalized,
    DifficultyCoefficients, NonlinearCoefficients, NonlinearKind, NormalizedCoefficients, LINEAR_ORDERS,
};
pub use dataset::{
    dataset_initial_condition, generate_dataset, generate_split_with, sample_stream, Split, TrajectorySet,
    RNG_DESCRIPTION,
};
pub use ic::{sample_initial_condition, sample_with, seeded_rng, IcConfig};
pub use registry::{registry_list, Dynamic, DynamicDescriptor, InterfaceMode, ScenarioId};
pub use spec::{
    build_stepper_from_spec, default_difficulties, default_num_points, gray_scott_type, PhysicalConstants,
    PhysicalParameters, ScenarioCoefficients, ScenarioSpec, SplitRecipe, GRAY_SCOTT_TYPES, ISOTROPIC_PHYSICAL_DT,
};
