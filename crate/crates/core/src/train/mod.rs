//! Emulators, unrolled training objectives and the Newton trainer.

mod emulator;
mod experiment;
mod newton;
mod objective;

pub use emulator::{
    compose_correction, fou_stencil, CorrectedEmulator, CorrectionLayout, CorrectionVariant, Emulator,
    IdentityEmulator, LinearStencilEmulator, SolverEmulator,
};
pub use experiment::{
    emulator_rollouts, run_stencil_experiment, train_sweep, ExperimentReport, ExperimentRow, StencilExperimentConfig,
    SweepPoint,
};
pub use newton::{finite_difference_derivatives, train_newton, NewtonOptions, NewtonResult};
pub use objective::{
    diverted_chain_objective, unrolled_objective, unrolled_objective_frozen, Methodology, TrainingData, UnrollConfig,
};
