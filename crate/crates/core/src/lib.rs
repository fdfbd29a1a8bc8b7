//! Fourier pseudo-spectral ETDRK solvers and an emulator benchmarking toolkit.

pub mod error;
pub mod etdrk;
pub mod metrics;
pub mod operators;
pub mod scenarios;
pub mod spectral;
pub mod train;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
pub use etdrk::{make_stepper, phi_coefficients, EtdrkCoefficients, NonlinearFunction, Stepper, Trajectory};
pub use spectral::*;
