//! Exponential time differencing Runge-Kutta steppers of order 0 to 4.

mod coefficients;
mod stepper;
mod trajectory;

pub use coefficients::{phi_coefficients, EtdrkCoefficients};
pub use stepper::{make_stepper, NonlinearFunction, Stepper, DEFAULT_CONTOUR_POINTS, DEFAULT_CONTOUR_RADIUS};
pub use trajectory::Trajectory;
