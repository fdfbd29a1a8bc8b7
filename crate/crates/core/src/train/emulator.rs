use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etdrk::Stepper;
use crate::spectral::{Grid, SpatialField};

/// Parameterized one-step map `f_theta`.
///
/// States are flat `(channels, spatial...)` buffers; `apply` must be a pure
/// function of `theta` and the input.
pub trait Emulator: Send + Sync + fmt::Debug {
    fn num_params(&self) -> usize;

    fn grid(&self) -> &Grid;

    fn channels(&self) -> usize;

    fn apply_into(&self, theta: &[f64], input: &[f64], output: &mut [f64]) -> Result<()>;

    fn state_len(&self) -> usize {
        self.channels() * self.grid().spatial_len()
    }

    fn check(&self, theta: &[f64], input: &[f64], output: &[f64]) -> Result<()> {
        if theta.len() != self.num_params() {
            return Err(Error::ShapeMismatch(format!(
                "emulator takes {} parameters, got {}",
                self.num_params(),
                theta.len()
            )));
        }
        if input.len() != self.state_len() || output.len() != self.state_len() {
            return Err(Error::ShapeMismatch(format!(
                "emulator states hold {} values, got {} and {}",
                self.state_len(),
                input.len(),
                output.len()
            )));
        }
        Ok(())
    }

    fn apply(&self, theta: &[f64], state: &SpatialField) -> Result<SpatialField> {
        let mut out = vec![0.0; state.data().len()];
        self.apply_into(theta, state.data(), &mut out)?;
        SpatialField::from_vec(*state.grid(), state.channels(), out)
    }
}

/// Kernel-size-two circular cross-correlation `out_i = theta_c u_i + theta_r u_(i+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearStencilEmulator {
    grid: Grid,
    channels: usize,
}

impl LinearStencilEmulator {
    pub fn new(grid: Grid, channels: usize) -> Result<Self> {
        if grid.num_dims() != 1 {
            return Err(Error::InvalidArgument("the stencil emulator is one-dimensional".into()));
        }
        if channels == 0 {
            return Err(Error::InvalidArgument("the stencil emulator needs a channel".into()));
        }
        Ok(Self { grid, channels })
    }
}

impl Emulator for LinearStencilEmulator {
    fn num_params(&self) -> usize {
        2
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn channels(&self) -> usize {
        self.channels
    }

    fn apply_into(&self, theta: &[f64], input: &[f64], output: &mut [f64]) -> Result<()> {
        self.check(theta, input, output)?;
        let n = self.grid.num_points();
        let (c, r) = (theta[0], theta[1]);
        for (u, o) in input.chunks_exact(n).zip(output.chunks_exact_mut(n)) {
            for i in 0..n - 1 {
                o[i] = c * u[i] + r * u[i + 1];
            }
            o[n - 1] = c * u[n - 1] + r * u[0];
        }
        Ok(())
    }
}

/// First-order upwind stencil `[1 - gamma_1, gamma_1]` of advection with `gamma_1 = -c dt / dx`.
pub fn fou_stencil(gamma1: f64) -> [f64; 2] {
    [1.0 - gamma1, gamma1]
}

/// Parameter-free emulator that returns its input.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityEmulator {
    grid: Grid,
    channels: usize,
}

impl IdentityEmulator {
    pub fn new(grid: Grid, channels: usize) -> Self {
        Self { grid, channels }
    }
}

impl Emulator for IdentityEmulator {
    fn num_params(&self) -> usize {
        0
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn channels(&self) -> usize {
        self.channels
    }

    fn apply_into(&self, theta: &[f64], input: &[f64], output: &mut [f64]) -> Result<()> {
        self.check(theta, input, output)?;
        output.copy_from_slice(input);
        Ok(())
    }
}

/// Parameter-free emulator backed by an ETDRK stepper.
#[derive(Debug)]
pub struct SolverEmulator {
    stepper: Stepper,
    channels: usize,
}

impl SolverEmulator {
    pub fn new(stepper: Stepper, channels: usize) -> Result<Self> {
        if let Some(c) = stepper.channels() {
            if c != channels {
                return Err(Error::ShapeMismatch(format!(
                    "stepper expects {c} channel(s), emulator configured for {channels}"
                )));
            }
        }
        Ok(Self { stepper, channels })
    }

    pub fn stepper(&self) -> &Stepper {
        &self.stepper
    }
}

/// One stepper application on a flat buffer.
pub(crate) fn step_slice(stepper: &Stepper, channels: usize, input: &[f64], output: &mut [f64]) -> Result<()> {
    let field = SpatialField::from_vec(*stepper.grid(), channels, input.to_vec())?;
    output.copy_from_slice(stepper.step(&field)?.data());
    Ok(())
}

impl Emulator for SolverEmulator {
    fn num_params(&self) -> usize {
        0
    }

    fn grid(&self) -> &Grid {
        self.stepper.grid()
    }

    fn channels(&self) -> usize {
        self.channels
    }

    fn apply_into(&self, theta: &[f64], input: &[f64], output: &mut [f64]) -> Result<()> {
        self.check(theta, input, output)?;
        step_slice(&self.stepper, self.channels, input, output)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionVariant {
    /// Pure prediction: the corrector alone.
    #[default]
    None,
    /// `f = corrector(coarse(u))`
    Sequential,
    /// `f = coarse(u) + corrector(u)`
    Parallel,
}

/// How a corrector is combined with a coarse solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrectionLayout {
    pub variant: CorrectionVariant,
    /// Fraction of the reference time step advanced by the coarse solver.
    pub coarse_proportion: f64,
}

/// Neural-hybrid emulator made of a coarse stepper and a corrector.
#[derive(Debug)]
pub struct CorrectedEmulator<E> {
    variant: CorrectionVariant,
    coarse: Stepper,
    corrector: E,
}

/// Combines `corrector` with `coarse` according to `variant`.
pub fn compose_correction<E: Emulator>(variant: CorrectionVariant, coarse: Stepper, corrector: E) -> Result<CorrectedEmulator<E>> {
    if coarse.grid() != corrector.grid() {
        return Err(Error::ShapeMismatch("coarse solver and corrector live on different grids".into()));
    }
    if let Some(c) = coarse.channels() {
        if c != corrector.channels() {
            return Err(Error::ShapeMismatch(format!(
                "coarse solver has {c} channel(s), corrector {}",
                corrector.channels()
            )));
        }
    }
    Ok(CorrectedEmulator {
        variant,
        coarse,
        corrector,
    })
}

impl<E: Emulator> CorrectedEmulator<E> {
    pub fn corrector(&self) -> &E {
        &self.corrector
    }

    pub fn coarse(&self) -> &Stepper {
        &self.coarse
    }
}

impl<E: Emulator> Emulator for CorrectedEmulator<E> {
    fn num_params(&self) -> usize {
        self.corrector.num_params()
    }

    fn grid(&self) -> &Grid {
        self.corrector.grid()
    }

    fn channels(&self) -> usize {
        self.corrector.channels()
    }

    fn apply_into(&self, theta: &[f64], input: &[f64], output: &mut [f64]) -> Result<()> {
        self.check(theta, input, output)?;
        match self.variant {
            CorrectionVariant::None => self.corrector.apply_into(theta, input, output),
            CorrectionVariant::Sequential => {
                let mut coarse = vec![0.0; input.len()];
                step_slice(&self.coarse, self.channels(), input, &mut coarse)?;
                self.corrector.apply_into(theta, &coarse, output)
            }
            CorrectionVariant::Parallel => {
                let mut coarse = vec![0.0; input.len()];
                step_slice(&self.coarse, self.channels(), input, &mut coarse)?;
                self.corrector.apply_into(theta, input, output)?;
                output.iter_mut().zip(&coarse).for_each(|(o, c)| *o += c);
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{sample_initial_condition, ScenarioSpec};

    #[test]
    fn fou_examples() {
        assert_eq!(fou_stencil(0.75), [0.25, 0.75]);
        assert_eq!(fou_stencil(0.0), [1.0, 0.0]);
        assert_eq!(fou_stencil(1.0), [0.0, 1.0]);
    }

    #[test]
    fn unit_stencil_matches_solver_shift() {
        let mut spec = ScenarioSpec::resolve("diff_adv", 1).unwrap();
        spec.set_num_points(30);
        if let crate::scenarios::ScenarioCoefficients::Difficulty(d) = &mut spec.coefficients {
            d.gammas = vec![0.0, 1.0];
        }
        let solver = spec.build_stepper().unwrap();
        let u = sample_initial_condition(&spec, 0).unwrap();
        let exact = solver.step(&u).unwrap();
        let stencil = LinearStencilEmulator::new(*u.grid(), 1).unwrap();
        let approx = stencil.apply(&fou_stencil(1.0), &u).unwrap();
        assert!(exact.max_abs_diff(&approx) < 1e-12);
    }

    #[test]
    fn stencil_is_linear() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let e = LinearStencilEmulator::new(g, 1).unwrap();
        let u = SpatialField::from_fn(g, 1, |_, x| x[0] * x[0]);
        let a = e.apply(&[0.3, 0.2], &u).unwrap();
        let b = e.apply(&[0.6, 0.4], &u).unwrap();
        assert!(a.scaled(2.0).max_abs_diff(&b) < 1e-15);
        assert!(e.apply(&[1.0], &u).is_err());
    }

    #[test]
    fn correction_layouts() {
        let mut spec = ScenarioSpec::resolve("diff_burgers", 1).unwrap();
        spec.set_num_points(32);
        let u = sample_initial_condition(&spec, 1).unwrap();
        let g = *u.grid();
        let stencil = LinearStencilEmulator::new(g, 1).unwrap();
        let theta = [0.4, 0.5];

        let none = compose_correction(CorrectionVariant::Sequential, spec.build_scaled_stepper(0.0).unwrap(), stencil.clone()).unwrap();
        assert_eq!(none.apply(&theta, &u).unwrap(), stencil.apply(&theta, &u).unwrap());

        let exact = compose_correction(CorrectionVariant::Sequential, spec.build_stepper().unwrap(), IdentityEmulator::new(g, 1)).unwrap();
        assert_eq!(exact.apply(&[], &u).unwrap(), spec.build_stepper().unwrap().step(&u).unwrap());

        let seq = compose_correction(CorrectionVariant::Sequential, spec.build_scaled_stepper(0.5).unwrap(), stencil.clone()).unwrap();
        let par = compose_correction(CorrectionVariant::Parallel, spec.build_scaled_stepper(0.5).unwrap(), stencil).unwrap();
        assert!(seq.apply(&theta, &u).unwrap().max_abs_diff(&par.apply(&theta, &u).unwrap()) > 1e-3);
    }
}
