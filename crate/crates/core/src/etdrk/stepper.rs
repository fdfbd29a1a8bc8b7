use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::{phi_coefficients, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{DiagonalLinearOperator, Grid, SpatialField, SpectralField, SpectralTransform};

pub const DEFAULT_CONTOUR_RADIUS: f64 = 1.0;
pub const DEFAULT_CONTOUR_POINTS: usize = 16;

/// Pseudo-spectral nonlinear term `N(u_hat)`.
///
/// Implementations mask their input with their dealiasing mask before
/// forming any pointwise product.
pub trait NonlinearFunction: Send + Sync + fmt::Debug {
    fn grid(&self) -> &Grid;

    fn channels(&self) -> usize;

    /// Evaluates on a flat `(channels, spectral)` buffer, overwriting `output`.
    fn evaluate_into(&self, input: &[Complex64], output: &mut [Complex64]);

    fn evaluate(&self, input: &SpectralField) -> Result<SpectralField> {
        if input.grid() != self.grid() || input.channels() != self.channels() {
            return Err(Error::ShapeMismatch(format!(
                "nonlinearity expects {} channel(s) on {:?}, got {} on {:?}",
                self.channels(),
                self.grid(),
                input.channels(),
                input.grid()
            )));
        }
        let mut out = SpectralField::zeros(*self.grid(), self.channels());
        self.evaluate_into(input.data(), out.data_mut());
        Ok(out)
    }
}

/// Coefficients already multiplied by the internal step size.
#[derive(Clone, Debug)]
struct StageCoefficients {
    e: Vec<Complex64>,
    eh: Vec<Complex64>,
    c1: Vec<Complex64>,
    ch: Vec<Complex64>,
    c2: Vec<Complex64>,
    ca: Vec<Complex64>,
    cb: Vec<Complex64>,
    cc: Vec<Complex64>,
}

impl StageCoefficients {
    fn new(diagonal: &[Complex64], dt: f64, order: u8) -> Result<Self> {
        let z: Vec<Complex64> = diagonal.iter().map(|v| v * dt).collect();
        let g = phi_coefficients(&z, order, DEFAULT_CONTOUR_RADIUS, DEFAULT_CONTOUR_POINTS)?;
        let scale = |v: Vec<Complex64>| v.into_iter().map(|x| x * dt).collect::<Vec<_>>();
        Ok(Self {
            e: g.exp,
            eh: g.exp_half,
            c1: scale(g.g1),
            ch: scale(g.g_half),
            c2: scale(g.g2),
            ca: scale(g.g_a),
            cb: scale(g.g_b),
            cc: scale(g.g_c),
        })
    }
}

/// Precomputed ETDRK time stepper advancing a state by `dt` through
/// `substeps` internal steps.
#[derive(Clone)]
pub struct Stepper {
    grid: Grid,
    channels: Option<usize>,
    dt: f64,
    order: u8,
    substeps: usize,
    identity: bool,
    coefficients: Vec<StageCoefficients>,
    nonlinear: Option<Arc<dyn NonlinearFunction>>,
    transform: SpectralTransform,
}

impl fmt::Debug for Stepper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stepper")
            .field("grid", &self.grid)
            .field("channels", &self.channels)
            .field("dt", &self.dt)
            .field("order", &self.order)
            .field("substeps", &self.substeps)
            .field("nonlinear", &self.nonlinear)
            .finish_non_exhaustive()
    }
}

/// Builds an ETDRK stepper. Without a nonlinearity the order is treated as 0.
pub fn make_stepper(
    linear: &DiagonalLinearOperator,
    nonlinear: Option<Arc<dyn NonlinearFunction>>,
    dt: f64,
    order: u8,
    substeps: usize,
) -> Result<Stepper> {
    Stepper::new(linear, nonlinear, dt, order, substeps)
}

impl Stepper {
    pub fn new(
        linear: &DiagonalLinearOperator,
        nonlinear: Option<Arc<dyn NonlinearFunction>>,
        dt: f64,
        order: u8,
        substeps: usize,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        if order > 4 {
            return Err(Error::InvalidArgument(format!("ETDRK order must be 0..=4, got {order}")));
        }
        if substeps == 0 {
            return Err(Error::InvalidArgument("substeps must be at least 1".into()));
        }
        if !linear.is_finite() {
            return Err(Error::InvalidArgument("linear operator has non-finite entries".into()));
        }
        let grid = *linear.grid();
        let mut channels = linear.channels();
        if let Some(nl) = &nonlinear {
            if nl.grid() != &grid {
                return Err(Error::ShapeMismatch("linear and nonlinear parts live on different grids".into()));
            }
            linear.check_channels(nl.channels())?;
            channels = Some(nl.channels());
        }
        let order = if nonlinear.is_some() { order } else { 0 };
        let h = dt / substeps as f64;
        let coefficients = (0..linear.channels().unwrap_or(1))
            .map(|c| StageCoefficients::new(linear.channel_values(c), h, order))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            channels,
            dt,
            order,
            substeps,
            identity: nonlinear.is_none() && linear.is_zero(),
            coefficients,
            nonlinear,
            transform: SpectralTransform::new(grid),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Channel count fixed by the dynamics, `None` if any count is accepted.
    pub fn channels(&self) -> Option<usize> {
        self.channels
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Effective order (0 when there is no nonlinearity).
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn nonlinear(&self) -> Option<&Arc<dyn NonlinearFunction>> {
        self.nonlinear.as_ref()
    }

    pub fn transform(&self) -> &SpectralTransform {
        &self.transform
    }

    /// True if the stepper maps every state onto itself.
    pub fn is_identity(&self) -> bool {
        self.identity
    }

    fn check_field(&self, grid: &Grid, channels: usize) -> Result<()> {
        if grid != &self.grid {
            return Err(Error::ShapeMismatch(format!(
                "stepper runs on {:?}, state lives on {:?}",
                self.grid, grid
            )));
        }
        match self.channels {
            Some(c) if c != channels => Err(Error::ShapeMismatch(format!(
                "stepper expects {c} channel(s), state has {channels}"
            ))),
            _ => Ok(()),
        }
    }

    fn coef(&self, channel: usize) -> &StageCoefficients {
        &self.coefficients[if self.coefficients.len() == 1 { 0 } else { channel }]
    }

    /// One public step of a spatial state.
    pub fn step(&self, state: &SpatialField) -> Result<SpatialField> {
        self.check_field(state.grid(), state.channels())?;
        if self.identity {
            return Ok(state.clone());
        }
        let mut u_hat = self.transform.forward(state)?;
        self.advance_spectral(u_hat.data_mut());
        let out = self.transform.inverse(&u_hat)?;
        if !out.is_finite() {
            return Err(Error::Diverged { step: 0 });
        }
        Ok(out)
    }

    /// One public step in Fourier space.
    pub fn step_spectral(&self, state: &SpectralField) -> Result<SpectralField> {
        self.check_field(state.grid(), state.channels())?;
        let mut out = state.clone();
        if !self.identity {
            self.advance_spectral(out.data_mut());
        }
        if !out.is_finite() {
            return Err(Error::Diverged { step: 0 });
        }
        Ok(out)
    }

    /// Applies `substeps` internal steps to a flat `(channels, spectral)` buffer.
    pub fn advance_spectral(&self, u: &mut [Complex64]) {
        if self.identity {
            return;
        }
        let slen = self.grid.spectral_len();
        let channels = u.len() / slen;
        match (&self.nonlinear, self.order) {
            (None, _) | (_, 0) => {
                for _ in 0..self.substeps {
                    for c in 0..channels {
                        let k = self.coef(c);
                        for (v, e) in u[c * slen..(c + 1) * slen].iter_mut().zip(&k.e) {
                            *v *= e;
                        }
                    }
                }
            }
            (Some(nl), order) => {
                let mut ws = Workspace::new(u.len());
                for _ in 0..self.substeps {
                    match order {
                        1 => self.etdrk1(nl.as_ref(), u, &mut ws, slen),
                        2 => self.etdrk2(nl.as_ref(), u, &mut ws, slen),
                        3 => self.etdrk3(nl.as_ref(), u, &mut ws, slen),
                        _ => self.etdrk4(nl.as_ref(), u, &mut ws, slen),
                    }
                }
            }
        }
    }

    /// Runs over every (channel, mode) pair with the matching coefficients.
    fn for_each_mode(&self, len: usize, slen: usize, mut f: impl FnMut(usize, usize, &StageCoefficients)) {
        for c in 0..len / slen {
            let k = self.coef(c);
            for j in 0..slen {
                f(c * slen + j, j, k);
            }
        }
    }

    fn etdrk1(&self, nl: &dyn NonlinearFunction, u: &mut [Complex64], ws: &mut Workspace, slen: usize) {
        nl.evaluate_into(u, &mut ws.n0);
        let n0 = &ws.n0;
        self.for_each_mode(u.len(), slen, |i, j, k| {
            u[i] = k.e[j] * u[i] + k.c1[j] * n0[i];
        });
    }

    fn etdrk2(&self, nl: &dyn NonlinearFunction, u: &mut [Complex64], ws: &mut Workspace, slen: usize) {
        nl.evaluate_into(u, &mut ws.n0);
        {
            let (a, n0) = (&mut ws.a, &ws.n0);
            self.for_each_mode(u.len(), slen, |i, j, k| {
                a[i] = k.e[j] * u[i] + k.c1[j] * n0[i];
            });
        }
        nl.evaluate_into(&ws.a, &mut ws.na);
        let (a, n0, na) = (&ws.a, &ws.n0, &ws.na);
        self.for_each_mode(u.len(), slen, |i, j, k| {
            u[i] = a[i] + k.c2[j] * (na[i] - n0[i]);
        });
    }

    fn etdrk3(&self, nl: &dyn NonlinearFunction, u: &mut [Complex64], ws: &mut Workspace, slen: usize) {
        nl.evaluate_into(u, &mut ws.n0);
        {
            let (a, n0) = (&mut ws.a, &ws.n0);
            self.for_each_mode(u.len(), slen, |i, j, k| {
                a[i] = k.eh[j] * u[i] + k.ch[j] * n0[i];
            });
        }
        nl.evaluate_into(&ws.a, &mut ws.na);
        {
            let (b, n0, na) = (&mut ws.b, &ws.n0, &ws.na);
            self.for_each_mode(u.len(), slen, |i, j, k| {
                b[i] = k.e[j] * u[i] + k.c1[j] * (2.0 * na[i] - n0[i]);
            });
        }
        nl.evaluate_into(&ws.b, &mut ws.nb);
        let (n0, na, nb) = (&ws.n0, &ws.na, &ws.nb);
        self.for_each_mode(u.len(), slen, |i, j, k| {
            u[i] = k.e[j] * u[i] + k.ca[j] * n0[i] + 4.0 * k.cb[j] * na[i] + k.cc[j] * nb[i];
        });
    }

    fn etdrk4(&self, nl: &dyn NonlinearFunction, u: &mut [Complex64], ws: &mut Workspace, slen: usize) {
        nl.evaluate_into(u, &mut ws.n0);
        {
            let (a, n0) = (&mut ws.a, &ws.n0);
            self.for_each_mode(u.len(), slen, |i, j, k| {
                a[i] = k.eh[j] * u[i] + k.ch[j] * n0[i];
            });
        }
        nl.evaluate_into(&ws.a, &mut ws.na);
        {
            let (b, na) = (&mut ws.b, &ws.na);
            self.for_each_mode(u.len(), slen, |i, j, k| {
                b[i] = k.eh[j] * u[i] + k.ch[j] * na[i];
            });
        }
        nl.evaluate_into(&ws.b, &mut ws.nb);
        {
            let (c, a, n0, nb) = (&mut ws.c, &ws.a, &ws.n0, &ws.nb);
            self.for_each_mode(u.len(), slen, |i, j, k| {
                c[i] = k.eh[j] * a[i] + k.ch[j] * (2.0 * nb[i] - n0[i]);
            });
        }
        nl.evaluate_into(&ws.c, &mut ws.nc);
        let (n0, na, nb, nc) = (&ws.n0, &ws.na, &ws.nb, &ws.nc);
        self.for_each_mode(u.len(), slen, |i, j, k| {
            u[i] = k.e[j] * u[i]
                + k.ca[j] * n0[i]
                + 2.0 * k.cb[j] * (na[i] + nb[i])
                + k.cc[j] * nc[i];
        });
    }

    /// Autoregressive rollout; `warmup` steps are taken first and discarded.
    ///
    /// The result holds `num_steps + 1` snapshots, the first being the
    /// post-warmup state.
    pub fn rollout(&self, ic: &SpatialField, num_steps: usize, warmup: usize) -> Result<Trajectory> {
        let mut traj = Trajectory::with_capacity(*ic.grid(), ic.channels(), num_steps + 1);
        self.rollout_with(ic, num_steps, warmup, |_, snapshot| {
            traj.push(snapshot);
        })?;
        Ok(traj)
    }

    /// Streaming rollout handing each recorded snapshot `(index, data)` to `sink`.
    ///
    /// On divergence the error carries the number of public steps that
    /// completed successfully, warmup included.
    pub fn rollout_with(
        &self,
        ic: &SpatialField,
        num_steps: usize,
        warmup: usize,
        mut sink: impl FnMut(usize, &[f64]),
    ) -> Result<()> {
        if num_steps == 0 {
            return Err(Error::InvalidArgument("a rollout needs at least one step".into()));
        }
        self.check_field(ic.grid(), ic.channels())?;
        if !ic.is_finite() {
            return Err(Error::NonFiniteField);
        }
        let channels = ic.channels();
        let slen = self.grid.spectral_len();
        let n = self.grid.spatial_len();
        let mut u_hat = vec![Complex64::new(0.0, 0.0); channels * slen];
        for c in 0..channels {
            self.transform
                .forward_into(ic.channel(c), &mut u_hat[c * slen..(c + 1) * slen]);
        }
        let mut snapshot = vec![0.0; channels * n];
        let record = |u_hat: &[Complex64], snapshot: &mut [f64]| {
            for c in 0..channels {
                self.transform
                    .inverse_into(&u_hat[c * slen..(c + 1) * slen], &mut snapshot[c * n..(c + 1) * n]);
            }
            snapshot.iter().all(|v| v.is_finite())
        };

        for s in 0..warmup {
            self.advance_spectral(&mut u_hat);
            if !spectrum_finite(&u_hat) {
                return Err(Error::Diverged { step: s });
            }
        }
        if warmup == 0 {
            snapshot.copy_from_slice(ic.data());
        } else if !record(&u_hat, &mut snapshot) {
            return Err(Error::Diverged { step: warmup - 1 });
        }
        sink(0, &snapshot);
        for t in 1..=num_steps {
            self.advance_spectral(&mut u_hat);
            if !spectrum_finite(&u_hat) || !record(&u_hat, &mut snapshot) {
                return Err(Error::Diverged { step: warmup + t - 1 });
            }
            sink(t, &snapshot);
        }
        Ok(())
    }
}

fn spectrum_finite(u: &[Complex64]) -> bool {
    u.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

struct Workspace {
    n0: Vec<Complex64>,
    na: Vec<Complex64>,
    nb: Vec<Complex64>,
    nc: Vec<Complex64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
}

impl Workspace {
    fn new(len: usize) -> Self {
        let z = || vec![Complex64::new(0.0, 0.0); len];
        Self {
            n0: z(),
            na: z(),
            nb: z(),
            nc: z(),
            a: z(),
            b: z(),
            c: z(),
        }
    }
}
