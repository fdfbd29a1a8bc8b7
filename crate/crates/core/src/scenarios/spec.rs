use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coefficients::{
    difficulty_to_normalized, normalized_to_physical, physical_to_normalized, DifficultyCoefficients,
    NonlinearCoefficients, NonlinearKind, NormalizedCoefficients, LINEAR_ORDERS,
};
use super::ic::IcConfig;
use super::registry::{Dynamic, InterfaceMode, ScenarioId};
use crate::error::{Error, Result};
use crate::etdrk::{NonlinearFunction, Stepper};
use crate::operators::{build_isotropic_linear, build_nonlinear, build_spatially_mixed_linear, NonlinearSpec, SpatialMixSpec};
use crate::spectral::{dealias_mask, DiagonalLinearOperator, Grid};

/// Gray-Scott pattern types with their `(feed, kill)` rates.
pub const GRAY_SCOTT_TYPES: [(&str, f64, f64); 8] = [
    ("alpha", 0.008, 0.046),
    ("beta", 0.020, 0.046),
    ("gamma", 0.024, 0.056),
    ("delta", 0.028, 0.056),
    ("epsilon", 0.02, 0.056),
    ("theta", 0.04, 0.06),
    ("iota", 0.05, 0.0605),
    ("kappa", 0.052, 0.063),
];

pub fn gray_scott_type(name: &str) -> Result<(f64, f64)> {
    GRAY_SCOTT_TYPES
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|&(_, f, k)| (f, k))
        .ok_or_else(|| Error::InvalidArgument(format!("unknown Gray-Scott pattern type {name:?}")))
}

/// Constitutive constants of the physical interface, one variant per dynamic family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhysicalConstants {
    /// `a_j` of `sum_j a_j (1 . nabla^j) u` together with the scale `b` of
    /// the generic nonlinear component of the dynamic. Used by every
    /// isotropic dynamic; the named constants (`c`, `nu`, `xi`, `zeta`, ...)
    /// are reported by [`ScenarioSpec::named_constants`].
    Isotropic {
        linear: Vec<f64>,
        #[serde(default)]
        nonlinear: NonlinearCoefficients,
    },
    UnbalancedAdvection { velocity: Vec<f64> },
    DiagonalDiffusion { diffusivity: Vec<f64> },
    AnisotropicDiffusion { matrix: Vec<Vec<f64>> },
    MixedDispersion { dispersivity: f64 },
    MixedHyperDiffusion { hyper_diffusivity: f64 },
    GrayScott {
        feed: f64,
        kill: f64,
        diffusivities: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pattern: Option<String>,
    },
    SwiftHohenberg { reactivity: f64, critical_wavenumber: f64 },
    DecayingTurbulence { diffusivity: f64, convection: f64 },
    KolmogorovFlow {
        reynolds: f64,
        drag: f64,
        forcing_wavenumber: f64,
        convection: f64,
    },
}

/// Domain extent, time step and constants of the physical interface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParameters {
    pub extent: f64,
    pub dt: f64,
    pub constants: PhysicalConstants,
}

/// Coefficients in the scenario's interface mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScenarioCoefficients {
    Difficulty(DifficultyCoefficients),
    Normalized(NormalizedCoefficients),
    Physical(PhysicalParameters),
}

/// Number of initial conditions and recorded steps of a dataset split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitRecipe {
    pub samples: usize,
    pub steps: usize,
}

/// Complete, self-contained description of one benchmark scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub dynamic: Dynamic,
    pub mode: InterfaceMode,
    pub num_dims: usize,
    pub num_points: usize,
    pub coefficients: ScenarioCoefficients,
    pub order: u8,
    pub substeps: usize,
    pub warmup: usize,
    pub dealias_fraction: f64,
    /// Non-conservative `(u . nabla) u` convection instead of the divergence form.
    #[serde(default)]
    pub non_conservative: bool,
    pub ic: IcConfig,
    pub train: SplitRecipe,
    pub test: SplitRecipe,
}

pub fn default_num_points(num_dims: usize) -> usize {
    if num_dims >= 3 {
        32
    } else {
        160
    }
}

/// Difficulty defaults `(gammas, deltas)` of the isotropic dynamics.
pub fn default_difficulties(dynamic: Dynamic) -> Option<([f64; LINEAR_ORDERS], NonlinearCoefficients)> {
    use NonlinearKind::*;
    let none = NonlinearCoefficients::default();
    Some(match dynamic {
        Dynamic::Adv => ([0.0, -4.0, 0.0, 0.0, 0.0], none),
        Dynamic::Diff => ([0.0, 0.0, 4.0, 0.0, 0.0], none),
        Dynamic::AdvDiff => ([0.0, -4.0, 4.0, 0.0, 0.0], none),
        Dynamic::Disp => ([0.0, 0.0, 0.0, 4.0, 0.0], none),
        Dynamic::Hyp => ([0.0, 0.0, 0.0, 0.0, -4.0], none),
        Dynamic::Burgers => ([0.0, 0.0, 1.5, 0.0, 0.0], NonlinearCoefficients::single(Conv, -1.5)),
        Dynamic::BurgersSc => ([0.0, 0.0, 1.5, 0.0, 0.0], NonlinearCoefficients::single(ConvSc, -1.5)),
        Dynamic::Kdv => ([0.0, 0.0, 0.0, -14.0, -9.0], NonlinearCoefficients::single(ConvSc, -2.0)),
        Dynamic::KsCons => ([0.0, 0.0, -2.0, 0.0, -18.0], NonlinearCoefficients::single(Conv, -1.0)),
        Dynamic::Ks => ([0.0, 0.0, -1.2, 0.0, -15.0], NonlinearCoefficients::single(Gn, -6.0)),
        Dynamic::Fisher => ([0.02, 0.0, 0.2, 0.0, 0.0], NonlinearCoefficients::single(Quad, -0.02)),
        _ => return None,
    })
}

/// Physical time step used when an isotropic dynamic is requested in physical mode.
pub const ISOTROPIC_PHYSICAL_DT: f64 = 0.1;

fn default_physical(dynamic: Dynamic, num_dims: usize, num_points: usize) -> PhysicalParameters {
    let p = |extent: f64, dt: f64, constants| PhysicalParameters { extent, dt, constants };
    match dynamic {
        Dynamic::UnbalAdv => p(
            1.0,
            0.1,
            PhysicalConstants::UnbalancedAdvection { velocity: [0.01, -0.04, 0.005][..num_dims].to_vec() },
        ),
        Dynamic::DiagDiff => p(
            1.0,
            0.1,
            PhysicalConstants::DiagonalDiffusion { diffusivity: [0.001, 0.002, 0.0004][..num_dims].to_vec() },
        ),
        Dynamic::AnisoDiff => p(
            1.0,
            0.1,
            PhysicalConstants::AnisotropicDiffusion {
                matrix: if num_dims == 2 {
                    vec![vec![0.001, 0.0005], vec![0.0005, 0.002]]
                } else {
                    vec![
                        vec![0.001, 0.0005, 0.0003],
                        vec![0.0005, 0.002, 0.0002],
                        vec![0.0003, 0.0002, 0.0004],
                    ]
                },
            },
        ),
        Dynamic::MixDisp => p(1.0, 0.001, PhysicalConstants::MixedDispersion { dispersivity: 0.00025 }),
        Dynamic::MixHyp => p(1.0, 0.00001, PhysicalConstants::MixedHyperDiffusion { hyper_diffusivity: -0.000075 }),
        Dynamic::Gs => p(
            1.0,
            10.0,
            PhysicalConstants::GrayScott { feed: 0.04, kill: 0.06, diffusivities: [2e-5, 1e-5], pattern: None },
        ),
        Dynamic::GsType => {
            let (feed, kill) = gray_scott_type("theta").expect("known type");
            p(
                2.5,
                20.0,
                PhysicalConstants::GrayScott {
                    feed,
                    kill,
                    diffusivities: [2e-5, 1e-5],
                    pattern: Some("theta".into()),
                },
            )
        }
        Dynamic::Sh => p(
            10.0 * PI,
            0.1,
            PhysicalConstants::SwiftHohenberg { reactivity: 0.7, critical_wavenumber: 1.0 },
        ),
        Dynamic::DecayTurb => p(1.0, 0.1, PhysicalConstants::DecayingTurbulence { diffusivity: 1e-4, convection: 1.0 }),
        Dynamic::KolmFlow => p(
            2.0 * PI,
            0.1,
            PhysicalConstants::KolmogorovFlow { reynolds: 100.0, drag: -0.1, forcing_wavenumber: 4.0, convection: 1.0 },
        ),
        iso => {
            let (gammas, deltas) = default_difficulties(iso).expect("isotropic dynamic");
            let norm = difficulty_to_normalized(&DifficultyCoefficients {
                gammas: gammas.to_vec(),
                deltas,
                num_points,
                num_dims,
                max_abs: 1.0,
            })
            .expect("valid defaults");
            let (linear, nonlinear) = normalized_to_physical(&norm, 1.0, ISOTROPIC_PHYSICAL_DT);
            p(1.0, ISOTROPIC_PHYSICAL_DT, PhysicalConstants::Isotropic { linear, nonlinear })
        }
    }
}

impl ScenarioSpec {
    /// Default scenario for a `[mode_]name` id in `num_dims` dimensions.
    pub fn resolve(id: &str, num_dims: usize) -> Result<Self> {
        let id = ScenarioId::parse(id)?;
        Self::defaults(id.dynamic, id.mode, num_dims)
    }

    pub fn defaults(dynamic: Dynamic, mode: InterfaceMode, num_dims: usize) -> Result<Self> {
        ScenarioId { dynamic, mode }.check(num_dims)?;
        let num_points = default_num_points(num_dims);
        let coefficients = match mode {
            InterfaceMode::Difficulty | InterfaceMode::Normalized => {
                let (gammas, deltas) = default_difficulties(dynamic).expect("mode checked");
                let diff = DifficultyCoefficients {
                    gammas: gammas.to_vec(),
                    deltas,
                    num_points,
                    num_dims,
                    max_abs: 1.0,
                };
                if mode == InterfaceMode::Difficulty {
                    ScenarioCoefficients::Difficulty(diff)
                } else {
                    ScenarioCoefficients::Normalized(difficulty_to_normalized(&diff)?)
                }
            }
            InterfaceMode::Physical => ScenarioCoefficients::Physical(default_physical(dynamic, num_dims, num_points)),
        };
        let (substeps, warmup) = match dynamic {
            Dynamic::Ks | Dynamic::KsCons => (1, 500),
            Dynamic::Gs => (10, 0),
            Dynamic::GsType => (20, 0),
            Dynamic::Sh => (5, 0),
            Dynamic::KolmFlow => (20, 500),
            _ => (1, 0),
        };
        let spec = Self {
            dynamic,
            mode,
            num_dims,
            num_points,
            coefficients,
            order: 2,
            substeps,
            warmup,
            dealias_fraction: 2.0 / 3.0,
            non_conservative: false,
            ic: IcConfig::for_dynamic(dynamic),
            train: SplitRecipe { samples: 50, steps: 50 },
            test: SplitRecipe { samples: 30, steps: 200 },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn id(&self) -> ScenarioId {
        ScenarioId {
            dynamic: self.dynamic,
            mode: self.mode,
        }
    }

    /// `<D>d_<mode>_<name>`
    pub fn canonical_name(&self) -> String {
        self.id().canonical_name(self.num_dims)
    }

    pub fn channels(&self) -> usize {
        self.dynamic.channels(self.num_dims)
    }

    /// Domain extent of the simulation; 1 for the difficulty and normalized interfaces.
    pub fn extent(&self) -> f64 {
        match &self.coefficients {
            ScenarioCoefficients::Physical(p) => p.extent,
            _ => 1.0,
        }
    }

    /// Time step of the simulation; 1 for the difficulty and normalized interfaces.
    pub fn dt(&self) -> f64 {
        match &self.coefficients {
            ScenarioCoefficients::Physical(p) => p.dt,
            _ => 1.0,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.num_dims, self.num_points, self.extent())
    }

    /// Changes the resolution, keeping difficulty coefficients consistent.
    pub fn set_num_points(&mut self, num_points: usize) {
        self.num_points = num_points;
        if let ScenarioCoefficients::Difficulty(d) = &mut self.coefficients {
            d.num_points = num_points;
        }
    }

    /// Selects a named Gray-Scott pattern type, setting its feed and kill rates.
    pub fn set_pattern_type(&mut self, name: &str) -> Result<()> {
        let (f, k) = gray_scott_type(name)?;
        match &mut self.coefficients {
            ScenarioCoefficients::Physical(PhysicalParameters {
                constants: PhysicalConstants::GrayScott { feed, kill, pattern, .. },
                ..
            }) => {
                *feed = f;
                *kill = k;
                *pattern = Some(name.to_string());
                Ok(())
            }
            _ => Err(Error::InvalidArgument(format!(
                "pattern types only apply to Gray-Scott scenarios, not {}",
                self.canonical_name()
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.id().check(self.num_dims)?;
        self.grid()?;
        if self.order > 4 {
            return Err(Error::InvalidArgument(format!("ETDRK order must be 0..=4, got {}", self.order)));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidArgument("substeps must be at least 1".into()));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidArgument("dealias fraction must lie in (0, 1]".into()));
        }
        for (name, r) in [("train", self.train), ("test", self.test)] {
            if r.samples == 0 || r.steps == 0 {
                return Err(Error::InvalidArgument(format!("{name} split needs at least one sample and one step")));
            }
        }
        self.ic.validate(self.num_points)?;
        let expected_mode = match &self.coefficients {
            ScenarioCoefficients::Difficulty(d) => {
                if d.num_points != self.num_points || d.num_dims != self.num_dims {
                    return Err(Error::InvalidArgument(
                        "difficulty coefficients were set up for another resolution".into(),
                    ));
                }
                InterfaceMode::Difficulty
            }
            ScenarioCoefficients::Normalized(_) => InterfaceMode::Normalized,
            ScenarioCoefficients::Physical(p) => {
                if !(p.dt.is_finite() && p.dt > 0.0) {
                    return Err(Error::InvalidArgument(format!("time step must be positive, got {}", p.dt)));
                }
                InterfaceMode::Physical
            }
        };
        if expected_mode != self.mode {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients given for a {} scenario",
                expected_mode, self.mode
            )));
        }
        if let ScenarioCoefficients::Physical(p) = &self.coefficients {
            let family_ok = matches!(
                (self.dynamic, &p.constants),
                (d, PhysicalConstants::Isotropic { .. }) if d.is_isotropic()
            ) || matches!(
                (self.dynamic, &p.constants),
                (Dynamic::UnbalAdv, PhysicalConstants::UnbalancedAdvection { .. })
                    | (Dynamic::DiagDiff, PhysicalConstants::DiagonalDiffusion { .. })
                    | (Dynamic::AnisoDiff, PhysicalConstants::AnisotropicDiffusion { .. })
                    | (Dynamic::MixDisp, PhysicalConstants::MixedDispersion { .. })
                    | (Dynamic::MixHyp, PhysicalConstants::MixedHyperDiffusion { .. })
                    | (Dynamic::Gs | Dynamic::GsType, PhysicalConstants::GrayScott { .. })
                    | (Dynamic::Sh, PhysicalConstants::SwiftHohenberg { .. })
                    | (Dynamic::DecayTurb, PhysicalConstants::DecayingTurbulence { .. })
                    | (Dynamic::KolmFlow, PhysicalConstants::KolmogorovFlow { .. })
            );
            if !family_ok {
                return Err(Error::InvalidArgument(format!(
                    "physical constants do not belong to dynamic {}",
                    self.dynamic
                )));
            }
        }
        if let Some(norm) = self.normalized()? {
            if norm.alphas.len() > LINEAR_ORDERS || norm.alphas.iter().any(|a| !a.is_finite()) || !norm.betas.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "linear coefficients must be at most {LINEAR_ORDERS} finite values"
                )));
            }
            let allowed = self.dynamic.nonlinear_kind();
            for kind in NonlinearKind::ALL {
                if Some(kind) != allowed && norm.betas.get(kind) != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "dynamic {} has no {} component",
                        self.dynamic,
                        kind.name()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Normalized coefficients of isotropic dynamics in any interface mode.
    pub fn normalized(&self) -> Result<Option<NormalizedCoefficients>> {
        Ok(match &self.coefficients {
            ScenarioCoefficients::Difficulty(d) => Some(difficulty_to_normalized(d)?),
            ScenarioCoefficients::Normalized(n) => Some(n.clone()),
            ScenarioCoefficients::Physical(PhysicalParameters {
                extent,
                dt,
                constants: PhysicalConstants::Isotropic { linear, nonlinear },
            }) => Some(physical_to_normalized(linear, nonlinear, *extent, *dt)),
            ScenarioCoefficients::Physical(_) => None,
        })
    }

    /// Physical constants under their conventional names.
    pub fn named_constants(&self) -> Vec<(String, f64)> {
        let mut out = vec![("L".to_string(), self.extent()), ("dt".to_string(), self.dt())];
        let ScenarioCoefficients::Physical(p) = &self.coefficients else {
            return out;
        };
        let mut push = |name: &str, v: f64| out.push((name.to_string(), v));
        match &p.constants {
            PhysicalConstants::Isotropic { linear, nonlinear } => {
                let a = |j: usize| linear.get(j).copied().unwrap_or(0.0);
                let b = self.dynamic.nonlinear_kind().map(|k| nonlinear.get(k)).unwrap_or(0.0);
                match self.dynamic {
                    Dynamic::Adv => push("c", -a(1)),
                    Dynamic::Diff => push("nu", a(2)),
                    Dynamic::AdvDiff => {
                        push("c", -a(1));
                        push("nu", a(2));
                    }
                    Dynamic::Disp => push("xi", a(3)),
                    Dynamic::Hyp => push("zeta", -a(4)),
                    Dynamic::Burgers | Dynamic::BurgersSc => {
                        push("b", -b);
                        push("nu", a(2));
                    }
                    Dynamic::Kdv => {
                        push("b", -b);
                        push("xi", a(3));
                        push("zeta", -a(4));
                    }
                    Dynamic::KsCons | Dynamic::Ks => {
                        push("b", -b);
                        push("nu", -a(2));
                        push("zeta", -a(4));
                    }
                    Dynamic::Fisher => {
                        push("r", a(0));
                        push("nu", a(2));
                    }
                    _ => {}
                }
            }
            PhysicalConstants::UnbalancedAdvection { velocity } => {
                for (d, c) in velocity.iter().enumerate() {
                    push(&format!("c{d}"), *c);
                }
            }
            PhysicalConstants::DiagonalDiffusion { diffusivity } => {
                for (d, v) in diffusivity.iter().enumerate() {
                    push(&format!("nu{d}"), *v);
                }
            }
            PhysicalConstants::AnisotropicDiffusion { matrix } => {
                for (r, row) in matrix.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        push(&format!("A{r}{c}"), *v);
                    }
                }
            }
            PhysicalConstants::MixedDispersion { dispersivity } => push("xi", *dispersivity),
            PhysicalConstants::MixedHyperDiffusion { hyper_diffusivity } => push("zeta", *hyper_diffusivity),
            PhysicalConstants::GrayScott { feed, kill, diffusivities, .. } => {
                push("f", *feed);
                push("k", *kill);
                push("nu0", diffusivities[0]);
                push("nu1", diffusivities[1]);
            }
            PhysicalConstants::SwiftHohenberg { reactivity, critical_wavenumber } => {
                push("r", *reactivity);
                push("k", *critical_wavenumber);
            }
            PhysicalConstants::DecayingTurbulence { diffusivity, convection } => {
                push("nu", *diffusivity);
                push("b", *convection);
            }
            PhysicalConstants::KolmogorovFlow { reynolds, drag, forcing_wavenumber, convection } => {
                push("Re", *reynolds);
                push("nu", 1.0 / reynolds);
                push("lambda", *drag);
                push("k", *forcing_wavenumber);
                push("b", *convection);
            }
        }
        out
    }

    /// Builds the reference stepper of the scenario.
    pub fn build_stepper(&self) -> Result<Stepper> {
        self.build_scaled_stepper(1.0)
    }

    /// Stepper advancing by `proportion` of the scenario's time step; zero
    /// gives the identity map.
    pub fn build_scaled_stepper(&self, proportion: f64) -> Result<Stepper> {
        self.validate()?;
        if !(proportion.is_finite() && proportion >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time step proportion must be nonnegative, got {proportion}"
            )));
        }
        let grid = self.grid()?;
        if proportion == 0.0 {
            return Stepper::new(&DiagonalLinearOperator::zero(grid), None, 1.0, 0, 1);
        }
        let (linear, nonlinear, dt) = self.operators(grid)?;
        let nonlinear = match nonlinear {
            Some(spec) => Some(build_nonlinear(&spec, grid, dealias_mask(grid, self.dealias_fraction)?)?),
            None => None,
        };
        self.assemble(linear, nonlinear, dt * proportion)
    }

    fn assemble(
        &self,
        linear: DiagonalLinearOperator,
        nonlinear: Option<Arc<dyn NonlinearFunction>>,
        dt: f64,
    ) -> Result<Stepper> {
        Stepper::new(&linear, nonlinear, dt, self.order, self.substeps)
    }

    /// Linear diagonal, nonlinear term and time step of the scenario.
    pub fn operators(&self, grid: Grid) -> Result<(DiagonalLinearOperator, Option<NonlinearSpec>, f64)> {
        if let Some(norm) = self.normalized()? {
            // isotropic dynamics: work in normalized units on the physical grid
            let extent = grid.extent();
            let dt = self.dt();
            let (linear_coeffs, nonlinear_coeffs) = normalized_to_physical(&norm, extent, dt);
            let linear = build_isotropic_linear(&linear_coeffs, grid);
            let nonlinear = self.dynamic.nonlinear_kind().and_then(|kind| {
                let scale = nonlinear_coeffs.get(kind);
                (scale != 0.0).then(|| match kind {
                    NonlinearKind::Conv => NonlinearSpec::Convection {
                        scale,
                        conservative: !self.non_conservative,
                    },
                    NonlinearKind::ConvSc => NonlinearSpec::SingleChannelConvection { scale },
                    NonlinearKind::Gn => NonlinearSpec::GradientNorm { scale },
                    NonlinearKind::Quad => NonlinearSpec::Polynomial {
                        coefficients: vec![0.0, 0.0, scale],
                    },
                })
            });
            return Ok((linear, nonlinear, dt));
        }
        let ScenarioCoefficients::Physical(p) = &self.coefficients else {
            unreachable!("non-isotropic dynamics only have physical coefficients")
        };
        let laplace = || build_isotropic_linear(&[0.0, 0.0, 1.0], grid);
        let (linear, nonlinear) = match &p.constants {
            PhysicalConstants::Isotropic { .. } => unreachable!("handled above"),
            PhysicalConstants::UnbalancedAdvection { velocity } => (
                build_spatially_mixed_linear(&SpatialMixSpec::UnbalancedAdvection { velocity: velocity.clone() }, grid)?,
                None,
            ),
            PhysicalConstants::DiagonalDiffusion { diffusivity } => (
                build_spatially_mixed_linear(
                    &SpatialMixSpec::DiagonalDiffusion { diffusivity: diffusivity.clone() },
                    grid,
                )?,
                None,
            ),
            PhysicalConstants::AnisotropicDiffusion { matrix } => (
                build_spatially_mixed_linear(&SpatialMixSpec::AnisotropicDiffusion { matrix: matrix.clone() }, grid)?,
                None,
            ),
            PhysicalConstants::MixedDispersion { dispersivity } => (
                build_spatially_mixed_linear(&SpatialMixSpec::MixedDispersion { dispersivity: *dispersivity }, grid)?,
                None,
            ),
            PhysicalConstants::MixedHyperDiffusion { hyper_diffusivity } => (
                build_spatially_mixed_linear(
                    &SpatialMixSpec::MixedHyperDiffusion { hyper_diffusivity: *hyper_diffusivity },
                    grid,
                )?,
                None,
            ),
            PhysicalConstants::GrayScott { feed, kill, diffusivities, .. } => {
                let lap = laplace();
                let ch0 = lap.scaled(Complex64::new(diffusivities[0], 0.0)).shifted(Complex64::new(-feed, 0.0));
                let ch1 = lap
                    .scaled(Complex64::new(diffusivities[1], 0.0))
                    .shifted(Complex64::new(-(feed + kill), 0.0));
                (
                    DiagonalLinearOperator::stack(&[ch0, ch1])?,
                    Some(NonlinearSpec::GrayScott { feed: *feed }),
                )
            }
            PhysicalConstants::SwiftHohenberg { reactivity, critical_wavenumber } => {
                let lap = laplace();
                let shifted = lap.shifted(Complex64::new(*critical_wavenumber, 0.0));
                let linear = shifted
                    .multiplied(&shifted)?
                    .scaled(Complex64::new(-1.0, 0.0))
                    .shifted(Complex64::new(*reactivity, 0.0));
                (
                    linear,
                    Some(NonlinearSpec::Polynomial { coefficients: vec![0.0, 0.0, 1.0, -1.0] }),
                )
            }
            PhysicalConstants::DecayingTurbulence { diffusivity, convection } => (
                laplace().scaled(Complex64::new(*diffusivity, 0.0)),
                Some(NonlinearSpec::VorticityConvection {
                    scale: *convection,
                    forcing_wavenumber: None,
                    forcing_amplitude: 0.0,
                }),
            ),
            PhysicalConstants::KolmogorovFlow { reynolds, drag, forcing_wavenumber, convection } => {
                if !(reynolds.is_finite() && *reynolds > 0.0) {
                    return Err(Error::InvalidArgument("Reynolds number must be positive".into()));
                }
                (
                    build_isotropic_linear(&[*drag, 0.0, 1.0 / reynolds], grid),
                    Some(NonlinearSpec::VorticityConvection {
                        scale: *convection,
                        forcing_wavenumber: Some(*forcing_wavenumber),
                        forcing_amplitude: -forcing_wavenumber,
                    }),
                )
            }
        };
        Ok((linear, nonlinear, p.dt))
    }
}

/// Builds the reference stepper of `spec`.
pub fn build_stepper_from_spec(spec: &ScenarioSpec) -> Result<Stepper> {
    spec.build_stepper()
}
