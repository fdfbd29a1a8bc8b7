use std::path::{Path, PathBuf};

use emubench_core::scenarios::{IcConfig, NonlinearCoefficients, ScenarioCoefficients, ScenarioSpec};
use emubench_core::train::StencilExperimentConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Payload encoding of exported splits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    /// Little-endian f64 values in C order.
    #[default]
    Raw64,
    /// One row per (sample, step, channel); one-dimensional scenarios only.
    Csv,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Raw64 => "raw64",
            ExportFormat::Csv => "csv",
        }
    }
}

/// Changes applied on top of a scenario's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub num_points: Option<usize>,
    pub order: Option<u8>,
    pub substeps: Option<usize>,
    pub warmup: Option<usize>,
    pub dealias_fraction: Option<f64>,
    /// Highest wavenumber of truncated Fourier initial conditions.
    pub cutoff: Option<usize>,
    /// Gray-Scott pattern type.
    #[serde(rename = "type")]
    pub pattern_type: Option<String>,
    /// Difficulty `gamma_j`, starting at `j = 0`.
    pub gammas: Option<Vec<f64>>,
    /// Difficulty `delta` per nonlinear component.
    pub deltas: Option<NonlinearCoefficients>,
    /// Time step of physical scenarios.
    pub dt: Option<f64>,
    pub train_samples: Option<usize>,
    pub train_steps: Option<usize>,
    pub test_samples: Option<usize>,
    pub test_steps: Option<usize>,
}

impl Overrides {
    /// Field-wise merge where `self` wins over `base`.
    pub fn or(self, base: Overrides) -> Overrides {
        Overrides {
            num_points: self.num_points.or(base.num_points),
            order: self.order.or(base.order),
            substeps: self.substeps.or(base.substeps),
            warmup: self.warmup.or(base.warmup),
            dealias_fraction: self.dealias_fraction.or(base.dealias_fraction),
            cutoff: self.cutoff.or(base.cutoff),
            pattern_type: self.pattern_type.or(base.pattern_type),
            gammas: self.gammas.or(base.gammas),
            deltas: self.deltas.or(base.deltas),
            dt: self.dt.or(base.dt),
            train_samples: self.train_samples.or(base.train_samples),
            train_steps: self.train_steps.or(base.train_steps),
            test_samples: self.test_samples.or(base.test_samples),
            test_steps: self.test_steps.or(base.test_steps),
        }
    }

    pub fn apply(&self, spec: &mut ScenarioSpec) -> Result<(), CliError> {
        if let Some(n) = self.num_points {
            spec.set_num_points(n);
        }
        if let Some(o) = self.order {
            spec.order = o;
        }
        if let Some(s) = self.substeps {
            spec.substeps = s;
        }
        if let Some(w) = self.warmup {
            spec.warmup = w;
        }
        if let Some(f) = self.dealias_fraction {
            spec.dealias_fraction = f;
        }
        if let Some(k) = self.cutoff {
            match &mut spec.ic {
                IcConfig::TruncatedFourier { cutoff, .. } => *cutoff = k,
                IcConfig::GaussianBlob { .. } => {
                    return Err(CliError::usage(format!(
                        "{} does not use Fourier initial conditions",
                        spec.canonical_name()
                    )))
                }
            }
        }
        if let Some(t) = &self.pattern_type {
            spec.set_pattern_type(t)?;
        }
        if self.gammas.is_some() || self.deltas.is_some() {
            let ScenarioCoefficients::Difficulty(d) = &mut spec.coefficients else {
                return Err(CliError::usage(format!(
                    "gammas and deltas only apply to difficulty scenarios, not {}",
                    spec.canonical_name()
                )));
            };
            if let Some(g) = &self.gammas {
                d.gammas = g.clone();
            }
            if let Some(delta) = self.deltas {
                d.deltas = delta;
            }
        }
        if let Some(dt) = self.dt {
            let ScenarioCoefficients::Physical(p) = &mut spec.coefficients else {
                return Err(CliError::usage(format!(
                    "the time step can only be set on physical scenarios, not {}",
                    spec.canonical_name()
                )));
            };
            p.dt = dt;
        }
        let set = |v: Option<usize>, slot: &mut usize| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(self.train_samples, &mut spec.train.samples);
        set(self.train_steps, &mut spec.train.steps);
        set(self.test_samples, &mut spec.test.samples);
        set(self.test_steps, &mut spec.test.steps);
        spec.validate()?;
        Ok(())
    }
}

/// Contents of a `--config` file. Every field mirrors a command-line flag.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub dims: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<ExportFormat>,
    /// Worker threads; 0 or absent uses every core.
    pub threads: Option<usize>,
    pub overrides: Overrides,
    pub experiment: Option<StencilExperimentConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    /// Field-wise merge where `self` wins over `base`.
    pub fn or(self, base: RunConfig) -> RunConfig {
        RunConfig {
            scenario: self.scenario.or(base.scenario),
            dims: self.dims.or(base.dims),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            threads: self.threads.or(base.threads),
            overrides: self.overrides.or(base.overrides),
            experiment: self.experiment.or(base.experiment),
        }
    }

    /// The scenario after applying every override.
    pub fn scenario_spec(&self) -> Result<ScenarioSpec, CliError> {
        let id = self
            .scenario
            .as_deref()
            .ok_or_else(|| CliError::usage("no scenario given (--scenario or `scenario` in the config)"))?;
        let mut spec = ScenarioSpec::resolve(id, self.dims.unwrap_or(1))?;
        self.overrides.apply(&mut spec)?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = r#"
            scenario = "diff_adv"
            dims = 1
            seed = 3
            format = "csv"

            [overrides]
            num_points = 64
            gammas = [0.0, -4.0]
            test_samples = 2

            [experiment]
            seed = 1
            methodologies = ["one", "sup;5", "div;2"]
        "#;
        let cfg: RunConfig = toml::from_str(text).unwrap();
        let spec = cfg.scenario_spec().unwrap();
        assert_eq!(spec.num_points, 64);
        assert_eq!(spec.test.samples, 2);
        assert_eq!(cfg.format, Some(ExportFormat::Csv));
        assert_eq!(cfg.experiment.unwrap().methodologies.len(), 3);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<RunConfig>("scenaro = \"diff_adv\"").is_err());
        assert!(toml::from_str::<RunConfig>("[overrides]\nnum_pts = 3").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let file = RunConfig {
            seed: Some(1),
            dims: Some(2),
            ..Default::default()
        };
        let flags = RunConfig {
            seed: Some(9),
            ..Default::default()
        };
        let merged = flags.or(file);
        assert_eq!((merged.seed, merged.dims), (Some(9), Some(2)));
    }

    #[test]
    fn gray_scott_type_override() {
        let cfg = RunConfig {
            scenario: Some("phy_gs_type".into()),
            dims: Some(2),
            overrides: Overrides {
                pattern_type: Some("alpha".into()),
                ..Default::default()
            },
            ..Default::default()
        };
        let names = cfg.scenario_spec().unwrap().named_constants();
        assert!(names.contains(&("f".to_string(), 0.008)));
    }

    #[test]
    fn mismatched_override_is_usage_error() {
        let cfg = RunConfig {
            scenario: Some("phy_sh".into()),
            dims: Some(2),
            overrides: Overrides {
                gammas: Some(vec![0.0]),
                ..Default::default()
            },
            ..Default::default()
        };
        assert_eq!(cfg.scenario_spec().unwrap_err().code, crate::error::EXIT_USAGE);
    }
}
