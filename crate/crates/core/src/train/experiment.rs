use serde::{Deserialize, Serialize};

use super::emulator::{compose_correction, fou_stencil, CorrectionLayout, CorrectionVariant, Emulator, LinearStencilEmulator};
use super::newton::{train_newton, NewtonOptions};
use super::objective::{unrolled_objective_frozen, Methodology, TrainingData};
use crate::error::{Error, Result};
use crate::etdrk::{Stepper, Trajectory};
use crate::metrics::{rollout_metrics_batch, MetricDescriptor, RolloutReport, DEFAULT_HORIZON};
use crate::scenarios::{generate_dataset, IcConfig, ScenarioCoefficients, ScenarioSpec, Split, SplitRecipe, TrajectorySet};

/// Linear-stencil learning on one-dimensional advection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StencilExperimentConfig {
    pub gamma1: f64,
    pub num_points: usize,
    pub cutoff: usize,
    pub train_samples: usize,
    pub train_steps: usize,
    pub test_samples: usize,
    pub test_steps: usize,
    pub seed: u64,
    pub methodologies: Vec<Methodology>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction: Option<CorrectionLayout>,
    pub metrics: Vec<String>,
    pub horizon: usize,
    pub newton: NewtonOptions,
}

impl Default for StencilExperimentConfig {
    fn default() -> Self {
        Self {
            gamma1: 0.75,
            num_points: 30,
            cutoff: 5,
            train_samples: 5,
            train_steps: 200,
            test_samples: 50,
            test_steps: 200,
            seed: 0,
            methodologies: [1, 2, 5, 10, 20, 50].into_iter().map(Methodology::Supervised).collect(),
            correction: None,
            metrics: vec!["mean_nRMSE".into()],
            horizon: DEFAULT_HORIZON,
            newton: NewtonOptions::default(),
        }
    }
}

impl StencilExperimentConfig {
    /// The advection scenario the experiment trains and tests on.
    pub fn scenario(&self) -> Result<ScenarioSpec> {
        let mut spec = ScenarioSpec::resolve("diff_adv", 1)?;
        spec.set_num_points(self.num_points);
        if let ScenarioCoefficients::Difficulty(d) = &mut spec.coefficients {
            d.gammas = vec![0.0, self.gamma1];
        }
        spec.ic = IcConfig::fourier(self.cutoff);
        spec.train = SplitRecipe { samples: self.train_samples, steps: self.train_steps };
        spec.test = SplitRecipe { samples: self.test_samples, steps: self.test_steps };
        spec.validate()?;
        Ok(spec)
    }
}

/// One trained (or baseline) stencil and its test rollout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub label: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_to_fou: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub rollouts: Vec<RolloutReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: StencilExperimentConfig,
    pub fou_theta: [f64; 2],
    pub rows: Vec<ExperimentRow>,
}

/// Optimum of one point of a main-chain sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub methodology: Methodology,
    pub theta: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Trains `emulator` for each methodology in turn, warm-starting each
/// optimization from the previous optimum of the same kind.
pub fn train_sweep(
    emulator: &dyn Emulator,
    reference: Option<&Stepper>,
    data: &TrainingData<'_>,
    methodologies: &[Methodology],
    theta_init: &[f64],
    options: NewtonOptions,
) -> Vec<(Methodology, Result<SweepPoint>)> {
    let mut warm: Vec<(bool, Vec<f64>)> = Vec::new();
    methodologies
        .iter()
        .map(|&m| {
            let diverted = matches!(m, Methodology::Diverted(_));
            let start = warm
                .iter()
                .find(|(d, _)| *d == diverted)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| theta_init.to_vec());
            let cfg = m.config();
            let result = train_newton(
                |theta, frozen| unrolled_objective_frozen(emulator, reference, data, &cfg, theta, frozen),
                &start,
                options,
            )
            .map(|r| SweepPoint {
                methodology: m,
                theta: r.theta,
                objective: r.objective,
                iterations: r.iterations,
            });
            if let Ok(p) = &result {
                warm.retain(|(d, _)| *d != diverted);
                warm.push((diverted, p.theta.clone()));
            }
            (m, result)
        })
        .collect()
}

/// Autoregressive emulator rollouts from every test initial condition.
pub fn emulator_rollouts(emulator: &dyn Emulator, theta: &[f64], test: &TrajectorySet) -> Result<Vec<Trajectory>> {
    let n = emulator.state_len();
    (0..test.num_samples())
        .map(|s| {
            let steps = test.time_steps();
            let mut data = vec![0.0; steps * n];
            data[..n].copy_from_slice(test.snapshot(s, 0).data());
            for t in 1..steps {
                let (prev, next) = data.split_at_mut(t * n);
                emulator.apply_into(theta, &prev[(t - 1) * n..], &mut next[..n])?;
            }
            Trajectory::from_vec(*test.grid(), test.channels(), data)
        })
        .collect()
}

fn evaluate(
    emulator: &dyn Emulator,
    theta: &[f64],
    test: &TrajectorySet,
    references: &[Trajectory],
    metrics: &[MetricDescriptor],
    horizon: usize,
) -> Result<Vec<RolloutReport>> {
    let preds = emulator_rollouts(emulator, theta, test)?;
    metrics
        .iter()
        .map(|m| rollout_metrics_batch(&preds, references, m, horizon))
        .collect()
}

/// Runs the stencil experiment: FOU baseline plus one trained row per methodology.
pub fn run_stencil_experiment(config: &StencilExperimentConfig) -> Result<ExperimentReport> {
    let spec = config.scenario()?;
    let grid = spec.grid()?;
    let metrics = config
        .metrics
        .iter()
        .map(|m| MetricDescriptor::from_name(m))
        .collect::<Result<Vec<_>>>()?;
    if config.methodologies.is_empty() && metrics.is_empty() {
        return Err(Error::InvalidArgument("nothing to do: no methodologies and no metrics".into()));
    }
    let train = generate_dataset(&spec, Split::Train, config.seed)?;
    let test = generate_dataset(&spec, Split::Test, config.seed)?;
    let references: Vec<Trajectory> = (0..test.num_samples()).map(|s| test.trajectory(s)).collect();
    let reference = spec.build_stepper()?;
    let stencil = LinearStencilEmulator::new(grid, 1)?;
    let layout = config.correction.unwrap_or(CorrectionLayout {
        variant: CorrectionVariant::None,
        coarse_proportion: 0.0,
    });
    let emulator = compose_correction(layout.variant, spec.build_scaled_stepper(layout.coarse_proportion)?, stencil.clone())?;
    let fou = fou_stencil(config.gamma1);

    let mut rows = vec![ExperimentRow {
        label: "FOU".into(),
        status: "ok".into(),
        theta: Some(fou),
        distance_to_fou: Some(0.0),
        train_objective: None,
        iterations: None,
        rollouts: evaluate(&stencil, &fou, &test, &references, &metrics, config.horizon)?,
    }];

    let data = TrainingData::from_set(&train);
    for (m, result) in train_sweep(&emulator, Some(&reference), &data, &config.methodologies, &fou, config.newton) {
        let row = match result {
            Ok(p) => {
                let theta = [p.theta[0], p.theta[1]];
                let distance = ((theta[0] - fou[0]).powi(2) + (theta[1] - fou[1]).powi(2)).sqrt();
                match evaluate(&emulator, &theta, &test, &references, &metrics, config.horizon) {
                    Ok(rollouts) => ExperimentRow {
                        label: m.to_string(),
                        status: "ok".into(),
                        theta: Some(theta),
                        distance_to_fou: Some(distance),
                        train_objective: Some(p.objective),
                        iterations: Some(p.iterations),
                        rollouts,
                    },
                    Err(e) => ExperimentRow {
                        label: m.to_string(),
                        status: format!("failed: {e}"),
                        theta: Some(theta),
                        distance_to_fou: Some(distance),
                        train_objective: Some(p.objective),
                        iterations: Some(p.iterations),
                        rollouts: Vec::new(),
                    },
                }
            }
            Err(e) => ExperimentRow {
                label: m.to_string(),
                status: format!("failed: {e}"),
                theta: None,
                distance_to_fou: None,
                train_objective: None,
                iterations: None,
                rollouts: Vec::new(),
            },
        };
        rows.push(row);
    }
    Ok(ExperimentReport {
        config: config.clone(),
        fou_theta: fou,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_experiment_runs() {
        let config = StencilExperimentConfig {
            train_samples: 2,
            train_steps: 20,
            test_samples: 3,
            test_steps: 10,
            methodologies: vec![Methodology::OneStep, Methodology::Diverted(1), Methodology::Supervised(3)],
            metrics: vec!["mean_nRMSE".into(), "mean_MSE".into()],
            horizon: 10,
            ..Default::default()
        };
        let report = run_stencil_experiment(&config).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.rows.iter().all(|r| r.status == "ok"));
        assert_eq!(report.rows[1].rollouts[0].losses.len(), 10);
        let (a, b) = (&report.rows[1], &report.rows[2]);
        for (x, y) in a.theta.unwrap().iter().zip(b.theta.unwrap()) {
            assert!((x - y).abs() < 1e-9);
        }
        for (x, y) in a.rollouts[0].losses.iter().zip(&b.rollouts[0].losses) {
            assert!((x - y).abs() < 1e-9);
        }
        // learned stencils beat FOU on the first step
        assert!(a.rollouts[0].losses[0] < report.rows[0].rollouts[0].losses[0]);
    }
}
