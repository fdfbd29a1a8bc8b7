use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::emulator::{step_slice, Emulator};
use crate::error::{Error, Result};
use crate::etdrk::Stepper;
use crate::scenarios::TrajectorySet;

/// Main-chain length `T`, branch length `B`, weights and gradient cuts of
/// the unrolled objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnrollConfig {
    pub main_chain: usize,
    pub branch: usize,
    /// `w_t` for `t = 0..=T-B`; empty means all ones.
    #[serde(default)]
    pub time_weights: Vec<f64>,
    /// `w_b` for `b = 1..=B`; empty means all ones.
    #[serde(default)]
    pub branch_weights: Vec<f64>,
    /// Freeze the parameters feeding each main-chain input.
    #[serde(default)]
    pub cut_bptt: bool,
    /// Freeze the parameters feeding each branch input.
    #[serde(default)]
    pub cut_branch: bool,
}

impl UnrollConfig {
    pub fn one_step() -> Self {
        Self::supervised(1)
    }

    /// `T = B`
    pub fn supervised(steps: usize) -> Self {
        Self {
            main_chain: steps,
            branch: steps,
            time_weights: Vec::new(),
            branch_weights: Vec::new(),
            cut_bptt: false,
            cut_branch: false,
        }
    }

    /// `B = 1`
    pub fn diverted(steps: usize) -> Self {
        Self {
            branch: 1,
            ..Self::supervised(steps)
        }
    }

    /// `T = B = 2` scoring only the second step without backpropagation through time.
    pub fn pushforward() -> Self {
        Self {
            branch_weights: vec![0.0, 1.0],
            cut_bptt: true,
            ..Self::supervised(2)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.main_chain == 0 || self.branch == 0 || self.branch > self.main_chain {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= B <= T, got T={} B={}",
                self.main_chain, self.branch
            )));
        }
        let check = |name: &str, w: &[f64], len: usize| -> Result<()> {
            if w.is_empty() {
                return Ok(());
            }
            if w.len() != len {
                return Err(Error::InvalidArgument(format!("{name} needs {len} entries, got {}", w.len())));
            }
            if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || w.iter().all(|v| *v == 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be nonnegative and not all zero")));
            }
            Ok(())
        };
        check("time weights", &self.time_weights, self.main_chain - self.branch + 1)?;
        check("branch weights", &self.branch_weights, self.branch)
    }

    fn time_weight(&self, t: usize) -> f64 {
        self.time_weights.get(t).copied().unwrap_or(1.0)
    }

    fn branch_weight(&self, b: usize) -> f64 {
        self.branch_weights.get(b - 1).copied().unwrap_or(1.0)
    }

    /// Whether the objective calls the reference solver on emulator outputs.
    pub fn needs_solver(&self) -> bool {
        self.branch < self.main_chain
    }
}

/// Training methodology labels `one`, `sup;T` and `div;T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Methodology {
    OneStep,
    Supervised(usize),
    Diverted(usize),
}

impl Methodology {
    pub fn config(self) -> UnrollConfig {
        match self {
            Methodology::OneStep => UnrollConfig::one_step(),
            Methodology::Supervised(t) => UnrollConfig::supervised(t),
            Methodology::Diverted(t) => UnrollConfig::diverted(t),
        }
    }

    pub fn main_chain(self) -> usize {
        self.config().main_chain
    }

    /// Same methodology with another main-chain length.
    pub fn with_main_chain(self, t: usize) -> Self {
        match self {
            Methodology::OneStep | Methodology::Supervised(_) => Methodology::Supervised(t),
            Methodology::Diverted(_) => Methodology::Diverted(t),
        }
    }
}

impl FromStr for Methodology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown methodology {s:?}; use one, sup;T or div;T"));
        if s == "one" {
            return Ok(Methodology::OneStep);
        }
        let (kind, t) = s.split_once(';').ok_or_else(bad)?;
        let t: usize = t.trim().parse().map_err(|_| bad())?;
        if t == 0 {
            return Err(bad());
        }
        match kind.trim() {
            "sup" => Ok(Methodology::Supervised(t)),
            "div" => Ok(Methodology::Diverted(t)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Methodology {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Methodology> for String {
    fn from(m: Methodology) -> String {
        m.to_string()
    }
}

impl fmt::Display for Methodology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Methodology::OneStep => f.write_str("one"),
            Methodology::Supervised(t) => write!(f, "sup;{t}"),
            Methodology::Diverted(t) => write!(f, "div;{t}"),
        }
    }
}

/// Trajectories an objective is evaluated on, each `(time, channels, spatial...)`.
#[derive(Clone, Copy, Debug)]
pub struct TrainingData<'a> {
    trajectories: &'a [f64],
    num_trajectories: usize,
    time_steps: usize,
    state_len: usize,
}

impl<'a> TrainingData<'a> {
    pub fn new(trajectories: &'a [f64], num_trajectories: usize, time_steps: usize, state_len: usize) -> Result<Self> {
        if trajectories.len() != num_trajectories * time_steps * state_len || num_trajectories == 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} values do not hold {num_trajectories} trajectories of {time_steps} states",
                trajectories.len()
            )));
        }
        Ok(Self {
            trajectories,
            num_trajectories,
            time_steps,
            state_len,
        })
    }

    pub fn from_set(set: &'a TrajectorySet) -> Self {
        Self {
            trajectories: set.data(),
            num_trajectories: set.num_samples(),
            time_steps: set.time_steps(),
            state_len: set.channels() * set.grid().spatial_len(),
        }
    }

    fn state(&self, traj: usize, t: usize) -> &'a [f64] {
        let start = (traj * self.time_steps + t) * self.state_len;
        &self.trajectories[start..start + self.state_len]
    }

    /// Every `(trajectory, start)` window of `T + 1` states.
    fn windows(&self, main_chain: usize) -> Result<Vec<(usize, usize)>> {
        if main_chain + 1 > self.time_steps {
            return Err(Error::InvalidArgument(format!(
                "windows of {} states exceed trajectories of {}",
                main_chain + 1,
                self.time_steps
            )));
        }
        let per = self.time_steps - main_chain;
        Ok((0..self.num_trajectories)
            .flat_map(|i| (0..per).map(move |s| (i, s)))
            .collect())
    }
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Objective value with parameters `theta` on every path, `frozen` on the cut ones.
fn window_loss(
    emulator: &dyn Emulator,
    reference: Option<&Stepper>,
    data: &TrainingData<'_>,
    cfg: &UnrollConfig,
    theta: &[f64],
    frozen: &[f64],
    (traj, start): (usize, usize),
) -> Result<f64> {
    let t_len = cfg.main_chain;
    let n = data.state_len;
    let any_cut = (cfg.cut_bptt || cfg.cut_branch) && theta != frozen;
    // live main chain, and the same chain computed with frozen parameters
    let mut live = vec![0.0; (t_len + 1) * n];
    live[..n].copy_from_slice(data.state(traj, start));
    let mut still = if any_cut { live.clone() } else { Vec::new() };
    for k in 1..=t_len {
        let (prev, next) = live.split_at_mut(k * n);
        let input = if any_cut && cfg.cut_bptt {
            &still[(k - 1) * n..k * n]
        } else {
            &prev[(k - 1) * n..]
        };
        emulator.apply_into(theta, input, &mut next[..n])?;
        if any_cut {
            let (sp, sn) = still.split_at_mut(k * n);
            emulator.apply_into(frozen, &sp[(k - 1) * n..], &mut sn[..n])?;
        }
    }
    let mut total = 0.0;
    let mut branch = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    for t in 0..=(t_len - cfg.branch) {
        let wt = cfg.time_weight(t);
        if t > 0 {
            let source = if any_cut && cfg.cut_branch { &still } else { &live };
            branch.copy_from_slice(&source[t * n..(t + 1) * n]);
        }
        for b in 1..=cfg.branch {
            let target: &[f64] = if t == 0 {
                data.state(traj, start + b)
            } else {
                let solver = reference.ok_or_else(|| {
                    Error::InvalidArgument("branches off the data need a reference solver".into())
                })?;
                step_slice(solver, emulator.channels(), &branch, &mut scratch)?;
                std::mem::swap(&mut branch, &mut scratch);
                &branch
            };
            let w = wt * cfg.branch_weight(b);
            if w != 0.0 {
                total += w * mse(&live[(t + b) * n..(t + b + 1) * n], target);
            }
        }
    }
    Ok(total)
}

/// Unrolled objective with gradient cuts frozen at `frozen`.
///
/// Equal to [`unrolled_objective`] when `theta == frozen`; derivatives in
/// `theta` with `frozen` held fixed follow the cut gradient flow.
pub fn unrolled_objective_frozen(
    emulator: &dyn Emulator,
    reference: Option<&Stepper>,
    data: &TrainingData<'_>,
    cfg: &UnrollConfig,
    theta: &[f64],
    frozen: &[f64],
) -> Result<f64> {
    cfg.validate()?;
    if emulator.state_len() != data.state_len {
        return Err(Error::ShapeMismatch(format!(
            "emulator states hold {} values, data states {}",
            emulator.state_len(),
            data.state_len
        )));
    }
    let windows = data.windows(cfg.main_chain)?;
    let losses: Vec<f64> = windows
        .par_iter()
        .map(|&w| window_loss(emulator, reference, data, cfg, theta, frozen, w))
        .collect::<Result<_>>()?;
    let value = losses.iter().sum::<f64>() / losses.len() as f64;
    if !value.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    Ok(value)
}

/// Mean over all data windows of `sum_t sum_b w_t w_b MSE(f^(t+b)(u), P^b(f^t(u)))`.
pub fn unrolled_objective(
    emulator: &dyn Emulator,
    reference: Option<&Stepper>,
    data: &TrainingData<'_>,
    cfg: &UnrollConfig,
    theta: &[f64],
) -> Result<f64> {
    unrolled_objective_frozen(emulator, reference, data, cfg, theta, theta)
}

/// Branch length one: `sum_t MSE(f^(t+1)(u), P(f^t(u)))`.
pub fn diverted_chain_objective(
    emulator: &dyn Emulator,
    reference: &Stepper,
    data: &TrainingData<'_>,
    main_chain: usize,
    theta: &[f64],
) -> Result<f64> {
    unrolled_objective(emulator, Some(reference), data, &UnrollConfig::diverted(main_chain), theta)
}
