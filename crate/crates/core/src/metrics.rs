//! Rollout comparison metrics in state and Fourier space.

use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etdrk::Trajectory;
use crate::spectral::{Grid, SpatialField, SpectralTransform, WavenumberGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricSpace {
    State,
    Fourier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Absolute,
    Normalized,
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Difference,
    InnerProduct,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelAggregation {
    #[default]
    Mean,
    Sum,
}

/// Full description of a metric function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricDescriptor {
    pub space: MetricSpace,
    pub inner_exponent: f64,
    pub outer_exponent: f64,
    pub normalization: Normalization,
    pub comparison: Comparison,
    /// Inclusive `[lo, hi]` range of `max_d |k_d|` kept by Fourier metrics.
    pub frequency_range: Option<[usize; 2]>,
    /// 0 for the plain spectrum, 1 to add every first-derivative spectrum.
    pub derivative_order: u32,
    pub channel_aggregation: ChannelAggregation,
}

impl MetricDescriptor {
    fn difference(space: MetricSpace, inner: f64, outer: f64, normalization: Normalization) -> Self {
        Self {
            space,
            inner_exponent: inner,
            outer_exponent: outer,
            normalization,
            comparison: Comparison::Difference,
            frequency_range: None,
            derivative_order: 0,
            channel_aggregation: ChannelAggregation::Mean,
        }
    }

    pub fn nrmse() -> Self {
        Self::difference(MetricSpace::State, 2.0, 0.5, Normalization::Normalized)
    }

    pub fn mse() -> Self {
        Self::difference(MetricSpace::State, 2.0, 1.0, Normalization::Absolute)
    }

    pub fn correlation() -> Self {
        Self {
            comparison: Comparison::InnerProduct,
            ..Self::difference(MetricSpace::State, 2.0, 0.5, Normalization::Absolute)
        }
    }

    pub fn with_frequency_range(mut self, lo: usize, hi: usize) -> Self {
        self.frequency_range = Some([lo, hi]);
        self
    }

    pub fn with_channel_aggregation(mut self, aggregation: ChannelAggregation) -> Self {
        self.channel_aggregation = aggregation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.space == MetricSpace::State && (self.frequency_range.is_some() || self.derivative_order != 0) {
            return Err(Error::InvalidArgument(
                "frequency ranges and derivatives need a Fourier-space metric".into(),
            ));
        }
        if self.comparison == Comparison::InnerProduct && self.normalization != Normalization::Absolute {
            return Err(Error::InvalidArgument("inner-product metrics cannot be normalized".into()));
        }
        if !(self.inner_exponent > 0.0 && self.outer_exponent > 0.0) {
            return Err(Error::InvalidArgument("metric exponents must be positive".into()));
        }
        if self.derivative_order > 1 {
            return Err(Error::InvalidArgument("only first derivatives are supported".into()));
        }
        if let Some([lo, hi]) = self.frequency_range {
            if lo > hi {
                return Err(Error::InvalidArgument(format!("empty frequency range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// `mean_[fourier_|H1_][n|s]{MAE,MSE,RMSE}` or `mean_correlation`.
    pub fn from_name(name: &str) -> Result<Self> {
        let unknown = || Error::InvalidArgument(format!("unknown metric {name:?}"));
        let rest = name.strip_prefix("mean_").ok_or_else(unknown)?;
        if rest == "correlation" {
            return Ok(Self::correlation());
        }
        let (space, derivative_order, rest) = if let Some(r) = rest.strip_prefix("fourier_") {
            (MetricSpace::Fourier, 0, r)
        } else if let Some(r) = rest.strip_prefix("H1_") {
            (MetricSpace::Fourier, 1, r)
        } else {
            (MetricSpace::State, 0, rest)
        };
        let (normalization, rest) = match rest.as_bytes().first() {
            Some(b'n') => (Normalization::Normalized, &rest[1..]),
            Some(b's') => (Normalization::Symmetric, &rest[1..]),
            _ => (Normalization::Absolute, rest),
        };
        if normalization == Normalization::Symmetric && space == MetricSpace::Fourier {
            return Err(unknown());
        }
        let (inner, outer) = match rest {
            "MAE" => (1.0, 1.0),
            "MSE" => (2.0, 1.0),
            "RMSE" => (2.0, 0.5),
            _ => return Err(unknown()),
        };
        Ok(Self {
            derivative_order,
            ..Self::difference(space, inner, outer, normalization)
        })
    }

    /// Canonical name of the metric family, ignoring range and channel options.
    pub fn name(&self) -> String {
        if self.comparison == Comparison::InnerProduct {
            return "mean_correlation".into();
        }
        let space = match (self.space, self.derivative_order) {
            (MetricSpace::State, _) => "",
            (MetricSpace::Fourier, 0) => "fourier_",
            (MetricSpace::Fourier, _) => "H1_",
        };
        let norm = match self.normalization {
            Normalization::Absolute => "",
            Normalization::Normalized => "n",
            Normalization::Symmetric => "s",
        };
        let family = match (self.inner_exponent, self.outer_exponent) {
            (i, o) if i == 1.0 && o == 1.0 => "MAE".to_string(),
            (i, o) if i == 2.0 && o == 1.0 => "MSE".to_string(),
            (i, o) if i == 2.0 && o == 0.5 => "RMSE".to_string(),
            (i, o) => format!("P{i}O{o}"),
        };
        format!("mean_{space}{norm}{family}")
    }

    /// Names of every metric in the default catalog.
    pub fn catalog() -> Vec<String> {
        let mut names = Vec::new();
        for family in ["MAE", "MSE", "RMSE"] {
            for norm in ["", "n", "s"] {
                names.push(format!("mean_{norm}{family}"));
            }
        }
        for prefix in ["fourier_", "H1_"] {
            for family in ["MAE", "MSE", "RMSE"] {
                for norm in ["", "n"] {
                    names.push(format!("mean_{prefix}{norm}{family}"));
                }
            }
        }
        names.push("mean_correlation".into());
        names
    }
}

impl fmt::Display for MetricDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for MetricDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s)
    }
}

/// Metric bound to a grid, caching transforms and spectral weights.
#[derive(Debug)]
pub struct MetricEvaluator {
    desc: MetricDescriptor,
    grid: Grid,
    transform: Option<SpectralTransform>,
    /// Per-bin weight of each reduced spectrum: the plain one, then one per derivative axis.
    spectral_weights: Vec<Vec<f64>>,
}

impl MetricEvaluator {
    pub fn new(desc: MetricDescriptor, grid: Grid) -> Result<Self> {
        desc.validate()?;
        let mut spectral_weights = Vec::new();
        let transform = if desc.space == MetricSpace::Fourier {
            let wg = WavenumberGrid::new(grid);
            let conj = wg.conjugate_weights();
            let keep: Vec<f64> = (0..grid.spectral_len())
                .map(|i| match desc.frequency_range {
                    Some([lo, hi]) => {
                        let k = wg.max_abs(i) as usize;
                        if (lo..=hi).contains(&k) {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    None => 1.0,
                })
                .collect();
            let base: Vec<f64> = conj.iter().zip(&keep).map(|(c, k)| c * k).collect();
            spectral_weights.push(base.clone());
            if desc.derivative_order == 1 {
                for axis in 0..grid.num_dims() {
                    let kappa = wg.kappa(axis);
                    spectral_weights.push(
                        base.iter()
                            .zip(&kappa)
                            .map(|(b, k)| b * k.abs().powf(desc.inner_exponent))
                            .collect(),
                    );
                }
            }
            Some(SpectralTransform::new(grid))
        } else {
            None
        };
        Ok(Self {
            desc,
            grid,
            transform,
            spectral_weights,
        })
    }

    pub fn descriptor(&self) -> &MetricDescriptor {
        &self.desc
    }

    /// Spatial reduction of one channel, before the outer exponent.
    fn reduce(&self, values: &[f64], scratch: &mut [Complex64]) -> f64 {
        let p = self.desc.inner_exponent;
        match &self.transform {
            None => values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / values.len() as f64,
            Some(t) => {
                t.forward_into(values, scratch);
                let inv_n = 1.0 / self.grid.spatial_len() as f64;
                let magnitudes: Vec<f64> = scratch.iter().map(|c| (c.norm() * inv_n).powf(p)).collect();
                self.spectral_weights
                    .iter()
                    .map(|w| w.iter().zip(&magnitudes).map(|(a, b)| a * b).sum::<f64>())
                    .sum()
            }
        }
    }

    fn check(&self, pred: &[f64], target: &[f64], channels: usize) -> Result<()> {
        if pred.len() != target.len() || pred.len() != channels * self.grid.spatial_len() {
            return Err(Error::ShapeMismatch(format!(
                "metric inputs of length {} and {} on a grid of {} points with {channels} channels",
                pred.len(),
                target.len(),
                self.grid.spatial_len()
            )));
        }
        Ok(())
    }

    /// Metric of one sample stored as `(channels, spatial...)`.
    pub fn evaluate_slices(&self, pred: &[f64], target: &[f64], channels: usize) -> Result<f64> {
        self.check(pred, target, channels)?;
        let n = self.grid.spatial_len();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.grid.spectral_len()];
        let mut diff = vec![0.0; n];
        let mut total = 0.0;
        for c in 0..channels {
            let p = &pred[c * n..(c + 1) * n];
            let t = &target[c * n..(c + 1) * n];
            let value = match self.desc.comparison {
                Comparison::InnerProduct => cosine(p, t)?,
                Comparison::Difference => {
                    for ((d, a), b) in diff.iter_mut().zip(p).zip(t) {
                        *d = a - b;
                    }
                    let outer = self.desc.outer_exponent;
                    let num = self.reduce(&diff, &mut scratch).powf(outer);
                    match self.desc.normalization {
                        Normalization::Absolute => num,
                        Normalization::Normalized => {
                            let den = self.reduce(t, &mut scratch).powf(outer);
                            if den == 0.0 {
                                return Err(Error::DegenerateTarget);
                            }
                            num / den
                        }
                        Normalization::Symmetric => {
                            let den = 0.5
                                * (self.reduce(t, &mut scratch).powf(outer) + self.reduce(p, &mut scratch).powf(outer));
                            if den == 0.0 {
                                return Err(Error::DegenerateTarget);
                            }
                            num / den
                        }
                    }
                }
            };
            total += value;
        }
        Ok(match self.desc.channel_aggregation {
            ChannelAggregation::Sum => total,
            ChannelAggregation::Mean => total / channels as f64,
        })
    }

    pub fn evaluate(&self, pred: &SpatialField, target: &SpatialField) -> Result<f64> {
        pred.check_same_shape(target)?;
        if pred.grid() != &self.grid {
            return Err(Error::ShapeMismatch("field lives on another grid than the metric".into()));
        }
        self.evaluate_slices(pred.data(), target.data(), pred.channels())
    }

    /// Mean over samples.
    pub fn evaluate_batch(&self, pred: &[SpatialField], target: &[SpatialField]) -> Result<f64> {
        if pred.len() != target.len() || pred.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "batches of {} and {} samples",
                pred.len(),
                target.len()
            )));
        }
        let mut sum = 0.0;
        for (p, t) in pred.iter().zip(target) {
            sum += self.evaluate(p, t)?;
        }
        Ok(sum / pred.len() as f64)
    }
}

fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateTarget);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Evaluates `desc` on one sample.
pub fn compute_metric(desc: &MetricDescriptor, pred: &SpatialField, target: &SpatialField) -> Result<f64> {
    MetricEvaluator::new(*desc, *target.grid())?.evaluate(pred, target)
}

/// Channel-aggregated cosine similarity of two fields.
pub fn correlation(pred: &SpatialField, target: &SpatialField) -> Result<f64> {
    compute_metric(&MetricDescriptor::correlation(), pred, target)
}

/// Default number of steps entering the geometric-mean aggregate.
pub const DEFAULT_HORIZON: usize = 100;

/// Per-step losses of a rollout and their geometric mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RolloutReport {
    pub metric: String,
    /// `L^[t]` for `t = 1..=T`.
    pub losses: Vec<f64>,
    pub horizon: usize,
    pub aggregate: f64,
    /// Set when a zero loss inside the horizon made the geometric mean degenerate.
    pub degenerate: bool,
}

/// `exp(mean(log L))` over the first `horizon` entries; `(0, true)` when one is zero.
pub fn geometric_mean(losses: &[f64], horizon: usize) -> (f64, bool) {
    let window = &losses[..horizon.min(losses.len())];
    if window.is_empty() || window.iter().any(|&l| l <= 0.0) {
        return (0.0, true);
    }
    let mean_log = window.iter().map(|l| l.ln()).sum::<f64>() / window.len() as f64;
    (mean_log.exp(), false)
}

impl RolloutReport {
    pub fn from_losses(metric: String, losses: Vec<f64>, horizon: usize) -> Self {
        let (aggregate, degenerate) = geometric_mean(&losses, horizon);
        Self {
            metric,
            losses,
            horizon,
            aggregate,
            degenerate,
        }
    }
}

/// Compares two trajectories step by step, skipping the shared initial state.
pub fn rollout_metrics(pred: &Trajectory, reference: &Trajectory, desc: &MetricDescriptor, horizon: usize) -> Result<RolloutReport> {
    rollout_metrics_batch(std::slice::from_ref(pred), std::slice::from_ref(reference), desc, horizon)
}

/// Like [`rollout_metrics`] with per-step losses averaged over samples.
pub fn rollout_metrics_batch(
    preds: &[Trajectory],
    references: &[Trajectory],
    desc: &MetricDescriptor,
    horizon: usize,
) -> Result<RolloutReport> {
    if preds.len() != references.len() || preds.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "{} predicted and {} reference trajectories",
            preds.len(),
            references.len()
        )));
    }
    let first = &references[0];
    let evaluator = MetricEvaluator::new(*desc, *first.grid())?;
    let steps = first.len();
    if steps < 2 {
        return Err(Error::InvalidArgument("trajectories need at least one step".into()));
    }
    let mut losses = vec![0.0; steps - 1];
    for (p, r) in preds.iter().zip(references) {
        if p.len() != steps || r.len() != steps || p.channels() != r.channels() || p.grid() != r.grid() || r.grid() != first.grid() {
            return Err(Error::ShapeMismatch("trajectories differ in shape".into()));
        }
        for (t, loss) in losses.iter_mut().enumerate() {
            *loss += evaluator.evaluate_slices(p.snapshot_slice(t + 1), r.snapshot_slice(t + 1), r.channels())?;
        }
    }
    losses.iter_mut().for_each(|l| *l /= preds.len() as f64);
    Ok(RolloutReport::from_losses(desc.name(), losses, horizon))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_field(grid: Grid, channels: usize, seed: u64) -> SpatialField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..grid.spatial_len() * channels).map(|_| rng.random_range(-1.0..1.0)).collect();
        SpatialField::from_vec(grid, channels, data).unwrap()
    }

    fn metric(name: &str, a: &SpatialField, b: &SpatialField) -> f64 {
        compute_metric(&MetricDescriptor::from_name(name).unwrap(), a, b).unwrap()
    }

    #[test]
    fn nrmse_examples() {
        let g = Grid::new(1, 32, 1.0).unwrap();
        let u = random_field(g, 1, 1);
        assert_eq!(metric("mean_nRMSE", &u, &u), 0.0);
        let zero = SpatialField::zeros(g, 1);
        assert!((metric("mean_nRMSE", &zero, &u) - 1.0).abs() < 1e-15);
        assert!((metric("mean_nRMSE", &u.scaled(2.0), &u) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parseval_for_squared_families() {
        for (dims, n) in [(1, 34), (2, 16), (3, 8)] {
            let g = Grid::new(dims, n, 1.0).unwrap();
            let a = random_field(g, 2, 2);
            let b = random_field(g, 2, 3);
            for fam in ["MSE", "nMSE", "RMSE", "nRMSE"] {
                let s = metric(&format!("mean_{fam}"), &a, &b);
                let f = metric(&format!("mean_fourier_{fam}"), &a, &b);
                assert!((s - f).abs() <= 1e-10 * s, "{fam} in {dims}d: {s} vs {f}");
            }
            let s = metric("mean_MAE", &a, &b);
            let f = metric("mean_fourier_MAE", &a, &b);
            assert!((s - f).abs() > 1e-6);
        }
    }

    #[test]
    fn symmetric_and_scale_invariant() {
        let g = Grid::new(2, 12, 1.0).unwrap();
        let a = random_field(g, 1, 4);
        let b = random_field(g, 1, 5);
        assert!((metric("mean_sMAE", &a, &b) - metric("mean_sMAE", &b, &a)).abs() < 1e-14);
        let base = metric("mean_nRMSE", &a, &b);
        let scaled = metric("mean_nRMSE", &a.scaled(-3.5), &b.scaled(-3.5));
        assert!((base - scaled).abs() < 1e-13);
    }

    #[test]
    fn h1_dominates_plain_and_ranges_are_monotone() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let a = random_field(g, 1, 6);
        let b = random_field(g, 1, 7);
        for fam in ["MAE", "MSE", "RMSE"] {
            assert!(metric(&format!("mean_H1_{fam}"), &a, &b) >= metric(&format!("mean_fourier_{fam}"), &a, &b));
        }
        let full = MetricDescriptor::from_name("mean_fourier_MSE").unwrap().with_frequency_range(0, 8);
        let sub = MetricDescriptor::from_name("mean_fourier_MSE").unwrap().with_frequency_range(2, 5);
        let f = compute_metric(&full, &a, &b).unwrap();
        assert!((f - metric("mean_MSE", &a, &b)).abs() < 1e-12 * f);
        assert!(f >= compute_metric(&sub, &a, &b).unwrap());
    }

    #[test]
    fn single_mode_fourier_range() {
        let g = Grid::new(1, 32, 1.0).unwrap();
        let u = SpatialField::from_fn(g, 1, |_, x| (2.0 * PI * 3.0 * x[0]).cos());
        let zero = SpatialField::zeros(g, 1);
        let at = |lo, hi| {
            let d = MetricDescriptor::from_name("mean_fourier_MSE").unwrap().with_frequency_range(lo, hi);
            compute_metric(&d, &u, &zero).unwrap()
        };
        assert!((at(3, 3) - 0.5).abs() < 1e-14);
        assert!(at(4, 16) < 1e-28);
    }

    #[test]
    fn correlation_examples() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let s = SpatialField::from_fn(g, 1, |_, x| (2.0 * PI * x[0]).sin());
        let c = SpatialField::from_fn(g, 1, |_, x| (2.0 * PI * x[0]).cos());
        assert!((correlation(&s, &s).unwrap() - 1.0).abs() < 1e-15);
        assert!((correlation(&s, &s.scaled(-1.0)).unwrap() + 1.0).abs() < 1e-15);
        assert!(correlation(&s, &c).unwrap().abs() < 1e-12);
        assert!(correlation(&s, &SpatialField::zeros(g, 1)).is_err());
    }

    #[test]
    fn degenerate_target_is_an_error() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let zero = SpatialField::zeros(g, 1);
        let u = random_field(g, 1, 1);
        let d = MetricDescriptor::nrmse();
        assert_eq!(compute_metric(&d, &u, &zero), Err(Error::DegenerateTarget));
    }

    #[test]
    fn channel_aggregation() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let a = random_field(g, 2, 1);
        let b = random_field(g, 2, 2);
        let mean = compute_metric(&MetricDescriptor::mse(), &a, &b).unwrap();
        let sum = compute_metric(&MetricDescriptor::mse().with_channel_aggregation(ChannelAggregation::Sum), &a, &b).unwrap();
        assert!((sum - 2.0 * mean).abs() < 1e-15);
    }

    #[test]
    fn names_roundtrip() {
        for name in MetricDescriptor::catalog() {
            assert_eq!(MetricDescriptor::from_name(&name).unwrap().name(), name);
        }
        assert_eq!(MetricDescriptor::catalog().len(), 22);
        assert!(MetricDescriptor::from_name("mean_fourier_sMSE").is_err());
        assert!(MetricDescriptor::from_name("nRMSE").is_err());
    }

    #[test]
    fn geometric_mean_examples() {
        let (g, flagged) = geometric_mean(&[0.01, 0.04], 100);
        assert!((g - 0.02).abs() < 1e-15 && !flagged);
        assert_eq!(geometric_mean(&[0.01, 0.0, 0.04], 100), (0.0, true));
        let (g, flagged) = geometric_mean(&[0.01, 0.04, 0.0], 2);
        assert!((g - 0.02).abs() < 1e-15 && !flagged);
    }

    #[test]
    fn identical_rollouts_are_flagged() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let snaps: Vec<SpatialField> = (0..4).map(|s| random_field(g, 1, s)).collect();
        let traj = Trajectory::from_snapshots(&snaps).unwrap();
        let report = rollout_metrics(&traj, &traj, &MetricDescriptor::nrmse(), DEFAULT_HORIZON).unwrap();
        assert_eq!(report.losses, vec![0.0; 3]);
        assert!(report.degenerate);
        assert_eq!(report.aggregate, 0.0);
    }
}
