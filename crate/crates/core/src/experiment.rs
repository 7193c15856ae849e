//! One classification trial end to end, and sweep aggregation.
//!
//! A trial runs: task generation, optional input noise, peak scaling, state
//! collection, washout removal, chronological train/test split, ridge
//! training and test-set evaluation. Every random stream of a trial derives
//! from `rng::mix_seed(master_seed, point, rep)`, so a trial is a pure
//! function of its configuration and indices.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::device::DeviceModel;
use crate::readout::{
    default_lambda, evaluate, train_ridge, Metrics, ReadoutError, ReadoutWeights,
};
use crate::reservoir::{
    collect_states_with_mask, make_mask, ReservoirConfig, ReservoirError, StateMatrix,
};
use crate::rng::{derive, mix_seed};
use crate::signal::{add_noise, generate_task, LabeledSignal, SignalError, TaskConfig};

const TASK_STREAM: u64 = 0x7461_736b;
const NOISE_STREAM: u64 = 0x006e_6f69_7365;
const MASK_STREAM: u64 = 0x6d61_736b;

/// Sweep repetitions per point used by the reference experiments.
pub const DEFAULT_REPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Signal,
    Reservoir,
    Readout,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Signal => "signal",
            Stage::Reservoir => "reservoir",
            Stage::Readout => "readout",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrialError {
    #[error("config stage: {0}")]
    Config(&'static str),
    #[error("signal stage: {0}")]
    Signal(#[from] SignalError),
    #[error("reservoir stage: {0}")]
    Reservoir(#[from] ReservoirError),
    #[error("readout stage: {0}")]
    Readout(#[from] ReadoutError),
}

impl TrialError {
    pub fn stage(&self) -> Stage {
        match self {
            TrialError::Config(_) => Stage::Config,
            TrialError::Signal(_) => Stage::Signal,
            TrialError::Reservoir(_) => Stage::Reservoir,
            TrialError::Readout(_) => Stage::Readout,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    Clean,
    SnrDb(f64),
}

impl NoiseLevel {
    pub fn snr_db(self) -> Option<f64> {
        match self {
            NoiseLevel::Clean => None,
            NoiseLevel::SnrDb(v) => Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    /// `task.seed` is replaced by a per-trial seed.
    pub task: TaskConfig,
    pub reservoir: ReservoirConfig,
    pub model: DeviceModel,
    pub noise: NoiseLevel,
    /// `None` selects [`default_lambda`] of the training rows.
    pub lambda: Option<f64>,
    /// Fraction of the post-washout samples used for training.
    pub split: f64,
    pub washout: usize,
    pub master_seed: u64,
    /// Draw a fresh mask per trial instead of using `reservoir.mask_seed`.
    pub resample_mask: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            task: TaskConfig::default(),
            reservoir: ReservoirConfig::default(),
            model: DeviceModel::SyntheticDefault,
            noise: NoiseLevel::Clean,
            lambda: None,
            split: 0.8,
            washout: 50,
            master_seed: 0,
            resample_mask: false,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<(), TrialError> {
        self.task.validate()?;
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(TrialError::Config(
                "split must lie strictly between 0 and 1",
            ));
        }
        if self.washout + 10 > self.task.len() {
            return Err(TrialError::Config("washout leaves fewer than 10 samples"));
        }
        let (train, test) = self.split_sizes();
        if train == 0 || test == 0 {
            return Err(TrialError::Config(
                "split leaves an empty train or test set",
            ));
        }
        if let Some(l) = self.lambda {
            if !(l.is_finite() && l >= 0.0) {
                return Err(TrialError::Config("lambda must be finite and >= 0"));
            }
        }
        if let NoiseLevel::SnrDb(v) = self.noise {
            if !v.is_finite() {
                return Err(TrialError::Config("snr_db must be finite"));
            }
        }
        Ok(())
    }

    /// Train and test sample counts after washout.
    pub fn split_sizes(&self) -> (usize, usize) {
        let usable = self.task.len().saturating_sub(self.washout);
        let train = libm::floor(self.split * usable as f64) as usize;
        (train, usable - train)
    }

    /// Copy with the swept quantity set to `value`.
    pub fn at(&self, axis: Axis, value: f64) -> Self {
        let mut c = self.clone();
        match axis {
            Axis::Current => c.reservoir.zeta_bias = value,
            Axis::Snr => c.noise = NoiseLevel::SnrDb(value),
        }
        c
    }

    /// Input sequence of trial `(point, rep)` after noise and peak scaling.
    pub fn trial_input(&self, point: u64, rep: u64) -> Result<LabeledSignal, TrialError> {
        let seed = mix_seed(self.master_seed, point, rep);
        let task = TaskConfig {
            seed: derive(seed, TASK_STREAM),
            ..self.task
        };
        let clean = generate_task(&task)?;
        let mut signal = match self.noise {
            NoiseLevel::Clean => clean,
            NoiseLevel::SnrDb(snr) => add_noise(&clean, snr, derive(seed, NOISE_STREAM))?,
        };
        // noisy inputs are scaled to unit peak so the drive stays in the model range
        let peak = signal.peak();
        if peak > 1.0 {
            signal.samples.iter_mut().for_each(|u| *u /= peak);
        }
        Ok(signal)
    }

    pub fn trial_mask_seed(&self, point: u64, rep: u64) -> u64 {
        if self.resample_mask {
            derive(mix_seed(self.master_seed, point, rep), MASK_STREAM)
        } else {
            self.reservoir.mask_seed
        }
    }
}

/// Everything one trial produced, for export.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialArtifacts {
    /// Reservoir input after noise and peak scaling.
    pub signal: LabeledSignal,
    /// States of every sample, bias column included.
    pub states: StateMatrix,
    pub lambda: f64,
    pub weights: ReadoutWeights,
    pub metrics: Metrics,
}

/// Runs trial `rep` of sweep point `point` and reports test-set metrics.
pub fn run_trial(config: &TrialConfig, point: u64, rep: u64) -> Result<Metrics, TrialError> {
    run_trial_detailed(config, point, rep).map(|t| t.metrics)
}

/// [`run_trial`] keeping the intermediate products.
pub fn run_trial_detailed(
    config: &TrialConfig,
    point: u64,
    rep: u64,
) -> Result<TrialArtifacts, TrialError> {
    config.validate()?;
    let signal = config.trial_input(point, rep)?;
    let mask = make_mask(
        config.reservoir.n_virtual,
        config.trial_mask_seed(point, rep),
    )?;
    let states = collect_states_with_mask(&config.model, &config.reservoir, &mask, &signal)?
        .with_bias_column();
    let targets = signal.targets();

    let (train, test) = config.split_sizes();
    let w0 = config.washout;
    let x_train = states.select_rows(w0..w0 + train);
    let x_test = states.select_rows(w0 + train..w0 + train + test);
    let lambda = config.lambda.unwrap_or_else(|| default_lambda(&x_train));
    let weights = train_ridge(&x_train, &targets[w0..w0 + train], lambda)?;
    let metrics = evaluate(&weights, &x_test, &targets[w0 + train..])?;
    Ok(TrialArtifacts {
        signal,
        states,
        lambda,
        weights,
        metrics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Bias drive current `zeta_bias`.
    Current,
    /// Input signal-to-noise ratio in dB.
    Snr,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Current => "current",
            Axis::Snr => "snr",
        }
    }
}

/// Statistics of one sweep value over its repetitions. A point with any
/// failed repetition is invalid and carries NaN statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_rmse: f64,
    pub std_rmse: f64,
    pub n_reps: usize,
    pub failures: usize,
    pub first_error: Option<String>,
}

impl SweepPoint {
    /// Aggregates repetition outcomes in index order.
    pub fn aggregate(value: f64, outcomes: &[Result<Metrics, TrialError>]) -> Self {
        let failures = outcomes.iter().filter(|o| o.is_err()).count();
        let first_error = outcomes
            .iter()
            .find_map(|o| o.as_ref().err().map(|e| e.to_string()));
        let (mean_accuracy, std_accuracy, mean_rmse, std_rmse) =
            if failures == 0 && !outcomes.is_empty() {
                let acc: Vec<f64> = outcomes.iter().flatten().map(|m| m.accuracy).collect();
                let rmse: Vec<f64> = outcomes.iter().flatten().map(|m| m.rmse).collect();
                let (ma, sa) = mean_std(&acc);
                let (mr, sr) = mean_std(&rmse);
                (ma, sa, mr, sr)
            } else {
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            };
        Self {
            value,
            mean_accuracy,
            std_accuracy,
            mean_rmse,
            std_rmse,
            n_reps: outcomes.len(),
            failures,
            first_error,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.failures == 0 && self.n_reps > 0
    }
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, libm::sqrt(var))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: Axis,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn invalid_fraction(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.points.iter().filter(|p| !p.is_valid()).count() as f64 / self.points.len() as f64
    }

    pub fn point_near(&self, value: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .min_by(|a, b| (a.value - value).abs().total_cmp(&(b.value - value).abs()))
    }
}

/// `count` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![from],
        _ => (0..count)
            .map(|k| from + (to - from) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Single-threaded sweep: point `i` runs reps `0..n_reps` at seed index `i`.
pub fn sweep(config: &TrialConfig, axis: Axis, values: &[f64], n_reps: usize) -> SweepResult {
    let points = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = config.at(axis, v);
            let outcomes: Vec<_> = (0..n_reps as u64)
                .map(|r| run_trial(&c, i as u64, r))
                .collect();
            SweepPoint::aggregate(v, &outcomes)
        })
        .collect();
    SweepResult { axis, points }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_trial() {
        let c = TrialConfig::default();
        assert_eq!(run_trial(&c, 0, 3).unwrap(), run_trial(&c, 0, 3).unwrap());
        let noisy = c.at(Axis::Snr, 5.0);
        let a = run_trial(&noisy, 2, 1).unwrap();
        assert_eq!(a, run_trial(&noisy, 2, 1).unwrap());
    }

    #[test]
    fn clean_default_classifies() {
        let c = TrialConfig::default();
        let acc: Vec<f64> = (0..20)
            .map(|r| run_trial(&c, 0, r).unwrap().accuracy)
            .collect();
        let (mean, _) = mean_std(&acc);
        assert!(mean >= 0.95, "{mean}");
    }

    #[test]
    fn drowned_signal_is_chance() {
        let c = TrialConfig::default().at(Axis::Snr, -20.0);
        let m = run_trial(&c, 0, 0).unwrap();
        assert!((0.40..=0.60).contains(&m.accuracy), "{m:?}");
    }

    #[test]
    fn split_sizes() {
        let c = TrialConfig::default();
        assert_eq!(c.split_sizes(), (920, 230));
    }

    #[test]
    fn config_errors_name_stage() {
        let c = TrialConfig {
            split: 1.0,
            ..TrialConfig::default()
        };
        assert_eq!(run_trial(&c, 0, 0).unwrap_err().stage(), Stage::Config);
        let c = TrialConfig {
            washout: 1195,
            ..TrialConfig::default()
        };
        assert_eq!(run_trial(&c, 0, 0).unwrap_err().stage(), Stage::Config);
        let mut c = TrialConfig::default();
        c.reservoir.zeta_bias = 2.4;
        let err = run_trial(&c, 0, 0).unwrap_err();
        assert_eq!(err.stage(), Stage::Reservoir);
        assert!(err.to_string().starts_with("reservoir stage"));
    }

    #[test]
    fn single_rep_sweep_matches_trial() {
        let c = TrialConfig::default();
        let r = sweep(&c, Axis::Current, &[1.5], 1);
        let m = run_trial(&c, 0, 0).unwrap();
        let p = &r.points[0];
        assert_eq!((p.mean_accuracy, p.mean_rmse), (m.accuracy, m.rmse));
        assert_eq!((p.std_accuracy, p.std_rmse), (0.0, 0.0));
    }

    #[test]
    fn failed_points_are_marked() {
        let c = TrialConfig::default();
        let r = sweep(&c, Axis::Current, &[1.5, 2.45], 2);
        assert!(r.points[0].is_valid());
        assert!(!r.points[1].is_valid());
        assert!(r.points[1].mean_accuracy.is_nan());
        assert!(r.points[1].first_error.is_some());
        assert_eq!(r.invalid_fraction(), 0.5);
    }

    #[test]
    fn statistics() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - libm::sqrt(5.0 / 3.0)).abs() < 1e-15);
        assert_eq!(linspace(-20.0, 40.0, 25)[4], -10.0);
        assert_eq!(linspace(3.0, 9.0, 1), alloc::vec![3.0]);
    }
}
