//! Labeled sine/square waveform sequences and input-referred white noise.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::rng::{derive, CounterRng};

const SEGMENT_STREAM: u64 = 0x5345_474d_454e_5453;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("invalid task configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("signal is empty")]
    Empty,
    #[error("SNR must be finite, got {0} dB")]
    InvalidSnr(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Sine = 0,
    Square = 1,
}

impl Class {
    /// Regression target of the class.
    #[inline]
    pub fn target(self) -> f64 {
        self as u8 as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskConfig {
    /// Number of waveform periods in the sequence.
    pub segments: usize,
    pub samples_per_period: usize,
    pub seed: u64,
    /// Probability that a segment is a square period.
    pub class_balance: f64,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self {
            segments: 100,
            samples_per_period: 12,
            seed: 0,
            class_balance: 0.5,
        }
    }
}

impl TaskConfig {
    pub fn validate(&self) -> Result<(), SignalError> {
        if self.segments < 1 {
            return Err(SignalError::InvalidConfig("segments must be >= 1"));
        }
        if self.samples_per_period < 2 {
            return Err(SignalError::InvalidConfig(
                "samples_per_period must be >= 2",
            ));
        }
        if !(0.0..=1.0).contains(&self.class_balance) {
            return Err(SignalError::InvalidConfig(
                "class_balance must lie in [0, 1]",
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.segments * self.samples_per_period
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSignal {
    pub samples: Vec<f64>,
    pub labels: Vec<Class>,
    /// `None` for a clean signal.
    pub snr_db: Option<f64>,
}

impl LabeledSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Empirical mean square of the samples.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64
    }

    pub fn targets(&self) -> Vec<f64> {
        self.labels.iter().map(|c| c.target()).collect()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

/// Concatenation of randomly chosen sine and square periods. Square periods
/// are `sign(sin(2 pi k / spp))` with `sign(0) = +1`.
pub fn generate_task(config: &TaskConfig) -> Result<LabeledSignal, SignalError> {
    config.validate()?;
    let spp = config.samples_per_period;
    let sine: Vec<f64> = (0..spp)
        .map(|k| libm::sin(2.0 * PI * k as f64 / spp as f64))
        .collect();
    let square: Vec<f64> = sine
        .iter()
        .map(|&x| if x >= 0.0 { 1.0 } else { -1.0 })
        .collect();

    let rng = CounterRng::new(derive(config.seed, SEGMENT_STREAM));
    let mut samples = Vec::with_capacity(config.len());
    let mut labels = Vec::with_capacity(config.len());
    for segment in 0..config.segments {
        let class = if rng.uniform(segment as u64) < config.class_balance {
            Class::Square
        } else {
            Class::Sine
        };
        let period = match class {
            Class::Sine => &sine,
            Class::Square => &square,
        };
        samples.extend_from_slice(period);
        labels.extend(core::iter::repeat_n(class, spp));
    }
    Ok(LabeledSignal {
        samples,
        labels,
        snr_db: None,
    })
}

/// Adds i.i.d. zero-mean Gaussian noise of variance
/// `P / 10^(snr_db / 10)`, with `P` the empirical power of `signal`.
pub fn add_noise(
    signal: &LabeledSignal,
    snr_db: f64,
    seed: u64,
) -> Result<LabeledSignal, SignalError> {
    if signal.is_empty() {
        return Err(SignalError::Empty);
    }
    if !snr_db.is_finite() {
        return Err(SignalError::InvalidSnr(snr_db));
    }
    let sigma = noise_sigma(signal.power(), snr_db);
    let rng = CounterRng::new(seed);
    let samples = signal
        .samples
        .iter()
        .enumerate()
        .map(|(i, &x)| x + sigma * rng.normal(i as u64))
        .collect();
    Ok(LabeledSignal {
        samples,
        labels: signal.labels.clone(),
        snr_db: Some(snr_db),
    })
}

/// Noise standard deviation that puts a signal of power `power` at `snr_db`.
pub fn noise_sigma(power: f64, snr_db: f64) -> f64 {
    libm::sqrt(power / libm::pow(10.0, snr_db / 10.0))
}
