//! Time-multiplexed single-oscillator reservoir.
//!
//! Each input sample `u_k` is spread over `n_virtual` consecutive node slots
//! of duration `theta`. During node `i` the oscillator is driven at
//! `zeta = zeta_bias + zeta_span * m_i * u_k` and its orbit at the end of the
//! slot is the feature `(k, i)`. The orbit is never reset, so one continuous
//! trajectory carries memory across nodes and samples.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::device::{DeviceError, DeviceModel};
use crate::dynamics::{evolve_closed_form, DynamicsError, OrbitState};
use crate::rng::{derive, CounterRng};
use crate::signal::LabeledSignal;

const MASK_STREAM: u64 = 0x4d41_534b;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ReservoirError {
    #[error("invalid reservoir configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("drive range [{lo}, {hi}] leaves the model range [{min}, {max}]")]
    DriveOutOfRange {
        lo: f64,
        hi: f64,
        min: f64,
        max: f64,
    },
    #[error("sample {sample}, node {node}: {source}")]
    Device {
        sample: usize,
        node: usize,
        source: DeviceError,
    },
    #[error("sample {sample}, node {node}: {source}")]
    Dynamics {
        sample: usize,
        node: usize,
        source: DynamicsError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirConfig {
    pub n_virtual: usize,
    /// Node duration, seconds.
    pub theta: f64,
    pub zeta_bias: f64,
    pub zeta_span: f64,
    pub mask_seed: u64,
    /// Orbit at the start of the trajectory.
    pub s_init: f64,
}

impl Default for ReservoirConfig {
    fn default() -> Self {
        Self {
            n_virtual: 24,
            // a fifth of the relaxation time 1/(n alpha) = 10 ns at the bias point
            theta: 2e-9,
            zeta_bias: 1.5,
            zeta_span: 0.45,
            mask_seed: 0,
            s_init: 0.01,
        }
    }
}

impl ReservoirConfig {
    /// Checks the configuration against `model` for inputs bounded by
    /// `|u| <= peak`.
    pub fn validate(&self, model: &DeviceModel, peak: f64) -> Result<(), ReservoirError> {
        if self.n_virtual < 1 {
            return Err(ReservoirError::InvalidConfig("n_virtual must be >= 1"));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(ReservoirError::InvalidConfig(
                "theta must be finite and > 0",
            ));
        }
        if !(self.s_init.is_finite() && self.s_init >= 0.0) {
            return Err(ReservoirError::InvalidConfig(
                "s_init must be finite and >= 0",
            ));
        }
        if !(self.zeta_bias.is_finite() && self.zeta_span.is_finite() && peak.is_finite()) {
            return Err(ReservoirError::InvalidConfig(
                "drive settings must be finite",
            ));
        }
        let reach = (self.zeta_span * peak).abs();
        let (lo, hi) = (self.zeta_bias - reach, self.zeta_bias + reach);
        let (min, max) = model.validity();
        if lo < min || hi > max {
            return Err(ReservoirError::DriveOutOfRange { lo, hi, min, max });
        }
        Ok(())
    }
}

/// Fixed ±1 input weights, one per virtual node.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    values: Vec<f64>,
}

impl Mask {
    /// Mask with explicit weights; `None` if empty or any weight is non-finite.
    pub fn from_values(values: Vec<f64>) -> Option<Self> {
        (!values.is_empty() && values.iter().all(|v| v.is_finite())).then_some(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// I.i.d. uniform ±1 mask; bit 0 of each stream word picks the sign.
pub fn make_mask(n_virtual: usize, mask_seed: u64) -> Result<Mask, ReservoirError> {
    if n_virtual < 1 {
        return Err(ReservoirError::InvalidConfig("n_virtual must be >= 1"));
    }
    let rng = CounterRng::new(derive(mask_seed, MASK_STREAM));
    let values = (0..n_virtual as u64)
        .map(|i| if rng.word(i) & 1 == 1 { 1.0 } else { -1.0 })
        .collect();
    Ok(Mask { values })
}

/// Row-major feature matrix, one row per input sample. When `has_bias` is
/// set the last column is the constant 1 appended for the readout.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    has_bias: bool,
}

impl StateMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
            has_bias: false,
        }
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "state matrix shape mismatch");
        Self {
            rows,
            cols,
            data,
            has_bias: false,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn has_bias(&self) -> bool {
        self.has_bias
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Copy with a trailing column of ones.
    pub fn with_bias_column(&self) -> Self {
        let cols = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.push(1.0);
        }
        Self {
            rows: self.rows,
            cols,
            data,
            has_bias: true,
        }
    }

    pub fn select_rows(&self, range: Range<usize>) -> Self {
        let data = self.data[range.start * self.cols..range.end * self.cols].to_vec();
        Self {
            rows: range.len(),
            cols: self.cols,
            data,
            has_bias: self.has_bias,
        }
    }
}

/// Drives one continuous oscillator trajectory through every node of every
/// sample and records the orbit at the end of each node.
pub fn collect_states(
    model: &DeviceModel,
    config: &ReservoirConfig,
    signal: &LabeledSignal,
) -> Result<StateMatrix, ReservoirError> {
    let mask = make_mask(config.n_virtual, config.mask_seed)?;
    collect_states_with_mask(model, config, &mask, signal)
}

/// [`collect_states`] with an explicit mask; `config.mask_seed` is ignored.
pub fn collect_states_with_mask(
    model: &DeviceModel,
    config: &ReservoirConfig,
    mask: &Mask,
    signal: &LabeledSignal,
) -> Result<StateMatrix, ReservoirError> {
    config.validate(model, signal.peak())?;
    if mask.len() != config.n_virtual {
        return Err(ReservoirError::InvalidConfig(
            "mask length differs from n_virtual",
        ));
    }
    let nodes = config.n_virtual;
    let mut states = StateMatrix::zeros(signal.len(), nodes);
    let mut s = OrbitState::new(config.s_init)
        .map_err(|_| ReservoirError::InvalidConfig("s_init must be finite and >= 0"))?;
    for (sample, &u) in signal.samples.iter().enumerate() {
        let row = &mut states.data[sample * nodes..(sample + 1) * nodes];
        for (node, (&m, out)) in mask.values.iter().zip(row.iter_mut()).enumerate() {
            let zeta = config.zeta_bias + config.zeta_span * m * u;
            let p = model
                .params_at(zeta)
                .map_err(|source| ReservoirError::Device {
                    sample,
                    node,
                    source,
                })?;
            s = evolve_closed_form(&p, s, config.theta).map_err(|source| {
                ReservoirError::Dynamics {
                    sample,
                    node,
                    source,
                }
            })?;
            *out = s.get();
        }
    }
    Ok(states)
}
