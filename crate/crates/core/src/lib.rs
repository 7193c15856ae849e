//! Closed-form spin-torque vortex oscillator dynamics and a time-multiplexed
//! reservoir classifier built on top of it.
//!
//! The reduced radial position `s` of the vortex core follows the Bernoulli
//! equation `ds/dt = alpha*s + beta*s^(n+1)`, which has an exact solution.
//! A single oscillator driven through 24 masked time slots per input sample
//! forms the reservoir; a ridge readout classifies sine vs square waveforms.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! sweeps, timing and the command line live in the `ddtea` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are there to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod device;
pub mod dynamics;
pub mod experiment;
pub mod logistic;
pub mod readout;
pub mod reservoir;
pub mod rng;
pub mod signal;

pub use device::{DeviceError, DeviceModel, DriveCurrent, PolynomialModel};
pub use dynamics::{
    evolve_closed_form, evolve_rk4, steady_state, trace, DynamicsError, OrbitState, ThieleParams,
};
pub use experiment::{
    run_trial, run_trial_detailed, Axis, NoiseLevel, Stage, SweepPoint, SweepResult,
    TrialArtifacts, TrialConfig, TrialError,
};
pub use logistic::{fit_logistic, FitError, LogisticFit};
pub use readout::{evaluate, train_ridge, Metrics, ReadoutError, ReadoutWeights};
pub use reservoir::{
    collect_states, make_mask, Mask, ReservoirConfig, ReservoirError, StateMatrix,
};
pub use signal::{add_noise, generate_task, Class, LabeledSignal, SignalError, TaskConfig};
