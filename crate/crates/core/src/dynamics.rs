//! Evolution of the reduced vortex-core orbit `s` under
//! `ds/dt = alpha*s + beta*s^(n+1)`.
//!
//! The closed form is
//!
//! ```text
//! s(t) = s0 / R(t)^(1/n),   R(t) = (1 + c) exp(-n alpha t) - c,   c = s0^n beta / alpha
//! ```
//!
//! evaluated in an `expm1`-based arrangement that stays accurate as
//! `alpha -> 0` and does not overflow for large `|alpha| t`. Below a relative
//! threshold on `|alpha|` the exact `alpha = 0` solution
//! `s0 (1 - n beta s0^n t)^(-1/n)` is used instead. A non-positive `R` means
//! the orbit diverges in finite time.

use alloc::vec::Vec;

/// Relative threshold on `|alpha|` (in units of `|beta| s0^n`) below which the
/// `alpha = 0` solution is used.
pub const ALPHA_LIMIT_RELATIVE: f64 = 1e-9;
/// Absolute floor of the `alpha` threshold, 1/s.
pub const ALPHA_LIMIT_FLOOR: f64 = 1e-30;
/// RK4 integration stops and reports divergence once `s` exceeds this.
pub const RK4_DIVERGENCE_GUARD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("orbit diverges in finite time at t* = {t_star:e} s")]
    BlowUp { t_star: f64 },
    #[error("orbit diverges before grid point {index} (t* = {t_star:e} s)")]
    TraceBlowUp { index: usize, t_star: f64 },
}

/// Growth rate `alpha`, nonlinear rate `beta` (both 1/s, any sign) and the
/// nonlinearity exponent `n > 0` of one oscillator at one drive current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThieleParams {
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
}

impl ThieleParams {
    pub fn new(alpha: f64, beta: f64, n: f64) -> Result<Self, DynamicsError> {
        let p = Self { alpha, beta, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !self.alpha.is_finite() {
            return Err(DynamicsError::InvalidParameter("alpha must be finite"));
        }
        if !self.beta.is_finite() {
            return Err(DynamicsError::InvalidParameter("beta must be finite"));
        }
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(DynamicsError::InvalidParameter("n must be finite and > 0"));
        }
        Ok(())
    }

    /// Right-hand side `alpha s + beta s |s|^n`, odd-extended so that an
    /// integrator overshooting below zero stays real-valued.
    #[inline]
    pub fn rate(&self, s: f64) -> f64 {
        self.alpha * s + self.beta * s * pow_real(s.abs(), self.n)
    }

    /// The `|alpha|` below which the `alpha = 0` solution is used for orbit `s0`.
    pub fn alpha_threshold(&self, s0: f64) -> f64 {
        (ALPHA_LIMIT_RELATIVE * self.beta.abs() * pow_real(s0, self.n)).max(ALPHA_LIMIT_FLOOR)
    }
}

/// Reduced radial orbit of the vortex core, `s >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct OrbitState(f64);

impl OrbitState {
    pub const CENTER: OrbitState = OrbitState(0.0);

    pub fn new(s: f64) -> Result<Self, DynamicsError> {
        if s.is_finite() && s >= 0.0 {
            Ok(Self(s))
        } else {
            Err(DynamicsError::InvalidParameter(
                "orbit must be finite and >= 0",
            ))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// `x^n` for `x >= 0`, exact multiplication for small integer exponents.
#[inline]
pub(crate) fn pow_real(x: f64, n: f64) -> f64 {
    if n == 1.0 {
        x
    } else if n == 2.0 {
        x * x
    } else if n == 3.0 {
        x * x * x
    } else {
        libm::pow(x, n)
    }
}

fn check_time(dt: f64) -> Result<(), DynamicsError> {
    if dt.is_finite() && dt >= 0.0 {
        Ok(())
    } else {
        Err(DynamicsError::InvalidParameter(
            "time step must be finite and >= 0",
        ))
    }
}

/// Finite blow-up time for orbit `s0` (with `sn = s0^n`), if the equation
/// diverges from there at all.
fn blow_up_time(p: &ThieleParams, s0: f64, sn: f64) -> Option<f64> {
    if p.alpha.abs() < p.alpha_threshold(s0) {
        return (p.beta > 0.0).then(|| 1.0 / (p.n * p.beta * sn));
    }
    let c = sn * p.beta / p.alpha;
    let t = libm::log1p(1.0 / c) / (p.n * p.alpha);
    (t.is_finite() && t > 0.0).then_some(t)
}

/// Exact orbit after `dt` seconds starting from `s0`.
pub fn evolve_closed_form(
    p: &ThieleParams,
    s0: OrbitState,
    dt: f64,
) -> Result<OrbitState, DynamicsError> {
    p.validate()?;
    check_time(dt)?;
    let s0 = s0.get();
    if s0 == 0.0 || dt == 0.0 {
        return Ok(OrbitState(s0));
    }
    let sn = pow_real(s0, p.n);
    let blow_up = || DynamicsError::BlowUp {
        t_star: blow_up_time(p, s0, sn).unwrap_or(dt),
    };

    // log of the orbit ratio s(dt)/s0
    let log_ratio = if p.alpha.abs() < p.alpha_threshold(s0) {
        let b = 1.0 - p.n * p.beta * sn * dt;
        if !(b > 0.0) {
            return Err(blow_up());
        }
        -libm::log(b) / p.n
    } else {
        let c = sn * p.beta / p.alpha;
        let y = p.n * p.alpha * dt;
        if p.alpha > 0.0 {
            // R = e^-y + c (e^-y - 1), bounded for any y >= 0
            let r = libm::exp(-y) + c * libm::expm1(-y);
            if !(r > 0.0) {
                return Err(blow_up());
            }
            -libm::log(r) / p.n
        } else {
            // R = e^-y (1 - c (e^y - 1)), factored so e^-y never overflows
            let b = 1.0 - c * libm::expm1(y);
            if !(b > 0.0) {
                return Err(blow_up());
            }
            p.alpha * dt - libm::log(b) / p.n
        }
    };
    let s = s0 * libm::exp(log_ratio);
    if s.is_finite() {
        Ok(OrbitState(s))
    } else {
        Err(blow_up())
    }
}

/// Nonzero attractor of the dynamics: `(-alpha/beta)^(1/n)` for
/// `alpha > 0, beta < 0`, the centre for decaying dynamics, `None` when no
/// finite attractor exists.
pub fn steady_state(p: &ThieleParams) -> Result<Option<OrbitState>, DynamicsError> {
    p.validate()?;
    Ok(if p.alpha > 0.0 {
        (p.beta < 0.0).then(|| OrbitState(libm::pow(-p.alpha / p.beta, 1.0 / p.n)))
    } else if p.alpha < 0.0 || p.beta < 0.0 {
        Some(OrbitState::CENTER)
    } else {
        // alpha = 0 and beta >= 0: marginal or divergent
        None
    })
}

/// Classical fixed-step fourth-order Runge-Kutta integration over `dt`, with
/// the step rounded so that an integer number of steps covers `dt` exactly.
pub fn evolve_rk4(
    p: &ThieleParams,
    s0: OrbitState,
    dt: f64,
    step: f64,
) -> Result<OrbitState, DynamicsError> {
    p.validate()?;
    check_time(dt)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(DynamicsError::InvalidParameter(
            "step must be finite and > 0",
        ));
    }
    if step > dt * (1.0 + 1e-12) {
        return Err(DynamicsError::InvalidParameter("step must not exceed dt"));
    }
    let steps = libm::round(dt / step).max(1.0) as u64;
    let h = dt / steps as f64;
    let mut s = s0.get();
    for i in 0..steps {
        let k1 = p.rate(s);
        let k2 = p.rate(s + 0.5 * h * k1);
        let k3 = p.rate(s + 0.5 * h * k2);
        let k4 = p.rate(s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !(s.abs() <= RK4_DIVERGENCE_GUARD) {
            return Err(DynamicsError::BlowUp {
                t_star: (i + 1) as f64 * h,
            });
        }
    }
    Ok(OrbitState(s.max(0.0)))
}

/// Orbit at every time of a non-decreasing grid, each evaluated directly from
/// `s0` at `t = 0`.
pub fn trace(
    p: &ThieleParams,
    s0: OrbitState,
    grid: &[f64],
) -> Result<Vec<OrbitState>, DynamicsError> {
    if grid.first().is_some_and(|&t| !(t >= 0.0)) {
        return Err(DynamicsError::InvalidParameter(
            "time grid must start at t >= 0",
        ));
    }
    if grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(DynamicsError::InvalidParameter(
            "time grid must be non-decreasing",
        ));
    }
    grid.iter()
        .enumerate()
        .map(|(index, &t)| {
            evolve_closed_form(p, s0, t).map_err(|e| match e {
                DynamicsError::BlowUp { t_star } => DynamicsError::TraceBlowUp { index, t_star },
                other => other,
            })
        })
        .collect()
}
