//! Drive current to oscillator parameters.
//!
//! Currents are normalized to the critical current: `zeta = 1` is the
//! oscillation threshold where `alpha` changes sign.

use alloc::vec::Vec;

use crate::dynamics::ThieleParams;

/// Growth-rate scale of the synthetic model, 1/s.
pub const SYNTHETIC_A0: f64 = 1.0e8;
/// Nonlinear-rate scale of the synthetic model, 1/s.
pub const SYNTHETIC_B0: f64 = 2.0e8;
pub const SYNTHETIC_RANGE: (f64, f64) = (0.5, 2.5);
/// Highest polynomial degree accepted for fitted coefficients.
pub const MAX_DEGREE: usize = 6;
/// Number of evenly spaced currents checked when a model is built.
pub const VALIDATION_GRID: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum DeviceError {
    #[error("drive current must be finite and >= 0, got {0}")]
    InvalidCurrent(f64),
    #[error("drive current {zeta} outside the model range [{min}, {max}]")]
    OutOfRange { zeta: f64, min: f64, max: f64 },
    #[error("beta vanishes at zeta = {zeta}")]
    DegenerateBeta { zeta: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
    #[error(
        "model violates beta < 0 where alpha > 0 at zeta = {zeta} (alpha = {alpha}, beta = {beta})"
    )]
    UnboundedGrowth { zeta: f64, alpha: f64, beta: f64 },
    #[error("model gives invalid exponent n = {n} at zeta = {zeta}")]
    InvalidExponent { zeta: f64, n: f64 },
}

/// Drive current normalized to the critical current.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DriveCurrent(f64);

impl DriveCurrent {
    pub fn new(zeta: f64) -> Result<Self, DeviceError> {
        if zeta.is_finite() && zeta >= 0.0 {
            Ok(Self(zeta))
        } else {
            Err(DeviceError::InvalidCurrent(zeta))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Power-basis polynomials for `alpha(zeta)`, `beta(zeta)` and `n(zeta)` on a
/// validity interval. Coefficients are stored in ascending power order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialModel {
    zeta_min: f64,
    zeta_max: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    n: Vec<f64>,
}

impl PolynomialModel {
    /// Builds and validates a model. Besides shape checks, every point of a
    /// 1000-point grid over the interval must have `n > 0` and `beta < 0`
    /// wherever `alpha > 0`.
    pub fn new(
        zeta_range: (f64, f64),
        alpha: Vec<f64>,
        beta: Vec<f64>,
        n: Vec<f64>,
    ) -> Result<Self, DeviceError> {
        let (zeta_min, zeta_max) = zeta_range;
        if !(zeta_min.is_finite() && zeta_max.is_finite()) {
            return Err(DeviceError::InvalidModel("zeta range must be finite"));
        }
        if zeta_min < 0.0 {
            return Err(DeviceError::InvalidModel("zeta range must be non-negative"));
        }
        if !(zeta_min < zeta_max) {
            return Err(DeviceError::InvalidModel("zeta range is empty"));
        }
        for coeffs in [&alpha, &beta, &n] {
            if coeffs.is_empty() {
                return Err(DeviceError::InvalidModel(
                    "polynomial needs at least one coefficient",
                ));
            }
            if coeffs.len() > MAX_DEGREE + 1 {
                return Err(DeviceError::InvalidModel("polynomial degree exceeds 6"));
            }
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(DeviceError::InvalidModel("coefficients must be finite"));
            }
        }
        let model = Self {
            zeta_min,
            zeta_max,
            alpha,
            beta,
            n,
        };
        model.check_grid()?;
        Ok(model)
    }

    fn check_grid(&self) -> Result<(), DeviceError> {
        let span = self.zeta_max - self.zeta_min;
        for k in 0..VALIDATION_GRID {
            let zeta = self.zeta_min + span * k as f64 / (VALIDATION_GRID - 1) as f64;
            let (alpha, beta, n) = self.raw(zeta);
            if !(n.is_finite() && n > 0.0) {
                return Err(DeviceError::InvalidExponent { zeta, n });
            }
            if alpha > 0.0 && !(beta < 0.0) {
                return Err(DeviceError::UnboundedGrowth { zeta, alpha, beta });
            }
        }
        Ok(())
    }

    fn raw(&self, zeta: f64) -> (f64, f64, f64) {
        (
            horner(&self.alpha, zeta),
            horner(&self.beta, zeta),
            horner(&self.n, zeta),
        )
    }

    pub fn zeta_range(&self) -> (f64, f64) {
        (self.zeta_min, self.zeta_max)
    }

    pub fn alpha_coefficients(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta_coefficients(&self) -> &[f64] {
        &self.beta
    }

    pub fn n_coefficients(&self) -> &[f64] {
        &self.n
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum DeviceModel {
    /// `alpha = A0 (zeta - 1)`, `beta = -B0 zeta`, `n = 2` on `zeta` in [0.5, 2.5].
    #[default]
    SyntheticDefault,
    Polynomial(PolynomialModel),
}

impl DeviceModel {
    pub fn validity(&self) -> (f64, f64) {
        match self {
            DeviceModel::SyntheticDefault => SYNTHETIC_RANGE,
            DeviceModel::Polynomial(m) => m.zeta_range(),
        }
    }

    pub fn contains(&self, zeta: f64) -> bool {
        let (lo, hi) = self.validity();
        zeta >= lo && zeta <= hi
    }

    pub fn params_for_current(&self, current: DriveCurrent) -> Result<ThieleParams, DeviceError> {
        let zeta = current.get();
        let (min, max) = self.validity();
        if !(zeta >= min && zeta <= max) {
            return Err(DeviceError::OutOfRange { zeta, min, max });
        }
        let (alpha, beta, n) = match self {
            DeviceModel::SyntheticDefault => {
                (SYNTHETIC_A0 * (zeta - 1.0), -SYNTHETIC_B0 * zeta, 2.0)
            }
            DeviceModel::Polynomial(m) => m.raw(zeta),
        };
        if beta == 0.0 {
            return Err(DeviceError::DegenerateBeta { zeta });
        }
        ThieleParams::new(alpha, beta, n).map_err(|_| DeviceError::InvalidExponent { zeta, n })
    }

    /// Shorthand for [`DeviceModel::params_for_current`] on a raw `zeta`.
    pub fn params_at(&self, zeta: f64) -> Result<ThieleParams, DeviceError> {
        self.params_for_current(DriveCurrent::new(zeta)?)
    }
}
