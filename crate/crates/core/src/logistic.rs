//! Generalized logistic (Richards) curve fitting by multi-start Nelder-Mead.
//!
//! ```text
//! y(x) = A + (K - A) / (1 + exp(-B (x - M)))^(1/nu)
//! ```
//!
//! The optimizer works on `(A, K, B, M, ln nu)` so `nu` stays positive.
//! Five starts share `A = min y`, `K = max y`, `nu = 1` and `M` at the first
//! crossing of the half range; with `b = 4 / (x_max - x_min)` they use
//! `B = b, -b, 4b, -4b`, and finally `A`/`K` swapped with `B = -sign(trend) b`.
//! Each start is polished by restarted Nelder-Mead until the residual stops
//! improving.

use alloc::vec::Vec;

/// Points needed for a fit.
pub const MIN_POINTS: usize = 6;
/// `y` ranges below this are treated as constant.
pub const DEGENERATE_RANGE: f64 = 1e-12;

const MAX_ITERATIONS: usize = 20_000;
const MAX_RESTARTS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least {MIN_POINTS} points, got {0}")]
    TooFewPoints(usize),
    #[error("x has {x} values but y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("x must be strictly increasing")]
    NotIncreasing,
    #[error("data contains non-finite values")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticFit {
    /// Lower asymptote.
    pub a: f64,
    /// Upper asymptote.
    pub k: f64,
    /// Growth rate per axis unit.
    pub b: f64,
    /// Inflection location.
    pub m: f64,
    /// Asymmetry, > 0.
    pub nu: f64,
    pub sse: f64,
    pub r_squared: f64,
    /// Set when `y` was constant and no curve was fitted.
    pub degenerate: bool,
}

impl LogisticFit {
    pub fn eval(&self, x: f64) -> f64 {
        richards(x, self.a, self.k, self.b, self.m, self.nu)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}

pub fn richards(x: f64, a: f64, k: f64, b: f64, m: f64, nu: f64) -> f64 {
    a + (k - a) * libm::exp(-softplus(-b * (x - m)) / nu)
}

fn sse(x: &[f64], y: &[f64], theta: &[f64; 5]) -> f64 {
    let [a, k, b, m, log_nu] = *theta;
    let nu = libm::exp(log_nu);
    let total: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = richards(xi, a, k, b, m, nu) - yi;
            r * r
        })
        .sum();
    if total.is_finite() {
        total
    } else {
        f64::INFINITY
    }
}

/// Fits a Richards curve to `(x, y)` by least squares.
pub fn fit_logistic(x: &[f64], y: &[f64]) -> Result<LogisticFit, FitError> {
    if x.len() != y.len() {
        return Err(FitError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(FitError::NonFinite);
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FitError::NotIncreasing);
    }
    let (y_min, y_max) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let x_span = x[x.len() - 1] - x[0];
    if y_max - y_min < DEGENERATE_RANGE {
        return Ok(LogisticFit {
            a: y[0],
            k: y[0],
            b: 0.0,
            m: 0.5 * (x[0] + x[x.len() - 1]),
            nu: 1.0,
            sse: 0.0,
            r_squared: 1.0,
            degenerate: true,
        });
    }

    let half = 0.5 * (y_min + y_max);
    let m0 = half_crossing(x, y, half);
    let b0 = 4.0 / x_span;
    let trend = if y[y.len() - 1] >= y[0] { 1.0 } else { -1.0 };
    let starts = [
        [y_min, y_max, b0, m0, 0.0],
        [y_min, y_max, -b0, m0, 0.0],
        [y_min, y_max, 4.0 * b0, m0, 0.0],
        [y_min, y_max, -4.0 * b0, m0, 0.0],
        [y_max, y_min, -trend * b0, m0, 0.0],
    ];
    let scale = [
        0.1 * (y_max - y_min),
        0.1 * (y_max - y_min),
        0.5 * b0,
        0.1 * x_span,
        0.5,
    ];

    let objective = |t: &[f64; 5]| sse(x, y, t);
    let (best, best_sse) = starts
        .iter()
        .map(|s| polish(&objective, *s, scale))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("five starts");

    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(LogisticFit {
        a: best[0],
        k: best[1],
        b: best[2],
        m: best[3],
        nu: libm::exp(best[4]),
        sse: best_sse,
        r_squared: 1.0 - best_sse / sst,
        degenerate: false,
    })
}

/// First `x` where `y` crosses `level`, linearly interpolated.
fn half_crossing(x: &[f64], y: &[f64], level: f64) -> f64 {
    for i in 1..x.len() {
        let (y0, y1) = (y[i - 1] - level, y[i] - level);
        if y0 == 0.0 {
            return x[i - 1];
        }
        if y0 * y1 <= 0.0 {
            return x[i - 1] + (x[i] - x[i - 1]) * y0 / (y0 - y1);
        }
    }
    0.5 * (x[0] + x[x.len() - 1])
}

/// Restarted Nelder-Mead from `start` until a restart no longer improves.
fn polish<F: Fn(&[f64; 5]) -> f64>(f: &F, start: [f64; 5], scale: [f64; 5]) -> ([f64; 5], f64) {
    let mut best = start;
    let mut best_val = f(&start);
    let mut step = scale;
    for _ in 0..MAX_RESTARTS {
        let (p, v) = nelder_mead(f, best, step);
        let improved = v < best_val;
        if improved {
            best = p;
            best_val = v;
        }
        if !improved || best_val == 0.0 {
            break;
        }
        // restart with a simplex sized to the remaining uncertainty
        for (s, (&sc, &b)) in step.iter_mut().zip(scale.iter().zip(&best)) {
            *s = (sc * 1e-2).max(1e-6 * b.abs()).max(1e-12);
        }
    }
    (best, best_val)
}

fn nelder_mead<F: Fn(&[f64; 5]) -> f64>(f: &F, start: [f64; 5], step: [f64; 5]) -> ([f64; 5], f64) {
    const D: usize = 5;
    let mut simplex: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
    simplex.push((start, f(&start)));
    for i in 0..D {
        let mut p = start;
        p[i] += if step[i] != 0.0 { step[i] } else { 1e-3 };
        simplex.push((p, f(&p)));
    }

    for _ in 0..MAX_ITERATIONS {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (simplex[0].1, simplex[D].1);
        let spread_small = hi - lo <= 1e-15 * lo.abs() + 1e-40;
        let size_small = (1..=D).all(|j| {
            (0..D).all(|i| {
                (simplex[j].0[i] - simplex[0].0[i]).abs()
                    <= 1e-14 * simplex[0].0[i].abs().max(1e-10)
            })
        });
        if spread_small || size_small {
            break;
        }

        let mut centroid = [0.0; D];
        for (p, _) in &simplex[..D] {
            for i in 0..D {
                centroid[i] += p[i] / D as f64;
            }
        }
        let toward = |coef: f64| {
            let mut p = [0.0; D];
            for i in 0..D {
                p[i] = centroid[i] + coef * (simplex[D].0[i] - centroid[i]);
            }
            p
        };

        let reflected = toward(-1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = toward(-2.0);
            let fe = f(&expanded);
            simplex[D] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[D - 1].1 {
            simplex[D] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[D].1 {
                let p = toward(-0.5);
                (p, f(&p))
            } else {
                let p = toward(0.5);
                (p, f(&p))
            };
            if fc < simplex[D].1.min(fr) {
                simplex[D] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for (p, v) in simplex.iter_mut().skip(1) {
                    for i in 0..D {
                        p[i] = best[i] + 0.5 * (p[i] - best[i]);
                    }
                    *v = f(p);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}
