//! Ridge-regression readout and the accuracy / RMSE metrics.

use alloc::vec;
use alloc::vec::Vec;

use crate::reservoir::StateMatrix;

/// Cholesky pivots below this fraction of the largest diagonal entry mark the
/// normal equations as singular.
pub const PIVOT_THRESHOLD: f64 = 1e-12;
/// Predictions strictly above this are class 1.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ReadoutError {
    #[error("shape mismatch: {rows} rows against {targets} targets")]
    ShapeMismatch { rows: usize, targets: usize },
    #[error("weight vector has {weights} entries for {cols} columns")]
    WidthMismatch { weights: usize, cols: usize },
    #[error("regularizer must be finite and >= 0, got {0}")]
    InvalidLambda(f64),
    #[error("normal equations are singular (pivot {pivot} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("no samples to train or evaluate on")]
    Empty,
    #[error("non-finite value in inputs")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutWeights {
    /// One weight per column; the trailing entry is the bias weight when the
    /// training matrix carried a bias column.
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub rmse: f64,
}

/// Default regularizer relative to the mean feature variance.
pub const RIDGE_RELATIVE: f64 = 1e-11;

/// `RIDGE_RELATIVE * trace(Xc^T Xc) / d` over the `d` regularized columns,
/// with `Xc` the column-centered features. Centering removes the large
/// common offset of oscillator orbits, which would otherwise set the scale.
pub fn default_lambda(x: &StateMatrix) -> f64 {
    let d = regularized_cols(x);
    if d == 0 || x.rows() == 0 {
        return 0.0;
    }
    let means = column_means(x, d);
    let mut trace = 0.0;
    for r in 0..x.rows() {
        for (v, m) in x.row(r)[..d].iter().zip(&means) {
            trace += (v - m) * (v - m);
        }
    }
    RIDGE_RELATIVE * trace / d as f64
}

fn regularized_cols(x: &StateMatrix) -> usize {
    if x.has_bias() {
        x.cols() - 1
    } else {
        x.cols()
    }
}

fn column_means(x: &StateMatrix, d: usize) -> Vec<f64> {
    let mut means = vec![0.0; d];
    for r in 0..x.rows() {
        for (m, v) in means.iter_mut().zip(x.row(r)) {
            *m += v;
        }
    }
    let n = x.rows() as f64;
    means.iter_mut().for_each(|m| *m /= n);
    means
}

/// Minimizes `|Xw - y|^2 + lambda |w'|^2` where `w'` excludes the bias weight
/// (if `x` has a bias column), by Cholesky factorization of the normal
/// equations.
///
/// With a bias column the unpenalized bias is eliminated first: the normal
/// equations are formed on column-centered features and targets, and the
/// bias is recovered as `mean(y) - mean(X') w'`. The minimizer is the same;
/// the centered system is far better conditioned.
pub fn train_ridge(
    x: &StateMatrix,
    y: &[f64],
    lambda: f64,
) -> Result<ReadoutWeights, ReadoutError> {
    if x.rows() != y.len() {
        return Err(ReadoutError::ShapeMismatch {
            rows: x.rows(),
            targets: y.len(),
        });
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(ReadoutError::InvalidLambda(lambda));
    }
    if x.rows() == 0 || x.cols() == 0 {
        return Err(ReadoutError::Empty);
    }
    if x.as_slice().iter().chain(y).any(|v| !v.is_finite()) {
        return Err(ReadoutError::NonFinite);
    }
    let d = regularized_cols(x);
    let (means, y_mean) = if x.has_bias() {
        (column_means(x, d), y.iter().sum::<f64>() / y.len() as f64)
    } else {
        (vec![0.0; d], 0.0)
    };
    let mut gram = vec![0.0; d * d];
    let mut rhs = vec![0.0; d];
    let mut centered = vec![0.0; d];
    for (r, &yr) in y.iter().enumerate() {
        for ((c, v), m) in centered.iter_mut().zip(x.row(r)).zip(&means) {
            *c = v - m;
        }
        let target = yr - y_mean;
        for i in 0..d {
            rhs[i] += centered[i] * target;
            for j in 0..=i {
                gram[i * d + j] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        gram[i * d + i] += lambda;
    }
    let mut w = if d > 0 {
        cholesky(&mut gram, d)?.solve(rhs)
    } else {
        Vec::new()
    };
    if x.has_bias() {
        let offset: f64 = w.iter().zip(&means).map(|(a, b)| a * b).sum();
        w.push(y_mean - offset);
    }
    Ok(ReadoutWeights { w })
}

/// Lower-triangular factor stored in the lower half of a row-major matrix.
struct Cholesky<'a> {
    l: &'a [f64],
    d: usize,
}

/// In-place Cholesky of the symmetric matrix whose lower triangle is in `a`.
fn cholesky(a: &mut [f64], d: usize) -> Result<Cholesky<'_>, ReadoutError> {
    let max_diag = (0..d).map(|i| a[i * d + i]).fold(0.0, f64::max);
    let floor = PIVOT_THRESHOLD * max_diag;
    for j in 0..d {
        let mut pivot = a[j * d + j];
        for k in 0..j {
            pivot -= a[j * d + k] * a[j * d + k];
        }
        if !(pivot > floor) {
            return Err(ReadoutError::Singular { column: j, pivot });
        }
        let root = libm::sqrt(pivot);
        a[j * d + j] = root;
        for i in j + 1..d {
            let mut v = a[i * d + j];
            for k in 0..j {
                v -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = v / root;
        }
    }
    Ok(Cholesky { l: a, d })
}

impl Cholesky<'_> {
    fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        let (l, d) = (self.l, self.d);
        for i in 0..d {
            let mut v = b[i];
            for k in 0..i {
                v -= l[i * d + k] * b[k];
            }
            b[i] = v / l[i * d + i];
        }
        for i in (0..d).rev() {
            let mut v = b[i];
            for k in i + 1..d {
                v -= l[k * d + i] * b[k];
            }
            b[i] = v / l[i * d + i];
        }
        b
    }
}

pub fn predict(w: &ReadoutWeights, x: &StateMatrix) -> Result<Vec<f64>, ReadoutError> {
    if w.w.len() != x.cols() {
        return Err(ReadoutError::WidthMismatch {
            weights: w.w.len(),
            cols: x.cols(),
        });
    }
    Ok((0..x.rows())
        .map(|r| x.row(r).iter().zip(&w.w).map(|(a, b)| a * b).sum())
        .collect())
}

/// Accuracy and RMSE of the readout `Xw` against binary targets.
pub fn evaluate(w: &ReadoutWeights, x: &StateMatrix, y: &[f64]) -> Result<Metrics, ReadoutError> {
    if x.rows() != y.len() {
        return Err(ReadoutError::ShapeMismatch {
            rows: x.rows(),
            targets: y.len(),
        });
    }
    score(&predict(w, x)?, y)
}

/// Metrics of raw predictions against targets; `p > 0.5` is class 1.
pub fn score(predictions: &[f64], y: &[f64]) -> Result<Metrics, ReadoutError> {
    if predictions.len() != y.len() {
        return Err(ReadoutError::ShapeMismatch {
            rows: predictions.len(),
            targets: y.len(),
        });
    }
    if y.is_empty() {
        return Err(ReadoutError::Empty);
    }
    let n = y.len() as f64;
    let mut hits = 0usize;
    let mut sq = 0.0;
    for (&p, &t) in predictions.iter().zip(y) {
        let class = if p > DECISION_THRESHOLD { 1.0 } else { 0.0 };
        if class == t {
            hits += 1;
        }
        sq += (p - t) * (p - t);
    }
    Ok(Metrics {
        accuracy: hits as f64 / n,
        rmse: libm::sqrt(sq / n),
    })
}
