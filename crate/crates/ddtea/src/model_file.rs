//! `ddtea-model v1` coefficient files.
//!
//! ```text
//! ddtea-model v1
//! # comments start with '#'
//! zeta_range 0.5 2.5
//! alpha -1e8 1e8
//! beta 0 -2e8
//! n 2
//! ```
//!
//! Coefficients are in ascending power of zeta. Values are written with 17
//! significant digits, which reads back to the same bits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ddtea_core::{DeviceError, DeviceModel, PolynomialModel};

pub const MODEL_HEADER: &str = "ddtea-model v1";

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("model rejected: {0}")]
    Invalid(#[from] DeviceError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn parse_error(line: usize, message: impl Into<String>) -> ModelFileError {
    ModelFileError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<PolynomialModel, ModelFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, MODEL_HEADER)) => {}
        Some((line, other)) => {
            return Err(parse_error(
                line,
                format!("expected header `{MODEL_HEADER}`, found `{other}`"),
            ))
        }
        None => {
            return Err(parse_error(
                1,
                format!("empty file, expected header `{MODEL_HEADER}`"),
            ))
        }
    }

    let mut range = None;
    let mut alpha = None;
    let mut beta = None;
    let mut n = None;
    let mut last_line = 1;
    for (line, content) in lines {
        last_line = line;
        let mut fields = content.split_whitespace();
        let key = fields.next().unwrap_or_default();
        let values = fields
            .enumerate()
            .map(|(i, f)| {
                f.parse::<f64>().map_err(|_| {
                    parse_error(
                        line,
                        format!("`{key}` field {}: `{f}` is not a number", i + 1),
                    )
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let slot = match key {
            "zeta_range" => {
                if values.len() != 2 {
                    return Err(parse_error(
                        line,
                        format!("`zeta_range` needs 2 values, found {}", values.len()),
                    ));
                }
                &mut range
            }
            "alpha" => &mut alpha,
            "beta" => &mut beta,
            "n" => &mut n,
            other => return Err(parse_error(line, format!("unknown key `{other}`"))),
        };
        if values.is_empty() {
            return Err(parse_error(line, format!("`{key}` has no coefficients")));
        }
        if slot.replace(values).is_some() {
            return Err(parse_error(line, format!("duplicate key `{key}`")));
        }
    }

    let missing = |name: &str| parse_error(last_line, format!("missing `{name}` line"));
    let range = range.ok_or_else(|| missing("zeta_range"))?;
    let model = PolynomialModel::new(
        (range[0], range[1]),
        alpha.ok_or_else(|| missing("alpha"))?,
        beta.ok_or_else(|| missing("beta"))?,
        n.ok_or_else(|| missing("n"))?,
    )?;
    Ok(model)
}

pub fn format_model(model: &PolynomialModel) -> String {
    let mut out = String::new();
    let (lo, hi) = model.zeta_range();
    writeln!(out, "{MODEL_HEADER}").unwrap();
    writeln!(out, "zeta_range {} {}", exact(lo), exact(hi)).unwrap();
    for (key, coeffs) in [
        ("alpha", model.alpha_coefficients()),
        ("beta", model.beta_coefficients()),
        ("n", model.n_coefficients()),
    ] {
        out.push_str(key);
        for c in coeffs {
            write!(out, " {}", exact(*c)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// 17 significant digits in scientific notation.
pub fn exact(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn load_model(path: &Path) -> Result<DeviceModel, ModelFileError> {
    let text = fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(DeviceModel::Polynomial(parse_model(&text)?))
}

pub fn save_model(path: &Path, model: &PolynomialModel) -> Result<(), ModelFileError> {
    fs::write(path, format_model(model)).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })
}
