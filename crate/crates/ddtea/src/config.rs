//! `ddtea-config v1` files: one `key = value` pair per line, `#` comments.
//!
//! The same format serves as run manifest. A manifest lists every resolved
//! setting, so feeding it back through `--config` reproduces the run.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use ddtea_core::{DeviceModel, NoiseLevel, PolynomialModel, TrialConfig};

use crate::model_file::{exact, ModelFileError};

pub const CONFIG_HEADER: &str = "ddtea-config v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Informational keys every command accepts and ignores.
const PASSIVE_KEYS: [&str; 3] = ["command", "tool_version", "timestamp"];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: `{key}`: {message}")]
    Value {
        line: usize,
        key: String,
        message: String,
    },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("model: {0}")]
    Model(#[from] ModelFileError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

/// Parsed configuration; typed getters mark keys as consumed so leftovers
/// can be reported.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: Vec<Entry>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, CONFIG_HEADER)) => {}
            Some((line, other)) => {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("expected header `{CONFIG_HEADER}`, found `{other}`"),
                })
            }
            None => {
                return Err(ConfigError::Parse {
                    line: 1,
                    message: format!("empty file, expected header `{CONFIG_HEADER}`"),
                })
            }
        }
        let mut entries: Vec<Entry> = Vec::new();
        for (line, content) in lines {
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::Parse {
                    line,
                    message: "empty key".into(),
                });
            }
            if entries.iter().any(|e| e.key == key) {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            entries.push(Entry {
                line,
                key,
                value: value.trim().to_string(),
                used: false,
            });
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let e = self.entries.iter_mut().find(|e| e.key == key)?;
        e.used = true;
        Some((e.line, e.value.clone()))
    }

    /// Parses `key` if present.
    pub fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse::<T>().map(Some).map_err(|e| ConfigError::Value {
                line,
                key: key.to_string(),
                message: format!("`{raw}`: {e}"),
            }),
        }
    }

    /// Raw value and line of `key` if present.
    pub fn get_raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.take(key)
    }

    pub fn set<T: FromStr>(&mut self, key: &str, target: &mut T) -> Result<(), ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = self.get(key)? {
            *target = v;
        }
        Ok(())
    }

    /// Errors on the first key no getter asked for.
    pub fn finish(self) -> Result<(), ConfigError> {
        match self
            .entries
            .into_iter()
            .find(|e| !e.used && !PASSIVE_KEYS.contains(&e.key.as_str()))
        {
            Some(e) => Err(ConfigError::UnknownKey {
                line: e.line,
                key: e.key,
            }),
            None => Ok(()),
        }
    }
}

/// Ordered `key = value` writer for manifests.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self::default();
        m.push("command", command);
        m.push("tool_version", TOOL_VERSION);
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        m.push("timestamp", now);
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    /// Shortest decimal that parses back to the same bits.
    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push(key, format!("{value:?}"));
    }

    pub fn render(&self) -> String {
        let mut out = format!("{CONFIG_HEADER}\n");
        for (k, v) in &self.lines {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.render())
    }
}

/// Writes every field of `c` (and its device model) to `m`.
pub fn write_trial_config(m: &mut Manifest, c: &TrialConfig) {
    m.push("segments", c.task.segments);
    m.push("samples_per_period", c.task.samples_per_period);
    m.push_f64("class_balance", c.task.class_balance);
    m.push("n_virtual", c.reservoir.n_virtual);
    m.push_f64("theta", c.reservoir.theta);
    m.push_f64("zeta_bias", c.reservoir.zeta_bias);
    m.push_f64("zeta_span", c.reservoir.zeta_span);
    m.push("mask_seed", c.reservoir.mask_seed);
    m.push_f64("s_init", c.reservoir.s_init);
    match c.noise {
        NoiseLevel::Clean => m.push("noise", "clean"),
        NoiseLevel::SnrDb(v) => m.push_f64("noise", v),
    }
    match c.lambda {
        None => m.push("lambda", "auto"),
        Some(v) => m.push_f64("lambda", v),
    }
    m.push_f64("split", c.split);
    m.push("washout", c.washout);
    m.push("master_seed", c.master_seed);
    m.push("resample_mask", c.resample_mask);
    write_model(m, &c.model);
}

pub fn write_model(m: &mut Manifest, model: &DeviceModel) {
    match model {
        DeviceModel::SyntheticDefault => m.push("model", "synthetic"),
        DeviceModel::Polynomial(p) => {
            m.push("model", "polynomial");
            let (lo, hi) = p.zeta_range();
            m.push("model.zeta_range", format!("{} {}", exact(lo), exact(hi)));
            for (key, coeffs) in [
                ("model.alpha", p.alpha_coefficients()),
                ("model.beta", p.beta_coefficients()),
                ("model.n", p.n_coefficients()),
            ] {
                m.push(
                    key,
                    coeffs
                        .iter()
                        .map(|c| exact(*c))
                        .collect::<Vec<_>>()
                        .join(" "),
                );
            }
        }
    }
}

/// Overrides the fields of `c` present in `file`.
pub fn read_trial_config(file: &mut ConfigFile, c: &mut TrialConfig) -> Result<(), ConfigError> {
    file.set("segments", &mut c.task.segments)?;
    file.set("samples_per_period", &mut c.task.samples_per_period)?;
    file.set("class_balance", &mut c.task.class_balance)?;
    file.set("n_virtual", &mut c.reservoir.n_virtual)?;
    file.set("theta", &mut c.reservoir.theta)?;
    file.set("zeta_bias", &mut c.reservoir.zeta_bias)?;
    file.set("zeta_span", &mut c.reservoir.zeta_span)?;
    file.set("mask_seed", &mut c.reservoir.mask_seed)?;
    file.set("s_init", &mut c.reservoir.s_init)?;
    if let Some((line, raw)) = file.get_raw("noise") {
        c.noise = parse_noise(&raw).map_err(|message| ConfigError::Value {
            line,
            key: "noise".into(),
            message,
        })?;
    }
    if let Some((line, raw)) = file.get_raw("lambda") {
        c.lambda = parse_lambda(&raw).map_err(|message| ConfigError::Value {
            line,
            key: "lambda".into(),
            message,
        })?;
    }
    file.set("split", &mut c.split)?;
    file.set("washout", &mut c.washout)?;
    file.set("master_seed", &mut c.master_seed)?;
    file.set("resample_mask", &mut c.resample_mask)?;
    if let Some(model) = read_model(file)? {
        c.model = model;
    }
    Ok(())
}

pub fn read_model(file: &mut ConfigFile) -> Result<Option<DeviceModel>, ConfigError> {
    let Some((line, kind)) = file.get_raw("model") else {
        return Ok(None);
    };
    match kind.as_str() {
        "synthetic" => Ok(Some(DeviceModel::SyntheticDefault)),
        "polynomial" => {
            let mut vector = |key: &str| -> Result<Vec<f64>, ConfigError> {
                let (l, raw) = file.get_raw(key).ok_or_else(|| ConfigError::Value {
                    line,
                    key: key.to_string(),
                    message: "required by `model = polynomial`".into(),
                })?;
                raw.split_whitespace()
                    .map(|f| {
                        f.parse::<f64>().map_err(|_| ConfigError::Value {
                            line: l,
                            key: key.to_string(),
                            message: format!("`{f}` is not a number"),
                        })
                    })
                    .collect()
            };
            let range = vector("model.zeta_range")?;
            if range.len() != 2 {
                return Err(ConfigError::Value {
                    line,
                    key: "model.zeta_range".into(),
                    message: format!("needs 2 values, found {}", range.len()),
                });
            }
            let alpha = vector("model.alpha")?;
            let beta = vector("model.beta")?;
            let n = vector("model.n")?;
            let model = PolynomialModel::new((range[0], range[1]), alpha, beta, n)
                .map_err(ModelFileError::from)?;
            Ok(Some(DeviceModel::Polynomial(model)))
        }
        other => Err(ConfigError::Value {
            line,
            key: "model".into(),
            message: format!("expected `synthetic` or `polynomial`, found `{other}`"),
        }),
    }
}

/// `clean` or an SNR in dB.
pub fn parse_noise(raw: &str) -> Result<NoiseLevel, String> {
    if raw == "clean" {
        return Ok(NoiseLevel::Clean);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(NoiseLevel::SnrDb(v)),
        _ => Err(format!(
            "expected `clean` or a finite SNR in dB, found `{raw}`"
        )),
    }
}

/// `auto` or a regularizer value.
pub fn parse_lambda(raw: &str) -> Result<Option<f64>, String> {
    if raw == "auto" {
        return Ok(None);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
        _ => Err(format!(
            "expected `auto` or a finite value >= 0, found `{raw}`"
        )),
    }
}
