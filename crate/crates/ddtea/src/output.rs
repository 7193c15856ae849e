//! CSV files written and read by the harness. Floats use 17 significant
//! digits; `\n` line endings.

use std::fmt::Write as _;
use std::io::Read;

use ddtea_core::{
    LabeledSignal, LogisticFit, OrbitState, ReadoutWeights, StateMatrix, SweepResult,
};

use crate::model_file::exact;

pub const SWEEP_HEADER: &str = "axis,mean_accuracy,std_accuracy,mean_rmse,std_rmse,n_reps,valid";

pub fn trace_csv(times: &[f64], orbit: &[OrbitState]) -> String {
    let mut out = String::from("t,s\n");
    for (t, s) in times.iter().zip(orbit) {
        writeln!(out, "{},{}", exact(*t), exact(s.get())).unwrap();
    }
    out
}

pub fn signal_csv(signal: &LabeledSignal) -> String {
    let mut out = String::from("sample,label\n");
    for (u, c) in signal.samples.iter().zip(&signal.labels) {
        writeln!(out, "{},{}", exact(*u), *c as u8).unwrap();
    }
    out
}

/// Node columns `v0..v{d-1}`; a bias column, if present, is left out.
pub fn states_csv(states: &StateMatrix) -> String {
    let nodes = states.cols() - usize::from(states.has_bias());
    let header: Vec<String> = (0..nodes).map(|i| format!("v{i}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for r in 0..states.rows() {
        let row: Vec<String> = states.row(r)[..nodes].iter().map(|v| exact(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// One weight per line, bias weight last.
pub fn weights_csv(weights: &ReadoutWeights) -> String {
    let mut out = String::from("weight\n");
    for w in &weights.w {
        writeln!(out, "{}", exact(*w)).unwrap();
    }
    out
}

pub fn sweep_csv(result: &SweepResult, fit: Option<&LogisticFit>) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for p in &result.points {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            exact(p.value),
            exact(p.mean_accuracy),
            exact(p.std_accuracy),
            exact(p.mean_rmse),
            exact(p.std_rmse),
            p.n_reps,
            u8::from(p.is_valid())
        )
        .unwrap();
    }
    if let Some(f) = fit {
        out.push_str(&fit_comment(f));
    }
    out
}

/// The fit as `# key=value` lines.
pub fn fit_comment(f: &LogisticFit) -> String {
    let mut out = String::new();
    for (k, v) in [
        ("A", f.a),
        ("K", f.k),
        ("B", f.b),
        ("M", f.m),
        ("nu", f.nu),
        ("sse", f.sse),
        ("r_squared", f.r_squared),
    ] {
        writeln!(out, "# {k}={}", exact(v)).unwrap();
    }
    writeln!(out, "# degenerate={}", f.degenerate).unwrap();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: f64,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_rmse: f64,
    pub std_rmse: f64,
    pub n_reps: usize,
    pub valid: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepCsvError {
    #[error("sweep csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("sweep csv: expected header `{SWEEP_HEADER}`")]
    Header,
    #[error("sweep csv row {row}: column `{column}`: `{value}` is not valid")]
    Field {
        row: usize,
        column: &'static str,
        value: String,
    },
}

/// Reads a sweep CSV; `#` lines are skipped.
pub fn read_sweep_csv(reader: impl Read) -> Result<Vec<SweepRow>, SweepCsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != SWEEP_HEADER {
        return Err(SweepCsvError::Header);
    }
    const COLUMNS: [&str; 7] = [
        "axis",
        "mean_accuracy",
        "std_accuracy",
        "mean_rmse",
        "std_rmse",
        "n_reps",
        "valid",
    ];
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let float = |c: usize| {
            record[c].parse::<f64>().map_err(|_| SweepCsvError::Field {
                row,
                column: COLUMNS[c],
                value: record[c].to_string(),
            })
        };
        let n_reps = record[5]
            .parse::<usize>()
            .map_err(|_| SweepCsvError::Field {
                row,
                column: "n_reps",
                value: record[5].to_string(),
            })?;
        let valid = match &record[6] {
            "1" => true,
            "0" => false,
            other => {
                return Err(SweepCsvError::Field {
                    row,
                    column: "valid",
                    value: other.to_string(),
                })
            }
        };
        rows.push(SweepRow {
            axis: float(0)?,
            mean_accuracy: float(1)?,
            std_accuracy: float(2)?,
            mean_rmse: float(3)?,
            std_rmse: float(4)?,
            n_reps,
            valid,
        });
    }
    Ok(rows)
}
