//! `ddtea` command line.
//!
//! Exit codes: 0 success, 1 output IO failure, 2 usage or invalid input,
//! 3 dynamics error (finite-time blow-up), 4 more than half of the sweep
//! points invalid.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddtea_core::experiment::{linspace, run_trial_detailed};
use ddtea_core::reservoir::ReservoirError;
use ddtea_core::{
    fit_logistic, steady_state, trace, Axis, DeviceModel, DynamicsError, LogisticFit, OrbitState,
    ThieleParams, TrialConfig, TrialError,
};

use crate::bench::bench_speed;
use crate::config::{
    parse_lambda, parse_noise, read_model, read_trial_config, write_model, write_trial_config,
    ConfigFile, Manifest,
};
use crate::model_file::{exact, load_model};
use crate::output::{
    fit_comment, read_sweep_csv, signal_csv, states_csv, sweep_csv, trace_csv, weights_csv,
};
use crate::parallel::sweep_parallel;
use crate::svg::{Plot, Series};

#[derive(Debug, Parser)]
#[command(
    name = "ddtea",
    version,
    about = "Oscillator orbit traces and reservoir classification experiments"
)]
struct Cli {
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, env = "DDTEA_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orbit s(t) on a uniform time grid.
    Trace(TraceArgs),
    /// One classification trial with its signal, states and weights.
    Trial(TrialArgs),
    /// Mean accuracy and RMSE over a drive-current or SNR axis.
    Sweep(SweepArgs),
    /// Generalized logistic fit of a sweep CSV.
    Fit(FitArgs),
    /// Closed form against RK4 timing.
    Bench(BenchArgs),
    /// Validate a model file and tabulate it.
    ModelCheck(ModelCheckArgs),
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long)]
    n: Option<f64>,
    /// Take parameters from the device model at this normalized current.
    #[arg(long)]
    zeta: Option<f64>,
    /// Model file (default: synthetic model).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    s0: Option<f64>,
    #[arg(long, required_unless_present = "config")]
    t_end: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    svg: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Configuration or manifest file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    zeta_bias: Option<f64>,
    #[arg(long)]
    zeta_span: Option<f64>,
    /// Node duration in seconds.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    n_virtual: Option<usize>,
    #[arg(long)]
    mask_seed: Option<u64>,
    #[arg(long)]
    s_init: Option<f64>,
    /// `clean` or SNR in dB.
    #[arg(long, allow_negative_numbers = true)]
    noise: Option<String>,
    /// `auto` or ridge regularizer.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    segments: Option<usize>,
    #[arg(long)]
    samples_per_period: Option<usize>,
    #[arg(long)]
    class_balance: Option<f64>,
    #[arg(long)]
    split: Option<f64>,
    #[arg(long)]
    washout: Option<usize>,
    /// Draw a new mask for every repetition.
    #[arg(long)]
    resample_mask: bool,
}

#[derive(Debug, Args)]
struct TrialArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, default_value_t = 0)]
    point: u64,
    #[arg(long, default_value_t = 0)]
    rep: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Current,
    Snr,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Current => Axis::Current,
            AxisArg::Snr => Axis::Snr,
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    #[arg(long, allow_negative_numbers = true)]
    from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    /// Fit a generalized logistic curve to the mean accuracy.
    #[arg(long)]
    fit: bool,
    #[arg(long)]
    svg: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Sweep CSV to fit.
    #[arg(long)]
    input: PathBuf,
    /// Write `fit.txt` (and `fit.svg` with --svg) here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 5e7)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = -3e8)]
    beta: f64,
    #[arg(long, default_value_t = 2.0)]
    n: f64,
    #[arg(long, default_value_t = 0.1)]
    s0: f64,
    #[arg(long, default_value_t = 1e-7)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-12)]
    rk4_step: f64,
    #[arg(long, default_value_t = 100_000)]
    evals: usize,
    #[arg(long, default_value_t = 10)]
    traces: usize,
}

#[derive(Debug, Args)]
struct ModelCheckArgs {
    #[arg(long)]
    model: PathBuf,
    /// Rows in the printed table.
    #[arg(long, default_value_t = 9)]
    points: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Dynamics(String),
    Degraded(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Dynamics(_) => 3,
            CliError::Degraded(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Dynamics(m)
            | CliError::Degraded(m)
            | CliError::Io(m) => m,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn dynamics(e: DynamicsError) -> CliError {
    match e {
        DynamicsError::InvalidParameter(_) => CliError::Usage(e.to_string()),
        DynamicsError::BlowUp { .. } | DynamicsError::TraceBlowUp { .. } => {
            CliError::Dynamics(e.to_string())
        }
    }
}

fn trial_error(e: TrialError) -> CliError {
    match e {
        TrialError::Reservoir(ReservoirError::Dynamics {
            source: DynamicsError::BlowUp { .. },
            ..
        }) => CliError::Dynamics(format!("{} stage: {e}", e.stage())),
        _ => CliError::Usage(format!("{} stage: {e}", e.stage())),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    path.map_or(Ok(ConfigFile::default()), |p| {
        ConfigFile::load(p).map_err(usage)
    })
}

/// Entry point of the `ddtea` binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Trace(a) => cmd_trace(a),
        Command::Trial(a) => cmd_trial(a),
        Command::Sweep(a) => cmd_sweep(a, cli.threads),
        Command::Fit(a) => cmd_fit(a),
        Command::Bench(a) => cmd_bench(a),
        Command::ModelCheck(a) => cmd_model_check(a),
    }
}

fn cmd_trace(a: TraceArgs) -> Result<(), CliError> {
    let mut file = load_config(a.config.as_deref())?;
    let mut model = read_model(&mut file).map_err(usage)?.unwrap_or_default();
    if let Some(path) = &a.model {
        model = load_model(path).map_err(usage)?;
    }
    let get =
        |file: &mut ConfigFile, key: &str, flag: Option<f64>| -> Result<Option<f64>, CliError> {
            let from_file = file.get::<f64>(key).map_err(usage)?;
            Ok(flag.or(from_file))
        };
    let alpha = get(&mut file, "alpha", a.alpha)?;
    let beta = get(&mut file, "beta", a.beta)?;
    let n = get(&mut file, "n", a.n)?;
    let zeta = get(&mut file, "zeta", a.zeta)?;
    let s0 = get(&mut file, "s0", a.s0)?.ok_or_else(|| usage("missing --s0"))?;
    let t_end = get(&mut file, "t_end", a.t_end)?.ok_or_else(|| usage("missing --t-end"))?;
    let points = a
        .points
        .or(file.get::<usize>("points").map_err(usage)?)
        .unwrap_or(200);
    let svg = a.svg || file.get::<bool>("svg").map_err(usage)?.unwrap_or(false);
    file.finish().map_err(usage)?;

    let params = match (alpha, beta, n, zeta) {
        (Some(alpha), Some(beta), Some(n), None) => {
            ThieleParams::new(alpha, beta, n).map_err(dynamics)?
        }
        (None, None, None, Some(z)) => model.params_at(z).map_err(usage)?,
        _ => return Err(usage("give either all of --alpha, --beta, --n or --zeta")),
    };
    if points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(usage("--t-end must be finite and >= 0"));
    }
    let s0 = OrbitState::new(s0).map_err(dynamics)?;
    let grid = linspace(0.0, t_end, points);
    let orbit = trace(&params, s0, &grid).map_err(dynamics)?;

    create_dir(&a.out)?;
    write(&a.out.join("trace.csv"), &trace_csv(&grid, &orbit))?;
    let mut m = Manifest::new("trace");
    match zeta {
        Some(z) => {
            m.push_f64("zeta", z);
            write_model(&mut m, &model);
        }
        None => {
            m.push_f64("alpha", params.alpha);
            m.push_f64("beta", params.beta);
            m.push_f64("n", params.n);
        }
    }
    m.push_f64("s0", s0.get());
    m.push_f64("t_end", t_end);
    m.push("points", points);
    m.push("svg", svg);
    write(&a.out.join("manifest.txt"), &m.render())?;
    if svg {
        let plot = Plot {
            title: format!(
                "orbit, alpha={:e} beta={:e} n={}",
                params.alpha, params.beta, params.n
            ),
            x_label: "t (s)".into(),
            y_label: "s".into(),
            series: vec![Series {
                name: "s(t)".into(),
                points: grid
                    .iter()
                    .zip(&orbit)
                    .map(|(t, s)| (*t, s.get()))
                    .collect(),
                band: Vec::new(),
            }],
        };
        write(&a.out.join("trace.svg"), &plot.render())?;
    }
    let last = orbit.last().map(|s| s.get()).unwrap_or(s0.get());
    println!("points={points} s_end={}", exact(last));
    if let Ok(Some(s)) = steady_state(&params) {
        println!("steady_state={}", exact(s.get()));
    }
    Ok(())
}

/// Defaults, then the config file, then flags.
fn resolve_experiment(
    a: &ExperimentArgs,
    file: &mut ConfigFile,
    base: TrialConfig,
) -> Result<TrialConfig, CliError> {
    let mut c = base;
    read_trial_config(file, &mut c).map_err(usage)?;
    if let Some(path) = &a.model {
        c.model = load_model(path).map_err(usage)?;
    }
    macro_rules! over {
        ($flag:expr, $field:expr) => {
            if let Some(v) = $flag {
                $field = v;
            }
        };
    }
    over!(a.seed, c.master_seed);
    over!(a.zeta_bias, c.reservoir.zeta_bias);
    over!(a.zeta_span, c.reservoir.zeta_span);
    over!(a.theta, c.reservoir.theta);
    over!(a.n_virtual, c.reservoir.n_virtual);
    over!(a.mask_seed, c.reservoir.mask_seed);
    over!(a.s_init, c.reservoir.s_init);
    over!(a.segments, c.task.segments);
    over!(a.samples_per_period, c.task.samples_per_period);
    over!(a.class_balance, c.task.class_balance);
    over!(a.split, c.split);
    over!(a.washout, c.washout);
    if let Some(raw) = &a.noise {
        c.noise = parse_noise(raw).map_err(|e| usage(format!("--noise: {e}")))?;
    }
    if let Some(raw) = &a.lambda {
        c.lambda = parse_lambda(raw).map_err(|e| usage(format!("--lambda: {e}")))?;
    }
    if a.resample_mask {
        c.resample_mask = true;
    }
    c.validate().map_err(trial_error)?;
    Ok(c)
}

fn cmd_trial(a: TrialArgs) -> Result<(), CliError> {
    let mut file = load_config(a.experiment.config.as_deref())?;
    let point = file.get::<u64>("point").map_err(usage)?;
    let rep = file.get::<u64>("rep").map_err(usage)?;
    let c = resolve_experiment(&a.experiment, &mut file, TrialConfig::default())?;
    file.finish().map_err(usage)?;
    // flags win; their defaults are 0 like the file's
    let point = if a.point != 0 {
        a.point
    } else {
        point.unwrap_or(0)
    };
    let rep = if a.rep != 0 { a.rep } else { rep.unwrap_or(0) };

    let t = run_trial_detailed(&c, point, rep).map_err(trial_error)?;
    create_dir(&a.out)?;
    write(&a.out.join("signal.csv"), &signal_csv(&t.signal))?;
    write(&a.out.join("states.csv"), &states_csv(&t.states))?;
    write(&a.out.join("weights.csv"), &weights_csv(&t.weights))?;
    let mut m = Manifest::new("trial");
    m.push("point", point);
    m.push("rep", rep);
    write_trial_config(&mut m, &c);
    write(&a.out.join("manifest.txt"), &m.render())?;
    println!(
        "accuracy={} rmse={} lambda={}",
        exact(t.metrics.accuracy),
        exact(t.metrics.rmse),
        exact(t.lambda)
    );
    Ok(())
}

fn cmd_sweep(a: SweepArgs, threads: usize) -> Result<(), CliError> {
    let mut file = load_config(a.config_path())?;
    let file_axis = match file.get_raw("axis") {
        None => None,
        Some((line, raw)) => Some(AxisArg::from_str(&raw, false).map_err(|_| {
            usage(format!(
                "line {line}: `axis`: `{raw}` is not current or snr"
            ))
        })?),
    };
    let axis: Axis = a
        .axis
        .or(file_axis)
        .ok_or_else(|| usage("missing --axis (current or snr)"))?
        .into();
    let (mut from, mut to, mut points) = match axis {
        Axis::Current => (1.05, 2.0, 20),
        Axis::Snr => (-20.0, 40.0, 25),
    };
    let mut reps = ddtea_core::experiment::DEFAULT_REPS;
    let mut fit = false;
    let mut svg = false;
    file.set("from", &mut from).map_err(usage)?;
    file.set("to", &mut to).map_err(usage)?;
    file.set("points", &mut points).map_err(usage)?;
    file.set("reps", &mut reps).map_err(usage)?;
    file.set("fit", &mut fit).map_err(usage)?;
    file.set("svg", &mut svg).map_err(usage)?;
    let c = resolve_experiment(&a.experiment, &mut file, TrialConfig::default())?;
    file.finish().map_err(usage)?;
    from = a.from.unwrap_or(from);
    to = a.to.unwrap_or(to);
    points = a.points.unwrap_or(points);
    reps = a.reps.unwrap_or(reps);
    fit |= a.fit;
    svg |= a.svg;
    if points == 0 || reps == 0 {
        return Err(usage("--points and --reps must be at least 1"));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(usage("--from and --to must be finite"));
    }

    let values = linspace(from, to, points);
    let result = sweep_parallel(&c, axis, &values, reps, threads)
        .map_err(|e| CliError::Io(e.to_string()))?;
    let logistic = if fit {
        fit_valid_points(
            &result
                .points
                .iter()
                .map(|p| (p.value, p.mean_accuracy, p.is_valid()))
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };

    create_dir(&a.out)?;
    write(
        &a.out.join("sweep.csv"),
        &sweep_csv(&result, logistic.as_ref()),
    )?;
    let mut m = Manifest::new("sweep");
    m.push("axis", axis.name());
    m.push_f64("from", from);
    m.push_f64("to", to);
    m.push("points", points);
    m.push("reps", reps);
    m.push("fit", fit);
    m.push("svg", svg);
    write_trial_config(&mut m, &c);
    write(&a.out.join("manifest.txt"), &m.render())?;
    if svg {
        let x_label = match axis {
            Axis::Current => "zeta_bias (I / I_c)",
            Axis::Snr => "SNR (dB)",
        };
        write(
            &a.out.join("sweep.svg"),
            &sweep_plot(&result, logistic.as_ref(), x_label).render(),
        )?;
    }

    for p in &result.points {
        match &p.first_error {
            None => println!(
                "{}={} accuracy={:.4}±{:.4} rmse={:.4}±{:.4}",
                axis.name(),
                p.value,
                p.mean_accuracy,
                p.std_accuracy,
                p.mean_rmse,
                p.std_rmse
            ),
            Some(e) => println!(
                "{}={} invalid ({} of {} reps failed): {e}",
                axis.name(),
                p.value,
                p.failures,
                p.n_reps
            ),
        }
    }
    if let Some(f) = &logistic {
        print!("{}", fit_comment(f));
    }
    let invalid = result.invalid_fraction();
    if invalid > 0.5 {
        return Err(CliError::Degraded(format!(
            "{:.0}% of sweep points are invalid",
            100.0 * invalid
        )));
    }
    Ok(())
}

impl SweepArgs {
    fn config_path(&self) -> Option<&Path> {
        self.experiment.config.as_deref()
    }
}

/// Logistic fit of the valid `(x, y)` points, if there are enough of them.
fn fit_valid_points(rows: &[(f64, f64, bool)]) -> Option<LogisticFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().filter(|r| r.2).map(|r| (r.0, r.1)).unzip();
    match fit_logistic(&x, &y) {
        Ok(f) => Some(f),
        Err(e) => {
            eprintln!("warning: no logistic fit: {e}");
            None
        }
    }
}

fn sweep_plot(result: &ddtea_core::SweepResult, fit: Option<&LogisticFit>, x_label: &str) -> Plot {
    let valid: Vec<_> = result.points.iter().filter(|p| p.is_valid()).collect();
    let mut series = vec![Series {
        name: "mean accuracy".into(),
        points: valid.iter().map(|p| (p.value, p.mean_accuracy)).collect(),
        band: valid
            .iter()
            .map(|p| {
                (
                    p.value,
                    p.mean_accuracy - p.std_accuracy,
                    p.mean_accuracy + p.std_accuracy,
                )
            })
            .collect(),
    }];
    if let (Some(f), Some(first), Some(last)) = (fit, valid.first(), valid.last()) {
        let xs = linspace(first.value, last.value, 200);
        series.push(Series {
            name: "logistic fit".into(),
            points: xs.iter().map(|&x| (x, f.eval(x))).collect(),
            band: Vec::new(),
        });
    }
    Plot {
        title: "sine/square classification".into(),
        x_label: x_label.into(),
        y_label: "accuracy".into(),
        series,
    }
}

fn cmd_fit(a: FitArgs) -> Result<(), CliError> {
    let reader =
        fs::File::open(&a.input).map_err(|e| usage(format!("{}: {e}", a.input.display())))?;
    let rows = read_sweep_csv(reader).map_err(usage)?;
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.valid)
        .map(|r| (r.axis, r.mean_accuracy))
        .unzip();
    let f = fit_logistic(&x, &y).map_err(usage)?;
    let text = fit_comment(&f);
    print!("{text}");
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write(&dir.join("fit.txt"), &text)?;
        if a.svg {
            let xs = linspace(x[0], x[x.len() - 1], 200);
            let plot = Plot {
                title: "generalized logistic fit".into(),
                x_label: "axis".into(),
                y_label: "mean accuracy".into(),
                series: vec![
                    Series {
                        name: "data".into(),
                        points: x.iter().copied().zip(y.iter().copied()).collect(),
                        band: Vec::new(),
                    },
                    Series {
                        name: "fit".into(),
                        points: xs.iter().map(|&v| (v, f.eval(v))).collect(),
                        band: Vec::new(),
                    },
                ],
            };
            write(&dir.join("fit.svg"), &plot.render())?;
        }
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), CliError> {
    let p = ThieleParams::new(a.alpha, a.beta, a.n).map_err(dynamics)?;
    let s0 = OrbitState::new(a.s0).map_err(dynamics)?;
    let r = bench_speed(&p, s0, a.t_end, a.rk4_step, a.evals, a.traces).map_err(dynamics)?;
    if r.below_resolution() {
        eprintln!(
            "warning: median closed-form evaluation {:.2} ns is near the timer resolution",
            r.closed_ns_per_eval
        );
    }
    println!("closed_ns_per_eval={:.3}", r.closed_ns_per_eval);
    println!("rk4_ns_per_trace={:.1}", r.rk4_ns_per_trace);
    println!("speedup={:.1}", r.speedup);
    println!("relative_difference={:.3e}", r.relative_difference);
    Ok(())
}

fn cmd_model_check(a: ModelCheckArgs) -> Result<(), CliError> {
    let model = load_model(&a.model).map_err(usage)?;
    let DeviceModel::Polynomial(poly) = &model else {
        unreachable!("files load polynomial models")
    };
    let (lo, hi) = poly.zeta_range();
    println!("valid model on zeta in [{lo}, {hi}]");
    println!("zeta,alpha,beta,n,steady_state");
    for z in linspace(lo, hi, a.points.max(1)) {
        let p = model.params_at(z).map_err(usage)?;
        let s = match steady_state(&p) {
            Ok(Some(s)) => format!("{:.6e}", s.get()),
            _ => "none".into(),
        };
        println!("{z:.6},{:.6e},{:.6e},{:.6},{s}", p.alpha, p.beta, p.n);
    }
    Ok(())
}
