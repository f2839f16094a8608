//! `stirap`: single runs, Γ sweeps, closed forms and figure data.
//!
//! All physical inputs are dimensionless: times in units of the pulse width
//! `T`, rates and frequencies in units of `1/T`.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stirap_core::experiments::{linear_grid, log_grid, parse_variant, FigureData};
use stirap_core::format::num;
use stirap_core::{
    propagate, propagate_master, render_figure, sweep_gamma, weak_damping_p3, zeno_predict,
    BasisKind, FigureId, FigureSpec, ModelKind, PulseConfig, ReservoirSpec, Sequence, SimOptions,
    SweepSpec,
};

use config::{pick, pick_parsed, ConfigFile};

const CONFIG_HELP: &str = "\
Configuration file: --config <path> reads a flat JSON object whose keys are the
long flag names (alphaT, deltaT, gammaT, tmaxT, sequence, model, basis, rtol,
atol, samples, out, nplus, nminus, omega4T, gammas, models, analytic, workers,
variant). A flag given on the command line always overrides the file.

Environment: STIRAP_WORKERS bounds the number of sweep worker threads
(default: available parallelism).";

#[derive(Parser, Debug)]
#[command(name = "stirap", version, about = "STIRAP with a lossy intermediate level", after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Propagate the amplitude equations and write populations vs t/T.
    Simulate(SimulateArgs),
    /// Integrate the four-level master equation and write populations vs t/T.
    Master(MasterArgs),
    /// Post-pulse populations over a grid of gammaT values.
    Sweep(SweepArgs),
    /// Weak-damping closed-form P3 after the pulses.
    Analytic(AnalyticArgs),
    /// Strong-damping outcome predicted for a model and pulse sequence.
    Zeno(ZenoArgs),
    /// Regenerate the data and SVG plot of a figure (fig2, fig3a, fig3b, fig4a, fig4b).
    Figure(FigureArgs),
}

#[derive(Args, Debug, Default)]
struct ConfigArg {
    /// JSON file with default values for any flag
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct PulseArgs {
    /// Pulse area parameter alphaT (dimensionless) [default: 10]
    #[arg(long = "alphaT", value_name = "X")]
    alpha_t: Option<f64>,
    /// Single-photon detuning deltaT (dimensionless, >= 0) [default: 1]
    #[arg(long = "deltaT", value_name = "X")]
    delta_t: Option<f64>,
    /// Half-width of the time window in units of T (dimensionless) [default: 10]
    #[arg(long = "tmaxT", value_name = "X")]
    tmax_t: Option<f64>,
    /// Pulse order: intuitive or counterintuitive [default: counterintuitive]
    #[arg(long, value_parser = parse_sequence)]
    sequence: Option<Sequence>,
}

#[derive(Args, Debug, Default)]
struct SolverArgs {
    /// Relative tolerance of the adaptive integrator [default: 1e-10]
    #[arg(long, value_name = "X")]
    rtol: Option<f64>,
    /// Absolute tolerance of the adaptive integrator [default: 1e-12]
    #[arg(long, value_name = "X")]
    atol: Option<f64>,
    /// Number of uniform output samples over the window [default: 2001]
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    pulse: PulseArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Loss rate gammaT of the intermediate level (dimensionless, >= 0) [default: 0]
    #[arg(long = "gammaT", value_name = "X")]
    gamma_t: Option<f64>,
    /// Loss model: effective or phenomenological [default: effective]
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Propagation basis: bare or adiabatic [default: bare]
    #[arg(long, value_parser = parse_basis)]
    basis: Option<BasisKind>,
    /// Output CSV (t_over_T,p1,p2,p3,norm); stdout when omitted
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args, Debug)]
struct MasterArgs {
    #[command(flatten)]
    pulse: PulseArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Loss rate gammaT of the intermediate level (dimensionless, >= 0) [default: 0]
    #[arg(long = "gammaT", value_name = "X")]
    gamma_t: Option<f64>,
    /// Thermal occupation of the reservoir mode resonant with |+> [default: 0]
    #[arg(long, value_name = "N")]
    nplus: Option<f64>,
    /// Thermal occupation of the reservoir mode resonant with |-> [default: 0]
    #[arg(long, value_name = "N")]
    nminus: Option<f64>,
    /// Energy of the sink level |4> times T (dimensionless) [default: 0]
    #[arg(long = "omega4T", value_name = "X")]
    omega4_t: Option<f64>,
    /// Output CSV (t_over_T,p1,p2,p3,p4,trace); stdout when omitted
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    pulse: PulseArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Explicit comma-separated gammaT grid (dimensionless, increasing)
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    gammas: Option<Vec<f64>>,
    /// Lower end of a generated gammaT grid [default: 0]
    #[arg(long = "gamma-min", value_name = "X", conflicts_with = "gammas")]
    gamma_min: Option<f64>,
    /// Upper end of a generated gammaT grid [default: 3]
    #[arg(long = "gamma-max", value_name = "X", conflicts_with = "gammas")]
    gamma_max: Option<f64>,
    /// Points in a generated gammaT grid [default: 61]
    #[arg(long, value_name = "N", conflicts_with = "gammas")]
    points: Option<usize>,
    /// Space a generated grid logarithmically (needs gamma-min > 0)
    #[arg(long, conflicts_with = "gammas")]
    log: bool,
    /// Comma-separated models to run [default: effective,phenomenological]
    #[arg(long, value_delimiter = ',', value_parser = parse_model)]
    models: Option<Vec<ModelKind>>,
    /// Propagation basis: bare or adiabatic [default: bare]
    #[arg(long, value_parser = parse_basis)]
    basis: Option<BasisKind>,
    /// Append the weak-damping closed form as a p3_analytic column
    #[arg(long)]
    analytic: bool,
    /// Worker threads [default: STIRAP_WORKERS or available parallelism]
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Output CSV (gammaT,model,p3_final,p1_final,norm_final[,p3_analytic]); stdout when omitted
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args, Debug)]
struct AnalyticArgs {
    #[command(flatten)]
    pulse: PulseArgs,
    /// Loss rate gammaT of the intermediate level (dimensionless, >= 0) [default: 0]
    #[arg(long = "gammaT", value_name = "X")]
    gamma_t: Option<f64>,
    /// Loss model; both when omitted
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args, Debug)]
struct ZenoArgs {
    /// Loss model: effective or phenomenological [default: effective]
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Pulse order: intuitive or counterintuitive [default: counterintuitive]
    #[arg(long, value_parser = parse_sequence)]
    sequence: Option<Sequence>,
    /// Also print the reasoning behind the prediction
    #[arg(long)]
    explain: bool,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// Figure to regenerate: fig2, fig3a, fig3b, fig4 (= fig4a), fig4a, fig4b
    #[arg(value_parser = parse_figure)]
    figure: FigureId,
    /// Model and sequence of a time-trace figure, e.g. effective-intuitive
    #[arg(long, value_name = "MODEL-SEQUENCE")]
    variant: Option<String>,
    /// Pulse area parameter alphaT (dimensionless) [default: 10]
    #[arg(long = "alphaT", value_name = "X")]
    alpha_t: Option<f64>,
    /// Single-photon detuning deltaT (dimensionless, >= 0) [default: 1]
    #[arg(long = "deltaT", value_name = "X")]
    delta_t: Option<f64>,
    /// Half-width of the time window in units of T (dimensionless) [default: 10]
    #[arg(long = "tmaxT", value_name = "X")]
    tmax_t: Option<f64>,
    /// Loss rate gammaT for time-trace figures (dimensionless) [default: 500]
    #[arg(long = "gammaT", value_name = "X")]
    gamma_t: Option<f64>,
    /// Comma-separated gammaT grid for sweep figures [default: per figure]
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    gammas: Option<Vec<f64>>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Worker threads [default: STIRAP_WORKERS or available parallelism]
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Output directory for <figure>.csv and <figure>.svg [default: figures]
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

fn parse_sequence(s: &str) -> Result<Sequence, String> {
    s.parse().map_err(|e: stirap_core::Error| e.to_string())
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: stirap_core::Error| e.to_string())
}

fn parse_basis(s: &str) -> Result<BasisKind, String> {
    s.parse().map_err(|e: stirap_core::Error| e.to_string())
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse().map_err(|e: stirap_core::Error| e.to_string())
}

/// Failure of a run: usage problems exit with 2, runtime failures with 1.
enum Failure {
    Usage(String),
    Runtime { message: String, params: String },
}

type Outcome = Result<(), Failure>;

fn load_config(arg: &ConfigArg) -> Result<ConfigFile, Failure> {
    match &arg.config {
        Some(path) => ConfigFile::load(path).map_err(Failure::Usage),
        None => Ok(ConfigFile::default()),
    }
}

fn pulse_config(p: &PulseArgs, c: &ConfigFile) -> Result<PulseConfig, Failure> {
    let sequence = pick_parsed(p.sequence, c.sequence.as_deref(), Sequence::Counterintuitive, "sequence")
        .map_err(Failure::Usage)?;
    Ok(PulseConfig::new(pick(p.alpha_t, c.alpha_t, 10.0), pick(p.delta_t, c.delta_t, 1.0), sequence)
        .with_t_max(pick(p.tmax_t, c.tmax_t, PulseConfig::DEFAULT_T_MAX)))
}

fn sim_options(s: &SolverArgs, c: &ConfigFile, default_samples: usize) -> SimOptions {
    let d = SimOptions::default();
    SimOptions {
        rel_tol: pick(s.rtol, c.rtol, d.rel_tol),
        abs_tol: pick(s.atol, c.atol, d.abs_tol),
        sampling: pick(s.samples, c.samples, default_samples),
        ..d
    }
}

fn model_of(flag: Option<ModelKind>, c: &ConfigFile) -> Result<ModelKind, Failure> {
    pick_parsed(flag, c.model.as_deref(), ModelKind::Effective, "model").map_err(Failure::Usage)
}

fn basis_of(flag: Option<BasisKind>, c: &ConfigFile) -> Result<BasisKind, Failure> {
    pick_parsed(flag, c.basis.as_deref(), BasisKind::Bare, "basis").map_err(Failure::Usage)
}

fn describe(cfg: &PulseConfig) -> String {
    format!(
        "alphaT={} deltaT={} tmaxT={} sequence={}",
        num(cfg.alpha_t),
        num(cfg.delta_t),
        num(cfg.t_max_over_t),
        cfg.sequence
    )
}

fn runtime(params: String) -> impl FnOnce(stirap_core::Error) -> Failure {
    move |e| Failure::Runtime {
        message: e.to_string(),
        params,
    }
}

fn io_failure(params: &str) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Runtime {
        message: e.to_string(),
        params: params.to_string(),
    }
}

fn simulate(a: SimulateArgs) -> Outcome {
    let c = load_config(&a.config)?;
    let cfg = pulse_config(&a.pulse, &c)?;
    let opts = sim_options(&a.solver, &c, SimOptions::default().sampling);
    let gamma = pick(a.gamma_t, c.gamma_t, 0.0);
    let model = model_of(a.model, &c)?;
    let basis = basis_of(a.basis, &c)?;
    let out = a.out.or(c.out);
    let params = format!("{} gammaT={} model={model} basis={basis}", describe(&cfg), num(gamma));
    let tr = propagate(&cfg, gamma, model, basis, &opts).map_err(runtime(params.clone()))?;
    match out {
        Some(path) => {
            tr.save_csv(&path).map_err(runtime(params))?;
            println!(
                "p1_final={} p3_final={} norm_final={}",
                num(tr.p1_final),
                num(tr.p3_final),
                num(tr.norm_final)
            );
        }
        None => tr.write_csv(std::io::stdout().lock()).map_err(io_failure(&params))?,
    }
    Ok(())
}

fn master(a: MasterArgs) -> Outcome {
    let c = load_config(&a.config)?;
    let cfg = pulse_config(&a.pulse, &c)?;
    let opts = sim_options(&a.solver, &c, SimOptions::default().sampling);
    let res = ReservoirSpec {
        gamma: pick(a.gamma_t, c.gamma_t, 0.0),
        n_plus: pick(a.nplus, c.nplus, 0.0),
        n_minus: pick(a.nminus, c.nminus, 0.0),
        omega4: pick(a.omega4_t, c.omega4_t, 0.0),
    };
    let params = format!(
        "{} gammaT={} nplus={} nminus={} omega4T={}",
        describe(&cfg),
        num(res.gamma),
        num(res.n_plus),
        num(res.n_minus),
        num(res.omega4)
    );
    let tr = propagate_master(&cfg, &res, &opts).map_err(runtime(params.clone()))?;
    match a.out.or(c.out) {
        Some(path) => {
            tr.save_csv(&path).map_err(runtime(params))?;
            println!(
                "p1_final={} p3_final={} p4_final={}",
                num(tr.p1_final()),
                num(tr.p3_final()),
                num(tr.p4_final())
            );
        }
        None => tr.write_csv(std::io::stdout().lock()).map_err(io_failure(&params))?,
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Outcome {
    let c = load_config(&a.config)?;
    let cfg = pulse_config(&a.pulse, &c)?;
    let grid = match a.gammas.or(c.gammas.clone()) {
        Some(g) => g,
        None => {
            let (lo, hi, n) = (a.gamma_min.unwrap_or(0.0), a.gamma_max.unwrap_or(3.0), a.points.unwrap_or(61));
            if a.log {
                if lo <= 0.0 {
                    return Err(Failure::Usage("--log needs --gamma-min > 0".into()));
                }
                log_grid(lo, hi, n)
            } else {
                linear_grid(lo, hi, n)
            }
        }
    };
    let models = match (a.models, &c.models) {
        (Some(m), _) => m,
        (None, Some(names)) => names
            .iter()
            .map(|s| s.parse().map_err(|e: stirap_core::Error| Failure::Usage(format!("config key `models`: {e}"))))
            .collect::<Result<_, _>>()?,
        (None, None) => ModelKind::ALL.to_vec(),
    };
    let mut spec = SweepSpec::new(cfg, grid);
    spec.models = models;
    spec.basis = basis_of(a.basis, &c)?;
    spec.include_analytic = a.analytic || c.analytic.unwrap_or(false);
    spec.workers = a.workers.or(c.workers);
    spec.opts = sim_options(&a.solver, &c, 2);
    let out = a.out.or(c.out);
    spec.output_path = out.clone();
    let params = format!("{} gammas={} points", describe(&cfg), spec.gamma_grid.len());
    let table = sweep_gamma(&spec).map_err(runtime(params.clone()))?;
    if out.is_none() {
        table.write_csv(std::io::stdout().lock()).map_err(io_failure(&params))?;
    }
    for row in table.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: gammaT={} model={}: {}",
            num(row.gamma),
            row.model,
            row.error.as_deref().unwrap_or_default()
        );
    }
    Ok(())
}

fn analytic(a: AnalyticArgs) -> Outcome {
    let c = load_config(&a.config)?;
    let cfg = pulse_config(&a.pulse, &c)?;
    let gamma = pick(a.gamma_t, c.gamma_t, 0.0);
    let models = match (a.model, c.model.as_deref()) {
        (None, None) => ModelKind::ALL.to_vec(),
        (flag, conf) => vec![pick_parsed(flag, conf, ModelKind::Effective, "model").map_err(Failure::Usage)?],
    };
    let mut out = String::from("gammaT,model,sequence,p3_analytic\n");
    for model in models {
        let params = format!("{} gammaT={} model={model}", describe(&cfg), num(gamma));
        let p3 = weak_damping_p3(&cfg, gamma, model).map_err(runtime(params))?;
        out.push_str(&format!("{},{model},{},{}\n", num(gamma), cfg.sequence, num(p3)));
    }
    print!("{out}");
    Ok(())
}

fn zeno(a: ZenoArgs) -> Outcome {
    let c = load_config(&a.config)?;
    let model = model_of(a.model, &c)?;
    let sequence = pick_parsed(a.sequence, c.sequence.as_deref(), Sequence::Counterintuitive, "sequence")
        .map_err(Failure::Usage)?;
    let p = zeno_predict(model, sequence);
    println!("{}", p.outcome);
    if a.explain {
        println!("{}", p.rationale);
    }
    Ok(())
}

fn figure(a: FigureArgs) -> Outcome {
    let c = load_config(&a.config)?;
    let mut spec = FigureSpec::new(a.figure, a.out.or(c.out.clone()).unwrap_or_else(|| PathBuf::from("figures")));
    spec.alpha_t = pick(a.alpha_t, c.alpha_t, spec.alpha_t);
    spec.delta_t = pick(a.delta_t, c.delta_t, spec.delta_t);
    spec.t_max_over_t = pick(a.tmax_t, c.tmax_t, spec.t_max_over_t);
    spec.gamma = pick(a.gamma_t, c.gamma_t, spec.gamma);
    spec.gamma_grid = a.gammas.or(c.gammas.clone());
    spec.workers = a.workers.or(c.workers);
    spec.opts = sim_options(&a.solver, &c, SimOptions::default().sampling);
    if let Some(v) = a.variant.or(c.variant.clone()) {
        if !matches!(a.figure, FigureId::Fig4a | FigureId::Fig4b) {
            return Err(Failure::Usage(format!("--variant applies to fig4 only, not {}", a.figure.name())));
        }
        spec.variant = Some(parse_variant(&v).map_err(|e| Failure::Usage(e.to_string()))?);
    }
    let params = format!(
        "figure={} alphaT={} deltaT={} gammaT={}",
        a.figure.name(),
        num(spec.alpha_t),
        num(spec.delta_t),
        num(spec.gamma)
    );
    let fig = render_figure(&spec).map_err(runtime(params))?;
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}", fig.csv_path.display());
    let _ = writeln!(stdout, "{}", fig.svg_path.display());
    if let FigureData::Trace(tr) = &fig.data {
        let _ = writeln!(
            stdout,
            "p1_final={} p3_final={} norm_final={}",
            num(tr.p1_final),
            num(tr.p3_final),
            num(tr.norm_final)
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                let _ = e.print();
                return ExitCode::from(2);
            }
            let text = e.render().to_string();
            eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Master(a) => master(a),
        Command::Sweep(a) => sweep(a),
        Command::Analytic(a) => analytic(a),
        Command::Zeno(a) => zeno(a),
        Command::Figure(a) => figure(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime { message, params }) => {
            eprintln!("error: {message} [{params}]");
            ExitCode::from(1)
        }
    }
}
