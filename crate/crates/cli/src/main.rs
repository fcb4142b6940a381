use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gmqaoa::analytic::AnalyticSchedule;
use gmqaoa::harness::{report, run_sweep_with, Figure, SweepResults};
use gmqaoa::hubo::generate;
use gmqaoa::rng::instance_seed;
use gmqaoa::simulator::prefix_success_curve;
use gmqaoa::{
    constant_angles, emin_estimate_quantile, enumerate_spectrum, optimize_layerwise, preoptimize_gm_angles,
    DampingMode, Error, ExperimentConfig, HuboInstance, Method, Mixer, OptBudget, ParamSchedule, Problem,
};

/// Grover-mixer and transverse-field QAOA experiments on HUBO instances.
#[derive(Parser)]
#[command(name = "gmqaoa", version)]
struct Cli {
    /// Worker threads for sweeps and layer searches.
    #[arg(long, global = true, env = "GMQAOA_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random instances as JSON files.
    Gen(GenArgs),
    /// Optimize or evaluate one method on one instance.
    Run(RunArgs),
    /// Pre-optimize Grover-mixer angles from the Gaussian model only.
    Angles(AnglesArgs),
    /// Run an ensemble sweep from a config file.
    Sweep(SweepArgs),
    /// Emit plot data for a figure from sweep results.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Sk,
    Maxcut,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Sk => Problem::Sk,
            ProblemArg::Maxcut => Problem::MaxCutHypergraph,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Xm,
    Gm,
    Gma,
    Gmc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Xm => Method::Xm,
            MethodArg::Gm => Method::Gm,
            MethodArg::Gma => Method::Gma,
            MethodArg::Gmc => Method::Gmc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    ExactCf,
}

impl From<ModeArg> for DampingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => DampingMode::Paper,
            ModeArg::ExactCf => DampingMode::ExactCf,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coefficient of max-cut hyperedges.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    maxcut_sign: f64,
    #[arg(long, env = "GMQAOA_OUT", default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    #[arg(long)]
    beta_points: Option<usize>,
    #[arg(long)]
    gamma_points: Option<usize>,
    #[arg(long)]
    refine_evals: Option<usize>,
    #[arg(long)]
    starts: Option<usize>,
}

impl BudgetArgs {
    fn budget(self) -> OptBudget {
        let mut b = OptBudget::default();
        if let Some(v) = self.beta_points {
            b.beta_points = v;
        }
        if let Some(v) = self.gamma_points {
            b.gamma_points = v;
        }
        if let Some(v) = self.refine_evals {
            b.refine_evals = v;
        }
        if let Some(v) = self.starts {
            b.starts = v;
        }
        b
    }
}

#[derive(Args)]
struct RunArgs {
    /// Instance JSON file.
    instance: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    depth: usize,
    /// Damping rule of the analytic model (gma only).
    #[arg(long, value_enum, default_value = "paper")]
    mode: ModeArg,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct AnglesArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, conflicts_with = "instance")]
    sigma2: Option<f64>,
    /// Take `n` and `sigma2` from an instance file.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    depth: usize,
    #[arg(long, value_enum, default_value = "paper")]
    mode: ModeArg,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment config (JSON).
    config: PathBuf,
    #[arg(long, env = "GMQAOA_OUT", default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory written by `sweep`.
    results: PathBuf,
    /// fig2..fig6, or `all`.
    #[arg(long, default_value = "all")]
    figure: String,
    /// Also write an SVG chart per figure.
    #[arg(long)]
    svg: bool,
    /// Output directory; defaults to the results directory.
    #[arg(long, env = "GMQAOA_OUT")]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::InvalidArgument(_) => 1,
            Error::Config(_) | Error::Io(_) | Error::Parse(_) | Error::Missing(_) => 2,
            _ => 3,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(Failure::usage("--threads must be at least 1")),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Failure { code: 3, message: e.to_string() }),
        },
        None => dispatch(cli.command),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Angles(a) => cmd_angles(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn cmd_gen(a: GenArgs) -> CliResult {
    if a.count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    fs::create_dir_all(&a.out)?;
    for idx in 0..a.count {
        let seed = instance_seed(a.seed, idx as u64);
        let inst = generate(a.problem.into(), a.n, a.d, seed, a.maxcut_sign)?;
        let path = a.out.join(format!("instance_{idx}.json"));
        inst.save(&path)?;
        println!("{}\tn={}\tD={}\tterms={}\tseed={}", path.display(), inst.n(), inst.order(), inst.terms().len(), seed);
    }
    Ok(())
}

#[derive(Serialize)]
struct RunOutput<'a> {
    method: Method,
    n: usize,
    order: usize,
    label: &'a str,
    e_min: f64,
    ground_states: usize,
    sigma2: f64,
    e_min_est: Option<f64>,
    #[serde(flatten)]
    schedule: ParamSchedule,
    p_success: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evals: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic: Option<AnalyticMeta>,
}

#[derive(Serialize)]
struct AnalyticMeta {
    mode: DampingMode,
    objective: Vec<f64>,
}

fn cmd_run(a: RunArgs) -> CliResult {
    if a.depth == 0 {
        return Err(Failure::usage("--depth must be at least 1"));
    }
    let inst = HuboInstance::load(&a.instance)?;
    let spectrum = enumerate_spectrum(&inst, None)?;
    let sigma2 = inst.sigma_squared();
    let n = inst.n();
    let e_min_est = if sigma2 > 0.0 { emin_estimate_quantile(sigma2.sqrt(), n).ok() } else { None };
    let method: Method = a.method.into();
    let budget = a.budget.budget();

    let (schedule, p_success, evals, analytic) = match method {
        Method::Xm | Method::Gm => {
            let t = optimize_layerwise(&spectrum, method.mixer(), a.depth, &budget)?;
            (t.schedule, t.p_success, Some(t.evals), None)
        }
        Method::Gma => {
            let s = preoptimize_gm_angles(n, sigma2, a.depth, &budget, a.mode.into())?;
            let curve = prefix_success_curve(&spectrum, &s.schedule, Mixer::Grover)?;
            let meta = AnalyticMeta { mode: s.mode, objective: s.objective };
            (s.schedule, curve, Some(s.evals), Some(meta))
        }
        Method::Gmc => {
            let est = e_min_est.ok_or(Error::DegenerateEstimate(0.0))?;
            let s = constant_angles(est, a.depth)?;
            let curve = prefix_success_curve(&spectrum, &s, Mixer::Grover)?;
            (s, curve, None, None)
        }
    };
    let out = RunOutput {
        method,
        n,
        order: inst.order(),
        label: inst.label(),
        e_min: spectrum.e_min(),
        ground_states: spectrum.ground_states().len(),
        sigma2,
        e_min_est,
        schedule,
        p_success,
        evals,
        analytic,
    };
    println!("{}", serde_json::to_string(&out).map_err(Error::from)?);
    Ok(())
}

fn cmd_angles(a: AnglesArgs) -> CliResult {
    if a.depth == 0 {
        return Err(Failure::usage("--depth must be at least 1"));
    }
    let (n, sigma2) = match (&a.instance, a.sigma2) {
        (Some(path), None) => {
            let inst = HuboInstance::load(path)?;
            if a.n.is_some_and(|n| n != inst.n()) {
                return Err(Failure::usage("--n disagrees with the instance file"));
            }
            (inst.n(), inst.sigma_squared())
        }
        (None, Some(s)) => {
            let n = a.n.ok_or_else(|| Failure::usage("--sigma2 needs --n"))?;
            if !(s > 0.0) {
                return Err(Failure::usage(format!("--sigma2 must be positive, got {s}")));
            }
            (n, s)
        }
        (Some(_), Some(_)) => return Err(Failure::usage("give either --sigma2 or --instance, not both")),
        (None, None) => return Err(Failure::usage("one of --sigma2 or --instance is required")),
    };
    let schedule: AnalyticSchedule = preoptimize_gm_angles(n, sigma2, a.depth, &a.budget.budget(), a.mode.into())?;
    println!("{}", schedule.to_json());
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> CliResult {
    let source = fs::read_to_string(&a.config)?;
    let mut config = ExperimentConfig::from_json(&source)?;
    if let Some(v) = a.instances {
        config.instances = v;
    }
    if let Some(v) = a.max_depth {
        config.max_depth = v;
    }
    if let Some(v) = a.seed {
        config.seed = v;
    }
    let results = run_sweep_with(config, &source)?;
    results.write_dir(&a.out)?;
    eprintln!("wrote {} cells to {}", results.cells.len(), a.out.display());
    Ok(())
}

fn cmd_report(a: ReportArgs) -> CliResult {
    let results = SweepResults::load(&a.results)?;
    let figures: Vec<Figure> = if a.figure == "all" {
        Figure::ALL.to_vec()
    } else {
        vec![a.figure.parse().map_err(|e: Error| Failure::usage(e.to_string()))?]
    };
    let out: &Path = a.out.as_deref().unwrap_or(&a.results);
    fs::create_dir_all(out)?;
    let explicit = figures.len() == 1;
    for fig in figures {
        let data = match report(&results, fig) {
            Ok(d) => d,
            // with `all`, figures whose methods were not swept are skipped
            Err(e) if !explicit && matches!(e, Error::Missing(_)) => {
                eprintln!("skipping {}: {e}", fig.name());
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let csv = out.join(format!("{}.csv", fig.name()));
        fs::write(&csv, &data.csv)?;
        eprintln!("wrote {}", csv.display());
        if a.svg {
            let svg = out.join(format!("{}.svg", fig.name()));
            fs::write(&svg, &data.svg)?;
            eprintln!("wrote {}", svg.display());
        }
    }
    Ok(())
}
