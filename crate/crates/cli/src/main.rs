use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srspd_cli::design_file::{self, num, DesignFile, MAGIC};
use srspd_cli::evaluator::ExternalEvaluator;
use srspd_cli::plot::{self, PlotKind};
use srspd_core::adaptive::{self, Objective, SessionConfig, Strategy};
use srspd_core::experiment::{self, EmulationSettings};
use srspd_core::lattice::{gram_identities, LatticeFamily, LatticeSpec};
use srspd_core::metrics::{self, theoretical_separation, within_group_separation, SeparationKind};
use srspd_core::srspd::{self, SliceMode};
use srspd_core::{Benchmark, GpConfig, GpModel, LooMode, RotationPolicy, RspdConfig};

/// Writes a line to standard output; a closed pipe ends the process quietly.
macro_rules! out {
    ($($arg:tt)*) => {
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    };
}

#[derive(Parser)]
#[command(name = "srspd", version, about = "Sliced rotated sphere packing designs and adaptive sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SeedArg {
    /// Master seed.
    #[arg(long, env = "SRSPD_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Build a sliced design and write it as a design file.
    Generate(GenerateArgs),
    /// Report space-filling criteria of a design or point file.
    Metrics(MetricsArgs),
    /// Run one adaptive session.
    Adapt(AdaptArgs),
    /// (φ, ψ) of random partition designs.
    Scan(ScanArgs),
    /// Density, thickness and generator identities for 2 ≤ p ≤ 10.
    Tables,
    /// Compare emulation strategies by prediction error.
    Emulate(EmulateArgs),
    /// Compare minimization strategies by best value found.
    Optimize(OptimizeArgs),
    /// Write a plotting script for one of the output files.
    PlotScript(PlotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Partition,
    Enlarge,
}

#[derive(Clone, Copy, ValueEnum)]
enum RotationArg {
    Identity,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    p: usize,
    /// Design size (partition mode).
    #[arg(long, required_if_eq("mode", "partition"), conflicts_with = "n1")]
    n: Option<usize>,
    /// Number of adults (enlarge mode).
    #[arg(long, required_if_eq("mode", "enlarge"))]
    n1: Option<usize>,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Number of (R, δ) candidates; defaults to 1 for p = 2 and 100 otherwise.
    #[arg(long)]
    w: Option<usize>,
    /// Rotation policy; defaults to identity for p = 2 and random otherwise.
    #[arg(long, value_enum)]
    rotation: Option<RotationArg>,
    /// Select among candidates by balance φ first, then ψ (partition mode).
    #[arg(long)]
    balance: bool,
    #[command(flatten)]
    seed: SeedArg,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Design file, or a plain file with one point per line.
    file: PathBuf,
    /// Monte Carlo samples for the fill distance.
    #[arg(long, default_value_t = 100_000)]
    fill_samples: usize,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Args)]
struct AdaptArgs {
    /// Built-in objective: franke, branin, goldstein-price, hartmann3, hartmann6.
    #[arg(long, required_unless_present = "evaluator", conflicts_with = "evaluator")]
    objective: Option<String>,
    /// External command reading one line of coordinates and printing one value.
    #[arg(long, requires = "dim")]
    evaluator: Option<String>,
    /// Input dimension of the external evaluator.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    strategy: String,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    total: Option<usize>,
    /// Stop once the selecting criterion falls below this value.
    #[arg(long)]
    threshold: Option<f64>,
    /// Keep lengthscales from the initial fit instead of refitting each step.
    #[arg(long)]
    no_refit: bool,
    /// Reuse full-data lengthscales in the leave-one-out models.
    #[arg(long)]
    frozen_loo: bool,
    /// Uniform probes per continuous search.
    #[arg(long)]
    probes: Option<usize>,
    #[command(flatten)]
    seed: SeedArg,
    /// Trace file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    candidates: usize,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmulateArgs {
    #[arg(long, default_value = "franke")]
    objective: String,
    #[arg(long, default_value_t = 13)]
    n1: usize,
    /// Comma-separated run counts.
    #[arg(long, value_delimiter = ',', default_values_t = [13, 15, 17, 20, 25])]
    totals: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = ["mmlh".to_string(), "mmlh-cv".to_string(), "srspd-cv".to_string(), "srspd-cv2".to_string()])]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 10_000)]
    test_points: usize,
    #[command(flatten)]
    seed: SeedArg,
    /// Mean absolute errors go here; root-mean-square errors go to the same
    /// path with a `.rmse` suffix.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, value_delimiter = ',', default_values_t = ["branin".to_string(), "goldstein-price".to_string(), "hartmann3".to_string()])]
    objectives: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = ["ei-only".to_string(), "smed-ei".to_string(), "srspd-ei".to_string()])]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Runs per session; defaults to 30p.
    #[arg(long)]
    total: Option<usize>,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long, value_enum)]
    kind: PlotKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Domain(String),
    Usage(String),
}

impl From<srspd_core::Error> for Failure {
    fn from(e: srspd_core::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_fail(path, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

/// Summary lines go to standard error when the payload uses standard output.
fn report(to_stdout: bool, line: &str) {
    if to_stdout {
        out!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn parse<T: std::str::FromStr<Err = srspd_core::Error>>(s: &str) -> Result<T, Failure> {
    s.parse::<T>().map_err(|e| Failure::Usage(e.to_string()))
}

fn generate(args: GenerateArgs) -> CmdResult {
    let p = args.p;
    let mut config = RspdConfig::recommended(p);
    if let Some(w) = args.w {
        config.candidates = w;
    }
    if let Some(r) = args.rotation {
        config.rotation = match r {
            RotationArg::Identity => RotationPolicy::Identity,
            RotationArg::Random => RotationPolicy::RandomGivens,
        };
    }
    let mut rng = rng(args.seed.seed);
    let (sliced, kind, n_ref) = match args.mode {
        ModeArg::Partition => {
            let n = args.n.ok_or_else(|| Failure::Usage("--n is required in partition mode".into()))?;
            let d = if args.balance {
                let candidates = srspd::balance_candidates(p, n, config.candidates, &config, &mut rng)?;
                srspd::select_balanced(candidates)?
            } else {
                srspd::partition_srspd(p, n, &config, &mut rng)?
            };
            (d, SeparationKind::Full, n)
        }
        ModeArg::Enlarge => {
            if args.balance {
                return Err(Failure::Usage("--balance applies to partition mode only".into()));
            }
            let n1 = args.n1.ok_or_else(|| Failure::Usage("--n1 is required in enlarge mode".into()))?;
            (srspd::enlarge_srspd(p, n1, &config, &mut rng)?, SeparationKind::Enlarged, n1)
        }
    };
    let file = DesignFile { family: LatticeFamily::ApStar, seed: Some(args.seed.seed), sliced };
    let text = design_file::write_design(&file);
    emit(args.out.as_deref(), &text)?;
    let d = &file.sliced;
    let to_stdout = args.out.is_some();
    let sep = metrics::separation_distance(&d.design.points)?;
    report(to_stdout, &format!("slices\t{}", join_usize(&d.slice_sizes)));
    report(to_stdout, &format!("phi\t{}", d.phi));
    report(to_stdout, &format!("psi\t{}", num(d.design.psi)));
    report(to_stdout, &format!("separation\t{}", num(sep)));
    report(to_stdout, &format!("theoretical_separation\t{}", num(theoretical_separation(p, n_ref, kind))));
    if let Some(ws) = within_group_separation(&d.design.points, &d.slice_of) {
        report(to_stdout, &format!("slice_separation\t{}", num(ws)));
        if args.mode == ModeArg::Partition {
            let t = theoretical_separation(p, n_ref, SeparationKind::Slice);
            report(to_stdout, &format!("theoretical_slice_separation\t{}", num(t)));
        }
    }
    Ok(())
}

fn join_usize(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn metrics_cmd(args: MetricsArgs) -> CmdResult {
    let text = fs::read_to_string(&args.file).map_err(|e| io_fail(&args.file, e))?;
    let parse_fail = |e: design_file::ParseError| Failure::Usage(format!("{}: {e}", args.file.display()));
    let (points, theoretical, labels) = if text.starts_with(MAGIC) {
        let f = design_file::read_design(&text).map_err(parse_fail)?;
        let d = f.sliced;
        let (kind, n) = match d.mode {
            SliceMode::Partition => (SeparationKind::Full, d.len()),
            SliceMode::Enlarge => (SeparationKind::Enlarged, d.slice_sizes[0]),
        };
        let t = theoretical_separation(d.dim(), n, kind);
        (d.design.points, Some(t), Some(d.slice_of))
    } else {
        (design_file::read_points(&text).map_err(parse_fail)?, None, None)
    };
    let report = metrics::criterion_report(&points, args.fill_samples, theoretical, &mut rng(args.seed.seed))?;
    out!("points: {}", points.len());
    out!("separation: {}", report.separation);
    if let Some(t) = report.theoretical_separation {
        out!("theoretical separation: {t}");
    }
    out!("fill distance (estimate, {} samples): {}", report.fill_samples, report.fill_estimate);
    match report.psi {
        Some(v) => out!("psi: {v}"),
        None => out!("psi: inf"),
    }
    let slice_sep = labels.as_ref().and_then(|l| within_group_separation(&points, l));
    if let Some(v) = slice_sep {
        out!("slice separation: {v}");
    }
    out!("#metric\tvalue");
    out!("n\t{}", points.len());
    out!("separation\t{}", num(report.separation));
    out!("theoretical_separation\t{}", report.theoretical_separation.map_or("NA".into(), num));
    out!("fill_estimate\t{}", num(report.fill_estimate));
    out!("psi\t{}", report.psi.map_or("inf".into(), num));
    out!("slice_separation\t{}", slice_sep.map_or("NA".into(), num));
    Ok(())
}

fn adapt(args: AdaptArgs) -> CmdResult {
    let strategy: Strategy = parse(&args.strategy)?;
    let (mut objective, builtin): (Box<dyn Objective>, Option<Benchmark>) = match (&args.objective, &args.evaluator) {
        (Some(name), _) => {
            let b: Benchmark = parse(name)?;
            (Box::new(b), Some(b))
        }
        (None, Some(cmd)) => {
            let dim = args.dim.ok_or_else(|| Failure::Usage("--dim is required with --evaluator".into()))?;
            (Box::new(ExternalEvaluator::new(cmd, dim)?), None)
        }
        (None, None) => return Err(Failure::Usage("give --objective or --evaluator".into())),
    };
    let p = objective.dim();
    let mut config = SessionConfig::new(strategy, p);
    if let Some(v) = args.total {
        config.total = v;
        if args.n2.is_none() {
            config.n2 = config.n2.min(v);
        }
    }
    if let Some(v) = args.n2 {
        config.n2 = v;
    }
    config.n1 = args.n1.unwrap_or(config.n1.min(config.n2));
    config.threshold = args.threshold;
    config.refit = !args.no_refit;
    if args.frozen_loo {
        config.loo_mode = LooMode::Frozen;
    }
    if let Some(v) = args.probes {
        config.probes = v;
    }
    let outcome = adaptive::run_session(objective.as_mut(), &config, &mut rng(args.seed.seed));
    let to_stdout = args.out.is_some();
    let trace = match &outcome {
        Ok(s) => &s.trace,
        Err(e) => match e.partial_trace() {
            Some(t) => t,
            None => return Err(Failure::Domain(e.to_string())),
        },
    };
    let mut text = format!("#seed\t{}\n", args.seed.seed);
    text.push_str(&trace.to_tsv());
    emit(args.out.as_deref(), &text)?;
    let session = outcome.map_err(|e| Failure::Domain(format!("{e} (partial trace written)")))?;
    report(to_stdout, &format!("runs\t{}", session.trace.len()));
    if let Some(best) = session.trace.best() {
        report(to_stdout, &format!("best\t{}", num(best)));
    }
    if session.stopped_early {
        report(to_stdout, "stopped\tthreshold");
    }
    if let (Some(b), true) = (builtin, strategy.is_emulation()) {
        let test = experiment::uniform_points(10_000, p, &mut rng(args.seed.seed ^ 0x5EED));
        let model = GpModel::fit(
            &session.trace.inputs(),
            &session.trace.outputs(),
            &GpConfig::default().with_seed(args.seed.seed),
        )?;
        let (mae, rmse) = experiment::prediction_errors(&model, b, &test)?;
        report(to_stdout, &format!("mae\t{}", num(mae)));
        report(to_stdout, &format!("rmse\t{}", num(rmse)));
    }
    Ok(())
}

fn scan(args: ScanArgs) -> CmdResult {
    let config = RspdConfig::new(args.candidates, RotationPolicy::RandomGivens);
    let scores = srspd::balance_scan(args.p, args.n, args.candidates, &config, &mut rng(args.seed.seed))?;
    let mut text = String::from("candidate\tphi\tpsi\tsizes\n");
    for (i, s) in scores.iter().enumerate() {
        text.push_str(&format!("{}\t{}\t{}\t{}\n", i + 1, s.phi, num(s.psi), join_usize(&s.sizes)));
    }
    emit(args.out.as_deref(), &text)?;
    let best = scores.iter().map(|s| s.phi).fold(f64::INFINITY, f64::min);
    let hits = scores.iter().filter(|s| s.phi == best).count();
    report(args.out.is_some(), &format!("min_phi\t{best}\tcount\t{hits}"));
    Ok(())
}

fn tables() -> CmdResult {
    out!("family\tp\tdensity\tthickness\tcovering_radius");
    for family in [LatticeFamily::Ap, LatticeFamily::ApStar, LatticeFamily::Zp] {
        for p in 2..=10 {
            let s = LatticeSpec::new(family, p)?;
            out!("{}\t{p}\t{:.4}\t{:.4}\t{:.6}", family.name(), s.density(), s.thickness(), s.covering_radius);
        }
    }
    out!("p\tforward_residual\tinverse_residual\tdual_normalization");
    for p in 2..=10 {
        let g = gram_identities(p)?;
        out!("{p}\t{:.3e}\t{:.3e}\t{:.6}", g.forward_residual, g.inverse_residual, g.dual_normalization);
    }
    Ok(())
}

fn strategies(names: &[String]) -> Result<Vec<Strategy>, Failure> {
    names.iter().map(|s| parse(s)).collect()
}

fn emulate(args: EmulateArgs) -> CmdResult {
    let objective: Benchmark = parse(&args.objective)?;
    let settings = EmulationSettings {
        n1: args.n1,
        totals: args.totals,
        strategies: strategies(&args.strategies)?,
        reps: args.reps,
        seed: args.seed.seed,
        test_points: args.test_points,
        gp: GpConfig::default(),
    };
    let table = experiment::emulation_experiment(objective, &settings, SessionConfig::new)?;
    emit(args.out.as_deref(), &experiment::rows_to_tsv(&table.mae))?;
    if let Some(path) = &args.out {
        let mut rmse = path.clone().into_os_string();
        rmse.push(".rmse");
        let rmse = PathBuf::from(rmse);
        fs::write(&rmse, experiment::rows_to_tsv(&table.rmse)).map_err(|e| io_fail(&rmse, e))?;
        for (o, s, k, v) in experiment::mean_by_run(&table.mae) {
            out!("{o}\t{s}\t{k}\t{}", num(v));
        }
    }
    Ok(())
}

fn optimize(args: OptimizeArgs) -> CmdResult {
    let objectives: Vec<Benchmark> = args.objectives.iter().map(|s| parse(s)).collect::<Result<_, _>>()?;
    let total = args.total;
    let configure = move |s: Strategy, p: usize| {
        let mut c = SessionConfig::new(s, p);
        if let Some(t) = total {
            c.total = t;
        }
        c
    };
    let rows = experiment::optimization_experiment(
        &objectives,
        &strategies(&args.strategies)?,
        args.reps,
        args.seed.seed,
        configure,
    )?;
    emit(args.out.as_deref(), &experiment::rows_to_tsv(&rows))?;
    if args.out.is_some() {
        let means = experiment::mean_by_run(&rows);
        for (o, s, k, v) in means.iter().filter(|m| means.iter().all(|n| n.0 != m.0 || n.1 != m.1 || n.2 <= m.2)) {
            out!("{o}\t{s}\t{k}\t{}", num(*v));
        }
    }
    Ok(())
}

fn plot_script(args: PlotArgs) -> CmdResult {
    emit(args.out.as_deref(), &plot::script(args.kind))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Metrics(a) => metrics_cmd(a),
        Command::Adapt(a) => adapt(a),
        Command::Scan(a) => scan(a),
        Command::Tables => tables(),
        Command::Emulate(a) => emulate(a),
        Command::Optimize(a) => optimize(a),
        Command::PlotScript(a) => plot_script(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
