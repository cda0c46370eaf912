//! `qsv`: plan and check quantum state verification runs.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 infeasible
//! request (oracle guard exceeded and similar).

mod render;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qsv_core::general::{
    fidelity_lower_bound_general, fidelity_lower_bound_nonsingular, nonsingular_summary,
    tests_bounds_nonsingular, tests_upper_bound_general,
};
use qsv_core::hedging::{
    h_of, h_tau_free, hedged_plan, nu_h, p_star, p_star_max, HedgeChoice, HedgeReport,
};
use qsv_core::homogeneous::{fidelity_homogeneous, tests_homogeneous};
use qsv_core::io::{parse_spectrum, OperatorFile};
use qsv_core::montecarlo::{simulate_adversary, simulate_iid, SimConfig};
use qsv_core::nonadversarial::tests_needed_na;
use qsv_core::oracle::min_fidelity_lp;
use qsv_core::strategy::{hedge, summarize};
use qsv_core::sweep::{sweep_csv, Figure, SweepGrid};
use qsv_core::{EigenSpectrum, Precision, QsvError, StrategySummary};

use render::{render, Format};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] QsvError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_infeasible() => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "qsv", version, about = "Quantum state verification planner")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal number of tests for a target precision.
    Plan(PlanArgs),
    /// Worst-case fidelity guaranteed after N passed tests.
    Fidelity(FidelityArgs),
    /// Optimal hedging probabilities and cost constants.
    Hedge(HedgeArgs),
    /// Brute-force adversary minimum over configuration mixtures.
    Oracle(OracleArgs),
    /// Monte Carlo check of acceptance and conditional fidelity.
    Simulate(SimulateArgs),
    /// Write figure data as CSV.
    Sweep(SweepArgs),
    /// Spectrum of the verification operator in an operator file.
    Spectrum(SpectrumArgs),
}

/// Exactly one of these describes the verification strategy.
#[derive(Args, Debug, Default)]
struct StrategyArgs {
    /// Homogeneous strategy with non-target eigenvalue λ.
    #[arg(long, conflicts_with_all = ["beta", "spectrum", "operator"])]
    lambda: Option<f64>,
    /// Second largest eigenvalue.
    #[arg(long, conflicts_with_all = ["spectrum", "operator"])]
    beta: Option<f64>,
    /// Smallest eigenvalue, with --beta. Defaults to 0, the worst case.
    #[arg(long, requires = "beta")]
    tau: Option<f64>,
    /// Spectrum string such as "1:1,0.5:3,0.1:2".
    #[arg(long, conflicts_with = "operator")]
    spectrum: Option<String>,
    /// Operator JSON file.
    #[arg(long)]
    operator: Option<PathBuf>,
}

struct Strategy {
    summary: StrategySummary,
    spectrum: EigenSpectrum,
}

impl StrategyArgs {
    fn resolve(&self) -> CliResult<Strategy> {
        let spectrum = if let Some(lambda) = self.lambda {
            EigenSpectrum::homogeneous(lambda, 2)?
        } else if let Some(beta) = self.beta {
            let tau = self.tau.unwrap_or(0.0);
            StrategySummary::from_beta_tau(beta, tau)?;
            if tau < beta {
                EigenSpectrum::new(vec![(1.0, 1), (beta, 1), (tau, 1)])?
            } else {
                EigenSpectrum::new(vec![(1.0, 1), (beta, 1)])?
            }
        } else if let Some(text) = &self.spectrum {
            parse_spectrum(text)?
        } else if let Some(path) = &self.operator {
            load_operator(path)?
        } else {
            return Err(CliError::Usage(
                "a strategy is required: one of --lambda, --beta [--tau], --spectrum, --operator"
                    .into(),
            ));
        };
        Ok(Strategy {
            summary: summarize(&spectrum),
            spectrum,
        })
    }
}

fn load_operator(path: &PathBuf) -> CliResult<EigenSpectrum> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(OperatorFile::from_json(&text)?.spectrum()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scenario {
    Nonadversarial,
    Adversarial,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum HedgeArg {
    None,
    Auto,
    Explicit(f64),
}

fn parse_hedge(text: &str) -> Result<HedgeArg, String> {
    match text {
        "none" => Ok(HedgeArg::None),
        "auto" => Ok(HedgeArg::Auto),
        _ => text
            .strip_prefix("p=")
            .and_then(|v| v.parse().ok())
            .map(HedgeArg::Explicit)
            .ok_or_else(|| format!("expected none, auto or p=VALUE, got {text:?}")),
    }
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, value_enum)]
    scenario: Scenario,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    /// Mix in the trivial test: none, auto (p = ν/e) or p=VALUE.
    #[arg(long, value_parser = parse_hedge, default_value = "none")]
    hedge: HedgeArg,
    #[command(flatten)]
    strategy: StrategyArgs,
}

#[derive(Serialize, Default)]
struct PlanOutput {
    scenario: &'static str,
    epsilon: f64,
    delta: f64,
    strategy: Option<StrategySummary>,
    /// Minimal test count, when it is known exactly.
    n_exact: Option<u64>,
    n_lower: Option<u64>,
    n_upper: Option<u64>,
    /// Real-valued strict upper bound.
    n_upper_strict: Option<f64>,
    n_approx: Option<f64>,
    /// Bound valid for every operator with the same spectral gap.
    n_upper_general: Option<u64>,
    hedge: Option<HedgeReport>,
    hedged_strategy: Option<StrategySummary>,
}

fn plan(args: &PlanArgs) -> CliResult<PlanOutput> {
    let precision = Precision::new(args.epsilon, args.delta)?;
    let summary = args.strategy.resolve()?.summary;
    let mut out = PlanOutput {
        epsilon: args.epsilon,
        delta: args.delta,
        strategy: Some(summary),
        ..Default::default()
    };
    match args.scenario {
        Scenario::Nonadversarial => {
            if args.hedge != HedgeArg::None {
                return Err(CliError::Usage(
                    "--hedge applies to the adversarial scenario only".into(),
                ));
            }
            let na = tests_needed_na(summary.nu, precision)?;
            out.scenario = "nonadversarial";
            out.n_exact = Some(na.n_exact);
            out.n_upper = Some(na.n_upper);
        }
        Scenario::Adversarial => {
            out.scenario = "adversarial";
            out.n_upper_general = Some(tests_upper_bound_general(precision, summary.nu)?);
            let effective = match args.hedge {
                HedgeArg::None => summary,
                HedgeArg::Auto | HedgeArg::Explicit(_) => {
                    let choice = match args.hedge {
                        HedgeArg::Explicit(p) => HedgeChoice::Explicit(p),
                        _ => HedgeChoice::Auto,
                    };
                    let report = hedged_plan(precision, summary.nu, summary.tau, choice)?;
                    let hedged = hedge(&summary, report.p)?;
                    out.hedge = Some(report);
                    out.hedged_strategy = Some(hedged);
                    hedged
                }
            };
            adversarial_counts(precision, &effective, &mut out)?;
        }
    }
    Ok(out)
}

fn adversarial_counts(
    precision: Precision,
    summary: &StrategySummary,
    out: &mut PlanOutput,
) -> CliResult<()> {
    if let Some(lambda) = summary.lambda {
        let plan = tests_homogeneous(precision, lambda)?;
        out.n_exact = Some(plan.n_exact);
        out.n_lower = plan.n_lower;
        out.n_upper = plan.n_upper;
        out.n_approx = plan.n_approx;
    } else if summary.tau > 0.0 {
        let ns = nonsingular_summary(summary.beta, summary.tau)?;
        let bounds = tests_bounds_nonsingular(precision, &ns);
        out.n_lower = Some(bounds.n_lower);
        out.n_upper_strict = Some(bounds.n_upper_strict);
        out.n_approx = Some(bounds.n_approx);
    }
    Ok(())
}

#[derive(Args)]
struct FidelityArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    delta: f64,
    #[command(flatten)]
    strategy: StrategyArgs,
}

#[derive(Serialize)]
struct FidelityOutput {
    n: u64,
    delta: f64,
    /// Exact worst-case fidelity, known for homogeneous strategies.
    fidelity: Option<f64>,
    k_star: Option<u64>,
    zero_regime: Option<bool>,
    /// Raw universal bound; negative values carry no guarantee.
    general_bound: f64,
    general_bound_saturated: bool,
    nonsingular_bound: Option<f64>,
}

fn fidelity(args: &FidelityArgs) -> CliResult<FidelityOutput> {
    let summary = args.strategy.resolve()?.summary;
    let exact = summary
        .lambda
        .map(|l| fidelity_homogeneous(args.n, args.delta, l))
        .transpose()?;
    let general = fidelity_lower_bound_general(args.n, args.delta, summary.nu)?;
    let nonsingular = if summary.tau > 0.0 {
        let ns = nonsingular_summary(summary.beta, summary.tau)?;
        Some(fidelity_lower_bound_nonsingular(args.n, args.delta, &ns)?)
    } else {
        None
    };
    Ok(FidelityOutput {
        n: args.n,
        delta: args.delta,
        fidelity: exact.map(|r| r.fidelity),
        k_star: exact.and_then(|r| r.k_star),
        zero_regime: exact.map(|r| r.zero_regime),
        general_bound: general.bound,
        general_bound_saturated: general.saturated,
        nonsingular_bound: nonsingular,
    })
}

#[derive(Args)]
struct HedgeArgs {
    /// Spectral gap ν.
    #[arg(long)]
    nu: f64,
    /// Smallest eigenvalue τ ≤ 1 − ν.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Also evaluate h at this hedging probability.
    #[arg(long)]
    p: Option<f64>,
    /// With --delta, report test-count bounds.
    #[arg(long, requires = "delta")]
    epsilon: Option<f64>,
    #[arg(long, requires = "epsilon")]
    delta: Option<f64>,
}

#[derive(Serialize)]
struct HedgeOutput {
    nu: f64,
    tau: f64,
    p_star: f64,
    p_star_max: f64,
    p_tau_free: f64,
    h_at_p_star: f64,
    h_tau_free: f64,
    nu_h: f64,
    p: Option<f64>,
    h_at_p: Option<f64>,
    report: Option<HedgeReport>,
}

fn hedge_cmd(args: &HedgeArgs) -> CliResult<HedgeOutput> {
    let (nu, tau) = (args.nu, args.tau);
    let ps = p_star(nu, tau)?;
    let h_at_p = args.p.map(|p| h_of(p, nu, tau)).transpose()?;
    let report = match (args.epsilon, args.delta) {
        (Some(e), Some(d)) => {
            let choice = args.p.map_or(HedgeChoice::Auto, HedgeChoice::Explicit);
            Some(hedged_plan(Precision::new(e, d)?, nu, tau, choice)?)
        }
        _ => None,
    };
    Ok(HedgeOutput {
        nu,
        tau,
        p_star: ps,
        p_star_max: p_star_max(nu)?,
        p_tau_free: nu / std::f64::consts::E,
        h_at_p_star: h_of(ps, nu, tau)?,
        h_tau_free: h_tau_free(nu)?,
        nu_h: nu_h(nu)?,
        p: args.p,
        h_at_p,
        report,
    })
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    delta: f64,
    #[command(flatten)]
    strategy: StrategyArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SimModeArg {
    Iid,
    Adversary,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    mode: SimModeArg,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of tests. Required for adversary mode; in iid mode, the
    /// number of copies sharing --infidelity.
    #[arg(long)]
    n: Option<u64>,
    /// Significance level passed to the oracle in adversary mode.
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated per-copy infidelities (iid mode).
    #[arg(long, value_delimiter = ',', conflicts_with = "infidelity")]
    infidelities: Option<Vec<f64>>,
    /// Common per-copy infidelity (iid mode, with --n).
    #[arg(long, requires = "n")]
    infidelity: Option<f64>,
    #[command(flatten)]
    strategy: StrategyArgs,
}

fn simulate(args: &SimulateArgs) -> CliResult<qsv_core::montecarlo::SimReport> {
    let strategy = args.strategy.resolve()?;
    match args.mode {
        SimModeArg::Iid => {
            let eps = match (&args.infidelities, args.infidelity, args.n) {
                (Some(list), _, _) => list.clone(),
                (None, Some(e), Some(n)) => vec![e; n as usize],
                _ => {
                    return Err(CliError::Usage(
                        "iid mode needs --infidelities or --n with --infidelity".into(),
                    ))
                }
            };
            Ok(simulate_iid(
                &strategy.summary,
                &SimConfig::iid(eps, args.trials, args.seed),
            )?)
        }
        SimModeArg::Adversary => {
            let (Some(n), Some(delta)) = (args.n, args.delta) else {
                return Err(CliError::Usage("adversary mode needs --n and --delta".into()));
            };
            let oracle = min_fidelity_lp(&strategy.spectrum, n, delta)?;
            let config = SimConfig::adversary(&oracle, n, args.trials, args.seed);
            Ok(simulate_adversary(&strategy.spectrum, &config)?)
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// 1: test counts versus λ; 2: hedging overhead versus ν.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    figure: u8,
    /// Output CSV path, or - for standard output.
    #[arg(long)]
    out: PathBuf,
    /// Override the λ or ν axis.
    #[arg(long, value_delimiter = ',')]
    params: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Pair epsilons with deltas element-wise instead of crossing them.
    #[arg(long)]
    paired: Option<bool>,
}

#[derive(Serialize)]
struct SweepOutput {
    figure: Figure,
    rows: usize,
    out: String,
}

fn sweep(args: &SweepArgs) -> CliResult<Option<SweepOutput>> {
    let mut grid = if args.figure == 1 {
        SweepGrid::default_num_tests()
    } else {
        SweepGrid::default_overhead()
    };
    if let Some(p) = &args.params {
        grid.params = p.clone();
    }
    if let Some(e) = &args.epsilons {
        grid.epsilons = e.clone();
    }
    if let Some(d) = &args.deltas {
        grid.deltas = d.clone();
    }
    if let Some(paired) = args.paired {
        grid.paired = paired;
    }
    let csv = sweep_csv(&grid)?;
    let rows = csv.lines().count() - 1;
    if args.out.as_os_str() == "-" {
        match std::io::stdout().write_all(csv.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                return Err(CliError::Io(e.to_string()))
            }
            _ => {}
        }
        return Ok(None);
    }
    fs::write(&args.out, csv)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", args.out.display())))?;
    Ok(Some(SweepOutput {
        figure: grid.figure,
        rows,
        out: args.out.display().to_string(),
    }))
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    operator: PathBuf,
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("QSV_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("QSV_THREADS must be a count, got {value:?}")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<Option<String>> {
    configure_threads()?;
    let f = cli.format;
    Ok(match &cli.command {
        Command::Plan(a) => Some(render(&plan(a)?, f)),
        Command::Fidelity(a) => Some(render(&fidelity(a)?, f)),
        Command::Hedge(a) => Some(render(&hedge_cmd(a)?, f)),
        Command::Oracle(a) => {
            let spectrum = a.strategy.resolve()?.spectrum;
            Some(render(&min_fidelity_lp(&spectrum, a.n, a.delta)?, f))
        }
        Command::Simulate(a) => Some(render(&simulate(a)?, f)),
        Command::Sweep(a) => sweep(a)?.map(|s| render(&s, f)),
        Command::Spectrum(a) => Some(render(&load_operator(&a.operator)?, f)),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Some(text)) => match writeln!(std::io::stdout(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
            _ => ExitCode::SUCCESS,
        },
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
