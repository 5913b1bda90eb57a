use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use catmads::bench::emit;
use catmads::bench::profile::data_profiles;
use catmads::bench::reference::reference_optimum;
use catmads::bench::{
    instance_seeds, run_campaign, BudgetRule, CatMads, SolverAdapter, TraceStore,
};
use catmads::blackbox::problems::{suite, Suite};
use catmads::blackbox::{load_problem_file, make_problem, EvalResult, ProblemSpec};
use catmads::domain::{Domain, Point};
use catmads::solver::{solve, SolverConfig};
use catmads::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "catmads",
    version,
    about = "Mixed-variable blackbox optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem.
    Solve {
        /// Registered problem name, or a problem definition file.
        #[arg(long)]
        problem: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Solve a problem evaluated by a child process.
    External {
        /// Problem definition file.
        #[arg(long)]
        spec: PathBuf,
        /// Child command line; overrides the file's `command`.
        #[arg(long)]
        cmd: Option<String>,
        /// Seconds to wait for each answer.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a benchmark campaign and store the traces.
    Bench {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Seeds per problem.
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        /// First seed of the campaign.
        #[arg(long, default_value_t = 0)]
        campaign_seed: u64,
        /// Evaluations per variable.
        #[arg(long, default_value_t = 250)]
        budget_factor: u64,
        /// Extended-poll trigger values, one solver variant each.
        #[arg(long, value_delimiter = ',', default_value = "0.05")]
        xi: Vec<String>,
        /// Base solver configuration (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build data profiles from a trace store.
    Profile {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-3,1e-5")]
        tau: Vec<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Ignore the built-in reference optima.
        #[arg(long)]
        no_reference: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Solver configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evaluation trace output (CSV).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Per-iteration log output (CSV).
    #[arg(long)]
    iterations: Option<PathBuf>,
    /// Evaluation history output (CSV).
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Unconstrained,
    Constrained,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("catmads: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::UnknownProblem { .. }
        | Error::Domain(_)
        | Error::Structure(_)
        | Error::CategoryIndex { .. }
        | Error::OutOfRange(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Solve { problem, run } => {
            let spec = if Path::new(&problem).is_file() {
                load_problem_file(Path::new(&problem), None, None)?
            } else {
                make_problem(&problem)?
            };
            run_solve(spec, &run)
        }
        Command::External {
            spec,
            cmd,
            timeout,
            run,
        } => {
            if !(timeout > 0.0 && timeout.is_finite()) {
                return Err(Error::Config(format!(
                    "timeout must be positive, got {timeout}"
                )));
            }
            let problem = load_problem_file(
                &spec,
                cmd.as_deref(),
                Some(Duration::from_secs_f64(timeout)),
            )?;
            run_solve(problem, &run)
        }
        Command::Bench {
            suite: which,
            seeds,
            campaign_seed,
            budget_factor,
            xi,
            config,
            out,
        } => run_bench(
            which,
            seeds,
            campaign_seed,
            budget_factor,
            &xi,
            config.as_deref(),
            &out,
        ),
        Command::Profile {
            traces,
            tau,
            csv,
            svg,
            no_reference,
        } => run_profile(&traces, &tau, csv.as_deref(), svg.as_deref(), no_reference),
    }
}

fn read_config(path: Option<&Path>) -> Result<SolverConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            SolverConfig::from_json(&text)
        }
        None => Ok(SolverConfig::default()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn incumbent_json(domain: &Domain, best: &Option<(Point, EvalResult)>) -> serde_json::Value {
    match best {
        Some((p, r)) => json!({
            "point": serde_json::from_str::<serde_json::Value>(&domain.point_to_json(p)).unwrap_or_default(),
            "f": r.f,
            "h": r.h,
            "g": r.g,
            "eval_index": r.eval_index,
        }),
        None => serde_json::Value::Null,
    }
}

fn run_solve(problem: ProblemSpec, run: &RunArgs) -> Result<ExitCode> {
    let mut config = read_config(run.config.as_deref())?;
    if let Some(b) = run.budget {
        config = config.with_budget(b);
    }
    if let Some(s) = run.seed {
        config = config.with_seed(s);
    }
    let name = problem.name.clone();
    let result = solve(problem, config)?;
    if let Some(p) = &run.trace {
        result.write_trace(create(p)?)?;
    }
    if let Some(p) = &run.iterations {
        result.write_iterations(create(p)?)?;
    }
    if let Some(p) = &run.history {
        result.history.write_csv(&result.domain, create(p)?)?;
    }
    let summary = json!({
        "problem": name,
        "termination": result.termination.to_string(),
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "best_feasible": incumbent_json(&result.domain, &result.best_feasible),
        "best_infeasible": incumbent_json(&result.domain, &result.best_infeasible),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitCode::SUCCESS)
}

fn parse_xi(s: &str) -> Result<f64> {
    let v = match s.trim() {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        t => t
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("invalid xi value `{s}`")))?,
    };
    if v.is_nan() {
        return Err(Error::Config("xi must not be NaN".into()));
    }
    Ok(v)
}

fn run_bench(
    which: SuiteArg,
    seeds: usize,
    campaign_seed: u64,
    budget_factor: u64,
    xi: &[String],
    config: Option<&Path>,
    out: &Path,
) -> Result<ExitCode> {
    if seeds == 0 || budget_factor == 0 {
        return Err(Error::Config(
            "seeds and budget factor must be positive".into(),
        ));
    }
    let problems: Vec<String> = match which {
        SuiteArg::All => suite(Suite::Unconstrained)
            .into_iter()
            .chain(suite(Suite::Constrained))
            .collect(),
        SuiteArg::Unconstrained => suite(Suite::Unconstrained),
        SuiteArg::Constrained => suite(Suite::Constrained),
    }
    .into_iter()
    .map(String::from)
    .collect();
    let base = read_config(config)?;
    let mut solvers: Vec<Box<dyn SolverAdapter>> = Vec::new();
    for x in xi {
        let v = parse_xi(x)?;
        solvers.push(Box::new(CatMads::new(
            format!("xi_{}", x.trim()),
            base.clone().with_xi(v),
        )));
    }
    let report = run_campaign(
        &problems,
        &solvers,
        &instance_seeds(campaign_seed, seeds),
        BudgetRule::PerVariable(budget_factor),
        out,
    )?;
    println!("runs: {}", report.runs);
    println!("failures: {}", report.failures.len());
    for f in &report.failures {
        println!(
            "  {} {} seed {}: {}",
            f.solver, f.problem, f.seed, f.message
        );
    }
    println!("digest: {}", report.digest);
    Ok(if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn run_profile(
    traces: &Path,
    taus: &[f64],
    csv: Option<&Path>,
    svg: Option<&Path>,
    no_reference: bool,
) -> Result<ExitCode> {
    let store = TraceStore::load(traces)?;
    let reference = |name: &str| {
        if no_reference {
            None
        } else {
            reference_optimum(name)
        }
    };
    let set = data_profiles(&store, taus, &reference)?;
    println!(
        "instances: {} (excluded {}), kappa_max: {}",
        set.instances.len(),
        set.excluded.len(),
        set.kappa_max
    );
    for c in &set.curves {
        println!(
            "tau {:e}  {:<16} solved {}/{}",
            c.tau,
            c.solver,
            c.solved(),
            set.instances.len()
        );
    }
    if let Some(p) = csv {
        emit::write_csv(&set.curves, create(p)?)?;
    }
    if let Some(p) = svg {
        std::fs::write(p, emit::svg(&set.curves))?;
    }
    Ok(ExitCode::SUCCESS)
}
