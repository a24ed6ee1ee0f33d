//! `imperfect-crack`: run bundled or file-based scenarios, write profile
//! tables and metadata, and cross-check against the spectral solvers.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use imperfect_crack::mode3::Formulation;
use imperfect_crack::operators::Execution;
use imperfect_crack::scenario::{bundled, bundled_names, Scenario};
use imperfect_crack::Error;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "imperfect-crack", version, about = "Crack on a soft imperfect interface between orthotropic half-planes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one or more scenarios and write `<name>.csv` and `<name>.json`.
    Run {
        /// Scenario file paths or bundled scenario names.
        #[arg(required = true)]
        scenarios: Vec<String>,
        #[command(flatten)]
        opts: RunOpts,
        /// Also run the spectral cross-check and write `<name>.oracle.json`.
        #[arg(long)]
        oracle: bool,
        /// Scenarios solved concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Compare the Nyström and spectral solutions of each scenario.
    OracleCheck {
        #[arg(required = true)]
        scenarios: Vec<String>,
        #[command(flatten)]
        opts: RunOpts,
        /// Band limit of the spectral grid [default: 200/l_min].
        #[arg(long)]
        xi_max: Option<f64>,
        /// Comparison window in units of l [default: 5].
        #[arg(long)]
        window: Option<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// List bundled scenarios.
    ListScenarios,
    /// Print a bundled scenario as TOML, as a starting point for new files.
    ShowScenario { name: String },
}

#[derive(Args, Clone, Default)]
struct RunOpts {
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    /// Mode III formulation: coupled-st, mixed, t-only or s-only [default: from scenario, else t-only].
    #[arg(long)]
    formulation: Option<String>,
    /// Crack-side truncation length [default: max(10·l, 20/scale)].
    #[arg(long)]
    l_neg: Option<f64>,
    /// Interface-side truncation length [default: as l-neg].
    #[arg(long)]
    l_pos: Option<f64>,
    /// Crack-side intervals [default: 400].
    #[arg(long)]
    n_neg: Option<usize>,
    /// Interface-side intervals [default: 400].
    #[arg(long)]
    n_pos: Option<usize>,
    /// Tip grading exponent [default: 3].
    #[arg(long)]
    grading: Option<f64>,
    /// Multiply both interval counts [default: 1].
    #[arg(long)]
    refine: Option<usize>,
    /// Oracle pass threshold, relative max-norm [default: 0.005 mode III, 0.01 in-plane].
    #[arg(long)]
    threshold: Option<f64>,
    /// Assemble operators on one thread.
    #[arg(long)]
    sequential: bool,
}

/// Failure classes and their exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Class {
    ThresholdFailure,
    Validation,
    Config,
    Solver,
    OracleNonConvergence,
}

impl Class {
    fn code(self) -> u8 {
        match self {
            Class::ThresholdFailure => 1,
            Class::Validation => 2,
            Class::Config => 3,
            Class::Solver => 4,
            Class::OracleNonConvergence => 5,
        }
    }
}

#[derive(Debug, Serialize)]
struct Failure {
    scenario: String,
    class: Class,
    #[serde(skip_serializing_if = "Option::is_none")]
    invariant: Option<String>,
    message: String,
}

impl Failure {
    fn new(scenario: &str, class: Class, message: impl Into<String>) -> Self {
        Failure {
            scenario: scenario.to_string(),
            class,
            invariant: None,
            message: message.into(),
        }
    }

    fn from_error(scenario: &str, e: &Error, in_oracle: bool) -> Self {
        let class = match e {
            Error::Validation { .. }
            | Error::UnbalancedLoading { .. }
            | Error::Domain { .. }
            | Error::UnsupportedRegime(_) => Class::Validation,
            Error::Config(_) => Class::Config,
            Error::NonConvergence { .. } if in_oracle => Class::OracleNonConvergence,
            Error::NonConvergence { .. } | Error::Singular(_) => Class::Solver,
        };
        let invariant = match e {
            Error::Validation { invariant, .. } => Some(invariant.to_string()),
            Error::UnbalancedLoading { .. } => Some("self-balanced loading".to_string()),
            Error::Domain { expected, .. } => Some(expected.to_string()),
            _ => None,
        };
        Failure {
            scenario: scenario.to_string(),
            class,
            invariant,
            message: e.to_string(),
        }
    }
}

fn load_scenario(arg: &str) -> Result<Scenario, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::new(arg, Class::Config, format!("cannot read {arg}: {e}")))?;
        Scenario::from_toml(&text).map_err(|e| Failure::from_error(arg, &e, false))
    } else {
        bundled(arg).map_err(|_| {
            Failure::new(
                arg,
                Class::Config,
                format!("'{arg}' is neither a readable file nor a bundled scenario (see list-scenarios)"),
            )
        })
    }
}

fn apply_overrides(s: &mut Scenario, o: &RunOpts) -> Result<(), Failure> {
    if let Some(f) = &o.formulation {
        s.formulation = Formulation::parse(f).map_err(|e| Failure::from_error(&s.name, &e, false))?;
    }
    let g = &mut s.grid;
    g.l_neg = o.l_neg.or(g.l_neg);
    g.l_pos = o.l_pos.or(g.l_pos);
    g.n_neg = o.n_neg.or(g.n_neg);
    g.n_pos = o.n_pos.or(g.n_pos);
    g.grading = o.grading.or(g.grading);
    g.refine = o.refine.or(g.refine);
    s.oracle.threshold = o.threshold.or(s.oracle.threshold);
    Ok(())
}

fn execution(o: &RunOpts) -> Execution {
    if o.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn io_failure(name: &str, e: std::io::Error) -> Failure {
    Failure::new(name, Class::Config, format!("output: {e}"))
}

fn run_one(arg: &str, opts: &RunOpts, oracle: bool) -> Result<(), Failure> {
    let mut s = load_scenario(arg)?;
    apply_overrides(&mut s, opts)?;
    let out = s
        .run(execution(opts))
        .map_err(|e| Failure::from_error(&s.name, &e, false))?;
    std::fs::create_dir_all(&opts.out).map_err(|e| io_failure(&s.name, e))?;
    output::write_profile(&opts.out.join(format!("{}.csv", s.name)), &out.profile)
        .map_err(|e| io_failure(&s.name, e))?;
    output::write_json(&opts.out.join(format!("{}.json", s.name)), &out.metadata)
        .map_err(|e| io_failure(&s.name, e))?;
    eprintln!(
        "{}: {} rows, residual {:.2e}, tip mismatch {:.2e}",
        s.name,
        out.profile.len(),
        out.metadata.residual,
        out.metadata.tip_mismatch
    );
    if oracle {
        oracle_one(&s, opts)?;
    }
    Ok(())
}

fn oracle_one(s: &Scenario, opts: &RunOpts) -> Result<(), Failure> {
    let report = s
        .oracle_check(execution(opts))
        .map_err(|e| Failure::from_error(&s.name, &e, true))?;
    std::fs::create_dir_all(&opts.out).map_err(|e| io_failure(&s.name, e))?;
    output::write_json(&opts.out.join(format!("{}.oracle.json", s.name)), &report)
        .map_err(|e| io_failure(&s.name, e))?;
    let c = &report.comparison;
    println!(
        "{} {}: max {:.3e} (crack {:.3e} / {:.3e} mean, interface {:.3e} / {:.3e} mean), threshold {:.3e}",
        if report.passed { "PASS" } else { "FAIL" },
        s.name,
        c.max_relative,
        c.crack.max_relative,
        c.crack.mean_relative,
        c.interface.max_relative,
        c.interface.mean_relative,
        report.threshold
    );
    if report.passed {
        Ok(())
    } else {
        Err(Failure::new(
            &s.name,
            Class::ThresholdFailure,
            format!("deviation {:.3e} exceeds {:.3e}", c.max_relative, report.threshold),
        ))
    }
}

/// Run `job` over `items` on up to `jobs` threads; results keep input order.
fn batch<F>(items: &[String], jobs: usize, job: F) -> Vec<Result<(), Failure>>
where
    F: Fn(&str) -> Result<(), Failure> + Sync,
{
    let jobs = jobs.clamp(1, items.len().max(1));
    let mut results: Vec<Option<Result<(), Failure>>> = items.iter().map(|_| None).collect();
    std::thread::scope(|scope| {
        for (chunk_items, chunk_out) in items
            .chunks(items.len().div_ceil(jobs))
            .zip(results.chunks_mut(items.len().div_ceil(jobs)))
        {
            let job = &job;
            scope.spawn(move || {
                for (item, slot) in chunk_items.iter().zip(chunk_out.iter_mut()) {
                    *slot = Some(job(item));
                }
            });
        }
    });
    results.into_iter().map(|r| r.expect("every slot filled")).collect()
}

fn finish(results: Vec<Result<(), Failure>>) -> ExitCode {
    let mut code = 0u8;
    for r in results {
        if let Err(f) = r {
            eprintln!("{}", serde_json::to_string(&f).unwrap_or_else(|_| f.message.clone()));
            code = code.max(f.class.code());
        }
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenarios,
            opts,
            oracle,
            jobs,
        } => finish(batch(&scenarios, jobs, |s| run_one(s, &opts, oracle))),
        Command::OracleCheck {
            scenarios,
            opts,
            xi_max,
            window,
            jobs,
        } => finish(batch(&scenarios, jobs, |arg| {
            let mut s = load_scenario(arg)?;
            apply_overrides(&mut s, &opts)?;
            s.oracle.xi_max = xi_max.or(s.oracle.xi_max);
            s.oracle.window = window.or(s.oracle.window);
            oracle_one(&s, &opts)
        })),
        Command::ListScenarios => {
            for name in bundled_names() {
                let s = bundled(name).expect("bundled scenarios parse");
                println!("{name:<20} {:<5} {}", s.mode.as_str(), s.description);
            }
            ExitCode::SUCCESS
        }
        Command::ShowScenario { name } => match bundled(&name).and_then(|s| s.to_toml()) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => finish(vec![Err(Failure::from_error(&name, &e, false))]),
        },
    }
}
