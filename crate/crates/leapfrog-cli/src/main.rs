//! `leapfrog` — batch front end: filament runs, period tables, ring
//! snapshots, kernel/spectral self-checks, non-resonance and divisor scans.
//!
//! Exit status: 0 all checks passed, 1 some check failed, 2 usage error,
//! 3 numerical (or output) failure.

mod config;
mod output;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, RunConfig, Scenario};
use output::{Failure, FailureKind};

#[derive(Debug, Parser)]
#[command(
    name = "leapfrog",
    version,
    about = "Leapfrogging vortex rings: numerical experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the two filaments over several periods.
    Filaments(Common),
    /// Closed-form versus measured limiting period on a (λ, κ) grid.
    Period(Common),
    /// Ring boundary snapshots over one period.
    Rings(Common),
    /// Kernel expansion orders, harmonicity and J-function checks.
    KernelCheck(Common),
    /// Torus multiplier identities.
    SpectralCheck(Common),
    /// Non-resonance function over λ and its sign changes.
    Modeone(Common),
    /// Small-divisor admissibility along λ.
    Divisors(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
    /// Skip SVG output.
    #[arg(long)]
    no_svg: bool,
    /// Any config key, e.g. `--set lambda_points=11`; may repeat.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Command {
    fn split(&self) -> (Scenario, &Common) {
        match self {
            Command::Filaments(c) => (Scenario::Filaments, c),
            Command::Period(c) => (Scenario::PeriodTable, c),
            Command::Rings(c) => (Scenario::Rings, c),
            Command::KernelCheck(c) => (Scenario::KernelCheck, c),
            Command::SpectralCheck(c) => (Scenario::SpectralCheck, c),
            Command::Modeone(c) => (Scenario::ModeoneScan, c),
            Command::Divisors(c) => (Scenario::DivisorScan, c),
        }
    }
}

fn resolve(scenario: Scenario, c: &Common) -> Result<RunConfig, ConfigError> {
    let mut a = match &c.config {
        Some(p) => config::parse_file(p)?,
        None => config::Assignments::new(),
    };
    for s in &c.set {
        let (k, v) = config::parse_override(s)?;
        a.insert(k, v);
    }
    for (k, v) in [
        ("epsilon", &c.epsilon),
        ("kappa", &c.kappa),
        ("lambda", &c.lambda),
        ("dt_tol", &c.tol),
        ("seed", &c.seed),
        ("output_dir", &c.output_dir),
    ] {
        if let Some(v) = v {
            a.insert(k.to_string(), v.clone());
        }
    }
    if c.no_svg {
        a.insert("svg".into(), "false".into());
    }
    RunConfig::build(scenario, &a)
}

fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var("LEAPFROG_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("LEAPFROG_THREADS must be a positive integer, got {v:?}")),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (scenario, common) = cli.command.split();
    let cfg = match resolve(scenario, common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("leapfrog: {e}");
            return ExitCode::from(2);
        }
    };
    match thread_cap() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("leapfrog: thread pool: {e}");
                return ExitCode::from(3);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("leapfrog: {e}");
            return ExitCode::from(2);
        }
    }

    let report = cfg.output_dir.join("failures.jsonl");
    let (outcome, code) = match scenarios::run(&cfg) {
        Ok(o) => {
            let code = if o.failures.is_empty() { 0 } else { 1 };
            (o, code)
        }
        Err(e) => {
            let o = scenarios::Outcome {
                failures: vec![Failure {
                    scenario: scenario.name().into(),
                    check: "run".into(),
                    kind: FailureKind::Numerical,
                    message: e.to_string(),
                    value: None,
                    threshold: None,
                }],
                ..Default::default()
            };
            (o, 3)
        }
    };
    for note in &outcome.notes {
        eprintln!("{scenario}: {note}");
    }
    for f in &outcome.files {
        println!("{}", f.display());
    }
    if !outcome.failures.is_empty() {
        for f in &outcome.failures {
            eprintln!("{}", f.json_line());
        }
        match output::write_failures(&report, &outcome.failures) {
            Ok(p) => println!("{}", p.display()),
            Err(e) => eprintln!("leapfrog: cannot write {}: {e}", report.display()),
        }
    } else if report.exists() {
        // a stale report from an earlier run would misdescribe this one
        let _ = std::fs::remove_file(&report);
    }
    ExitCode::from(code)
}
