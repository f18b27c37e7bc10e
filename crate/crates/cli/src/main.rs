//! `hyperex`: sharp constants, convolution powers and verification suites
//! for the hyperboloid extension problem.

mod commands;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use hyperex::functionals::{Method, SheetCount};
use serde_json::json;

use commands::{ConvMethod, CurveArgs, Outcome};
use report::RunReport;
use verify::{Budget, Suite};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(hyperex::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<hyperex::Error> for CliError {
    fn from(e: hyperex::Error) -> Self {
        CliError::Library(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "hyperex", version, about = "Sharp extension constants on the hyperboloid")]
struct Cli {
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Zero the wall-clock field so identical runs give identical output.
    #[arg(long, global = true)]
    no_meta: bool,

    /// Seed for every random draw.
    #[arg(long, global = true, env = "HYPEREX_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sharp constants H_{d,p,s}; the full table when --d and --p are omitted.
    Constants {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, value_enum, default_value_t = SheetArg::One)]
        sheet: SheetArg,
        /// Print CSV instead of text.
        #[arg(long, conflicts_with = "json")]
        csv: bool,
    },
    /// Q_{d,p}(a, s) over a grid of a, as CSV.
    Curve {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 1e-3)]
        a_min: f64,
        #[arg(long, default_value_t = 1e2)]
        a_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long)]
        log_spacing: bool,
        /// Defaults to closed where a closed form exists.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Write the CSV here and print the report instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pointwise n-fold convolution of the hyperboloid measure.
    Conv {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Spatial frequency, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = ConvMethodArg::Closed)]
        method: ConvMethodArg,
    },
    /// Run verification suites; exits with 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Overrides the sample budget of each selected suite.
        #[arg(long)]
        samples: Option<usize>,
        /// Overrides the grid size of each selected suite.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Fraction of the L² mass of f_a inside the ball of radius R.
    Concentrate {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        radius: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SheetArg {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Quadrature,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConvMethodArg {
    Closed,
    Oracle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Specfun,
    Lorentz,
    Support,
    Sharp,
    Metric,
    Oracle,
    Functional,
}

fn run_verify(suite: SuiteArg, samples: Option<usize>, grid: Option<usize>, seed: u64) -> Outcome {
    let suites: Vec<Suite> = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Specfun => vec![Suite::Specfun],
        SuiteArg::Lorentz => vec![Suite::Lorentz],
        SuiteArg::Support => vec![Suite::Support],
        SuiteArg::Sharp => vec![Suite::Sharp],
        SuiteArg::Metric => vec![Suite::Metric],
        SuiteArg::Oracle => vec![Suite::Oracle],
        SuiteArg::Functional => vec![Suite::Functional],
    };
    let budget = Budget { samples, grid, seed };
    let mut report = RunReport::new("verify", seed);
    let names: Vec<&str> = suites.iter().map(|s| s.name()).collect();
    report.input("suites", names);
    if let Some(n) = samples {
        report.input("samples", n);
    }
    if let Some(n) = grid {
        report.input("grid", n);
    }
    let mut checks = Vec::new();
    for suite in suites {
        let result = verify::run(suite, &budget);
        for (key, value) in result.error_estimates {
            report.error_estimate(&key, value);
        }
        checks.extend(result.checks);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    report.output("passed", checks.len() - failed).output("failed", failed).output("checks", json!(checks));
    Outcome { report, csv: None, failed: failed > 0 }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Constants { d, p, s, sheet, .. } => {
            let sheet = match sheet {
                SheetArg::One => SheetCount::One,
                SheetArg::Two => SheetCount::Two,
            };
            commands::constants(*d, *p, *s, sheet, seed)
        }
        Command::Curve { d, p, s, a_min, a_max, points, log_spacing, method, out } => {
            let method = method.map(|m| match m {
                MethodArg::Closed => Method::Closed,
                MethodArg::Quadrature => Method::Quadrature,
            });
            let args = CurveArgs {
                d: *d,
                p: *p,
                s: *s,
                a_min: *a_min,
                a_max: *a_max,
                points: *points,
                log_spacing: *log_spacing,
                method,
                out: out.clone(),
            };
            commands::curve(&args, seed)
        }
        Command::Conv { d, n, s, xi, tau, method } => {
            let method = match method {
                ConvMethodArg::Closed => ConvMethod::Closed,
                ConvMethodArg::Oracle => ConvMethod::Oracle,
            };
            commands::conv(*d, *n, *s, xi, *tau, method, seed)
        }
        Command::Verify { suite, samples, grid } => Ok(run_verify(*suite, *samples, *grid, seed)),
        Command::Concentrate { d, s, a, radius } => commands::concentrate(*d, *s, *a, *radius, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if !cli.no_meta {
        outcome.report.wall_time_ms = (start.elapsed().as_millis() as u64).max(1);
    }

    let csv_out = match &cli.command {
        Command::Curve { out: Some(path), .. } => {
            if let Err(e) = std::fs::write(path, outcome.csv.as_deref().unwrap_or_default()) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            false
        }
        Command::Curve { .. } => !cli.json,
        Command::Constants { csv, .. } => *csv,
        _ => false,
    };
    if csv_out {
        print!("{}", outcome.csv.as_deref().unwrap_or_default());
    } else if cli.json {
        println!("{}", outcome.report.to_json());
    } else {
        print!("{}", outcome.report.to_text());
    }
    if outcome.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
