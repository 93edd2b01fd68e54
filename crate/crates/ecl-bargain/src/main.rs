use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use ecl_bargain::document::{solve_document, DisagreementRule, GameDocument, SolutionKind, WeightsRule};
use ecl_bargain::error::Error;
use ecl_bargain::sweep::{sweep, to_csv, SweepModel, SweepSpec};
use ecl_bargain::verify;

#[derive(Parser)]
#[command(name = "ecl-bargain", version, about = "Bargaining solutions and cores for separable and Bayesian games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Sqrt,
    Log,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game document and print a JSON report.
    Solve {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        solution: Option<SolutionKind>,
        /// nash, threat, stable or point=x1,x2,...
        #[arg(long)]
        disagreement: Option<DisagreementRule>,
        /// uniform, prior or explicit=w1,w2,...
        #[arg(long)]
        weights: Option<WeightsRule>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the gains-from-trade sweep over own-type beliefs as CSV.
    Sweep {
        #[arg(long, value_enum)]
        model: Model,
        /// Resource budget of the log model.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 0.5)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the golden checks and print one line per check.
    Verify {
        /// Comma-separated check ids or criterion numbers.
        #[arg(long)]
        only: Option<String>,
        /// Override every check's tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

enum Outcome {
    Done,
    ChecksFailed,
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Solve { game, solution, disagreement, weights, out } => {
            let text = fs::read_to_string(&game).with_context(|| format!("reading {}", game.display()))?;
            let mut doc = GameDocument::from_json(&text)?;
            if let Some(s) = solution {
                doc.options.solution = s;
            }
            if let Some(d) = disagreement {
                doc.options.disagreement = d;
            }
            if let Some(w) = weights {
                doc.options.weights = w;
            }
            let report = solve_document(&doc)?;
            let mut json = serde_json::to_string_pretty(&report)?;
            json.push('\n');
            emit(&json, out.as_ref())?;
            Ok(Outcome::Done)
        }
        Command::Sweep { model, r, step, p_min, p_max, out } => {
            let model = match (model, r) {
                (Model::Sqrt, None) => SweepModel::SqrtDoubleDecrease,
                (Model::Sqrt, Some(_)) => bail!(Error::Invalid("--r only applies to the log model".into())),
                (Model::Log, Some(r)) => SweepModel::LogParetotopia { r },
                (Model::Log, None) => bail!(Error::Invalid("the log model needs --r".into())),
            };
            let rows = sweep(&SweepSpec::new(model, p_min, p_max, step)?)?;
            emit(&to_csv(&rows), out.as_ref())?;
            Ok(Outcome::Done)
        }
        Command::Verify { only, tol } => {
            let results = verify::run(only.as_deref(), tol)?;
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} checks passed", results.len() - failed, results.len());
            Ok(if failed == 0 { Outcome::Done } else { Outcome::ChecksFailed })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::NonConvergence(_)) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
