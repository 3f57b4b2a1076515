use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use superchar_core::algebra::DEFAULT_BUDGET;
use superchar_core::superchar::HAction;
use superchar_core::{FormTag, FormType, PrimeField, SpringerMap, Sylow};

mod report;

/// Build and check supercharacter theories of Sylow subgroups of B_n, C_n and D_n over F_p.
#[derive(Parser, Debug)]
#[command(name = "superchar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of superclasses from the rook-placement formula (no enumeration).
    Count(Job),
    /// Superclass partition of U with canonical labels.
    Classify(Job),
    /// Orbits of the dual space.
    Orbits(Job),
    /// The supercharacter table.
    Table(Job),
    /// Build the theory and check every statement about it.
    Verify(VerifyJob),
}

#[derive(Args, Debug, Clone)]
struct Job {
    #[arg(long = "type", value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest number of elements any enumeration may visit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Springer::Cayley)]
    springer: Springer,
}

#[derive(Args, Debug, Clone)]
struct VerifyJob {
    #[command(flatten)]
    job: Job,
    /// Include wall-clock timings in the report (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
    /// Convention for the action of H_lambda on the dual space.
    #[arg(long, value_enum, default_value_t = Action::Transposed)]
    h_action: Action,
    /// Skip the fibre scan over the whole dual space.
    #[arg(long)]
    no_fiber: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "D", alias = "d")]
    D,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Springer {
    Cayley,
    Log,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Action {
    Transposed,
    Twisted,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] superchar_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    /// Output was produced but some statement failed.
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(superchar_core::Error::Domain(_)) => 1,
            CliError::Core(superchar_core::Error::Budget { .. }) => 3,
            CliError::Core(superchar_core::Error::TheoremViolation(_)) | CliError::Violation(_) => 2,
        }
    }
}

impl Job {
    fn sylow(&self) -> Result<Sylow, CliError> {
        let kind = match self.kind {
            Kind::B => FormType::B,
            Kind::C => FormType::C,
            Kind::D => FormType::D,
        };
        let tag = FormTag::new(kind, self.n).map_err(|e| CliError::Usage(e.to_string()))?;
        let field = PrimeField::new(self.p).map_err(|e| CliError::Usage(e.to_string()))?;
        let springer = match self.springer {
            Springer::Cayley => SpringerMap::Cayley,
            Springer::Log => SpringerMap::Log,
        };
        Sylow::with_springer(tag, field, springer).map_err(|e| CliError::Usage(e.to_string()))
    }

    fn setup_threads(&self) -> Result<(), CliError> {
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(CliError::Usage("--threads must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Count(job) => {
            let sylow = job.sylow()?;
            job.emit(&report::count(&sylow, job.format == Format::Csv))
        }
        Command::Classify(job) => {
            job.setup_threads()?;
            let sylow = job.sylow()?;
            let (text, missing) = report::classify(&sylow, job.budget, job.format == Format::Csv)?;
            job.emit(&text)?;
            violation_if(missing, "superclasses")
        }
        Command::Orbits(job) => {
            job.setup_threads()?;
            let sylow = job.sylow()?;
            let (text, missing) = report::dual_orbits(&sylow, job.budget, job.format == Format::Csv)?;
            job.emit(&text)?;
            violation_if(missing, "dual orbits")
        }
        Command::Table(job) => {
            job.setup_threads()?;
            let sylow = job.sylow()?;
            let (text, missing) = report::table(&sylow, job.budget, job.format == Format::Csv)?;
            job.emit(&text)?;
            violation_if(missing, "superclasses")
        }
        Command::Verify(v) => {
            v.job.setup_threads()?;
            let sylow = v.job.sylow()?;
            let options = superchar_core::superchar::VerifyOptions {
                budget: v.job.budget,
                h_action: match v.h_action {
                    Action::Transposed => HAction::Transposed,
                    Action::Twisted => HAction::Twisted,
                },
                fiber: !v.no_fiber,
                timings: v.timings,
            };
            let (text, failed) = report::verify(&sylow, options, v.job.format == Format::Csv)?;
            v.job.emit(&text)?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Violation(format!("failed checks: {}", failed.join(", "))))
            }
        }
    }
}

fn violation_if(missing: usize, what: &str) -> Result<(), CliError> {
    if missing == 0 {
        Ok(())
    } else {
        Err(CliError::Violation(format!("{missing} {what} have no unique rook form")))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SUPERCHAR_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
