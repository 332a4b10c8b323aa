use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use planwright_cli::commands::{self, ExpectArg, Stage};
use planwright_cli::{service, CliError};

/// Orders test cases so that results of later tests can be inferred from earlier ones.
#[derive(Parser)]
#[command(name = "planwright", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a project file.
    Check { project: PathBuf },
    /// List the dependencies between test results.
    Deps { project: PathBuf },
    /// Compute a test plan.
    Plan {
        project: PathBuf,
        /// pessimistic, optimistic, history=<file> or file.
        #[arg(long)]
        expect: Option<ExpectArg>,
        /// Largest constraint count searched exactly.
        #[arg(long)]
        exact_threshold: Option<usize>,
        /// Write the plan JSON here (`-` for stdout only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show which tests are already determined by the recorded results.
    Redundant { project: PathBuf },
    /// Serve the HTTP API and the cockpit assets.
    Serve {
        project: PathBuf,
        #[arg(long)]
        port: Option<u16>,
        /// Session file; resumed when it exists, written after every change.
        #[arg(long)]
        session: Option<PathBuf>,
        /// Directory of static cockpit assets.
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long)]
        expect: Option<ExpectArg>,
    },
    /// Write a clause set in DIMACS format.
    ExportCnf {
        project: PathBuf,
        #[arg(long, default_value = "RTPS")]
        stage: Stage,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Check { project } => commands::check(&project),
        Command::Deps { project } => commands::deps(&project),
        Command::Plan { project, expect, exact_threshold, out } => {
            commands::plan(&project, expect.as_ref(), exact_threshold, out.as_deref())
        }
        Command::Redundant { project } => commands::redundant(&project),
        Command::ExportCnf { project, stage, out } => commands::export_cnf(&project, stage, out.as_deref()),
        Command::Serve { project, port, session, assets, expect } => {
            let port = service::resolve_port(port)?;
            let state = match &session {
                Some(path) if path.exists() => service::load_session(path)?,
                _ => commands::plan_session(&project, expect.as_ref(), None)?,
            };
            if let Some(path) = &session {
                service::save_session(path, &state)?;
            }
            let app = service::router(service::shared(state, session), assets.as_deref());
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
            rt.block_on(service::serve(app, port))?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    // Usage errors share exit code 1 with validation failures, keeping 2 for
    // inconsistent models.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
