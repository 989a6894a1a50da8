use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use dragrepo_core::adapters::share;
use dragrepo_core::clock::{Clock, ManualClock, SystemClock};
use dragrepo_core::repository::save;
use dragrepo_core::{Action, ActionSet};

use dragrepo_cli::error::CliError;
use dragrepo_cli::replay::{self, OnConflict, ReplayOptions};
use dragrepo_cli::{commands, trace};

#[derive(Parser)]
#[command(
    name = "dnd",
    version,
    about = "Component repository tool and drag trace simulator"
)]
struct Cli {
    /// Repository directory.
    #[arg(long, global = true, default_value = ".")]
    repo: PathBuf,
    /// Use a fixed clock (milliseconds) instead of the system clock.
    #[arg(long, global = true, hide = true)]
    now: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ActionArg {
    Copy,
    Move,
}

impl From<ActionArg> for Action {
    fn from(a: ActionArg) -> Action {
        match a {
            ActionArg::Copy => Action::Copy,
            ActionArg::Move => Action::Move,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OfferArg {
    Copy,
    Move,
    Both,
}

impl From<OfferArg> for ActionSet {
    fn from(a: OfferArg) -> ActionSet {
        match a {
            OfferArg::Copy => ActionSet::COPY,
            OfferArg::Move => ActionSet::MOVE,
            OfferArg::Both => ActionSet::COPY_OR_MOVE,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Create an empty repository.
    Init,
    /// Add a file (raw bytes or an exported envelope) to a folder.
    Add { file: PathBuf, folder: String },
    /// Create a folder, e.g. `/lib`.
    Mkdir { path: String },
    /// List the tree, one node per line.
    Ls,
    /// Write a node as an envelope file.
    Export { id: String, out: PathBuf },
    /// Rename a component.
    Rename { id: String, name: String },
    /// Allow dragging a component.
    Enable { id: String },
    /// Forbid dragging a component.
    Disable { id: String },
    /// Delete a component.
    Rm { id: String },
    /// Replay a pointer trace and print the event log.
    #[command(alias = "run-trace")]
    Replay {
        trace: PathBuf,
        /// Action the drop target asks for.
        #[arg(long, value_enum, default_value = "copy")]
        action: ActionArg,
        /// Actions the drag source offers.
        #[arg(long, value_enum, default_value = "both")]
        offer: OfferArg,
        /// Directory acting as an external drop target, addressed as `@drive`.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Print the log as JSON lines.
        #[arg(long)]
        json: bool,
        /// What to do when a dropped item's name is taken.
        #[arg(long, value_enum, default_value = "skip")]
        on_conflict: OnConflict,
    },
}

fn mutate<R>(
    dir: &Path,
    clock: Arc<dyn Clock>,
    f: impl FnOnce(&mut dragrepo_core::repository::RepoTree) -> Result<R, CliError>,
) -> Result<R, CliError> {
    let mut tree = commands::open(dir, clock)?;
    let out = f(&mut tree)?;
    save(&tree, dir)?;
    Ok(out)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let clock: Arc<dyn Clock> = match cli.now {
        Some(ms) => Arc::new(ManualClock::new(ms)),
        None => Arc::new(SystemClock),
    };
    let dir = cli.repo.as_path();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let io_err = |e: io::Error| CliError::io(Path::new("<stdout>"), e);
    match cli.command {
        Command::Init => commands::init(dir)?,
        Command::Add { file, folder } => {
            let ids = mutate(dir, clock, |t| commands::add(t, &file, &folder))?;
            for id in ids {
                writeln!(out, "{id}").map_err(io_err)?;
            }
        }
        Command::Mkdir { path } => {
            let id = mutate(dir, clock, |t| commands::mkdir(t, &path))?;
            writeln!(out, "{id}").map_err(io_err)?;
        }
        Command::Ls => {
            let tree = commands::open(dir, clock)?;
            commands::ls(&tree, &mut out).map_err(io_err)?;
        }
        Command::Export { id, out: file } => {
            let tree = commands::open(dir, clock)?;
            commands::export(&tree, &id, &file)?;
        }
        Command::Rename { id, name } => mutate(dir, clock, |t| commands::rename(t, &id, &name))?,
        Command::Enable { id } => mutate(dir, clock, |t| commands::set_enabled(t, &id, true))?,
        Command::Disable { id } => mutate(dir, clock, |t| commands::set_enabled(t, &id, false))?,
        Command::Rm { id } => mutate(dir, clock, |t| commands::remove(t, &id))?,
        Command::Replay {
            trace,
            action,
            offer,
            emit,
            json,
            on_conflict,
        } => {
            let text = std::fs::read_to_string(&trace).map_err(|e| CliError::io(&trace, e))?;
            let events = trace::parse(&text)?;
            let repo = share(commands::open(dir, clock)?);
            let opts = ReplayOptions {
                action: action.into(),
                offer: offer.into(),
                emit,
                json,
                on_conflict,
            };
            let replay = replay::run(&repo, &events, opts, &mut out)?;
            if replay.touched {
                let tree = repo.read().unwrap_or_else(|e| e.into_inner());
                save(&tree, dir)?;
            }
            out.flush().map_err(io_err)?;
            return Ok(replay.ending.exit_code());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            // Errors always lead with their name.
            let msg = e.to_string();
            if msg.starts_with(e.name()) {
                eprintln!("{msg}");
            } else {
                eprintln!("{}: {msg}", e.name());
            }
            ExitCode::from(1)
        }
    }
}
