//! Replays a trace against a repository and writes the event log.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use dragrepo_core::adapters::{
    repo_preferred_flavors, Addressing, RepoSource, RepoTargets, SharedRepo,
};
use dragrepo_core::engine::{
    DragPhase, DragSession, DropTargets, Outcome, Point, Receipt, TargetId,
};
use dragrepo_core::repository::{ConflictChoice, ImportPolicy, ImportReport};
use dragrepo_core::transfer::{encode_item, DataFlavor, Payload};
use dragrepo_core::{Action, ActionSet, FeedbackSignal, NodeId};
use serde_json::json;

use crate::error::CliError;
use crate::trace::TraceEvent;

pub const LOG_FORMAT: &str = "dnd-trace-log";
pub const LOG_VERSION: u32 = 1;

/// Trace node naming the external drive target enabled by `--emit`.
pub const DRIVE_NODE: &str = "@drive";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OnConflict {
    Skip,
    Overwrite,
    Cancel,
}

impl OnConflict {
    pub fn policy(self) -> ImportPolicy {
        match self {
            OnConflict::Skip => ImportPolicy::default(),
            OnConflict::Overwrite => ImportPolicy::overwrite(),
            OnConflict::Cancel => ImportPolicy::prompt(|_| ConflictChoice::CancelAll),
        }
    }
}

/// A directory outside the repository that accepts drops as envelope
/// files, one `<name>.dnde` per dragged item. It sits in another process
/// as far as the engine is concerned, so it only ever sees byte streams.
pub struct Drive {
    dir: PathBuf,
    on_conflict: OnConflict,
    requested: Action,
    written: Vec<PathBuf>,
    error: Option<CliError>,
}

impl Drive {
    fn receive(&mut self, payload: Payload) -> Receipt {
        let items = match payload.into_items() {
            Ok(items) => items,
            Err(e) => {
                self.error = Some(e.into());
                return Receipt::Refused;
            }
        };
        if let Err(e) = fs::create_dir_all(&self.dir) {
            self.error = Some(CliError::io(&self.dir, e));
            return Receipt::Refused;
        }
        let mut transferred = Vec::new();
        for item in items {
            let path = self.dir.join(format!("{}.dnde", item.name()));
            if path.exists() {
                match self.on_conflict {
                    OnConflict::Skip => continue,
                    OnConflict::Cancel => return Receipt::Cancelled,
                    OnConflict::Overwrite => {}
                }
            }
            if let Err(e) = fs::write(&path, encode_item(&item).to_bytes()) {
                self.error = Some(CliError::io(&path, e));
                return Receipt::Refused;
            }
            self.written.push(path);
            transferred.push(item.id());
        }
        Receipt::Accepted { transferred }
    }
}

/// Repository folders plus the optional drive.
pub struct CliTargets {
    pub repo: RepoTargets,
    pub drive: Option<Drive>,
}

impl DropTargets for CliTargets {
    fn resolve(&self, node: &str) -> Option<TargetId> {
        if node == DRIVE_NODE {
            return self.drive.as_ref().map(|_| DRIVE_NODE.to_string());
        }
        self.repo.resolve(node)
    }

    fn is_remote(&self, target: &str) -> bool {
        target == DRIVE_NODE
    }

    fn preferred_flavors(&self, target: &str) -> Vec<DataFlavor> {
        if target == DRIVE_NODE {
            return repo_preferred_flavors()
                .into_iter()
                .filter(|f| !f.is_local_reference())
                .collect();
        }
        self.repo.preferred_flavors(target)
    }

    fn is_drag_ok(&self, target: &str, position: Point, offered: ActionSet) -> Option<Action> {
        match &self.drive {
            Some(d) if target == DRIVE_NODE => Some(d.requested),
            _ => self.repo.is_drag_ok(target, position, offered),
        }
    }

    fn receive_drop(&mut self, target: &str, payload: Payload, action: Action) -> Receipt {
        match &mut self.drive {
            Some(d) if target == DRIVE_NODE => d.receive(payload),
            _ => self.repo.receive_drop(target, payload, action),
        }
    }
}

pub struct ReplayOptions {
    pub action: Action,
    pub offer: ActionSet,
    pub emit: Option<PathBuf>,
    pub json: bool,
    pub on_conflict: OnConflict,
}

/// What a replay ended with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ending {
    Finished(Outcome),
    /// The drag never started.
    NoDrag,
    /// The trace ran out mid-drag.
    Unfinished,
}

impl Ending {
    pub fn label(self) -> String {
        match self {
            Ending::Finished(o) => o.to_string(),
            Ending::NoDrag => "NoDrag".into(),
            Ending::Unfinished => "Unfinished".into(),
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Ending::Finished(Outcome::Completed(_)) => 0,
            _ => 2,
        }
    }
}

pub struct Replay {
    pub ending: Ending,
    /// True when the repository may have changed.
    pub touched: bool,
}

struct Log<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

impl Log<'_> {
    fn line(&mut self, text: String, value: serde_json::Value) -> Result<(), CliError> {
        let res = if self.json {
            writeln!(self.out, "{value}")
        } else {
            writeln!(self.out, "{text}")
        };
        res.map_err(|e| CliError::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        })
    }

    fn feedback(&mut self, signals: &[FeedbackSignal]) -> Result<(), CliError> {
        if self.json {
            return Ok(());
        }
        for s in signals {
            self.line(format!("  {s}"), json!(null))?;
        }
        Ok(())
    }
}

fn report_line(r: &ImportReport) -> String {
    format!(
        "import added={} skipped={} overwritten={} cancelled={}",
        r.added, r.skipped, r.overwritten, r.cancelled
    )
}

/// Runs `trace` against `repo`, writing the log to `out`.
pub fn run(
    repo: &SharedRepo,
    trace: &[TraceEvent],
    opts: ReplayOptions,
    out: &mut dyn Write,
) -> Result<Replay, CliError> {
    let mut log = Log {
        out,
        json: opts.json,
    };
    log.line(
        format!("{LOG_FORMAT} {LOG_VERSION}"),
        json!({ "log": LOG_FORMAT, "version": LOG_VERSION }),
    )?;

    // The press names the dragged node.
    let selection: Vec<NodeId> = {
        let tree = repo.read().unwrap_or_else(|e| e.into_inner());
        trace[0]
            .event
            .hover_node
            .as_deref()
            .and_then(|p| tree.resolve_path(p))
            .into_iter()
            .collect()
    };
    let source = RepoSource::new(repo.clone(), selection.clone(), opts.offer);
    let mut repo_targets = RepoTargets::new(repo.clone(), Addressing::Path)
        .with_policy(opts.on_conflict.policy())
        .with_dragged(selection);
    repo_targets.request(Some(opts.action));
    let targets = CliTargets {
        repo: repo_targets,
        drive: opts.emit.map(|dir| Drive {
            dir,
            on_conflict: opts.on_conflict,
            requested: opts.action,
            written: Vec::new(),
            error: None,
        }),
    };
    let mut session = DragSession::new("replay", source, targets, true);
    let mut started = false;
    let mut touched = false;

    for te in trace {
        let ev = &te.event;
        let step = session
            .handle_pointer_event(ev)
            .map_err(|error| CliError::Engine {
                line: te.line,
                error,
            })?;
        started |= !matches!(step.phase, DragPhase::Idle | DragPhase::Armed { .. });
        let kind = json!(ev.kind);
        let kind = kind.as_str().unwrap_or_default();
        log.line(
            format!("{} t={} {kind} -> {}", te.line, ev.timestamp_ms, step.phase),
            json!({
                "line": te.line,
                "t": ev.timestamp_ms,
                "ev": kind,
                "phase": step.phase.name(),
                "target": session.current_target(),
                "feedback": step.feedback,
            }),
        )?;
        log.feedback(&step.feedback)?;
        if step.phase == DragPhase::Dropping {
            let target = session.current_target().unwrap_or_default().to_string();
            let drop = session.perform_drop().map_err(|error| CliError::Engine {
                line: te.line,
                error,
            })?;
            touched = true;
            log.line(
                format!("drop {target} -> {}", drop.outcome),
                json!({
                    "drop": target,
                    "outcome": drop.outcome.to_string(),
                    "action": session.negotiated_action(),
                    "feedback": drop.feedback,
                }),
            )?;
            log.feedback(&drop.feedback)?;
            let targets = session.targets();
            if let Some(r) = targets.repo.last_report() {
                log.line(report_line(r), json!({ "import": r }))?;
            }
            if let Some(d) = &targets.drive {
                for p in &d.written {
                    let name = p
                        .file_name()
                        .unwrap_or_default()
                        .to_string_lossy()
                        .to_string();
                    log.line(format!("emit {name}"), json!({ "emit": name }))?;
                }
            }
        }
    }
    if let Some(e) = session
        .targets_mut()
        .drive
        .as_mut()
        .and_then(|d| d.error.take())
    {
        return Err(e);
    }
    if let Some(e) = session.source().move_error() {
        return Err(e.clone().into());
    }
    let ending = match session.outcome() {
        Some(o) => Ending::Finished(o),
        None if started => Ending::Unfinished,
        None => Ending::NoDrag,
    };
    log.line(
        format!("result {}", ending.label()),
        json!({ "result": ending.label(), "exit": ending.exit_code() }),
    )?;
    Ok(Replay { ending, touched })
}
