use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{negotiate_action, Action, ActionSet, Negotiation};
use crate::feedback::{cursor_for, CursorShape, FeedbackSignal};
use crate::transfer::{choose_flavor, Transferable};

use super::ports::{DragSource, DropTargets, Origin, Receipt, TargetId};

/// Distance from the press origin, in pixels, at which a press becomes a drag.
pub const DRAG_THRESHOLD_PX: u32 = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub fn new(x: i32, y: i32) -> Self {
        Point { x, y }
    }

    fn dist_sq(self, other: Point) -> i64 {
        let dx = (self.x as i64) - (other.x as i64);
        let dy = (self.y as i64) - (other.y as i64);
        dx * dx + dy * dy
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointerKind {
    Press,
    Move,
    Release,
    Cancel,
}

/// A pointer event as delivered by the host. Hit-testing is the host's job:
/// `hover_node` names whatever node the pointer is over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointerEvent {
    pub kind: PointerKind,
    pub position: Point,
    pub timestamp_ms: u64,
    pub hover_node: Option<String>,
}

impl PointerEvent {
    pub fn new(kind: PointerKind, x: i32, y: i32, t: u64, over: Option<&str>) -> Self {
        PointerEvent {
            kind,
            position: Point::new(x, y),
            timestamp_ms: t,
            hover_node: over.map(str::to_string),
        }
    }

    pub fn press(x: i32, y: i32, t: u64, over: Option<&str>) -> Self {
        Self::new(PointerKind::Press, x, y, t, over)
    }

    pub fn moved(x: i32, y: i32, t: u64, over: Option<&str>) -> Self {
        Self::new(PointerKind::Move, x, y, t, over)
    }

    pub fn release(x: i32, y: i32, t: u64, over: Option<&str>) -> Self {
        Self::new(PointerKind::Release, x, y, t, over)
    }

    pub fn cancel(t: u64) -> Self {
        Self::new(PointerKind::Cancel, 0, 0, t, None)
    }
}

/// How a session ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Completed(Action),
    RejectedByTarget,
    CancelledNoTarget,
    CancelledByUser,
    TransferFailed,
}

impl Outcome {
    pub fn is_success(self) -> bool {
        matches!(self, Outcome::Completed(_))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Completed(a) => write!(f, "Completed({a})"),
            Outcome::RejectedByTarget => f.write_str("RejectedByTarget"),
            Outcome::CancelledNoTarget => f.write_str("CancelledNoTarget"),
            Outcome::CancelledByUser => f.write_str("CancelledByUser"),
            Outcome::TransferFailed => f.write_str("TransferFailed"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DragPhase {
    Idle,
    Armed { origin: Point },
    Dragging,
    OverTarget(TargetId),
    Dropping,
    Done(Outcome),
}

impl DragPhase {
    pub fn is_done(&self) -> bool {
        matches!(self, DragPhase::Done(_))
    }

    /// Phase name without payload, as used in logs and the HTTP API.
    pub fn name(&self) -> &'static str {
        match self {
            DragPhase::Idle => "Idle",
            DragPhase::Armed { .. } => "Armed",
            DragPhase::Dragging => "Dragging",
            DragPhase::OverTarget(_) => "OverTarget",
            DragPhase::Dropping => "Dropping",
            DragPhase::Done(_) => "Done",
        }
    }
}

impl fmt::Display for DragPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DragPhase::OverTarget(t) => write!(f, "OverTarget({t})"),
            DragPhase::Done(o) => write!(f, "Done({o})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("SessionClosed")]
    SessionClosed,
    #[error("ProtocolViolation: {0}")]
    ProtocolViolation(String),
}

impl EngineError {
    pub fn name(&self) -> &'static str {
        match self {
            EngineError::SessionClosed => "SessionClosed",
            EngineError::ProtocolViolation(_) => "ProtocolViolation",
        }
    }
}

fn violation(msg: impl Into<String>) -> EngineError {
    EngineError::ProtocolViolation(msg.into())
}

/// Result of one pointer event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub phase: DragPhase,
    pub feedback: Vec<FeedbackSignal>,
}

/// Result of [`DragSession::perform_drop`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DropStep {
    pub outcome: Outcome,
    pub feedback: Vec<FeedbackSignal>,
}

/// How the target under the pointer reacts to the current drag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Hover {
    willing: bool,
    cursor: CursorShape,
}

/// One drag operation, from press to completion.
///
/// The session is a deterministic transducer: each pointer event moves it
/// through [`DragPhase`] and yields the feedback to render, cursor signals
/// before highlight signals. It owns no global state; the host supplies the
/// source and the targets.
pub struct DragSession<S, T> {
    id: String,
    phase: DragPhase,
    source: S,
    targets: T,
    is_local: bool,
    threshold_px: u32,
    origin: Option<Origin>,
    source_actions: ActionSet,
    transferable: Option<Box<dyn Transferable>>,
    negotiated: Option<Action>,
    hover: Option<Hover>,
    over_origin: bool,
    highlighted: Option<TargetId>,
    drop_target: Option<TargetId>,
    last_position: Point,
    last_timestamp: Option<u64>,
    pending_move: Option<Vec<crate::ids::NodeId>>,
}

impl<S: DragSource, T: DropTargets> DragSession<S, T> {
    pub fn new(id: impl Into<String>, source: S, targets: T, is_local: bool) -> Self {
        DragSession {
            id: id.into(),
            phase: DragPhase::Idle,
            source,
            targets,
            is_local,
            threshold_px: DRAG_THRESHOLD_PX,
            origin: None,
            source_actions: ActionSet::NONE,
            transferable: None,
            negotiated: None,
            hover: None,
            over_origin: false,
            highlighted: None,
            drop_target: None,
            last_position: Point::default(),
            last_timestamp: None,
            pending_move: None,
        }
    }

    pub fn with_threshold(mut self, px: u32) -> Self {
        self.threshold_px = px;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn phase(&self) -> &DragPhase {
        &self.phase
    }

    pub fn is_local(&self) -> bool {
        self.is_local
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn source_mut(&mut self) -> &mut S {
        &mut self.source
    }

    pub fn targets(&self) -> &T {
        &self.targets
    }

    pub fn targets_mut(&mut self) -> &mut T {
        &mut self.targets
    }

    pub fn into_parts(self) -> (S, T) {
        (self.source, self.targets)
    }

    pub fn origin(&self) -> Option<&Origin> {
        self.origin.as_ref()
    }

    /// Actions offered by the source, fixed when the drag started.
    pub fn source_actions(&self) -> ActionSet {
        self.source_actions
    }

    pub fn transferable(&self) -> Option<&dyn Transferable> {
        self.transferable.as_deref()
    }

    pub fn negotiated_action(&self) -> Option<Action> {
        self.negotiated
    }

    pub fn highlighted(&self) -> Option<&str> {
        self.highlighted.as_deref()
    }

    /// The target a drop would go to.
    pub fn current_target(&self) -> Option<&str> {
        match &self.phase {
            DragPhase::OverTarget(t) => Some(t),
            DragPhase::Dropping => self.drop_target.as_deref(),
            _ => None,
        }
    }

    pub fn outcome(&self) -> Option<Outcome> {
        match self.phase {
            DragPhase::Done(o) => Some(o),
            _ => None,
        }
    }

    /// Advances the session by one pointer event.
    pub fn handle_pointer_event(&mut self, ev: &PointerEvent) -> Result<Step, EngineError> {
        if self.phase.is_done() {
            return Err(EngineError::SessionClosed);
        }
        if let Some(last) = self.last_timestamp {
            if ev.timestamp_ms < last {
                return Err(violation(format!(
                    "timestamp {} precedes {last}",
                    ev.timestamp_ms
                )));
            }
        }
        let mut feedback = Vec::new();
        let next = match (&self.phase, ev.kind) {
            (DragPhase::Done(_), _) => unreachable!(),
            (_, PointerKind::Cancel) => {
                self.finish(Outcome::CancelledByUser, &mut feedback);
                self.phase.clone()
            }
            (DragPhase::Idle, PointerKind::Press) => match &ev.hover_node {
                Some(node) => {
                    self.origin = Some(Origin {
                        position: ev.position,
                        node: node.clone(),
                    });
                    DragPhase::Armed {
                        origin: ev.position,
                    }
                }
                None => DragPhase::Idle,
            },
            (_, PointerKind::Press) => {
                return Err(violation(format!("press while {}", self.phase.name())))
            }
            (DragPhase::Idle, _) => DragPhase::Idle,
            (DragPhase::Armed { origin }, PointerKind::Move) => {
                let reach = self.threshold_px as i64;
                if ev.position.dist_sq(*origin) < reach * reach {
                    self.phase.clone()
                } else {
                    self.start_drag(&mut feedback)
                }
            }
            (DragPhase::Armed { .. }, PointerKind::Release) => {
                self.origin = None;
                DragPhase::Idle
            }
            (DragPhase::Dragging, PointerKind::Move) => {
                match ev
                    .hover_node
                    .as_deref()
                    .and_then(|n| self.targets.resolve(n))
                {
                    Some(target) => {
                        self.enter(target.clone(), ev, &mut feedback);
                        DragPhase::OverTarget(target)
                    }
                    None => DragPhase::Dragging,
                }
            }
            (DragPhase::Dragging, PointerKind::Release) => {
                self.finish(Outcome::CancelledNoTarget, &mut feedback);
                self.phase.clone()
            }
            (DragPhase::OverTarget(current), PointerKind::Move) => {
                let current = current.clone();
                match ev
                    .hover_node
                    .as_deref()
                    .and_then(|n| self.targets.resolve(n))
                {
                    Some(target) if target == current => {
                        self.stay(target.clone(), ev, &mut feedback);
                        DragPhase::OverTarget(target)
                    }
                    Some(target) => {
                        self.enter(target.clone(), ev, &mut feedback);
                        DragPhase::OverTarget(target)
                    }
                    None => {
                        feedback.push(FeedbackSignal::cursor(self.no_drop_cursor()));
                        self.unhighlight(&mut feedback);
                        self.hover = None;
                        DragPhase::Dragging
                    }
                }
            }
            (DragPhase::OverTarget(current), PointerKind::Release) => {
                self.drop_target = Some(current.clone());
                DragPhase::Dropping
            }
            (DragPhase::Dropping, PointerKind::Move) => DragPhase::Dropping,
            (DragPhase::Dropping, PointerKind::Release) => {
                return Err(violation("release while dropping"))
            }
        };
        self.last_timestamp = Some(ev.timestamp_ms);
        if !matches!(self.phase, DragPhase::Dropping | DragPhase::Done(_)) {
            self.last_position = ev.position;
        }
        if !self.phase.is_done() {
            self.phase = next;
        }
        Ok(Step {
            phase: self.phase.clone(),
            feedback,
        })
    }

    fn no_drop_cursor(&self) -> CursorShape {
        cursor_for(self.source_actions.primary().unwrap_or(Action::Copy), false)
    }

    fn start_drag(&mut self, feedback: &mut Vec<FeedbackSignal>) -> DragPhase {
        let origin = self.origin.clone().expect("armed sessions have an origin");
        let actions = self.source.source_actions();
        if actions.is_empty() || !self.source.is_start_drag_ok(&origin) {
            self.origin = None;
            return DragPhase::Idle;
        }
        let Some(transferable) = self.source.transferable() else {
            self.origin = None;
            return DragPhase::Idle;
        };
        self.source_actions = actions;
        self.transferable = Some(transferable);
        feedback.push(FeedbackSignal::cursor(self.no_drop_cursor()));
        DragPhase::Dragging
    }

    fn evaluate(&self, target: &str, ev: &PointerEvent) -> Hover {
        let choice = if self.origin_hit(ev) {
            None
        } else {
            self.targets
                .is_drag_ok(target, ev.position, self.source_actions)
        };
        match choice {
            Some(a) if self.source_actions.contains(a) => Hover {
                willing: true,
                cursor: cursor_for(a, true),
            },
            Some(a) => Hover {
                willing: false,
                cursor: cursor_for(a, false),
            },
            None => Hover {
                willing: false,
                cursor: self.no_drop_cursor(),
            },
        }
    }

    fn origin_hit(&self, ev: &PointerEvent) -> bool {
        self.origin
            .as_ref()
            .is_some_and(|o| ev.hover_node.as_deref() == Some(o.node.as_str()))
    }

    /// Pointer entered `target`, coming from outside it.
    fn enter(&mut self, target: TargetId, ev: &PointerEvent, feedback: &mut Vec<FeedbackSignal>) {
        let hover = self.evaluate(&target, ev);
        feedback.push(FeedbackSignal::cursor(hover.cursor));
        self.unhighlight(feedback);
        if hover.willing {
            feedback.push(FeedbackSignal::highlight(target.clone(), true));
            self.highlighted = Some(target);
        }
        self.hover = Some(hover);
        self.over_origin = self.origin_hit(ev);
    }

    /// Pointer moved within `target`; re-ask it and report only changes.
    fn stay(&mut self, target: TargetId, ev: &PointerEvent, feedback: &mut Vec<FeedbackSignal>) {
        let hover = self.evaluate(&target, ev);
        let previous = self.hover.replace(hover);
        self.over_origin = self.origin_hit(ev);
        if previous == Some(hover) {
            return;
        }
        if previous.map(|p| p.cursor) != Some(hover.cursor) {
            feedback.push(FeedbackSignal::cursor(hover.cursor));
        }
        match (self.highlighted.is_some(), hover.willing) {
            (false, true) => {
                feedback.push(FeedbackSignal::highlight(target.clone(), true));
                self.highlighted = Some(target);
            }
            (true, false) => self.unhighlight(feedback),
            _ => {}
        }
    }

    fn unhighlight(&mut self, feedback: &mut Vec<FeedbackSignal>) {
        if let Some(t) = self.highlighted.take() {
            feedback.push(FeedbackSignal::highlight(t, false));
        }
    }

    /// Runs validation, acceptance, transfer and completion for a session in
    /// `Dropping`. The session ends in `Done` whatever the outcome.
    pub fn perform_drop(&mut self) -> Result<DropStep, EngineError> {
        match self.phase {
            DragPhase::Dropping => {}
            DragPhase::Done(_) => return Err(EngineError::SessionClosed),
            _ => return Err(violation(format!("drop while {}", self.phase.name()))),
        }
        let mut feedback = Vec::new();
        let outcome = self.run_drop();
        self.finish(outcome, &mut feedback);
        Ok(DropStep { outcome, feedback })
    }

    fn run_drop(&mut self) -> Outcome {
        let Some(target) = self.drop_target.clone() else {
            return Outcome::RejectedByTarget;
        };
        let transferable = self
            .transferable
            .as_ref()
            .expect("dragging sessions hold data");

        // Validation: flavor and action.
        let local = self.is_local && !self.targets.is_remote(&target);
        let preferred = self.targets.preferred_flavors(&target);
        let flavor = choose_flavor(transferable.flavors(), &preferred, local);
        let choice = if self.over_origin {
            None
        } else {
            self.targets
                .is_drag_ok(&target, self.last_position, self.source_actions)
        };
        let (Some(flavor), Some(choice)) = (flavor, choice) else {
            return Outcome::RejectedByTarget;
        };

        // Acceptance.
        let action = match negotiate_action(self.source_actions, choice) {
            Negotiation::Agreed(a) => a,
            Negotiation::Rejected => return Outcome::RejectedByTarget,
        };
        self.negotiated = Some(action);

        // Transfer.
        let payload = match transferable.payload_for(&flavor) {
            Ok(p) => p,
            Err(_) => return Outcome::TransferFailed,
        };
        match self.targets.receive_drop(&target, payload, action) {
            Receipt::Accepted { transferred } => {
                if action == Action::Move {
                    self.pending_move = Some(transferred);
                }
                Outcome::Completed(action)
            }
            Receipt::Refused => Outcome::TransferFailed,
            Receipt::Cancelled => Outcome::CancelledByUser,
        }
    }

    /// Second phase of a move: tells the source to delete what the target
    /// confirmed. Only legal right after a successful move drop, which
    /// [`perform_drop`](Self::perform_drop) already takes care of.
    pub fn complete_move(&mut self) -> Result<(), EngineError> {
        let ids = match (&self.phase, self.negotiated, self.pending_move.take()) {
            (DragPhase::Done(Outcome::Completed(Action::Move)), Some(Action::Move), Some(ids)) => {
                ids
            }
            _ => return Err(violation("complete_move without a confirmed move")),
        };
        self.source.complete_move(&ids);
        Ok(())
    }

    fn finish(&mut self, outcome: Outcome, feedback: &mut Vec<FeedbackSignal>) {
        self.unhighlight(feedback);
        self.phase = DragPhase::Done(outcome);
        self.hover = None;
        if !outcome.is_success() {
            self.transferable = None;
            self.negotiated = None;
            self.pending_move = None;
        }
        self.source.drag_done(outcome.is_success());
        if outcome == Outcome::Completed(Action::Move) {
            self.complete_move().expect("move confirmed");
        }
    }
}
