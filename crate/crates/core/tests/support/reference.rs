//! Hand-enumerated reference transition table and an exhaustive checker that
//! drives the real engine against it.
//!
//! The table is written out row by row, independently of the engine code.
//! Alphabet: Press (over the drag source), MoveIn (past the threshold, over
//! the target), MoveOut (past the threshold, over nothing), Release, Cancel.
//! Context: whether the source allows the drag, whether the target is
//! willing, and which actions the source offers. A release over the target
//! is followed immediately by the drop, as the CLI does, so the table folds
//! the drop result into that row.

use dragrepo_core::engine::{
    DragPhase, DragSession, EngineError, Outcome, PointerEvent, Receipt, TargetTable,
};
use dragrepo_core::{Action, ActionSet, CursorShape, FeedbackSignal, NodeId};

use super::{MockSource, MockTarget};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sym {
    Press,
    MoveIn,
    MoveOut,
    Release,
    Cancel,
}

pub const ALPHABET: [Sym; 5] = [
    Sym::Press,
    Sym::MoveIn,
    Sym::MoveOut,
    Sym::Release,
    Sym::Cancel,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ctx {
    pub draggable: bool,
    pub willing: bool,
    pub move_offered: bool,
}

pub fn contexts() -> Vec<Ctx> {
    let mut out = Vec::new();
    for draggable in [false, true] {
        for willing in [false, true] {
            for move_offered in [false, true] {
                out.push(Ctx {
                    draggable,
                    willing,
                    move_offered,
                });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefPhase {
    Idle,
    Armed,
    Dragging,
    Over,
    Done(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefSignal {
    Cursor(CursorShape),
    HighlightOn,
    HighlightOff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefError {
    SessionClosed,
    ProtocolViolation,
}

pub type RefResult = Result<(RefPhase, Vec<RefSignal>), RefError>;

/// Source {Copy} shows Copy cursors; {Copy, Move} shows Move cursors.
fn no_drop(c: Ctx) -> CursorShape {
    if c.move_offered {
        CursorShape::MoveNoDrop
    } else {
        CursorShape::CopyNoDrop
    }
}

fn accept(c: Ctx) -> CursorShape {
    if c.move_offered {
        CursorShape::MoveAccept
    } else {
        CursorShape::CopyAccept
    }
}

fn completed(c: Ctx) -> &'static str {
    if c.move_offered {
        "Completed(Move)"
    } else {
        "Completed(Copy)"
    }
}

/// The reference table. `highlight` is whether a drag-under highlight is
/// currently shown, which in this alphabet equals "over a willing target".
pub fn reference_step(p: RefPhase, s: Sym, c: Ctx) -> RefResult {
    use RefPhase::*;
    use RefSignal::*;
    use Sym::*;
    let hl = c.willing;
    match (p, s) {
        (Done(_), _) => Err(RefError::SessionClosed),

        (Idle, Press) => Ok((Armed, vec![])),
        (Idle, MoveIn) => Ok((Idle, vec![])),
        (Idle, MoveOut) => Ok((Idle, vec![])),
        (Idle, Release) => Ok((Idle, vec![])),
        (Idle, Cancel) => Ok((Done("CancelledByUser"), vec![])),

        (Armed, Press) => Err(RefError::ProtocolViolation),
        (Armed, MoveIn) | (Armed, MoveOut) => {
            if c.draggable {
                Ok((Dragging, vec![Cursor(no_drop(c))]))
            } else {
                Ok((Idle, vec![]))
            }
        }
        (Armed, Release) => Ok((Idle, vec![])),
        (Armed, Cancel) => Ok((Done("CancelledByUser"), vec![])),

        (Dragging, Press) => Err(RefError::ProtocolViolation),
        (Dragging, MoveIn) => {
            if c.willing {
                Ok((Over, vec![Cursor(accept(c)), HighlightOn]))
            } else {
                Ok((Over, vec![Cursor(no_drop(c))]))
            }
        }
        (Dragging, MoveOut) => Ok((Dragging, vec![])),
        (Dragging, Release) => Ok((Done("CancelledNoTarget"), vec![])),
        (Dragging, Cancel) => Ok((Done("CancelledByUser"), vec![])),

        (Over, Press) => Err(RefError::ProtocolViolation),
        (Over, MoveIn) => Ok((Over, vec![])),
        (Over, MoveOut) => {
            if hl {
                Ok((Dragging, vec![Cursor(no_drop(c)), HighlightOff]))
            } else {
                Ok((Dragging, vec![Cursor(no_drop(c))]))
            }
        }
        (Over, Release) => {
            if c.willing {
                Ok((Done(completed(c)), vec![HighlightOff]))
            } else {
                Ok((Done("RejectedByTarget"), vec![]))
            }
        }
        (Over, Cancel) => {
            if hl {
                Ok((Done("CancelledByUser"), vec![HighlightOff]))
            } else {
                Ok((Done("CancelledByUser"), vec![]))
            }
        }
    }
}

type Session = DragSession<MockSource, TargetTable>;

pub fn new_session(c: Ctx) -> Session {
    let actions = if c.move_offered {
        ActionSet::COPY_OR_MOVE
    } else {
        ActionSet::COPY
    };
    let source = MockSource::new(c.draggable, actions);
    let choice = if c.willing { actions.primary() } else { None };
    let target = MockTarget::new(choice).with_receipt(Receipt::Accepted {
        transferred: vec![NodeId(1)],
    });
    let mut table = TargetTable::new();
    table.register("T", Box::new(target));
    DragSession::new("ref", source, table, true)
}

fn event(s: Sym, t: u64) -> PointerEvent {
    match s {
        Sym::Press => PointerEvent::press(0, 0, t, Some("src")),
        Sym::MoveIn => PointerEvent::moved(20, 0, t, Some("T")),
        Sym::MoveOut => PointerEvent::moved(40, 0, t, None),
        Sym::Release => PointerEvent::release(20, 0, t, None),
        Sym::Cancel => PointerEvent::cancel(t),
    }
}

fn abstract_phase(p: &DragPhase) -> RefPhase {
    match p {
        DragPhase::Idle => RefPhase::Idle,
        DragPhase::Armed { .. } => RefPhase::Armed,
        DragPhase::Dragging => RefPhase::Dragging,
        DragPhase::OverTarget(_) => RefPhase::Over,
        DragPhase::Dropping => panic!("Dropping is folded into the release row"),
        DragPhase::Done(o) => RefPhase::Done(match o {
            Outcome::Completed(Action::Copy) => "Completed(Copy)",
            Outcome::Completed(Action::Move) => "Completed(Move)",
            Outcome::RejectedByTarget => "RejectedByTarget",
            Outcome::CancelledNoTarget => "CancelledNoTarget",
            Outcome::CancelledByUser => "CancelledByUser",
            Outcome::TransferFailed => "TransferFailed",
        }),
    }
}

fn abstract_signal(s: &FeedbackSignal) -> RefSignal {
    match s {
        FeedbackSignal::Cursor { shape } => RefSignal::Cursor(*shape),
        FeedbackSignal::Highlight { on: true, .. } => RefSignal::HighlightOn,
        FeedbackSignal::Highlight { on: false, .. } => RefSignal::HighlightOff,
    }
}

/// Feeds one symbol to the engine, running the drop when the engine enters
/// `Dropping`.
pub fn engine_step(session: &mut Session, s: Sym, t: u64) -> RefResult {
    let step = session
        .handle_pointer_event(&event(s, t))
        .map_err(|e| match e {
            EngineError::SessionClosed => RefError::SessionClosed,
            EngineError::ProtocolViolation(_) => RefError::ProtocolViolation,
        })?;
    let mut signals: Vec<RefSignal> = step.feedback.iter().map(abstract_signal).collect();
    if step.phase == DragPhase::Dropping {
        let drop = session
            .perform_drop()
            .expect("dropping session accepts the drop");
        signals.extend(drop.feedback.iter().map(abstract_signal));
    }
    Ok((abstract_phase(session.phase()), signals))
}

#[derive(Debug, Default)]
pub struct Tally {
    pub sequences: usize,
    pub steps: usize,
    pub disagreements: Vec<String>,
    pub invariant_failures: Vec<String>,
}

/// Checks invariants that must hold after any prefix.
fn check_invariants(session: &Session, signals: &[RefSignal], seq: &[Sym], c: Ctx) -> Vec<String> {
    let mut bad = Vec::new();
    let done = session.source().done_calls();
    match session.phase() {
        DragPhase::Done(o) => {
            let expect = format!("drag_done({})", o.is_success());
            if done != [expect.as_str()] {
                bad.push(format!("{c:?} {seq:?}: dragDone calls {done:?} for {o}"));
            }
            let on = signals
                .iter()
                .filter(|s| **s == RefSignal::HighlightOn)
                .count();
            let off = signals
                .iter()
                .filter(|s| **s == RefSignal::HighlightOff)
                .count();
            if on != off {
                bad.push(format!("{c:?} {seq:?}: {on} highlight on vs {off} off"));
            }
            let moves = session.source().count("complete_move");
            let want = usize::from(*o == Outcome::Completed(Action::Move));
            if moves != want {
                bad.push(format!("{c:?} {seq:?}: complete_move called {moves} times"));
            }
        }
        _ => {
            if !done.is_empty() {
                bad.push(format!("{c:?} {seq:?}: dragDone before the end"));
            }
        }
    }
    if let Some(first) = signals.iter().find_map(|s| match s {
        RefSignal::Cursor(c) => Some(*c),
        _ => None,
    }) {
        if !first.is_no_drop() {
            bad.push(format!(
                "{c:?} {seq:?}: first cursor {first:?} is not no-drop"
            ));
        }
    }
    if let Some(a) = session.negotiated_action() {
        if !session.source_actions().contains(a) {
            bad.push(format!("{c:?} {seq:?}: negotiated {a} not offered"));
        }
    }
    bad
}

/// Enumerates every sequence of length `max_len` (and so every shorter
/// prefix) in every context, comparing the engine with the table after each
/// event.
pub fn exhaustive(max_len: usize) -> Tally {
    let mut tally = Tally::default();
    for c in contexts() {
        // Count distinct sequences of length 0..=max_len.
        tally.sequences += (0..=max_len)
            .map(|k| ALPHABET.len().pow(k as u32))
            .sum::<usize>();
        let total = ALPHABET.len().pow(max_len as u32);
        for code in 0..total {
            let seq: Vec<Sym> = (0..max_len)
                .map(|i| ALPHABET[(code / ALPHABET.len().pow(i as u32)) % ALPHABET.len()])
                .collect();
            let mut session = new_session(c);
            let mut ref_phase = RefPhase::Idle;
            let mut all_signals = Vec::new();
            for (i, s) in seq.iter().enumerate() {
                tally.steps += 1;
                let expected = reference_step(ref_phase, *s, c);
                let got = engine_step(&mut session, *s, i as u64);
                if expected != got {
                    tally.disagreements.push(format!(
                        "{c:?} {:?}: expected {expected:?}, engine {got:?}",
                        &seq[..=i]
                    ));
                    break;
                }
                if let Ok((p, sigs)) = expected {
                    ref_phase = p;
                    all_signals.extend(sigs);
                }
                tally.invariant_failures.extend(check_invariants(
                    &session,
                    &all_signals,
                    &seq[..=i],
                    c,
                ));
            }
        }
    }
    tally
}
