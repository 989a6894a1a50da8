use std::fmt;

use serde::{Deserialize, Serialize};

use crate::action::Action;

/// Drag-over cursor shapes. The four non-default shapes are the rows of the
/// classic copy/move accept/no-drop cursor table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CursorShape {
    CopyAccept,
    CopyNoDrop,
    MoveAccept,
    MoveNoDrop,
    Default,
}

impl CursorShape {
    pub fn is_no_drop(self) -> bool {
        matches!(self, CursorShape::CopyNoDrop | CursorShape::MoveNoDrop)
    }
}

impl fmt::Display for CursorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Cursor for a pending action over a target that does or does not accept it.
pub fn cursor_for(action: Action, target_willing: bool) -> CursorShape {
    match (action, target_willing) {
        (Action::Copy, true) => CursorShape::CopyAccept,
        (Action::Copy, false) => CursorShape::CopyNoDrop,
        (Action::Move, true) => CursorShape::MoveAccept,
        (Action::Move, false) => CursorShape::MoveNoDrop,
    }
}

/// Feedback emitted to the presentation layer: drag-over (cursor) and
/// drag-under (target highlight).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum FeedbackSignal {
    Cursor {
        shape: CursorShape,
    },
    #[serde(rename_all = "camelCase")]
    Highlight {
        target: String,
        on: bool,
    },
}

impl FeedbackSignal {
    pub fn cursor(shape: CursorShape) -> Self {
        FeedbackSignal::Cursor { shape }
    }

    pub fn highlight(target: impl Into<String>, on: bool) -> Self {
        FeedbackSignal::Highlight {
            target: target.into(),
            on,
        }
    }
}

impl fmt::Display for FeedbackSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeedbackSignal::Cursor { shape } => write!(f, "cursor {shape}"),
            FeedbackSignal::Highlight { target, on } => {
                write!(f, "highlight {target} {}", if *on { "on" } else { "off" })
            }
        }
    }
}
