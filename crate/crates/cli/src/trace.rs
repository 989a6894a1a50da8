//! Trace files: one JSON pointer event per line.
//!
//! ```text
//! {"t": 0, "ev": "press", "x": 10, "y": 10, "over": "/lib/info"}
//! {"t": 16, "ev": "move", "x": 20, "y": 10, "over": null}
//! ```
//!
//! Blank lines are ignored. Timestamps never decrease and the first record
//! is a press.

use dragrepo_core::engine::{PointerEvent, PointerKind};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    t: u64,
    ev: PointerKind,
    #[serde(default)]
    x: i32,
    #[serde(default)]
    y: i32,
    #[serde(default)]
    over: Option<String>,
}

/// A parsed event with its 1-based line number.
#[derive(Debug, Clone)]
pub struct TraceEvent {
    pub line: usize,
    pub event: PointerEvent,
}

pub fn parse(text: &str) -> Result<Vec<TraceEvent>, CliError> {
    let mut out: Vec<TraceEvent> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let bad = |message: String| CliError::Trace { line, message };
        let r: Record = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
        if out.is_empty() && r.ev != PointerKind::Press {
            return Err(bad("first record must be a press".into()));
        }
        if let Some(prev) = out.last() {
            if r.t < prev.event.timestamp_ms {
                return Err(bad(format!(
                    "t={} is earlier than t={}",
                    r.t, prev.event.timestamp_ms
                )));
            }
        }
        out.push(TraceEvent {
            line,
            event: PointerEvent::new(r.ev, r.x, r.y, r.t, r.over.as_deref()),
        });
    }
    if out.is_empty() {
        return Err(CliError::Trace {
            line: 0,
            message: "empty trace".into(),
        });
    }
    Ok(out)
}
