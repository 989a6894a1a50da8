//! Drag-and-drop protocol engine and reusable-component repository.
//!
//! - [`engine`]: the drag session state machine, its ports and the drop
//!   protocol (validation, acceptance, transfer, two-phase move).
//! - [`action`] and [`feedback`]: transfer actions, negotiation and the
//!   cursor/highlight signals shown while dragging.
//! - [`transfer`]: data flavors, transferables and the byte-stream envelope.
//! - [`repository`]: the persistent component tree and its drop-import rules.
//! - [`adapters`]: a repository acting as drag source and drop targets.

pub mod action;
pub mod adapters;
pub mod clock;
pub mod engine;
pub mod feedback;
pub mod ids;
pub mod record;
pub mod repository;
pub mod transfer;

pub use action::{negotiate_action, Action, ActionSet, Negotiation};
pub use feedback::{cursor_for, CursorShape, FeedbackSignal};
pub use ids::NodeId;
pub use record::ComponentRecord;
