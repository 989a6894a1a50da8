//! The drag-and-drop lifecycle: gesture recognition, drag-over and
//! drag-under feedback, drop negotiation and the two-phase move.

mod ports;
mod session;

pub use ports::{DragSource, DropTarget, DropTargets, Origin, Receipt, TargetId, TargetTable};
pub use session::{
    DragPhase, DragSession, DropStep, EngineError, Outcome, Point, PointerEvent, PointerKind, Step,
    DRAG_THRESHOLD_PX,
};
