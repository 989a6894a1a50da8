use std::collections::BTreeMap;

use crate::action::{Action, ActionSet};
use crate::ids::NodeId;
use crate::transfer::{DataFlavor, Payload, Transferable};

use super::session::Point;

/// Identifies a drop target within one [`DropTargets`] host.
pub type TargetId = String;

/// Where a drag gesture began.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub position: Point,
    pub node: String,
}

/// Operations a drag-enabled host supplies.
pub trait DragSource: Send {
    /// Gate for starting a drag at `origin`. Not every node can be dragged.
    fn is_start_drag_ok(&self, origin: &Origin) -> bool;

    /// The data being dragged. `None` aborts the gesture as if the start
    /// check had failed.
    fn transferable(&mut self) -> Option<Box<dyn Transferable>>;

    fn source_actions(&self) -> ActionSet;

    /// Removes the moved data from the source. Called by the engine only,
    /// after the destination confirmed receipt of the `transferred` items.
    fn complete_move(&mut self, transferred: &[NodeId]);

    /// Drop completion notice, delivered exactly once per finished session.
    fn drag_done(&mut self, success: bool);
}

/// Result of handing a payload to a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Receipt {
    /// Transfer succeeded; lists the source identities that arrived.
    Accepted { transferred: Vec<NodeId> },
    /// Transfer failed; the source must keep its data.
    Refused,
    /// The user aborted the transfer part way.
    Cancelled,
}

/// A single drop-enabled component.
pub trait DropTarget: Send {
    fn preferred_flavors(&self) -> Vec<DataFlavor>;

    /// The action this target would take for a drag offering `offered`, or
    /// `None` if it would not accept. Must not have side effects.
    fn is_drag_ok(&self, position: Point, offered: ActionSet) -> Option<Action>;

    fn receive_drop(&mut self, payload: Payload, action: Action) -> Receipt;
}

/// All drop targets reachable from one drag session.
pub trait DropTargets: Send {
    /// The registered target owning `node`, if any.
    fn resolve(&self, node: &str) -> Option<TargetId>;

    /// Whether `target` lives outside the source's process. Remote targets
    /// are only ever handed byte-stream flavors.
    fn is_remote(&self, _target: &str) -> bool {
        false
    }

    fn preferred_flavors(&self, target: &str) -> Vec<DataFlavor>;

    fn is_drag_ok(&self, target: &str, position: Point, offered: ActionSet) -> Option<Action>;

    fn receive_drop(&mut self, target: &str, payload: Payload, action: Action) -> Receipt;
}

/// A plain registry of [`DropTarget`]s keyed by target id. Each target owns
/// its own id as a node; further nodes can be assigned to it.
#[derive(Default)]
pub struct TargetTable {
    targets: BTreeMap<TargetId, Box<dyn DropTarget>>,
    owners: BTreeMap<String, TargetId>,
}

impl TargetTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, id: impl Into<TargetId>, target: Box<dyn DropTarget>) {
        let id = id.into();
        self.owners.insert(id.clone(), id.clone());
        self.targets.insert(id, target);
    }

    /// Makes `node` part of target `id` for hit resolution.
    pub fn assign(&mut self, node: impl Into<String>, id: impl Into<TargetId>) {
        self.owners.insert(node.into(), id.into());
    }

    pub fn get(&self, id: &str) -> Option<&dyn DropTarget> {
        self.targets.get(id).map(|t| t.as_ref())
    }
}

impl DropTargets for TargetTable {
    fn resolve(&self, node: &str) -> Option<TargetId> {
        self.owners
            .get(node)
            .filter(|t| self.targets.contains_key(*t))
            .cloned()
    }

    fn preferred_flavors(&self, target: &str) -> Vec<DataFlavor> {
        self.targets
            .get(target)
            .map(|t| t.preferred_flavors())
            .unwrap_or_default()
    }

    fn is_drag_ok(&self, target: &str, position: Point, offered: ActionSet) -> Option<Action> {
        self.targets.get(target)?.is_drag_ok(position, offered)
    }

    fn receive_drop(&mut self, target: &str, payload: Payload, action: Action) -> Receipt {
        match self.targets.get_mut(target) {
            Some(t) => t.receive_drop(payload, action),
            None => Receipt::Refused,
        }
    }
}
