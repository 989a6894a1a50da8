//! Glue that lets a [`RepoTree`] act as drag source and drop target host.

use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use crate::action::{Action, ActionSet};
use crate::engine::{DragSource, DropTargets, Origin, Point, Receipt, TargetId};
use crate::ids::NodeId;
use crate::repository::{ImportPolicy, ImportReport, RepoError, RepoTree};
use crate::transfer::{DataFlavor, Payload, Transferable, COMPONENT_MEDIA_TYPE, FOLDER_MEDIA_TYPE};

/// A repository shared between sessions: many readers or one writer.
pub type SharedRepo = Arc<RwLock<RepoTree>>;

pub fn share(tree: RepoTree) -> SharedRepo {
    Arc::new(RwLock::new(tree))
}

fn read(repo: &SharedRepo) -> RwLockReadGuard<'_, RepoTree> {
    repo.read().unwrap_or_else(|e| e.into_inner())
}

fn write(repo: &SharedRepo) -> RwLockWriteGuard<'_, RepoTree> {
    repo.write().unwrap_or_else(|e| e.into_inner())
}

/// How node names in pointer events map to repository nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Addressing {
    /// Decimal node ids, as used over HTTP.
    Id,
    /// Slash-separated name paths, as used in trace files.
    Path,
}

impl Addressing {
    pub fn resolve(self, tree: &RepoTree, node: &str) -> Option<NodeId> {
        match self {
            Addressing::Id => node.parse().ok().filter(|id| tree.contains(*id)),
            Addressing::Path => tree.resolve_path(node),
        }
    }

    pub fn name(self, tree: &RepoTree, id: NodeId) -> String {
        match self {
            Addressing::Id => id.to_string(),
            Addressing::Path => tree.path_of(id).unwrap_or_else(|| id.to_string()),
        }
    }
}

/// Drag source over a selection of repository nodes.
pub struct RepoSource {
    repo: SharedRepo,
    selection: Vec<NodeId>,
    actions: ActionSet,
    done: Vec<bool>,
    removed: Vec<NodeId>,
    move_error: Option<RepoError>,
}

impl RepoSource {
    pub fn new(repo: SharedRepo, selection: Vec<NodeId>, actions: ActionSet) -> Self {
        RepoSource {
            repo,
            selection,
            actions,
            done: Vec::new(),
            removed: Vec::new(),
            move_error: None,
        }
    }

    pub fn selection(&self) -> &[NodeId] {
        &self.selection
    }

    /// Every `drag_done` notification received, in order.
    pub fn done_notices(&self) -> &[bool] {
        &self.done
    }

    /// Source nodes deleted by the second phase of a move.
    pub fn removed(&self) -> &[NodeId] {
        &self.removed
    }

    pub fn move_error(&self) -> Option<&RepoError> {
        self.move_error.as_ref()
    }
}

impl DragSource for RepoSource {
    fn is_start_drag_ok(&self, _origin: &Origin) -> bool {
        read(&self.repo).check_draggable(&self.selection).is_ok()
    }

    fn transferable(&mut self) -> Option<Box<dyn Transferable>> {
        let t = read(&self.repo).export_selection(&self.selection).ok()?;
        Some(Box::new(t))
    }

    fn source_actions(&self) -> ActionSet {
        self.actions
    }

    fn complete_move(&mut self, transferred: &[NodeId]) {
        let mut tree = write(&self.repo);
        // Only nodes that were part of the dragged selection may go.
        let ids: Vec<NodeId> = transferred
            .iter()
            .copied()
            .filter(|id| self.selection.iter().any(|s| tree.is_within(*id, *s)))
            .collect();
        match tree.remove_after_move(&ids) {
            Ok(_) => self.removed.extend(ids),
            Err(e) => self.move_error = Some(e),
        }
    }

    fn drag_done(&mut self, success: bool) {
        self.done.push(success);
    }
}

/// Every folder of a repository as a drop target.
pub struct RepoTargets {
    repo: SharedRepo,
    addressing: Addressing,
    policy: ImportPolicy,
    requested: Option<Action>,
    dragged: Vec<NodeId>,
    last_report: Option<ImportReport>,
}

impl RepoTargets {
    pub fn new(repo: SharedRepo, addressing: Addressing) -> Self {
        RepoTargets {
            repo,
            addressing,
            policy: ImportPolicy::default(),
            requested: None,
            dragged: Vec::new(),
            last_report: None,
        }
    }

    pub fn with_policy(mut self, policy: ImportPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Nodes being dragged. Dropping them into their own folder or into
    /// their own subtree is refused.
    pub fn with_dragged(mut self, dragged: Vec<NodeId>) -> Self {
        self.dragged = dragged;
        self
    }

    /// Fixes the action targets ask for. Without one they ask for the
    /// source's primary action.
    pub fn request(&mut self, action: Option<Action>) {
        self.requested = action;
    }

    pub fn requested(&self) -> Option<Action> {
        self.requested
    }

    pub fn last_report(&self) -> Option<&ImportReport> {
        self.last_report.as_ref()
    }

    pub fn folder_of(&self, target: &str) -> Option<NodeId> {
        let tree = read(&self.repo);
        self.addressing
            .resolve(&tree, target)
            .filter(|id| tree.is_folder(*id))
    }
}

pub fn repo_preferred_flavors() -> Vec<DataFlavor> {
    vec![
        DataFlavor::local(COMPONENT_MEDIA_TYPE),
        DataFlavor::local(FOLDER_MEDIA_TYPE),
        DataFlavor::stream(COMPONENT_MEDIA_TYPE),
        DataFlavor::stream(FOLDER_MEDIA_TYPE),
    ]
}

impl DropTargets for RepoTargets {
    fn resolve(&self, node: &str) -> Option<TargetId> {
        let tree = read(&self.repo);
        let id = self.addressing.resolve(&tree, node)?;
        tree.is_folder(id).then(|| self.addressing.name(&tree, id))
    }

    fn preferred_flavors(&self, _target: &str) -> Vec<DataFlavor> {
        repo_preferred_flavors()
    }

    fn is_drag_ok(&self, target: &str, _position: Point, offered: ActionSet) -> Option<Action> {
        let tree = read(&self.repo);
        let folder = self
            .addressing
            .resolve(&tree, target)
            .filter(|id| tree.is_folder(*id))?;
        let pointless = self
            .dragged
            .iter()
            .any(|d| tree.parent_of(*d) == Some(folder) || tree.is_within(folder, *d));
        if pointless {
            return None;
        }
        self.requested.or(offered.primary())
    }

    fn receive_drop(&mut self, target: &str, payload: Payload, action: Action) -> Receipt {
        let Some(folder) = self.folder_of(target) else {
            return Receipt::Refused;
        };
        let Ok(items) = payload.into_items() else {
            return Receipt::Refused;
        };
        let report = write(&self.repo).import_drop(folder, items, action, &mut self.policy);
        match report {
            Ok(report) => {
                let receipt = if report.cancelled {
                    Receipt::Cancelled
                } else {
                    Receipt::Accepted {
                        transferred: report.transferred.clone(),
                    }
                };
                self.last_report = Some(report);
                receipt
            }
            Err(_) => Receipt::Refused,
        }
    }
}
