use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::clock::{Clock, SystemClock};
use crate::ids::NodeId;
use crate::record::{is_valid_name, ComponentRecord};
use crate::transfer::{FolderBundle, RecordTransferable, TransferItem};

use super::RepoError;

pub(super) const ROOT_NAME: &str = "/";

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct Folder {
    pub(super) name: String,
    pub(super) parent: Option<NodeId>,
    pub(super) children: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct Stored {
    pub(super) record: ComponentRecord,
    pub(super) parent: NodeId,
}

/// Borrowed view of a folder.
#[derive(Clone, Copy, Debug)]
pub struct FolderView<'a> {
    pub id: NodeId,
    pub name: &'a str,
    pub parent: Option<NodeId>,
    pub children: &'a [NodeId],
}

#[derive(Clone, Copy, Debug)]
pub enum Node<'a> {
    Folder(FolderView<'a>),
    Component(&'a ComponentRecord),
}

impl Node<'_> {
    pub fn id(&self) -> NodeId {
        match self {
            Node::Folder(f) => f.id,
            Node::Component(c) => c.id,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Node::Folder(f) => f.name,
            Node::Component(c) => &c.name,
        }
    }
}

/// The repository: a rooted tree of folders whose leaves are components.
///
/// Invariants: the folder graph is a tree rooted at [`NodeId::ROOT`]; every
/// component sits in exactly one folder; names are unique among the children
/// of a folder (folders and components share that namespace).
pub struct RepoTree {
    pub(super) folders: BTreeMap<NodeId, Folder>,
    pub(super) components: BTreeMap<NodeId, Stored>,
    pub(super) next_id: u64,
    clock: Arc<dyn Clock>,
}

impl Default for RepoTree {
    fn default() -> Self {
        Self::new()
    }
}

impl Clone for RepoTree {
    fn clone(&self) -> Self {
        RepoTree {
            folders: self.folders.clone(),
            components: self.components.clone(),
            next_id: self.next_id,
            clock: self.clock.clone(),
        }
    }
}

/// Structural equality: ids, names, flags, payloads, tree shape and order.
/// The clock is not part of the structure.
impl PartialEq for RepoTree {
    fn eq(&self, other: &Self) -> bool {
        self.folders == other.folders
            && self.components == other.components
            && self.next_id == other.next_id
    }
}

impl Eq for RepoTree {}

impl fmt::Debug for RepoTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepoTree")
            .field("folders", &self.folders)
            .field("components", &self.components)
            .field("next_id", &self.next_id)
            .finish()
    }
}

impl RepoTree {
    pub fn new() -> Self {
        Self::with_clock(Arc::new(SystemClock))
    }

    pub fn with_clock(clock: Arc<dyn Clock>) -> Self {
        let mut folders = BTreeMap::new();
        folders.insert(
            NodeId::ROOT,
            Folder {
                name: ROOT_NAME.to_string(),
                parent: None,
                children: Vec::new(),
            },
        );
        RepoTree {
            folders,
            components: BTreeMap::new(),
            next_id: 1,
            clock,
        }
    }

    pub fn set_clock(&mut self, clock: Arc<dyn Clock>) {
        self.clock = clock;
    }

    pub fn now_ms(&self) -> u64 {
        self.clock.now_ms()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn folder_count(&self) -> usize {
        self.folders.len()
    }

    pub fn component(&self, id: NodeId) -> Option<&ComponentRecord> {
        self.components.get(&id).map(|s| &s.record)
    }

    pub fn components(&self) -> impl Iterator<Item = &ComponentRecord> {
        self.components.values().map(|s| &s.record)
    }

    pub fn folder(&self, id: NodeId) -> Option<FolderView<'_>> {
        self.folders.get(&id).map(|f| FolderView {
            id,
            name: &f.name,
            parent: f.parent,
            children: &f.children,
        })
    }

    pub fn is_folder(&self, id: NodeId) -> bool {
        self.folders.contains_key(&id)
    }

    pub fn node(&self, id: NodeId) -> Option<Node<'_>> {
        if let Some(f) = self.folder(id) {
            return Some(Node::Folder(f));
        }
        self.component(id).map(Node::Component)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.folders.contains_key(&id) || self.components.contains_key(&id)
    }

    pub fn parent_of(&self, id: NodeId) -> Option<NodeId> {
        if let Some(f) = self.folders.get(&id) {
            return f.parent;
        }
        self.components.get(&id).map(|s| s.parent)
    }

    fn name_of(&self, id: NodeId) -> Option<&str> {
        self.node(id).map(|n| match n {
            Node::Folder(f) => f.name,
            Node::Component(c) => c.name.as_str(),
        })
    }

    pub fn child_named(&self, folder: NodeId, name: &str) -> Option<NodeId> {
        let f = self.folders.get(&folder)?;
        f.children
            .iter()
            .copied()
            .find(|c| self.name_of(*c) == Some(name))
    }

    /// True when `id` is `ancestor` or lies beneath it.
    pub fn is_within(&self, id: NodeId, ancestor: NodeId) -> bool {
        let mut cur = Some(id);
        while let Some(c) = cur {
            if c == ancestor {
                return true;
            }
            cur = self.parent_of(c);
        }
        false
    }

    /// Resolves a slash-separated name path. `/` and the empty path are the
    /// root; a leading slash is optional.
    pub fn resolve_path(&self, path: &str) -> Option<NodeId> {
        let mut cur = NodeId::ROOT;
        for part in path.split('/').filter(|p| !p.is_empty()) {
            if !self.is_folder(cur) {
                return None;
            }
            cur = self.child_named(cur, part)?;
        }
        Some(cur)
    }

    pub fn path_of(&self, id: NodeId) -> Option<String> {
        if !self.contains(id) {
            return None;
        }
        let mut parts = Vec::new();
        let mut cur = id;
        while !cur.is_root() {
            parts.push(self.name_of(cur)?);
            cur = self.parent_of(cur)?;
        }
        parts.reverse();
        Some(format!("/{}", parts.join("/")))
    }

    /// Nodes in depth-first pre-order with their depth, root first.
    pub fn walk(&self) -> Vec<(usize, NodeId)> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, NodeId::ROOT)];
        while let Some((depth, id)) = stack.pop() {
            out.push((depth, id));
            if let Some(f) = self.folders.get(&id) {
                for child in f.children.iter().rev() {
                    stack.push((depth + 1, *child));
                }
            }
        }
        out
    }

    pub(super) fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    /// Uses `wanted` when it is free and not the root, otherwise allocates.
    pub(super) fn claim_id(&mut self, wanted: NodeId) -> NodeId {
        if wanted.is_root() || self.contains(wanted) {
            return self.fresh_id();
        }
        self.next_id = self.next_id.max(wanted.0.saturating_add(1));
        wanted
    }

    fn check_insert(&self, folder: NodeId, name: &str) -> Result<(), RepoError> {
        if !self.is_folder(folder) {
            return Err(RepoError::UnknownFolder(folder));
        }
        if !is_valid_name(name) {
            return Err(RepoError::InvalidName(name.to_string()));
        }
        if self.child_named(folder, name).is_some() {
            return Err(RepoError::NameConflict(name.to_string()));
        }
        Ok(())
    }

    pub fn add_folder(&mut self, parent: NodeId, name: &str) -> Result<NodeId, RepoError> {
        let id = self.fresh_id();
        self.insert_folder(parent, name, id)
    }

    pub(super) fn insert_folder(
        &mut self,
        parent: NodeId,
        name: &str,
        id: NodeId,
    ) -> Result<NodeId, RepoError> {
        self.check_insert(parent, name)?;
        self.folders.insert(
            id,
            Folder {
                name: name.to_string(),
                parent: Some(parent),
                children: Vec::new(),
            },
        );
        self.folders.get_mut(&parent).unwrap().children.push(id);
        Ok(id)
    }

    /// Adds a component to `folder`. The record's id is kept when it is free
    /// in this tree; otherwise a fresh one is assigned. Returns the id used.
    pub fn add_component(
        &mut self,
        folder: NodeId,
        mut record: ComponentRecord,
    ) -> Result<NodeId, RepoError> {
        self.check_insert(folder, &record.name)?;
        if record.modified_at_ms < record.created_at_ms {
            return Err(RepoError::MalformedInput(format!(
                "{:?} modified before it was created",
                record.name
            )));
        }
        let id = self.claim_id(record.id);
        record.id = id;
        self.components.insert(
            id,
            Stored {
                record,
                parent: folder,
            },
        );
        self.folders.get_mut(&folder).unwrap().children.push(id);
        Ok(id)
    }

    pub fn rename_component(&mut self, id: NodeId, new_name: &str) -> Result<(), RepoError> {
        let stored = self
            .components
            .get(&id)
            .ok_or(RepoError::UnknownComponent(id))?;
        if !is_valid_name(new_name) {
            return Err(RepoError::InvalidName(new_name.to_string()));
        }
        if stored.record.name == new_name {
            return Ok(());
        }
        if self.child_named(stored.parent, new_name).is_some() {
            return Err(RepoError::NameConflict(new_name.to_string()));
        }
        let now = self.clock.now_ms();
        let record = &mut self.components.get_mut(&id).unwrap().record;
        record.name = new_name.to_string();
        record.modified_at_ms = record.modified_at_ms.max(now);
        Ok(())
    }

    pub fn set_dnd_enabled(&mut self, id: NodeId, enabled: bool) -> Result<(), RepoError> {
        let stored = self
            .components
            .get_mut(&id)
            .ok_or(RepoError::UnknownComponent(id))?;
        stored.record.dnd_enabled = enabled;
        Ok(())
    }

    /// Deletes one component outright.
    pub fn remove_component(&mut self, id: NodeId) -> Result<ComponentRecord, RepoError> {
        let stored = self
            .components
            .remove(&id)
            .ok_or(RepoError::UnknownComponent(id))?;
        self.folders
            .get_mut(&stored.parent)
            .expect("component parent exists")
            .children
            .retain(|c| *c != id);
        Ok(stored.record)
    }

    /// Snapshot of one node as a transfer item. Folders become bundles of
    /// their whole subtree.
    pub fn snapshot(&self, id: NodeId) -> Option<TransferItem> {
        if let Some(r) = self.component(id) {
            return Some(TransferItem::Component(r.clone()));
        }
        let f = self.folders.get(&id)?;
        Some(TransferItem::Folder(FolderBundle {
            id,
            name: f.name.clone(),
            children: f
                .children
                .iter()
                .map(|c| self.snapshot(*c).expect("child exists"))
                .collect(),
        }))
    }

    /// First component under `id` (inclusive) with drag disabled.
    fn first_disabled(&self, id: NodeId) -> Option<NodeId> {
        if let Some(r) = self.component(id) {
            return (!r.dnd_enabled).then_some(r.id);
        }
        self.folders
            .get(&id)?
            .children
            .iter()
            .find_map(|c| self.first_disabled(*c))
    }

    /// Checks that every selected node exists and may be dragged.
    pub fn check_draggable(&self, selected: &[NodeId]) -> Result<(), RepoError> {
        if selected.is_empty() {
            return Err(RepoError::EmptySelection);
        }
        for id in selected {
            if id.is_root() {
                return Err(RepoError::DragDisabled(*id));
            }
            if !self.contains(*id) {
                return Err(RepoError::UnknownComponent(*id));
            }
            if let Some(d) = self.first_disabled(*id) {
                return Err(RepoError::DragDisabled(d));
            }
        }
        Ok(())
    }

    /// Builds a transferable for the selected nodes, in selection order.
    pub fn export_selection(&self, selected: &[NodeId]) -> Result<RecordTransferable, RepoError> {
        self.check_draggable(selected)?;
        let items = selected
            .iter()
            .map(|id| self.snapshot(*id).expect("checked above"))
            .collect();
        Ok(RecordTransferable::new(items))
    }

    /// Second half of a move: drops the listed source nodes. Components are
    /// removed; listed folders are pruned afterwards, deepest first, and only
    /// once empty. Validates every id before touching anything.
    pub fn remove_after_move(&mut self, ids: &[NodeId]) -> Result<usize, RepoError> {
        for id in ids {
            if id.is_root() {
                return Err(RepoError::MalformedInput("the root cannot be moved".into()));
            }
            if !self.contains(*id) {
                return Err(RepoError::UnknownComponent(*id));
            }
        }
        let mut removed = 0;
        let mut folders = Vec::new();
        for id in ids {
            if self.components.contains_key(id) {
                self.remove_component(*id)?;
                removed += 1;
            } else if self.folders.contains_key(id) {
                folders.push(*id);
            }
        }
        folders.sort_by_key(|f| std::cmp::Reverse(self.depth(*f)));
        folders.dedup();
        for f in folders {
            let empty = self.folders.get(&f).is_some_and(|x| x.children.is_empty());
            if empty {
                let parent = self.folders.remove(&f).unwrap().parent.unwrap();
                self.folders
                    .get_mut(&parent)
                    .unwrap()
                    .children
                    .retain(|c| *c != f);
            }
        }
        Ok(removed)
    }

    fn depth(&self, id: NodeId) -> usize {
        let mut d = 0;
        let mut cur = self.parent_of(id);
        while let Some(p) = cur {
            d += 1;
            cur = self.parent_of(p);
        }
        d
    }

    /// Verifies every structural invariant. Returns a description of the
    /// first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let root = self.folders.get(&NodeId::ROOT).ok_or("root missing")?;
        if root.parent.is_some() {
            return Err("root has a parent".into());
        }
        let mut seen = HashSet::new();
        let mut stack = vec![NodeId::ROOT];
        while let Some(fid) = stack.pop() {
            if !seen.insert(fid) {
                return Err(format!("folder {fid} reachable twice"));
            }
            let folder = &self.folders[&fid];
            let mut names = HashSet::new();
            for child in &folder.children {
                if let Some(sub) = self.folders.get(child) {
                    if sub.parent != Some(fid) {
                        return Err(format!("folder {child} has wrong parent"));
                    }
                    if !is_valid_name(&sub.name) {
                        return Err(format!("folder {child} has invalid name"));
                    }
                    if !names.insert(sub.name.as_str()) {
                        return Err(format!("duplicate name {:?} in folder {fid}", sub.name));
                    }
                    stack.push(*child);
                } else if let Some(c) = self.components.get(child) {
                    if c.parent != fid || c.record.id != *child {
                        return Err(format!("component {child} misfiled"));
                    }
                    if !c.record.is_valid() {
                        return Err(format!("component {child} is invalid"));
                    }
                    if !names.insert(c.record.name.as_str()) {
                        return Err(format!(
                            "duplicate name {:?} in folder {fid}",
                            c.record.name
                        ));
                    }
                    if !seen.insert(*child) {
                        return Err(format!("component {child} listed twice"));
                    }
                } else {
                    return Err(format!("dangling child {child} in folder {fid}"));
                }
            }
        }
        let reachable = seen.len();
        if reachable != self.folders.len() + self.components.len() {
            return Err("unreachable nodes present".into());
        }
        if self.folders.keys().any(|k| self.components.contains_key(k)) {
            return Err("folder and component share an id".into());
        }
        let max_id = self
            .folders
            .keys()
            .chain(self.components.keys())
            .map(|k| k.0)
            .max()
            .unwrap_or(0);
        if self.next_id <= max_id {
            return Err(format!("next id {} not above {max_id}", self.next_id));
        }
        Ok(())
    }
}
