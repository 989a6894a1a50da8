use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::action::Action;
use crate::ids::NodeId;
use crate::record::is_valid_name;
use crate::transfer::TransferItem;

use super::tree::RepoTree;
use super::RepoError;

/// A name clash met while importing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub folder: NodeId,
    pub name: String,
    pub existing: NodeId,
    pub incoming: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConflictChoice {
    Overwrite,
    Skip,
    CancelAll,
}

type Prompt = Box<dyn FnMut(&Conflict) -> ConflictChoice + Send>;

/// How name conflicts are resolved during an import. The default never
/// overwrites.
#[derive(Default)]
pub struct ImportPolicy {
    pub overwrite_existing: bool,
    pub on_conflict: Option<Prompt>,
}

impl ImportPolicy {
    pub fn overwrite() -> Self {
        ImportPolicy {
            overwrite_existing: true,
            on_conflict: None,
        }
    }

    pub fn prompt(f: impl FnMut(&Conflict) -> ConflictChoice + Send + 'static) -> Self {
        ImportPolicy {
            overwrite_existing: false,
            on_conflict: Some(Box::new(f)),
        }
    }

    fn decide(&mut self, conflict: &Conflict) -> ConflictChoice {
        match &mut self.on_conflict {
            Some(prompt) => prompt(conflict),
            None if self.overwrite_existing => ConflictChoice::Overwrite,
            None => ConflictChoice::Skip,
        }
    }
}

impl fmt::Debug for ImportPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImportPolicy")
            .field("overwrite_existing", &self.overwrite_existing)
            .field(
                "on_conflict",
                &self.on_conflict.as_ref().map(|_| "<prompt>"),
            )
            .finish()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ImportReport {
    /// Nodes created, folders included.
    pub added: usize,
    pub skipped: usize,
    pub overwritten: usize,
    pub cancelled: bool,
    /// Source identities whose content fully reached the destination. A
    /// folder is listed only when nothing beneath it was skipped.
    #[serde(skip)]
    pub transferred: Vec<NodeId>,
    /// Ids of the nodes created in this tree.
    #[serde(skip)]
    pub created: Vec<NodeId>,
}

enum Flow {
    Continue,
    Cancel,
}

impl RepoTree {
    /// Drops `items` into `target`.
    ///
    /// Items are de-duplicated by identity (first occurrence wins, order
    /// kept), then added depth-first. Name conflicts go to `policy`; a
    /// `CancelAll` stops the import, leaving what was already added in place.
    /// `action` does not change what is added here: removing moved sources is
    /// a separate step (`remove_after_move`) taken only after the drop is
    /// confirmed.
    pub fn import_drop(
        &mut self,
        target: NodeId,
        items: Vec<TransferItem>,
        _action: Action,
        policy: &mut ImportPolicy,
    ) -> Result<ImportReport, RepoError> {
        if !self.is_folder(target) {
            return Err(RepoError::UnknownFolder(target));
        }
        for item in &items {
            validate(item, &mut Vec::new())?;
        }
        let mut seen = HashSet::new();
        let items: Vec<TransferItem> = items.into_iter().filter(|i| seen.insert(i.id())).collect();

        let mut report = ImportReport::default();
        let mut seen = HashSet::new();
        for item in &items {
            let (flow, _) = self.import_item(target, item, policy, &mut report, &mut seen);
            if let Flow::Cancel = flow {
                report.cancelled = true;
                break;
            }
        }
        Ok(report)
    }

    /// Returns the control flow and whether `item` fully transferred.
    fn import_item(
        &mut self,
        folder: NodeId,
        item: &TransferItem,
        policy: &mut ImportPolicy,
        report: &mut ImportReport,
        seen: &mut HashSet<NodeId>,
    ) -> (Flow, bool) {
        if !seen.insert(item.id()) {
            // Already carried by an earlier item.
            return (Flow::Continue, true);
        }
        let existing = self.child_named(folder, item.name());
        match item {
            TransferItem::Component(record) => {
                let Some(existing) = existing else {
                    let id = self
                        .add_component(folder, record.clone())
                        .expect("free name in an existing folder");
                    report.added += 1;
                    report.created.push(id);
                    report.transferred.push(record.id);
                    return (Flow::Continue, true);
                };
                let conflict = Conflict {
                    folder,
                    name: record.name.clone(),
                    existing,
                    incoming: record.id,
                };
                match policy.decide(&conflict) {
                    ConflictChoice::CancelAll => (Flow::Cancel, false),
                    // Ids are only unique within one tree, so the incoming
                    // record is the existing one only if it is identical too.
                    ConflictChoice::Overwrite
                        if self
                            .component(existing)
                            .is_some_and(|c| c.id != record.id || c != record) =>
                    {
                        let now = self.now_ms();
                        let stored = self.components.get_mut(&existing).unwrap();
                        let keep_id = stored.record.id;
                        stored.record = record.clone();
                        stored.record.id = keep_id;
                        stored.record.modified_at_ms = stored
                            .record
                            .modified_at_ms
                            .max(now)
                            .max(stored.record.created_at_ms);
                        report.overwritten += 1;
                        report.transferred.push(record.id);
                        (Flow::Continue, true)
                    }
                    _ => {
                        report.skipped += 1;
                        (Flow::Continue, false)
                    }
                }
            }
            TransferItem::Folder(bundle) => {
                let dest = match existing {
                    None => {
                        let id = self.claim_id(bundle.id);
                        self.insert_folder(folder, &bundle.name, id)
                            .expect("free name in an existing folder");
                        report.added += 1;
                        report.created.push(id);
                        id
                    }
                    Some(e) if self.is_folder(e) => e,
                    Some(e) => {
                        let conflict = Conflict {
                            folder,
                            name: bundle.name.clone(),
                            existing: e,
                            incoming: bundle.id,
                        };
                        // A folder never overwrites a component.
                        if policy.decide(&conflict) == ConflictChoice::CancelAll {
                            return (Flow::Cancel, false);
                        }
                        report.skipped += 1;
                        return (Flow::Continue, false);
                    }
                };
                let mut complete = true;
                for child in &bundle.children {
                    let (flow, done) = self.import_item(dest, child, policy, report, seen);
                    complete &= done;
                    if let Flow::Cancel = flow {
                        return (Flow::Cancel, false);
                    }
                }
                if complete {
                    report.transferred.push(bundle.id);
                }
                (Flow::Continue, complete)
            }
        }
    }
}

/// Rejects invalid names and folder bundles that contain themselves.
fn validate(item: &TransferItem, ancestors: &mut Vec<NodeId>) -> Result<(), RepoError> {
    if !is_valid_name(item.name()) {
        return Err(RepoError::MalformedInput(format!(
            "invalid name {:?}",
            item.name()
        )));
    }
    match item {
        TransferItem::Component(r) => {
            if !r.is_valid() {
                return Err(RepoError::MalformedInput(format!(
                    "invalid record {:?}",
                    r.name
                )));
            }
        }
        TransferItem::Folder(f) => {
            if ancestors.contains(&f.id) {
                return Err(RepoError::MalformedInput(format!(
                    "folder {} appears inside itself",
                    f.id
                )));
            }
            ancestors.push(f.id);
            for child in &f.children {
                validate(child, ancestors)?;
            }
            ancestors.pop();
        }
    }
    Ok(())
}
