use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use dragrepo_core::clock::Clock;
use dragrepo_core::repository::{
    load, save, ImportPolicy, Node, RepoError, RepoTree, MANIFEST_FILE,
};
use dragrepo_core::transfer::{decode_stream, encode_item, TransferEnvelope, TransferItem};
use dragrepo_core::{Action, ComponentRecord, NodeId};

use crate::error::CliError;

pub fn open(dir: &Path, clock: Arc<dyn Clock>) -> Result<RepoTree, CliError> {
    let mut tree = load(dir)?;
    tree.set_clock(clock);
    Ok(tree)
}

pub fn init(dir: &Path) -> Result<(), CliError> {
    if dir.join(MANIFEST_FILE).exists() {
        return Err(CliError::Usage(format!(
            "{} already holds a repository",
            dir.display()
        )));
    }
    save(&RepoTree::new(), dir)?;
    Ok(())
}

/// Resolves a node given as a decimal id or an absolute path.
pub fn node(tree: &RepoTree, spec: &str) -> Result<NodeId, CliError> {
    let found = if spec.starts_with('/') {
        tree.resolve_path(spec)
    } else {
        spec.parse::<NodeId>().ok().filter(|id| tree.contains(*id))
    };
    found.ok_or_else(|| {
        let id = spec.parse().unwrap_or(NodeId(u64::MAX));
        RepoError::UnknownComponent(id).into()
    })
}

pub fn folder(tree: &RepoTree, spec: &str) -> Result<NodeId, CliError> {
    let id = node(tree, spec).map_err(|_| {
        CliError::Repo(RepoError::UnknownFolder(
            spec.parse().unwrap_or(NodeId(u64::MAX)),
        ))
    })?;
    if !tree.is_folder(id) {
        return Err(RepoError::UnknownFolder(id).into());
    }
    Ok(id)
}

fn component(tree: &RepoTree, spec: &str) -> Result<NodeId, CliError> {
    let id = node(tree, spec)?;
    if tree.is_folder(id) {
        return Err(RepoError::UnknownComponent(id).into());
    }
    Ok(id)
}

/// Adds a file. Envelope files are decoded; any other file becomes a
/// component named after it with the file bytes as payload. Returns the
/// ids created.
pub fn add(tree: &mut RepoTree, file: &Path, folder_spec: &str) -> Result<Vec<NodeId>, CliError> {
    let target = folder(tree, folder_spec)?;
    let bytes = fs::read(file).map_err(|e| CliError::io(file, e))?;
    if TransferEnvelope::sniff(&bytes) {
        let mut items = decode_stream(&bytes)?;
        if let [TransferItem::Component(_)] = items.as_slice() {
            let Some(TransferItem::Component(record)) = items.pop() else {
                unreachable!()
            };
            return Ok(vec![tree.add_component(target, record)?]);
        }
        let report = tree.import_drop(target, items, Action::Copy, &mut ImportPolicy::default())?;
        return Ok(report.created);
    }
    let name = file
        .file_name()
        .map(|n| n.to_string_lossy().to_string())
        .unwrap_or_default();
    let record = ComponentRecord::new(NodeId(0), name, bytes, tree.now_ms());
    Ok(vec![tree.add_component(target, record)?])
}

pub fn mkdir(tree: &mut RepoTree, path: &str) -> Result<NodeId, CliError> {
    let trimmed = path.trim_end_matches('/');
    let (parent, name) = trimmed
        .rsplit_once('/')
        .ok_or_else(|| CliError::Usage(format!("{path:?} is not an absolute path")))?;
    let parent = folder(tree, if parent.is_empty() { "/" } else { parent })?;
    Ok(tree.add_folder(parent, name)?)
}

/// One line per node, depth-first: `/` first, folders end in `/`,
/// components show id, size and a marker when drag is disabled.
pub fn ls(tree: &RepoTree, out: &mut dyn Write) -> std::io::Result<()> {
    for (_, id) in tree.walk() {
        let path = tree.path_of(id).unwrap_or_default();
        match tree.node(id) {
            Some(Node::Folder(_)) if id.is_root() => writeln!(out, "/")?,
            Some(Node::Folder(_)) => writeln!(out, "{path}/")?,
            Some(Node::Component(c)) => {
                let off = if c.dnd_enabled {
                    ""
                } else {
                    " (drag disabled)"
                };
                writeln!(out, "{path} [{}] {} bytes{off}", c.id, c.payload.len())?
            }
            None => {}
        }
    }
    Ok(())
}

pub fn export(tree: &RepoTree, spec: &str, out: &Path) -> Result<(), CliError> {
    let id = node(tree, spec)?;
    let item = tree.snapshot(id).expect("resolved node");
    fs::write(out, encode_item(&item).to_bytes()).map_err(|e| CliError::io(out, e))
}

pub fn rename(tree: &mut RepoTree, spec: &str, name: &str) -> Result<(), CliError> {
    let id = component(tree, spec)?;
    Ok(tree.rename_component(id, name)?)
}

pub fn set_enabled(tree: &mut RepoTree, spec: &str, on: bool) -> Result<(), CliError> {
    let id = component(tree, spec)?;
    Ok(tree.set_dnd_enabled(id, on)?)
}

pub fn remove(tree: &mut RepoTree, spec: &str) -> Result<(), CliError> {
    let id = component(tree, spec)?;
    tree.remove_component(id)?;
    Ok(())
}
