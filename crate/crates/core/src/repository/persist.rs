//! On-disk layout.
//!
//! ```text
//! <dir>/manifest.json      tree shape and metadata, pretty-printed JSON
//! <dir>/blobs/<id>.bin     payload bytes of component <id>
//! ```
//!
//! The manifest carries `formatVersion`, the id allocator state and the
//! folder tree with components inline (without their payloads). Each
//! component entry records its payload `byteLength` so a truncated or
//! swapped blob is detected on load. Saving is deterministic: the same tree
//! always produces byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ids::NodeId;
use crate::record::{is_valid_name, ComponentRecord};

use super::tree::{Folder, RepoTree, Stored, ROOT_NAME};
use super::RepoError;

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const BLOB_DIR: &str = "blobs";

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct Manifest {
    format_version: u32,
    next_id: u64,
    root: FolderEntry,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct FolderEntry {
    id: NodeId,
    name: String,
    children: Vec<Entry>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ComponentEntry {
    id: NodeId,
    name: String,
    interface_spec: Vec<String>,
    dnd_enabled: bool,
    created_at_ms: u64,
    modified_at_ms: u64,
    byte_length: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
enum Entry {
    Folder(FolderEntry),
    Component(ComponentEntry),
}

fn blob_path(dir: &Path, id: NodeId) -> PathBuf {
    dir.join(BLOB_DIR).join(format!("{id}.bin"))
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RepoError + '_ {
    move |e| RepoError::IoFailure {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn corrupt(path: &Path, reason: impl Into<String>) -> RepoError {
    RepoError::CorruptRepository {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn folder_entry(tree: &RepoTree, id: NodeId) -> FolderEntry {
    let f = &tree.folders[&id];
    let children = f
        .children
        .iter()
        .map(|c| {
            if tree.folders.contains_key(c) {
                Entry::Folder(folder_entry(tree, *c))
            } else {
                let r = &tree.components[c].record;
                Entry::Component(ComponentEntry {
                    id: r.id,
                    name: r.name.clone(),
                    interface_spec: r.interface_spec.clone(),
                    dnd_enabled: r.dnd_enabled,
                    created_at_ms: r.created_at_ms,
                    modified_at_ms: r.modified_at_ms,
                    byte_length: r.payload.len() as u64,
                })
            }
        })
        .collect();
    FolderEntry {
        id,
        name: f.name.clone(),
        children,
    }
}

/// Writes `tree` under `dir`, creating it if needed. Blobs of components no
/// longer in the tree are deleted. The manifest is replaced atomically.
pub fn save(tree: &RepoTree, dir: &Path) -> Result<(), RepoError> {
    let blobs = dir.join(BLOB_DIR);
    fs::create_dir_all(&blobs).map_err(io_err(&blobs))?;

    for stored in tree.components.values() {
        let path = blob_path(dir, stored.record.id);
        let unchanged = fs::read(&path).is_ok_and(|b| b == stored.record.payload);
        if !unchanged {
            fs::write(&path, &stored.record.payload).map_err(io_err(&path))?;
        }
    }
    for entry in fs::read_dir(&blobs).map_err(io_err(&blobs))? {
        let entry = entry.map_err(io_err(&blobs))?;
        let path = entry.path();
        let live = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_suffix(".bin"))
            .and_then(|n| n.parse::<NodeId>().ok())
            .is_some_and(|id| tree.components.contains_key(&id));
        if !live && path.is_file() {
            fs::remove_file(&path).map_err(io_err(&path))?;
        }
    }

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        next_id: tree.next_id,
        root: folder_entry(tree, NodeId::ROOT),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let path = dir.join(MANIFEST_FILE);
    let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
    fs::write(&tmp, text).map_err(io_err(&tmp))?;
    fs::rename(&tmp, &path).map_err(io_err(&path))?;
    Ok(())
}

/// Reads a repository saved by [`save`]. Any inconsistency between the
/// manifest, the blobs and the tree invariants is reported as
/// `CorruptRepository` naming the offending file.
pub fn load(dir: &Path) -> Result<RepoTree, RepoError> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| corrupt(&manifest_path, e.to_string()))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(corrupt(
            &manifest_path,
            format!("unsupported format version {}", manifest.format_version),
        ));
    }
    if manifest.root.id != NodeId::ROOT || manifest.root.name != ROOT_NAME {
        return Err(corrupt(
            &manifest_path,
            "root folder must be id 0 named \"/\"",
        ));
    }

    let mut tree = RepoTree::new();
    tree.folders.clear();
    let mut loader = Loader {
        dir,
        manifest_path: &manifest_path,
        folders: BTreeMap::new(),
        components: BTreeMap::new(),
    };
    loader.folder(&manifest.root, None)?;
    tree.folders = loader.folders;
    tree.components = loader.components;
    tree.next_id = manifest.next_id;
    tree.check_invariants()
        .map_err(|reason| corrupt(&manifest_path, reason))?;
    Ok(tree)
}

struct Loader<'a> {
    dir: &'a Path,
    manifest_path: &'a Path,
    folders: BTreeMap<NodeId, Folder>,
    components: BTreeMap<NodeId, Stored>,
}

impl Loader<'_> {
    fn claim(&self, id: NodeId) -> Result<(), RepoError> {
        if self.folders.contains_key(&id) || self.components.contains_key(&id) {
            return Err(corrupt(self.manifest_path, format!("duplicate id {id}")));
        }
        Ok(())
    }

    fn folder(&mut self, entry: &FolderEntry, parent: Option<NodeId>) -> Result<(), RepoError> {
        self.claim(entry.id)?;
        if parent.is_some() && !is_valid_name(&entry.name) {
            return Err(corrupt(
                self.manifest_path,
                format!("invalid name {:?}", entry.name),
            ));
        }
        self.folders.insert(
            entry.id,
            Folder {
                name: entry.name.clone(),
                parent,
                children: entry.children.iter().map(Entry::id).collect(),
            },
        );
        for child in &entry.children {
            match child {
                Entry::Folder(f) => self.folder(f, Some(entry.id))?,
                Entry::Component(c) => self.component(c, entry.id)?,
            }
        }
        Ok(())
    }

    fn component(&mut self, entry: &ComponentEntry, parent: NodeId) -> Result<(), RepoError> {
        self.claim(entry.id)?;
        let path = blob_path(self.dir, entry.id);
        let payload = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(corrupt(
                    &path,
                    format!("missing blob for component {}", entry.id),
                ))
            }
            Err(e) => return Err(io_err(&path)(e)),
        };
        if payload.len() as u64 != entry.byte_length {
            return Err(corrupt(
                &path,
                format!(
                    "expected {} bytes, found {}",
                    entry.byte_length,
                    payload.len()
                ),
            ));
        }
        let record = ComponentRecord {
            id: entry.id,
            name: entry.name.clone(),
            interface_spec: entry.interface_spec.clone(),
            payload,
            dnd_enabled: entry.dnd_enabled,
            created_at_ms: entry.created_at_ms,
            modified_at_ms: entry.modified_at_ms,
        };
        if !record.is_valid() {
            return Err(corrupt(
                self.manifest_path,
                format!("invalid component {}", entry.id),
            ));
        }
        self.components.insert(entry.id, Stored { record, parent });
        Ok(())
    }
}

impl Entry {
    fn id(&self) -> NodeId {
        match self {
            Entry::Folder(f) => f.id,
            Entry::Component(c) => c.id,
        }
    }
}
