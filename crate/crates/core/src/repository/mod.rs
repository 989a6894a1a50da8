//! Tree-structured store of reusable components.

mod import;
mod persist;
mod tree;

pub use import::{Conflict, ConflictChoice, ImportPolicy, ImportReport};
pub use persist::{load, save, BLOB_DIR, FORMAT_VERSION, MANIFEST_FILE};
pub use tree::{FolderView, Node, RepoTree};

use std::path::PathBuf;

use thiserror::Error;

use crate::ids::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepoError {
    #[error("NameConflict: {0:?} already exists in the folder")]
    NameConflict(String),
    #[error("InvalidName: {0:?}")]
    InvalidName(String),
    #[error("UnknownFolder: {0}")]
    UnknownFolder(NodeId),
    #[error("UnknownComponent: {0}")]
    UnknownComponent(NodeId),
    #[error("DragDisabled: {0}")]
    DragDisabled(NodeId),
    #[error("EmptySelection")]
    EmptySelection,
    #[error("MalformedInput: {0}")]
    MalformedInput(String),
    #[error("CorruptRepository: {path}: {reason}")]
    CorruptRepository { path: PathBuf, reason: String },
    #[error("IoFailure: {path}: {message}")]
    IoFailure { path: PathBuf, message: String },
}

impl RepoError {
    pub fn name(&self) -> &'static str {
        match self {
            RepoError::NameConflict(_) => "NameConflict",
            RepoError::InvalidName(_) => "InvalidName",
            RepoError::UnknownFolder(_) => "UnknownFolder",
            RepoError::UnknownComponent(_) => "UnknownComponent",
            RepoError::DragDisabled(_) => "DragDisabled",
            RepoError::EmptySelection => "EmptySelection",
            RepoError::MalformedInput(_) => "MalformedInput",
            RepoError::CorruptRepository { .. } => "CorruptRepository",
            RepoError::IoFailure { .. } => "IoFailure",
        }
    }
}
