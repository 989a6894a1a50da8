use serde::{Deserialize, Serialize};

use crate::ids::NodeId;

/// A reusable component: its interface (operation signatures) plus opaque
/// implementation bytes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentRecord {
    pub id: NodeId,
    pub name: String,
    pub interface_spec: Vec<String>,
    #[serde(skip)]
    pub payload: Vec<u8>,
    pub dnd_enabled: bool,
    pub created_at_ms: u64,
    pub modified_at_ms: u64,
}

impl ComponentRecord {
    pub fn new(id: NodeId, name: impl Into<String>, payload: Vec<u8>, now_ms: u64) -> Self {
        ComponentRecord {
            id,
            name: name.into(),
            interface_spec: Vec::new(),
            payload,
            dnd_enabled: true,
            created_at_ms: now_ms,
            modified_at_ms: now_ms,
        }
    }

    pub fn with_interface<I, S>(mut self, ops: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.interface_spec = ops.into_iter().map(Into::into).collect();
        self
    }

    pub fn is_valid(&self) -> bool {
        is_valid_name(&self.name) && self.modified_at_ms >= self.created_at_ms
    }
}

/// Names are nonempty and carry no path separator.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains(['/', '\\'])
}
