use dragrepo_core::repository::{Node, RepoTree};
use dragrepo_core::{ComponentRecord, NodeId};
use serde_json::{json, Value};

pub fn component_json(c: &ComponentRecord) -> Value {
    json!({
        "kind": "component",
        "id": c.id,
        "name": c.name,
        "dndEnabled": c.dnd_enabled,
        "byteLength": c.payload.len(),
        "interfaceSpec": c.interface_spec,
        "createdAtMs": c.created_at_ms,
        "modifiedAtMs": c.modified_at_ms,
    })
}

fn node_json(tree: &RepoTree, id: NodeId) -> Value {
    match tree.node(id).expect("child of a live folder") {
        Node::Component(c) => component_json(c),
        Node::Folder(f) => json!({
            "kind": "folder",
            "id": f.id,
            "name": f.name,
            "children": children(tree, id),
        }),
    }
}

fn children(tree: &RepoTree, folder: NodeId) -> Vec<Value> {
    tree.folder(folder)
        .map(|f| f.children.iter().map(|c| node_json(tree, *c)).collect())
        .unwrap_or_default()
}

/// The whole tree. The root carries no id; its id is always 0.
pub fn tree_json(tree: &RepoTree) -> Value {
    json!({ "root": { "name": "/", "children": children(tree, NodeId::ROOT) } })
}
