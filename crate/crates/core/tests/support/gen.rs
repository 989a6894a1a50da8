//! Random records and trees, plus an independent envelope encoder written
//! straight from the wire layout.

use dragrepo_core::repository::RepoTree;
use dragrepo_core::{ComponentRecord, NodeId};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const NAME_CHARS: &[char] = &[
    'a', 'b', 'z', 'Q', '0', '9', '-', '_', '.', ' ', 'é', '名', '🦀',
];

pub fn name(rng: &mut StdRng) -> String {
    let len = rng.random_range(1..12);
    (0..len)
        .map(|_| NAME_CHARS[rng.random_range(0..NAME_CHARS.len())])
        .collect()
}

pub fn record(rng: &mut StdRng) -> ComponentRecord {
    let created = rng.random_range(0..u64::MAX / 2);
    let ops = rng.random_range(0..5);
    let payload_len = match rng.random_range(0..4) {
        0 => 0,
        1 => rng.random_range(1..8),
        _ => rng.random_range(0..4096),
    };
    ComponentRecord {
        id: NodeId(rng.random()),
        name: name(rng),
        interface_spec: (0..ops)
            .map(|_| {
                let mut op = name(rng);
                op.push_str("(int) : void");
                op
            })
            .collect(),
        payload: (0..payload_len).map(|_| rng.random()).collect(),
        dnd_enabled: rng.random(),
        created_at_ms: created,
        modified_at_ms: created + rng.random_range(0..1_000_000),
    }
}

/// A tree with exactly `nodes` nodes besides the root.
pub fn tree(seed: u64, nodes: usize) -> RepoTree {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut t = RepoTree::new();
    let mut folders = vec![NodeId::ROOT];
    let mut made = 0;
    while made < nodes {
        let parent = folders[rng.random_range(0..folders.len())];
        let n = name(&mut rng);
        if t.child_named(parent, &n).is_some() {
            continue;
        }
        if rng.random_bool(0.3) {
            folders.push(t.add_folder(parent, &n).unwrap());
        } else {
            let mut r = record(&mut rng);
            r.name = n;
            r.id = NodeId(0);
            t.add_component(parent, r).unwrap();
        }
        made += 1;
    }
    t
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_be_bytes());
    out.extend_from_slice(s.as_bytes());
}

/// Envelope bytes for `r`, built field by field.
pub fn oracle_bytes(r: &ComponentRecord) -> Vec<u8> {
    let mut body = vec![1u8];
    body.extend_from_slice(&r.id.0.to_be_bytes());
    put_str(&mut body, &r.name);
    body.extend_from_slice(&(r.interface_spec.len() as u32).to_be_bytes());
    for op in &r.interface_spec {
        put_str(&mut body, op);
    }
    body.extend_from_slice(&(r.payload.len() as u64).to_be_bytes());
    body.extend_from_slice(&r.payload);
    body.push(if r.dnd_enabled { 1 } else { 0 });
    body.extend_from_slice(&r.created_at_ms.to_be_bytes());
    body.extend_from_slice(&r.modified_at_ms.to_be_bytes());

    let mut out = b"DNDE".to_vec();
    out.push(1);
    put_str(&mut out, "application/x-component");
    put_str(&mut out, &r.name);
    out.extend_from_slice(&(body.len() as u64).to_be_bytes());
    out.extend_from_slice(&body);
    out
}
