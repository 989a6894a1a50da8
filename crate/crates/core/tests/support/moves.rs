//! Randomized drag scenarios between two repositories with fault injection,
//! checked against a location oracle computed from the trees before the drop.

use std::collections::BTreeMap;

use dragrepo_core::adapters::{share, Addressing, RepoSource, RepoTargets, SharedRepo};
use dragrepo_core::engine::{
    DragPhase, DragSession, DragSource, DropTargets, Origin, Outcome, Point, PointerEvent, Receipt,
    TargetId,
};
use dragrepo_core::repository::{ConflictChoice, ImportPolicy, RepoTree};
use dragrepo_core::transfer::{DataFlavor, Payload, TransferError, Transferable};
use dragrepo_core::{Action, ActionSet, ComponentRecord, NodeId};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    None,
    FetchFails,
    TargetRefuses,
    TargetUnwilling,
    UserCancelsDrag,
    CancelAtConflict,
    SourceDisabled,
}

const FAULTS: [Fault; 7] = [
    Fault::None,
    Fault::FetchFails,
    Fault::TargetRefuses,
    Fault::TargetUnwilling,
    Fault::UserCancelsDrag,
    Fault::CancelAtConflict,
    Fault::SourceDisabled,
];

struct FailingTransferable(Box<dyn Transferable>);

impl Transferable for FailingTransferable {
    fn flavors(&self) -> &[DataFlavor] {
        self.0.flavors()
    }

    fn payload_for(&self, _flavor: &DataFlavor) -> Result<Payload, TransferError> {
        Err(TransferError::FetchFailed("injected".into()))
    }
}

pub struct FaultySource {
    pub inner: RepoSource,
    fail_fetch: bool,
}

impl DragSource for FaultySource {
    fn is_start_drag_ok(&self, origin: &Origin) -> bool {
        self.inner.is_start_drag_ok(origin)
    }

    fn transferable(&mut self) -> Option<Box<dyn Transferable>> {
        let t = self.inner.transferable()?;
        if self.fail_fetch {
            Some(Box::new(FailingTransferable(t)))
        } else {
            Some(t)
        }
    }

    fn source_actions(&self) -> ActionSet {
        self.inner.source_actions()
    }

    fn complete_move(&mut self, transferred: &[NodeId]) {
        self.inner.complete_move(transferred)
    }

    fn drag_done(&mut self, success: bool) {
        self.inner.drag_done(success)
    }
}

pub struct FaultyTargets {
    pub inner: RepoTargets,
    refuse: bool,
}

impl DropTargets for FaultyTargets {
    fn resolve(&self, node: &str) -> Option<TargetId> {
        self.inner.resolve(node)
    }

    fn preferred_flavors(&self, target: &str) -> Vec<DataFlavor> {
        self.inner.preferred_flavors(target)
    }

    fn is_drag_ok(&self, target: &str, position: Point, offered: ActionSet) -> Option<Action> {
        self.inner.is_drag_ok(target, position, offered)
    }

    fn receive_drop(&mut self, target: &str, payload: Payload, action: Action) -> Receipt {
        if self.refuse {
            return Receipt::Refused;
        }
        self.inner.receive_drop(target, payload, action)
    }
}

#[derive(Debug)]
pub struct Scenario {
    pub seed: u64,
    pub fault: Fault,
    pub action: Action,
    pub overwrite: bool,
    pub outcome: Outcome,
}

fn record(tag: &mut u32, name: &str) -> ComponentRecord {
    *tag += 1;
    ComponentRecord::new(NodeId(0), name, format!("payload-{tag}").into_bytes(), 1)
}

const NAMES: [&str; 5] = ["alpha", "beta", "gamma", "delta", "omega"];

fn fill(rng: &mut StdRng, tree: &mut RepoTree, folder: NodeId, depth: usize, tag: &mut u32) {
    for name in NAMES {
        match rng.random_range(0..6) {
            0 | 1 => {
                tree.add_component(folder, record(tag, name)).unwrap();
            }
            2 if depth < 2 => {
                let sub = tree.add_folder(folder, name).unwrap();
                fill(rng, tree, sub, depth + 1, tag);
            }
            _ => {}
        }
    }
}

/// Where each component sits, keyed by its unique payload.
fn locations(tree: &RepoTree) -> BTreeMap<Vec<u8>, Vec<String>> {
    let mut out: BTreeMap<Vec<u8>, Vec<String>> = BTreeMap::new();
    for c in tree.components() {
        out.entry(c.payload.clone())
            .or_default()
            .push(tree.path_of(c.id).unwrap());
    }
    out
}

fn join(base: &str, rel: &str) -> String {
    if base == "/" {
        format!("/{rel}")
    } else {
        format!("{base}/{rel}")
    }
}

/// Whether a dragged component at `dest` would land, judged from the
/// destination tree as it was before the drop.
fn lands(dest_tree: &RepoTree, dest: &str, overwrite: bool) -> bool {
    let parts: Vec<&str> = dest.trim_start_matches('/').split('/').collect();
    let mut path = String::from("/");
    for part in &parts[..parts.len() - 1] {
        path = join(&path, part);
        if let Some(id) = dest_tree.resolve_path(&path) {
            if !dest_tree.is_folder(id) {
                return false;
            }
        }
    }
    match dest_tree.resolve_path(dest) {
        None => true,
        Some(id) if dest_tree.is_folder(id) => false,
        Some(_) => overwrite,
    }
}

/// Runs scenario `seed` and checks the outcome against the oracle.
pub fn run(seed: u64) -> Result<Scenario, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut tag = 0;

    let mut a = RepoTree::new();
    let src_folder = a.add_folder(NodeId::ROOT, "src").unwrap();
    fill(&mut rng, &mut a, src_folder, 0, &mut tag);
    if a.folder(src_folder).unwrap().children.is_empty() {
        a.add_component(src_folder, record(&mut tag, "alpha"))
            .unwrap();
    }
    let mut b = RepoTree::new();
    let dst = b.add_folder(NodeId::ROOT, "dst").unwrap();
    fill(&mut rng, &mut b, dst, 0, &mut tag);

    let children: Vec<NodeId> = a.folder(src_folder).unwrap().children.to_vec();
    let mut selection: Vec<NodeId> = children
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.6))
        .collect();
    if selection.is_empty() {
        selection.push(children[0]);
    }

    let fault = FAULTS[rng.random_range(0..FAULTS.len())];
    let action = if rng.random_bool(0.5) {
        Action::Move
    } else {
        Action::Copy
    };
    let overwrite = rng.random_bool(0.3);
    let mut disabled = false;
    if fault == Fault::SourceDisabled {
        let comps: Vec<NodeId> = a
            .walk()
            .into_iter()
            .map(|(_, id)| id)
            .filter(|id| !a.is_folder(*id) && selection.iter().any(|s| a.is_within(*id, *s)))
            .collect();
        if let Some(c) = comps.first() {
            a.set_dnd_enabled(*c, false).unwrap();
            disabled = true;
        }
    }

    // Any dragged node whose destination path is taken, other than a folder
    // meeting a folder, is a name conflict.
    let conflict = a.walk().into_iter().any(|(_, id)| {
        if !selection.iter().any(|s| a.is_within(id, *s)) {
            return false;
        }
        let rel = a
            .path_of(id)
            .unwrap()
            .trim_start_matches("/src/")
            .to_string();
        match b.resolve_path(&join("/dst", &rel)) {
            None => false,
            Some(existing) => !(a.is_folder(id) && b.is_folder(existing)),
        }
    });

    let before_a = a.clone();
    let before_b = b.clone();

    // Expected destination path of every dragged component, by payload.
    let mut dragged: BTreeMap<Vec<u8>, String> = BTreeMap::new();
    for (_, id) in a.walk() {
        if a.is_folder(id) || !selection.iter().any(|s| a.is_within(id, *s)) {
            continue;
        }
        let rel = a
            .path_of(id)
            .unwrap()
            .trim_start_matches("/src/")
            .to_string();
        dragged.insert(a.component(id).unwrap().payload.clone(), join("/dst", &rel));
    }

    let ra: SharedRepo = share(a);
    let rb: SharedRepo = share(b);
    let offered = match action {
        Action::Copy => ActionSet::COPY,
        Action::Move => ActionSet::MOVE,
    };
    let source = FaultySource {
        inner: RepoSource::new(ra.clone(), selection.clone(), offered),
        fail_fetch: fault == Fault::FetchFails,
    };
    let mut policy = if overwrite {
        ImportPolicy::overwrite()
    } else {
        ImportPolicy::default()
    };
    if fault == Fault::CancelAtConflict {
        policy = ImportPolicy::prompt(|_| ConflictChoice::CancelAll);
    }
    let mut targets = RepoTargets::new(rb.clone(), Addressing::Path).with_policy(policy);
    if fault == Fault::TargetUnwilling {
        targets.request(Some(match action {
            Action::Copy => Action::Move,
            Action::Move => Action::Copy,
        }));
    }
    let targets = FaultyTargets {
        inner: targets,
        refuse: fault == Fault::TargetRefuses,
    };
    let mut session = DragSession::new(format!("m{seed}"), source, targets, true);
    let events = [
        PointerEvent::press(0, 0, 0, Some("/src")),
        PointerEvent::moved(10, 0, 1, None),
        PointerEvent::moved(50, 0, 2, Some("/dst")),
    ];
    for ev in &events {
        session
            .handle_pointer_event(ev)
            .map_err(|e| e.to_string())?;
    }
    if fault == Fault::UserCancelsDrag {
        session
            .handle_pointer_event(&PointerEvent::cancel(3))
            .map_err(|e| e.to_string())?;
    } else if !session.phase().is_done() && *session.phase() != DragPhase::Idle {
        let step = session
            .handle_pointer_event(&PointerEvent::release(50, 0, 3, Some("/dst")))
            .map_err(|e| e.to_string())?;
        if step.phase == DragPhase::Dropping {
            session.perform_drop().map_err(|e| e.to_string())?;
        }
    }
    let outcome = match session.phase() {
        DragPhase::Done(o) => *o,
        DragPhase::Idle => Outcome::CancelledNoTarget,
        other => return Err(format!("seed {seed}: stuck in {other}")),
    };
    let scenario = Scenario {
        seed,
        fault,
        action,
        overwrite,
        outcome,
    };

    let after_a = ra.read().unwrap().clone();
    let after_b = rb.read().unwrap().clone();
    after_a
        .check_invariants()
        .map_err(|e| format!("{scenario:?}: source {e}"))?;
    after_b
        .check_invariants()
        .map_err(|e| format!("{scenario:?}: dest {e}"))?;
    let loc_a = locations(&after_a);
    let loc_b = locations(&after_b);
    let count = |m: &BTreeMap<Vec<u8>, Vec<String>>, k: &Vec<u8>| m.get(k).map_or(0, Vec::len);

    let expect_success = match fault {
        Fault::None => true,
        Fault::CancelAtConflict => !conflict,
        Fault::SourceDisabled => !disabled,
        _ => false,
    };
    if expect_success != outcome.is_success() {
        return Err(format!("{scenario:?}: unexpected outcome"));
    }

    for (payload, dest) in &dragged {
        let (in_a, in_b) = (count(&loc_a, payload), count(&loc_b, payload));
        if in_a + in_b == 0 {
            return Err(format!("{scenario:?}: {dest} lost"));
        }
        let expect_b = usize::from(outcome.is_success() && lands(&before_b, dest, overwrite));
        match outcome {
            Outcome::Completed(Action::Move) => {
                if in_a + in_b != 1 || in_b != expect_b {
                    return Err(format!("{scenario:?}: moved {dest} at a={in_a} b={in_b}"));
                }
            }
            Outcome::Completed(Action::Copy) => {
                if in_a != 1 || in_b != expect_b {
                    return Err(format!("{scenario:?}: copied {dest} at a={in_a} b={in_b}"));
                }
                if expect_b == 1 && loc_b[payload] != [dest.clone()] {
                    return Err(format!("{scenario:?}: copied to {:?}", loc_b[payload]));
                }
            }
            _ => {
                if in_a != 1 {
                    return Err(format!("{scenario:?}: {dest} left source on failure"));
                }
            }
        }
    }
    if !outcome.is_success() {
        if after_a != before_a {
            return Err(format!("{scenario:?}: source changed"));
        }
        if fault != Fault::CancelAtConflict && after_b != before_b {
            return Err(format!("{scenario:?}: destination changed"));
        }
    }
    // Nothing outside the selection moves.
    for (payload, paths) in locations(&before_a) {
        if !dragged.contains_key(&payload) && locations(&after_a).get(&payload) != Some(&paths) {
            return Err(format!("{scenario:?}: bystander {paths:?} touched"));
        }
    }
    let done = session.source().inner.done_notices();
    if done.len() != usize::from(!disabled) {
        return Err(format!(
            "{scenario:?}: dragDone delivered {} times",
            done.len()
        ));
    }
    Ok(scenario)
}
