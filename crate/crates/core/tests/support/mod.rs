#![allow(dead_code)]

pub mod gen;
pub mod moves;
pub mod reference;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use dragrepo_core::engine::{DragSource, DropTarget, Origin, Point, Receipt};
use dragrepo_core::transfer::{
    make_component_transferable, DataFlavor, Payload, Representation, TransferError, Transferable,
    COMPONENT_MEDIA_TYPE,
};
use dragrepo_core::{Action, ActionSet, ComponentRecord, NodeId};

/// Transferable that counts fetches per representation and can be told to
/// fail them.
pub struct ProbeTransferable {
    flavors: Vec<DataFlavor>,
    pub fetches: Arc<Mutex<Vec<Representation>>>,
    fail: bool,
}

impl ProbeTransferable {
    pub fn new(fail: bool) -> (Self, Arc<Mutex<Vec<Representation>>>) {
        let fetches = Arc::new(Mutex::new(Vec::new()));
        let t = ProbeTransferable {
            flavors: vec![
                DataFlavor::local(COMPONENT_MEDIA_TYPE),
                DataFlavor::stream(COMPONENT_MEDIA_TYPE),
            ],
            fetches: fetches.clone(),
            fail,
        };
        (t, fetches)
    }
}

impl Transferable for ProbeTransferable {
    fn flavors(&self) -> &[DataFlavor] {
        &self.flavors
    }

    fn payload_for(&self, flavor: &DataFlavor) -> Result<Payload, TransferError> {
        self.fetches.lock().unwrap().push(flavor.representation());
        if self.fail {
            return Err(TransferError::FetchFailed("injected".into()));
        }
        let inner = make_component_transferable(sample_record());
        inner.payload_for(flavor)
    }
}

pub fn sample_record() -> ComponentRecord {
    ComponentRecord::new(NodeId(1), "info", b"class Info {}".to_vec(), 1)
}

/// Scripted drag source recording every call the engine makes.
pub struct MockSource {
    pub draggable: bool,
    pub actions: ActionSet,
    pub fail_fetch: bool,
    pub calls: Vec<String>,
    pub fetches: Option<Arc<Mutex<Vec<Representation>>>>,
}

impl MockSource {
    pub fn new(draggable: bool, actions: ActionSet) -> Self {
        MockSource {
            draggable,
            actions,
            fail_fetch: false,
            calls: Vec::new(),
            fetches: None,
        }
    }

    pub fn done_calls(&self) -> Vec<&str> {
        self.calls
            .iter()
            .filter(|c| c.starts_with("drag_done"))
            .map(String::as_str)
            .collect()
    }

    pub fn count(&self, prefix: &str) -> usize {
        self.calls.iter().filter(|c| c.starts_with(prefix)).count()
    }

    pub fn fetched(&self) -> Vec<Representation> {
        self.fetches
            .as_ref()
            .map(|f| f.lock().unwrap().clone())
            .unwrap_or_default()
    }
}

impl DragSource for MockSource {
    fn is_start_drag_ok(&self, _origin: &Origin) -> bool {
        self.draggable
    }

    fn transferable(&mut self) -> Option<Box<dyn Transferable>> {
        self.calls.push("transferable".into());
        let (t, fetches) = ProbeTransferable::new(self.fail_fetch);
        self.fetches = Some(fetches);
        Some(Box::new(t))
    }

    fn source_actions(&self) -> ActionSet {
        self.actions
    }

    fn complete_move(&mut self, transferred: &[NodeId]) {
        self.calls
            .push(format!("complete_move({})", transferred.len()));
    }

    fn drag_done(&mut self, success: bool) {
        self.calls.push(format!("drag_done({success})"));
    }
}

/// Scripted drop target.
#[derive(Clone)]
pub struct MockTarget {
    pub choice: Option<Action>,
    pub flavors: Vec<DataFlavor>,
    pub receipt: Receipt,
    pub drag_ok_calls: Arc<AtomicUsize>,
    pub received: Arc<Mutex<Vec<(Payload, Action)>>>,
}

impl MockTarget {
    pub fn new(choice: Option<Action>) -> Self {
        MockTarget {
            choice,
            flavors: vec![
                DataFlavor::local(COMPONENT_MEDIA_TYPE),
                DataFlavor::stream(COMPONENT_MEDIA_TYPE),
            ],
            receipt: Receipt::Accepted {
                transferred: vec![NodeId(1)],
            },
            drag_ok_calls: Arc::new(AtomicUsize::new(0)),
            received: Arc::new(Mutex::new(Vec::new())),
        }
    }

    pub fn with_receipt(mut self, receipt: Receipt) -> Self {
        self.receipt = receipt;
        self
    }

    pub fn calls(&self) -> usize {
        self.drag_ok_calls.load(Ordering::SeqCst)
    }
}

impl DropTarget for MockTarget {
    fn preferred_flavors(&self) -> Vec<DataFlavor> {
        self.flavors.clone()
    }

    fn is_drag_ok(&self, _position: Point, _offered: ActionSet) -> Option<Action> {
        self.drag_ok_calls.fetch_add(1, Ordering::SeqCst);
        self.choice
    }

    fn receive_drop(&mut self, payload: Payload, action: Action) -> Receipt {
        self.received.lock().unwrap().push((payload, action));
        self.receipt.clone()
    }
}
