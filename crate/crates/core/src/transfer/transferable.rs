use std::sync::Arc;

use crate::record::ComponentRecord;

use super::envelope::{decode_stream, encode_item, TransferItem};
use super::flavor::{DataFlavor, Representation, COMPONENT_MEDIA_TYPE, FOLDER_MEDIA_TYPE};
use super::TransferError;

/// Data fetched from a transferable in one flavor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    /// Shared in-process items.
    Local(Arc<[TransferItem]>),
    /// Concatenated envelopes.
    Stream(Vec<u8>),
}

impl Payload {
    /// Resolves the payload to owned items, decoding a byte stream if needed.
    pub fn into_items(self) -> Result<Vec<TransferItem>, TransferError> {
        match self {
            Payload::Local(items) => Ok(items.to_vec()),
            Payload::Stream(bytes) => decode_stream(&bytes),
        }
    }
}

/// Payload offered under one or more flavors.
pub trait Transferable: Send + Sync {
    /// Offered flavors, most faithful first.
    fn flavors(&self) -> &[DataFlavor];

    fn payload_for(&self, flavor: &DataFlavor) -> Result<Payload, TransferError>;
}

/// Transferable over a list of repository items. Offers a local-reference
/// flavor followed by a byte-stream flavor of the same media type.
#[derive(Clone, Debug)]
pub struct RecordTransferable {
    items: Arc<[TransferItem]>,
    flavors: Vec<DataFlavor>,
}

impl RecordTransferable {
    pub fn new(items: Vec<TransferItem>) -> Self {
        let media_type = if items
            .iter()
            .all(|i| matches!(i, TransferItem::Component(_)))
        {
            COMPONENT_MEDIA_TYPE
        } else {
            FOLDER_MEDIA_TYPE
        };
        RecordTransferable {
            items: items.into(),
            flavors: vec![
                DataFlavor::local(media_type),
                DataFlavor::stream(media_type),
            ],
        }
    }

    pub fn items(&self) -> &[TransferItem] {
        &self.items
    }
}

impl Transferable for RecordTransferable {
    fn flavors(&self) -> &[DataFlavor] {
        &self.flavors
    }

    fn payload_for(&self, flavor: &DataFlavor) -> Result<Payload, TransferError> {
        if !self.flavors.contains(flavor) {
            return Err(TransferError::UnsupportedFlavor(flavor.to_string()));
        }
        Ok(match flavor.representation() {
            Representation::LocalReference => Payload::Local(self.items.clone()),
            Representation::ByteStream => {
                let mut bytes = Vec::new();
                for item in self.items.iter() {
                    bytes.extend(encode_item(item).to_bytes());
                }
                Payload::Stream(bytes)
            }
        })
    }
}

pub fn make_component_transferable(record: ComponentRecord) -> RecordTransferable {
    RecordTransferable::new(vec![TransferItem::Component(record)])
}
