//! Transferable payloads, data-flavor negotiation and the byte-stream wire
//! envelope.

mod envelope;
mod flavor;
mod transferable;

pub use envelope::{
    decode_envelope, decode_stream, encode_envelope, encode_item, FolderBundle, TransferEnvelope,
    TransferItem, ENVELOPE_MAGIC, ENVELOPE_VERSION,
};
pub use flavor::{
    choose_flavor, DataFlavor, Representation, COMPONENT_MEDIA_TYPE, FOLDER_MEDIA_TYPE,
};
pub use transferable::{make_component_transferable, Payload, RecordTransferable, Transferable};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("MalformedEnvelope: {0}")]
    MalformedEnvelope(String),
    #[error("UnsupportedFlavor: {0}")]
    UnsupportedFlavor(String),
    #[error("payload fetch failed: {0}")]
    FetchFailed(String),
}

impl TransferError {
    /// Short error name used in CLI output and service error bodies.
    pub fn name(&self) -> &'static str {
        match self {
            TransferError::MalformedEnvelope(_) => "MalformedEnvelope",
            TransferError::UnsupportedFlavor(_) => "UnsupportedFlavor",
            TransferError::FetchFailed(_) => "TransferFailed",
        }
    }
}
