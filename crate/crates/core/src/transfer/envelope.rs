//! Byte-stream wire format.
//!
//! An envelope is a self-delimiting frame. All integers are big-endian and
//! every string is UTF-8 prefixed by a `u32` byte length.
//!
//! ```text
//! envelope   := magic "DNDE" | version u8 (=1) | mediaType str | name str
//!               | byteLength u64 | body [byteLength]
//! component  := version u8 (=1) | id u64 | name str | count u32 | str * count
//!               | payloadLen u64 | payload | dndEnabled u8 (0|1)
//!               | createdAtMs u64 | modifiedAtMs u64
//! folder     := version u8 (=1) | id u64 | name str | count u32 | envelope * count
//! ```
//!
//! Decoding is strict: trailing bytes, non-canonical booleans, a header name
//! that disagrees with the body name or an invalid record are all rejected,
//! which makes `encode(decode(bytes)) == bytes` for every accepted input.

use crate::ids::NodeId;
use crate::record::{is_valid_name, ComponentRecord};

use super::flavor::{COMPONENT_MEDIA_TYPE, FOLDER_MEDIA_TYPE};
use super::TransferError;

pub const ENVELOPE_MAGIC: &[u8; 4] = b"DNDE";
pub const ENVELOPE_VERSION: u8 = 1;
const BODY_VERSION: u8 = 1;
const MAX_FOLDER_DEPTH: usize = 256;

/// A folder subtree carried as one transfer item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FolderBundle {
    pub id: NodeId,
    pub name: String,
    pub children: Vec<TransferItem>,
}

/// One unit inside a transferable: a component or a whole folder subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransferItem {
    Component(ComponentRecord),
    Folder(FolderBundle),
}

impl TransferItem {
    pub fn id(&self) -> NodeId {
        match self {
            TransferItem::Component(r) => r.id,
            TransferItem::Folder(f) => f.id,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            TransferItem::Component(r) => &r.name,
            TransferItem::Folder(f) => &f.name,
        }
    }

    pub fn media_type(&self) -> &'static str {
        match self {
            TransferItem::Component(_) => COMPONENT_MEDIA_TYPE,
            TransferItem::Folder(_) => FOLDER_MEDIA_TYPE,
        }
    }
}

/// Header plus body. `byte_length` is kept separately from the body so a
/// frame read off the wire can be checked against it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferEnvelope {
    pub media_type: String,
    pub name: String,
    pub byte_length: u64,
    pub body: Vec<u8>,
}

impl TransferEnvelope {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.body.len() + 32);
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(ENVELOPE_MAGIC);
        out.push(ENVELOPE_VERSION);
        put_str(out, &self.media_type);
        put_str(out, &self.name);
        out.extend_from_slice(&self.byte_length.to_be_bytes());
        out.extend_from_slice(&self.body);
    }

    /// Parses exactly one envelope occupying all of `bytes`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, TransferError> {
        let mut r = Reader::new(bytes);
        let env = r.envelope()?;
        r.finish("envelope")?;
        Ok(env)
    }

    /// True when `bytes` starts with the envelope magic.
    pub fn sniff(bytes: &[u8]) -> bool {
        bytes.starts_with(ENVELOPE_MAGIC)
    }
}

pub fn encode_envelope(record: &ComponentRecord) -> TransferEnvelope {
    let mut body = Vec::with_capacity(record.payload.len() + 64);
    body.push(BODY_VERSION);
    body.extend_from_slice(&record.id.0.to_be_bytes());
    put_str(&mut body, &record.name);
    body.extend_from_slice(&(record.interface_spec.len() as u32).to_be_bytes());
    for op in &record.interface_spec {
        put_str(&mut body, op);
    }
    body.extend_from_slice(&(record.payload.len() as u64).to_be_bytes());
    body.extend_from_slice(&record.payload);
    body.push(record.dnd_enabled as u8);
    body.extend_from_slice(&record.created_at_ms.to_be_bytes());
    body.extend_from_slice(&record.modified_at_ms.to_be_bytes());
    TransferEnvelope {
        media_type: COMPONENT_MEDIA_TYPE.to_string(),
        name: record.name.clone(),
        byte_length: body.len() as u64,
        body,
    }
}

fn encode_folder(bundle: &FolderBundle) -> TransferEnvelope {
    let mut body = Vec::new();
    body.push(BODY_VERSION);
    body.extend_from_slice(&bundle.id.0.to_be_bytes());
    put_str(&mut body, &bundle.name);
    body.extend_from_slice(&(bundle.children.len() as u32).to_be_bytes());
    for child in &bundle.children {
        encode_item(child).write_to(&mut body);
    }
    TransferEnvelope {
        media_type: FOLDER_MEDIA_TYPE.to_string(),
        name: bundle.name.clone(),
        byte_length: body.len() as u64,
        body,
    }
}

pub fn encode_item(item: &TransferItem) -> TransferEnvelope {
    match item {
        TransferItem::Component(r) => encode_envelope(r),
        TransferItem::Folder(f) => encode_folder(f),
    }
}

/// Decodes a component envelope. Folder envelopes are rejected with
/// `UnsupportedFlavor`; use [`decode_stream`] for mixed content.
pub fn decode_envelope(env: &TransferEnvelope) -> Result<ComponentRecord, TransferError> {
    match decode_item(env, 0)? {
        TransferItem::Component(r) => Ok(r),
        TransferItem::Folder(_) => Err(TransferError::UnsupportedFlavor(format!(
            "expected {COMPONENT_MEDIA_TYPE}, got {FOLDER_MEDIA_TYPE}"
        ))),
    }
}

/// Decodes a concatenation of envelopes, as carried by a multi-item
/// byte-stream flavor.
pub fn decode_stream(bytes: &[u8]) -> Result<Vec<TransferItem>, TransferError> {
    let mut r = Reader::new(bytes);
    let mut items = Vec::new();
    while !r.is_empty() {
        let env = r.envelope()?;
        items.push(decode_item(&env, 0)?);
    }
    Ok(items)
}

fn decode_item(env: &TransferEnvelope, depth: usize) -> Result<TransferItem, TransferError> {
    if env.byte_length != env.body.len() as u64 {
        return Err(malformed(format!(
            "byteLength {} but body has {} bytes",
            env.byte_length,
            env.body.len()
        )));
    }
    let item = match env.media_type.as_str() {
        COMPONENT_MEDIA_TYPE => TransferItem::Component(decode_component_body(&env.body)?),
        FOLDER_MEDIA_TYPE => {
            if depth >= MAX_FOLDER_DEPTH {
                return Err(malformed("folder nesting too deep"));
            }
            TransferItem::Folder(decode_folder_body(&env.body, depth)?)
        }
        other => return Err(TransferError::UnsupportedFlavor(other.to_string())),
    };
    if item.name() != env.name {
        return Err(malformed(format!(
            "header name {:?} does not match body name {:?}",
            env.name,
            item.name()
        )));
    }
    Ok(item)
}

fn decode_component_body(body: &[u8]) -> Result<ComponentRecord, TransferError> {
    let mut r = Reader::new(body);
    r.version()?;
    let id = NodeId(r.u64()?);
    let name = r.str()?;
    let count = r.u32()?;
    let mut interface_spec = Vec::new();
    for _ in 0..count {
        interface_spec.push(r.str()?);
    }
    let len = r.u64()?;
    let payload = r.take(len)?.to_vec();
    let dnd_enabled = match r.u8()? {
        0 => false,
        1 => true,
        b => return Err(malformed(format!("invalid boolean byte {b}"))),
    };
    let created_at_ms = r.u64()?;
    let modified_at_ms = r.u64()?;
    r.finish("component body")?;
    let record = ComponentRecord {
        id,
        name,
        interface_spec,
        payload,
        dnd_enabled,
        created_at_ms,
        modified_at_ms,
    };
    if !record.is_valid() {
        return Err(malformed(format!(
            "invalid component record {:?}",
            record.name
        )));
    }
    Ok(record)
}

fn decode_folder_body(body: &[u8], depth: usize) -> Result<FolderBundle, TransferError> {
    let mut r = Reader::new(body);
    r.version()?;
    let id = NodeId(r.u64()?);
    let name = r.str()?;
    if !is_valid_name(&name) {
        return Err(malformed(format!("invalid folder name {name:?}")));
    }
    let count = r.u32()?;
    let mut children = Vec::new();
    for _ in 0..count {
        let env = r.envelope()?;
        children.push(decode_item(&env, depth + 1)?);
    }
    r.finish("folder body")?;
    Ok(FolderBundle { id, name, children })
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_be_bytes());
    out.extend_from_slice(s.as_bytes());
}

fn malformed(msg: impl Into<String>) -> TransferError {
    TransferError::MalformedEnvelope(msg.into())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn is_empty(&self) -> bool {
        self.pos >= self.buf.len()
    }

    fn take(&mut self, n: u64) -> Result<&'a [u8], TransferError> {
        let remaining = (self.buf.len() - self.pos) as u64;
        if n > remaining {
            return Err(malformed(format!(
                "truncated: wanted {n} bytes at offset {}, {remaining} left",
                self.pos
            )));
        }
        let start = self.pos;
        self.pos += n as usize;
        Ok(&self.buf[start..self.pos])
    }

    fn u8(&mut self) -> Result<u8, TransferError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, TransferError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, TransferError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn str(&mut self) -> Result<String, TransferError> {
        let len = self.u32()?;
        let raw = self.take(len as u64)?;
        String::from_utf8(raw.to_vec()).map_err(|_| malformed("string is not UTF-8"))
    }

    fn version(&mut self) -> Result<(), TransferError> {
        match self.u8()? {
            BODY_VERSION => Ok(()),
            v => Err(malformed(format!("unsupported body version {v}"))),
        }
    }

    fn envelope(&mut self) -> Result<TransferEnvelope, TransferError> {
        if self.take(4)? != ENVELOPE_MAGIC {
            return Err(malformed("bad magic"));
        }
        match self.u8()? {
            ENVELOPE_VERSION => {}
            v => return Err(malformed(format!("unsupported envelope version {v}"))),
        }
        let media_type = self.str()?;
        let name = self.str()?;
        let byte_length = self.u64()?;
        let body = self.take(byte_length)?.to_vec();
        Ok(TransferEnvelope {
            media_type,
            name,
            byte_length,
            body,
        })
    }

    fn finish(&self, what: &str) -> Result<(), TransferError> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(malformed(format!(
                "{} trailing bytes after {what}",
                self.buf.len() - self.pos
            )))
        }
    }
}
