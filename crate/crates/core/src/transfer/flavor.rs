use std::fmt;

use serde::{Deserialize, Serialize};

pub const COMPONENT_MEDIA_TYPE: &str = "application/x-component";
pub const FOLDER_MEDIA_TYPE: &str = "application/x-folder";

/// How a flavor's payload is represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    /// An in-process reference; only meaningful when source and target share
    /// an address space.
    LocalReference,
    /// Serialized bytes; usable everywhere.
    ByteStream,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DataFlavor {
    media_type: String,
    representation: Representation,
}

impl DataFlavor {
    /// Builds a flavor. The media type is lowercased; an empty media type is
    /// rejected.
    pub fn new(media_type: &str, representation: Representation) -> Option<Self> {
        if media_type.is_empty() {
            return None;
        }
        Some(DataFlavor {
            media_type: media_type.to_ascii_lowercase(),
            representation,
        })
    }

    pub fn local(media_type: &str) -> Self {
        Self::new(media_type, Representation::LocalReference).expect("nonempty media type")
    }

    pub fn stream(media_type: &str) -> Self {
        Self::new(media_type, Representation::ByteStream).expect("nonempty media type")
    }

    pub fn media_type(&self) -> &str {
        &self.media_type
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn is_local_reference(&self) -> bool {
        self.representation == Representation::LocalReference
    }
}

impl fmt::Display for DataFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rep = match self.representation {
            Representation::LocalReference => "local",
            Representation::ByteStream => "stream",
        };
        write!(f, "{};{rep}", self.media_type)
    }
}

/// Picks the first of the target's `preferred` flavors that the source
/// `offered`. Local references are only eligible when the transfer stays
/// in-process.
pub fn choose_flavor(
    offered: &[DataFlavor],
    preferred: &[DataFlavor],
    is_local: bool,
) -> Option<DataFlavor> {
    preferred
        .iter()
        .filter(|f| is_local || !f.is_local_reference())
        .find(|f| offered.contains(f))
        .cloned()
}
