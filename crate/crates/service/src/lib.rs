//! HTTP front end for a component repository and its drag sessions.
//!
//! JSON on the control plane, raw transfer envelopes on the payload plane.
//! Every session runs with `is_local = false`, so drops always travel as
//! byte streams.

pub mod error;
mod routes;
pub mod state;
mod view;

pub use error::ApiError;
pub use routes::router;
pub use state::{AppState, SESSION_IDLE_TIMEOUT_MS};
pub use view::tree_json;
