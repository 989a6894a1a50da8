//! Repository administration and headless trace replay behind the `dnd`
//! binary.

pub mod commands;
pub mod error;
pub mod replay;
pub mod trace;
