//! Library side of the `chainrec` tool: model loading and the verification suite.

pub mod input;
pub mod verify;
