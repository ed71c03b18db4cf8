//! Library surface of the CLI so its integration tests can drive the
//! command implementations and file schemas directly.

pub mod commands;
pub mod tradeoff;
