//! Model files, commands and JSON reports for the `tcna` binary.

pub mod commands;
pub mod model;
pub mod render;
